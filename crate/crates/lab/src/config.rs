//! Scenario configuration: a line-oriented `key = value` document with
//! `[section]` headers and `#` comments.
//!
//! Parsing happens in two layers. [`Document`] only knows about sections and
//! keys; [`ScenarioConfig`] gives them types and defaults. Printing a config
//! writes every field explicitly, so `parse(print(c)) == c`.

use std::f64::consts::PI;
use std::fmt;

use pbqc_core::analysis::WeightModel;
use pbqc_core::attacks::ModifiedStrategy;
use pbqc_core::state::SingleGate;

use crate::error::LabError;

/// Sections in their printed order, with the keys each one accepts.
const SCHEMA: &[(&str, &[&str])] = &[
    ("run", &["name", "seed", "trials"]),
    ("protocol", &["kind", "n", "u", "shares", "code", "rotations", "program", "theta", "phi", "bits", "gates"]),
    ("geometry", &["layout", "d", "l", "c", "latency", "verifiers", "receiver", "cheaters"]),
    ("attack", &["kind", "strategy"]),
    (
        "analysis",
        &[
            "samples", "strategies", "sweep", "sweep_phi", "restarts", "steps", "weights", "grid", "extra_thetas", "spiral", "points",
            "grid_theta", "grid_phi",
        ],
    ),
    ("output", &["dir", "report", "tables"]),
];

/// Sections and their `key = value` entries, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    pub sections: Vec<(String, Vec<(String, String)>)>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, LabError> {
        let mut doc = Document::default();
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| LabError::parse(line_no, "unterminated section header"))?.trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(LabError::parse(line_no, format!("unknown section [{name}]")));
                }
                if doc.sections.iter().any(|(s, _)| s == name) {
                    return Err(LabError::parse(line_no, format!("section [{name}] repeated")));
                }
                doc.sections.push((name.to_string(), Vec::new()));
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| LabError::parse(line_no, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            let (section, entries) = doc.sections.last_mut().ok_or_else(|| LabError::parse(line_no, "key outside any section"))?;
            let allowed = SCHEMA.iter().find(|(s, _)| s == section).map(|(_, keys)| *keys).unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(LabError::parse(line_no, format!("unknown key '{key}' in [{section}]")));
            }
            if entries.iter().any(|(k, _)| k == key) {
                return Err(LabError::parse(line_no, format!("key '{key}' repeated in [{section}]")));
            }
            entries.push((key.to_string(), value.to_string()));
        }
        Ok(doc)
    }

    fn section(&self, name: &str) -> Option<&[(String, String)]> {
        self.sections.iter().find(|(s, _)| s == name).map(|(_, e)| e.as_slice())
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, entries)) in self.sections.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "[{name}]")?;
            for (k, v) in entries {
                writeln!(f, "{k} = {v}")?;
            }
        }
        Ok(())
    }
}

/// Typed access to one section; every key must be read exactly once.
struct Reader<'a> {
    section: &'static str,
    entries: Vec<(&'a str, &'a str, bool)>,
}

impl<'a> Reader<'a> {
    fn new(doc: &'a Document, section: &'static str) -> Self {
        let entries = doc.section(section).unwrap_or(&[]).iter().map(|(k, v)| (k.as_str(), v.as_str(), false)).collect();
        Self { section, entries }
    }

    fn take(&mut self, key: &str) -> Option<&'a str> {
        self.entries.iter_mut().find(|(k, _, _)| *k == key).map(|e| {
            e.2 = true;
            e.1
        })
    }

    fn get<T>(&mut self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, LabError> {
        let section = self.section;
        self.take(key).map(|v| parse(v).map_err(|m| LabError::Parse(format!("[{section}] {key}: {m}")))).transpose()
    }

    fn require<T>(&mut self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, LabError> {
        let section = self.section;
        self.get(key, parse)?.ok_or_else(|| LabError::Parse(format!("[{section}] missing key '{key}'")))
    }

    fn finish(self) -> Result<(), LabError> {
        match self.entries.iter().find(|(_, _, used)| !used) {
            Some((k, _, _)) => Err(LabError::Parse(format!("[{}] key '{k}' is not used by this configuration", self.section))),
            None => Ok(()),
        }
    }
}

fn p_usize(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("expected a non-negative integer, got '{s}'"))
}

fn p_u64(s: &str) -> Result<u64, String> {
    s.parse().map_err(|_| format!("expected a non-negative integer, got '{s}'"))
}

/// A decimal, or a multiple of pi written `pi`, `pi/3`, `2pi/5` or `2*pi/5`.
pub fn p_f64(s: &str) -> Result<f64, String> {
    let bad = || format!("expected a number, got '{s}'");
    let v = if let Some(i) = s.find("pi") {
        let num = s[..i].trim_end_matches('*').trim();
        let num = if num.is_empty() { 1.0 } else { num.parse::<f64>().map_err(|_| bad())? };
        let den = match s[i + 2..].trim() {
            "" => 1.0,
            rest => rest.strip_prefix('/').ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?,
        };
        num * PI / den
    } else {
        s.parse::<f64>().map_err(|_| bad())?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn p_bit(s: &str) -> Result<bool, String> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(format!("expected 0 or 1, got '{s}'")),
    }
}

fn p_bits(s: &str) -> Result<Vec<bool>, String> {
    s.split_whitespace().map(p_bit).collect()
}

fn p_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split_whitespace().map(p_f64).collect()
}

fn p_point(s: &str) -> Result<[f64; 3], String> {
    let v = p_floats(s)?;
    match v.len() {
        2 => Ok([v[0], v[1], 0.0]),
        3 => Ok([v[0], v[1], v[2]]),
        _ => Err(format!("expected 2 or 3 coordinates, got '{s}'")),
    }
}

fn p_points(s: &str) -> Result<Vec<[f64; 3]>, String> {
    s.split(';').map(|p| p_point(p.trim())).collect()
}

fn p_gate(s: &str) -> Result<SingleGate, String> {
    Ok(match s {
        "H" => SingleGate::H,
        "S" => SingleGate::S,
        "Sdg" => SingleGate::Sdg,
        "T" => SingleGate::T,
        "Tdg" => SingleGate::Tdg,
        "X" => SingleGate::X,
        "Y" => SingleGate::Y,
        "Z" => SingleGate::Z,
        _ => return Err(format!("unknown gate '{s}'")),
    })
}

/// `;`-separated gate sequences, each space-separated in application order.
/// `I` or an empty entry is the identity.
fn p_sequences(s: &str) -> Result<Vec<Vec<SingleGate>>, String> {
    s.split(';').map(|seq| seq.split_whitespace().filter(|g| *g != "I").map(p_gate).collect()).collect()
}

fn p_strategy(s: &str) -> Result<ModifiedStrategy, String> {
    ModifiedStrategy::parse(s).ok_or_else(|| format!("unknown strategy '{s}'"))
}

fn p_strategies(s: &str) -> Result<Vec<ModifiedStrategy>, String> {
    s.split_whitespace().map(p_strategy).collect()
}

fn p_weights(s: &str) -> Result<WeightModel, String> {
    WeightModel::parse(s).ok_or_else(|| format!("expected uniform or free, got '{s}'"))
}

fn p_words(s: &str) -> Result<Vec<String>, String> {
    Ok(s.split_whitespace().map(str::to_string).collect())
}

fn fmt_bits(b: &[bool]) -> String {
    b.iter().map(|&x| if x { "1" } else { "0" }).collect::<Vec<_>>().join(" ")
}

fn fmt_floats(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

fn fmt_point(p: &[f64; 3]) -> String {
    fmt_floats(p)
}

fn fmt_points(v: &[[f64; 3]]) -> String {
    v.iter().map(fmt_point).collect::<Vec<_>>().join("; ")
}

fn fmt_sequences(v: &[Vec<SingleGate>]) -> String {
    v.iter()
        .map(|seq| if seq.is_empty() { "I".to_string() } else { seq.iter().map(SingleGate::symbol).collect::<Vec<_>>().join(" ") })
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    /// Basis secret split into XOR shares.
    A,
    /// GHZ codeword with local rotations.
    B,
    /// Secret rotation split into operator shares.
    Modified,
}

impl ProtocolKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::A => "a",
            Self::B => "b",
            Self::Modified => "modified",
        }
    }

    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "a" => Ok(Self::A),
            "b" => Ok(Self::B),
            "modified" => Ok(Self::Modified),
            _ => Err(format!("expected a, b or modified, got '{s}'")),
        }
    }
}

/// How the modified protocol's rotation is given.
#[derive(Debug, Clone, PartialEq)]
pub enum ProgramSpec {
    Angles { theta: f64, phi: f64 },
    Bits(String),
    /// One gate sequence per share.
    Gates(Vec<Vec<SingleGate>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSection {
    pub kind: ProtocolKind,
    /// Number of verifiers.
    pub n: usize,
    /// Secret bit; drawn per trial when absent.
    pub u: Option<bool>,
    /// Basis shares `q2…qN` (protocol A); drawn per trial when absent.
    pub shares: Option<Vec<bool>>,
    /// GHZ label (protocol B); drawn per trial when absent.
    pub code: Option<Vec<bool>>,
    /// Local rotation per qubit (protocol B).
    pub rotations: Option<Vec<Vec<SingleGate>>>,
    /// Modified protocol only; drawn per trial when absent.
    pub program: Option<ProgramSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Two verifiers at `(±d, 0, 0)`.
    Line,
    /// `n` verifiers on a circle of radius `d`.
    Regular,
    /// Explicit coordinates.
    Custom,
}

impl Layout {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Line => "line",
            Self::Regular => "regular",
            Self::Custom => "custom",
        }
    }

    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "line" => Ok(Self::Line),
            "regular" => Ok(Self::Regular),
            "custom" => Ok(Self::Custom),
            _ => Err(format!("expected line, regular or custom, got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySection {
    pub layout: Layout,
    /// Verifier distance from the receiver (line and regular layouts).
    pub d: Option<f64>,
    pub l: f64,
    pub c: f64,
    pub latency: f64,
    pub verifiers: Option<Vec<[f64; 3]>>,
    pub receiver: Option<[f64; 3]>,
    pub cheaters: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackKind {
    /// Teleportation attacks on protocols A and B.
    Teleport,
    /// Secret-sharing attack on protocol A with three or more stations.
    Qss,
    /// Cluster-chain attack on the modified protocol with Clifford shares.
    Chain,
    /// A two-station strategy against the modified protocol.
    Modified,
}

impl AttackKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Teleport => "teleport",
            Self::Qss => "qss",
            Self::Chain => "chain",
            Self::Modified => "modified",
        }
    }

    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "teleport" => Ok(Self::Teleport),
            "qss" => Ok(Self::Qss),
            "chain" => Ok(Self::Chain),
            "modified" => Ok(Self::Modified),
            _ => Err(format!("expected teleport, qss, chain or modified, got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackSection {
    pub kind: AttackKind,
    pub strategy: Option<ModifiedStrategy>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    PauliAxes,
    PauliEigenstates,
    /// `Z` pole, extra `θ` at `φ = 0` and a Fibonacci spiral.
    Mixed { extra_thetas: Vec<f64>, spiral: usize },
    Equator(usize),
    Single { theta: f64, phi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSection {
    pub samples: usize,
    pub strategies: Vec<ModifiedStrategy>,
    /// `θ` slices in the sweep table; `0` skips it.
    pub sweep: usize,
    pub sweep_phi: usize,
    pub restarts: usize,
    pub steps: usize,
    pub weights: Option<WeightModel>,
    pub grid: Option<GridSpec>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            samples: 100_000,
            strategies: vec![ModifiedStrategy::RandomGuess, ModifiedStrategy::MeasureHold, ModifiedStrategy::TeleportOptimal],
            sweep: 0,
            sweep_phi: 128,
            restarts: 32,
            steps: 120,
            weights: None,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub dir: String,
    pub report: String,
    /// Table selectors written next to the report.
    pub tables: Vec<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: ".".into(), report: "report.txt".into(), tables: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub seed: u64,
    pub trials: usize,
    pub protocol: ProtocolSection,
    pub geometry: GeometrySection,
    pub attack: Option<AttackSection>,
    pub analysis: AnalysisSection,
    pub output: OutputSection,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, LabError> {
        Self::from_document(&Document::parse(text)?)
    }

    pub fn from_document(doc: &Document) -> Result<Self, LabError> {
        let mut r = Reader::new(doc, "run");
        let name = r.get("name", |s| Ok(s.to_string()))?.unwrap_or_else(|| "scenario".into());
        let seed = r.get("seed", p_u64)?.unwrap_or(0);
        let trials = r.get("trials", p_usize)?.unwrap_or(1);
        r.finish()?;

        let mut r = Reader::new(doc, "protocol");
        let kind = r.require("kind", ProtocolKind::parse)?;
        let n = r.require("n", p_usize)?;
        let u = r.get("u", p_bit)?;
        let shares = r.get("shares", p_bits)?;
        let code = r.get("code", p_bits)?;
        let rotations = r.get("rotations", p_sequences)?;
        let program = match r.get("program", |s| Ok(s.to_string()))?.as_deref() {
            None => None,
            Some("angles") => Some(ProgramSpec::Angles { theta: r.require("theta", p_f64)?, phi: r.require("phi", p_f64)? }),
            Some("bits") => Some(ProgramSpec::Bits(r.require("bits", |s| Ok(s.to_string()))?)),
            Some("gates") => Some(ProgramSpec::Gates(r.require("gates", p_sequences)?)),
            Some(other) => return Err(LabError::Parse(format!("[protocol] program: expected angles, bits or gates, got '{other}'"))),
        };
        r.finish()?;
        let protocol = ProtocolSection { kind, n, u, shares, code, rotations, program };

        let mut r = Reader::new(doc, "geometry");
        let layout = r.get("layout", Layout::parse)?.unwrap_or(if n == 2 { Layout::Line } else { Layout::Regular });
        let d = if layout == Layout::Custom { None } else { Some(r.get("d", p_f64)?.unwrap_or(1.0)) };
        let l = r.get("l", p_f64)?.unwrap_or(0.1);
        let c = r.get("c", p_f64)?.unwrap_or(1.0);
        let latency = r.get("latency", p_f64)?.unwrap_or(0.0);
        let (verifiers, receiver) = if layout == Layout::Custom {
            (Some(r.require("verifiers", p_points)?), Some(r.get("receiver", p_point)?.unwrap_or([0.0; 3])))
        } else {
            (None, None)
        };
        let cheaters = r.get("cheaters", p_points)?;
        r.finish()?;
        let geometry = GeometrySection { layout, d, l, c, latency, verifiers, receiver, cheaters };

        let attack = if doc.section("attack").is_some() {
            let mut r = Reader::new(doc, "attack");
            let kind = r.require("kind", AttackKind::parse)?;
            let strategy = if kind == AttackKind::Modified { Some(r.require("strategy", p_strategy)?) } else { None };
            r.finish()?;
            Some(AttackSection { kind, strategy })
        } else {
            None
        };

        let mut r = Reader::new(doc, "analysis");
        let defaults = AnalysisSection::default();
        let grid = match r.get("grid", |s| Ok(s.to_string()))?.as_deref() {
            None => None,
            Some("pauli-axes") => Some(GridSpec::PauliAxes),
            Some("pauli-eigenstates") => Some(GridSpec::PauliEigenstates),
            Some("mixed") => Some(GridSpec::Mixed {
                extra_thetas: r.get("extra_thetas", p_floats)?.unwrap_or_default(),
                spiral: r.get("spiral", p_usize)?.unwrap_or(64),
            }),
            Some("equator") => Some(GridSpec::Equator(r.require("points", p_usize)?)),
            Some("single") => Some(GridSpec::Single { theta: r.require("grid_theta", p_f64)?, phi: r.require("grid_phi", p_f64)? }),
            Some(other) => return Err(LabError::Parse(format!("[analysis] grid: unknown grid '{other}'"))),
        };
        let analysis = AnalysisSection {
            samples: r.get("samples", p_usize)?.unwrap_or(defaults.samples),
            strategies: r.get("strategies", p_strategies)?.unwrap_or(defaults.strategies),
            sweep: r.get("sweep", p_usize)?.unwrap_or(defaults.sweep),
            sweep_phi: r.get("sweep_phi", p_usize)?.unwrap_or(defaults.sweep_phi),
            restarts: r.get("restarts", p_usize)?.unwrap_or(defaults.restarts),
            steps: r.get("steps", p_usize)?.unwrap_or(defaults.steps),
            weights: r.get("weights", p_weights)?,
            grid,
        };
        r.finish()?;

        let mut r = Reader::new(doc, "output");
        let d = OutputSection::default();
        let output = OutputSection {
            dir: r.get("dir", |s| Ok(s.to_string()))?.unwrap_or(d.dir),
            report: r.get("report", |s| Ok(s.to_string()))?.unwrap_or(d.report),
            tables: r.get("tables", p_words)?.unwrap_or_default(),
        };
        r.finish()?;

        Ok(Self { name, seed, trials, protocol, geometry, attack, analysis, output })
    }

    pub fn to_document(&self) -> Document {
        let mut sections = Vec::new();
        let kv = |k: &str, v: String| (k.to_string(), v);

        sections.push(("run".into(), vec![kv("name", self.name.clone()), kv("seed", self.seed.to_string()), kv("trials", self.trials.to_string())]));

        let p = &self.protocol;
        let mut e = vec![kv("kind", p.kind.name().into()), kv("n", p.n.to_string())];
        if let Some(u) = p.u {
            e.push(kv("u", fmt_bits(&[u])));
        }
        if let Some(s) = &p.shares {
            e.push(kv("shares", fmt_bits(s)));
        }
        if let Some(s) = &p.code {
            e.push(kv("code", fmt_bits(s)));
        }
        if let Some(s) = &p.rotations {
            e.push(kv("rotations", fmt_sequences(s)));
        }
        match &p.program {
            None => {}
            Some(ProgramSpec::Angles { theta, phi }) => {
                e.extend([kv("program", "angles".into()), kv("theta", theta.to_string()), kv("phi", phi.to_string())]);
            }
            Some(ProgramSpec::Bits(b)) => e.extend([kv("program", "bits".into()), kv("bits", b.clone())]),
            Some(ProgramSpec::Gates(g)) => e.extend([kv("program", "gates".into()), kv("gates", fmt_sequences(g))]),
        }
        sections.push(("protocol".into(), e));

        let g = &self.geometry;
        let mut e = vec![kv("layout", g.layout.name().into())];
        if let Some(d) = g.d {
            e.push(kv("d", d.to_string()));
        }
        e.extend([kv("l", g.l.to_string()), kv("c", g.c.to_string()), kv("latency", g.latency.to_string())]);
        if let Some(v) = &g.verifiers {
            e.push(kv("verifiers", fmt_points(v)));
        }
        if let Some(p) = &g.receiver {
            e.push(kv("receiver", fmt_point(p)));
        }
        if let Some(v) = &g.cheaters {
            e.push(kv("cheaters", fmt_points(v)));
        }
        sections.push(("geometry".into(), e));

        if let Some(a) = &self.attack {
            let mut e = vec![kv("kind", a.kind.name().into())];
            if let Some(s) = a.strategy {
                e.push(kv("strategy", s.name().into()));
            }
            sections.push(("attack".into(), e));
        }

        let a = &self.analysis;
        let mut e = vec![
            kv("samples", a.samples.to_string()),
            kv("strategies", a.strategies.iter().map(|s| s.name()).collect::<Vec<_>>().join(" ")),
            kv("sweep", a.sweep.to_string()),
            kv("sweep_phi", a.sweep_phi.to_string()),
            kv("restarts", a.restarts.to_string()),
            kv("steps", a.steps.to_string()),
        ];
        if let Some(w) = a.weights {
            e.push(kv("weights", w.name().into()));
        }
        match &a.grid {
            None => {}
            Some(GridSpec::PauliAxes) => e.push(kv("grid", "pauli-axes".into())),
            Some(GridSpec::PauliEigenstates) => e.push(kv("grid", "pauli-eigenstates".into())),
            Some(GridSpec::Mixed { extra_thetas, spiral }) => {
                e.push(kv("grid", "mixed".into()));
                if !extra_thetas.is_empty() {
                    e.push(kv("extra_thetas", fmt_floats(extra_thetas)));
                }
                e.push(kv("spiral", spiral.to_string()));
            }
            Some(GridSpec::Equator(n)) => e.extend([kv("grid", "equator".into()), kv("points", n.to_string())]),
            Some(GridSpec::Single { theta, phi }) => {
                e.extend([kv("grid", "single".into()), kv("grid_theta", theta.to_string()), kv("grid_phi", phi.to_string())]);
            }
        }
        sections.push(("analysis".into(), e));

        let o = &self.output;
        let mut e = vec![kv("dir", o.dir.clone()), kv("report", o.report.clone())];
        if !o.tables.is_empty() {
            e.push(kv("tables", o.tables.join(" ")));
        }
        sections.push(("output".into(), e));

        Document { sections }
    }
}

impl fmt::Display for ScenarioConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_document().fmt(f)
    }
}
