//! Run reports: an indented tree of sections and `key = value` fields.
//!
//! A section whose children are all named `row` doubles as a flat table; see
//! [`emit_table`].

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::config::ScenarioConfig;
use crate::error::{runtime, LabError};

/// Name of the only field excluded from the determinism guarantee.
pub const WALL_CLOCK_FIELD: &str = "wall_clock_s";

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Num(x) => sig9(*x),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<i8> for Value {
    fn from(x: i8) -> Self {
        Value::Int(x.into())
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.into())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

/// Nine significant digits, fixed point for ordinary magnitudes.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&mag) {
        return format!("{x:.8e}");
    }
    format!("{:.*}", (8 - mag).max(0) as usize, x)
}

/// `0`/`1` characters, most significant first.
pub fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    pub name: String,
    pub fields: Vec<(String, Value)>,
    pub children: Vec<Section>,
}

impl Section {
    pub fn new(name: &str) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    pub fn field(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.push((key.into(), value.into()));
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.push((key.into(), value.into()));
    }

    pub fn child(mut self, section: Section) -> Self {
        self.children.push(section);
        self
    }

    pub fn push(&mut self, section: Section) {
        self.children.push(section);
    }

    /// First section named `name`, searching depth-first.
    pub fn find(&self, name: &str) -> Option<&Section> {
        if self.name == name {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(name))
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let _ = writeln!(out, "{pad}{}", self.name);
        for (k, v) in &self.fields {
            let _ = writeln!(out, "{pad}  {k} = {}", v.render());
        }
        for c in &self.children {
            c.render_into(out, depth + 1);
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    /// First non-finite number, as a dotted path.
    fn non_finite(&self, path: &str) -> Option<String> {
        let here = if path.is_empty() { self.name.clone() } else { format!("{path}.{}", self.name) };
        for (k, v) in &self.fields {
            if let Value::Num(x) = v {
                if !x.is_finite() {
                    return Some(format!("{here}.{k}"));
                }
            }
        }
        self.children.iter().find_map(|c| c.non_finite(&here))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub config: ScenarioConfig,
    pub results: Section,
    pub wall_clock: f64,
}

impl RunReport {
    /// Everything except the wall-clock line; identical for identical
    /// configurations and seeds.
    pub fn body(&self) -> String {
        let header = Section::new("report")
            .field("tool", concat!("pbqc-lab ", env!("CARGO_PKG_VERSION")))
            .field("command", self.command.as_str())
            .field("seed", self.config.seed);
        let mut out = header.render();
        out.push_str("config\n");
        for line in self.config.to_string().lines().filter(|l| !l.is_empty()) {
            let _ = writeln!(out, "  {line}");
        }
        out.push_str(&self.results.render());
        out
    }

    pub fn render(&self) -> String {
        format!("{}{WALL_CLOCK_FIELD} = {}\n", self.body(), sig9(self.wall_clock))
    }

    pub fn check_finite(&self) -> Result<(), LabError> {
        match self.results.non_finite("") {
            Some(path) => Err(LabError::Runtime(format!("non-finite value at {path}"))),
            None if !self.wall_clock.is_finite() => Err(LabError::Runtime("non-finite wall clock".into())),
            None => Ok(()),
        }
    }
}

/// Comma-separated table of the rows under `selector`, with a header row.
pub fn emit_table(report: &RunReport, selector: &str) -> Result<String, LabError> {
    let section = report
        .results
        .find(selector)
        .filter(|s| !s.children.is_empty() && s.children.iter().all(|c| c.name == "row"))
        .ok_or_else(|| LabError::Validation(format!("unknown table selector '{selector}' for {}", report.command)))?;
    let header: Vec<&str> = section.children[0].fields.iter().map(|(k, _)| k.as_str()).collect();
    let mut out = header.join(",");
    out.push('\n');
    for row in &section.children {
        let cells: Vec<String> = row.fields.iter().map(|(_, v)| csv_cell(&v.render())).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Selectors that [`emit_table`] accepts for this report.
pub fn table_selectors(report: &RunReport) -> Vec<String> {
    fn walk(s: &Section, out: &mut Vec<String>) {
        if !s.children.is_empty() && s.children.iter().all(|c| c.name == "row") {
            out.push(s.name.clone());
        } else {
            s.children.iter().for_each(|c| walk(c, out));
        }
    }
    let mut out = Vec::new();
    walk(&report.results, &mut out);
    out
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes `contents` to `path` via a temporary file in the same directory and
/// a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), LabError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| runtime(format!("creating {}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| runtime(format!("temp file in {}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes()).and_then(|_| tmp.as_file().sync_all()).map_err(|e| runtime(format!("writing {}: {e}", path.display())))?;
    tmp.persist(path).map_err(|e| runtime(format!("renaming onto {}: {}", path.display(), e.error)))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.8535533905932737), "0.853553391");
        assert_eq!(sig9(2.0), "2.00000000");
        assert_eq!(sig9(123456.789), "123456.789");
        assert_eq!(sig9(-0.00125), "-0.00125000000");
        assert_eq!(sig9(1e-7), "1.00000000e-7");
        assert_eq!(sig9(0.0), "0");
    }

    #[test]
    fn rows_become_tables() {
        let results = Section::new("results").child(
            Section::new("rates")
                .child(Section::new("row").field("strategy", "a,b").field("rate", 0.5))
                .child(Section::new("row").field("strategy", "c").field("rate", 0.75)),
        );
        let report = RunReport { command: "rates".into(), config: crate::config::ScenarioConfig::parse("[protocol]\nkind = a\nn = 2\n").unwrap(), results, wall_clock: 0.1 };
        assert_eq!(emit_table(&report, "rates").unwrap(), "strategy,rate\n\"a,b\",0.500000000\nc,0.750000000\n");
        assert!(matches!(emit_table(&report, "results"), Err(LabError::Validation(_))));
        assert_eq!(table_selectors(&report), vec!["rates".to_string()]);
        assert!(report.render().ends_with("wall_clock_s = 0.100000000\n"));
    }

    #[test]
    fn non_finite_is_reported() {
        let mut s = Section::new("results");
        s.push(Section::new("x").field("bad", f64::NAN));
        assert_eq!(s.non_finite(""), Some("results.x.bad".into()));
    }
}
