//! Honest runs of the basis-sharing protocol (A), the GHZ-code protocol (B)
//! and the rotation-sharing (modified) protocol, plus the verifiers' check.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};
use crate::rng::OutcomeSource;
use crate::spacetime::{honest_completion, meets_deadline, receiver_in_hull, Geometry, ScheduleReport};
use crate::state::{inverse_sequence, sequence_matrix, BlochAngles, GhzCode, PureState, SingleGate};

/// `V1` sends `H^q|u⟩`; `V2…VN` send the shares of `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolAInstance {
    pub u: bool,
    pub q: bool,
    pub q_shares: Vec<bool>,
}

impl ProtocolAInstance {
    /// `q` is the XOR of the shares.
    pub fn new(u: bool, q_shares: Vec<bool>) -> Result<Self> {
        if q_shares.is_empty() {
            return Err(Error::InvalidInstance("need at least one share (N >= 2)".into()));
        }
        let q = q_shares.iter().fold(false, |acc, &b| acc ^ b);
        Ok(Self { u, q, q_shares })
    }

    /// Rejects a stated `q` that disagrees with the shares.
    pub fn with_basis(u: bool, q: bool, q_shares: Vec<bool>) -> Result<Self> {
        let inst = Self::new(u, q_shares)?;
        if inst.q != q {
            return Err(Error::InvalidInstance(format!("q = {} but shares XOR to {}", u8::from(q), u8::from(inst.q))));
        }
        Ok(inst)
    }

    pub fn random(n: usize, src: &mut dyn OutcomeSource) -> Result<Self> {
        let u = coin(src);
        Self::new(u, (1..n).map(|_| coin(src)).collect())
    }

    pub fn n(&self) -> usize {
        self.q_shares.len() + 1
    }

    /// `H^q|u⟩`.
    pub fn encoded(&self) -> PureState {
        let s = PureState::from_bits(&[self.u]).expect("one qubit");
        if self.q {
            s.apply_sequence(&[SingleGate::H], 0).expect("qubit")
        } else {
            s
        }
    }
}

/// A GHZ codeword sent with a local rotation `U_i` on each qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolBInstance {
    pub code: GhzCode,
    /// `U_i` for qubit `i`, each in application order.
    pub locals: Vec<Vec<SingleGate>>,
}

impl ProtocolBInstance {
    pub fn new(code: GhzCode, locals: Vec<Vec<SingleGate>>) -> Result<Self> {
        if locals.len() != code.num_qubits() {
            return Err(Error::InvalidInstance(format!(
                "{} local rotations for a {}-qubit code",
                locals.len(),
                code.num_qubits()
            )));
        }
        Ok(Self { code, locals })
    }

    pub fn unrotated(code: GhzCode) -> Self {
        let n = code.num_qubits();
        Self { code, locals: vec![Vec::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.code.num_qubits()
    }

    /// The codeword after each `U_i`.
    pub fn encoded(&self) -> Result<PureState> {
        self.locals.iter().enumerate().try_fold(self.code.state(), |s, (i, u)| s.apply_sequence(u, i))
    }
}

/// How the modified protocol's secret rotation is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum Program {
    /// Encode in `{|ψ(θ,φ)⟩, |ψ̄(θ,φ)⟩}` directly.
    Angles(BlochAngles),
    /// A bit string: `0 → H`, `1 → T`, read as an operator product.
    Bits(String),
}

/// `V1` sends `U2…UN|u⟩`; `Vi` later reveals `U_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedInstance {
    pub u: bool,
    /// `U2…UN`, each in application order.
    pub shares: Vec<Vec<SingleGate>>,
}

impl ModifiedInstance {
    pub fn new(u: bool, shares: Vec<Vec<SingleGate>>) -> Result<Self> {
        if shares.is_empty() {
            return Err(Error::InvalidInstance("need at least one share (N >= 2)".into()));
        }
        Ok(Self { u, shares })
    }

    /// Splits the program's operator string into `n − 1` consecutive shares so
    /// that `U2·U3·…·UN` equals the program.
    pub fn from_program(n: usize, u: bool, program: &Program) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedStations { n });
        }
        let operators: Vec<SingleGate> = match program {
            Program::Angles(a) => vec![angles_gate(*a)],
            Program::Bits(bits) => {
                let mut ops = compile_bit_program(bits)?;
                ops.reverse();
                ops
            }
        };
        let parts = n - 1;
        let chunk = operators.len().div_ceil(parts).max(1);
        let mut shares: Vec<Vec<SingleGate>> = operators
            .chunks(chunk)
            .map(|ops| ops.iter().rev().copied().collect())
            .collect();
        shares.resize(parts, Vec::new());
        Self::new(u, shares)
    }

    pub fn n(&self) -> usize {
        self.shares.len() + 1
    }

    /// All shares composed, in application order (`UN` first).
    pub fn composed(&self) -> Vec<SingleGate> {
        self.shares.iter().rev().flatten().copied().collect()
    }

    /// `U2…UN|u⟩`.
    pub fn encoded(&self) -> PureState {
        PureState::from_bits(&[self.u]).expect("one qubit").apply_sequence(&self.composed(), 0).expect("qubit")
    }

    /// Angles of `U2…UN|0⟩`, the `|ψ⟩` of the encoding basis.
    pub fn encoding_angles(&self) -> BlochAngles {
        let m = sequence_matrix(&self.composed());
        let (a0, a1) = (m[(0, 0)], m[(1, 0)]);
        let theta = 2.0 * a1.norm().atan2(a0.norm());
        let phi = if a1.norm() < 1e-15 || a0.norm() < 1e-15 { 0.0 } else { (a1 / a0).arg() };
        BlochAngles::new(theta.clamp(0.0, PI), phi).expect("finite angles")
    }
}

/// `U3(θ, φ, π)` maps `|0⟩ → |ψ⟩` and `|1⟩ → |ψ̄⟩` exactly.
pub fn angles_gate(a: BlochAngles) -> SingleGate {
    SingleGate::U3 { theta: a.theta(), phi: a.phi(), lambda: PI }
}

/// `0 → H`, `1 → T`; the string reads as an operator product, so the returned
/// sequence (application order) is reversed: `"01011"` gives `T, T, H, T, H`.
pub fn compile_bit_program(bits: &str) -> Result<Vec<SingleGate>> {
    bits.chars()
        .rev()
        .map(|ch| match ch {
            '0' => Ok(SingleGate::H),
            '1' => Ok(SingleGate::T),
            other => Err(Error::InvalidArgument(format!("program bit {other:?} is not 0 or 1"))),
        })
        .collect()
}

/// Operator-product notation of a sequence given in application order.
pub fn operator_string(gates: &[SingleGate]) -> String {
    gates.iter().rev().map(SingleGate::symbol).collect()
}

/// What reached the verifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    /// The prover's (or cheaters') decoded answer.
    pub decoded: Vec<bool>,
    pub schedule: ScheduleReport,
    /// Answer received by each verifier.
    pub answers: Vec<Vec<bool>>,
}

impl Transcript {
    /// The same answer broadcast to every verifier.
    pub fn broadcast(decoded: Vec<bool>, schedule: ScheduleReport) -> Self {
        let answers = vec![decoded.clone(); schedule.arrivals.len()];
        Self { decoded, schedule, answers }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rejection {
    MissingAnswer { verifier: usize },
    Inconsistent { first: usize, other: usize },
    WrongAnswer { verifier: usize },
    Late { completion: f64, deadline: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Accept,
    Reject(Rejection),
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// Accepts iff all verifiers got the same, expected answer no later than the
/// honest deadline. Inconsistency is reported before lateness.
pub fn verify_response(transcript: &Transcript, expected: &[bool], geometry: &Geometry) -> Verdict {
    let n = geometry.num_verifiers();
    if transcript.answers.len() < n {
        return Verdict::Reject(Rejection::MissingAnswer { verifier: transcript.answers.len() });
    }
    if let Some(other) = transcript.answers.iter().position(|a| a != &transcript.answers[0]) {
        return Verdict::Reject(Rejection::Inconsistent { first: 0, other });
    }
    if let Some(verifier) = transcript.answers.iter().position(|a| a != expected) {
        return Verdict::Reject(Rejection::WrongAnswer { verifier });
    }
    let deadline = honest_completion(geometry).completion;
    if !meets_deadline(transcript.schedule.completion, deadline) {
        return Verdict::Reject(Rejection::Late { completion: transcript.schedule.completion, deadline });
    }
    Verdict::Accept
}

fn check_layout(geometry: &Geometry, n: usize) -> Result<()> {
    if geometry.num_verifiers() != n {
        return Err(Error::InvalidGeometry(format!("{} verifiers for an N = {n} instance", geometry.num_verifiers())));
    }
    if !receiver_in_hull(geometry)? {
        return Err(Error::InfeasibleGeometry);
    }
    Ok(())
}

fn coin(src: &mut dyn OutcomeSource) -> bool {
    src.uniform() < 0.5
}

fn z_measure(state: &PureState, src: &mut dyn OutcomeSource) -> Result<bool> {
    let (s, _) = state.measure_pauli(&PauliString::single(1, 0, Letter::Z), src)?;
    Ok(s < 0)
}

/// `P` XORs the shares, applies `H^q` and measures `Z`.
pub fn prot_a_run_honest(instance: &ProtocolAInstance, geometry: &Geometry, src: &mut dyn OutcomeSource) -> Result<Transcript> {
    check_layout(geometry, instance.n())?;
    decode_a(instance, &instance.q_shares, geometry, src)
}

/// As the honest run, but share `missing` never arrives and `P` guesses it.
pub fn prot_a_run_guessing_share(
    instance: &ProtocolAInstance,
    missing: usize,
    geometry: &Geometry,
    src: &mut dyn OutcomeSource,
) -> Result<Transcript> {
    check_layout(geometry, instance.n())?;
    if missing >= instance.q_shares.len() {
        return Err(Error::InvalidArgument(format!("share {missing} does not exist")));
    }
    let mut shares = instance.q_shares.clone();
    shares[missing] = coin(src);
    decode_a(instance, &shares, geometry, src)
}

fn decode_a(instance: &ProtocolAInstance, shares: &[bool], geometry: &Geometry, src: &mut dyn OutcomeSource) -> Result<Transcript> {
    let q = shares.iter().fold(false, |acc, &b| acc ^ b);
    let mut state = instance.encoded();
    if q {
        state = state.apply_sequence(&[SingleGate::H], 0)?;
    }
    let bit = z_measure(&state, src)?;
    Ok(Transcript::broadcast(vec![bit], honest_completion(geometry)))
}

/// `P` undoes each `U_i` and measures in the GHZ code basis.
pub fn prot_b_run_honest(instance: &ProtocolBInstance, geometry: &Geometry, src: &mut dyn OutcomeSource) -> Result<Transcript> {
    let n = instance.n();
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedStations { n });
    }
    check_layout(geometry, n)?;
    let mut state = instance.encoded()?;
    for (i, u) in instance.locals.iter().enumerate() {
        state = state.apply_sequence(&inverse_sequence(u), i)?;
    }
    let qubits: Vec<usize> = (0..n).collect();
    let (code, _) = state.ghz_measure(&qubits, src)?;
    Ok(Transcript::broadcast(code.label(), honest_completion(geometry)))
}

/// `P` applies `U2†`, then `U3†`, …, `UN†` and measures `Z`.
pub fn modified_run_honest(instance: &ModifiedInstance, geometry: &Geometry, src: &mut dyn OutcomeSource) -> Result<Transcript> {
    check_layout(geometry, instance.n())?;
    let mut state = instance.encoded();
    for share in &instance.shares {
        state = state.apply_sequence(&inverse_sequence(share), 0)?;
    }
    let bit = z_measure(&state, src)?;
    Ok(Transcript::broadcast(vec![bit], honest_completion(geometry)))
}

/// A uniformly random element of `{I, H, S, HS, SH, HSH}·{I, X, Y, Z}` as a
/// short gate sequence.
pub fn random_clifford(src: &mut dyn OutcomeSource) -> Vec<SingleGate> {
    const FRAMES: [&[SingleGate]; 6] = [
        &[],
        &[SingleGate::H],
        &[SingleGate::S],
        &[SingleGate::H, SingleGate::S],
        &[SingleGate::S, SingleGate::H],
        &[SingleGate::H, SingleGate::S, SingleGate::H],
    ];
    const PAULIS: [Option<SingleGate>; 4] = [None, Some(SingleGate::X), Some(SingleGate::Y), Some(SingleGate::Z)];
    let f = ((src.uniform() * 6.0) as usize).min(5);
    let p = ((src.uniform() * 4.0) as usize).min(3);
    let mut seq = FRAMES[f].to_vec();
    seq.extend(PAULIS[p]);
    seq
}

/// Uniform bit string of the given length.
pub fn random_program(len: usize, src: &mut dyn OutcomeSource) -> String {
    (0..len).map(|_| if coin(src) { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::state::equal_up_to_phase;

    fn line() -> Geometry {
        Geometry::collinear(1.0, 0.1, 1.0).unwrap()
    }

    #[test]
    fn program_compilation() {
        assert_eq!(operator_string(&compile_bit_program("01011").unwrap()), "HTHTT");
        assert_eq!(compile_bit_program("01011").unwrap(), vec![SingleGate::T, SingleGate::T, SingleGate::H, SingleGate::T, SingleGate::H]);
        assert!(compile_bit_program("").unwrap().is_empty());
        assert_eq!(compile_bit_program("0").unwrap(), vec![SingleGate::H]);
        assert!(compile_bit_program("012").is_err());
    }

    #[test]
    fn shares_compose_to_program() {
        let inst = ModifiedInstance::from_program(4, false, &Program::Bits("01011".into())).unwrap();
        assert_eq!(inst.shares.len(), 3);
        let direct = sequence_matrix(&compile_bit_program("01011").unwrap());
        assert!(sequence_matrix(&inst.composed()).equals_up_to_phase(&direct, 1e-12));
    }

    #[test]
    fn angles_program_encodes_psi() {
        let a = BlochAngles::new(1.0, 2.5).unwrap();
        for u in [false, true] {
            let inst = ModifiedInstance::from_program(2, u, &Program::Angles(a)).unwrap();
            assert!(equal_up_to_phase(&inst.encoded(), &crate::state::make_qubit(a, u)));
        }
        let back = ModifiedInstance::from_program(2, false, &Program::Angles(a)).unwrap().encoding_angles();
        assert!((back.theta() - 1.0).abs() < 1e-12 && (back.phi() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn protocol_a_honest() {
        let mut rng = seeded(1);
        let inst = ProtocolAInstance::new(true, vec![true]).unwrap();
        let t = prot_a_run_honest(&inst, &line(), &mut rng).unwrap();
        assert_eq!(t.decoded, vec![true]);
        assert_eq!(t.schedule.completion, 2.0);
        assert!(verify_response(&t, &[true], &line()).accepted());
        assert!(ProtocolAInstance::with_basis(false, true, vec![false, false]).is_err());
    }

    #[test]
    fn infeasible_layout_rejected() {
        let g = Geometry::new(
            vec![crate::spacetime::Position::new(1.0, 0.0, 0.0).unwrap(), crate::spacetime::Position::new(2.0, 0.0, 0.0).unwrap()],
            crate::spacetime::Position::ORIGIN,
            0.1,
            1.0,
        )
        .unwrap();
        let inst = ProtocolAInstance::new(false, vec![false]).unwrap();
        assert_eq!(prot_a_run_honest(&inst, &g, &mut seeded(0)), Err(Error::InfeasibleGeometry));
    }

    #[test]
    fn protocol_b_honest_bell() {
        let inst = ProtocolBInstance::unrotated(GhzCode::from_bell(true, false));
        let t = prot_b_run_honest(&inst, &line(), &mut seeded(2)).unwrap();
        assert_eq!(t.decoded, vec![true, false]);
    }

    #[test]
    fn modified_honest_program() {
        let inst = ModifiedInstance::from_program(2, false, &Program::Bits("01011".into())).unwrap();
        let t = modified_run_honest(&inst, &line(), &mut seeded(3)).unwrap();
        assert_eq!(t.decoded, vec![false]);
    }

    #[test]
    fn verdicts() {
        let g = line();
        let ok = Transcript::broadcast(vec![true], honest_completion(&g));
        assert!(verify_response(&ok, &[true], &g).accepted());
        let mut late = ok.clone();
        late.schedule.completion += 1e-9;
        assert!(matches!(verify_response(&late, &[true], &g), Verdict::Reject(Rejection::Late { .. })));
        let mut split = late.clone();
        split.answers[1] = vec![false];
        assert!(matches!(verify_response(&split, &[true], &g), Verdict::Reject(Rejection::Inconsistent { .. })));
        assert!(matches!(verify_response(&ok, &[false], &g), Verdict::Reject(Rejection::WrongAnswer { verifier: 0 })));
    }
}
