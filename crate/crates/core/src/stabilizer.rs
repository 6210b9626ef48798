//! Clifford-only simulation on stabilizer generators.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::matrix::c;
use crate::pauli::{CliffordGate, Letter, PauliString, Phase, MAX_PAULI_QUBITS};
use crate::rng::OutcomeSource;
use crate::state::{Gate, GhzCode, PureState};

/// `n` commuting, independent, Hermitian generators on `n` qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    generators: Vec<PauliString>,
}

/// Symplectic vector `x | z << 64`.
fn symplectic(p: &PauliString) -> u128 {
    u128::from(p.x_bits()) | u128::from(p.z_bits()) << 64
}

/// XOR basis with distinct leading bits, each row remembering which
/// generators it combines.
struct Span {
    rows: Vec<(u128, u64)>,
}

impl Span {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn reduce(&self, mut v: u128, mut mask: u64) -> (u128, u64) {
        for &(row, rmask) in &self.rows {
            let lead = 127 - row.leading_zeros();
            if v >> lead & 1 == 1 {
                v ^= row;
                mask ^= rmask;
            }
        }
        (v, mask)
    }

    /// Returns false if `v` is already in the span.
    fn insert(&mut self, v: u128, mask: u64) -> bool {
        let (r, m) = self.reduce(v, mask);
        if r == 0 {
            return false;
        }
        let pos = self.rows.partition_point(|&(row, _)| row.leading_zeros() < r.leading_zeros());
        self.rows.insert(pos, (r, m));
        true
    }
}

impl StabilizerTableau {
    pub fn new(generators: Vec<PauliString>) -> Result<Self> {
        let n = generators.len();
        if n == 0 || n > MAX_PAULI_QUBITS {
            return Err(Error::InvalidTableau("generator count must be 1..=64"));
        }
        if generators.iter().any(|g| g.num_qubits() != n) {
            return Err(Error::InvalidTableau("need exactly one generator per qubit"));
        }
        if generators.iter().any(|g| g.sign().is_none()) {
            return Err(Error::InvalidTableau("generator phases must be ±1"));
        }
        for (i, a) in generators.iter().enumerate() {
            if generators[i + 1..].iter().any(|b| !a.commutes_with(b)) {
                return Err(Error::InvalidTableau("generators do not commute"));
            }
        }
        let mut span = Span::new();
        for (k, g) in generators.iter().enumerate() {
            if !span.insert(symplectic(g), 1 << k) {
                return Err(Error::InvalidTableau("generators are dependent"));
            }
        }
        Ok(Self { n, generators })
    }

    /// Parses generators such as `["XX", "-ZZ"]`.
    pub fn parse(generators: &[&str]) -> Result<Self> {
        Self::new(generators.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?)
    }

    /// `|0…0⟩`.
    pub fn zero_state(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_PAULI_QUBITS {
            return Err(Error::InvalidTableau("generator count must be 1..=64"));
        }
        Ok(Self { n, generators: (0..n).map(|q| PauliString::single(n, q, Letter::Z)).collect() })
    }

    /// GHZ codeword: `(−1)^{b1} X…X` and `(−1)^{a_k ⊕ a_{k+1}} Z_k Z_{k+1}`.
    pub fn ghz(code: &GhzCode) -> Self {
        let n = code.num_qubits();
        let a = code.a_bits();
        let mut generators = vec![PauliString::on(n, &(0..n).collect::<Vec<_>>(), Letter::X).signed(sign(code.phase))];
        for k in 0..n - 1 {
            generators.push(PauliString::on(n, &[k, k + 1], Letter::Z).signed(sign(a[k] ^ a[k + 1])));
        }
        Self { n, generators }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// `self ⊗ other`, other's qubits appended.
    pub fn tensor(&self, other: &StabilizerTableau) -> Result<Self> {
        let n = self.n + other.n;
        if n > MAX_PAULI_QUBITS {
            return Err(Error::InvalidTableau("generator count must be 1..=64"));
        }
        let widen = |p: &PauliString, offset: usize| {
            let mut letters = vec![Letter::I; n];
            for (q, l) in p.letters().into_iter().enumerate() {
                letters[q + offset] = l;
            }
            PauliString::from_letters(p.phase(), &letters)
        };
        let mut generators: Vec<PauliString> = self.generators.iter().map(|g| widen(g, 0)).collect();
        generators.extend(other.generators.iter().map(|g| widen(g, self.n)));
        Ok(Self { n, generators })
    }

    pub fn apply_clifford(&self, gate: &CliffordGate) -> Result<Self> {
        let generators = self.generators.iter().map(|g| g.conjugated_by(gate)).collect::<Result<Vec<_>>>()?;
        Ok(Self { n: self.n, generators })
    }

    /// Applies a named gate; non-Clifford gates such as `T` are rejected.
    pub fn apply_gate(&self, gate: &Gate) -> Result<Self> {
        self.apply_clifford(&gate.clifford()?)
    }

    pub fn apply_gates(&self, gates: &[Gate]) -> Result<Self> {
        gates.iter().try_fold(self.clone(), |t, g| t.apply_gate(g))
    }

    /// `Some(±1)` when `±pauli` lies in the stabilizer group.
    pub fn sign_of(&self, pauli: &PauliString) -> Option<i8> {
        if pauli.num_qubits() != self.n || !self.generators.iter().all(|g| g.commutes_with(pauli)) {
            return None;
        }
        let mut span = Span::new();
        for (k, g) in self.generators.iter().enumerate() {
            span.insert(symplectic(g), 1 << k);
        }
        let (rest, mask) = span.reduce(symplectic(pauli), 0);
        if rest != 0 {
            return None;
        }
        let product = self
            .generators
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .fold(PauliString::identity(self.n), |acc, (_, g)| acc.mul(g));
        // pauli = s · product with s = phase(pauli) / phase(product)
        let s = Phase::from_power(u32::from(pauli.phase().power()) + 4 - u32::from(product.phase().power()));
        s.sign()
    }

    /// True when `pauli` itself (with its sign) stabilizes the state.
    pub fn contains(&self, pauli: &PauliString) -> bool {
        self.sign_of(pauli) == Some(1)
    }

    /// Measures a Hermitian Pauli string. Deterministic outcomes are
    /// reported as such; a forced source that contradicts them errors.
    pub fn measure(&self, pauli: &PauliString, src: &mut dyn OutcomeSource) -> Result<(i8, Self)> {
        if pauli.num_qubits() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: pauli.num_qubits() });
        }
        if pauli.sign().is_none() {
            return Err(Error::NonHermitian);
        }
        let anti: Vec<usize> = (0..self.n).filter(|&k| !self.generators[k].commutes_with(pauli)).collect();
        let Some((&pivot, others)) = anti.split_first() else {
            let s = self.sign_of(pauli).ok_or(Error::InvalidTableau("commuting observable outside the group"))?;
            let probs = if s == 1 { [1.0, 0.0] } else { [0.0, 1.0] };
            src.choose(&probs)?;
            return Ok((s, self.clone()));
        };
        let outcome = if src.choose(&[0.5, 0.5])? == 0 { 1 } else { -1 };
        let mut generators = self.generators.clone();
        let g = generators[pivot].clone();
        for &k in others {
            generators[k] = generators[k].mul(&g);
        }
        generators[pivot] = pauli.clone().signed(outcome);
        Ok((outcome, Self { n: self.n, generators }))
    }

    /// The single-qubit element of the group acting on `qubit`, if any.
    pub fn residual_stabilizer(&self, qubit: usize) -> Option<PauliString> {
        if qubit >= self.n {
            return None;
        }
        [Letter::X, Letter::Y, Letter::Z].into_iter().find_map(|l| {
            let p = PauliString::single(self.n, qubit, l);
            self.sign_of(&p).map(|s| p.signed(s))
        })
    }

    /// Dense amplitudes of the stabilized state (up to global phase).
    pub fn to_dense(&self) -> Result<PureState> {
        let mut probe = self.clone();
        let mut bits = Vec::with_capacity(self.n);
        for q in 0..self.n {
            let (s, next) = probe.measure(&PauliString::single(self.n, q, Letter::Z), &mut FirstBranch)?;
            bits.push(s < 0);
            probe = next;
        }
        let mut state = PureState::from_bits(&bits)?;
        for g in &self.generators {
            let image = state.apply_pauli(g)?;
            let amps = state.amps().iter().zip(image.amps()).map(|(a, b)| (a + b) * c(0.5, 0.0)).collect();
            state = PureState::from_unnormalized(state.dims().to_vec(), amps)?;
        }
        Ok(state)
    }
}

/// Picks the `+1` branch whenever the outcome is random.
struct FirstBranch;

impl OutcomeSource for FirstBranch {
    fn choose(&mut self, probs: &[f64]) -> Result<usize> {
        probs
            .iter()
            .position(|&p| p >= crate::rng::MIN_BRANCH_PROBABILITY)
            .ok_or(Error::ImpossibleOutcome { index: 0, probability: 0.0 })
    }

    fn uniform(&mut self) -> f64 {
        0.0
    }
}

fn sign(bit: bool) -> i8 {
    if bit {
        -1
    } else {
        1
    }
}

impl fmt::Display for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.generators.iter().map(|g| alloc::format!("{g}")).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

/// Basis in which `B1`'s GHZ share ends up after the other parties measure
/// X (`q_i = 0`) or Y (`q_i = 1`): `Y` iff an odd number of shares are 1.
pub fn ghz_party_rule(q_shares: &[bool]) -> Result<Letter> {
    if q_shares.len() < 2 {
        return Err(Error::UnsupportedStations { n: q_shares.len() + 1 });
    }
    Ok(if q_shares.iter().filter(|&&q| q).count() % 2 == 1 { Letter::Y } else { Letter::X })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{seeded, Forced};
    use crate::state::{equal_up_to_phase, SingleGate};
    use alloc::string::ToString;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_bad_generators() {
        assert!(StabilizerTableau::parse(&["XI", "ZI"]).is_err());
        assert!(StabilizerTableau::parse(&["ZZ", "ZZ"]).is_err());
        assert!(StabilizerTableau::parse(&["iZI", "IZ"]).is_err());
        assert!(StabilizerTableau::parse(&["XX", "-ZZ"]).is_ok());
    }

    #[test]
    fn single_qubit_conjugations() {
        let t = StabilizerTableau::zero_state(1).unwrap();
        let h = t.apply_gate(&Gate::on(SingleGate::H, 0)).unwrap();
        assert_eq!(h.generators()[0].to_string(), "+X");
        let s = h.apply_gate(&Gate::on(SingleGate::S, 0)).unwrap();
        assert_eq!(s.generators()[0].to_string(), "+Y");
        assert_eq!(s.apply_gate(&Gate::on(SingleGate::T, 0)), Err(Error::NonClifford("T")));
    }

    #[test]
    fn deterministic_and_random_measurements() {
        let t = StabilizerTableau::zero_state(2).unwrap();
        let (s, _) = t.measure(&p("ZI"), &mut seeded(0)).unwrap();
        assert_eq!(s, 1);
        assert!(t.measure(&p("ZI"), &mut Forced::signs([-1])).is_err());
        let (s, after) = t.measure(&p("XI"), &mut Forced::signs([-1])).unwrap();
        assert_eq!(s, -1);
        assert!(after.contains(&p("-XI")));
        let (again, _) = after.measure(&p("XI"), &mut seeded(4)).unwrap();
        assert_eq!(again, -1);
    }

    #[test]
    fn group_membership_with_signs() {
        let bell = StabilizerTableau::parse(&["XX", "ZZ"]).unwrap();
        assert_eq!(bell.sign_of(&p("YY")), Some(-1));
        assert!(bell.contains(&p("-YY")));
        assert_eq!(bell.sign_of(&p("XI")), None);
        assert_eq!(bell.residual_stabilizer(0), None);
    }

    #[test]
    fn ghz_tableau_matches_dense() {
        for code in GhzCode::all(3) {
            let dense = StabilizerTableau::ghz(&code).to_dense().unwrap();
            assert!(equal_up_to_phase(&dense, &code.state()), "{code:?}");
        }
    }

    #[test]
    fn cnot_cross_check_with_dense() {
        let t = StabilizerTableau::parse(&["XX", "ZZ"]).unwrap();
        let gate = Gate::Cnot { control: 0, target: 1 };
        let after = t.apply_gate(&gate).unwrap();
        let dense = t.to_dense().unwrap().apply_gate(&gate).unwrap();
        assert!(equal_up_to_phase(&after.to_dense().unwrap(), &dense));
        assert!(after.contains(&p("XI")) && after.contains(&p("IZ")));
    }

    #[test]
    fn party_rule() {
        assert_eq!(ghz_party_rule(&[false, false]).unwrap(), Letter::X);
        assert_eq!(ghz_party_rule(&[true, false]).unwrap(), Letter::Y);
        assert_eq!(ghz_party_rule(&[true, true, false]).unwrap(), Letter::X);
        assert_eq!(ghz_party_rule(&[true, true, true, false]).unwrap(), Letter::Y);
        assert!(ghz_party_rule(&[true]).is_err());
    }

    #[test]
    fn tensor_appends_qubits() {
        let t = StabilizerTableau::parse(&["XX", "ZZ"]).unwrap().tensor(&StabilizerTableau::zero_state(1).unwrap()).unwrap();
        assert_eq!(t.to_string(), "<+XXI, +ZZI, +IIZ>");
    }
}
