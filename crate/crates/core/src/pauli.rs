//! Phased Pauli strings in symplectic (x, z) form.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Largest register a [`PauliString`] can describe.
pub const MAX_PAULI_QUBITS: usize = 64;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// Power of `i` multiplying a Pauli string, kept mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    /// `±1` when the phase is real.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn from_sign(s: i8) -> Self {
        if s < 0 {
            Phase::MINUS_ONE
        } else {
            Phase::ONE
        }
    }
}

impl core::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// `i^phase ⊗_q σ_q` on `n` qubits; qubit 0 is printed leftmost.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_PAULI_QUBITS, "at most 64 qubits");
        Self { n, x: 0, z: 0, phase: Phase::ONE }
    }

    pub fn single(n: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set(qubit, letter);
        p
    }

    /// Product of the same letter on each listed qubit.
    pub fn on(n: usize, qubits: &[usize], letter: Letter) -> Self {
        let mut p = Self::identity(n);
        for &q in qubits {
            p.set(q, letter);
        }
        p
    }

    pub fn from_letters(phase: Phase, letters: &[Letter]) -> Self {
        let mut p = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set(q, l);
        }
        p.phase = phase;
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// Multiplies by `±1`.
    pub fn signed(mut self, s: i8) -> Self {
        self.phase = self.phase * Phase::from_sign(s);
        self
    }

    pub fn negated(self) -> Self {
        self.signed(-1)
    }

    /// `±1` for Hermitian strings.
    pub fn sign(&self) -> Option<i8> {
        self.phase.sign()
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        Letter::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    pub fn set(&mut self, qubit: usize, letter: Letter) {
        assert!(qubit < self.n, "qubit {qubit} outside {}-qubit string", self.n);
        let (x, z) = letter.bits();
        let bit = 1u64 << qubit;
        self.x = (self.x & !bit) | if x { bit } else { 0 };
        self.z = (self.z & !bit) | if z { bit } else { 0 };
    }

    /// Qubits acted on non-trivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| (self.x | self.z) >> q & 1 == 1).collect()
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Same letters, ignoring the phase.
    pub fn same_letters(&self, other: &Self) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() % 2 == 0
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "Pauli strings on different registers");
        let mut k = u32::from(self.phase.power()) + u32::from(other.phase.power());
        let overlap = (self.x | self.z) & (other.x | other.z);
        let mut bits = overlap;
        while bits != 0 {
            let q = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            k += letter_product_phase(self.letter(q), other.letter(q));
        }
        Self { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z, phase: Phase::from_power(k) }
    }

    /// Restriction to a subset of qubits (phase dropped to +1).
    pub fn restricted(&self, qubits: &[usize]) -> Self {
        let letters: Vec<Letter> = qubits.iter().map(|&q| self.letter(q)).collect();
        Self::from_letters(Phase::ONE, &letters)
    }

    /// `U P U†` for a Clifford gate `U`.
    pub fn conjugated_by(&self, gate: &CliffordGate) -> Result<Self> {
        for q in gate.qubits() {
            if q >= self.n {
                return Err(Error::TargetOutOfRange { index: q, len: self.n });
            }
        }
        // P = i^(k + Σ x_q z_q) ∏_q X_q^x Z_q^z ; conjugate factor by factor.
        let y_count = (self.x & self.z).count_ones();
        let mut out = Self::identity(self.n)
            .with_phase(self.phase * Phase::from_power(y_count));
        for q in 0..self.n {
            if self.x >> q & 1 == 1 {
                out = out.mul(&gate.image(self.n, q, Letter::X));
            }
            if self.z >> q & 1 == 1 {
                out = out.mul(&gate.image(self.n, q, Letter::Z));
            }
        }
        Ok(out)
    }
}

/// Exponent `k` in `σ_a σ_b = i^k σ_c`.
fn letter_product_phase(a: Letter, b: Letter) -> u32 {
    use Letter::*;
    match (a, b) {
        (X, Y) | (Y, Z) | (Z, X) => 1,
        (Y, X) | (Z, Y) | (X, Z) => 3,
        _ => 0,
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.power() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts `[+|-][i]LETTERS`, e.g. `-XIZY`, `+iYI`, `ZZ`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::PauliParse(String::from(s));
        let t = s.trim();
        let (neg, rest) = match t.as_bytes().first() {
            Some(b'+') => (false, &t[1..]),
            Some(b'-') => (true, &t[1..]),
            _ => (false, t),
        };
        let (imag, letters) = match rest.strip_prefix('i') {
            Some(r) => (true, r),
            None => (false, rest),
        };
        if letters.is_empty() || letters.len() > MAX_PAULI_QUBITS {
            return Err(bad());
        }
        let letters: Vec<Letter> = letters
            .chars()
            .map(|ch| match ch {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                _ => Err(bad()),
            })
            .collect::<Result<_>>()?;
        let power = u32::from(imag) + if neg { 2 } else { 0 };
        Ok(Self::from_letters(Phase::from_power(power), &letters))
    }
}

/// Gates the tableau engine can push Pauli strings through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
}

impl CliffordGate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            CliffordGate::H(q)
            | CliffordGate::S(q)
            | CliffordGate::Sdg(q)
            | CliffordGate::X(q)
            | CliffordGate::Y(q)
            | CliffordGate::Z(q) => alloc::vec![q],
            CliffordGate::Cnot { control, target } => alloc::vec![control, target],
            CliffordGate::Cz(a, b) => alloc::vec![a, b],
        }
    }

    /// `U σ_q U†` for `σ ∈ {X, Z}`.
    fn image(&self, n: usize, q: usize, letter: Letter) -> PauliString {
        use Letter::{X, Y, Z};
        let single = |l: Letter| PauliString::single(n, q, l);
        let same = single(letter);
        match (*self, letter) {
            (CliffordGate::H(t), X) if t == q => single(Z),
            (CliffordGate::H(t), Z) if t == q => single(X),
            (CliffordGate::S(t), X) if t == q => single(Y),
            (CliffordGate::Sdg(t), X) if t == q => single(Y).negated(),
            (CliffordGate::X(t), Z) if t == q => same.negated(),
            (CliffordGate::Y(t), _) if t == q => same.negated(),
            (CliffordGate::Z(t), X) if t == q => same.negated(),
            (CliffordGate::Cnot { control, target }, X) if control == q => {
                PauliString::on(n, &[control, target], X)
            }
            (CliffordGate::Cnot { control, target }, Z) if target == q => {
                PauliString::on(n, &[control, target], Z)
            }
            (CliffordGate::Cz(a, b), X) if a == q || b == q => {
                let other = if a == q { b } else { a };
                let mut p = single(X);
                p.set(other, Z);
                p
            }
            _ => same,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn products_follow_pauli_algebra() {
        assert_eq!(p("X").mul(&p("Z")), p("-iY"));
        assert_eq!(p("Z").mul(&p("X")), p("+iY"));
        assert_eq!(p("Y").mul(&p("Y")), p("I"));
        assert_eq!(p("XX").mul(&p("ZZ")), p("-YY"));
    }

    #[test]
    fn commutation() {
        assert!(p("XX").commutes_with(&p("ZZ")));
        assert!(!p("XI").commutes_with(&p("ZZ")));
    }

    #[test]
    fn display_round_trip() {
        for s in ["-XIZY", "+iYI", "-iZ", "+IIII"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("AX".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
    }

    #[test]
    fn conjugation_rules() {
        assert_eq!(p("Z").conjugated_by(&CliffordGate::H(0)).unwrap(), p("X"));
        assert_eq!(p("Y").conjugated_by(&CliffordGate::H(0)).unwrap(), p("-Y"));
        assert_eq!(p("X").conjugated_by(&CliffordGate::S(0)).unwrap(), p("Y"));
        assert_eq!(p("Y").conjugated_by(&CliffordGate::S(0)).unwrap(), p("-X"));
        assert_eq!(p("Y").conjugated_by(&CliffordGate::Sdg(0)).unwrap(), p("X"));
        let cnot = CliffordGate::Cnot { control: 0, target: 1 };
        assert_eq!(p("XI").conjugated_by(&cnot).unwrap(), p("XX"));
        assert_eq!(p("IZ").conjugated_by(&cnot).unwrap(), p("ZZ"));
        assert_eq!(p("YI").conjugated_by(&cnot).unwrap(), p("YX"));
        assert_eq!(p("XI").conjugated_by(&CliffordGate::Cz(0, 1)).unwrap(), p("XZ"));
    }
}
