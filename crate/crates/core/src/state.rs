//! Dense pure states over small registers of qubits and qutrits.
//!
//! Subsystem 0 is the most significant digit of the amplitude index, so
//! `|01⟩` has index 1 and qubit 0 is the leftmost letter of a Pauli string.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use core::fmt::Write as _;
// std's inherent float methods shadow `Float` whenever std is in the graph.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{c, inner, norm_sq, CMatrix, C64};
use crate::pauli::{CliffordGate, Letter, PauliString};
use crate::rng::OutcomeSource;

/// Largest total Hilbert-space dimension (16 qubit-equivalents).
pub const MAX_DIM: usize = 1 << 16;
/// Tolerance on `Σ|amp|² = 1`.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance for equality modulo global phase.
pub const PHASE_EQ_TOL: f64 = 1e-9;

/// `(1 - s) / 2` for a `±1` outcome.
pub fn bit_of(sign: i8) -> bool {
    sign < 0
}

/// `(-1)^b`.
pub fn sign_of(bit: bool) -> i8 {
    if bit {
        -1
    } else {
        1
    }
}

/// Polar angles of a qubit direction on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    theta: f64,
    phi: f64,
}

impl BlochAngles {
    /// `theta ∈ [0, π]`; `phi` is wrapped into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!("Bloch angles ({theta}, {phi}) out of range")));
        }
        let mut phi = phi % (2.0 * PI);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Unit vector `n̂(θ, φ)`.
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Angles of a (not necessarily unit) nonzero direction.
    pub fn from_direction(v: [f64; 3]) -> Result<Self> {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r == 0.0 || !r.is_finite() {
            return Err(Error::InvalidArgument("zero direction".into()));
        }
        let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
        Self::new(theta, v[1].atan2(v[0]))
    }

    /// Amplitudes of `|ψ⟩` (or `|ψ̄⟩` when `anti`).
    pub fn amplitudes(&self, anti: bool) -> [C64; 2] {
        let (s, co) = (self.theta / 2.0).sin_cos();
        let e = C64::from_polar(1.0, self.phi);
        if anti {
            [c(s, 0.0), -e * co]
        } else {
            [c(co, 0.0), e * s]
        }
    }
}

/// `|ψ⟩ = cos(θ/2)|0⟩ + sin(θ/2)e^{iφ}|1⟩`, or `|ψ̄⟩ = sin(θ/2)|0⟩ − cos(θ/2)e^{iφ}|1⟩`.
pub fn make_qubit(angles: BlochAngles, anti: bool) -> PureState {
    PureState { dims: vec![2], amps: angles.amplitudes(anti).to_vec() }
}

/// Single-qubit gate kinds. Sequences are stored in application order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingleGate {
    H,
    S,
    Sdg,
    T,
    Tdg,
    X,
    Y,
    Z,
    /// `[[cos θ/2, −e^{iλ} sin θ/2], [e^{iφ} sin θ/2, e^{i(φ+λ)} cos θ/2]]`.
    U3 { theta: f64, phi: f64, lambda: f64 },
}

impl SingleGate {
    pub fn matrix(&self) -> CMatrix {
        let h = FRAC_1_SQRT_2;
        let rows = match *self {
            SingleGate::H => [c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)],
            SingleGate::S => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)],
            SingleGate::Sdg => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)],
            SingleGate::T => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, PI / 4.0)],
            SingleGate::Tdg => {
                [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, -PI / 4.0)]
            }
            SingleGate::X => [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            SingleGate::Y => [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
            SingleGate::Z => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
            SingleGate::U3 { theta, phi, lambda } => {
                let (s, co) = (theta / 2.0).sin_cos();
                [
                    c(co, 0.0),
                    -C64::from_polar(s, lambda),
                    C64::from_polar(s, phi),
                    C64::from_polar(co, phi + lambda),
                ]
            }
        };
        CMatrix::from_rows(2, rows.to_vec())
    }

    pub fn inverse(&self) -> SingleGate {
        match *self {
            SingleGate::S => SingleGate::Sdg,
            SingleGate::Sdg => SingleGate::S,
            SingleGate::T => SingleGate::Tdg,
            SingleGate::Tdg => SingleGate::T,
            SingleGate::U3 { theta, phi, lambda } => {
                SingleGate::U3 { theta: -theta, phi: -lambda, lambda: -phi }
            }
            g => g,
        }
    }

    /// The tableau counterpart, if this gate is one of the named Cliffords.
    pub fn clifford(&self, qubit: usize) -> Option<CliffordGate> {
        Some(match self {
            SingleGate::H => CliffordGate::H(qubit),
            SingleGate::S => CliffordGate::S(qubit),
            SingleGate::Sdg => CliffordGate::Sdg(qubit),
            SingleGate::X => CliffordGate::X(qubit),
            SingleGate::Y => CliffordGate::Y(qubit),
            SingleGate::Z => CliffordGate::Z(qubit),
            _ => return None,
        })
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            SingleGate::H => "H",
            SingleGate::S => "S",
            SingleGate::Sdg => "Sdg",
            SingleGate::T => "T",
            SingleGate::Tdg => "Tdg",
            SingleGate::X => "X",
            SingleGate::Y => "Y",
            SingleGate::Z => "Z",
            SingleGate::U3 { .. } => "U3",
        }
    }
}

/// Product matrix of a gate sequence given in application order.
pub fn sequence_matrix(gates: &[SingleGate]) -> CMatrix {
    gates.iter().fold(CMatrix::identity(2), |acc, g| &g.matrix() * &acc)
}

/// Inverse sequence (reversed order, each gate inverted).
pub fn inverse_sequence(gates: &[SingleGate]) -> Vec<SingleGate> {
    gates.iter().rev().map(SingleGate::inverse).collect()
}

/// A gate bound to register positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Single { kind: SingleGate, target: usize },
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
}

impl Gate {
    pub fn on(kind: SingleGate, target: usize) -> Self {
        Gate::Single { kind, target }
    }

    pub fn targets(&self) -> Vec<usize> {
        match *self {
            Gate::Single { target, .. } => vec![target],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cz(a, b) => vec![a, b],
        }
    }

    pub fn matrix(&self) -> CMatrix {
        match self {
            Gate::Single { kind, .. } => kind.matrix(),
            Gate::Cnot { .. } => {
                let mut m = CMatrix::zeros(4);
                m[(0, 0)] = c(1.0, 0.0);
                m[(1, 1)] = c(1.0, 0.0);
                m[(2, 3)] = c(1.0, 0.0);
                m[(3, 2)] = c(1.0, 0.0);
                m
            }
            Gate::Cz(..) => {
                let mut m = CMatrix::identity(4);
                m[(3, 3)] = c(-1.0, 0.0);
                m
            }
        }
    }

    pub fn clifford(&self) -> Result<CliffordGate> {
        match *self {
            Gate::Single { kind, target } => {
                kind.clifford(target).ok_or(Error::NonClifford(kind.symbol()))
            }
            Gate::Cnot { control, target } => Ok(CliffordGate::Cnot { control, target }),
            Gate::Cz(a, b) => Ok(CliffordGate::Cz(a, b)),
        }
    }
}

/// Outcome pair of the teleportation measurement in ±1 form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BellOutcome {
    pub s1: i8,
    pub s2: i8,
}

impl BellOutcome {
    pub fn new(s1: i8, s2: i8) -> Result<Self> {
        if !matches!(s1, 1 | -1) || !matches!(s2, 1 | -1) {
            return Err(Error::InvalidArgument(format!("outcomes must be ±1, got ({s1}, {s2})")));
        }
        Ok(Self { s1, s2 })
    }

    /// `X^{(1−s2)/2} Z^{(1−s1)/2}` as a one-qubit Pauli string (with phase).
    pub fn byproduct(&self) -> PauliString {
        let mut p = PauliString::identity(1);
        if bit_of(self.s2) {
            p = p.mul(&PauliString::single(1, 0, Letter::X));
        }
        if bit_of(self.s1) {
            p = p.mul(&PauliString::single(1, 0, Letter::Z));
        }
        p
    }
}

/// A GHZ-type codeword `(|a⟩ + (−1)^{b1}|ā⟩)/√2`, normalized so that `a₁ = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GhzCode {
    /// `b1`: the relative phase bit.
    pub phase: bool,
    /// `b_k = a₁ ⊕ a_k` for `k = 2..n`.
    pub flips: Vec<bool>,
}

impl GhzCode {
    pub fn from_bits(a: &[bool], b1: bool) -> Self {
        let flips = a.iter().skip(1).map(|&ak| ak ^ a[0]).collect();
        Self { phase: b1, flips }
    }

    /// Bell label `(a, b)` of `|Φ_ab⟩` for two qubits: `a` is the flip bit and
    /// `b` the phase bit.
    pub fn from_bell(a: bool, b: bool) -> Self {
        Self { phase: b, flips: vec![a] }
    }

    /// Label `(b1, b2, …, bn)`.
    pub fn from_ghz_label(bits: &[bool]) -> Self {
        Self { phase: bits[0], flips: bits[1..].to_vec() }
    }

    pub fn num_qubits(&self) -> usize {
        self.flips.len() + 1
    }

    pub fn bell_label(&self) -> (bool, bool) {
        (self.flips[0], self.phase)
    }

    pub fn ghz_label(&self) -> Vec<bool> {
        let mut v = vec![self.phase];
        v.extend_from_slice(&self.flips);
        v
    }

    /// Conventional label: `(a, b)` for two qubits, `(b1, …, bn)` otherwise.
    pub fn label(&self) -> Vec<bool> {
        if self.num_qubits() == 2 {
            let (a, b) = self.bell_label();
            vec![a, b]
        } else {
            self.ghz_label()
        }
    }

    pub fn from_label(bits: &[bool]) -> Self {
        if bits.len() == 2 {
            Self::from_bell(bits[0], bits[1])
        } else {
            Self::from_ghz_label(bits)
        }
    }

    /// The `a` bit-vector with `a₁ = 0`.
    pub fn a_bits(&self) -> Vec<bool> {
        let mut a = vec![false];
        a.extend_from_slice(&self.flips);
        a
    }

    pub fn state(&self) -> PureState {
        make_ghz(&self.a_bits(), self.phase)
    }

    /// All `2^n` codes in label order.
    pub fn all(n: usize) -> Vec<GhzCode> {
        (0..1usize << n)
            .map(|m| {
                let bits: Vec<bool> = (0..n).map(|k| m >> (n - 1 - k) & 1 == 1).collect();
                GhzCode::from_label(&bits)
            })
            .collect()
    }
}

/// `|Φ00⟩ = (|00⟩ + |11⟩)/√2`.
pub fn bell_pair() -> PureState {
    make_ghz(&[false, false], false)
}

/// `|Φ_ab⟩` in the Bell labelling.
pub fn bell_state(a: bool, b: bool) -> PureState {
    GhzCode::from_bell(a, b).state()
}

/// `(|a⟩ + (−1)^{b1}|ā⟩)/√2` on `a.len()` qubits.
pub fn make_ghz(a: &[bool], b1: bool) -> PureState {
    let n = a.len();
    assert!(n >= 1, "GHZ state needs at least one qubit");
    let idx = a.iter().fold(0usize, |acc, &bit| acc << 1 | usize::from(bit));
    let comp = idx ^ ((1usize << n) - 1);
    let mut amps = vec![C64::zero(); 1 << n];
    amps[idx] = c(FRAC_1_SQRT_2, 0.0);
    amps[comp] = c(if b1 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 }, 0.0);
    PureState { dims: vec![2; n], amps }
}

/// `(|a⟩ + (−1)^{b1}|ā⟩)/√2` with `n` stated explicitly.
pub fn make_ghz_n(n: usize, a: &[bool], b1: bool) -> Result<PureState> {
    if n < 2 || a.len() != n {
        return Err(Error::InvalidArgument(format!("GHZ needs n >= 2 and |a| = n (n={n}, |a|={})", a.len())));
    }
    Ok(make_ghz(a, b1))
}

/// Bell basis vectors on two qubits, ordered by `2a + b`.
pub fn bell_basis() -> Vec<Vec<C64>> {
    (0..4).map(|k| bell_state(k & 2 != 0, k & 1 != 0).amps).collect()
}

/// Dense amplitude vector over a list of subsystems of dimension 2 or 3.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

/// Offsets of target multi-indices and bases of the remaining subsystems.
struct Layout {
    offsets: Vec<usize>,
    bases: Vec<usize>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        let dim = checked_dim(&dims)?;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: amps.len() });
        }
        let n2 = norm_sq(&amps);
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq: n2 });
        }
        Ok(Self { dims, amps })
    }

    /// Normalizes the given amplitudes.
    pub fn from_unnormalized(dims: Vec<usize>, mut amps: Vec<C64>) -> Result<Self> {
        let dim = checked_dim(&dims)?;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: amps.len() });
        }
        let n2 = crate::matrix::normalize(&mut amps);
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::NotNormalized { norm_sq: n2 });
        }
        Ok(Self { dims, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let dim = checked_dim(&dims)?;
        if index >= dim {
            return Err(Error::TargetOutOfRange { index, len: dim });
        }
        let mut amps = vec![C64::zero(); dim];
        amps[index] = c(1.0, 0.0);
        Ok(Self { dims, amps })
    }

    /// `|0…0⟩` on `n` qubits.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::basis(vec![2; n], 0)
    }

    /// `|bits⟩` on qubits, leftmost first.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let idx = bits.iter().fold(0usize, |acc, &b| acc << 1 | usize::from(b));
        Self::basis(vec![2; bits.len()], idx)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.amps)
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        checked_dim(&dims)?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(PureState { dims, amps })
    }

    /// Tensor product of several states, left to right.
    pub fn product(parts: &[PureState]) -> Result<PureState> {
        let mut it = parts.iter();
        let first = it.next().ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        it.try_fold(first.clone(), |acc, p| acc.tensor(p))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        self.same_layout(other)?;
        Ok(inner(&self.amps, &other.amps))
    }

    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn same_layout(&self, other: &PureState) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (k, &t) in targets.iter().enumerate() {
            if t >= self.dims.len() {
                return Err(Error::TargetOutOfRange { index: t, len: self.dims.len() });
            }
            if targets[..k].contains(&t) {
                return Err(Error::InvalidTargets);
            }
        }
        Ok(())
    }

    fn check_qubits(&self, targets: &[usize]) -> Result<()> {
        self.check_targets(targets)?;
        match targets.iter().find(|&&t| self.dims[t] != 2) {
            Some(&t) => Err(Error::QutritTarget { subsystem: t }),
            None => Ok(()),
        }
    }

    fn layout(&self, targets: &[usize]) -> Layout {
        let n = self.dims.len();
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        let mut offsets = vec![0usize];
        for &t in targets {
            let (st, dt) = (strides[t], self.dims[t]);
            offsets = offsets
                .iter()
                .flat_map(|&o| (0..dt).map(move |d| o + d * st))
                .collect();
        }
        let mut bases = vec![0usize];
        for (k, (&sk, &dk)) in strides.iter().zip(&self.dims).enumerate().take(n) {
            if targets.contains(&k) {
                continue;
            }
            bases = bases
                .iter()
                .flat_map(|&o| (0..dk).map(move |d| o + d * sk))
                .collect();
        }
        Layout { offsets, bases }
    }

    /// Applies a unitary acting on `targets` (ordered, most significant first).
    pub fn apply_unitary(&self, matrix: &CMatrix, targets: &[usize]) -> Result<PureState> {
        self.check_targets(targets)?;
        let sub: usize = targets.iter().map(|&t| self.dims[t]).product();
        if matrix.dim() != sub {
            return Err(Error::DimensionMismatch { expected: sub, found: matrix.dim() });
        }
        if matrix.unitarity_defect() > 1e-10 {
            return Err(Error::InvalidArgument("matrix is not unitary".into()));
        }
        Ok(self.apply_matrix_unchecked(matrix, targets))
    }

    fn apply_matrix_unchecked(&self, matrix: &CMatrix, targets: &[usize]) -> PureState {
        let layout = self.layout(targets);
        let mut out = self.amps.clone();
        let mut buf = vec![C64::zero(); layout.offsets.len()];
        for &base in &layout.bases {
            for (b, &o) in buf.iter_mut().zip(&layout.offsets) {
                *b = self.amps[base + o];
            }
            let w = matrix.apply(&buf);
            for (v, &o) in w.into_iter().zip(&layout.offsets) {
                out[base + o] = v;
            }
        }
        PureState { dims: self.dims.clone(), amps: out }
    }

    pub fn apply_gate(&self, gate: &Gate) -> Result<PureState> {
        let targets = gate.targets();
        self.check_qubits(&targets)?;
        Ok(self.apply_matrix_unchecked(&gate.matrix(), &targets))
    }

    pub fn apply_gates(&self, gates: &[Gate]) -> Result<PureState> {
        gates.iter().try_fold(self.clone(), |s, g| s.apply_gate(g))
    }

    /// Applies a single-qubit gate sequence (application order) to one qubit.
    pub fn apply_sequence(&self, gates: &[SingleGate], target: usize) -> Result<PureState> {
        self.check_qubits(&[target])?;
        Ok(self.apply_matrix_unchecked(&sequence_matrix(gates), &[target]))
    }

    /// `P|ψ⟩`, including the string's phase. Qutrit positions must carry `I`.
    pub fn apply_pauli(&self, pauli: &PauliString) -> Result<PureState> {
        if pauli.num_qubits() != self.dims.len() {
            return Err(Error::DimensionMismatch { expected: self.dims.len(), found: pauli.num_qubits() });
        }
        let support = pauli.support();
        self.check_qubits(&support)?;
        let n = self.dims.len();
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        let phase = match pauli.phase().power() {
            0 => c(1.0, 0.0),
            1 => c(0.0, 1.0),
            2 => c(-1.0, 0.0),
            _ => c(0.0, -1.0),
        };
        let mut out = vec![C64::zero(); self.dim()];
        for (idx, &a) in self.amps.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let mut target = idx;
            let mut factor = phase;
            for &q in &support {
                let bit = (idx / strides[q]) % 2 == 1;
                match pauli.letter(q) {
                    Letter::X => target ^= strides[q],
                    Letter::Y => {
                        target ^= strides[q];
                        // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                        factor *= if bit { c(0.0, -1.0) } else { c(0.0, 1.0) };
                    }
                    Letter::Z => {
                        if bit {
                            factor = -factor;
                        }
                    }
                    Letter::I => {}
                }
            }
            out[target] += factor * a;
        }
        Ok(PureState { dims: self.dims.clone(), amps: out })
    }

    /// `⟨ψ|P|ψ⟩` for a Hermitian Pauli string.
    pub fn expectation(&self, pauli: &PauliString) -> Result<f64> {
        if !pauli.phase().is_real() {
            return Err(Error::NonHermitian);
        }
        Ok(inner(&self.amps, &self.apply_pauli(pauli)?.amps).re)
    }

    /// Born-rule measurement of a Hermitian Pauli string. Index 0 of the
    /// outcome source is `+1`.
    pub fn measure_pauli(&self, pauli: &PauliString, src: &mut dyn OutcomeSource) -> Result<(i8, PureState)> {
        if !pauli.phase().is_real() {
            return Err(Error::NonHermitian);
        }
        let flipped = self.apply_pauli(pauli)?;
        let plus: Vec<C64> = self.amps.iter().zip(&flipped.amps).map(|(a, b)| (a + b) * 0.5).collect();
        let minus: Vec<C64> = self.amps.iter().zip(&flipped.amps).map(|(a, b)| (a - b) * 0.5).collect();
        let probs = [norm_sq(&plus), norm_sq(&minus)];
        let k = src.choose(&probs)?;
        let (sign, mut amps) = if k == 0 { (1, plus) } else { (-1, minus) };
        crate::matrix::normalize(&mut amps);
        Ok((sign, PureState { dims: self.dims.clone(), amps }))
    }

    /// Measures one subsystem set in the orthonormal basis `basis` (vectors
    /// over the targets' joint space, ordered as `targets`).
    pub fn measure_in_basis(
        &self,
        targets: &[usize],
        basis: &[Vec<C64>],
        src: &mut dyn OutcomeSource,
    ) -> Result<(usize, PureState)> {
        self.check_targets(targets)?;
        let sub: usize = targets.iter().map(|&t| self.dims[t]).product();
        for b in basis {
            if b.len() != sub {
                return Err(Error::DimensionMismatch { expected: sub, found: b.len() });
            }
        }
        check_orthonormal(basis)?;
        let layout = self.layout(targets);
        let rests: Vec<Vec<C64>> = basis
            .iter()
            .map(|b| {
                layout
                    .bases
                    .iter()
                    .map(|&base| {
                        b.iter().zip(&layout.offsets).map(|(bv, &o)| bv.conj() * self.amps[base + o]).sum()
                    })
                    .collect()
            })
            .collect();
        let probs: Vec<f64> = rests.iter().map(|r| norm_sq(r)).collect();
        let captured: f64 = probs.iter().sum();
        if captured < 1.0 - 1e-9 {
            return Err(Error::IncompleteBasis { captured });
        }
        let k = src.choose(&probs)?;
        let scale = 1.0 / probs[k].sqrt();
        let mut amps = vec![C64::zero(); self.dim()];
        for (r, &base) in rests[k].iter().zip(&layout.bases) {
            for (bv, &o) in basis[k].iter().zip(&layout.offsets) {
                amps[base + o] = bv * r * scale;
            }
        }
        Ok((k, PureState { dims: self.dims.clone(), amps }))
    }

    /// Bell measurement of two qubits: returns `(a', b')` such that the pair
    /// was projected onto `|Φ_{a'b'}⟩`.
    pub fn bell_measure(&self, first: usize, second: usize, src: &mut dyn OutcomeSource) -> Result<(bool, bool, PureState)> {
        self.check_qubits(&[first, second])?;
        let (k, s) = self.measure_in_basis(&[first, second], &bell_basis(), src)?;
        Ok((k & 2 != 0, k & 1 != 0, s))
    }

    /// Projects the qubits onto the GHZ code basis.
    pub fn ghz_measure(&self, qubits: &[usize], src: &mut dyn OutcomeSource) -> Result<(GhzCode, PureState)> {
        self.check_qubits(qubits)?;
        let codes = GhzCode::all(qubits.len());
        let basis: Vec<Vec<C64>> = codes.iter().map(|c| c.state().amps).collect();
        let (k, s) = self.measure_in_basis(qubits, &basis, src)?;
        Ok((codes[k].clone(), s))
    }

    /// Full-register von Neumann measurement in the given basis.
    pub fn projective_measure(&self, basis: &CodeSpace, src: &mut dyn OutcomeSource) -> Result<(usize, PureState)> {
        let first = basis.states.first().ok_or_else(|| Error::InvalidArgument("empty basis".into()))?;
        self.same_layout(first)?;
        let targets: Vec<usize> = (0..self.dims.len()).collect();
        let vectors: Vec<Vec<C64>> = basis.states.iter().map(|s| s.amps.clone()).collect();
        self.measure_in_basis(&targets, &vectors, src)
    }

    /// State of `targets` when the register factorizes as targets ⊗ rest.
    pub fn factor(&self, targets: &[usize]) -> Option<PureState> {
        self.check_targets(targets).ok()?;
        let layout = self.layout(targets);
        let block = |base: usize| -> Vec<C64> { layout.offsets.iter().map(|&o| self.amps[base + o]).collect() };
        let best = layout
            .bases
            .iter()
            .copied()
            .max_by(|&a, &b| norm_sq(&block(a)).total_cmp(&norm_sq(&block(b))))?;
        let mut phi = block(best);
        crate::matrix::normalize(&mut phi);
        let leftover: f64 = layout
            .bases
            .iter()
            .map(|&base| {
                let v = block(base);
                norm_sq(&v) - inner(&phi, &v).norm_sqr()
            })
            .sum();
        if leftover > 1e-9 {
            return None;
        }
        let dims = targets.iter().map(|&t| self.dims[t]).collect();
        Some(PureState { dims, amps: phi })
    }

    /// Debug text: a `dims` line, then one `re im` line per amplitude.
    pub fn to_text(&self) -> String {
        let mut s = String::from("dims");
        for d in &self.dims {
            let _ = write!(s, " {d}");
        }
        s.push('\n');
        for a in &self.amps {
            let _ = writeln!(s, "{:.17e} {:.17e}", a.re, a.im);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidArgument(format!("state text: {why}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty"))?;
        let mut words = header.split_whitespace();
        if words.next() != Some("dims") {
            return Err(bad("missing dims header"));
        }
        let dims = words.map(|w| w.parse::<usize>().map_err(|_| bad("bad dimension"))).collect::<Result<Vec<_>>>()?;
        let amps = lines
            .map(|l| {
                let mut it = l.split_whitespace().map(str::parse::<f64>);
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(re)), Some(Ok(im)), None) => Ok(c(re, im)),
                    _ => Err(bad("bad amplitude line")),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims, amps)
    }
}

fn checked_dim(dims: &[usize]) -> Result<usize> {
    let mut dim = 1usize;
    for &d in dims {
        if d != 2 && d != 3 {
            return Err(Error::UnsupportedDimension(d));
        }
        dim = dim.saturating_mul(d);
        if dim > MAX_DIM {
            return Err(Error::RegisterTooLarge { dim });
        }
    }
    Ok(dim)
}

fn check_orthonormal(vectors: &[Vec<C64>]) -> Result<()> {
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate().skip(i) {
            let ov = inner(a, b).norm();
            let expected = if i == j { 1.0 } else { 0.0 };
            if (ov - expected).abs() > 1e-10 {
                return Err(Error::NonOrthonormal { i, j, overlap: ov });
            }
        }
    }
    Ok(())
}

/// `|⟨a|b⟩| = 1` within [`PHASE_EQ_TOL`].
pub fn equal_up_to_phase(a: &PureState, b: &PureState) -> bool {
    match a.inner(b) {
        Ok(ov) => (ov.norm() - 1.0).abs() <= PHASE_EQ_TOL,
        Err(_) => false,
    }
}

/// An orthonormal list of states sharing one register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpace {
    states: Vec<PureState>,
}

impl CodeSpace {
    pub fn new(states: Vec<PureState>) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::InvalidArgument("empty code".into()))?;
        for s in &states {
            first.same_layout(s)?;
        }
        let vectors: Vec<Vec<C64>> = states.iter().map(|s| s.amps.clone()).collect();
        check_orthonormal(&vectors)?;
        Ok(Self { states })
    }

    /// The four Bell states ordered `Φ00, Φ01, Φ10, Φ11`.
    pub fn bell() -> Self {
        Self { states: GhzCode::all(2).iter().map(GhzCode::state).collect() }
    }

    /// All `2^n` GHZ codewords in label order.
    pub fn ghz(n: usize) -> Self {
        Self { states: GhzCode::all(n).iter().map(GhzCode::state).collect() }
    }

    /// `{|ψ⟩, |ψ̄⟩}`.
    pub fn qubit_basis(angles: BlochAngles) -> Self {
        Self { states: vec![make_qubit(angles, false), make_qubit(angles, true)] }
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Index of the codeword equal to `state` up to phase.
    pub fn find(&self, state: &PureState) -> Option<usize> {
        self.states.iter().position(|s| equal_up_to_phase(s, state))
    }
}

/// First byproduct/codeword pair that leaves the code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureWitness {
    pub byproduct: usize,
    pub codeword: usize,
}

/// Whether every byproduct maps every codeword onto a codeword up to phase.
pub fn code_closure_check(code: &CodeSpace, byproducts: &[PauliString]) -> Result<(bool, Option<ClosureWitness>)> {
    for (bi, p) in byproducts.iter().enumerate() {
        for (ci, s) in code.states.iter().enumerate() {
            let image = s.apply_pauli(p)?;
            if code.find(&image).is_none() {
                return Ok((false, Some(ClosureWitness { byproduct: bi, codeword: ci })));
            }
        }
    }
    Ok((true, None))
}
