//! Teleport-to-one-cheater attacks for two and three stations.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{attack_schedule, flip, single, AttackOutcome, Record};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};
use crate::protocols::{ProtocolAInstance, ProtocolBInstance};
use crate::rng::OutcomeSource;
use crate::spacetime::{ExchangePlan, Geometry};
use crate::state::{bell_pair, inverse_sequence, BlochAngles, Gate, PureState, SingleGate};

/// `|u⟩` rotated into the eigenbasis of a Pauli operator: eigenvalue `(−1)^u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliEncoding {
    pub basis: Letter,
    pub u: bool,
}

impl PauliEncoding {
    pub fn new(basis: Letter, u: bool) -> Result<Self> {
        if basis == Letter::I {
            return Err(Error::NonPauliEncoding);
        }
        Ok(Self { basis, u })
    }

    /// Gates (application order) taking `|u⟩` to the encoded state.
    pub fn preparation(&self) -> Vec<SingleGate> {
        match self.basis {
            Letter::X => vec![SingleGate::H],
            Letter::Y => vec![SingleGate::H, SingleGate::S],
            _ => Vec::new(),
        }
    }

    pub fn state(&self) -> PureState {
        PureState::from_bits(&[self.u]).expect("one qubit").apply_sequence(&self.preparation(), 0).expect("qubit")
    }

    pub fn angles(&self) -> BlochAngles {
        let (theta, phi) = match (self.basis, self.u) {
            (Letter::X, false) => (PI / 2.0, 0.0),
            (Letter::X, true) => (PI / 2.0, PI),
            (Letter::Y, false) => (PI / 2.0, PI / 2.0),
            (Letter::Y, true) => (PI / 2.0, 3.0 * PI / 2.0),
            (_, false) => (0.0, 0.0),
            (_, true) => (PI, 0.0),
        };
        BlochAngles::new(theta, phi).expect("axis angles")
    }
}

/// Classifies a Bloch direction as `±X`, `±Y` or `±Z`.
pub fn pauli_encoding(angles: BlochAngles) -> Result<PauliEncoding> {
    let n = angles.direction();
    for (k, letter) in [Letter::X, Letter::Y, Letter::Z].into_iter().enumerate() {
        if (n[k].abs() - 1.0).abs() < 1e-9 {
            return PauliEncoding::new(letter, n[k] < 0.0);
        }
    }
    Err(Error::NonPauliEncoding)
}

/// `B1` teleports `input` to `B2` through `|Φ00⟩`; `B2` measures `basis`.
/// Returns `(s1, s2, r)`.
fn teleport_and_measure(input: &PureState, basis: Letter, src: &mut dyn OutcomeSource) -> Result<(i8, i8, i8)> {
    let state = input.tensor(&bell_pair())?.apply_gate(&Gate::Cnot { control: 0, target: 1 })?;
    let (s1, state) = state.measure_pauli(&single(3, 0, Letter::X), src)?;
    let (s2, state) = state.measure_pauli(&single(3, 1, Letter::Z), src)?;
    let (r, _) = state.measure_pauli(&single(3, 2, basis), src)?;
    Ok((s1, s2, r))
}

/// Sign that the byproduct `X^{(1−s2)/2} Z^{(1−s1)/2}` puts on a `basis` eigenvalue.
fn byproduct_flip(basis: Letter, s1: i8, s2: i8) -> i8 {
    match basis {
        Letter::Z => s2,
        Letter::X => s1,
        _ => s1 * s2,
    }
}

/// Two stations against the basis-sharing protocol: teleport, measure in
/// `H^q{|0⟩,|1⟩}`, undo the byproduct sign.
pub fn attack_a_n2(instance: &ProtocolAInstance, geometry: &Geometry, src: &mut dyn OutcomeSource) -> Result<AttackOutcome> {
    if instance.n() != 2 {
        return Err(Error::UnsupportedStations { n: instance.n() });
    }
    let schedule = attack_schedule(geometry, 2, &ExchangePlan::all_to_all(2))?;
    let basis = if instance.q { Letter::X } else { Letter::Z };
    let (s1, s2, r) = teleport_and_measure(&instance.encoded(), basis, src)?;
    let u = flip(r * byproduct_flip(basis, s1, s2));
    let records = vec![Record::new(0, "s1", s1), Record::new(0, "s2", s2), Record::new(1, "r", r)];
    Ok(AttackOutcome::broadcast(vec![u], vec![instance.u], schedule, records))
}

/// The same attack for encodings in any of the three Pauli eigenbases.
pub fn attack_a_n2_xyz(encoding: &PauliEncoding, geometry: &Geometry, src: &mut dyn OutcomeSource) -> Result<AttackOutcome> {
    if encoding.basis == Letter::I {
        return Err(Error::NonPauliEncoding);
    }
    let schedule = attack_schedule(geometry, 2, &ExchangePlan::all_to_all(2))?;
    let (s1, s2, r) = teleport_and_measure(&encoding.state(), encoding.basis, src)?;
    let u = flip(r * byproduct_flip(encoding.basis, s1, s2));
    let records = vec![Record::new(0, "s1", s1), Record::new(0, "s2", s2), Record::new(1, "r", r)];
    Ok(AttackOutcome::broadcast(vec![u], vec![encoding.u], schedule, records))
}

/// Two stations against the Bell-code protocol. Register: code qubits 1, 2,
/// then the shared pair 3 (held by `B2`) and 4 (held by `B1`).
pub fn attack_b_n2(instance: &ProtocolBInstance, geometry: &Geometry, src: &mut dyn OutcomeSource) -> Result<AttackOutcome> {
    if instance.n() != 2 {
        return Err(Error::UnsupportedStations { n: instance.n() });
    }
    let schedule = attack_schedule(geometry, 2, &ExchangePlan::all_to_all(2))?;
    let mut state = instance.encoded()?.tensor(&bell_pair())?;
    for (i, u) in instance.locals.iter().enumerate() {
        state = state.apply_sequence(&inverse_sequence(u), i)?;
    }
    let state = state.apply_gate(&Gate::Cnot { control: 1, target: 2 })?;
    let (s2, state) = state.measure_pauli(&single(4, 1, Letter::X), src)?;
    let (s3, state) = state.measure_pauli(&single(4, 2, Letter::Z), src)?;
    let (a_p, b_p, _) = state.bell_measure(0, 3, src)?;
    let decoded = vec![a_p ^ flip(s3), b_p ^ flip(s2)];
    let records = vec![
        Record::new(1, "s2", s2),
        Record::new(1, "s3", s3),
        Record::new(0, "a'", i8::from(a_p)),
        Record::new(0, "b'", i8::from(b_p)),
    ];
    Ok(AttackOutcome::broadcast(decoded, instance.code.label(), schedule, records))
}

/// Three stations against the GHZ-code protocol. Register (1-based
/// labels 1–7): code qubits 1–3, pairs (4, 5) and (6, 7); `B1` holds 1, 5, 7.
pub fn attack_b_n3(instance: &ProtocolBInstance, geometry: &Geometry, src: &mut dyn OutcomeSource) -> Result<AttackOutcome> {
    if instance.n() != 3 {
        return Err(Error::UnsupportedStations { n: instance.n() });
    }
    let schedule = attack_schedule(geometry, 3, &ExchangePlan::all_to_all(3))?;
    let mut state = PureState::product(&[instance.encoded()?, bell_pair(), bell_pair()])?;
    for (i, u) in instance.locals.iter().enumerate() {
        state = state.apply_sequence(&inverse_sequence(u), i)?;
    }
    let state = state.apply_gates(&[Gate::Cnot { control: 1, target: 3 }, Gate::Cnot { control: 2, target: 5 }])?;
    let (s2, state) = state.measure_pauli(&single(7, 1, Letter::X), src)?;
    let (s4, state) = state.measure_pauli(&single(7, 3, Letter::Z), src)?;
    let (s3, state) = state.measure_pauli(&single(7, 2, Letter::X), src)?;
    let (s6, state) = state.measure_pauli(&single(7, 5, Letter::Z), src)?;
    let (code, _) = state.ghz_measure(&[0, 4, 6], src)?;
    let primed = code.ghz_label();
    let decoded = vec![primed[0] ^ flip(s2 * s3), primed[1] ^ flip(s4), primed[2] ^ flip(s6)];
    let records = vec![
        Record::new(1, "s2", s2),
        Record::new(1, "s4", s4),
        Record::new(2, "s3", s3),
        Record::new(2, "s6", s6),
        Record::new(0, "b1'", i8::from(primed[0])),
        Record::new(0, "b2'", i8::from(primed[1])),
        Record::new(0, "b3'", i8::from(primed[2])),
    ];
    Ok(AttackOutcome::broadcast(decoded, instance.code.ghz_label(), schedule, records))
}

/// Generators expected after the two teleports of [`attack_b_n3`], with the
/// 1-based labels shifted to 0-based qubits.
pub fn b_n3_residual_generators(b: [bool; 3], s2: i8, s3: i8, s4: i8, s6: i8) -> Vec<PauliString> {
    let sgn = |bit: bool| if bit { -1 } else { 1 };
    vec![
        PauliString::on(7, &[0, 4, 6], Letter::X).signed(sgn(b[0]) * s2 * s3),
        PauliString::on(7, &[0, 4], Letter::Z).signed(sgn(b[1]) * s4),
        PauliString::on(7, &[0, 6], Letter::Z).signed(sgn(b[2]) * s6),
        single(7, 1, Letter::X).signed(s2),
        single(7, 3, Letter::Z).signed(s4),
        single(7, 2, Letter::X).signed(s3),
        single(7, 5, Letter::Z).signed(s6),
    ]
}
