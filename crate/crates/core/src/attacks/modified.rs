//! Two-station strategies against the rotation-sharing protocol with a
//! general (non-Pauli) encoding basis `{|ψ⟩, |ψ̄⟩}`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
#[allow(unused_imports)]
use num_traits::Float;

use super::{attack_schedule, flip, single, AttackOutcome, Record};
use crate::error::{Error, Result};
use crate::matrix::{inner, CMatrix, C64};
use crate::pauli::Letter;
use crate::protocols::ModifiedInstance;
use crate::rng::OutcomeSource;
use crate::spacetime::{ExchangePlan, Geometry};
use crate::state::{bell_pair, BlochAngles, Gate, PureState, SingleGate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModifiedStrategy {
    /// `B1` measures `Z` on arrival and answers without waiting.
    RandomGuess,
    /// `B1` measures `Z`, then flips the answer once `θ > π/2` is known.
    MeasureHold,
    /// Teleport to `B2`, measure in the encoding basis, then decide by
    /// maximum likelihood once the byproduct and basis are shared.
    TeleportOptimal,
    /// `B1` commits a `Z` answer to `V1` while `B2` answers `V2` from its own
    /// teleported measurement; the two answers can disagree.
    EntangleMemory,
}

impl ModifiedStrategy {
    pub const ALL: [ModifiedStrategy; 4] = [Self::RandomGuess, Self::MeasureHold, Self::TeleportOptimal, Self::EntangleMemory];

    pub fn name(&self) -> &'static str {
        match self {
            Self::RandomGuess => "RandomGuess",
            Self::MeasureHold => "MeasureHold",
            Self::TeleportOptimal => "TeleportOptimal",
            Self::EntangleMemory => "EntangleMemory",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name().eq_ignore_ascii_case(name))
    }

    fn plan(&self) -> ExchangePlan {
        match self {
            Self::RandomGuess => ExchangePlan::new(vec![(0, 1)]),
            _ => ExchangePlan::all_to_all(2),
        }
    }
}

/// `X^{(1−s2)/2} Z^{(1−s1)/2}` as a matrix.
fn byproduct_matrix(s1: i8, s2: i8) -> CMatrix {
    let mut m = CMatrix::identity(2);
    if flip(s1) {
        m = &SingleGate::Z.matrix() * &m;
    }
    if flip(s2) {
        m = &SingleGate::X.matrix() * &m;
    }
    m
}

/// `|⟨b_v| P |χ_u⟩|²` where `b_0 = χ_0 = ψ` and `b_1 = χ_1 = ψ̄`.
fn likelihood(angles: BlochAngles, p: &CMatrix, v: bool, u: bool) -> f64 {
    let b = angles.amplitudes(v);
    let chi = p.apply(&angles.amplitudes(u));
    inner(&b, &chi).norm_sqr()
}

/// Maximum-likelihood codeword after seeing outcome `v` and byproduct `p`;
/// ties go to `ψ`.
fn map_decision(angles: BlochAngles, p: &CMatrix, v: bool) -> bool {
    likelihood(angles, p, v, true) > likelihood(angles, p, v, false) + 1e-12
}

/// Exact success probability of the maximum-likelihood teleport strategy:
/// `(1/4) Σ_{P ∈ {I, X, Z, XZ}} max(p_P, 1 − p_P)` with `p_P = |⟨ψ|P|ψ⟩|²`.
pub fn teleport_optimal_success(angles: BlochAngles) -> f64 {
    let n = angles.direction();
    let term = |p: f64| p.max(1.0 - p);
    (1.0 + term(n[0] * n[0]) + term(n[2] * n[2]) + term(n[1] * n[1])) / 4.0
}

/// Closed-form success probability of a strategy for one encoding basis,
/// averaged over the secret bit and all measurement branches.
pub fn strategy_success_probability(strategy: ModifiedStrategy, angles: BlochAngles) -> f64 {
    let ct = angles.theta().cos();
    match strategy {
        ModifiedStrategy::RandomGuess => (1.0 + ct) / 2.0,
        ModifiedStrategy::MeasureHold => (1.0 + ct.abs()) / 2.0,
        ModifiedStrategy::TeleportOptimal => teleport_optimal_success(angles),
        ModifiedStrategy::EntangleMemory => {
            // B1's Z result z collapses the qubit to |z⟩; B2 then sees P|z⟩.
            let mut total = 0.0;
            for u in [false, true] {
                let chi = angles.amplitudes(u);
                let pz = if u { chi[1].norm_sqr() } else { chi[0].norm_sqr() };
                for (s1, s2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                    let p = byproduct_matrix(s1, s2);
                    let ket = if u { [C64::new(0.0, 0.0), C64::new(1.0, 0.0)] } else { [C64::new(1.0, 0.0), C64::new(0.0, 0.0)] };
                    let moved = p.apply(&ket);
                    for v in [false, true] {
                        if map_decision(angles, &p, v) == u {
                            total += pz * 0.25 * inner(&angles.amplitudes(v), &moved).norm_sqr();
                        }
                    }
                }
            }
            total / 2.0
        }
    }
}

/// Runs one strategy against an `N = 2` instance.
pub fn attack_modified(
    instance: &ModifiedInstance,
    strategy: ModifiedStrategy,
    geometry: &Geometry,
    src: &mut dyn OutcomeSource,
) -> Result<AttackOutcome> {
    if instance.n() != 2 {
        return Err(Error::UnsupportedStations { n: instance.n() });
    }
    let schedule = attack_schedule(geometry, 2, &strategy.plan())?;
    let angles = instance.encoding_angles();
    let input = instance.encoded();
    let expected = vec![instance.u];
    match strategy {
        ModifiedStrategy::RandomGuess | ModifiedStrategy::MeasureHold => {
            let (z, _) = input.measure_pauli(&single(1, 0, Letter::Z), src)?;
            let mut answer = flip(z);
            if strategy == ModifiedStrategy::MeasureHold && angles.theta() > FRAC_PI_2 {
                answer = !answer;
            }
            Ok(AttackOutcome::broadcast(vec![answer], expected, schedule, vec![Record::new(0, "z", z)]))
        }
        ModifiedStrategy::TeleportOptimal => {
            let (s1, s2, v) = teleport_to_b2(&input, angles, src)?;
            let answer = map_decision(angles, &byproduct_matrix(s1, s2), v);
            let records = vec![Record::new(0, "s1", s1), Record::new(0, "s2", s2), Record::new(1, "v", i8::from(v))];
            Ok(AttackOutcome::broadcast(vec![answer], expected, schedule, records))
        }
        ModifiedStrategy::EntangleMemory => {
            // Copy the Z value into a memory qubit and commit it to V1.
            let state = input.tensor(&PureState::zeros(1)?)?.apply_gate(&Gate::Cnot { control: 0, target: 1 })?;
            let (z, state) = state.measure_pauli(&single(2, 1, Letter::Z), src)?;
            let qubit = state.factor(&[0]).ok_or(Error::InvalidArgument("memory did not disentangle".into()))?;
            let (s1, s2, v) = teleport_to_b2(&qubit, angles, src)?;
            let first = flip(z);
            let second = map_decision(angles, &byproduct_matrix(s1, s2), v);
            let records = vec![
                Record::new(0, "z", z),
                Record::new(0, "s1", s1),
                Record::new(0, "s2", s2),
                Record::new(1, "v", i8::from(v)),
            ];
            let answers = vec![vec![first], vec![second]];
            Ok(AttackOutcome::new(vec![first], expected, answers, schedule, records))
        }
    }
}

/// Teleports a qubit through `|Φ00⟩`; `B2` measures `{ψ, ψ̄}`. Returns
/// `(s1, s2, v)` with `v` set for `ψ̄`.
fn teleport_to_b2(input: &PureState, angles: BlochAngles, src: &mut dyn OutcomeSource) -> Result<(i8, i8, bool)> {
    let state = input.tensor(&bell_pair())?.apply_gate(&Gate::Cnot { control: 0, target: 1 })?;
    let (s1, state) = state.measure_pauli(&single(3, 0, Letter::X), src)?;
    let (s2, state) = state.measure_pauli(&single(3, 1, Letter::Z), src)?;
    let basis: Vec<Vec<C64>> = vec![angles.amplitudes(false).to_vec(), angles.amplitudes(true).to_vec()];
    let (v, _) = state.measure_in_basis(&[2], &basis, src)?;
    Ok((s1, s2, v == 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::Program;
    use crate::rng::seeded;
    use core::f64::consts::PI;

    fn inst(u: bool, theta: f64, phi: f64) -> ModifiedInstance {
        ModifiedInstance::from_program(2, u, &Program::Angles(BlochAngles::new(theta, phi).unwrap())).unwrap()
    }

    fn line() -> Geometry {
        Geometry::collinear(1.0, 0.1, 1.0).unwrap()
    }

    #[test]
    fn z_basis_always_wins() {
        for s in [ModifiedStrategy::RandomGuess, ModifiedStrategy::MeasureHold, ModifiedStrategy::TeleportOptimal] {
            for u in [false, true] {
                for seed in 0..16 {
                    assert!(attack_modified(&inst(u, 0.0, 0.0), s, &line(), &mut seeded(seed)).unwrap().success, "{s:?}");
                }
            }
            assert!((strategy_success_probability(s, BlochAngles::new(0.0, 0.0).unwrap()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn x_basis_teleport_wins() {
        for u in [false, true] {
            for seed in 0..32 {
                let out = attack_modified(&inst(u, PI / 2.0, 0.0), ModifiedStrategy::TeleportOptimal, &line(), &mut seeded(seed)).unwrap();
                assert!(out.success);
            }
        }
    }

    #[test]
    fn entangle_memory_disagrees_sometimes() {
        let mut inconsistent = 0;
        for seed in 0..400 {
            let out = attack_modified(&inst(seed % 2 == 1, PI / 3.0, 0.4), ModifiedStrategy::EntangleMemory, &line(), &mut seeded(seed)).unwrap();
            if !out.consistent() {
                inconsistent += 1;
                assert!(!out.success);
            }
        }
        assert!(inconsistent > 0);
    }

    #[test]
    fn schedules_meet_deadline() {
        for s in ModifiedStrategy::ALL {
            let out = attack_modified(&inst(false, 1.0, 2.0), s, &line(), &mut seeded(1)).unwrap();
            assert!(out.schedule.meets_deadline, "{s:?}");
            assert_eq!(ModifiedStrategy::parse(s.name()), Some(s));
        }
    }
}
