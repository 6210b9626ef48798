//! Chain-cluster attack: each `B_i` steers a logical qubit through four
//! chain qubits to apply `U_i`, leaving `B1` a qubit parallel or
//! anti-parallel to the intercepted one.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{attack_schedule, flip, single, AttackOutcome, Record};
use crate::error::{Error, Result};
use crate::matrix::{c, CMatrix};
use crate::pauli::{CliffordGate, Letter, PauliString};
use crate::protocols::ModifiedInstance;
use crate::rng::OutcomeSource;
use crate::spacetime::{ExchangePlan, Geometry};
use crate::state::{sequence_matrix, Gate, PureState, SingleGate};

/// Measurement angles, as multiples of `π/2`, for each share `U2…UN`. The
/// four entries are used in the order the logical qubit passes the chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainPlan {
    pub angles: Vec<[u8; 4]>,
}

/// `H·D(kπ/2)` with `D(α) = diag(1, e^{−iα})`: the step a chain measurement at
/// angle `α` applies (up to `X^m`).
fn step(k: u8) -> CMatrix {
    let d = CMatrix::from_rows(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), crate::matrix::C64::from_polar(1.0, -f64::from(k) * PI / 2.0)]);
    &SingleGate::H.matrix() * &d
}

/// Angles whose four steps compose to `target` up to phase, if any.
pub fn chain_angles(target: &CMatrix) -> Option<[u8; 4]> {
    let steps: Vec<CMatrix> = (0..4).map(step).collect();
    for code in 0..256u32 {
        let a: [u8; 4] = core::array::from_fn(|j| (code >> (2 * j) & 3) as u8);
        let m = a.iter().fold(CMatrix::identity(2), |acc, &k| &steps[usize::from(k)] * &acc);
        if m.equals_up_to_phase(target, 1e-9) {
            return Some(a);
        }
    }
    None
}

/// `±σ` equal to `m` up to a real sign, if `m` is a Pauli matrix.
fn as_pauli(m: &CMatrix) -> Option<(Letter, i8)> {
    for letter in [Letter::X, Letter::Y, Letter::Z] {
        let g = match letter {
            Letter::X => SingleGate::X,
            Letter::Y => SingleGate::Y,
            _ => SingleGate::Z,
        }
        .matrix();
        for s in [1i8, -1] {
            if (0..2).all(|i| (0..2).all(|j| (m[(i, j)] - g[(i, j)] * f64::from(s)).norm() < 1e-9)) {
                return Some((letter, s));
            }
        }
    }
    None
}

impl ChainPlan {
    /// Finds angles for every share; `B_N`'s segment also absorbs the `H`
    /// that turns the chain's `|+⟩` input into `|0⟩`.
    pub fn for_instance(instance: &ModifiedInstance) -> Result<Self> {
        let last = instance.shares.len() - 1;
        let angles = instance
            .shares
            .iter()
            .enumerate()
            .map(|(k, share)| {
                let mut target = sequence_matrix(share);
                if k == last {
                    target = &target * &SingleGate::H.matrix();
                }
                chain_angles(&target).ok_or_else(|| {
                    let culprit = share.iter().find(|g| g.clifford(0).is_none()).map_or("rotation", SingleGate::symbol);
                    Error::NonClifford(culprit)
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { angles })
    }
}

/// Chain cluster attack on the rotation-sharing protocol with Clifford shares,
/// `N ∈ {2, 3}`. Register: 0 is the intercepted qubit, `1 + p` is chain
/// position `p`; position 0 belongs to `B1` and `B_i` holds positions
/// `4(i−2)+1 ..= 4(i−2)+4`.
pub fn attack_a_csqc_chain(instance: &ModifiedInstance, geometry: &Geometry, src: &mut dyn OutcomeSource) -> Result<AttackOutcome> {
    let n = instance.n();
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedStations { n });
    }
    let plan = ChainPlan::for_instance(instance)?;
    let schedule = attack_schedule(geometry, n, &ExchangePlan::all_to_all(n))?;
    let chain_len = 4 * n - 3;
    let width = chain_len + 1;

    let plus = PureState::zeros(1)?.apply_sequence(&[SingleGate::H], 0)?;
    let mut state = instance.encoded();
    for _ in 0..chain_len {
        state = state.tensor(&plus)?;
    }
    for p in 0..chain_len - 1 {
        state = state.apply_gate(&Gate::Cz(1 + p, 2 + p))?;
    }

    let mut frame = PauliString::identity(1);
    let mut records = Vec::new();
    for (share, angles) in plan.angles.iter().enumerate().rev() {
        let base = 4 * share;
        for (step_idx, &k) in angles.iter().enumerate() {
            let position = base + 4 - step_idx;
            let observable = match k {
                0 => single(width, 1 + position, Letter::X),
                1 => single(width, 1 + position, Letter::Y),
                2 => single(width, 1 + position, Letter::X).negated(),
                _ => single(width, 1 + position, Letter::Y).negated(),
            };
            let (s, next) = state.measure_pauli(&observable, src)?;
            state = next;
            records.push(Record::new(share + 1, "s", s));
            frame = advance_frame(&frame, k, flip(s))?;
        }
    }

    // c1 = P·U|0⟩ ∝ U|x⟩ with x = 1 iff P anticommutes with A = U Z U†.
    let u = sequence_matrix(&instance.composed());
    let a = &(&u * &SingleGate::Z.matrix()) * &u.adjoint();
    let (letter, _) = as_pauli(&a).ok_or(Error::NonClifford("rotation"))?;
    let x = !frame.commutes_with(&PauliString::single(1, 0, letter));
    let (a_p, b_p, _) = state.bell_measure(0, 1, src)?;
    records.push(Record::new(0, "a'", i8::from(a_p)));
    records.push(Record::new(0, "b'", i8::from(b_p)));
    let parity = match letter {
        Letter::Z => a_p,
        Letter::X => b_p,
        // YY has eigenvalue −(−1)^{a'+b'} on |Φ_{a'b'}⟩.
        _ => !(a_p ^ b_p),
    };
    Ok(AttackOutcome::broadcast(vec![parity ^ x], vec![instance.u], schedule, records))
}

/// `P ← X^m · (H D) P (H D)†`, letters only.
fn advance_frame(frame: &PauliString, k: u8, m: bool) -> Result<PauliString> {
    let d = match k {
        0 => None,
        1 => Some(CliffordGate::Sdg(0)),
        2 => Some(CliffordGate::Z(0)),
        _ => Some(CliffordGate::S(0)),
    };
    let mut p = frame.clone();
    if let Some(g) = d {
        p = p.conjugated_by(&g)?;
    }
    p = p.conjugated_by(&CliffordGate::H(0))?;
    if m {
        p = PauliString::single(1, 0, Letter::X).mul(&p);
    }
    Ok(p.with_phase(crate::pauli::Phase::ONE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{seeded, Forced};

    #[test]
    fn every_clifford_has_chain_angles() {
        let gens = [SingleGate::H, SingleGate::S];
        let mut found = 0;
        // words of length <= 6 in H, S cover the 24 single-qubit Cliffords
        for len in 0..=6u32 {
            for word in 0..(1u32 << len) {
                let seq: Vec<SingleGate> = (0..len).map(|j| gens[(word >> j & 1) as usize]).collect();
                assert!(chain_angles(&sequence_matrix(&seq)).is_some(), "{seq:?}");
                found += 1;
            }
        }
        assert!(found > 24);
        assert!(chain_angles(&SingleGate::T.matrix()).is_none());
    }

    #[test]
    fn n2_hadamard_share() {
        let g = Geometry::collinear(1.0, 0.1, 1.0).unwrap();
        for u in [false, true] {
            let inst = ModifiedInstance::new(u, vec![vec![SingleGate::H]]).unwrap();
            for seed in 0..20 {
                assert!(attack_a_csqc_chain(&inst, &g, &mut seeded(seed)).unwrap().success);
            }
        }
    }

    #[test]
    fn n3_h_then_s_every_branch() {
        let g = Geometry::equilateral(1.0, 0.1, 1.0).unwrap();
        let mut branches = 0;
        for u in [false, true] {
            let inst = ModifiedInstance::new(u, vec![vec![SingleGate::H], vec![SingleGate::S]]).unwrap();
            for signs in crate::rng::sign_patterns(8) {
                for bell in 0..4 {
                    match attack_a_csqc_chain(&inst, &g, &mut Forced::signs(signs.clone()).then([bell])) {
                        Ok(out) => {
                            assert!(out.success, "u={u} signs={signs:?} bell={bell}");
                            branches += 1;
                        }
                        Err(Error::ImpossibleOutcome { .. }) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
        assert!(branches >= 2 * 256);
    }

    #[test]
    fn t_share_rejected() {
        let g = Geometry::collinear(1.0, 0.1, 1.0).unwrap();
        let inst = ModifiedInstance::new(false, vec![vec![SingleGate::T]]).unwrap();
        assert_eq!(attack_a_csqc_chain(&inst, &g, &mut Forced::new([])), Err(Error::NonClifford("T")));
    }
}
