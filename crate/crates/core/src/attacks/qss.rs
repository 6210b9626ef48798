//! Secret-sharing attack on the basis-sharing protocol for `N ≥ 3`.

use alloc::vec;
use alloc::vec::Vec;

use super::{attack_schedule, flip, single, AttackOutcome, Record};
use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};
use crate::protocols::ProtocolAInstance;
use crate::rng::OutcomeSource;
use crate::spacetime::{receiver_in_hull, ExchangePlan, Geometry};
use crate::stabilizer::ghz_party_rule;
use crate::state::{make_ghz, Gate, SingleGate};

/// Largest station count simulated densely.
pub const MAX_QSS_STATIONS: usize = 5;

/// Single-qubit stabilizer left on `B1`'s GHZ qubit once `B_i` measured `X`
/// (`q_i = 0`) or `Y` (`q_i = 1`) with outcomes `s_i`: the letter follows the
/// parity rule and the sign is `(−1)^{⌈m/2⌉} ∏ s_i` for `m` ones among the shares.
pub fn qss_residual(q_shares: &[bool], signs: &[i8]) -> Result<PauliString> {
    if q_shares.len() != signs.len() {
        return Err(Error::InvalidArgument("one outcome per share".into()));
    }
    let letter = ghz_party_rule(q_shares)?;
    let m = q_shares.iter().filter(|&&q| q).count();
    let mut sign: i8 = if m.div_ceil(2) % 2 == 1 { -1 } else { 1 };
    for &s in signs {
        sign *= s;
    }
    Ok(PauliString::single(1, 0, letter).signed(sign))
}

/// Three stations: [`attack_a_nn_qss`] with `N = 3`.
pub fn attack_a_n3_qss(instance: &ProtocolAInstance, geometry: &Geometry, src: &mut dyn OutcomeSource) -> Result<AttackOutcome> {
    if instance.n() != 3 {
        return Err(Error::UnsupportedStations { n: instance.n() });
    }
    attack_a_nn_qss(instance, geometry, src)
}

/// `N`-party GHZ secret sharing. Register: 0 is the intercepted qubit, 1 is
/// `B1`'s GHZ qubit and `i` is `B_i`'s for `i = 2..N`.
pub fn attack_a_nn_qss(instance: &ProtocolAInstance, geometry: &Geometry, src: &mut dyn OutcomeSource) -> Result<AttackOutcome> {
    let n = instance.n();
    if !(3..=MAX_QSS_STATIONS).contains(&n) {
        return Err(Error::UnsupportedStations { n });
    }
    if geometry.num_verifiers() == n && (geometry.is_collinear() || !receiver_in_hull(geometry)?) {
        return Err(Error::InvalidGeometry("secret-sharing attack needs the receiver strictly inside a planar layout".into()));
    }
    let schedule = attack_schedule(geometry, n, &ExchangePlan::all_to_all(n))?;
    let width = n + 1;
    let mut state = instance.encoded().tensor(&make_ghz(&vec![false; n], false))?;
    let mut signs = Vec::with_capacity(n - 1);
    let mut records = Vec::new();
    for (k, &q) in instance.q_shares.iter().enumerate() {
        let letter = if q { Letter::Y } else { Letter::X };
        let (s, next) = state.measure_pauli(&single(width, k + 2, letter), src)?;
        state = next;
        signs.push(s);
        records.push(Record::new(k + 1, "s", s));
    }
    let residual = qss_residual(&instance.q_shares, &signs)?;
    let lambda = residual.sign().expect("Hermitian residual");
    // S·H maps X → Z and Y → X with the eigenvalue kept.
    let state = state.apply_gates(&[Gate::on(SingleGate::H, 1), Gate::on(SingleGate::S, 1)])?;
    let (a_p, b_p, _) = state.bell_measure(0, 1, src)?;
    records.push(Record::new(0, "a'", i8::from(a_p)));
    records.push(Record::new(0, "b'", i8::from(b_p)));
    let parity = if instance.q { b_p } else { a_p };
    let u = parity ^ flip(lambda);
    Ok(AttackOutcome::broadcast(vec![u], vec![instance.u], schedule, records))
}
