//! Cheating strategies against the protocols, each run with a schedule that
//! respects the restricted area.

mod cluster;
mod modified;
mod qss;
mod teleport;

pub use cluster::{attack_a_csqc_chain, chain_angles, ChainPlan};
pub use modified::{attack_modified, strategy_success_probability, teleport_optimal_success, ModifiedStrategy};
pub use qss::{attack_a_n3_qss, attack_a_nn_qss, qss_residual};
pub use teleport::{attack_a_n2, attack_a_n2_xyz, attack_b_n2, attack_b_n3, b_n3_residual_generators, pauli_encoding, PauliEncoding};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};
use crate::protocols::Transcript;
use crate::spacetime::{cheat_completion, ExchangePlan, Geometry, ScheduleReport};

/// One classical value produced by a cheater.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    /// Cheater index, `0` for `B1`.
    pub party: usize,
    pub label: String,
    /// `±1` outcome or a bit.
    pub value: i8,
}

impl Record {
    pub(crate) fn new(party: usize, label: &str, value: i8) -> Self {
        Self { party, label: String::from(label), value }
    }
}

/// What the cheaters sent back and whether the verifiers would accept it.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackOutcome {
    pub reconstructed: Vec<bool>,
    pub expected: Vec<bool>,
    /// Answer delivered to each verifier.
    pub answers: Vec<Vec<bool>>,
    pub schedule: ScheduleReport,
    pub success: bool,
    pub records: Vec<Record>,
}

impl AttackOutcome {
    pub(crate) fn new(
        reconstructed: Vec<bool>,
        expected: Vec<bool>,
        answers: Vec<Vec<bool>>,
        schedule: ScheduleReport,
        records: Vec<Record>,
    ) -> Self {
        let consistent = answers.iter().all(|a| a == &answers[0]);
        let success = consistent && reconstructed == expected && answers[0] == expected && schedule.meets_deadline;
        Self { reconstructed, expected, answers, schedule, success, records }
    }

    /// The same answer to every verifier.
    pub(crate) fn broadcast(reconstructed: Vec<bool>, expected: Vec<bool>, schedule: ScheduleReport, records: Vec<Record>) -> Self {
        let answers = alloc::vec![reconstructed.clone(); schedule.arrivals.len()];
        Self::new(reconstructed, expected, answers, schedule, records)
    }

    pub fn consistent(&self) -> bool {
        self.answers.iter().all(|a| a == &self.answers[0])
    }

    /// Value recorded under `label` by `party`.
    pub fn record(&self, party: usize, label: &str) -> Option<i8> {
        self.records.iter().find(|r| r.party == party && r.label == label).map(|r| r.value)
    }

    pub fn transcript(&self) -> Transcript {
        Transcript { decoded: self.reconstructed.clone(), schedule: self.schedule.clone(), answers: self.answers.clone() }
    }
}

/// Cheat schedule for an `n`-verifier layout, placing cheaters by default
/// when none are given.
pub(crate) fn attack_schedule(geometry: &Geometry, n: usize, plan: &ExchangePlan) -> Result<ScheduleReport> {
    if geometry.num_verifiers() != n {
        return Err(Error::InvalidGeometry(format!("{} verifiers for an N = {n} attack", geometry.num_verifiers())));
    }
    if geometry.cheaters().is_empty() {
        cheat_completion(&geometry.clone().with_default_cheaters()?, plan)
    } else {
        cheat_completion(geometry, plan)
    }
}

pub(crate) fn single(n: usize, q: usize, letter: Letter) -> PauliString {
    PauliString::single(n, q, letter)
}

/// `(1 − s)/2`.
pub(crate) fn flip(s: i8) -> bool {
    s < 0
}
