//! Seeded randomness and forced measurement branches.
//!
//! Every stochastic routine takes an [`OutcomeSource`]. A seeded generator
//! samples with Born probabilities; a [`Forced`] script replays a fixed list of
//! branch indices so that per-branch identities can be enumerated exhaustively.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Counter-based generator used throughout the crate.
pub type LabRng = ChaCha8Rng;

/// Branches with probability below this are never selected.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-12;

/// Generator for a given experiment seed.
pub fn seeded(seed: u64) -> LabRng {
    LabRng::seed_from_u64(seed)
}

/// Independent stream `index` under `seed`. Identical regardless of the order
/// in which trials are executed.
pub fn trial_rng(seed: u64, index: u64) -> LabRng {
    let mut rng = LabRng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Chooses measurement branches.
pub trait OutcomeSource {
    /// Picks an index into `probs`, which sum to one.
    fn choose(&mut self, probs: &[f64]) -> Result<usize>;

    /// Uniform draw in `[0, 1)` for classical randomness (guesses, tie noise).
    fn uniform(&mut self) -> f64;
}

impl<R: RngCore> OutcomeSource for R {
    fn choose(&mut self, probs: &[f64]) -> Result<usize> {
        let total: f64 = probs.iter().sum();
        let mut x = self.random::<f64>() * total;
        let mut last_possible = None;
        for (i, &p) in probs.iter().enumerate() {
            if p < MIN_BRANCH_PROBABILITY {
                continue;
            }
            last_possible = Some(i);
            if x < p {
                return Ok(i);
            }
            x -= p;
        }
        last_possible.ok_or(Error::ImpossibleOutcome { index: 0, probability: 0.0 })
    }

    fn uniform(&mut self) -> f64 {
        self.random::<f64>()
    }
}

/// Replays a script of branch indices, then falls back to seeded sampling.
///
/// For two-outcome Pauli measurements index 0 is the `+1` outcome and index 1
/// the `-1` outcome. Bell measurements use index `2a' + b'`.
#[derive(Debug, Clone)]
pub struct Forced {
    script: VecDeque<usize>,
    fallback: LabRng,
}

impl Forced {
    pub fn new<I: IntoIterator<Item = usize>>(script: I) -> Self {
        Self { script: script.into_iter().collect(), fallback: seeded(0x5eed) }
    }

    /// Script of `±1` signs for consecutive Pauli measurements.
    pub fn signs<I: IntoIterator<Item = i8>>(signs: I) -> Self {
        Self::new(signs.into_iter().map(|s| usize::from(s < 0)))
    }

    /// Appends more scripted branches.
    pub fn then<I: IntoIterator<Item = usize>>(mut self, more: I) -> Self {
        self.script.extend(more);
        self
    }

    /// Scripted entries not yet consumed.
    pub fn remaining(&self) -> usize {
        self.script.len()
    }
}

impl OutcomeSource for Forced {
    fn choose(&mut self, probs: &[f64]) -> Result<usize> {
        match self.script.pop_front() {
            Some(index) => {
                let probability = probs.get(index).copied().unwrap_or(0.0);
                if probability < MIN_BRANCH_PROBABILITY {
                    Err(Error::ImpossibleOutcome { index, probability })
                } else {
                    Ok(index)
                }
            }
            None => self.fallback.choose(probs),
        }
    }

    fn uniform(&mut self) -> f64 {
        self.fallback.random::<f64>()
    }
}

/// All sign vectors of length `n`, `+1` first.
pub fn sign_patterns(n: usize) -> Vec<Vec<i8>> {
    (0..1usize << n)
        .map(|mask| {
            (0..n).map(|k| if mask >> (n - 1 - k) & 1 == 1 { -1 } else { 1 }).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_rejects_zero_probability_branch() {
        let mut f = Forced::new([1]);
        assert!(matches!(f.choose(&[1.0, 0.0]), Err(Error::ImpossibleOutcome { .. })));
    }

    #[test]
    fn forced_falls_back_after_script() {
        let mut f = Forced::signs([-1]);
        assert_eq!(f.choose(&[0.5, 0.5]).unwrap(), 1);
        assert_eq!(f.choose(&[0.0, 1.0]).unwrap(), 1);
    }

    #[test]
    fn rng_never_picks_impossible_branch() {
        let mut rng = seeded(3);
        for _ in 0..1000 {
            assert_eq!(rng.choose(&[0.0, 1.0, 0.0]).unwrap(), 1);
        }
    }

    #[test]
    fn trial_streams_are_independent_of_order() {
        let a: u64 = trial_rng(9, 5).next_u64();
        let _ = trial_rng(9, 4).next_u64();
        assert_eq!(a, trial_rng(9, 5).next_u64());
        assert_ne!(a, trial_rng(9, 6).next_u64());
    }

    #[test]
    fn sign_patterns_enumerate_all() {
        let p = sign_patterns(2);
        assert_eq!(p, alloc::vec![alloc::vec![1, 1], alloc::vec![1, -1], alloc::vec![-1, 1], alloc::vec![-1, -1]]);
    }
}
