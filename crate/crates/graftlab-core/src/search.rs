//! Seeded brute-force search over candidate byte strings with a canonical
//! evaluation order that is independent of how the work is scheduled.
//!
//! Candidates come from per-worker ChaCha20 streams derived from a base
//! seed. The canonical order interleaves fixed-size batches round-robin:
//! round 0 worker 0's batch, round 0 worker 1's batch, ..., round 1 worker
//! 0's batch, and so on. The winner is the first acceptable candidate in
//! that order and the attempt count is its 1-based position, so a
//! sequential run and any parallel driver that respects the order report
//! identical results for the same `(seed, workers, batch)`.

use alloc::vec::Vec;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::hashes::derive_seed;

/// Shape of a search: worker count, per-round batch size, and the maximum
/// number of candidates to examine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchPlan {
    pub workers: u32,
    pub batch: u32,
    pub budget: u64,
}

impl SearchPlan {
    pub fn sequential(budget: u64) -> Self {
        SearchPlan {
            workers: 1,
            batch: 64,
            budget,
        }
    }
}

/// The budget ran out before any candidate was accepted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BudgetExceeded {
    /// Candidates examined.
    pub attempts: u64,
    /// The analyzer's predicted expected attempts, when known.
    pub expected_attempts: Option<f64>,
}

impl core::fmt::Display for BudgetExceeded {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "search budget exhausted after {} attempts", self.attempts)?;
        if let Some(e) = self.expected_attempts {
            write!(f, " (predicted expectation {e:.1})")?;
        }
        Ok(())
    }
}

impl core::error::Error for BudgetExceeded {}

/// The per-worker candidate stream for worker `wid`.
pub fn worker_stream(base_seed: &[u8; 32], label: &str, wid: u32) -> ChaCha20Rng {
    let mut material = [0u8; 36];
    material[..32].copy_from_slice(base_seed);
    material[32..].copy_from_slice(&wid.to_be_bytes());
    ChaCha20Rng::from_seed(derive_seed(&material, label))
}

/// A found candidate and its 1-based position in the canonical order.
pub type SearchHit = (Vec<u8>, u64);

/// Evaluates candidates sequentially in the canonical order.
pub fn search_sequential(
    candidate_len: usize,
    base_seed: &[u8; 32],
    label: &str,
    plan: &SearchPlan,
    mut accept: impl FnMut(&[u8]) -> bool,
    expected_attempts: Option<f64>,
) -> Result<SearchHit, BudgetExceeded> {
    assert!(plan.workers >= 1 && plan.batch >= 1);
    let mut streams: Vec<ChaCha20Rng> = (0..plan.workers)
        .map(|wid| worker_stream(base_seed, label, wid))
        .collect();
    let mut buf = alloc::vec![0u8; candidate_len];
    let mut attempts = 0u64;
    loop {
        for stream in &mut streams {
            for _ in 0..plan.batch {
                if attempts >= plan.budget {
                    return Err(BudgetExceeded {
                        attempts,
                        expected_attempts,
                    });
                }
                stream.fill_bytes(&mut buf);
                attempts += 1;
                if accept(&buf) {
                    return Ok((buf, attempts));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_first_candidate_when_predicate_is_trivial() {
        let plan = SearchPlan::sequential(100);
        let (c, attempts) =
            search_sequential(4, &[0u8; 32], "t", &plan, |_| true, None).unwrap();
        assert_eq!(attempts, 1);
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn budget_is_respected() {
        let plan = SearchPlan {
            workers: 2,
            batch: 3,
            budget: 10,
        };
        let err = search_sequential(4, &[0u8; 32], "t", &plan, |_| false, Some(32.0)).unwrap_err();
        assert_eq!(err.attempts, 10);
        assert_eq!(err.expected_attempts, Some(32.0));
    }

    #[test]
    fn canonical_order_is_stable_per_worker_count() {
        let plan1 = SearchPlan {
            workers: 1,
            batch: 4,
            budget: 1 << 20,
        };
        let accept = |c: &[u8]| c[0] == 0x42;
        let a = search_sequential(2, &[7u8; 32], "t", &plan1, accept, None).unwrap();
        let b = search_sequential(2, &[7u8; 32], "t", &plan1, accept, None).unwrap();
        assert_eq!(a, b);
        // A different worker count is a different canonical order but still
        // deterministic.
        let plan4 = SearchPlan {
            workers: 4,
            batch: 4,
            budget: 1 << 20,
        };
        let c = search_sequential(2, &[7u8; 32], "t", &plan4, accept, None).unwrap();
        let d = search_sequential(2, &[7u8; 32], "t", &plan4, accept, None).unwrap();
        assert_eq!(c, d);
    }
}
