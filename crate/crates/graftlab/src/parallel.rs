//! Multi-worker driver for the seeded candidate search. Workers evaluate
//! their own candidate streams in rounds; a shared target round stops
//! everyone once a hit's round is fully covered, and the winner is resolved
//! by canonical position, so results (candidate and attempt count) are
//! byte-identical to the sequential driver for the same plan.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc;

use graftlab_core::search::{worker_stream, BudgetExceeded, SearchHit, SearchPlan};
use rand_core::RngCore;

struct RoundReport {
    worker: u32,
    round: u64,
    /// (canonical position, candidate) for accepted candidates this round.
    hits: Vec<(u64, Vec<u8>)>,
}

/// Parallel equivalent of `search_sequential`: same canonical order, same
/// budget semantics, first acceptance in canonical order wins.
pub fn search_parallel<F>(
    candidate_len: usize,
    base_seed: &[u8; 32],
    label: &str,
    plan: &SearchPlan,
    accept: F,
    expected_attempts: Option<f64>,
) -> Result<SearchHit, BudgetExceeded>
where
    F: Fn(&[u8]) -> bool + Sync,
{
    assert!(plan.workers >= 1 && plan.batch >= 1);
    let workers = plan.workers as u64;
    let batch = plan.batch as u64;
    let per_round = workers * batch;
    // Rounds 0..=last_round cover the budget; the final round is truncated
    // by canonical position inside each worker.
    let last_round = if plan.budget == 0 {
        return Err(BudgetExceeded {
            attempts: 0,
            expected_attempts,
        });
    } else {
        (plan.budget - 1) / per_round
    };
    let target_round = AtomicU64::new(last_round);
    let (tx, rx) = mpsc::channel::<RoundReport>();

    let winner = std::thread::scope(|scope| {
        for wid in 0..plan.workers {
            let tx = tx.clone();
            let accept = &accept;
            let target_round = &target_round;
            let mut stream = worker_stream(base_seed, label, wid);
            scope.spawn(move || {
                let mut buf = vec![0u8; candidate_len];
                let mut round = 0u64;
                while round <= target_round.load(Ordering::Acquire) {
                    let mut hits = Vec::new();
                    for b in 0..batch {
                        let position = round * per_round + wid as u64 * batch + b + 1;
                        if position > plan.budget {
                            break;
                        }
                        stream.fill_bytes(&mut buf);
                        if accept(&buf) {
                            hits.push((position, buf.clone()));
                        }
                    }
                    if tx
                        .send(RoundReport {
                            worker: wid,
                            round,
                            hits,
                        })
                        .is_err()
                    {
                        break;
                    }
                    round += 1;
                }
            });
        }
        drop(tx);

        let mut completed = vec![0u64; plan.workers as usize]; // rounds finished per worker
        let mut best: Option<(u64, Vec<u8>)> = None;
        while let Ok(report) = rx.recv() {
            completed[report.worker as usize] = report.round + 1;
            for (position, candidate) in report.hits {
                if best.as_ref().is_none_or(|(p, _)| position < *p) {
                    best = Some((position, candidate));
                }
            }
            if let Some((best_pos, _)) = &best {
                // No earlier candidate can still appear once every worker
                // has finished the winning round.
                let hit_round = (best_pos - 1) / per_round;
                target_round.fetch_min(hit_round, Ordering::Release);
                if completed.iter().all(|&c| c > hit_round) {
                    break;
                }
            }
        }
        best
    });

    match winner {
        Some((position, candidate)) => Ok((candidate, position)),
        None => Err(BudgetExceeded {
            attempts: plan.budget,
            expected_attempts,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use graftlab_core::search::search_sequential;

    fn plans() -> Vec<SearchPlan> {
        vec![
            SearchPlan {
                workers: 1,
                batch: 16,
                budget: 5000,
            },
            SearchPlan {
                workers: 2,
                batch: 8,
                budget: 5000,
            },
            SearchPlan {
                workers: 4,
                batch: 32,
                budget: 5000,
            },
            SearchPlan {
                workers: 3,
                batch: 5,
                budget: 61, // truncated final round
            },
        ]
    }

    #[test]
    fn parallel_equals_sequential_on_hits_and_misses() {
        for plan in plans() {
            for threshold in [255u8, 16, 2, 0] {
                let accept = move |c: &[u8]| c[0] < threshold;
                let seq = search_sequential(3, &[9u8; 32], "eq", &plan, accept, Some(1.0));
                let par = search_parallel(3, &[9u8; 32], "eq", &plan, accept, Some(1.0));
                match (seq, par) {
                    (Ok(a), Ok(b)) => assert_eq!(a, b, "plan {plan:?} t={threshold}"),
                    (Err(a), Err(b)) => assert_eq!(a, b, "plan {plan:?} t={threshold}"),
                    (a, b) => panic!("drivers disagree: {a:?} vs {b:?}"),
                }
            }
        }
    }

    #[test]
    fn zero_budget_is_an_immediate_miss() {
        let plan = SearchPlan {
            workers: 2,
            batch: 4,
            budget: 0,
        };
        let err = search_parallel(2, &[0u8; 32], "z", &plan, |_| true, None).unwrap_err();
        assert_eq!(err.attempts, 0);
    }
}
