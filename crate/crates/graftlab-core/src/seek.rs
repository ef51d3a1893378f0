//! Path seeking: searches a randomizer whose message digest routes the
//! signing path through the grafted subtree. Each attempt costs one digest
//! expansion; the expected count is `2^(h - h_prime * L_w)` for an instance
//! at layer `L_w`.

use alloc::vec::Vec;

use crate::params::ParameterSet;
use crate::search::{search_sequential, BudgetExceeded, SearchPlan};
use crate::slh::{digest_split, path_prefix};

/// A seeking success: the randomizer and its canonical attempt count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSeekResult {
    pub randomizer: Vec<u8>,
    pub attempts: u64,
}

/// Bits that must match the grafted subtree index for an instance at
/// `layer`: the seeking cost exponent. `layer == d` is the degenerate
/// exponent-0 case where every randomizer routes correctly.
pub fn seek_exponent(params: &ParameterSet, layer: u32) -> u32 {
    debug_assert!(layer <= params.d);
    params.h - params.h_prime * layer
}

/// Whether a randomizer routes `message` through the grafted subtree.
pub fn seek_candidate(
    params: &ParameterSet,
    randomizer: &[u8],
    pk_seed: &[u8],
    pk_root: &[u8],
    message: &[u8],
    layer: u32,
    grafted_index: u128,
) -> bool {
    let split = digest_split(params, randomizer, pk_seed, pk_root, message);
    path_prefix(params, &split, layer) == grafted_index
}

/// Draws randomizers until the path prefix at `layer` equals
/// `grafted_index`. Reproducible for a fixed `(base_seed, plan)`.
#[allow(clippy::too_many_arguments)]
pub fn path_seek(
    params: &ParameterSet,
    pk_seed: &[u8],
    pk_root: &[u8],
    message: &[u8],
    layer: u32,
    grafted_index: u128,
    base_seed: &[u8; 32],
    plan: &SearchPlan,
) -> Result<PathSeekResult, BudgetExceeded> {
    debug_assert!(grafted_index < 1 << seek_exponent(params, layer));
    let expected = Some((1u128 << seek_exponent(params, layer).min(127)) as f64);
    let (randomizer, attempts) = search_sequential(
        params.n,
        base_seed,
        "seek",
        plan,
        |candidate| seek_candidate(params, candidate, pk_seed, pk_root, message, layer, grafted_index),
        expected,
    )?;
    Ok(PathSeekResult {
        randomizer,
        attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::parameter_set;
    use crate::slh::slh_keygen;

    #[test]
    fn exponents_match_the_closed_form() {
        let p128f = parameter_set("SHA2-128f").unwrap();
        assert_eq!(seek_exponent(p128f, 21), 3);
        assert_eq!(seek_exponent(p128f, 15), 21);
        let p256f = parameter_set("SHA2-256f").unwrap();
        assert_eq!(seek_exponent(p256f, 16), 4);
        let p192f = parameter_set("SHA2-192f").unwrap();
        assert_eq!(seek_exponent(p192f, 13), 27);
    }

    #[test]
    fn exponent_zero_accepts_the_first_randomizer() {
        // A 0-bit prefix constraint (grafted subtree covers the whole path
        // prefix) is satisfied by any randomizer.
        let p = parameter_set("toy-e2e").unwrap();
        let kp = slh_keygen(p, b"seek seed");
        assert_eq!(seek_exponent(p, p.d), 0);
        let res = path_seek(
            p,
            &kp.pk_seed,
            &kp.pk_root,
            b"m",
            p.d,
            0,
            &[0u8; 32],
            &SearchPlan::sequential(4),
        )
        .unwrap();
        assert_eq!(res.attempts, 1);
    }

    #[test]
    fn found_randomizer_routes_through_the_target() {
        let p = parameter_set("toy-e2e").unwrap();
        let kp = slh_keygen(p, b"seek seed 2");
        for target in 0u128..4 {
            let res = path_seek(
                p,
                &kp.pk_seed,
                &kp.pk_root,
                b"message",
                p.d - 1,
                target,
                &[3u8; 32],
                &SearchPlan::sequential(1 << 14),
            )
            .unwrap();
            assert!(seek_candidate(
                p,
                &res.randomizer,
                &kp.pk_seed,
                &kp.pk_root,
                b"message",
                p.d - 1,
                target
            ));
        }
    }
}
