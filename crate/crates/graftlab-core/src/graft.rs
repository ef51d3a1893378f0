//! Tree grafting: searches an attacker seed whose subtree root has digit
//! positions dominating the exposed minima of a compromised WOTS+ instance,
//! so the instance's leaked chain values can sign it.

use alloc::vec::Vec;

use crate::adrs::AdrsType;
use crate::fors::fors_pk;
use crate::hashes::Node;
use crate::identify::CompromisedInstance;
use crate::params::ParameterSet;
use crate::search::{search_sequential, BudgetExceeded, SearchPlan};
use crate::slh::ht_adrs;
use crate::wots::wots_digits;
use crate::xmss::xmss_node;

/// A grafting success: the seed, the grafted root and its digits, the fixed
/// subtree index below the compromised leaf, and the canonical attempt
/// count.
#[derive(Clone, Debug, PartialEq)]
pub struct GraftResult {
    pub sk_seed: Vec<u8>,
    pub root: Node,
    /// Digit positions of the grafted root, message digits then checksum.
    pub digits: Vec<u8>,
    pub grafted_index: u128,
    pub attempts: u64,
}

/// Every digit at least its exposed minimum.
pub fn dominates(digits: &[u8], exposed_min: &[u8]) -> bool {
    digits.iter().zip(exposed_min).all(|(d, m)| d >= m)
}

/// Root the compromised instance would sign for a candidate seed: the XMSS
/// tree one layer below it (or the FORS public key when the instance sits
/// at layer 0), computed at the true address of the grafted subtree.
pub fn grafted_root(
    params: &ParameterSet,
    sk_seed: &[u8],
    pk_seed: &[u8],
    instance_layer: u32,
    grafted_index: u128,
) -> Node {
    if instance_layer == 0 {
        let tree = (grafted_index >> params.h_prime) as u64;
        let keypair = (grafted_index & ((1 << params.h_prime) - 1)) as u32;
        let mut adrs = ht_adrs(0, tree);
        adrs.set_type_and_clear(AdrsType::ForsTree);
        adrs.set_keypair(keypair);
        fors_pk(params, sk_seed, pk_seed, &adrs)
    } else {
        let adrs = ht_adrs(instance_layer - 1, grafted_index as u64);
        xmss_node(params, sk_seed, 0, params.h_prime, pk_seed, &adrs)
            .expect("root node is in range")
    }
}

/// Whether one candidate seed grafts onto the exposed minima.
pub fn graft_candidate(
    params: &ParameterSet,
    sk_seed: &[u8],
    pk_seed: &[u8],
    instance_layer: u32,
    grafted_index: u128,
    exposed_min: &[u8],
) -> Option<(Node, Vec<u8>)> {
    let root = grafted_root(params, sk_seed, pk_seed, instance_layer, grafted_index);
    let digits = wots_digits(params, root.as_bytes()).expect("root has n bytes");
    dominates(&digits, exposed_min).then_some((root, digits))
}

/// Draws seeds until one grafts. Reproducible for a fixed
/// `(base_seed, plan)`; `expected_attempts` only enriches the budget error.
pub fn graft_search(
    params: &ParameterSet,
    instance: &CompromisedInstance,
    pk_seed: &[u8],
    base_seed: &[u8; 32],
    plan: &SearchPlan,
    expected_attempts: Option<f64>,
) -> Result<GraftResult, BudgetExceeded> {
    let grafted_index = crate::identify::grafted_subtree_index(params, &instance.address);
    let layer = instance.address.layer;
    let (seed, attempts) = search_sequential(
        params.n,
        base_seed,
        "graft",
        plan,
        |candidate| {
            graft_candidate(
                params,
                candidate,
                pk_seed,
                layer,
                grafted_index,
                &instance.exposed_min,
            )
            .is_some()
        },
        expected_attempts,
    )?;
    let (root, digits) = graft_candidate(
        params,
        &seed,
        pk_seed,
        layer,
        grafted_index,
        &instance.exposed_min,
    )
    .expect("accepted candidate grafts");
    debug_assert!(dominates(&digits, &instance.exposed_min));
    Ok(GraftResult {
        sk_seed: seed,
        root,
        digits,
        grafted_index,
        attempts,
    })
}
