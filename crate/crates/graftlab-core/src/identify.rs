//! Identifies exposed WOTS+ secret values from a group of observations at
//! one instance address.
//!
//! The operative method is the endpoint search: pick an anchor observation
//! whose digit positions are trusted (a verifying record qualifies), derive
//! the instance's chain endpoints from it, then for every other signature
//! component search the position `k` whose continuation
//! `chain(node, k, w-1-k)` reaches that endpoint. Components that match
//! nowhere mark their signature as discarded. A faulted record's actually
//! signed value falls out of the found positions, which is what makes
//! rejected signatures usable.
//!
//! The direct method trusts each observation's own cascade digits and keeps
//! the largest endpoint-consistent class. The two agree wherever every
//! observation's cascade value equals what it signed (in particular on every
//! honestly signed group); on faulted corpora the cascade of a corrupted
//! layer reproduces the true root rather than the corrupted one the layer
//! above signed, so only the search recovers those positions.

use alloc::vec::Vec;

use crate::fault::Corpus;
use crate::hashes::Node;
use crate::observe::{InstanceAddress, WotsObservation};
use crate::params::ParameterSet;
use crate::slh::ht_adrs;
use crate::wots::{chain, chain_adrs, digits_to_bytes, digits_value, wots_checksum};
use crate::xmss::XmssSignature;

/// How digit positions are recovered from a group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentifyMode {
    /// Endpoint search per component (default).
    Search,
    /// Trust each observation's cascade digits, validated against the
    /// group's endpoints.
    Direct,
}

/// Why a group yields no compromised instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotCompromised {
    /// A single observation exposes nothing.
    SingleObservation,
    /// All accepted observations signed the same value.
    NoDistinctValues,
    /// No anchor makes the group endpoint-consistent.
    CorruptGroup,
}

impl core::fmt::Display for NotCompromised {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NotCompromised::SingleObservation => write!(f, "single observation"),
            NotCompromised::NoDistinctValues => write!(f, "no distinct signed values"),
            NotCompromised::CorruptGroup => write!(f, "endpoint-inconsistent group"),
        }
    }
}

/// A WOTS+ instance observed signing at least two distinct values, with the
/// minimal exposed chain positions and everything needed to build a forgery
/// through it.
#[derive(Clone, Debug)]
pub struct CompromisedInstance {
    pub address: InstanceAddress,
    /// Minimal exposed position per chain.
    pub exposed_min: Vec<u8>,
    /// Chain value at `exposed_min[i]` for every chain.
    pub exposed_nodes: Vec<Node>,
    /// The instance's tree authentication path, from the reference record.
    pub auth_path: Vec<Node>,
    /// Verbatim XMSS signatures for layers above, from the reference record.
    pub upper_layers: Vec<XmssSignature>,
    /// Observations in the group (accepted or not).
    pub observation_count: usize,
    /// Observations whose components matched the endpoints.
    pub accepted_count: usize,
    /// Distinct signed values recovered from accepted observations.
    pub distinct_values: Vec<Vec<u8>>,
    /// Tweakable-hash calls spent identifying this instance.
    pub hash_ops: u64,
}

struct ChainSearcher<'a> {
    params: &'a ParameterSet,
    pk_seed: &'a [u8],
    address: InstanceAddress,
    hash_ops: u64,
}

impl<'a> ChainSearcher<'a> {
    fn new(params: &'a ParameterSet, pk_seed: &'a [u8], address: InstanceAddress) -> Self {
        ChainSearcher {
            params,
            pk_seed,
            address,
            hash_ops: 0,
        }
    }

    fn advance(&mut self, node: Node, from: u32, chain_index: usize) -> Node {
        let steps = self.params.w - 1 - from;
        self.hash_ops += steps as u64;
        let adrs = chain_adrs(
            &ht_adrs(self.address.layer, self.address.tree),
            self.address.keypair,
            chain_index as u32,
        );
        chain(self.params, node, from, steps, self.pk_seed, adrs)
            .expect("suffix advance stays in range")
    }

    /// Position whose continuation of `node` reaches `endpoint`, if any.
    fn find_position(&mut self, node: Node, endpoint: &Node, chain_index: usize) -> Option<u8> {
        (0..self.params.w)
            .find(|&k| self.advance(node, k, chain_index) == *endpoint)
            .map(|k| k as u8)
    }
}

fn positions_are_structural(params: &ParameterSet, positions: &[u8]) -> bool {
    wots_checksum(params, &positions[..params.ell1]) == positions[params.ell1..]
}

/// Accepted observation with its recovered digit positions.
struct Accepted {
    index: usize,
    positions: Vec<u8>,
}

fn finish(
    params: &ParameterSet,
    searcher: &mut ChainSearcher<'_>,
    group: &[WotsObservation],
    corpus: &Corpus,
    anchor_index: usize,
    endpoints: &[Node],
    accepted: Vec<Accepted>,
) -> Result<CompromisedInstance, NotCompromised> {
    let mut distinct_values: Vec<Vec<u8>> = Vec::new();
    for a in &accepted {
        let value = digits_to_bytes(&a.positions[..params.ell1], params.lg_w);
        if !distinct_values.contains(&value) {
            distinct_values.push(value);
        }
    }
    if distinct_values.len() < 2 {
        return Err(NotCompromised::NoDistinctValues);
    }

    let mut exposed_min = Vec::with_capacity(params.ell);
    let mut exposed_nodes = Vec::with_capacity(params.ell);
    for i in 0..params.ell {
        let best = accepted
            .iter()
            .min_by_key(|a| a.positions[i])
            .expect("accepted set is non-empty");
        exposed_min.push(best.positions[i]);
        exposed_nodes.push(group[best.index].wots_sig.nodes[i]);
    }

    // The exposed nodes advanced to the chain ends must reproduce the
    // instance's endpoints exactly.
    for i in 0..params.ell {
        if searcher.advance(exposed_nodes[i], exposed_min[i] as u32, i) != endpoints[i] {
            return Err(NotCompromised::CorruptGroup);
        }
    }

    let anchor = &group[anchor_index];
    let upper_layers = corpus.records[anchor.record].signature.ht_sigs
        [anchor.address.layer as usize + 1..]
        .to_vec();
    Ok(CompromisedInstance {
        address: anchor.address,
        exposed_min,
        exposed_nodes,
        auth_path: anchor.auth_path.clone(),
        upper_layers,
        observation_count: group.len(),
        accepted_count: accepted.len(),
        distinct_values,
        hash_ops: searcher.hash_ops,
    })
}

/// Identifies the exposed secrets of one observation group.
///
/// All observations must share one instance address; `corpus` supplies the
/// reference record's upper layers.
pub fn identify_secrets(
    params: &ParameterSet,
    pk_seed: &[u8],
    group: &[WotsObservation],
    corpus: &Corpus,
    mode: IdentifyMode,
) -> Result<CompromisedInstance, NotCompromised> {
    if group.len() < 2 {
        return Err(NotCompromised::SingleObservation);
    }
    let address = group[0].address;
    debug_assert!(group.iter().all(|o| o.address == address));

    // Anchor preference: verifying records first, then corpus order.
    let mut anchor_order: Vec<usize> = (0..group.len()).collect();
    anchor_order.sort_by_key(|&i| (!group[i].verifies, group[i].record));

    // Anchors that accept two or more observations but expose nothing are
    // reported as such rather than as corruption.
    let mut verdict = NotCompromised::CorruptGroup;
    let mut searcher = ChainSearcher::new(params, pk_seed, address);

    match mode {
        IdentifyMode::Search => {
            for &anchor_index in &anchor_order {
                let anchor = &group[anchor_index];
                if !positions_are_structural(params, &anchor.digits) {
                    continue;
                }
                let endpoints: Vec<Node> = (0..params.ell)
                    .map(|i| {
                        searcher.advance(anchor.wots_sig.nodes[i], anchor.digits[i] as u32, i)
                    })
                    .collect();

                let mut accepted = Vec::new();
                for (index, obs) in group.iter().enumerate() {
                    let positions = if index == anchor_index {
                        Some(anchor.digits.clone())
                    } else {
                        (0..params.ell)
                            .map(|i| {
                                searcher.find_position(obs.wots_sig.nodes[i], &endpoints[i], i)
                            })
                            .collect::<Option<Vec<u8>>>()
                    };
                    // Discard signatures with any unmatched component or a
                    // broken message/checksum structure.
                    if let Some(positions) = positions {
                        if positions_are_structural(params, &positions) {
                            accepted.push(Accepted { index, positions });
                        }
                    }
                }
                if accepted.len() >= 2 {
                    match finish(params, &mut searcher, group, corpus, anchor_index, &endpoints, accepted)
                    {
                        Ok(instance) => return Ok(instance),
                        Err(e) => verdict = e,
                    }
                }
            }
            Err(verdict)
        }
        IdentifyMode::Direct => {
            // Every observation implies a set of endpoints from its own
            // digits; keep the class agreeing with the anchor's, preferring
            // anchors from verifying records.
            let implied: Vec<Option<Vec<Node>>> = group
                .iter()
                .map(|obs| {
                    if !positions_are_structural(params, &obs.digits) {
                        return None;
                    }
                    Some(
                        (0..params.ell)
                            .map(|i| searcher.advance(obs.wots_sig.nodes[i], obs.digits[i] as u32, i))
                            .collect(),
                    )
                })
                .collect();
            for &anchor_index in &anchor_order {
                let Some(endpoints) = implied[anchor_index].clone() else {
                    continue;
                };
                let accepted: Vec<Accepted> = group
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| implied[*i].as_deref() == Some(endpoints.as_slice()))
                    .map(|(i, obs)| Accepted {
                        index: i,
                        positions: obs.digits.clone(),
                    })
                    .collect();
                if accepted.len() >= 2 {
                    match finish(params, &mut searcher, group, corpus, anchor_index, &endpoints, accepted)
                    {
                        Ok(instance) => return Ok(instance),
                        Err(e) => verdict = e,
                    }
                }
            }
            Err(verdict)
        }
    }
}

/// The layer-(L_w - 1) subtree index fixed by a compromised leaf's position:
/// `tree_address * 2^h_prime + keypair`.
pub fn grafted_subtree_index(params: &ParameterSet, address: &InstanceAddress) -> u128 {
    ((address.tree as u128) << params.h_prime) | address.keypair as u128
}

/// Compressed checksum of positions for reporting: the integer value of the
/// minimal exposed message digits.
pub fn exposed_message_value(params: &ParameterSet, exposed_min: &[u8]) -> u64 {
    digits_value(&exposed_min[..params.ell1], params.w)
}
