//! Turns a signing corpus into per-instance WOTS+ observations: for every
//! record and every hypertree layer, the candidate signed value is
//! recomputed by cascading `fors_pk_from_sig` / `xmss_pk_from_sig` upward
//! through the record's own components, and the observations are grouped by
//! instance address.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::adrs::AdrsType;
use crate::fault::Corpus;
use crate::fors::fors_pk_from_sig;
use crate::hashes::Node;
use crate::params::ParameterSet;
use crate::slh::{digest_split, ht_adrs, layer_address, slh_verify};
use crate::wots::{wots_digits, WotsSignature};
use crate::xmss::xmss_pk_from_sig;

/// Identifies one WOTS+ key pair in the hypertree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstanceAddress {
    pub layer: u32,
    pub tree: u64,
    pub keypair: u32,
}

/// One WOTS+ signature as seen at an instance, with the cascade-recomputed
/// candidate of the value it signed.
#[derive(Clone, Debug, PartialEq)]
pub struct WotsObservation {
    pub address: InstanceAddress,
    /// Candidate signed value recomputed from the record's lower components.
    /// Exact for records that verify; a faulted layer's actual signed value
    /// is recovered later by endpoint search.
    pub signed_value: Vec<u8>,
    /// Digit positions of `signed_value`.
    pub digits: Vec<u8>,
    pub wots_sig: WotsSignature,
    /// The instance's tree authentication path carried by the same record.
    pub auth_path: Vec<Node>,
    /// Ordinal of the source record in the corpus.
    pub record: usize,
    /// Whether the whole source record verifies under the victim key.
    pub verifies: bool,
}

/// Groups observations by instance address. Malformed records are skipped;
/// the second component counts them.
pub fn extract_observations(
    params: &ParameterSet,
    corpus: &Corpus,
) -> (BTreeMap<InstanceAddress, Vec<WotsObservation>>, usize) {
    let mut groups: BTreeMap<InstanceAddress, Vec<WotsObservation>> = BTreeMap::new();
    let mut skipped = 0usize;

    'records: for (ordinal, record) in corpus.records.iter().enumerate() {
        let sig = &record.signature;
        if sig.ht_sigs.len() != params.d as usize
            || sig
                .ht_sigs
                .iter()
                .any(|s| s.wots_sig.nodes.len() != params.ell || s.auth_path.len() != params.h_prime as usize)
        {
            skipped += 1;
            continue;
        }
        let verifies = slh_verify(params, &record.message, sig, &corpus.pk_seed, &corpus.pk_root);
        let split = digest_split(
            params,
            &record.randomizer,
            &corpus.pk_seed,
            &corpus.pk_root,
            &record.message,
        );
        let mut fadrs = ht_adrs(0, split.tree_index);
        fadrs.set_type_and_clear(AdrsType::ForsTree);
        fadrs.set_keypair(split.leaf_index);
        let Ok(mut value) = fors_pk_from_sig(
            params,
            &sig.fors_sig,
            &split.fors_indices,
            &corpus.pk_seed,
            &fadrs,
        ) else {
            skipped += 1;
            continue;
        };

        let mut observations = Vec::with_capacity(params.d as usize);
        for layer in 0..params.d {
            let (tree, leaf) = layer_address(params, &split, layer);
            let signed_value = value.as_bytes().to_vec();
            let Ok(digits) = wots_digits(params, &signed_value) else {
                skipped += 1;
                continue 'records;
            };
            let xs = &sig.ht_sigs[layer as usize];
            observations.push(WotsObservation {
                address: InstanceAddress {
                    layer,
                    tree,
                    keypair: leaf,
                },
                signed_value,
                digits,
                wots_sig: xs.wots_sig.clone(),
                auth_path: xs.auth_path.clone(),
                record: ordinal,
                verifies,
            });
            let adrs = ht_adrs(layer, tree);
            match xmss_pk_from_sig(params, xs, value.as_bytes(), leaf as u64, &corpus.pk_seed, &adrs) {
                Ok(next) => value = next,
                Err(_) => {
                    skipped += 1;
                    continue 'records;
                }
            }
        }
        for obs in observations {
            groups.entry(obs.address).or_default().push(obs);
        }
    }
    (groups, skipped)
}
