//! FORS few-time signatures: `k_fors` Merkle trees of height `a`; a
//! signature reveals one secret leaf preimage per tree plus its
//! authentication path, and the public key compresses the tree roots.

use alloc::vec::Vec;

use crate::adrs::{Adrs, AdrsType};
use crate::hashes::{thash, Node};
use crate::params::ParameterSet;
use crate::RangeError;

/// Per-tree revealed secret and authentication path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForsSignature {
    pub elements: Vec<ForsElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForsElement {
    pub secret: Node,
    pub auth_path: Vec<Node>,
}

fn fors_secret(
    params: &ParameterSet,
    sk_seed: &[u8],
    pk_seed: &[u8],
    adrs: &Adrs,
    leaf_global: u64,
) -> Node {
    let keypair = adrs.keypair();
    let mut a = *adrs;
    a.set_type_and_clear(AdrsType::ForsPrf);
    a.set_keypair(keypair);
    a.set_tree_height(0);
    a.set_tree_index(leaf_global as u32);
    thash(params, pk_seed, &a, &[sk_seed])
}

fn fors_leaf(params: &ParameterSet, pk_seed: &[u8], adrs: &Adrs, leaf_global: u64, sk: &Node) -> Node {
    let mut a = *adrs;
    a.set_type_and_clear(AdrsType::ForsTree);
    a.set_keypair(adrs.keypair());
    a.set_tree_height(0);
    a.set_tree_index(leaf_global as u32);
    thash(params, pk_seed, &a, &[sk.as_bytes()])
}

/// Merkle node `i` at height `z` of the FORS forest (indices are global
/// across trees, as in the address layout).
fn fors_node(
    params: &ParameterSet,
    sk_seed: &[u8],
    i: u64,
    z: u32,
    pk_seed: &[u8],
    adrs: &Adrs,
) -> Node {
    if z == 0 {
        let sk = fors_secret(params, sk_seed, pk_seed, adrs, i);
        fors_leaf(params, pk_seed, adrs, i, &sk)
    } else {
        let lnode = fors_node(params, sk_seed, 2 * i, z - 1, pk_seed, adrs);
        let rnode = fors_node(params, sk_seed, 2 * i + 1, z - 1, pk_seed, adrs);
        let mut a = *adrs;
        a.set_type_and_clear(AdrsType::ForsTree);
        a.set_keypair(adrs.keypair());
        a.set_tree_height(z);
        a.set_tree_index(i as u32);
        thash(params, pk_seed, &a, &[lnode.as_bytes(), rnode.as_bytes()])
    }
}

fn compress_roots(params: &ParameterSet, pk_seed: &[u8], adrs: &Adrs, roots: &[Node]) -> Node {
    let mut a = *adrs;
    a.set_type_and_clear(AdrsType::ForsRoots);
    a.set_keypair(adrs.keypair());
    let parts: Vec<&[u8]> = roots.iter().map(|n| n.as_bytes()).collect();
    thash(params, pk_seed, &a, &parts)
}

fn check_indices(params: &ParameterSet, indices: &[u32]) -> Result<(), RangeError> {
    if indices.len() != params.k_fors as usize {
        return Err(RangeError {
            what: "fors index count",
            value: indices.len() as u64,
            min: params.k_fors as u64,
            max: params.k_fors as u64,
        });
    }
    for &idx in indices {
        if u64::from(idx) >= 1 << params.a {
            return Err(RangeError {
                what: "fors index",
                value: idx as u64,
                min: 0,
                max: (1 << params.a) - 1,
            });
        }
    }
    Ok(())
}

/// The keygen-time FORS public key (compressed tree roots).
pub fn fors_pk(params: &ParameterSet, sk_seed: &[u8], pk_seed: &[u8], adrs: &Adrs) -> Node {
    let roots: Vec<Node> = (0..params.k_fors as u64)
        .map(|t| fors_node(params, sk_seed, t, params.a, pk_seed, adrs))
        .collect();
    compress_roots(params, pk_seed, adrs, &roots)
}

/// Signs one digest index per tree.
pub fn fors_sign(
    params: &ParameterSet,
    indices: &[u32],
    sk_seed: &[u8],
    pk_seed: &[u8],
    adrs: &Adrs,
) -> Result<ForsSignature, RangeError> {
    check_indices(params, indices)?;
    let mut elements = Vec::with_capacity(params.k_fors as usize);
    for (t, &idx) in indices.iter().enumerate() {
        let t = t as u64;
        let leaf_global = t * (1 << params.a) + idx as u64;
        let secret = fors_secret(params, sk_seed, pk_seed, adrs, leaf_global);
        let mut auth_path = Vec::with_capacity(params.a as usize);
        for z in 0..params.a {
            let sibling = t * (1 << (params.a - z)) + ((idx as u64 >> z) ^ 1);
            auth_path.push(fors_node(params, sk_seed, sibling, z, pk_seed, adrs));
        }
        elements.push(ForsElement { secret, auth_path });
    }
    Ok(ForsSignature { elements })
}

/// Recomputes the FORS public key implied by a signature on `indices`.
pub fn fors_pk_from_sig(
    params: &ParameterSet,
    sig: &ForsSignature,
    indices: &[u32],
    pk_seed: &[u8],
    adrs: &Adrs,
) -> Result<Node, RangeError> {
    check_indices(params, indices)?;
    if sig.elements.len() != params.k_fors as usize {
        return Err(RangeError {
            what: "fors element count",
            value: sig.elements.len() as u64,
            min: params.k_fors as u64,
            max: params.k_fors as u64,
        });
    }
    let mut roots = Vec::with_capacity(params.k_fors as usize);
    for (t, (element, &idx)) in sig.elements.iter().zip(indices).enumerate() {
        if element.auth_path.len() != params.a as usize {
            return Err(RangeError {
                what: "fors auth path length",
                value: element.auth_path.len() as u64,
                min: params.a as u64,
                max: params.a as u64,
            });
        }
        let t = t as u64;
        let leaf_global = t * (1 << params.a) + idx as u64;
        let mut node = fors_leaf(params, pk_seed, adrs, leaf_global, &element.secret);
        let mut a = *adrs;
        for z in 0..params.a {
            a.set_type_and_clear(AdrsType::ForsTree);
            a.set_keypair(adrs.keypair());
            a.set_tree_height(z + 1);
            a.set_tree_index((leaf_global >> (z + 1)) as u32);
            let sibling = &element.auth_path[z as usize];
            node = if (idx as u64 >> z) & 1 == 0 {
                thash(params, pk_seed, &a, &[node.as_bytes(), sibling.as_bytes()])
            } else {
                thash(params, pk_seed, &a, &[sibling.as_bytes(), node.as_bytes()])
            };
        }
        roots.push(node);
    }
    Ok(compress_roots(params, pk_seed, adrs, &roots))
}
