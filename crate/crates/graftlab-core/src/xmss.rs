//! XMSS Merkle trees over WOTS+ leaves.
//!
//! The root computation is a left-subtree-first depth-first recursion with a
//! per-level `lnode` holding slot: the left child value is parked in its
//! parent's frame while the right subtree is computed. The [`NodeVisitor`]
//! hook exposes exactly those slots (plus node completions), which is what
//! the fault harness attaches to. Signing runs one full traversal for the
//! root handed to the next hypertree layer, then separate subtree
//! traversals for the authentication path.

use alloc::vec::Vec;

use crate::adrs::{Adrs, AdrsType};
use crate::hashes::{thash, Node};
use crate::params::ParameterSet;
use crate::wots::{wots_pk_from_sig, wots_pkgen, wots_sign, WotsSignature};
use crate::RangeError;

/// An XMSS signature: WOTS+ signature plus `h_prime` authentication nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XmssSignature {
    pub wots_sig: WotsSignature,
    pub auth_path: Vec<Node>,
}

/// Observation points inside the tree traversal.
///
/// `on_lnode_slot` fires after a left subtree returns and before the parent
/// hash combines it; mutating `lnode` there corrupts the value the parent
/// consumes (and everything above it), while already-returned copies keep
/// their clean value. `on_node` fires when a node value is complete, before
/// it is returned to the caller.
pub trait NodeVisitor {
    /// `height` is the parent frame's height; `lnode` holds node
    /// `(2 * index, height - 1)`.
    fn on_lnode_slot(&mut self, height: u32, index: u64, lnode: &mut Node) {
        let _ = (height, index, lnode);
    }

    fn on_node(&mut self, height: u32, index: u64, node: &Node) {
        let _ = (height, index, node);
    }
}

/// Visitor that observes nothing.
pub struct NoopVisitor;

impl NodeVisitor for NoopVisitor {}

fn node_recursive<V: NodeVisitor>(
    params: &ParameterSet,
    sk_seed: &[u8],
    i: u64,
    z: u32,
    pk_seed: &[u8],
    adrs: &Adrs,
    visitor: &mut V,
) -> Node {
    let node = if z == 0 {
        let mut a = *adrs;
        a.set_type_and_clear(AdrsType::WotsHash);
        a.set_keypair(i as u32);
        wots_pkgen(params, sk_seed, pk_seed, &a)
    } else {
        let mut lnode = node_recursive(params, sk_seed, 2 * i, z - 1, pk_seed, adrs, visitor);
        visitor.on_lnode_slot(z, i, &mut lnode);
        let rnode = node_recursive(params, sk_seed, 2 * i + 1, z - 1, pk_seed, adrs, visitor);
        let mut a = *adrs;
        a.set_type_and_clear(AdrsType::Tree);
        a.set_tree_height(z);
        a.set_tree_index(i as u32);
        thash(params, pk_seed, &a, &[lnode.as_bytes(), rnode.as_bytes()])
    };
    visitor.on_node(z, i, &node);
    node
}

/// Computes the Merkle node at height `z`, index `i`, with traversal hooks.
pub fn xmss_node_with<V: NodeVisitor>(
    params: &ParameterSet,
    sk_seed: &[u8],
    i: u64,
    z: u32,
    pk_seed: &[u8],
    adrs: &Adrs,
    visitor: &mut V,
) -> Result<Node, RangeError> {
    if z > params.h_prime {
        return Err(RangeError {
            what: "xmss node height",
            value: z as u64,
            min: 0,
            max: params.h_prime as u64,
        });
    }
    let max_index = 1u64 << (params.h_prime - z);
    if i >= max_index {
        return Err(RangeError {
            what: "xmss node index",
            value: i,
            min: 0,
            max: max_index - 1,
        });
    }
    Ok(node_recursive(params, sk_seed, i, z, pk_seed, adrs, visitor))
}

/// Computes the Merkle node at height `z`, index `i`.
pub fn xmss_node(
    params: &ParameterSet,
    sk_seed: &[u8],
    i: u64,
    z: u32,
    pk_seed: &[u8],
    adrs: &Adrs,
) -> Result<Node, RangeError> {
    xmss_node_with(params, sk_seed, i, z, pk_seed, adrs, &mut NoopVisitor)
}

/// Signs `value` with leaf `leaf` and returns the signature together with
/// the tree root handed to the next hypertree layer.
///
/// The root comes from its own full traversal, run first; the
/// authentication nodes come from separate subtree traversals. Every slot
/// of the root traversal feeds the returned root, so a corruption there
/// reaches the next layer while the signature components stay clean. A
/// corruption inside an authentication subtree would instead travel with
/// the signature and cancel out at verification.
pub fn xmss_sign_with<V: NodeVisitor>(
    params: &ParameterSet,
    value: &[u8],
    sk_seed: &[u8],
    leaf: u64,
    pk_seed: &[u8],
    adrs: &Adrs,
    visitor: &mut V,
) -> Result<(XmssSignature, Node), RangeError> {
    if leaf >= params.leaves_per_tree() {
        return Err(RangeError {
            what: "xmss leaf",
            value: leaf,
            min: 0,
            max: params.leaves_per_tree() - 1,
        });
    }
    let root = node_recursive(params, sk_seed, 0, params.h_prime, pk_seed, adrs, visitor);
    let auth_path: Vec<Node> = (0..params.h_prime)
        .map(|z| node_recursive(params, sk_seed, (leaf >> z) ^ 1, z, pk_seed, adrs, visitor))
        .collect();

    let mut leaf_adrs = *adrs;
    leaf_adrs.set_type_and_clear(AdrsType::WotsHash);
    leaf_adrs.set_keypair(leaf as u32);
    let wots_sig = wots_sign(params, value, sk_seed, pk_seed, &leaf_adrs)?;
    Ok((XmssSignature { wots_sig, auth_path }, root))
}

/// Signs `value` with leaf `leaf`.
pub fn xmss_sign(
    params: &ParameterSet,
    value: &[u8],
    sk_seed: &[u8],
    leaf: u64,
    pk_seed: &[u8],
    adrs: &Adrs,
) -> Result<(XmssSignature, Node), RangeError> {
    xmss_sign_with(params, value, sk_seed, leaf, pk_seed, adrs, &mut NoopVisitor)
}

/// Recomputes the candidate tree root implied by a signature on `value` at
/// leaf `leaf`. Makes no validity judgment.
pub fn xmss_pk_from_sig(
    params: &ParameterSet,
    sig: &XmssSignature,
    value: &[u8],
    leaf: u64,
    pk_seed: &[u8],
    adrs: &Adrs,
) -> Result<Node, RangeError> {
    if leaf >= params.leaves_per_tree() {
        return Err(RangeError {
            what: "xmss leaf",
            value: leaf,
            min: 0,
            max: params.leaves_per_tree() - 1,
        });
    }
    if sig.auth_path.len() != params.h_prime as usize {
        return Err(RangeError {
            what: "auth path length",
            value: sig.auth_path.len() as u64,
            min: params.h_prime as u64,
            max: params.h_prime as u64,
        });
    }
    let mut leaf_adrs = *adrs;
    leaf_adrs.set_type_and_clear(AdrsType::WotsHash);
    leaf_adrs.set_keypair(leaf as u32);
    let mut node = wots_pk_from_sig(params, &sig.wots_sig, value, pk_seed, &leaf_adrs)?;

    let mut a = *adrs;
    for z in 0..params.h_prime {
        a.set_type_and_clear(AdrsType::Tree);
        a.set_tree_height(z + 1);
        a.set_tree_index((leaf >> (z + 1)) as u32);
        let sibling = &sig.auth_path[z as usize];
        node = if (leaf >> z) & 1 == 0 {
            thash(params, pk_seed, &a, &[node.as_bytes(), sibling.as_bytes()])
        } else {
            thash(params, pk_seed, &a, &[sibling.as_bytes(), node.as_bytes()])
        };
    }
    Ok(node)
}
