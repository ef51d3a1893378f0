//! SLH-DSA keygen, signing, and verification over the FORS + hypertree
//! stack, plus the digest split that routes a signature through the
//! hypertree and the byte-exact signature serialization.

use alloc::vec::Vec;

use crate::adrs::{Adrs, AdrsType};
use crate::fors::{fors_pk_from_sig, fors_sign, ForsElement, ForsSignature};
use crate::hashes::{derive_seed, h_msg, prf_msg, Node};
use crate::params::ParameterSet;
use crate::wots::WotsSignature;
use crate::xmss::{xmss_node, xmss_pk_from_sig, xmss_sign_with, NodeVisitor, XmssSignature};

/// Signing mode. Deterministic mode pins the randomizer to `PK.seed`;
/// randomized mode derives it from the PRF key, caller entropy, and the
/// message.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignMode {
    Deterministic,
    Randomized,
}

impl SignMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SignMode::Deterministic => "det",
            SignMode::Randomized => "rand",
        }
    }
}

/// SLH-DSA key material.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPair {
    pub sk_seed: Vec<u8>,
    pub sk_prf: Vec<u8>,
    pub pk_seed: Vec<u8>,
    pub pk_root: Vec<u8>,
}

/// A full SLH-DSA signature: randomizer, FORS signature, and one XMSS
/// signature per hypertree layer, bottom (layer 0) to top (layer d-1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlhSignature {
    pub randomizer: Vec<u8>,
    pub fors_sig: ForsSignature,
    pub ht_sigs: Vec<XmssSignature>,
}

/// Where a message digest routes through FORS and the hypertree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigestSplit {
    pub fors_indices: Vec<u32>,
    pub tree_index: u64,
    pub leaf_index: u32,
}

/// Malformed serialized material.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormatError {
    pub what: &'static str,
    pub expected: usize,
    pub got: usize,
}

impl core::fmt::Display for FormatError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "malformed {}: expected {} bytes, got {}",
            self.what, self.expected, self.got
        )
    }
}

impl core::error::Error for FormatError {}

fn read_bits(bytes: &[u8], bit_offset: usize, count: u32) -> u64 {
    let mut v = 0u64;
    for b in 0..count as usize {
        let bit = bit_offset + b;
        v = (v << 1) | ((bytes[bit / 8] >> (7 - bit % 8)) & 1) as u64;
    }
    v
}

fn be_value_mod_bits(bytes: &[u8], bits: u32) -> u128 {
    let mut v = 0u128;
    for &b in bytes {
        v = (v << 8) | b as u128;
    }
    if bits >= 128 {
        v
    } else {
        v & ((1u128 << bits) - 1)
    }
}

/// Expands `H_msg(R, pk_seed, pk_root, message)` and partitions it into FORS
/// indices, a tree index of `h - h_prime` bits, and a leaf index of
/// `h_prime` bits.
pub fn digest_split(
    params: &ParameterSet,
    randomizer: &[u8],
    pk_seed: &[u8],
    pk_root: &[u8],
    message: &[u8],
) -> DigestSplit {
    let md = h_msg(params, randomizer, pk_seed, pk_root, message);
    let fors_bytes = ((params.k_fors * params.a) as usize).div_ceil(8);
    let tree_bits = params.h - params.h_prime;
    let tree_bytes = (tree_bits as usize).div_ceil(8);
    let leaf_bytes = (params.h_prime as usize).div_ceil(8);

    let fors_indices = (0..params.k_fors as usize)
        .map(|t| read_bits(&md[..fors_bytes], t * params.a as usize, params.a) as u32)
        .collect();
    let tree_index = be_value_mod_bits(&md[fors_bytes..fors_bytes + tree_bytes], tree_bits) as u64;
    let leaf_start = fors_bytes + tree_bytes;
    let leaf_index =
        be_value_mod_bits(&md[leaf_start..leaf_start + leaf_bytes], params.h_prime) as u32;

    DigestSplit {
        fors_indices,
        tree_index,
        leaf_index,
    }
}

/// The `(tree address, leaf)` pair a split visits at hypertree layer `j`.
pub fn layer_address(params: &ParameterSet, split: &DigestSplit, layer: u32) -> (u64, u32) {
    debug_assert!(layer < params.d);
    if layer == 0 {
        (split.tree_index, split.leaf_index)
    } else {
        let tree = (split.tree_index as u128) >> (params.h_prime * layer);
        let leaf =
            ((split.tree_index as u128) >> (params.h_prime * (layer - 1))) & ((1 << params.h_prime) - 1);
        (tree as u64, leaf as u32)
    }
}

/// The top `h - h_prime * layer` bits of the hypertree path: the address of
/// the layer-`layer` WOTS+ instance the split visits, encoded as
/// `tree_address * 2^h_prime + keypair`.
pub fn path_prefix(params: &ParameterSet, split: &DigestSplit, layer: u32) -> u128 {
    let full = ((split.tree_index as u128) << params.h_prime) | split.leaf_index as u128;
    full >> (params.h_prime * layer)
}

/// Address with layer and tree set; type words zeroed.
pub fn ht_adrs(layer: u32, tree: u64) -> Adrs {
    let mut a = Adrs::new();
    a.set_layer(layer);
    a.set_tree_address(tree);
    a
}

fn fors_adrs(split: &DigestSplit) -> Adrs {
    let mut a = ht_adrs(0, split.tree_index);
    a.set_type_and_clear(AdrsType::ForsTree);
    a.set_keypair(split.leaf_index);
    a
}

/// Deterministic key generation from seed material.
pub fn slh_keygen(params: &ParameterSet, seed: &[u8]) -> KeyPair {
    let sk_seed = derive_seed(seed, "sk-seed")[..params.n].to_vec();
    let sk_prf = derive_seed(seed, "sk-prf")[..params.n].to_vec();
    let pk_seed = derive_seed(seed, "pk-seed")[..params.n].to_vec();
    let top = ht_adrs(params.d - 1, 0);
    let pk_root = xmss_node(params, &sk_seed, 0, params.h_prime, &pk_seed, &top)
        .expect("root node in range")
        .as_bytes()
        .to_vec();
    KeyPair {
        sk_seed,
        sk_prf,
        pk_seed,
        pk_root,
    }
}

/// Observation hook over the signing-time XMSS traversals; see
/// [`NodeVisitor`] for slot semantics. The fault harness implements this.
pub trait SignHook {
    fn on_lnode_slot(&mut self, layer: u32, height: u32, index: u64, lnode: &mut Node) {
        let _ = (layer, height, index, lnode);
    }
}

/// Hook that observes nothing; `slh_sign` uses it.
pub struct NoopSignHook;

impl SignHook for NoopSignHook {}

struct LayerVisitor<'a, H> {
    layer: u32,
    hook: &'a mut H,
}

impl<H: SignHook> NodeVisitor for LayerVisitor<'_, H> {
    fn on_lnode_slot(&mut self, height: u32, index: u64, lnode: &mut Node) {
        self.hook.on_lnode_slot(self.layer, height, index, lnode);
    }
}

/// Signs with an observation hook attached to every XMSS tree traversal.
pub fn slh_sign_hooked<H: SignHook>(
    params: &ParameterSet,
    message: &[u8],
    keypair: &KeyPair,
    mode: SignMode,
    entropy: &[u8],
    hook: &mut H,
) -> SlhSignature {
    let randomizer = match mode {
        SignMode::Deterministic => keypair.pk_seed.clone(),
        SignMode::Randomized => prf_msg(params, &keypair.sk_prf, entropy, message),
    };
    let split = digest_split(
        params,
        &randomizer,
        &keypair.pk_seed,
        &keypair.pk_root,
        message,
    );

    let fadrs = fors_adrs(&split);
    let fors_sig = fors_sign(
        params,
        &split.fors_indices,
        &keypair.sk_seed,
        &keypair.pk_seed,
        &fadrs,
    )
    .expect("split indices are in range");
    let mut value = fors_pk_from_sig(params, &fors_sig, &split.fors_indices, &keypair.pk_seed, &fadrs)
        .expect("own signature is well formed");

    let mut ht_sigs = Vec::with_capacity(params.d as usize);
    for layer in 0..params.d {
        let (tree, leaf) = layer_address(params, &split, layer);
        let adrs = ht_adrs(layer, tree);
        let mut visitor = LayerVisitor { layer, hook };
        let (sig, root) = xmss_sign_with(
            params,
            value.as_bytes(),
            &keypair.sk_seed,
            leaf as u64,
            &keypair.pk_seed,
            &adrs,
            &mut visitor,
        )
        .expect("leaf index is in range");
        ht_sigs.push(sig);
        value = root;
    }

    SlhSignature {
        randomizer,
        fors_sig,
        ht_sigs,
    }
}

/// Signs a message. `entropy` is only consulted in randomized mode.
pub fn slh_sign(
    params: &ParameterSet,
    message: &[u8],
    keypair: &KeyPair,
    mode: SignMode,
    entropy: &[u8],
) -> SlhSignature {
    slh_sign_hooked(params, message, keypair, mode, entropy, &mut NoopSignHook)
}

/// Verifies a signature against the public key. Malformed structure yields a
/// rejection, never a panic.
pub fn slh_verify(
    params: &ParameterSet,
    message: &[u8],
    sig: &SlhSignature,
    pk_seed: &[u8],
    pk_root: &[u8],
) -> bool {
    if sig.randomizer.len() != params.n
        || sig.ht_sigs.len() != params.d as usize
        || sig.fors_sig.elements.len() != params.k_fors as usize
        || sig.ht_sigs.iter().any(|s| {
            s.wots_sig.nodes.len() != params.ell
                || s.auth_path.len() != params.h_prime as usize
                || s.wots_sig.nodes.iter().any(|n| n.len() != params.n)
                || s.auth_path.iter().any(|n| n.len() != params.n)
        })
        || sig.fors_sig.elements.iter().any(|e| {
            e.secret.len() != params.n
                || e.auth_path.len() != params.a as usize
                || e.auth_path.iter().any(|n| n.len() != params.n)
        })
    {
        return false;
    }

    let split = digest_split(params, &sig.randomizer, pk_seed, pk_root, message);
    let fadrs = fors_adrs(&split);
    let Ok(mut value) = fors_pk_from_sig(params, &sig.fors_sig, &split.fors_indices, pk_seed, &fadrs)
    else {
        return false;
    };
    for layer in 0..params.d {
        let (tree, leaf) = layer_address(params, &split, layer);
        let adrs = ht_adrs(layer, tree);
        match xmss_pk_from_sig(
            params,
            &sig.ht_sigs[layer as usize],
            value.as_bytes(),
            leaf as u64,
            pk_seed,
            &adrs,
        ) {
            Ok(next) => value = next,
            Err(_) => return false,
        }
    }
    value.as_bytes() == pk_root
}

impl SlhSignature {
    /// Concatenated fixed-length fields: `R`, FORS elements, layers 0..d-1.
    pub fn to_bytes(&self, params: &ParameterSet) -> Vec<u8> {
        let mut out = Vec::with_capacity(params.signature_len());
        out.extend_from_slice(&self.randomizer);
        for e in &self.fors_sig.elements {
            out.extend_from_slice(e.secret.as_bytes());
            for n in &e.auth_path {
                out.extend_from_slice(n.as_bytes());
            }
        }
        for s in &self.ht_sigs {
            for n in &s.wots_sig.nodes {
                out.extend_from_slice(n.as_bytes());
            }
            for n in &s.auth_path {
                out.extend_from_slice(n.as_bytes());
            }
        }
        out
    }

    /// Parses the serialization produced by [`Self::to_bytes`].
    pub fn from_bytes(params: &ParameterSet, bytes: &[u8]) -> Result<Self, FormatError> {
        if bytes.len() != params.signature_len() {
            return Err(FormatError {
                what: "signature",
                expected: params.signature_len(),
                got: bytes.len(),
            });
        }
        let n = params.n;
        let mut off = 0usize;
        let mut take = |count: usize| {
            let s = &bytes[off..off + count];
            off += count;
            s
        };
        let randomizer = take(n).to_vec();
        let mut elements = Vec::with_capacity(params.k_fors as usize);
        for _ in 0..params.k_fors {
            let secret = Node::from_slice(take(n));
            let auth_path = (0..params.a).map(|_| Node::from_slice(take(n))).collect();
            elements.push(ForsElement { secret, auth_path });
        }
        let mut ht_sigs = Vec::with_capacity(params.d as usize);
        for _ in 0..params.d {
            let nodes = (0..params.ell).map(|_| Node::from_slice(take(n))).collect();
            let auth_path = (0..params.h_prime)
                .map(|_| Node::from_slice(take(n)))
                .collect();
            ht_sigs.push(XmssSignature {
                wots_sig: WotsSignature { nodes },
                auth_path,
            });
        }
        Ok(SlhSignature {
            randomizer,
            fors_sig: ForsSignature { elements },
            ht_sigs,
        })
    }
}
