//! Tweakable hashing: a simple prefix construction
//! `hash(pk_seed || ADRS || input)` for both hash families, plus the
//! message-digest expansion used to derive hypertree paths.
//!
//! External known-answer-test interoperability is out of scope; all that
//! matters here is determinism, domain separation through `ADRS`, and the
//! `n`-byte output contract.

use alloc::vec::Vec;
use sha2::{Digest, Sha256};
use sha3::{
    digest::{ExtendableOutput, Update, XofReader},
    Shake256,
};

use crate::adrs::Adrs;
use crate::params::{HashFamily, ParameterSet};

/// Largest `n` across registered parameter sets.
pub const MAX_N: usize = 32;

/// An `n`-byte hash node. Fixed-capacity so tree traversals stay
/// allocation-free.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Node {
    len: u8,
    bytes: [u8; MAX_N],
}

impl Node {
    /// Wraps an `n`-byte value, `n <= 32`.
    pub fn from_slice(bytes: &[u8]) -> Self {
        assert!(bytes.len() <= MAX_N);
        let mut out = Node {
            len: bytes.len() as u8,
            bytes: [0u8; MAX_N],
        };
        out.bytes[..bytes.len()].copy_from_slice(bytes);
        out
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes[..self.len as usize]
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// XORs `1 << (bit % 8)` into byte `bit / 8`.
    pub fn flip_bit(&mut self, bit: u32) {
        let byte = (bit / 8) as usize;
        assert!(byte < self.len as usize);
        self.bytes[byte] ^= 1 << (bit % 8);
    }
}

impl AsRef<[u8]> for Node {
    fn as_ref(&self) -> &[u8] {
        self.as_bytes()
    }
}

impl core::fmt::Debug for Node {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for b in self.as_bytes() {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

/// Tweakable hash over `pk_seed || adrs || parts...`, truncated/extended to
/// `n` bytes per the parameter set's family.
pub fn thash(params: &ParameterSet, pk_seed: &[u8], adrs: &Adrs, parts: &[&[u8]]) -> Node {
    match params.hash_family {
        HashFamily::Sha2 => {
            let mut h = Sha256::new();
            Digest::update(&mut h, pk_seed);
            Digest::update(&mut h, adrs.as_bytes());
            for p in parts {
                Digest::update(&mut h, p);
            }
            Node::from_slice(&h.finalize()[..params.n])
        }
        HashFamily::Shake => {
            let mut h = Shake256::default();
            h.update(pk_seed);
            h.update(adrs.as_bytes());
            for p in parts {
                h.update(p);
            }
            let mut out = [0u8; MAX_N];
            h.finalize_xof().read(&mut out[..params.n]);
            Node::from_slice(&out[..params.n])
        }
    }
}

/// Message digest `H_msg(R, pk_seed, pk_root, message)` expanded to
/// `digest_len` bytes.
pub fn h_msg(
    params: &ParameterSet,
    randomizer: &[u8],
    pk_seed: &[u8],
    pk_root: &[u8],
    message: &[u8],
) -> Vec<u8> {
    match params.hash_family {
        HashFamily::Sha2 => {
            // Counter-mode expansion over an inner message hash, so long
            // messages are absorbed once.
            let mut inner = Sha256::new();
            Digest::update(&mut inner, randomizer);
            Digest::update(&mut inner, pk_seed);
            Digest::update(&mut inner, pk_root);
            Digest::update(&mut inner, message);
            let inner = inner.finalize();
            let mut out = Vec::with_capacity(params.digest_len);
            let mut counter = 0u32;
            while out.len() < params.digest_len {
                let mut h = Sha256::new();
                Digest::update(&mut h, randomizer);
                Digest::update(&mut h, pk_seed);
                Digest::update(&mut h, inner);
                Digest::update(&mut h, counter.to_be_bytes());
                out.extend_from_slice(&h.finalize());
                counter += 1;
            }
            out.truncate(params.digest_len);
            out
        }
        HashFamily::Shake => {
            let mut h = Shake256::default();
            h.update(randomizer);
            h.update(pk_seed);
            h.update(pk_root);
            h.update(message);
            let mut out = alloc::vec![0u8; params.digest_len];
            h.finalize_xof().read(&mut out);
            out
        }
    }
}

/// Derives an `n`-byte randomizer for randomized signing from the PRF key,
/// caller-provided entropy, and the message.
pub fn prf_msg(params: &ParameterSet, sk_prf: &[u8], entropy: &[u8], message: &[u8]) -> Vec<u8> {
    match params.hash_family {
        HashFamily::Sha2 => {
            let mut h = Sha256::new();
            Digest::update(&mut h, sk_prf);
            Digest::update(&mut h, entropy);
            Digest::update(&mut h, message);
            h.finalize()[..params.n].to_vec()
        }
        HashFamily::Shake => {
            let mut h = Shake256::default();
            h.update(sk_prf);
            h.update(entropy);
            h.update(message);
            let mut out = alloc::vec![0u8; params.n];
            h.finalize_xof().read(&mut out);
            out
        }
    }
}

/// Labeled seed derivation: `SHA-256(material || label)`. Used to fan a
/// session seed out into per-stage RNG seeds.
pub fn derive_seed(material: &[u8], label: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    Digest::update(&mut h, material);
    Digest::update(&mut h, label.as_bytes());
    h.finalize().into()
}
