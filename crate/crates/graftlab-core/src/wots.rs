//! WOTS+ one-time signatures: digit encoding, checksum, hash chains, key
//! generation, signing, and public-key recomputation.

use alloc::vec::Vec;

use crate::adrs::{Adrs, AdrsType};
use crate::hashes::{thash, Node};
use crate::params::ParameterSet;
use crate::RangeError;

/// A WOTS+ signature: one chain value per chain, `ell` in total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WotsSignature {
    pub nodes: Vec<Node>,
}

/// Splits `value` into `out_len` digits of `lg_w` bits each, big-endian bit
/// order.
pub fn base_w(value: &[u8], out_len: usize, lg_w: u32) -> Result<Vec<u8>, RangeError> {
    let need_bits = out_len * lg_w as usize;
    if value.len() * 8 < need_bits {
        return Err(RangeError {
            what: "base_w input bits",
            value: (value.len() * 8) as u64,
            min: need_bits as u64,
            max: u64::MAX,
        });
    }
    let mut digits = Vec::with_capacity(out_len);
    let mut bit = 0usize;
    for _ in 0..out_len {
        let mut d = 0u8;
        for _ in 0..lg_w {
            d = (d << 1) | ((value[bit / 8] >> (7 - bit % 8)) & 1);
            bit += 1;
        }
        digits.push(d);
    }
    Ok(digits)
}

/// Inverse of [`base_w`]: packs digits back into big-endian bits, padded with
/// zero bits to a whole number of bytes.
pub fn digits_to_bytes(digits: &[u8], lg_w: u32) -> Vec<u8> {
    let total_bits = digits.len() * lg_w as usize;
    let mut out = alloc::vec![0u8; total_bits.div_ceil(8)];
    let mut bit = 0usize;
    for &d in digits {
        for j in (0..lg_w).rev() {
            if (d >> j) & 1 == 1 {
                out[bit / 8] |= 1 << (7 - bit % 8);
            }
            bit += 1;
        }
    }
    out
}

/// Integer value of a big-endian digit tuple.
pub fn digits_value(digits: &[u8], w: u32) -> u64 {
    digits
        .iter()
        .fold(0u64, |acc, &d| acc * w as u64 + d as u64)
}

/// Checksum value `C = sum(w - 1 - m_i)` over message digits.
pub fn checksum_value(msg_digits: &[u8], w: u32) -> u64 {
    msg_digits.iter().map(|&m| (w - 1) as u64 - m as u64).sum()
}

/// Renders a checksum value as `ell2` base-`w` digits, big-endian.
pub fn checksum_to_digits(value: u64, ell2: usize, lg_w: u32) -> Vec<u8> {
    let mask = (1u64 << lg_w) - 1;
    (0..ell2)
        .map(|j| ((value >> (lg_w as usize * (ell2 - 1 - j))) & mask) as u8)
        .collect()
}

/// Checksum digits for a message-digit vector.
pub fn wots_checksum(params: &ParameterSet, msg_digits: &[u8]) -> Vec<u8> {
    debug_assert_eq!(msg_digits.len(), params.ell1);
    checksum_to_digits(
        checksum_value(msg_digits, params.w),
        params.ell2,
        params.lg_w,
    )
}

/// Full digit vector for an `n`-byte value: `ell1` message digits followed by
/// `ell2` checksum digits.
pub fn wots_digits(params: &ParameterSet, value: &[u8]) -> Result<Vec<u8>, RangeError> {
    let mut digits = base_w(value, params.ell1, params.lg_w)?;
    let checksum = wots_checksum(params, &digits);
    digits.extend_from_slice(&checksum);
    Ok(digits)
}

/// Iterates the tweakable hash `steps` times from chain position `start`.
///
/// `adrs` must carry layer, tree, type `WOTS_HASH`, keypair, and chain index;
/// the hash position advances from `start` to `start + steps - 1`.
pub fn chain(
    params: &ParameterSet,
    x: Node,
    start: u32,
    steps: u32,
    pk_seed: &[u8],
    mut adrs: Adrs,
) -> Result<Node, RangeError> {
    if start + steps > params.w - 1 {
        return Err(RangeError {
            what: "chain start+steps",
            value: (start + steps) as u64,
            min: 0,
            max: (params.w - 1) as u64,
        });
    }
    let mut node = x;
    for j in start..start + steps {
        adrs.set_hash(j);
        node = thash(params, pk_seed, &adrs, &[node.as_bytes()]);
    }
    Ok(node)
}

/// Address for hashing along chain `i` of the keypair in `adrs`.
pub fn chain_adrs(adrs: &Adrs, keypair: u32, chain_index: u32) -> Adrs {
    let mut a = *adrs;
    a.set_type_and_clear(AdrsType::WotsHash);
    a.set_keypair(keypair);
    a.set_chain(chain_index);
    a
}

/// Secret starting value of chain `i`, derived from `sk_seed` under a
/// PRF-typed address.
pub fn chain_secret(
    params: &ParameterSet,
    sk_seed: &[u8],
    pk_seed: &[u8],
    adrs: &Adrs,
    keypair: u32,
    chain_index: u32,
) -> Node {
    let mut a = *adrs;
    a.set_type_and_clear(AdrsType::WotsPrf);
    a.set_keypair(keypair);
    a.set_chain(chain_index);
    thash(params, pk_seed, &a, &[sk_seed])
}

fn compress_endpoints(
    params: &ParameterSet,
    pk_seed: &[u8],
    adrs: &Adrs,
    keypair: u32,
    endpoints: &[Node],
) -> Node {
    let mut a = *adrs;
    a.set_type_and_clear(AdrsType::WotsPk);
    a.set_keypair(keypair);
    let parts: Vec<&[u8]> = endpoints.iter().map(|n| n.as_bytes()).collect();
    thash(params, pk_seed, &a, &parts)
}

/// Compressed WOTS+ public key: every chain advanced to position `w - 1`,
/// endpoints hashed together.
///
/// `adrs` must carry layer, tree and keypair.
pub fn wots_pkgen(params: &ParameterSet, sk_seed: &[u8], pk_seed: &[u8], adrs: &Adrs) -> Node {
    let keypair = adrs.keypair();
    let mut endpoints = Vec::with_capacity(params.ell);
    for i in 0..params.ell as u32 {
        let sk = chain_secret(params, sk_seed, pk_seed, adrs, keypair, i);
        let tip = chain(
            params,
            sk,
            0,
            params.w - 1,
            pk_seed,
            chain_adrs(adrs, keypair, i),
        )
        .expect("w-1 steps from 0 are in range");
        endpoints.push(tip);
    }
    compress_endpoints(params, pk_seed, adrs, keypair, &endpoints)
}

/// Signs an `n`-byte value: chain `i` advanced from its secret to digit `i`.
pub fn wots_sign(
    params: &ParameterSet,
    value: &[u8],
    sk_seed: &[u8],
    pk_seed: &[u8],
    adrs: &Adrs,
) -> Result<WotsSignature, RangeError> {
    debug_assert_eq!(value.len(), params.n);
    let digits = wots_digits(params, value)?;
    let keypair = adrs.keypair();
    let mut nodes = Vec::with_capacity(params.ell);
    for (i, &digit) in digits.iter().enumerate() {
        let sk = chain_secret(params, sk_seed, pk_seed, adrs, keypair, i as u32);
        nodes.push(chain(
            params,
            sk,
            0,
            digit as u32,
            pk_seed,
            chain_adrs(adrs, keypair, i as u32),
        )?);
    }
    Ok(WotsSignature { nodes })
}

/// Recomputes the compressed public key implied by a signature on `value`:
/// chain `i` advanced by `w - 1 - digit_i` steps from position `digit_i`.
pub fn wots_pk_from_sig(
    params: &ParameterSet,
    sig: &WotsSignature,
    value: &[u8],
    pk_seed: &[u8],
    adrs: &Adrs,
) -> Result<Node, RangeError> {
    if sig.nodes.len() != params.ell {
        return Err(RangeError {
            what: "wots signature length",
            value: sig.nodes.len() as u64,
            min: params.ell as u64,
            max: params.ell as u64,
        });
    }
    let digits = wots_digits(params, value)?;
    let keypair = adrs.keypair();
    let mut endpoints = Vec::with_capacity(params.ell);
    for (i, &digit) in digits.iter().enumerate() {
        endpoints.push(chain(
            params,
            sig.nodes[i],
            digit as u32,
            params.w - 1 - digit as u32,
            pk_seed,
            chain_adrs(adrs, keypair, i as u32),
        )?);
    }
    Ok(compress_endpoints(
        params, pk_seed, adrs, keypair, &endpoints,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::parameter_set;

    fn toy_adrs() -> Adrs {
        let mut a = Adrs::new();
        a.set_layer(1);
        a.set_tree_address(0);
        a.set_keypair(2);
        a
    }

    #[test]
    fn base_w_slices_bits_big_endian() {
        assert_eq!(base_w(&[0b0110_0011], 4, 2).unwrap(), [1, 2, 0, 3]);
        assert_eq!(base_w(&[0x00, 0x00], 4, 4).unwrap(), [0, 0, 0, 0]);
        assert_eq!(base_w(&[0xAB], 2, 4).unwrap(), [0xA, 0xB]);
    }

    #[test]
    fn base_w_rejects_short_input() {
        assert!(base_w(&[0xFF], 5, 2).is_err());
    }

    #[test]
    fn digits_round_trip_to_bytes() {
        let bytes = [0b0110_0011, 0x9e];
        let digits = base_w(&bytes, 8, 2).unwrap();
        assert_eq!(digits_to_bytes(&digits, 2), bytes);
    }

    #[test]
    fn checksum_examples() {
        let p = parameter_set("toy-w4").unwrap();
        // m = (1,0,2,3) has C = 6 -> digits (1,2).
        assert_eq!(wots_checksum(p, &[1, 0, 2, 3]), [1, 2]);
        // All chains at the end: C = 0.
        assert_eq!(wots_checksum(p, &[3, 3, 3, 3]), [0, 0]);
        // C = 12 = 3 * 4 + 0.
        assert_eq!(wots_checksum(p, &[0, 0, 0, 0]), [3, 0]);
    }

    #[test]
    fn checksum_integer_identity() {
        let p = parameter_set("toy-w4").unwrap();
        for m0 in 0..4u8 {
            for m1 in 0..4u8 {
                let digits = wots_checksum(p, &[m0, m1, 1, 2]);
                let expect: u64 = [m0, m1, 1, 2].iter().map(|&m| 3 - m as u64).sum();
                assert_eq!(digits_value(&digits, p.w), expect);
            }
        }
    }

    #[test]
    fn chain_zero_steps_is_identity() {
        let p = parameter_set("toy-w4").unwrap();
        let x = Node::from_slice(&[0x42]);
        let adrs = chain_adrs(&toy_adrs(), 2, 0);
        assert_eq!(chain(p, x, 0, 0, &[9], adrs).unwrap(), x);
        assert_eq!(chain(p, x, 3, 0, &[9], adrs).unwrap(), x);
    }

    #[test]
    fn chain_composition_law() {
        let p = parameter_set("toy-w4").unwrap();
        let x = Node::from_slice(&[0x42]);
        let adrs = chain_adrs(&toy_adrs(), 2, 1);
        for j in 0..=3u32 {
            for k in 0..=(3 - j) {
                let two_step =
                    chain(p, chain(p, x, 0, j, &[9], adrs).unwrap(), j, k, &[9], adrs).unwrap();
                let one_step = chain(p, x, 0, j + k, &[9], adrs).unwrap();
                assert_eq!(two_step, one_step, "j={j} k={k}");
            }
        }
    }

    #[test]
    fn chain_rejects_overrun() {
        let p = parameter_set("toy-w4").unwrap();
        let x = Node::from_slice(&[0x42]);
        let adrs = chain_adrs(&toy_adrs(), 2, 0);
        assert!(chain(p, x, 2, 2, &[9], adrs).is_err());
        assert!(chain(p, x, 0, 4, &[9], adrs).is_err());
    }

    #[test]
    fn sign_reveals_digit_positions() {
        // For m = (1,0,2,3) with checksum (1,2), the signature nodes sit at
        // chain positions (1,0,2,3,1,2): advancing node i by that many steps
        // from the secret reproduces it.
        let p = parameter_set("toy-w4").unwrap();
        let (sk_seed, pk_seed) = ([0x11u8], [0x22u8]);
        let adrs = toy_adrs();
        let value = [0b0100_1011u8]; // digits (1,0,2,3)
        assert_eq!(base_w(&value, 4, 2).unwrap(), [1, 0, 2, 3]);
        let sig = wots_sign(p, &value, &sk_seed, &pk_seed, &adrs).unwrap();
        for (i, expect_pos) in [1u32, 0, 2, 3, 1, 2].into_iter().enumerate() {
            let sk = chain_secret(p, &sk_seed, &pk_seed, &adrs, 2, i as u32);
            let at_pos = chain(p, sk, 0, expect_pos, &pk_seed, chain_adrs(&adrs, 2, i as u32))
                .unwrap();
            assert_eq!(sig.nodes[i], at_pos, "chain {i}");
        }
    }

    #[test]
    fn pk_from_sig_round_trips_to_pkgen() {
        for name in ["toy-w4", "toy-e2e"] {
            let p = parameter_set(name).unwrap();
            let sk_seed = alloc::vec![0x33u8; p.n];
            let pk_seed = alloc::vec![0x44u8; p.n];
            let adrs = toy_adrs();
            let pk = wots_pkgen(p, &sk_seed, &pk_seed, &adrs);
            for byte in [0x00u8, 0x5a, 0xff] {
                let value = alloc::vec![byte; p.n];
                let sig = wots_sign(p, &value, &sk_seed, &pk_seed, &adrs).unwrap();
                let recovered = wots_pk_from_sig(p, &sig, &value, &pk_seed, &adrs).unwrap();
                assert_eq!(recovered, pk, "{name} value {byte:02x}");
            }
        }
    }

    #[test]
    fn tampered_signature_changes_recovered_pk() {
        let p = parameter_set("toy-e2e").unwrap();
        let sk_seed = [0x55u8; 2];
        let pk_seed = [0x66u8; 2];
        let adrs = toy_adrs();
        let value = [0xc3u8, 0x1d];
        let pk = wots_pkgen(p, &sk_seed, &pk_seed, &adrs);
        let mut sig = wots_sign(p, &value, &sk_seed, &pk_seed, &adrs).unwrap();
        sig.nodes[3].flip_bit(0);
        let recovered = wots_pk_from_sig(p, &sig, &value, &pk_seed, &adrs).unwrap();
        assert_ne!(recovered, pk);
    }

    #[test]
    fn all_end_digits_apply_zero_steps() {
        // A value whose message digits are all w-1 leaves those signature
        // nodes untouched by pk recomputation: they are already endpoints.
        let p = parameter_set("toy-w4").unwrap();
        let (sk_seed, pk_seed) = ([0x77u8], [0x88u8]);
        let adrs = toy_adrs();
        let value = [0xffu8]; // digits (3,3,3,3), checksum (0,0)
        let sig = wots_sign(p, &value, &sk_seed, &pk_seed, &adrs).unwrap();
        for i in 0..p.ell1 {
            let endpoint = chain(
                p,
                sig.nodes[i],
                3,
                0,
                &pk_seed,
                chain_adrs(&adrs, 2, i as u32),
            )
            .unwrap();
            assert_eq!(endpoint, sig.nodes[i], "message chain {i} already at end");
        }
    }

    #[test]
    fn straight_line_pkgen_oracle() {
        // Independent straight-line recomputation of a toy-w4 public key:
        // per-chain PRF, three explicit hash steps, final compression. No
        // loops over chain steps, no reuse of wots_pkgen internals.
        let p = parameter_set("toy-w4").unwrap();
        let (sk_seed, pk_seed) = ([0x11u8], [0x22u8]);
        let adrs = toy_adrs();
        let mut endpoints = Vec::new();
        for i in 0..6u32 {
            let mut prf = adrs;
            prf.set_type_and_clear(AdrsType::WotsPrf);
            prf.set_keypair(2);
            prf.set_chain(i);
            let sk = thash(p, &pk_seed, &prf, &[&sk_seed]);
            let mut h = adrs;
            h.set_type_and_clear(AdrsType::WotsHash);
            h.set_keypair(2);
            h.set_chain(i);
            h.set_hash(0);
            let s1 = thash(p, &pk_seed, &h, &[sk.as_bytes()]);
            h.set_hash(1);
            let s2 = thash(p, &pk_seed, &h, &[s1.as_bytes()]);
            h.set_hash(2);
            let s3 = thash(p, &pk_seed, &h, &[s2.as_bytes()]);
            endpoints.push(s3);
        }
        let mut pk_adrs = adrs;
        pk_adrs.set_type_and_clear(AdrsType::WotsPk);
        pk_adrs.set_keypair(2);
        let parts: Vec<&[u8]> = endpoints.iter().map(|n| n.as_bytes()).collect();
        let oracle_pk = thash(p, &pk_seed, &pk_adrs, &parts);

        assert_eq!(wots_pkgen(p, &sk_seed, &pk_seed, &adrs), oracle_pk);
    }
}
