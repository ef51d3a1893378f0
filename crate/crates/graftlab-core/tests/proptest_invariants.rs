//! Property tests: encoding bijectivity, the chain composition law, DP
//! equivalence against exhaustive enumeration, analyzer-vs-brute-force
//! equality, monotonicity and symmetry of the signable probability, and
//! dual-mode identification agreement on synthetic groups.

use graftlab_core::complexity::{brute_force_p_signable, p_signable, weak_comp};
use graftlab_core::identify::{identify_secrets, IdentifyMode};
use graftlab_core::observe::{InstanceAddress, WotsObservation};
use graftlab_core::params::parameter_set;
use graftlab_core::slh::{ht_adrs, slh_keygen, slh_sign, SignMode};
use graftlab_core::wots::{base_w, chain, chain_adrs, digits_to_bytes, wots_digits, wots_sign};
use num_bigint::BigUint;
use proptest::prelude::*;

/// Exhaustive bounded-composition counter: recursion over parts.
fn enumerate_compositions(target: i64, bounds: &[u32]) -> BigUint {
    if bounds.is_empty() {
        return if target == 0 {
            BigUint::from(1u32)
        } else {
            BigUint::from(0u32)
        };
    }
    let mut total = BigUint::from(0u32);
    for x in 0..=bounds[0] as i64 {
        if x <= target {
            total += enumerate_compositions(target - x, &bounds[1..]);
        }
    }
    total
}

proptest! {
    #[test]
    fn base_w_round_trips(bytes in proptest::collection::vec(any::<u8>(), 1..16), lg_w in 1u32..=8) {
        let out_len = bytes.len() * 8 / lg_w as usize;
        prop_assume!(out_len > 0);
        let digits = base_w(&bytes, out_len, lg_w).unwrap();
        prop_assert!(digits.iter().all(|&d| (d as u32) < (1 << lg_w)));
        let packed = digits_to_bytes(&digits, lg_w);
        // Round trip covers the consumed prefix bits.
        let consumed_bits = out_len * lg_w as usize;
        for bit in 0..consumed_bits {
            let orig = (bytes[bit / 8] >> (7 - bit % 8)) & 1;
            let back = (packed[bit / 8] >> (7 - bit % 8)) & 1;
            prop_assert_eq!(orig, back, "bit {}", bit);
        }
    }

    #[test]
    fn chain_composes(start_byte in any::<u8>(), j in 0u32..=15, k in 0u32..=15) {
        prop_assume!(j + k <= 15);
        let params = parameter_set("SHA2-128s").unwrap();
        let mut x = [0u8; 16];
        x[0] = start_byte;
        let node = graftlab_core::hashes::Node::from_slice(&x);
        let adrs = chain_adrs(&ht_adrs(0, 7), 3, 1);
        let pk_seed = [0x42u8; 16];
        let composed = chain(
            params,
            chain(params, node, 0, j, &pk_seed, adrs).unwrap(),
            j,
            k,
            &pk_seed,
            adrs,
        )
        .unwrap();
        let direct = chain(params, node, 0, j + k, &pk_seed, adrs).unwrap();
        prop_assert_eq!(composed, direct);
    }

    #[test]
    fn weak_comp_matches_exhaustive_enumeration(
        bounds in proptest::collection::vec(0u32..=4, 1..=6),
        target in 0u64..=12,
    ) {
        let dp = weak_comp(target, &bounds);
        let brute = enumerate_compositions(target as i64, &bounds);
        prop_assert_eq!(dp, brute);
    }

    #[test]
    fn analyzer_equals_brute_force_on_random_toy_instances(
        seed_digits in proptest::collection::vec(0u8..4, 11),
        use_e2e in any::<bool>(),
    ) {
        let (params, ell) = if use_e2e {
            (parameter_set("toy-e2e").unwrap(), 11)
        } else {
            (parameter_set("toy-w4").unwrap(), 6)
        };
        let exposed_min: Vec<u8> = seed_digits[..ell].to_vec();
        let exact = p_signable(params, &exposed_min);
        let brute = brute_force_p_signable(params, &exposed_min).unwrap();
        prop_assert_eq!(exact, brute);
    }

    #[test]
    fn lowering_minima_never_lowers_p(
        base in proptest::collection::vec(0u8..4, 6),
        which in 0usize..6,
    ) {
        let params = parameter_set("toy-w4").unwrap();
        prop_assume!(base[which] > 0);
        let mut lowered = base.clone();
        lowered[which] -= 1;
        let p_base = p_signable(params, &base);
        let p_lowered = p_signable(params, &lowered);
        prop_assert!(p_lowered >= p_base);
    }

    #[test]
    fn message_chain_permutation_preserves_p(
        base in proptest::collection::vec(0u8..4, 6),
        swap_a in 0usize..4,
        swap_b in 0usize..4,
    ) {
        let params = parameter_set("toy-w4").unwrap();
        let mut permuted = base.clone();
        permuted.swap(swap_a, swap_b); // message part only
        prop_assert_eq!(p_signable(params, &base), p_signable(params, &permuted));
    }

    #[test]
    fn identify_modes_agree_on_synthetic_groups(
        values in proptest::collection::btree_set(any::<u8>(), 2..=5),
    ) {
        let params = parameter_set("toy-w4").unwrap();
        let keypair = slh_keygen(params, b"proptest synthetic");
        let address = InstanceAddress { layer: params.d - 1, tree: 0, keypair: 1 };
        let mut adrs = ht_adrs(address.layer, address.tree);
        adrs.set_keypair(address.keypair);
        let filler = slh_sign(params, b"filler", &keypair, SignMode::Deterministic, &[]);
        let records: Vec<graftlab_core::fault::SignatureRecord> = values
            .iter()
            .map(|_| graftlab_core::fault::SignatureRecord {
                message: b"filler".to_vec(),
                randomizer: filler.randomizer.clone(),
                signature: filler.clone(),
                mode: SignMode::Deterministic,
                fault_ground_truth: None,
            })
            .collect();
        let corpus = graftlab_core::fault::Corpus {
            param_set: params.name.to_string(),
            pk_seed: keypair.pk_seed.clone(),
            pk_root: keypair.pk_root.clone(),
            records,
            complete: true,
        };
        let group: Vec<WotsObservation> = values
            .iter()
            .enumerate()
            .map(|(i, &byte)| {
                let value = vec![byte];
                WotsObservation {
                    address,
                    digits: wots_digits(params, &value).unwrap(),
                    wots_sig: wots_sign(params, &value, &keypair.sk_seed, &keypair.pk_seed, &adrs)
                        .unwrap(),
                    signed_value: value,
                    auth_path: filler.ht_sigs.last().unwrap().auth_path.clone(),
                    record: i,
                    verifies: true,
                }
            })
            .collect();
        let search = identify_secrets(params, &keypair.pk_seed, &group, &corpus, IdentifyMode::Search);
        let direct = identify_secrets(params, &keypair.pk_seed, &group, &corpus, IdentifyMode::Direct);
        match (search, direct) {
            (Ok(s), Ok(d)) => {
                prop_assert_eq!(s.exposed_min, d.exposed_min);
                prop_assert_eq!(s.accepted_count, d.accepted_count);
                prop_assert_eq!(s.distinct_values, d.distinct_values);
                // Exposed nodes must agree as raw chain values.
                let sn: Vec<&[u8]> = s.exposed_nodes.iter().map(|n| n.as_bytes()).collect();
                let dn: Vec<&[u8]> = d.exposed_nodes.iter().map(|n| n.as_bytes()).collect();
                prop_assert_eq!(sn, dn);
            }
            (Err(se), Err(de)) => prop_assert_eq!(se, de),
            (s, d) => prop_assert!(false, "modes disagree: {:?} vs {:?}", s.is_ok(), d.is_ok()),
        }
    }
}
