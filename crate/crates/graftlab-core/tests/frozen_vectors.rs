//! Regression vectors frozen from the first validated build. They pin the
//! tweakable-hash construction, the WOTS+ encode/sign/compress pipeline,
//! the XMSS tree hashing, and the FORS composition: any change to hashing,
//! address layouts, or digit conventions trips these.

use graftlab_core::adrs::{Adrs, AdrsType};
use graftlab_core::fors::{fors_pk_from_sig, fors_sign};
use graftlab_core::hashes::thash;
use graftlab_core::params::parameter_set;
use graftlab_core::slh::{ht_adrs, slh_keygen};
use graftlab_core::wots::{wots_pk_from_sig, wots_sign};
use graftlab_core::xmss::xmss_node;

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn thash_vectors() {
    let p = parameter_set("SHA2-128f").unwrap();
    let seed = [0x5au8; 16];
    let mut wots_hash = Adrs::new();
    wots_hash.set_type_and_clear(AdrsType::WotsHash);
    let mut wots_prf = Adrs::new();
    wots_prf.set_type_and_clear(AdrsType::WotsPrf);
    assert_eq!(
        hex(thash(p, &seed, &wots_hash, &[b"vector"]).as_bytes()),
        "ff78f8e1d1a3a940b32318073a201719"
    );
    assert_eq!(
        hex(thash(p, &seed, &wots_prf, &[b"vector"]).as_bytes()),
        "cc2ba93bfba2cfa001123b089f9b269c"
    );
    let shake = parameter_set("SHAKE-128f").unwrap();
    assert_eq!(
        hex(thash(shake, &seed, &wots_hash, &[b"vector"]).as_bytes()),
        "8dd8c761b08cc0e73d356af7a403598b"
    );
}

#[test]
fn wots_vectors() {
    let p = parameter_set("toy-e2e").unwrap();
    let kp = slh_keygen(p, b"frozen vectors");
    assert_eq!(hex(&kp.sk_seed), "aae5");
    assert_eq!(hex(&kp.pk_seed), "2bb3");
    let mut adrs = ht_adrs(1, 2);
    adrs.set_keypair(3);
    // Two values, one shared compressed public key.
    for (value, node0) in [([0x13u8, 0x37], "be0f"), ([0xc0u8, 0xde], "f01c")] {
        let sig = wots_sign(p, &value, &kp.sk_seed, &kp.pk_seed, &adrs).unwrap();
        assert_eq!(hex(sig.nodes[0].as_bytes()), node0);
        let pk = wots_pk_from_sig(p, &sig, &value, &kp.pk_seed, &adrs).unwrap();
        assert_eq!(hex(pk.as_bytes()), "3582");
    }
}

#[test]
fn xmss_and_key_vectors() {
    let p = parameter_set("toy-e2e").unwrap();
    let kp = slh_keygen(p, b"frozen vectors");
    let root = xmss_node(p, &kp.sk_seed, 0, p.h_prime, &kp.pk_seed, &ht_adrs(2, 0)).unwrap();
    assert_eq!(hex(root.as_bytes()), "818b");
    assert_eq!(hex(&kp.pk_root), "818b", "keygen root equals the top tree root");
}

#[test]
fn fors_vector() {
    let p = parameter_set("toy-e2e").unwrap();
    let kp = slh_keygen(p, b"frozen vectors");
    let mut fadrs = ht_adrs(0, 5);
    fadrs.set_type_and_clear(AdrsType::ForsTree);
    fadrs.set_keypair(2);
    let indices = [1, 3, 0, 2];
    let sig = fors_sign(p, &indices, &kp.sk_seed, &kp.pk_seed, &fadrs).unwrap();
    assert_eq!(hex(sig.elements[0].secret.as_bytes()), "e0ea");
    let pk = fors_pk_from_sig(p, &sig, &indices, &kp.pk_seed, &fadrs).unwrap();
    assert_eq!(hex(pk.as_bytes()), "dd6b");
}
