//! Simulated Rowhammer fault oracle: flips one chosen bit in an `lnode`
//! holding slot while the victim signs, standing in for the hammering
//! primitive of a physical attack.
//!
//! The flip lands after a left subtree returns and before the parent hash
//! combines. The signer computes the root it hands upward in its own
//! traversal, which runs before the authentication-path traversals, and the
//! fault fires at most once per signing, so the flip always corrupts that
//! root while the signature components stay clean. A fired fault therefore
//! yields a signature that fails verification, and the WOTS+ instance one
//! layer up has signed a corrupted root.
//!
//! A tree whose root nothing consumes cannot yield a faulty signature, so
//! the target layer must have a layer above it: `target_layer <= d - 2`.

use alloc::string::String;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::hashes::Node;
use crate::params::ParameterSet;
use crate::slh::{slh_sign_hooked, KeyPair, SignHook, SignMode, SlhSignature};
use crate::RangeError;

/// When a fault fires across a signing campaign. The probability trigger
/// doubles as the clean-signature ratio knob: `p < 1` leaves a fraction of
/// the corpus unfaulted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FaultTrigger {
    /// Fire on every signing.
    Always,
    /// Fire only on the 1-based `n`-th signing.
    OnNthSigning(u64),
    /// Fire on each signing independently with probability `p`.
    PerSigningProbability(f64),
}

/// What to flip, and when.
#[derive(Clone, Debug, PartialEq)]
pub struct FaultSpec {
    /// Hypertree layer whose XMSS tree computation is corrupted.
    pub target_layer: u32,
    /// Which lnode slot to corrupt: the height of the frame holding it,
    /// `1 <= level_in_tree <= h_prime`.
    pub level_in_tree: u32,
    /// Bit position within the n-byte slot, `0 <= bit_index < 8n`.
    pub bit_index: u32,
    pub trigger: FaultTrigger,
    /// Disarmed specs never fire.
    pub armed: bool,
}

impl FaultSpec {
    pub fn validate(&self, params: &ParameterSet) -> Result<(), RangeError> {
        if params.d >= 2 && self.target_layer > params.d - 2 {
            return Err(RangeError {
                what: "fault target layer",
                value: self.target_layer as u64,
                min: 0,
                max: params.d as u64 - 2,
            });
        }
        if self.level_in_tree < 1 || self.level_in_tree > params.h_prime {
            return Err(RangeError {
                what: "fault level in tree",
                value: self.level_in_tree as u64,
                min: 1,
                max: params.h_prime as u64,
            });
        }
        if self.bit_index >= 8 * params.n as u32 {
            return Err(RangeError {
                what: "fault bit index",
                value: self.bit_index as u64,
                min: 0,
                max: 8 * params.n as u64 - 1,
            });
        }
        if let FaultTrigger::PerSigningProbability(p) = self.trigger {
            if !(0.0..=1.0).contains(&p) {
                return Err(RangeError {
                    what: "fault probability percent",
                    value: (p * 100.0) as u64,
                    min: 0,
                    max: 100,
                });
            }
        }
        Ok(())
    }
}

/// Ground truth about a fired fault. Stored for evaluation harnesses only;
/// the forgery engine never reads it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaultEvent {
    pub layer: u32,
    pub level: u32,
    pub bit: u32,
    /// Ordinal of the flipped slot among the target layer's lnode-slot
    /// events within this signing.
    pub invocation: u64,
}

/// One signing-campaign output.
#[derive(Clone, Debug, PartialEq)]
pub struct SignatureRecord {
    pub message: Vec<u8>,
    pub randomizer: Vec<u8>,
    pub signature: SlhSignature,
    pub mode: SignMode,
    /// Evaluation-only metadata; analysis paths must not consult it.
    pub fault_ground_truth: Option<FaultEvent>,
}

/// A persisted signing campaign: shared parameter set and victim public key,
/// plus the ordered records.
#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    pub param_set: String,
    pub pk_seed: Vec<u8>,
    pub pk_root: Vec<u8>,
    pub records: Vec<SignatureRecord>,
    /// False when a campaign aborted before reaching its requested count.
    pub complete: bool,
}

struct FaultInjector<'a> {
    spec: &'a FaultSpec,
    fire: bool,
    events_in_layer: u64,
    fired: Option<FaultEvent>,
}

impl SignHook for FaultInjector<'_> {
    fn on_lnode_slot(&mut self, layer: u32, height: u32, index: u64, lnode: &mut Node) {
        let _ = index;
        if layer != self.spec.target_layer {
            return;
        }
        let invocation = self.events_in_layer;
        self.events_in_layer += 1;
        if self.fire && self.fired.is_none() && height == self.spec.level_in_tree {
            lnode.flip_bit(self.spec.bit_index);
            self.fired = Some(FaultEvent {
                layer,
                level: height,
                bit: self.spec.bit_index,
                invocation,
            });
        }
    }
}

fn sample_unit(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Signs like `slh_sign`, except the fault oracle may flip one bit in an
/// lnode slot while the target layer's tree is computed. Path selection is
/// derived from the true `(R, message)` and is unaffected.
///
/// `signing_index` is the 1-based position of this call within a campaign;
/// the `OnNthSigning` trigger matches against it. RNG draws happen in a
/// fixed order (entropy first, then the trigger), so records replay exactly
/// under a seeded generator.
pub fn faulty_sign(
    params: &ParameterSet,
    message: &[u8],
    keypair: &KeyPair,
    mode: SignMode,
    fault: &FaultSpec,
    signing_index: u64,
    rng: &mut impl RngCore,
) -> SignatureRecord {
    let mut entropy = [0u8; 32];
    if mode == SignMode::Randomized {
        rng.fill_bytes(&mut entropy);
    }
    let fire = fault.armed
        && match fault.trigger {
            FaultTrigger::Always => true,
            FaultTrigger::OnNthSigning(n) => signing_index == n,
            FaultTrigger::PerSigningProbability(p) => sample_unit(rng) < p,
        };
    let mut injector = FaultInjector {
        spec: fault,
        fire,
        events_in_layer: 0,
        fired: None,
    };
    let signature = slh_sign_hooked(params, message, keypair, mode, &entropy, &mut injector);
    SignatureRecord {
        message: message.to_vec(),
        randomizer: signature.randomizer.clone(),
        signature,
        mode,
        fault_ground_truth: injector.fired,
    }
}

/// Evaluation oracle: recovers the value a WOTS+ signature actually signed
/// by searching, per chain, for the position whose continuation reaches the
/// instance's true endpoint. Requires the victim's secret seed, so it lives
/// on the evaluation side of the module boundary.
pub fn recover_signed_value(
    params: &ParameterSet,
    sk_seed: &[u8],
    pk_seed: &[u8],
    adrs: &crate::adrs::Adrs,
    keypair: u32,
    sig: &crate::wots::WotsSignature,
) -> Option<Vec<u8>> {
    use crate::wots::{chain, chain_adrs, chain_secret, digits_to_bytes, wots_checksum};
    let mut positions = Vec::with_capacity(params.ell);
    for i in 0..params.ell {
        let endpoint = chain(
            params,
            chain_secret(params, sk_seed, pk_seed, adrs, keypair, i as u32),
            0,
            params.w - 1,
            pk_seed,
            chain_adrs(adrs, keypair, i as u32),
        )
        .expect("full chain in range");
        let found = (0..params.w).find(|&k| {
            chain(
                params,
                sig.nodes[i],
                k,
                params.w - 1 - k,
                pk_seed,
                chain_adrs(adrs, keypair, i as u32),
            )
            .expect("suffix chain in range")
                == endpoint
        })?;
        positions.push(found as u8);
    }
    if wots_checksum(params, &positions[..params.ell1]) != positions[params.ell1..] {
        return None;
    }
    Some(digits_to_bytes(&positions[..params.ell1], params.lg_w))
}

/// Evaluation oracle: the hypertree layer boundaries of a record where the
/// value signed above differs from the root its own components recompute.
/// A clean record has none; a record faulted at layer `l` has exactly the
/// boundary `l`.
pub fn boundary_analysis(
    params: &ParameterSet,
    keypair: &KeyPair,
    record: &SignatureRecord,
) -> Vec<u32> {
    use crate::slh::{digest_split, ht_adrs, layer_address};

    let split = digest_split(
        params,
        &record.randomizer,
        &keypair.pk_seed,
        &keypair.pk_root,
        &record.message,
    );
    // Value signed at layer 0 comes from the record's own FORS components.
    let mut fadrs = ht_adrs(0, split.tree_index);
    fadrs.set_type_and_clear(crate::adrs::AdrsType::ForsTree);
    fadrs.set_keypair(split.leaf_index);
    let mut signed = crate::fors::fors_pk_from_sig(
        params,
        &record.signature.fors_sig,
        &split.fors_indices,
        &keypair.pk_seed,
        &fadrs,
    )
    .expect("record is well formed")
    .as_bytes()
    .to_vec();

    let mut boundaries = Vec::new();
    for layer in 0..params.d {
        let (tree, leaf) = layer_address(params, &split, layer);
        let adrs = ht_adrs(layer, tree);
        let recomputed_root = crate::xmss::xmss_pk_from_sig(
            params,
            &record.signature.ht_sigs[layer as usize],
            &signed,
            leaf as u64,
            &keypair.pk_seed,
            &adrs,
        )
        .expect("record is well formed");
        let signed_above = if layer + 1 < params.d {
            let (up_tree, up_leaf) = layer_address(params, &split, layer + 1);
            recover_signed_value(
                params,
                &keypair.sk_seed,
                &keypair.pk_seed,
                &ht_adrs(layer + 1, up_tree),
                up_leaf,
                &record.signature.ht_sigs[layer as usize + 1].wots_sig,
            )
            .expect("honest chain values always recover")
        } else {
            keypair.pk_root.clone()
        };
        if recomputed_root.as_bytes() != signed_above {
            boundaries.push(layer);
        }
        signed = signed_above;
    }
    boundaries
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::parameter_set;
    use crate::slh::{slh_keygen, slh_sign, slh_verify};
    use rand_core::SeedableRng;

    fn rng(seed: u64) -> rand_chacha::ChaCha20Rng {
        rand_chacha::ChaCha20Rng::seed_from_u64(seed)
    }

    fn spec(layer: u32, level: u32, bit: u32, trigger: FaultTrigger) -> FaultSpec {
        FaultSpec {
            target_layer: layer,
            level_in_tree: level,
            bit_index: bit,
            trigger,
            armed: true,
        }
    }

    #[test]
    fn unfired_fault_is_bit_identical_to_clean_signing() {
        let p = parameter_set("toy-e2e").unwrap();
        let kp = slh_keygen(p, b"fault seed");
        let clean = slh_sign(p, b"msg", &kp, SignMode::Deterministic, &[]);
        // Trigger scoped to another signing index.
        let rec = faulty_sign(
            p,
            b"msg",
            &kp,
            SignMode::Deterministic,
            &spec(1, 2, 3, FaultTrigger::OnNthSigning(5)),
            1,
            &mut rng(0),
        );
        assert!(rec.fault_ground_truth.is_none());
        assert_eq!(rec.signature.to_bytes(p), clean.to_bytes(p));

        let mut disarmed = spec(1, 2, 3, FaultTrigger::Always);
        disarmed.armed = false;
        let rec = faulty_sign(p, b"msg", &kp, SignMode::Deterministic, &disarmed, 1, &mut rng(0));
        assert!(rec.fault_ground_truth.is_none());
        assert_eq!(rec.signature.to_bytes(p), clean.to_bytes(p));
    }

    #[test]
    fn fired_fault_rejects_and_localizes() {
        let p = parameter_set("toy-e2e").unwrap();
        let kp = slh_keygen(p, b"fault seed 2");
        for layer in 0..=p.d - 2 {
            for level in 1..=p.h_prime {
                let fault = spec(layer, level, 7, FaultTrigger::Always);
                fault.validate(p).unwrap();
                let rec = faulty_sign(p, b"hit", &kp, SignMode::Deterministic, &fault, 1, &mut rng(1));
                let event = rec.fault_ground_truth.expect("always fires");
                assert_eq!(event.layer, layer);
                assert_eq!(event.level, level);
                assert!(
                    !slh_verify(p, b"hit", &rec.signature, &kp.pk_seed, &kp.pk_root),
                    "layer {layer} level {level}"
                );
                assert_eq!(
                    boundary_analysis(p, &kp, &rec),
                    [layer],
                    "layer {layer} level {level}"
                );
            }
        }
    }

    #[test]
    fn clean_record_has_no_inconsistent_boundary() {
        let p = parameter_set("toy-e2e").unwrap();
        let kp = slh_keygen(p, b"fault seed 3");
        let mut r = rng(2);
        let rec = faulty_sign(
            p,
            b"clean",
            &kp,
            SignMode::Randomized,
            &spec(0, 1, 0, FaultTrigger::PerSigningProbability(0.0)),
            1,
            &mut r,
        );
        assert!(rec.fault_ground_truth.is_none());
        assert!(slh_verify(p, b"clean", &rec.signature, &kp.pk_seed, &kp.pk_root));
        assert!(boundary_analysis(p, &kp, &rec).is_empty());
    }

    #[test]
    fn spec_validation_bounds() {
        let p = parameter_set("toy-e2e").unwrap();
        assert!(spec(0, 1, 0, FaultTrigger::Always).validate(p).is_ok());
        assert!(spec(p.d - 1, 1, 0, FaultTrigger::Always).validate(p).is_err());
        assert!(spec(0, 0, 0, FaultTrigger::Always).validate(p).is_err());
        assert!(spec(0, p.h_prime + 1, 0, FaultTrigger::Always).validate(p).is_err());
        assert!(spec(0, 1, 8 * p.n as u32, FaultTrigger::Always).validate(p).is_err());
        assert!(spec(0, 1, 0, FaultTrigger::PerSigningProbability(1.5))
            .validate(p)
            .is_err());
    }

    #[test]
    fn probability_trigger_is_reproducible() {
        let p = parameter_set("toy-e2e").unwrap();
        let kp = slh_keygen(p, b"fault seed 4");
        let fault = spec(1, 2, 11, FaultTrigger::PerSigningProbability(0.5));
        let run = |seed: u64| {
            let mut r = rng(seed);
            (1..=8u64)
                .map(|i| {
                    faulty_sign(p, b"m", &kp, SignMode::Deterministic, &fault, i, &mut r)
                        .fault_ground_truth
                        .is_some()
                })
                .collect::<alloc::vec::Vec<_>>()
        };
        assert_eq!(run(7), run(7));
        assert_ne!(run(7), run(8), "different seeds give different firings");
    }
}
