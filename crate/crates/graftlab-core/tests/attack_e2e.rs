//! End-to-end grafting attack on the toy hypertree: a faulted deterministic
//! signing campaign yields a compromised WOTS+ instance, a grafted seed and
//! a sought randomizer turn it into verifying forgeries on attacker-chosen
//! messages, and the analyzer's expectation matches the observed search.

use graftlab_core::complexity::{grafting_cost, p_signable, rank_instances, CostModel};
use graftlab_core::fault::{faulty_sign, Corpus, FaultSpec, FaultTrigger};
use graftlab_core::forge::forge;
use graftlab_core::graft::{dominates, graft_search};
use graftlab_core::identify::{identify_secrets, IdentifyMode, NotCompromised};
use graftlab_core::observe::extract_observations;
use graftlab_core::params::parameter_set;
use graftlab_core::search::SearchPlan;
use graftlab_core::seek::path_seek;
use graftlab_core::slh::{slh_keygen, slh_verify, SignMode};
use num_traits::ToPrimitive;
use rand_core::SeedableRng;

fn faulted_corpus(count: usize, probability: f64, seed: u64) -> (Corpus, graftlab_core::slh::KeyPair) {
    let params = parameter_set("toy-e2e").unwrap();
    let keypair = slh_keygen(params, b"attack-e2e victim");
    let fault = FaultSpec {
        target_layer: 1,
        level_in_tree: 2,
        bit_index: 4,
        trigger: FaultTrigger::PerSigningProbability(probability),
        armed: true,
    };
    fault.validate(params).unwrap();
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let records = (1..=count as u64)
        .map(|i| {
            faulty_sign(
                params,
                b"victim request",
                &keypair,
                SignMode::Deterministic,
                &fault,
                i,
                &mut rng,
            )
        })
        .collect();
    (
        Corpus {
            param_set: params.name.to_string(),
            pk_seed: keypair.pk_seed.clone(),
            pk_root: keypair.pk_root.clone(),
            records,
            complete: true,
        },
        keypair,
    )
}

#[test]
fn universal_forgery_end_to_end() {
    let params = parameter_set("toy-e2e").unwrap();
    let (corpus, keypair) = faulted_corpus(20, 0.8, 11);
    let fired = corpus
        .records
        .iter()
        .filter(|r| r.fault_ground_truth.is_some())
        .count();
    assert!(fired >= 16, "want at least 16 faulted records, got {fired}");
    assert!(fired < 20, "want clean reference records too");

    // Analysis never touches fault_ground_truth or the secret key.
    let (groups, skipped) = extract_observations(params, &corpus);
    assert_eq!(skipped, 0);
    let mut compromised = Vec::new();
    for group in groups.values() {
        match identify_secrets(params, &corpus.pk_seed, group, &corpus, IdentifyMode::Search) {
            Ok(instance) => compromised.push(instance),
            Err(NotCompromised::NoDistinctValues) | Err(NotCompromised::SingleObservation) => {}
            Err(e) => panic!("unexpected identification failure: {e}"),
        }
    }
    assert_eq!(compromised.len(), 1, "exactly the layer above the fault");
    let instance = &compromised[0];
    assert_eq!(instance.address.layer, 2);
    assert!(instance.distinct_values.len() >= 2);

    // Ranking reproduces the single instance and its layer.
    let model = CostModel::for_params(params);
    let report = rank_instances(params, &model, &compromised).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].seeking_log2, params.h - params.h_prime * 2);

    // Graft once.
    let p = p_signable(params, &instance.exposed_min);
    let (expected_attempts, _) = grafting_cost(&p, &model).unwrap();
    let plan = SearchPlan {
        workers: 1,
        batch: 64,
        budget: 1 << 22,
    };
    let graft = graft_search(
        params,
        instance,
        &corpus.pk_seed,
        &[21u8; 32],
        &plan,
        expected_attempts.to_f64(),
    )
    .unwrap();
    assert!(dominates(&graft.digits, &instance.exposed_min));

    // Forge two attacker messages, re-seeking the path but reusing the graft.
    for (message, seek_seed) in [
        (b"forged-by-graftlab".as_slice(), [5u8; 32]),
        (b"second forged message", [6u8; 32]),
    ] {
        let seek = path_seek(
            params,
            &corpus.pk_seed,
            &corpus.pk_root,
            message,
            instance.address.layer,
            graft.grafted_index,
            &seek_seed,
            &plan,
        )
        .unwrap();
        let forged = forge(
            params,
            message,
            instance,
            &graft,
            &seek,
            &corpus.pk_seed,
            &corpus.pk_root,
        )
        .unwrap();
        assert!(
            slh_verify(params, message, &forged, &keypair.pk_seed, &keypair.pk_root),
            "forged signature must verify under the victim key"
        );

        // The value the compromised layer signs, recomputed from the forged
        // signature's own lower components, is exactly the grafted root.
        let (groups, _) = extract_observations(
            params,
            &Corpus {
                param_set: corpus.param_set.clone(),
                pk_seed: corpus.pk_seed.clone(),
                pk_root: corpus.pk_root.clone(),
                records: vec![graftlab_core::fault::SignatureRecord {
                    message: message.to_vec(),
                    randomizer: forged.randomizer.clone(),
                    signature: forged.clone(),
                    mode: SignMode::Randomized,
                    fault_ground_truth: None,
                }],
                complete: true,
            },
        );
        let forged_observation = groups
            .get(&instance.address)
            .expect("forged path visits the compromised instance")
            .first()
            .unwrap()
            .clone();
        assert_eq!(
            forged_observation.signed_value,
            graft.root.as_bytes(),
            "layer-L_w signed value equals the grafted root"
        );

        // Soundness spot check: tampering one forged WOTS+ byte rejects.
        let mut tampered = forged.clone();
        tampered.ht_sigs[2].wots_sig.nodes[3].flip_bit(1);
        assert!(!slh_verify(
            params,
            message,
            &tampered,
            &keypair.pk_seed,
            &keypair.pk_root
        ));
    }
}

#[test]
fn every_fired_fault_rejects_and_localizes() {
    let params = parameter_set("toy-e2e").unwrap();
    let (corpus, keypair) = faulted_corpus(40, 0.5, 13);
    let mut fired = 0;
    for record in &corpus.records {
        let ok = slh_verify(
            params,
            &record.message,
            &record.signature,
            &corpus.pk_seed,
            &corpus.pk_root,
        );
        let boundaries = graftlab_core::fault::boundary_analysis(params, &keypair, record);
        match record.fault_ground_truth {
            Some(event) => {
                fired += 1;
                assert!(!ok, "fired fault must reject");
                assert_eq!(boundaries, vec![event.layer]);
            }
            None => {
                assert!(ok, "clean record must verify");
                assert!(boundaries.is_empty());
            }
        }
    }
    assert!(fired >= 10);
}

#[test]
fn graft_attempts_follow_the_analyzer_expectation() {
    // Geometric-law check at toy scale: over many independent seeded runs,
    // the mean attempt count stays within 2x of 1/P(signable).
    let params = parameter_set("toy-w4").unwrap();
    let instance = graftlab_core::identify::CompromisedInstance {
        address: graftlab_core::observe::InstanceAddress {
            layer: 1,
            tree: 0,
            keypair: 2,
        },
        exposed_min: vec![1, 0, 2, 3, 1, 1],
        exposed_nodes: vec![graftlab_core::hashes::Node::from_slice(&[0]); 6],
        auth_path: vec![],
        upper_layers: vec![],
        observation_count: 2,
        accepted_count: 2,
        distinct_values: vec![],
        hash_ops: 0,
    };
    let p = p_signable(params, &instance.exposed_min).to_f64().unwrap();
    assert!((p - 4.0 / 256.0).abs() < 1e-12);
    let expectation = 1.0 / p;

    let plan = SearchPlan::sequential(1 << 20);
    let runs = 120;
    let mut total = 0u64;
    for i in 0..runs {
        let mut seed = [0u8; 32];
        seed[0] = i as u8;
        seed[1] = 0x9e;
        let result = graft_search(params, &instance, &[0x77], &seed, &plan, Some(expectation)).unwrap();
        total += result.attempts;
    }
    let mean = total as f64 / runs as f64;
    assert!(
        mean > expectation / 2.0 && mean < expectation * 2.0,
        "mean {mean} vs expectation {expectation}"
    );
}
