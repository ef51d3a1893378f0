//! Signing-campaign orchestration against a victim behind the four-hook
//! wrapper: each attack cycle runs `start -> init -> check -> stop`, and
//! the collected records form a corpus.

use graftlab_core::fault::{faulty_sign, Corpus, FaultSpec, SignatureRecord};
use graftlab_core::hashes::derive_seed;
use graftlab_core::params::ParameterSet;
use graftlab_core::slh::{KeyPair, SignMode};
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

/// How campaign messages are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MessagePolicy {
    /// Every request signs the same message.
    Fixed(Vec<u8>),
    /// Every request signs a fresh random message of this length.
    FreshRandom { len: usize },
}

/// One campaign's shape. All randomness derives from `seed`.
#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub param_set: String,
    pub mode: SignMode,
    pub policy: MessagePolicy,
    pub fault: FaultSpec,
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Error)]
#[error("victim {stage} failed: {reason}")]
pub struct VictimError {
    pub stage: &'static str,
    pub reason: String,
}

/// The victim abstraction: the orchestrator only ever calls these four
/// hooks, in order, once per attack cycle.
pub trait VictimWrapper {
    /// Victim public key the corpus records against.
    fn public_key(&self) -> (Vec<u8>, Vec<u8>);
    /// Begin an attack cycle (spawn or reset the victim).
    fn start(&mut self) -> Result<(), VictimError>;
    /// Submit a signing request; the fault oracle is live while it runs.
    fn init(&mut self, message: &[u8]) -> Result<(), VictimError>;
    /// Collect the cycle's outcome.
    fn check(&mut self) -> Result<SignatureRecord, VictimError>;
    /// End the cycle.
    fn stop(&mut self) -> Result<(), VictimError>;
}

/// In-process victim signer with the fault oracle attached.
pub struct SimulatedSigner {
    params: &'static ParameterSet,
    keypair: KeyPair,
    mode: SignMode,
    fault: FaultSpec,
    rng: ChaCha20Rng,
    signings: u64,
    pending: Option<SignatureRecord>,
}

impl SimulatedSigner {
    pub fn new(
        params: &'static ParameterSet,
        keypair: KeyPair,
        mode: SignMode,
        fault: FaultSpec,
        campaign_seed: u64,
    ) -> Self {
        let seed = derive_seed(&campaign_seed.to_be_bytes(), "campaign-victim");
        SimulatedSigner {
            params,
            keypair,
            mode,
            fault,
            rng: ChaCha20Rng::from_seed(seed),
            signings: 0,
            pending: None,
        }
    }
}

impl VictimWrapper for SimulatedSigner {
    fn public_key(&self) -> (Vec<u8>, Vec<u8>) {
        (self.keypair.pk_seed.clone(), self.keypair.pk_root.clone())
    }

    fn start(&mut self) -> Result<(), VictimError> {
        self.pending = None;
        Ok(())
    }

    fn init(&mut self, message: &[u8]) -> Result<(), VictimError> {
        self.signings += 1;
        self.pending = Some(faulty_sign(
            self.params,
            message,
            &self.keypair,
            self.mode,
            &self.fault,
            self.signings,
            &mut self.rng,
        ));
        Ok(())
    }

    fn check(&mut self) -> Result<SignatureRecord, VictimError> {
        self.pending.take().ok_or(VictimError {
            stage: "check",
            reason: "no signing in flight".to_string(),
        })
    }

    fn stop(&mut self) -> Result<(), VictimError> {
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CampaignError {
    /// A victim hook failed; the partial corpus is flagged incomplete.
    #[error("{error}; aborted with {} of the requested records", partial.records.len())]
    Victim {
        error: VictimError,
        partial: Box<Corpus>,
    },
}

/// Runs `count` attack cycles and collects the corpus. Deterministic for a
/// fixed config seed and victim.
pub fn run_campaign(
    config: &CampaignConfig,
    victim: &mut dyn VictimWrapper,
) -> Result<Corpus, CampaignError> {
    let mut message_rng = ChaCha20Rng::from_seed(derive_seed(
        &config.seed.to_be_bytes(),
        "campaign-messages",
    ));
    let (pk_seed, pk_root) = victim.public_key();
    let mut records = Vec::with_capacity(config.count);

    macro_rules! cycle_step {
        ($call:expr) => {
            match $call {
                Ok(value) => value,
                Err(error) => {
                    return Err(CampaignError::Victim {
                        error,
                        partial: Box::new(Corpus {
                            param_set: config.param_set.clone(),
                            pk_seed,
                            pk_root,
                            records,
                            complete: false,
                        }),
                    })
                }
            }
        };
    }

    for _ in 0..config.count {
        cycle_step!(victim.start());
        let message = match &config.policy {
            MessagePolicy::Fixed(m) => m.clone(),
            MessagePolicy::FreshRandom { len } => {
                let mut m = vec![0u8; *len];
                message_rng.fill_bytes(&mut m);
                m
            }
        };
        cycle_step!(victim.init(&message));
        let record = cycle_step!(victim.check());
        records.push(record);
        cycle_step!(victim.stop());
    }

    Ok(Corpus {
        param_set: config.param_set.clone(),
        pk_seed,
        pk_root,
        records,
        complete: true,
    })
}
