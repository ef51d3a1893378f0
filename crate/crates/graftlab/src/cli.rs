//! Command-line surface: one subcommand per attack stage, composable
//! through artifact files, with every stage seeded explicitly so whole
//! sessions replay bit-identically.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use graftlab_core::complexity::{
    grafting_cost, p_signable, rank_instances, CostModel,
};
use graftlab_core::fault::{FaultSpec, FaultTrigger};
use graftlab_core::forge::forge;
use graftlab_core::graft::{graft_candidate, GraftResult};
use graftlab_core::identify::{identify_secrets, grafted_subtree_index, IdentifyMode};
use graftlab_core::observe::extract_observations;
use graftlab_core::params::parameter_set;
use graftlab_core::search::{search_sequential, SearchPlan};
use graftlab_core::seek::{seek_candidate, PathSeekResult};
use graftlab_core::slh::{slh_keygen, slh_verify, SignMode};
use num_traits::ToPrimitive;

use crate::artifacts;
use crate::campaign::{run_campaign, CampaignConfig, CampaignError, MessagePolicy, SimulatedSigner};
use crate::corpus_io;
use crate::parallel::search_parallel;
use crate::report;

/// Exit codes: 0 success, 1 negative result, 2 usage error.
pub enum CliError {
    Usage(String),
    Negative(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Negative(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Negative(m) => m,
        }
    }
}

fn usage(msg: impl ToString) -> CliError {
    CliError::Usage(msg.to_string())
}

#[derive(Parser)]
#[command(
    name = "graftlab",
    version,
    about = "SLH-DSA fault-attack laboratory: simulated bit-flip campaigns, grafting-tree forgeries, and exact complexity analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a victim key pair into a directory
    Keygen(KeygenArgs),
    /// Run a simulated fault-injection signing campaign
    Campaign(CampaignArgs),
    /// Extract observations, identify compromised instances, rank them
    Analyze(AnalyzeArgs),
    /// Search an attacker seed grafting onto a compromised instance
    Graft(GraftArgs),
    /// Search a randomizer routing a message through the grafted subtree
    Seek(SeekArgs),
    /// Assemble a forgery from graft and seek artifacts
    Forge(ForgeArgs),
    /// Verify a signature file against a victim public key
    Verify(VerifyArgs),
}

/// Key=value config file; explicit flags override its entries.
struct ConfigMap(BTreeMap<String, String>);

impl ConfigMap {
    fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        if let Some(path) = path {
            let content = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("config {}: {e}", path.display())))?;
            for line in content.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| usage(format!("config line `{line}` is not key=value")))?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(ConfigMap(map))
    }

    fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config `{key}={raw}`: {e}"))),
        }
    }

    fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.resolve(flag, key)?
            .ok_or_else(|| usage(format!("missing --{key} (flag or config)")))
    }
}

fn parse_hex(value: &str, what: &str) -> Result<Vec<u8>, CliError> {
    hex::decode(value).map_err(|e| usage(format!("{what}: {e}")))
}

fn parse_mode(value: &str) -> Result<SignMode, CliError> {
    match value {
        "det" => Ok(SignMode::Deterministic),
        "rand" => Ok(SignMode::Randomized),
        other => Err(usage(format!("mode `{other}` must be det|rand"))),
    }
}

/// `layer:level:bit:trigger` with trigger `always`, `nth=N`, or `prob=P`.
fn parse_fault(value: &str) -> Result<FaultSpec, CliError> {
    let parts: Vec<&str> = value.split(':').collect();
    if parts.len() != 4 {
        return Err(usage(format!(
            "fault `{value}` must be layer:level:bit:trigger"
        )));
    }
    let field = |i: usize, what: &str| -> Result<u32, CliError> {
        parts[i]
            .parse()
            .map_err(|e| usage(format!("fault {what} `{}`: {e}", parts[i])))
    };
    let trigger = if parts[3] == "always" {
        FaultTrigger::Always
    } else if let Some(n) = parts[3].strip_prefix("nth=") {
        FaultTrigger::OnNthSigning(n.parse().map_err(|e| usage(format!("fault nth: {e}")))?)
    } else if let Some(p) = parts[3].strip_prefix("prob=") {
        FaultTrigger::PerSigningProbability(
            p.parse().map_err(|e| usage(format!("fault prob: {e}")))?,
        )
    } else {
        return Err(usage(format!(
            "fault trigger `{}` must be always|nth=N|prob=P",
            parts[3]
        )));
    };
    Ok(FaultSpec {
        target_layer: field(0, "layer")?,
        level_in_tree: field(1, "level")?,
        bit_index: field(2, "bit")?,
        trigger,
        armed: true,
    })
}

fn search_plan(workers: u32, batch: u32, budget: u64) -> Result<SearchPlan, CliError> {
    if workers == 0 || batch == 0 {
        return Err(usage("workers and batch must be positive"));
    }
    Ok(SearchPlan {
        workers,
        batch,
        budget,
    })
}

/// Runs the parallel driver when more than one worker is requested.
fn run_search(
    candidate_len: usize,
    seed: u64,
    label: &str,
    plan: &SearchPlan,
    accept: impl Fn(&[u8]) -> bool + Sync,
    expected: Option<f64>,
) -> Result<(Vec<u8>, u64), CliError> {
    let base_seed = graftlab_core::hashes::derive_seed(&seed.to_be_bytes(), label);
    let outcome = if plan.workers == 1 {
        search_sequential(candidate_len, &base_seed, label, plan, accept, expected)
    } else {
        search_parallel(candidate_len, &base_seed, label, plan, &accept, expected)
    };
    outcome.map_err(|e| CliError::Negative(e.to_string()))
}

#[derive(Args)]
struct KeygenArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter set name, e.g. SHA2-128f or toy-e2e
    #[arg(long = "param-set")]
    param_set: Option<String>,
    /// Key derivation seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for victim.pk / victim.sk
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_keygen(args: KeygenArgs) -> Result<(), CliError> {
    let cfg = ConfigMap::load(args.config.as_ref())?;
    let name: String = cfg.require(args.param_set, "param-set")?;
    let seed: u64 = cfg.require(args.seed, "seed")?;
    let out: PathBuf = cfg.require(args.out, "out")?;
    let params = parameter_set(&name).map_err(usage)?;
    let keypair = slh_keygen(params, &seed.to_be_bytes());
    let (pk, sk) =
        artifacts::save_keypair(&out, params, &keypair).map_err(usage)?;
    artifacts::append_manifest(&pk, "keygen", Some(seed), "-").map_err(usage)?;
    println!("wrote {} and {}", pk.display(), sk.display());
    Ok(())
}

#[derive(Args)]
struct CampaignArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Victim secret key file (from keygen)
    #[arg(long)]
    sk: Option<PathBuf>,
    /// det or rand
    #[arg(long)]
    mode: Option<String>,
    /// Fixed message for every request, hex
    #[arg(long = "message-hex")]
    message_hex: Option<String>,
    /// Fresh random message of this many bytes per request
    #[arg(long = "random-messages")]
    random_messages: Option<usize>,
    /// Fault spec layer:level:bit:trigger (trigger: always|nth=N|prob=P)
    #[arg(long)]
    fault: Option<String>,
    /// Number of signing requests
    #[arg(long)]
    count: Option<usize>,
    /// Campaign seed
    #[arg(long)]
    seed: Option<u64>,
    /// Corpus output path
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_campaign(args: CampaignArgs) -> Result<(), CliError> {
    let cfg = ConfigMap::load(args.config.as_ref())?;
    let sk_path: PathBuf = cfg.require(args.sk, "sk")?;
    let (params, keypair) = artifacts::load_secret_key(&sk_path).map_err(usage)?;
    let mode = parse_mode(&cfg.require::<String>(args.mode, "mode")?)?;
    let message_hex: Option<String> = cfg.resolve(args.message_hex, "message-hex")?;
    let random_messages: Option<usize> = cfg.resolve(args.random_messages, "random-messages")?;
    let policy = match (message_hex, random_messages) {
        (Some(hex_msg), None) => MessagePolicy::Fixed(parse_hex(&hex_msg, "message-hex")?),
        (None, Some(len)) => MessagePolicy::FreshRandom { len },
        (None, None) => return Err(usage("need --message-hex or --random-messages")),
        (Some(_), Some(_)) => {
            return Err(usage("--message-hex and --random-messages are exclusive"))
        }
    };
    let fault = parse_fault(&cfg.require::<String>(args.fault, "fault")?)?;
    fault.validate(params).map_err(usage)?;
    let count: usize = cfg.require(args.count, "count")?;
    let seed: u64 = cfg.require(args.seed, "seed")?;
    let out: PathBuf = cfg.require(args.out, "out")?;

    let config = CampaignConfig {
        param_set: params.name.to_string(),
        mode,
        policy,
        fault: fault.clone(),
        count,
        seed,
    };
    let mut victim = SimulatedSigner::new(params, keypair, mode, fault, seed);
    let digest = artifacts::input_digest(&[&sk_path]).map_err(usage)?;
    match run_campaign(&config, &mut victim) {
        Ok(corpus) => {
            corpus_io::save_corpus_file(&corpus, &out).map_err(usage)?;
            artifacts::append_manifest(&out, "campaign", Some(seed), &digest)
                .map_err(usage)?;
            let fired = corpus
                .records
                .iter()
                .filter(|r| r.fault_ground_truth.is_some())
                .count();
            println!(
                "wrote {} ({} records, {} faulted)",
                out.display(),
                corpus.records.len(),
                fired
            );
            Ok(())
        }
        Err(CampaignError::Victim { error, partial }) => {
            corpus_io::save_corpus_file(&partial, &out).map_err(usage)?;
            Err(CliError::Negative(format!(
                "{error}; partial corpus written to {}",
                out.display()
            )))
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus file to analyze
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Analysis artifact output (instances for later stages)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Machine-readable report output
    #[arg(long)]
    machine: Option<PathBuf>,
    /// Identification mode: search (default) or direct
    #[arg(long)]
    identify: Option<String>,
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let cfg = ConfigMap::load(args.config.as_ref())?;
    let corpus_path: PathBuf = cfg.require(args.corpus, "corpus")?;
    let out: Option<PathBuf> = cfg.resolve(args.out, "out")?;
    let machine: Option<PathBuf> = cfg.resolve(args.machine, "machine")?;
    let mode = match cfg
        .resolve(args.identify, "identify")?
        .unwrap_or_else(|| "search".to_string())
        .as_str()
    {
        "search" => IdentifyMode::Search,
        "direct" => IdentifyMode::Direct,
        other => return Err(usage(format!("identify `{other}` must be search|direct"))),
    };

    let (corpus, params) = corpus_io::load_corpus_file(&corpus_path).map_err(usage)?;
    let (groups, skipped) = extract_observations(params, &corpus);
    if skipped > 0 {
        eprintln!("warning: skipped {skipped} malformed records");
    }
    let mut instances = Vec::new();
    for group in groups.values() {
        if let Ok(instance) = identify_secrets(params, &corpus.pk_seed, group, &corpus, mode) {
            instances.push(instance);
        }
    }
    let model = CostModel::for_params(params);
    let ranked = rank_instances(params, &model, &instances)
        .map_err(|_| CliError::Negative("no compromised instances in corpus".to_string()))?;
    print!("{}", report::render_table(&ranked));

    if let Some(machine_path) = &machine {
        std::fs::write(machine_path, report::render_machine(&ranked))
            .map_err(|e| usage(format!("{}: {e}", machine_path.display())))?;
    }
    if let Some(out) = &out {
        // Pair ranked rows with their instances by address.
        let pairs: Vec<_> = ranked
            .rows
            .iter()
            .map(|row| {
                let inst = instances
                    .iter()
                    .find(|i| i.address == row.address)
                    .expect("row addresses come from instances");
                (row, inst)
            })
            .collect();
        let digest = artifacts::input_digest(&[&corpus_path]).map_err(usage)?;
        artifacts::save_analysis(out, params, &corpus.pk_seed, &corpus.pk_root, &pairs, &digest)
            .map_err(usage)?;
        artifacts::append_manifest(out, "analyze", None, &digest).map_err(usage)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

#[derive(Args)]
struct GraftArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Analysis artifact (from analyze)
    #[arg(long)]
    analysis: Option<PathBuf>,
    /// Which ranked instance to graft (default: best)
    #[arg(long)]
    instance: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Candidate budget
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    workers: Option<u32>,
    /// Candidates per worker round
    #[arg(long)]
    batch: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_graft(args: GraftArgs) -> Result<(), CliError> {
    let cfg = ConfigMap::load(args.config.as_ref())?;
    let analysis_path: PathBuf = cfg.require(args.analysis, "analysis")?;
    let rank: usize = cfg.resolve(args.instance, "instance")?.unwrap_or(0);
    let seed: u64 = cfg.require(args.seed, "seed")?;
    let budget: u64 = cfg.resolve(args.budget, "budget")?.unwrap_or(1 << 32);
    let workers: u32 = cfg.resolve(args.workers, "workers")?.unwrap_or(1);
    let batch: u32 = cfg.resolve(args.batch, "batch")?.unwrap_or(64);
    let out: PathBuf = cfg.require(args.out, "out")?;

    let analysis = artifacts::load_analysis(&analysis_path).map_err(usage)?;
    let instance = analysis
        .instances
        .get(rank)
        .ok_or_else(|| usage(format!("analysis has no instance ranked {rank}")))?;
    let params = analysis.params;
    let plan = search_plan(workers, batch, budget)?;
    let p = p_signable(params, &instance.exposed_min);
    let model = CostModel::for_params(params);
    let expected = grafting_cost(&p, &model)
        .ok()
        .and_then(|(attempts, _)| attempts.to_f64());

    let layer = instance.address.layer;
    let grafted_index = grafted_subtree_index(params, &instance.address);
    let pk_seed = analysis.pk_seed.clone();
    let exposed_min = instance.exposed_min.clone();
    let (sk_seed, attempts) = run_search(
        params.n,
        seed,
        "graft",
        &plan,
        |candidate| {
            graft_candidate(params, candidate, &pk_seed, layer, grafted_index, &exposed_min)
                .is_some()
        },
        expected,
    )?;
    let (root, digits) =
        graft_candidate(params, &sk_seed, &pk_seed, layer, grafted_index, &exposed_min)
            .expect("accepted candidate grafts");
    let result = GraftResult {
        sk_seed,
        root,
        digits,
        grafted_index,
        attempts,
    };
    let digest = artifacts::input_digest(&[&analysis_path]).map_err(usage)?;
    artifacts::save_graft(&out, params, &instance.address, &result, seed, workers, &digest)
        .map_err(usage)?;
    artifacts::append_manifest(&out, "graft", Some(seed), &digest).map_err(usage)?;
    println!(
        "wrote {} (attempts {}, expected {})",
        out.display(),
        result.attempts,
        expected.map_or("-".to_string(), |e| format!("{e:.1}"))
    );
    Ok(())
}

#[derive(Args)]
struct SeekArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    analysis: Option<PathBuf>,
    #[arg(long)]
    graft: Option<PathBuf>,
    /// Attacker-chosen message, hex
    #[arg(long = "message-hex")]
    message_hex: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    workers: Option<u32>,
    #[arg(long)]
    batch: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_seek(args: SeekArgs) -> Result<(), CliError> {
    let cfg = ConfigMap::load(args.config.as_ref())?;
    let analysis_path: PathBuf = cfg.require(args.analysis, "analysis")?;
    let graft_path: PathBuf = cfg.require(args.graft, "graft")?;
    let message = parse_hex(&cfg.require::<String>(args.message_hex, "message-hex")?, "message-hex")?;
    let seed: u64 = cfg.require(args.seed, "seed")?;
    let budget: u64 = cfg.resolve(args.budget, "budget")?.unwrap_or(1 << 32);
    let workers: u32 = cfg.resolve(args.workers, "workers")?.unwrap_or(1);
    let batch: u32 = cfg.resolve(args.batch, "batch")?.unwrap_or(64);
    let out: PathBuf = cfg.require(args.out, "out")?;

    let analysis = artifacts::load_analysis(&analysis_path).map_err(usage)?;
    let graft_file = artifacts::load_graft(&graft_path).map_err(usage)?;
    if graft_file.params.name != analysis.params.name {
        return Err(usage("analysis and graft use different parameter sets"));
    }
    let params = analysis.params;
    let plan = search_plan(workers, batch, budget)?;
    let layer = graft_file.address.layer;
    let grafted_index = graft_file.result.grafted_index;
    let pk_seed = analysis.pk_seed.clone();
    let pk_root = analysis.pk_root.clone();
    let msg = message.clone();
    let (randomizer, attempts) = run_search(
        params.n,
        seed,
        "seek",
        &plan,
        |candidate| seek_candidate(params, candidate, &pk_seed, &pk_root, &msg, layer, grafted_index),
        Some((1u128 << graftlab_core::seek::seek_exponent(params, layer).min(127)) as f64),
    )?;
    let result = PathSeekResult {
        randomizer,
        attempts,
    };
    let digest = artifacts::input_digest(&[&analysis_path, &graft_path]).map_err(usage)?;
    artifacts::save_seek(
        &out,
        params,
        &message,
        layer,
        grafted_index,
        &result,
        seed,
        workers,
        &digest,
    )
    .map_err(usage)?;
    artifacts::append_manifest(&out, "seek", Some(seed), &digest).map_err(usage)?;
    println!("wrote {} (attempts {})", out.display(), result.attempts);
    Ok(())
}

#[derive(Args)]
struct ForgeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    analysis: Option<PathBuf>,
    #[arg(long)]
    graft: Option<PathBuf>,
    #[arg(long)]
    seek: Option<PathBuf>,
    /// Must match the message the seek artifact was produced for
    #[arg(long = "message-hex")]
    message_hex: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_forge(args: ForgeArgs) -> Result<(), CliError> {
    let cfg = ConfigMap::load(args.config.as_ref())?;
    let analysis_path: PathBuf = cfg.require(args.analysis, "analysis")?;
    let graft_path: PathBuf = cfg.require(args.graft, "graft")?;
    let seek_path: PathBuf = cfg.require(args.seek, "seek")?;
    let out: PathBuf = cfg.require(args.out, "out")?;

    let analysis = artifacts::load_analysis(&analysis_path).map_err(usage)?;
    let graft_file = artifacts::load_graft(&graft_path).map_err(usage)?;
    let seek_file = artifacts::load_seek(&seek_path).map_err(usage)?;
    let message = match cfg.resolve::<String>(args.message_hex, "message-hex")? {
        Some(hex_msg) => {
            let m = parse_hex(&hex_msg, "message-hex")?;
            if m != seek_file.message {
                return Err(usage("message differs from the seek artifact's message"));
            }
            m
        }
        None => seek_file.message.clone(),
    };
    let params = analysis.params;
    if graft_file.params.name != params.name || seek_file.params.name != params.name {
        return Err(usage("artifacts use different parameter sets"));
    }
    let instance = analysis
        .instances
        .iter()
        .find(|i| i.address == graft_file.address)
        .ok_or_else(|| usage("graft instance is not present in the analysis artifact"))?;

    let signature = forge(
        params,
        &message,
        instance,
        &graft_file.result,
        &seek_file.result,
        &analysis.pk_seed,
        &analysis.pk_root,
    )
    .map_err(|e| usage(format!("forge: {e}")))?;
    let digest = artifacts::input_digest(&[&analysis_path, &graft_path, &seek_path])
        .map_err(usage)?;
    artifacts::save_forgery(&out, params, &message, &signature, &digest).map_err(usage)?;
    artifacts::append_manifest(&out, "forge", None, &digest).map_err(usage)?;
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Victim public key file
    #[arg(long)]
    pk: Option<PathBuf>,
    /// Forgery (or signature) artifact
    #[arg(long)]
    forgery: Option<PathBuf>,
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let cfg = ConfigMap::load(args.config.as_ref())?;
    let pk_path: PathBuf = cfg.require(args.pk, "pk")?;
    let forgery_path: PathBuf = cfg.require(args.forgery, "forgery")?;
    let pk = artifacts::load_public_key(&pk_path).map_err(usage)?;
    let forgery = artifacts::load_forgery(&forgery_path).map_err(usage)?;
    if forgery.params.name != pk.params.name {
        return Err(usage("signature and key use different parameter sets"));
    }
    if slh_verify(
        pk.params,
        &forgery.message,
        &forgery.signature,
        &pk.pk_seed,
        &pk.pk_root,
    ) {
        println!("accept");
        Ok(())
    } else {
        Err(CliError::Negative("reject".to_string()))
    }
}

/// Parses argv and runs one stage; the returned code is the process exit
/// status.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Keygen(args) => cmd_keygen(args),
        Command::Campaign(args) => cmd_campaign(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Graft(args) => cmd_graft(args),
        Command::Seek(args) => cmd_seek(args),
        Command::Forge(args) => cmd_forge(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.message());
            e.code()
        }
    }
}
