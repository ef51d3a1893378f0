//! Stage artifacts: key files, analysis output, graft/seek/forgery files,
//! and the session manifest. Every stage artifact records the seed and the
//! SHA-256 digest of its inputs, so a session replays bit-identically.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use graftlab_core::complexity::ReportRow;
use graftlab_core::graft::GraftResult;
use graftlab_core::hashes::Node;
use graftlab_core::identify::CompromisedInstance;
use graftlab_core::observe::InstanceAddress;
use graftlab_core::params::{parameter_set, ParameterSet};
use graftlab_core::seek::PathSeekResult;
use graftlab_core::slh::{KeyPair, SlhSignature};
use graftlab_core::wots::WotsSignature;
use graftlab_core::xmss::XmssSignature;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::kv::{format_digits, format_line, parse_digits, KvLine};

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("{path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn malformed(path: &Path, reason: impl ToString) -> ArtifactError {
    ArtifactError::Malformed {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

fn read_to_string(path: &Path) -> Result<String, ArtifactError> {
    std::fs::read_to_string(path).map_err(|source| ArtifactError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_string(path: &Path, content: &str) -> Result<(), ArtifactError> {
    std::fs::write(path, content).map_err(|source| ArtifactError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// SHA-256 of the files a stage consumed, for replay checks.
pub fn input_digest(paths: &[&Path]) -> Result<String, ArtifactError> {
    let mut hasher = Sha256::new();
    for path in paths {
        let bytes = std::fs::read(path).map_err(|source| ArtifactError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        hasher.update(&bytes);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Appends one stage line to the session manifest next to `artifact`.
pub fn append_manifest(
    artifact: &Path,
    stage: &str,
    seed: Option<u64>,
    digest: &str,
) -> Result<(), ArtifactError> {
    let dir = artifact.parent().unwrap_or(Path::new("."));
    let manifest = dir.join("session.manifest");
    let mut line = format_line(&[
        ("stage", stage.to_string()),
        (
            "path",
            artifact
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default(),
        ),
        ("input_digest", digest.to_string()),
    ]);
    if let Some(seed) = seed {
        let _ = write!(line, " seed={seed}");
    }
    let mut content = std::fs::read_to_string(&manifest).unwrap_or_default();
    content.push_str(&line);
    content.push('\n');
    write_string(&manifest, &content)
}

fn parse_single_line(path: &Path, expected_kind: &str) -> Result<KvLine, ArtifactError> {
    let content = read_to_string(path)?;
    let line = content
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| malformed(path, "empty file"))?;
    let kv = KvLine::parse(line).map_err(|e| malformed(path, e))?;
    match kv.get("kind") {
        Some(kind) if kind == expected_kind => Ok(kv),
        Some(kind) => Err(malformed(path, format!("kind `{kind}`, want `{expected_kind}`"))),
        None => Err(malformed(path, "missing kind")),
    }
}

fn params_from(path: &Path, kv: &KvLine) -> Result<&'static ParameterSet, ArtifactError> {
    let name = kv.require("param_set").map_err(|e| malformed(path, e))?;
    parameter_set(name).map_err(|e| malformed(path, e))
}

/// Writes `victim.pk` and `victim.sk` into `dir`.
pub fn save_keypair(
    dir: &Path,
    params: &ParameterSet,
    keypair: &KeyPair,
) -> Result<(PathBuf, PathBuf), ArtifactError> {
    std::fs::create_dir_all(dir).map_err(|source| ArtifactError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let pk = dir.join("victim.pk");
    let sk = dir.join("victim.sk");
    write_string(
        &pk,
        &format!(
            "{}\n",
            format_line(&[
                ("kind", "public-key".to_string()),
                ("param_set", params.name.to_string()),
                ("pk_seed_hex", hex::encode(&keypair.pk_seed)),
                ("pk_root_hex", hex::encode(&keypair.pk_root)),
            ])
        ),
    )?;
    write_string(
        &sk,
        &format!(
            "{}\n",
            format_line(&[
                ("kind", "secret-key".to_string()),
                ("param_set", params.name.to_string()),
                ("sk_seed_hex", hex::encode(&keypair.sk_seed)),
                ("sk_prf_hex", hex::encode(&keypair.sk_prf)),
                ("pk_seed_hex", hex::encode(&keypair.pk_seed)),
                ("pk_root_hex", hex::encode(&keypair.pk_root)),
            ])
        ),
    )?;
    Ok((pk, sk))
}

/// Victim public key file.
pub struct PublicKeyFile {
    pub params: &'static ParameterSet,
    pub pk_seed: Vec<u8>,
    pub pk_root: Vec<u8>,
}

pub fn load_public_key(path: &Path) -> Result<PublicKeyFile, ArtifactError> {
    let kv = parse_single_line(path, "public-key")?;
    let params = params_from(path, &kv)?;
    Ok(PublicKeyFile {
        params,
        pk_seed: kv.require_hex("pk_seed_hex").map_err(|e| malformed(path, e))?,
        pk_root: kv.require_hex("pk_root_hex").map_err(|e| malformed(path, e))?,
    })
}

pub fn load_secret_key(path: &Path) -> Result<(&'static ParameterSet, KeyPair), ArtifactError> {
    let kv = parse_single_line(path, "secret-key")?;
    let params = params_from(path, &kv)?;
    Ok((
        params,
        KeyPair {
            sk_seed: kv.require_hex("sk_seed_hex").map_err(|e| malformed(path, e))?,
            sk_prf: kv.require_hex("sk_prf_hex").map_err(|e| malformed(path, e))?,
            pk_seed: kv.require_hex("pk_seed_hex").map_err(|e| malformed(path, e))?,
            pk_root: kv.require_hex("pk_root_hex").map_err(|e| malformed(path, e))?,
        },
    ))
}

fn nodes_hex(nodes: &[Node]) -> String {
    let bytes: Vec<u8> = nodes.iter().flat_map(|n| n.as_bytes().to_vec()).collect();
    hex::encode(bytes)
}

fn nodes_from_hex(
    path: &Path,
    hex_str: &str,
    n: usize,
    expect: usize,
) -> Result<Vec<Node>, ArtifactError> {
    let bytes = hex::decode(hex_str).map_err(|e| malformed(path, e))?;
    if bytes.len() != n * expect {
        return Err(malformed(
            path,
            format!("node field holds {} bytes, want {}", bytes.len(), n * expect),
        ));
    }
    Ok(bytes.chunks(n).map(Node::from_slice).collect())
}

fn xmss_sigs_hex(sigs: &[XmssSignature]) -> String {
    let mut bytes = Vec::new();
    for sig in sigs {
        for node in &sig.wots_sig.nodes {
            bytes.extend_from_slice(node.as_bytes());
        }
        for node in &sig.auth_path {
            bytes.extend_from_slice(node.as_bytes());
        }
    }
    hex::encode(bytes)
}

fn xmss_sigs_from_hex(
    path: &Path,
    params: &ParameterSet,
    hex_str: &str,
) -> Result<Vec<XmssSignature>, ArtifactError> {
    let bytes = hex::decode(hex_str).map_err(|e| malformed(path, e))?;
    let per_sig = (params.ell + params.h_prime as usize) * params.n;
    if per_sig == 0 || bytes.len() % per_sig != 0 {
        return Err(malformed(path, "upper layer field length"));
    }
    Ok(bytes
        .chunks(per_sig)
        .map(|chunk| {
            let (wots, auth) = chunk.split_at(params.ell * params.n);
            XmssSignature {
                wots_sig: WotsSignature {
                    nodes: wots.chunks(params.n).map(Node::from_slice).collect(),
                },
                auth_path: auth.chunks(params.n).map(Node::from_slice).collect(),
            }
        })
        .collect())
}

/// A ranked instance plus everything the later stages need, as stored in
/// the analysis artifact.
pub struct AnalysisFile {
    pub params: &'static ParameterSet,
    pub pk_seed: Vec<u8>,
    pub pk_root: Vec<u8>,
    pub instances: Vec<CompromisedInstance>,
}

/// Writes the analysis artifact: header, then one instance line per ranked
/// row.
pub fn save_analysis(
    path: &Path,
    params: &ParameterSet,
    pk_seed: &[u8],
    pk_root: &[u8],
    ranked: &[(&ReportRow, &CompromisedInstance)],
    input_digest_hex: &str,
) -> Result<(), ArtifactError> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}",
        format_line(&[
            ("kind", "analysis".to_string()),
            ("param_set", params.name.to_string()),
            ("pk_seed_hex", hex::encode(pk_seed)),
            ("pk_root_hex", hex::encode(pk_root)),
            ("input_digest", input_digest_hex.to_string()),
        ])
    );
    for (rank, (row, inst)) in ranked.iter().enumerate() {
        let _ = writeln!(
            out,
            "{}",
            format_line(&[
                ("instance", rank.to_string()),
                ("layer", inst.address.layer.to_string()),
                ("tree", inst.address.tree.to_string()),
                ("keypair", inst.address.keypair.to_string()),
                ("observations", inst.observation_count.to_string()),
                ("accepted", inst.accepted_count.to_string()),
                ("exposed_min", format_digits(&inst.exposed_min)),
                ("exposed_nodes_hex", nodes_hex(&inst.exposed_nodes)),
                ("auth_hex", nodes_hex(&inst.auth_path)),
                ("upper_hex", xmss_sigs_hex(&inst.upper_layers)),
                ("identify_hashes", inst.hash_ops.to_string()),
                ("p_signable", row.p_signable.to_string()),
                ("grafting_log2", format!("{:.2}", row.grafting_hashes_log2)),
                ("seeking_log2", row.seeking_log2.to_string()),
                ("total_log2", format!("{:.2}", row.total_log2)),
            ])
        );
    }
    write_string(path, &out)
}

pub fn load_analysis(path: &Path) -> Result<AnalysisFile, ArtifactError> {
    let content = read_to_string(path)?;
    let mut lines = content.lines().filter(|l| !l.trim().is_empty());
    let header = KvLine::parse(lines.next().ok_or_else(|| malformed(path, "empty file"))?)
        .map_err(|e| malformed(path, e))?;
    if header.get("kind") != Some("analysis") {
        return Err(malformed(path, "not an analysis artifact"));
    }
    let params = params_from(path, &header)?;
    let pk_seed = header.require_hex("pk_seed_hex").map_err(|e| malformed(path, e))?;
    let pk_root = header.require_hex("pk_root_hex").map_err(|e| malformed(path, e))?;

    let mut instances = Vec::new();
    for line in lines {
        let kv = KvLine::parse(line).map_err(|e| malformed(path, e))?;
        let exposed_min =
            parse_digits(kv.require("exposed_min").map_err(|e| malformed(path, e))?)
                .map_err(|e| malformed(path, e))?;
        if exposed_min.len() != params.ell {
            return Err(malformed(path, "exposed_min length"));
        }
        let exposed_nodes = nodes_from_hex(
            path,
            kv.require("exposed_nodes_hex").map_err(|e| malformed(path, e))?,
            params.n,
            params.ell,
        )?;
        let auth_path = nodes_from_hex(
            path,
            kv.require("auth_hex").map_err(|e| malformed(path, e))?,
            params.n,
            params.h_prime as usize,
        )?;
        let layer: u32 = kv.require_parse("layer").map_err(|e| malformed(path, e))?;
        if layer >= params.d {
            return Err(malformed(path, "instance layer out of range"));
        }
        let upper_layers = xmss_sigs_from_hex(
            path,
            params,
            kv.require("upper_hex").map_err(|e| malformed(path, e))?,
        )?;
        if upper_layers.len() != (params.d - 1 - layer) as usize {
            return Err(malformed(path, "upper layer count"));
        }
        instances.push(CompromisedInstance {
            address: InstanceAddress {
                layer,
                tree: kv.require_parse("tree").map_err(|e| malformed(path, e))?,
                keypair: kv.require_parse("keypair").map_err(|e| malformed(path, e))?,
            },
            exposed_min,
            exposed_nodes,
            auth_path,
            upper_layers,
            observation_count: kv
                .require_parse("observations")
                .map_err(|e| malformed(path, e))?,
            accepted_count: kv.require_parse("accepted").map_err(|e| malformed(path, e))?,
            distinct_values: vec![],
            hash_ops: kv
                .require_parse("identify_hashes")
                .map_err(|e| malformed(path, e))?,
        });
    }
    Ok(AnalysisFile {
        params,
        pk_seed,
        pk_root,
        instances,
    })
}

/// Graft artifact.
pub fn save_graft(
    path: &Path,
    params: &ParameterSet,
    address: &InstanceAddress,
    result: &GraftResult,
    seed: u64,
    workers: u32,
    input_digest_hex: &str,
) -> Result<(), ArtifactError> {
    write_string(
        path,
        &format!(
            "{}\n",
            format_line(&[
                ("kind", "graft".to_string()),
                ("param_set", params.name.to_string()),
                ("layer", address.layer.to_string()),
                ("tree", address.tree.to_string()),
                ("keypair", address.keypair.to_string()),
                ("seed_hex", hex::encode(&result.sk_seed)),
                ("root_hex", hex::encode(result.root.as_bytes())),
                ("digits", format_digits(&result.digits)),
                ("index", result.grafted_index.to_string()),
                ("attempts", result.attempts.to_string()),
                ("seed", seed.to_string()),
                ("workers", workers.to_string()),
                ("input_digest", input_digest_hex.to_string()),
            ])
        ),
    )
}

pub struct GraftFile {
    pub params: &'static ParameterSet,
    pub address: InstanceAddress,
    pub result: GraftResult,
}

pub fn load_graft(path: &Path) -> Result<GraftFile, ArtifactError> {
    let kv = parse_single_line(path, "graft")?;
    let params = params_from(path, &kv)?;
    let root_bytes = kv.require_hex("root_hex").map_err(|e| malformed(path, e))?;
    if root_bytes.len() != params.n {
        return Err(malformed(path, "root length"));
    }
    Ok(GraftFile {
        params,
        address: InstanceAddress {
            layer: kv.require_parse("layer").map_err(|e| malformed(path, e))?,
            tree: kv.require_parse("tree").map_err(|e| malformed(path, e))?,
            keypair: kv.require_parse("keypair").map_err(|e| malformed(path, e))?,
        },
        result: GraftResult {
            sk_seed: kv.require_hex("seed_hex").map_err(|e| malformed(path, e))?,
            root: Node::from_slice(&root_bytes),
            digits: parse_digits(kv.require("digits").map_err(|e| malformed(path, e))?)
                .map_err(|e| malformed(path, e))?,
            grafted_index: kv.require_parse("index").map_err(|e| malformed(path, e))?,
            attempts: kv.require_parse("attempts").map_err(|e| malformed(path, e))?,
        },
    })
}

/// Seek artifact.
#[allow(clippy::too_many_arguments)]
pub fn save_seek(
    path: &Path,
    params: &ParameterSet,
    message: &[u8],
    layer: u32,
    grafted_index: u128,
    result: &PathSeekResult,
    seed: u64,
    workers: u32,
    input_digest_hex: &str,
) -> Result<(), ArtifactError> {
    write_string(
        path,
        &format!(
            "{}\n",
            format_line(&[
                ("kind", "seek".to_string()),
                ("param_set", params.name.to_string()),
                ("msg_hex", hex::encode(message)),
                ("layer", layer.to_string()),
                ("index", grafted_index.to_string()),
                ("r_hex", hex::encode(&result.randomizer)),
                ("attempts", result.attempts.to_string()),
                ("seed", seed.to_string()),
                ("workers", workers.to_string()),
                ("input_digest", input_digest_hex.to_string()),
            ])
        ),
    )
}

pub struct SeekFile {
    pub params: &'static ParameterSet,
    pub message: Vec<u8>,
    pub layer: u32,
    pub grafted_index: u128,
    pub result: PathSeekResult,
}

pub fn load_seek(path: &Path) -> Result<SeekFile, ArtifactError> {
    let kv = parse_single_line(path, "seek")?;
    let params = params_from(path, &kv)?;
    Ok(SeekFile {
        params,
        message: kv.require_hex("msg_hex").map_err(|e| malformed(path, e))?,
        layer: kv.require_parse("layer").map_err(|e| malformed(path, e))?,
        grafted_index: kv.require_parse("index").map_err(|e| malformed(path, e))?,
        result: PathSeekResult {
            randomizer: kv.require_hex("r_hex").map_err(|e| malformed(path, e))?,
            attempts: kv.require_parse("attempts").map_err(|e| malformed(path, e))?,
        },
    })
}

/// Forgery artifact.
pub fn save_forgery(
    path: &Path,
    params: &ParameterSet,
    message: &[u8],
    signature: &SlhSignature,
    input_digest_hex: &str,
) -> Result<(), ArtifactError> {
    write_string(
        path,
        &format!(
            "{}\n",
            format_line(&[
                ("kind", "forgery".to_string()),
                ("param_set", params.name.to_string()),
                ("msg_hex", hex::encode(message)),
                ("sig_hex", hex::encode(signature.to_bytes(params))),
                ("input_digest", input_digest_hex.to_string()),
            ])
        ),
    )
}

pub struct ForgeryFile {
    pub params: &'static ParameterSet,
    pub message: Vec<u8>,
    pub signature: SlhSignature,
}

pub fn load_forgery(path: &Path) -> Result<ForgeryFile, ArtifactError> {
    let kv = parse_single_line(path, "forgery")?;
    let params = params_from(path, &kv)?;
    let sig_bytes = kv.require_hex("sig_hex").map_err(|e| malformed(path, e))?;
    Ok(ForgeryFile {
        params,
        message: kv.require_hex("msg_hex").map_err(|e| malformed(path, e))?,
        signature: SlhSignature::from_bytes(params, &sig_bytes)
            .map_err(|e| malformed(path, e))?,
    })
}
