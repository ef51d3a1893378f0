//! Corpus persistence: a header line carrying the parameter set and victim
//! public key, then one line per signature record.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use graftlab_core::fault::{Corpus, FaultEvent, SignatureRecord};
use graftlab_core::params::{parameter_set, ParameterSet};
use graftlab_core::slh::{SignMode, SlhSignature};
use thiserror::Error;

use crate::kv::{format_line, KvLine};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus header: {0}")]
    Header(String),
    #[error("corpus record {ordinal}: {reason}")]
    Record { ordinal: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn record_err(ordinal: usize, reason: impl ToString) -> CorpusError {
    CorpusError::Record {
        ordinal,
        reason: reason.to_string(),
    }
}

fn mode_str(mode: SignMode) -> &'static str {
    mode.as_str()
}

fn parse_mode(s: &str) -> Option<SignMode> {
    match s {
        "det" => Some(SignMode::Deterministic),
        "rand" => Some(SignMode::Randomized),
        _ => None,
    }
}

fn format_fault(event: &FaultEvent) -> String {
    format!(
        "{}:{}:{}:{}",
        event.layer, event.level, event.bit, event.invocation
    )
}

fn parse_fault(s: &str) -> Option<FaultEvent> {
    let mut parts = s.split(':');
    let layer = parts.next()?.parse().ok()?;
    let level = parts.next()?.parse().ok()?;
    let bit = parts.next()?.parse().ok()?;
    let invocation = parts.next()?.parse().ok()?;
    parts.next().is_none().then_some(FaultEvent {
        layer,
        level,
        bit,
        invocation,
    })
}

/// Writes a corpus in the line-delimited key-value format.
pub fn save_corpus(corpus: &Corpus, sink: &mut impl Write) -> Result<(), CorpusError> {
    let params = parameter_set(&corpus.param_set)
        .map_err(|e| CorpusError::Header(e.to_string()))?;
    writeln!(
        sink,
        "{}",
        format_line(&[
            ("param_set", corpus.param_set.clone()),
            ("pk_seed_hex", hex::encode(&corpus.pk_seed)),
            ("pk_root_hex", hex::encode(&corpus.pk_root)),
            ("complete", corpus.complete.to_string()),
        ])
    )?;
    for record in &corpus.records {
        let mut pairs = vec![
            ("param_set", corpus.param_set.clone()),
            ("mode", mode_str(record.mode).to_string()),
            ("msg_hex", hex::encode(&record.message)),
            ("r_hex", hex::encode(&record.randomizer)),
            ("sig_hex", hex::encode(record.signature.to_bytes(params))),
        ];
        if let Some(event) = &record.fault_ground_truth {
            pairs.push(("fault", format_fault(event)));
        }
        writeln!(sink, "{}", format_line(&pairs))?;
    }
    Ok(())
}

/// Reads a corpus, enforcing a single parameter set and well-formed records.
pub fn load_corpus(source: &mut impl Read) -> Result<(Corpus, &'static ParameterSet), CorpusError> {
    let reader = BufReader::new(source);
    let mut lines = reader.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| CorpusError::Header("empty file".to_string()))??;
    let header =
        KvLine::parse(&header_line).map_err(|e| CorpusError::Header(e.to_string()))?;
    let name = header
        .require("param_set")
        .map_err(|e| CorpusError::Header(e.to_string()))?;
    let params = parameter_set(name).map_err(|e| CorpusError::Header(e.to_string()))?;
    let pk_seed = header
        .require_hex("pk_seed_hex")
        .map_err(|e| CorpusError::Header(e.to_string()))?;
    let pk_root = header
        .require_hex("pk_root_hex")
        .map_err(|e| CorpusError::Header(e.to_string()))?;
    if pk_seed.len() != params.n || pk_root.len() != params.n {
        return Err(CorpusError::Header("public key field length".to_string()));
    }
    let complete = header.get("complete").is_none_or(|v| v == "true");

    let mut records = Vec::new();
    for (ordinal, line) in lines.enumerate() {
        let ordinal = ordinal + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let kv = KvLine::parse(&line).map_err(|e| record_err(ordinal, e))?;
        let record_set = kv.require("param_set").map_err(|e| record_err(ordinal, e))?;
        if record_set != params.name {
            return Err(record_err(
                ordinal,
                format!("mixed parameter sets: `{record_set}` vs `{}`", params.name),
            ));
        }
        let mode = parse_mode(kv.require("mode").map_err(|e| record_err(ordinal, e))?)
            .ok_or_else(|| record_err(ordinal, "mode must be det|rand"))?;
        let message = kv.require_hex("msg_hex").map_err(|e| record_err(ordinal, e))?;
        let randomizer = kv.require_hex("r_hex").map_err(|e| record_err(ordinal, e))?;
        if randomizer.len() != params.n {
            return Err(record_err(ordinal, "randomizer length"));
        }
        let sig_bytes = kv.require_hex("sig_hex").map_err(|e| record_err(ordinal, e))?;
        let signature = SlhSignature::from_bytes(params, &sig_bytes)
            .map_err(|e| record_err(ordinal, e))?;
        let fault_ground_truth = match kv.get("fault") {
            None => None,
            Some(s) => Some(
                parse_fault(s).ok_or_else(|| record_err(ordinal, "fault must be l:z:b:inv"))?,
            ),
        };
        records.push(SignatureRecord {
            message,
            randomizer,
            signature,
            mode,
            fault_ground_truth,
        });
    }
    Ok((
        Corpus {
            param_set: params.name.to_string(),
            pk_seed,
            pk_root,
            records,
            complete,
        },
        params,
    ))
}

pub fn save_corpus_file(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let mut file = std::fs::File::create(path)?;
    save_corpus(corpus, &mut file)
}

pub fn load_corpus_file(path: &Path) -> Result<(Corpus, &'static ParameterSet), CorpusError> {
    let mut file = std::fs::File::open(path)?;
    load_corpus(&mut file)
}
