//! The line-delimited key-value format every artifact uses: one record per
//! line, space-separated `key=value` tokens, lowercase hex for byte fields.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KvError {
    #[error("token `{0}` is not key=value")]
    BadToken(String),
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("key `{key}`: {reason}")]
    BadValue { key: String, reason: String },
}

/// One parsed line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KvLine {
    map: BTreeMap<String, String>,
}

impl KvLine {
    pub fn parse(line: &str) -> Result<Self, KvError> {
        let mut map = BTreeMap::new();
        for token in line.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| KvError::BadToken(token.to_string()))?;
            if map.insert(key.to_string(), value.to_string()).is_some() {
                return Err(KvError::DuplicateKey(key.to_string()));
            }
        }
        Ok(KvLine { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &'static str) -> Result<&str, KvError> {
        self.get(key).ok_or(KvError::MissingKey(key))
    }

    pub fn require_hex(&self, key: &'static str) -> Result<Vec<u8>, KvError> {
        hex::decode(self.require(key)?).map_err(|e| KvError::BadValue {
            key: key.to_string(),
            reason: e.to_string(),
        })
    }

    pub fn require_parse<T: std::str::FromStr>(&self, key: &'static str) -> Result<T, KvError>
    where
        T::Err: std::fmt::Display,
    {
        self.require(key)?.parse().map_err(|e: T::Err| KvError::BadValue {
            key: key.to_string(),
            reason: e.to_string(),
        })
    }
}

/// Serializes pairs in the given order.
pub fn format_line(pairs: &[(&str, String)]) -> String {
    let tokens: Vec<String> = pairs
        .iter()
        .map(|(k, v)| {
            debug_assert!(!v.contains(char::is_whitespace), "kv values are atomic");
            format!("{k}={v}")
        })
        .collect();
    tokens.join(" ")
}

/// Comma-joined digit list, e.g. `1,0,2,3`.
pub fn format_digits(digits: &[u8]) -> String {
    digits
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses a comma-joined digit list.
pub fn parse_digits(s: &str) -> Result<Vec<u8>, KvError> {
    s.split(',')
        .map(|t| {
            t.parse::<u8>().map_err(|e| KvError::BadValue {
                key: "digits".to_string(),
                reason: format!("`{t}`: {e}"),
            })
        })
        .collect()
}
