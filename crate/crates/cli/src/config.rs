//! Flat `key = value` configuration files.
//!
//! One assignment per line; `#` starts a comment; values may be quoted with
//! double quotes (required when a value contains `#` or leading/trailing
//! spaces). Keys are dotted lowercase paths from a fixed vocabulary, plus
//! open-ended alias entries `embeddings.aliases.<word> = <target>`.
//! Command-line flags always override file values.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use grayscale_core::{Error, Result};

/// Every assignable fixed key.
const KNOWN_KEYS: &[&str] = &[
    "corpus.train",
    "corpus.dev",
    "corpus.test",
    "corpus.inventory",
    "embeddings.path",
    "labels.method",
    "labels.file",
    "loss.alpha",
    "train.learning_rate",
    "train.epochs",
    "train.batch_size",
    "train.seed",
    "train.window",
    "train.future_turns",
    "train.select_best_dev",
    "teacher.params",
    "teacher.logits",
    "eval.exclude",
    "eval.prefix",
    "sweep.alphas",
    "output.dir",
];

/// Open-ended key family: `embeddings.aliases.<word> = <target>`.
const ALIAS_PREFIX: &str = "embeddings.aliases.";

/// Parsed configuration file; an empty one when no file was given.
#[derive(Debug, Default)]
pub struct FileConfig {
    values: HashMap<String, String>,
}

impl FileConfig {
    pub fn empty() -> Self {
        FileConfig::default()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value_part) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{origin}:{line_no}: expected `key = value`, got {line:?}"
                ))
            })?;
            let key = key.trim();
            if key.is_empty()
                || !key
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || "._-".contains(c))
            {
                return Err(Error::Config(format!(
                    "{origin}:{line_no}: invalid key {key:?}"
                )));
            }
            if !KNOWN_KEYS.contains(&key)
                && !(key.starts_with(ALIAS_PREFIX) && key.len() > ALIAS_PREFIX.len())
            {
                return Err(Error::Config(format!(
                    "{origin}:{line_no}: unknown key {key:?}"
                )));
            }
            let value = parse_value(value_part, origin, line_no)?;
            if values.insert(key.to_string(), value).is_some() {
                return Err(Error::Config(format!(
                    "{origin}:{line_no}: duplicate key {key:?}"
                )));
            }
        }
        Ok(FileConfig { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    /// Parses a numeric or otherwise `FromStr` value, turning parse
    /// failures into configuration errors that name the key.
    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                Error::Config(format!("config key {key}: cannot parse value {raw:?}"))
            }),
        }
    }

    pub fn flag(&self, key: &str) -> Result<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some("true") | Some("yes") | Some("1") => Ok(Some(true)),
            Some("false") | Some("no") | Some("0") => Ok(Some(false)),
            Some(other) => Err(Error::Config(format!(
                "config key {key}: expected a boolean, got {other:?}"
            ))),
        }
    }

    /// All `embeddings.aliases.<word> = <target>` pairs, sorted by word.
    pub fn aliases(&self) -> Vec<(String, String)> {
        let mut pairs: Vec<(String, String)> = self
            .values
            .iter()
            .filter_map(|(k, v)| {
                k.strip_prefix(ALIAS_PREFIX)
                    .map(|word| (word.to_string(), v.clone()))
            })
            .collect();
        pairs.sort();
        pairs
    }
}

fn parse_value(raw: &str, origin: &str, line_no: usize) -> Result<String> {
    let trimmed = raw.trim_start();
    if let Some(rest) = trimmed.strip_prefix('"') {
        // Quoted: read to the closing quote, honoring \" and \\ escapes.
        let mut value = String::new();
        let mut chars = rest.chars();
        loop {
            match chars.next() {
                None => {
                    return Err(Error::Config(format!(
                        "{origin}:{line_no}: unterminated quoted value"
                    )))
                }
                Some('\\') => match chars.next() {
                    Some('"') => value.push('"'),
                    Some('\\') => value.push('\\'),
                    other => {
                        return Err(Error::Config(format!(
                            "{origin}:{line_no}: unsupported escape \\{}",
                            other.map(String::from).unwrap_or_default()
                        )))
                    }
                },
                Some('"') => break,
                Some(c) => value.push(c),
            }
        }
        let tail = chars.as_str().trim();
        if !tail.is_empty() && !tail.starts_with('#') {
            return Err(Error::Config(format!(
                "{origin}:{line_no}: unexpected text after quoted value: {tail:?}"
            )));
        }
        Ok(value)
    } else {
        // Unquoted: cut at the first `#`, then trim.
        let bare = trimmed.split('#').next().unwrap_or("").trim();
        if bare.is_empty() {
            return Err(Error::Config(format!("{origin}:{line_no}: empty value")));
        }
        Ok(bare.to_string())
    }
}
