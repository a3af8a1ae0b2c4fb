//! Word-embedding tables in the plain text format `word v1 v2 ... vd`, one
//! word per line, with an optional `count dim` header line. Lookup is
//! case-insensitive.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::jsonl::fmt_g9;

/// An in-memory word-vector table with a fixed dimension.
#[derive(Clone, Debug)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    vectors: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl EmbeddingTable {
    /// Builds a table from `(word, vector)` entries. Words that collide
    /// case-insensitively keep the first entry.
    pub fn from_entries(entries: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let mut table = EmbeddingTable {
            dim: 0,
            words: Vec::new(),
            vectors: Vec::new(),
            index: HashMap::new(),
        };
        for (word, vector) in entries {
            table.push(word, vector, "<entries>", 0)?;
        }
        table.finish("<entries>")?;
        Ok(table)
    }

    /// Loads a table from `path`. A first line consisting of exactly two
    /// integer tokens is treated as a `count dim` header. With a
    /// `vocabulary` filter, only the listed words (case-insensitive) are
    /// kept.
    pub fn load(path: &Path, vocabulary: Option<&HashSet<String>>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read(BufReader::new(file), &path.display().to_string(), vocabulary)
    }

    /// Like [`EmbeddingTable::load`] but from any buffered reader;
    /// `path_label` is used in error messages.
    pub fn read(
        reader: impl BufRead,
        path_label: &str,
        vocabulary: Option<&HashSet<String>>,
    ) -> Result<Self> {
        let vocabulary: Option<HashSet<String>> =
            vocabulary.map(|v| v.iter().map(|w| w.to_lowercase()).collect());
        let mut table = EmbeddingTable {
            dim: 0,
            words: Vec::new(),
            vectors: Vec::new(),
            index: HashMap::new(),
        };
        let mut first = true;
        for (line_no, line) in reader.lines().enumerate() {
            let line_no = line_no + 1;
            let line = line?;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            if first {
                first = false;
                if tokens.len() == 2
                    && tokens[0].parse::<u64>().is_ok()
                    && tokens[1].parse::<u64>().is_ok()
                {
                    // Header line: the second integer fixes the dimension.
                    let dim = tokens[1].parse::<usize>().expect("checked integer");
                    if dim == 0 {
                        return Err(Error::Parse {
                            path: path_label.to_string(),
                            line: line_no,
                            message: "header declares dimension 0".into(),
                        });
                    }
                    table.dim = dim;
                    continue;
                }
            }
            let word = tokens[0].to_string();
            if tokens.len() < 2 {
                return Err(Error::Parse {
                    path: path_label.to_string(),
                    line: line_no,
                    message: format!("word {word:?} has no vector components"),
                });
            }
            let mut vector = Vec::with_capacity(tokens.len() - 1);
            for tok in &tokens[1..] {
                let v: f64 = tok.parse().map_err(|_| Error::Parse {
                    path: path_label.to_string(),
                    line: line_no,
                    message: format!("non-numeric component {tok:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        path: path_label.to_string(),
                        line: line_no,
                        message: format!("non-finite component {tok:?}"),
                    });
                }
                vector.push(v);
            }
            if let Some(vocab) = &vocabulary {
                if !vocab.contains(&word.to_lowercase()) {
                    // Still enforce arity so malformed lines are caught.
                    if table.dim != 0 && vector.len() != table.dim {
                        return Err(Error::Parse {
                            path: path_label.to_string(),
                            line: line_no,
                            message: format!(
                                "word {word:?} has {} components, expected {}",
                                vector.len(),
                                table.dim
                            ),
                        });
                    }
                    if table.dim == 0 {
                        table.dim = vector.len();
                    }
                    continue;
                }
            }
            table.push(word, vector, path_label, line_no)?;
        }
        table.finish(path_label)?;
        Ok(table)
    }

    fn push(
        &mut self,
        word: String,
        vector: Vec<f64>,
        path_label: &str,
        line_no: usize,
    ) -> Result<()> {
        if vector.is_empty() {
            return Err(Error::Parse {
                path: path_label.to_string(),
                line: line_no,
                message: format!("word {word:?} has no vector components"),
            });
        }
        if let Some((i, v)) = vector.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Parse {
                path: path_label.to_string(),
                line: line_no,
                message: format!("word {word:?} component {i} is not finite: {v}"),
            });
        }
        if self.dim == 0 {
            self.dim = vector.len();
        } else if vector.len() != self.dim {
            return Err(Error::Parse {
                path: path_label.to_string(),
                line: line_no,
                message: format!(
                    "word {word:?} has {} components, expected {}",
                    vector.len(),
                    self.dim
                ),
            });
        }
        let key = word.to_lowercase();
        if self.index.contains_key(&key) {
            // First occurrence wins; later duplicates are ignored.
            return Ok(());
        }
        self.index.insert(key, self.words.len());
        self.words.push(word);
        self.vectors.push(vector);
        Ok(())
    }

    fn finish(&self, path_label: &str) -> Result<()> {
        if self.vectors.is_empty() {
            return Err(Error::Parse {
                path: path_label.to_string(),
                line: 0,
                message: "no word vectors loaded".into(),
            });
        }
        if !self
            .vectors
            .iter()
            .any(|v| v.iter().any(|x| *x != 0.0))
        {
            return Err(Error::DegenerateInput(
                "every vector in the table has zero norm".into(),
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Case-insensitive vector lookup.
    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(&word.to_lowercase())
            .map(|i| self.vectors[*i].as_slice())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(&word.to_lowercase())
    }

    /// Words in load order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Writes the table in the text format, floats at 9 significant digits,
    /// optionally preceded by a `count dim` header.
    pub fn write_text(&self, mut writer: impl Write, header: bool) -> std::io::Result<()> {
        if header {
            writeln!(writer, "{} {}", self.words.len(), self.dim)?;
        }
        for (word, vector) in self.words.iter().zip(&self.vectors) {
            write!(writer, "{word}")?;
            for v in vector {
                write!(writer, " {}", fmt_g9(*v))?;
            }
            writeln!(writer)?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        self.write_text(&mut out, true)?;
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Cosine similarity between two equal-length vectors. Zero-norm vectors are
/// rejected; the result is clamped into [-1, 1] against rounding.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "cosine of vectors with different lengths: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidInput("cosine of empty vectors".into()));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateInput(
            "cosine of a zero-norm vector".into(),
        ));
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Fallback spellings for emotion words, applied when the word itself is not
/// in the table. Keys and targets are lowercase.
#[derive(Clone, Debug, Default)]
pub struct AliasMap {
    map: HashMap<String, String>,
}

impl AliasMap {
    pub fn empty() -> Self {
        AliasMap::default()
    }

    /// Aliases covering the spelling variants of the built-in inventories:
    /// happy/joy/joyful, sad/sadness, anger/angry/mad, neutral/neutrality,
    /// scared/fear.
    pub fn with_defaults() -> Self {
        let mut map = AliasMap::default();
        for (from, to) in [
            ("joyful", "joy"),
            ("joy", "happy"),
            ("happy", "joy"),
            ("sadness", "sad"),
            ("sad", "sadness"),
            ("anger", "angry"),
            ("angry", "anger"),
            ("mad", "angry"),
            ("neutrality", "neutral"),
            ("neutral", "neutrality"),
            ("scared", "fear"),
            ("fear", "scared"),
        ] {
            map.insert(from, to);
        }
        map
    }

    pub fn insert(&mut self, from: &str, to: &str) {
        self.map.insert(from.to_lowercase(), to.to_lowercase());
    }

    pub fn get(&self, word: &str) -> Option<&str> {
        self.map.get(&word.to_lowercase()).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Resolves an emotion word to its vector: the word itself first, then its
/// alias. Failing both is a missing-embedding error naming every key tried.
pub fn emotion_vector<'t>(
    name: &str,
    table: &'t EmbeddingTable,
    aliases: &AliasMap,
) -> Result<&'t [f64]> {
    if let Some(v) = table.get(name) {
        return Ok(v);
    }
    let mut tried = vec![name.to_lowercase()];
    if let Some(alias) = aliases.get(name) {
        if let Some(v) = table.get(alias) {
            return Ok(v);
        }
        tried.push(alias.to_string());
    }
    Err(Error::MissingEmbedding {
        word: name.to_string(),
        tried,
    })
}
