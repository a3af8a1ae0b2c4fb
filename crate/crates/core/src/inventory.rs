//! Emotion inventories: the ordered emotion classes of a dataset and the
//! sentiment category (positive / negative / neutral) of each class.

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Coarse sentiment category of an emotion class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sentiment {
    Positive,
    Negative,
    Neutral,
}

impl Sentiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Sentiment::Positive => "positive",
            Sentiment::Negative => "negative",
            Sentiment::Neutral => "neutral",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(Sentiment::Positive),
            "negative" => Ok(Sentiment::Negative),
            "neutral" => Ok(Sentiment::Neutral),
            other => Err(Error::InvalidInput(format!(
                "unknown sentiment category {other:?} (expected positive, negative, or neutral)"
            ))),
        }
    }
}

/// Ordered emotion classes of a dataset plus a sentiment category per class.
///
/// Class order is significant: label vectors, confusion matrices, and model
/// outputs are all indexed by position in this inventory.
#[derive(Clone, Debug)]
pub struct EmotionInventory {
    names: Vec<String>,
    categories: Vec<Sentiment>,
    index: HashMap<String, usize>,
}

impl EmotionInventory {
    /// Builds an inventory from `(name, category)` pairs in class order.
    ///
    /// Names must be nonempty, lowercase, and unique, and there must be at
    /// least two classes.
    pub fn new<S: AsRef<str>>(entries: &[(S, Sentiment)]) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "an inventory needs at least 2 emotions, got {}",
                entries.len()
            )));
        }
        let mut names = Vec::with_capacity(entries.len());
        let mut categories = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for (name, category) in entries {
            let name = name.as_ref();
            if name.is_empty() {
                return Err(Error::InvalidInput("empty emotion name".into()));
            }
            if name != name.to_lowercase() {
                return Err(Error::InvalidInput(format!(
                    "emotion name {name:?} must be lowercase"
                )));
            }
            if index.insert(name.to_string(), names.len()).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate emotion name {name:?}"
                )));
            }
            names.push(name.to_string());
            categories.push(*category);
        }
        Ok(EmotionInventory {
            names,
            categories,
            index,
        })
    }

    /// Builds an inventory from an ordered name list plus a name→category map.
    /// Every name must have exactly one category; extra map keys are rejected.
    pub fn from_parts(names: &[String], category_of: &HashMap<String, Sentiment>) -> Result<Self> {
        for key in category_of.keys() {
            if !names.iter().any(|n| n == key) {
                return Err(Error::InvalidInput(format!(
                    "category map names unknown emotion {key:?}"
                )));
            }
        }
        let entries: Vec<(String, Sentiment)> = names
            .iter()
            .map(|n| {
                category_of
                    .get(n)
                    .map(|c| (n.clone(), *c))
                    .ok_or_else(|| Error::InvalidInput(format!("no category for emotion {n:?}")))
            })
            .collect::<Result<_>>()?;
        Self::new(&entries)
    }

    /// Loads a custom inventory from a JSON file of the form
    /// `{"names": [...], "categories": {"name": "positive", ...}}`.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct InventoryFile {
            names: Vec<String>,
            categories: HashMap<String, String>,
        }
        let text = std::fs::read_to_string(path)?;
        let file: InventoryFile = serde_json::from_str(&text).map_err(|e| Error::Schema {
            path: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let mut category_of = HashMap::with_capacity(file.categories.len());
        for (name, cat) in &file.categories {
            category_of.insert(name.clone(), Sentiment::parse(cat)?);
        }
        Self::from_parts(&file.names, &category_of)
    }

    /// Number of emotion classes.
    pub fn k(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(|s| s.as_str())
    }

    /// Index of an emotion by name; lookup is case-insensitive.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(&name.to_lowercase()).copied()
    }

    pub fn category(&self, index: usize) -> Option<Sentiment> {
        self.categories.get(index).copied()
    }

    /// The six IEMOCAP classes.
    pub fn iemocap() -> Self {
        use Sentiment::*;
        Self::new(&[
            ("happy", Positive),
            ("sad", Negative),
            ("angry", Negative),
            ("excited", Positive),
            ("frustrated", Negative),
            ("neutral", Neutral),
        ])
        .expect("builtin inventory")
    }

    /// The seven DailyDialog classes.
    pub fn dailydialog() -> Self {
        use Sentiment::*;
        Self::new(&[
            ("anger", Negative),
            ("disgust", Negative),
            ("fear", Negative),
            ("joy", Positive),
            ("surprise", Neutral),
            ("sadness", Negative),
            ("neutral", Neutral),
        ])
        .expect("builtin inventory")
    }

    /// The seven MELD classes.
    pub fn meld() -> Self {
        use Sentiment::*;
        Self::new(&[
            ("anger", Negative),
            ("disgust", Negative),
            ("sadness", Negative),
            ("joy", Positive),
            ("surprise", Neutral),
            ("fear", Negative),
            ("neutrality", Neutral),
        ])
        .expect("builtin inventory")
    }

    /// The seven EmoryNLP classes.
    pub fn emorynlp() -> Self {
        use Sentiment::*;
        Self::new(&[
            ("joyful", Positive),
            ("peaceful", Positive),
            ("powerful", Positive),
            ("scared", Negative),
            ("mad", Negative),
            ("sad", Negative),
            ("neutral", Neutral),
        ])
        .expect("builtin inventory")
    }

    /// Looks up a built-in inventory by dataset name (case-insensitive).
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_lowercase().as_str() {
            "iemocap" => Some(Self::iemocap()),
            "dailydialog" => Some(Self::dailydialog()),
            "meld" => Some(Self::meld()),
            "emorynlp" => Some(Self::emorynlp()),
            _ => None,
        }
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["iemocap", "dailydialog", "meld", "emorynlp"]
    }
}
