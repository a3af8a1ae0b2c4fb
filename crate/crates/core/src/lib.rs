//! Soft ("grayscale") emotion labels for conversation datasets, plus the
//! small linear models, corpus handling, and evaluation metrics needed to
//! train with them end to end.
//!
//! The pieces fit together like this:
//!
//! - [`inventory`] names the emotion classes of a dataset and maps each to a
//!   sentiment polarity.
//! - [`corpus`] parses dialogue transcripts and renders per-turn classifier
//!   inputs with a bounded context window and optional lookahead.
//! - [`embeddings`] loads word-vector tables and resolves emotion words
//!   through an alias map.
//! - [`label`] builds the soft label distributions: sentiment-category
//!   scores, word-embedding similarity scores, softmaxed model logits, and
//!   the gold-anchored adjustment of those.
//! - [`model`] featurizes rendered inputs, trains linear-softmax
//!   classifiers on a joint hard + soft cross-entropy, and runs the
//!   teacher pipeline that freezes per-sample logits.
//! - [`metrics`] computes confusion matrices and the F1 family used to
//!   compare runs.
//! - [`jsonl`] reads and writes every artifact (labels, logits,
//!   parameters, predictions, evaluation reports) with stable number
//!   formatting.

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod inventory;
pub mod jsonl;
pub mod label;
pub mod metrics;
pub mod model;

pub use corpus::{
    enumerate_samples, parse_corpus, render_input, Dialogue, TrainingSample, Utterance, CLS_TOKEN,
};
pub use embeddings::{cosine, emotion_vector, AliasMap, EmbeddingTable};
pub use error::{Error, Result};
pub use inventory::{EmotionInventory, Sentiment};
pub use jsonl::{fmt_g9, LabelRecord, PredictionRecord};
pub use label::{
    build_label, one_hot_label, softmax_label, GrayscaleLabel, LabelDeps, LabelMethod, ScoreVector,
};
pub use metrics::{evaluate, ConfusionMatrix, EvalResult};
pub use model::{
    featurize, forward, loss_gradient, loss_total, train, teacher_pipeline, LossConfig,
    ModelParams, Prediction, SampleLogits, TeacherRun, TrainConfig, TrainReport,
};
