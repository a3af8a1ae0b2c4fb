//! `grayscale`: build soft emotion labels for conversation datasets, train
//! teacher/student linear-softmax classifiers with a joint hard + soft
//! loss, and evaluate them with the F1 family.
//!
//! Exit codes: 0 on success, 2 for configuration and usage problems, 3 for
//! data and schema problems.

mod config;

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use config::FileConfig;
use grayscale_core::corpus::{enumerate_samples, parse_corpus, Dialogue, TrainingSample};
use grayscale_core::embeddings::{AliasMap, EmbeddingTable};
use grayscale_core::error::{Error, Result};
use grayscale_core::jsonl::{
    self, fmt_g9, read_params, read_teacher_logits, write_eval_report, write_labels, write_params,
    write_predictions, write_teacher_logits, PredictionRecord,
};
use grayscale_core::label::{build_label, GrayscaleLabel, LabelDeps, LabelMethod};
use grayscale_core::metrics::evaluate;
use grayscale_core::model::{
    featurize, forward, teacher_pipeline, train, LossConfig, ModelParams, TrainConfig, TrainReport,
};
use grayscale_core::EmotionInventory;

const DEFAULT_ALPHA: f64 = 1.0;
const DEFAULT_METHOD: LabelMethod = LabelMethod::OneHot;
const DEFAULT_OUT_DIR: &str = "out";
const DEFAULT_SWEEP_ALPHAS: &str = "0,0.25,0.5,1,2";

#[derive(Parser)]
#[command(
    name = "grayscale",
    version,
    about = "Soft emotion labels and small teacher/student classifiers for conversation datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build soft labels for every turn of a corpus
    BuildLabels(BuildLabelsArgs),
    /// Train the teacher classifier and freeze its per-sample logits
    TrainTeacher(TrainTeacherArgs),
    /// Train a student classifier on hard labels plus optional soft labels
    TrainStudent(TrainStudentArgs),
    /// Evaluate a trained classifier on a corpus split
    Eval(EvalArgs),
    /// Train students across several soft-loss weights and tabulate F1
    AlphaSweep(AlphaSweepArgs),
}

/// Options shared by every subcommand. Each value falls back to the
/// configuration file, then to its built-in default.
#[derive(Args)]
struct CommonArgs {
    /// Configuration file with `key = value` lines; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emotion inventory: a builtin name or a path to an inventory JSON file
    #[arg(long)]
    inventory: Option<String>,
    /// Word-vector table in whitespace-separated text format
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Extra emotion-word alias as from=to; repeatable
    #[arg(long = "alias", value_name = "FROM=TO")]
    aliases: Vec<String>,
    /// Directory for output files [default: out]
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Optimizer options shared by the training subcommands.
#[derive(Args, Clone)]
struct TrainFlags {
    /// Gradient-descent step size [default: 0.5]
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Passes over the training data [default: 100]
    #[arg(long)]
    epochs: Option<usize>,
    /// Mini-batch size [default: 8]
    #[arg(long)]
    batch_size: Option<usize>,
    /// Seed for the per-epoch shuffles [default: 42]
    #[arg(long)]
    seed: Option<u64>,
    /// Context window in turns when rendering inputs [default: 12]
    #[arg(long)]
    window: Option<usize>,
    /// Keep the epoch with the best dev weighted F1 instead of the last one
    #[arg(long)]
    select_best_dev: bool,
}

#[derive(Args)]
struct BuildLabelsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Corpus to label (falls back to corpus.train)
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Label construction method: one-hot, category, word-embedding, self,
    /// self-adjust, or future-self-adjust [default: one-hot]
    #[arg(long)]
    method: Option<String>,
    /// Teacher logits file keyed by sample id (for the self methods)
    #[arg(long)]
    teacher_logits: Option<PathBuf>,
    /// Teacher parameter file; logits are computed on the fly (for the
    /// self methods)
    #[arg(long)]
    teacher_params: Option<PathBuf>,
    /// Context window in turns [default: 12]
    #[arg(long)]
    window: Option<usize>,
    /// Output file name inside the output directory [default: labels.jsonl]
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct TrainTeacherArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Training corpus
    #[arg(long)]
    train: Option<PathBuf>,
    /// Dev corpus (needed with --select-best-dev)
    #[arg(long)]
    dev: Option<PathBuf>,
    #[command(flatten)]
    flags: TrainFlags,
    /// Future turns visible to the teacher: 0 or 2 [default: 0]
    #[arg(long)]
    future_turns: Option<usize>,
}

#[derive(Args)]
struct TrainStudentArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Training corpus
    #[arg(long)]
    train: Option<PathBuf>,
    /// Dev corpus (needed with --select-best-dev)
    #[arg(long)]
    dev: Option<PathBuf>,
    #[command(flatten)]
    flags: TrainFlags,
    /// Weight of the soft-label loss term [default: 1]
    #[arg(long)]
    alpha: Option<f64>,
    /// Soft labels for the training samples (required when alpha > 0)
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Output parameter file name inside the output directory
    /// [default: student_params.json]
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Corpus split to evaluate (falls back to corpus.test)
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Parameter file of the classifier to evaluate
    #[arg(long)]
    params: Option<PathBuf>,
    /// Comma-separated emotion names left out of macro and micro F1
    #[arg(long)]
    exclude: Option<String>,
    /// Context window in turns [default: 12]
    #[arg(long)]
    window: Option<usize>,
    /// Prefix of the report and prediction files [default: eval]
    #[arg(long)]
    prefix: Option<String>,
}

#[derive(Args)]
struct AlphaSweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Training corpus
    #[arg(long)]
    train: Option<PathBuf>,
    /// Dev corpus
    #[arg(long)]
    dev: Option<PathBuf>,
    /// Test corpus
    #[arg(long)]
    test: Option<PathBuf>,
    /// Soft labels for the training samples
    #[arg(long)]
    labels: Option<PathBuf>,
    #[command(flatten)]
    flags: TrainFlags,
    /// Comma-separated soft-loss weights to sweep [default: 0,0.25,0.5,1,2]
    #[arg(long)]
    alphas: Option<String>,
    /// Output CSV name inside the output directory [default: alpha_sweep.csv]
    #[arg(long)]
    out: Option<String>,
}

fn main() {
    // Die quietly on a closed pipe (e.g. `grayscale ... | head`) instead of
    // panicking in a status println.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::BuildLabels(args) => build_labels(args),
        Command::TrainTeacher(args) => train_teacher(args),
        Command::TrainStudent(args) => train_student(args),
        Command::Eval(args) => eval(args),
        Command::AlphaSweep(args) => alpha_sweep(args),
    }
}

/// Resolved configuration: file values with flag overrides on top.
struct Ctx {
    file: FileConfig,
}

impl Ctx {
    fn new(common: &CommonArgs) -> Result<Ctx> {
        let file = match &common.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::empty(),
        };
        Ok(Ctx { file })
    }

    fn inventory(&self, flag: &Option<String>) -> Result<EmotionInventory> {
        let spec = flag
            .clone()
            .or_else(|| self.file.get("corpus.inventory").map(String::from))
            .ok_or_else(|| {
                Error::Config("no emotion inventory given (--inventory or corpus.inventory)".into())
            })?;
        if let Some(builtin) = EmotionInventory::builtin(&spec) {
            return Ok(builtin);
        }
        let path = Path::new(&spec);
        if path.exists() {
            return EmotionInventory::from_json_file(path);
        }
        Err(Error::Config(format!(
            "unknown inventory {:?}: not a builtin ({}) and not an existing file",
            spec,
            EmotionInventory::builtin_names().join(", ")
        )))
    }

    fn required_path(&self, flag: &Option<PathBuf>, key: &str, what: &str) -> Result<PathBuf> {
        flag.clone()
            .or_else(|| self.file.path(key))
            .ok_or_else(|| Error::Config(format!("no {what} given (--{} or {key})", key_flag(key))))
    }

    fn optional_path(&self, flag: &Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.clone().or_else(|| self.file.path(key))
    }

    fn alias_map(&self, flag_aliases: &[String]) -> Result<AliasMap> {
        let mut map = AliasMap::with_defaults();
        for (from, to) in self.file.aliases() {
            map.insert(&from, &to);
        }
        for raw in flag_aliases {
            let (from, to) = raw.split_once('=').ok_or_else(|| {
                Error::Config(format!("alias {raw:?} is not of the form from=to"))
            })?;
            let (from, to) = (from.trim(), to.trim());
            if from.is_empty() || to.is_empty() {
                return Err(Error::Config(format!(
                    "alias {raw:?} has an empty side"
                )));
            }
            map.insert(from, to);
        }
        Ok(map)
    }

    fn out_dir(&self, flag: &Option<PathBuf>) -> Result<PathBuf> {
        let dir = flag
            .clone()
            .or_else(|| self.file.path("output.dir"))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        std::fs::create_dir_all(&dir)?;
        Ok(dir)
    }

    fn method(&self, flag: &Option<String>) -> Result<LabelMethod> {
        match flag
            .clone()
            .or_else(|| self.file.get("labels.method").map(String::from))
        {
            Some(name) => name.parse(),
            None => Ok(DEFAULT_METHOD),
        }
    }

    fn alpha(&self, flag: Option<f64>) -> Result<f64> {
        Ok(match flag {
            Some(a) => a,
            None => self
                .file
                .parsed::<f64>("loss.alpha")?
                .unwrap_or(DEFAULT_ALPHA),
        })
    }

    fn window(&self, flag: Option<usize>) -> Result<usize> {
        Ok(match flag {
            Some(w) => w,
            None => self
                .file
                .parsed::<usize>("train.window")?
                .unwrap_or_else(|| TrainConfig::default().window),
        })
    }

    fn train_config(
        &self,
        flags: &TrainFlags,
        future_turns_flag: Option<usize>,
    ) -> Result<TrainConfig> {
        let defaults = TrainConfig::default();
        let config = TrainConfig {
            learning_rate: match flags.learning_rate {
                Some(v) => v,
                None => self
                    .file
                    .parsed::<f64>("train.learning_rate")?
                    .unwrap_or(defaults.learning_rate),
            },
            epochs: match flags.epochs {
                Some(v) => v,
                None => self
                    .file
                    .parsed::<usize>("train.epochs")?
                    .unwrap_or(defaults.epochs),
            },
            batch_size: match flags.batch_size {
                Some(v) => v,
                None => self
                    .file
                    .parsed::<usize>("train.batch_size")?
                    .unwrap_or(defaults.batch_size),
            },
            seed: match flags.seed {
                Some(v) => v,
                None => self
                    .file
                    .parsed::<u64>("train.seed")?
                    .unwrap_or(defaults.seed),
            },
            window: self.window(flags.window)?,
            future_turns: match future_turns_flag {
                Some(v) => v,
                None => self
                    .file
                    .parsed::<usize>("train.future_turns")?
                    .unwrap_or(defaults.future_turns),
            },
            select_best_dev: flags.select_best_dev
                || self.file.flag("train.select_best_dev")?.unwrap_or(false),
        };
        config.validate()?;
        Ok(config)
    }
}

/// `corpus.train` -> `train`-style flag name for error messages.
fn key_flag(key: &str) -> String {
    key.rsplit('.').next().unwrap_or(key).replace('_', "-")
}

fn load_corpus(path: &Path, inventory: &EmotionInventory) -> Result<Vec<Dialogue>> {
    let corpus = parse_corpus(path, inventory)?;
    if corpus.is_empty() {
        return Err(Error::InvalidInput(format!(
            "corpus {} contains no dialogues",
            path.display()
        )));
    }
    Ok(corpus)
}

fn check_params_shape(
    params: &ModelParams,
    inventory: &EmotionInventory,
    table: &EmbeddingTable,
) -> Result<()> {
    if params.k() != inventory.k() {
        return Err(Error::InvalidInput(format!(
            "parameters are for {} classes, inventory has {}",
            params.k(),
            inventory.k()
        )));
    }
    if params.dim() != table.dim() {
        return Err(Error::InvalidInput(format!(
            "parameters expect {}-dimensional features, embedding table has dimension {}",
            params.dim(),
            table.dim()
        )));
    }
    Ok(())
}

/// Computes logits for each sample by joining a teacher-logits file on
/// sample id.
fn logits_from_file(path: &Path, samples: &[TrainingSample], k: usize) -> Result<Vec<Vec<f64>>> {
    let rows = read_teacher_logits(path)?;
    let by_id: HashMap<&str, &Vec<f64>> = rows
        .iter()
        .map(|r| (r.sample_id.as_str(), &r.logits))
        .collect();
    samples
        .iter()
        .map(|s| {
            let logits = by_id.get(s.sample_id.as_str()).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "no teacher logits for sample {} in {}",
                    s.sample_id,
                    path.display()
                ))
            })?;
            if logits.len() != k {
                return Err(Error::InvalidInput(format!(
                    "teacher logits for sample {} have length {}, expected {k}",
                    s.sample_id,
                    logits.len()
                )));
            }
            Ok((*logits).clone())
        })
        .collect()
}

/// Computes logits for each sample by running a stored teacher, rendering
/// with the teacher's own lookahead.
fn logits_from_params(
    params_path: &Path,
    corpus: &[Dialogue],
    samples: &[TrainingSample],
    inventory: &EmotionInventory,
    table: &EmbeddingTable,
    future_turns: usize,
    window: usize,
) -> Result<Vec<Vec<f64>>> {
    let params = read_params(params_path)?;
    check_params_shape(&params, inventory, table)?;
    let rendered = enumerate_samples(corpus, future_turns, window)?;
    debug_assert_eq!(rendered.len(), samples.len());
    rendered
        .iter()
        .zip(samples)
        .map(|(r, s)| {
            debug_assert_eq!(r.sample_id, s.sample_id);
            forward(&params, &featurize(r, table)).map(|p| p.logits)
        })
        .collect()
}

fn build_labels(args: BuildLabelsArgs) -> Result<()> {
    let ctx = Ctx::new(&args.common)?;
    let inventory = ctx.inventory(&args.common.inventory)?;
    let corpus_path = ctx.required_path(&args.corpus, "corpus.train", "corpus")?;
    let corpus = load_corpus(&corpus_path, &inventory)?;
    let method = ctx.method(&args.method)?;
    let window = ctx.window(args.window)?;
    let samples = enumerate_samples(&corpus, 0, window)?;

    // Load embeddings only when the method or an on-the-fly teacher needs
    // them.
    let teacher_params = ctx.optional_path(&args.teacher_params, "teacher.params");
    let teacher_logits = ctx.optional_path(&args.teacher_logits, "teacher.logits");
    let need_table = method == LabelMethod::WordEmbedding || teacher_params.is_some();
    let table = if need_table {
        let path = ctx.required_path(&args.common.embeddings, "embeddings.path", "embedding table")?;
        Some(EmbeddingTable::load(&path, None)?)
    } else {
        None
    };
    let aliases = ctx.alias_map(&args.common.aliases)?;

    let per_sample_logits: Option<Vec<Vec<f64>>> = if method.needs_teacher() {
        match (&teacher_logits, &teacher_params) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either --teacher-logits or --teacher-params, not both".into(),
                ))
            }
            (Some(logits_path), None) => {
                Some(logits_from_file(logits_path, &samples, inventory.k())?)
            }
            (None, Some(params_path)) => {
                let future = if method == LabelMethod::FutureSelfAdjust {
                    2
                } else {
                    0
                };
                Some(logits_from_params(
                    params_path,
                    &corpus,
                    &samples,
                    &inventory,
                    table.as_ref().expect("loaded when teacher params given"),
                    future,
                    window,
                )?)
            }
            (None, None) => {
                return Err(Error::Config(format!(
                    "method {method} needs teacher logits (--teacher-logits) or a teacher model (--teacher-params)"
                )))
            }
        }
    } else {
        None
    };

    let mut labels: Vec<(String, GrayscaleLabel)> = Vec::with_capacity(samples.len());
    for (i, sample) in samples.iter().enumerate() {
        let deps = LabelDeps {
            embeddings: table.as_ref().map(|t| (t, &aliases)),
            teacher_logits: per_sample_logits.as_ref().map(|l| l[i].as_slice()),
        };
        let label = build_label(method, sample.gold, &inventory, &deps)?;
        labels.push((sample.sample_id.clone(), label));
    }

    let out_dir = ctx.out_dir(&args.common.out_dir)?;
    let out_path = out_dir.join(args.out.as_deref().unwrap_or("labels.jsonl"));
    write_labels(&out_path, labels.iter().map(|(id, l)| (id.as_str(), l)))?;

    println!(
        "wrote {} {} labels to {}",
        labels.len(),
        method,
        out_path.display()
    );
    if method.anchors_gold() {
        let anchored = samples
            .iter()
            .zip(&labels)
            .filter(|(s, (_, l))| l.is_argmax_at(s.gold))
            .count();
        println!(
            "anchoring check: {anchored}/{} labels keep the annotated emotion as a top class",
            labels.len()
        );
    }
    println!("mean label entropy by emotion:");
    for (class, name) in inventory.names().iter().enumerate() {
        let entropies: Vec<f64> = samples
            .iter()
            .zip(&labels)
            .filter(|(s, _)| s.gold == class)
            .map(|(_, (_, l))| l.entropy())
            .collect();
        if entropies.is_empty() {
            println!("  {name}: no samples");
        } else {
            let mean = entropies.iter().sum::<f64>() / entropies.len() as f64;
            println!("  {name}: {} ({} samples)", fmt_g9(mean), entropies.len());
        }
    }
    Ok(())
}

fn train_teacher(args: TrainTeacherArgs) -> Result<()> {
    let ctx = Ctx::new(&args.common)?;
    let inventory = ctx.inventory(&args.common.inventory)?;
    let train_path = ctx.required_path(&args.train, "corpus.train", "training corpus")?;
    let corpus = load_corpus(&train_path, &inventory)?;
    let table_path = ctx.required_path(&args.common.embeddings, "embeddings.path", "embedding table")?;
    let table = EmbeddingTable::load(&table_path, None)?;
    let config = ctx.train_config(&args.flags, args.future_turns)?;

    let dev_corpus = match ctx.optional_path(&args.dev, "corpus.dev") {
        Some(path) => Some(load_corpus(&path, &inventory)?),
        None => None,
    };

    let run = teacher_pipeline(
        &corpus,
        &inventory,
        &table,
        dev_corpus.as_deref(),
        &config,
        config.future_turns,
    )?;

    let out_dir = ctx.out_dir(&args.common.out_dir)?;
    let params_path = out_dir.join("teacher_params.json");
    let logits_path = out_dir.join("teacher_logits.jsonl");
    write_params(&params_path, &run.report.params)?;
    write_teacher_logits(&logits_path, &run.logits)?;

    print_train_summary("teacher", &run.report, run.logits.len(), &config);
    println!("wrote {}", params_path.display());
    println!("wrote {} ({} rows)", logits_path.display(), run.logits.len());
    Ok(())
}

fn print_train_summary(what: &str, report: &TrainReport, n: usize, config: &TrainConfig) {
    let first = report.epoch_mean_loss.first().copied().unwrap_or(0.0);
    let last = report.epoch_mean_loss.last().copied().unwrap_or(0.0);
    println!(
        "trained {what} on {n} samples for {} epochs (seed {}): mean loss {} -> {}",
        config.epochs,
        config.seed,
        fmt_g9(first),
        fmt_g9(last)
    );
    if let Some(epoch) = report.selected_epoch {
        println!("kept the parameters of epoch {} (best dev weighted F1)", epoch + 1);
    }
}

/// Aligns a label file with the training samples, by sample id.
fn aligned_labels(
    path: &Path,
    samples: &[TrainingSample],
    inventory: &EmotionInventory,
) -> Result<Vec<GrayscaleLabel>> {
    let records = jsonl::read_labels(path)?;
    let mut by_id: HashMap<String, GrayscaleLabel> = HashMap::with_capacity(records.len());
    for r in records {
        by_id.insert(r.sample_id, r.label);
    }
    samples
        .iter()
        .map(|s| {
            let label = by_id.remove(&s.sample_id).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "no label for sample {} in {}",
                    s.sample_id,
                    path.display()
                ))
            })?;
            if label.k() != inventory.k() {
                return Err(Error::InvalidInput(format!(
                    "label for sample {} has {} classes, inventory has {}",
                    s.sample_id,
                    label.k(),
                    inventory.k()
                )));
            }
            Ok(label)
        })
        .collect()
}

fn train_student(args: TrainStudentArgs) -> Result<()> {
    let ctx = Ctx::new(&args.common)?;
    let inventory = ctx.inventory(&args.common.inventory)?;
    let train_path = ctx.required_path(&args.train, "corpus.train", "training corpus")?;
    let corpus = load_corpus(&train_path, &inventory)?;
    let table_path = ctx.required_path(&args.common.embeddings, "embeddings.path", "embedding table")?;
    let table = EmbeddingTable::load(&table_path, None)?;
    let config = ctx.train_config(&args.flags, None)?;
    let alpha = ctx.alpha(args.alpha)?;

    // Students never see future turns.
    let samples = enumerate_samples(&corpus, 0, config.window)?;
    let labels_path = ctx.optional_path(&args.labels, "labels.file");
    let labels: Option<Vec<GrayscaleLabel>> = if alpha > 0.0 {
        let path = labels_path.ok_or_else(|| {
            Error::Config(format!(
                "alpha is {} but no label file was given (--labels or labels.file)",
                fmt_g9(alpha)
            ))
        })?;
        Some(aligned_labels(&path, &samples, &inventory)?)
    } else {
        None
    };
    let label_method = labels
        .as_ref()
        .and_then(|ls| ls.first().map(|l| l.method()))
        .unwrap_or(LabelMethod::OneHot);
    let loss = LossConfig::new(alpha, label_method)?;

    let dev_samples = match ctx.optional_path(&args.dev, "corpus.dev") {
        Some(path) => Some(enumerate_samples(
            &load_corpus(&path, &inventory)?,
            0,
            config.window,
        )?),
        None => None,
    };

    let report = train(
        &samples,
        labels.as_deref(),
        &table,
        inventory.k(),
        dev_samples.as_deref(),
        &config,
        &loss,
    )?;

    let out_dir = ctx.out_dir(&args.common.out_dir)?;
    let out_path = out_dir.join(args.out.as_deref().unwrap_or("student_params.json"));
    write_params(&out_path, &report.params)?;
    print_train_summary(
        &format!("student (alpha {}, labels {})", fmt_g9(alpha), label_method),
        &report,
        samples.len(),
        &config,
    );
    println!("wrote {}", out_path.display());
    Ok(())
}

fn excluded_indices(spec: Option<&str>, inventory: &EmotionInventory) -> Result<Vec<usize>> {
    let mut indices = Vec::new();
    if let Some(spec) = spec {
        for name in spec.split(',') {
            let name = name.trim();
            if name.is_empty() {
                continue;
            }
            let index = inventory.index_of(name).ok_or_else(|| {
                Error::Config(format!(
                    "cannot exclude unknown emotion {:?} (inventory: {})",
                    name,
                    inventory.names().join(", ")
                ))
            })?;
            indices.push(index);
        }
    }
    Ok(indices)
}

fn predict_samples(
    params: &ModelParams,
    samples: &[TrainingSample],
    table: &EmbeddingTable,
) -> Result<Vec<PredictionRecord>> {
    samples
        .iter()
        .map(|s| {
            let prediction = forward(params, &featurize(s, table))?;
            Ok(PredictionRecord {
                sample_id: s.sample_id.clone(),
                gold: s.gold,
                pred: prediction.argmax(),
                future_turns_used: s.future_turns_used,
            })
        })
        .collect()
}

fn eval(args: EvalArgs) -> Result<()> {
    let ctx = Ctx::new(&args.common)?;
    let inventory = ctx.inventory(&args.common.inventory)?;
    let corpus_path = ctx.required_path(&args.corpus, "corpus.test", "evaluation corpus")?;
    let corpus = load_corpus(&corpus_path, &inventory)?;
    let table_path = ctx.required_path(&args.common.embeddings, "embeddings.path", "embedding table")?;
    let table = EmbeddingTable::load(&table_path, None)?;
    let params_path = ctx.required_path(&args.params, "teacher.params", "parameter file")?;
    let params = read_params(&params_path)?;
    check_params_shape(&params, &inventory, &table)?;
    let window = ctx.window(args.window)?;
    let exclude_spec = args
        .exclude
        .clone()
        .or_else(|| self_exclude(&ctx))
        .unwrap_or_default();
    let excluded = excluded_indices(Some(&exclude_spec), &inventory)?;

    // Evaluation inputs never include future turns.
    let samples = enumerate_samples(&corpus, 0, window)?;
    if samples.is_empty() {
        return Err(Error::InvalidInput(format!(
            "corpus {} has no samples",
            corpus_path.display()
        )));
    }
    let predictions = predict_samples(&params, &samples, &table)?;
    let gold: Vec<usize> = predictions.iter().map(|p| p.gold).collect();
    let pred: Vec<usize> = predictions.iter().map(|p| p.pred).collect();
    let result = evaluate(&gold, &pred, inventory.k(), &excluded)?;

    let out_dir = ctx.out_dir(&args.common.out_dir)?;
    let prefix = args.prefix.as_deref().unwrap_or("eval");
    let predictions_path = out_dir.join(format!("{prefix}_predictions.jsonl"));
    let report_path = out_dir.join(format!("{prefix}_report.json"));
    write_predictions(&predictions_path, &predictions)?;
    write_eval_report(&report_path, &result, &inventory)?;

    let fmt_opt = |v: Option<f64>| v.map_or("undefined".to_string(), fmt_g9);
    println!(
        "evaluated {} samples from {}",
        samples.len(),
        corpus_path.display()
    );
    println!("weighted F1 {}", fmt_opt(result.weighted_f1));
    if excluded.is_empty() {
        println!("macro F1 {}", fmt_opt(result.macro_f1));
        println!("micro F1 {}", fmt_opt(result.micro_f1));
    } else {
        let names: Vec<&str> = excluded
            .iter()
            .filter_map(|&i| inventory.name(i))
            .collect();
        println!(
            "macro F1 {} (excluding {})",
            fmt_opt(result.macro_f1),
            names.join(", ")
        );
        println!(
            "micro F1 {} (excluding {})",
            fmt_opt(result.micro_f1),
            names.join(", ")
        );
    }
    println!("wrote {}", report_path.display());
    println!("wrote {}", predictions_path.display());
    Ok(())
}

fn self_exclude(ctx: &Ctx) -> Option<String> {
    ctx.file.get("eval.exclude").map(String::from)
}

fn alpha_sweep(args: AlphaSweepArgs) -> Result<()> {
    let ctx = Ctx::new(&args.common)?;
    let inventory = ctx.inventory(&args.common.inventory)?;
    let train_path = ctx.required_path(&args.train, "corpus.train", "training corpus")?;
    let dev_path = ctx.required_path(&args.dev, "corpus.dev", "dev corpus")?;
    let test_path = ctx.required_path(&args.test, "corpus.test", "test corpus")?;
    let table_path = ctx.required_path(&args.common.embeddings, "embeddings.path", "embedding table")?;
    let table = EmbeddingTable::load(&table_path, None)?;
    let config = ctx.train_config(&args.flags, None)?;

    let alphas_spec = args
        .alphas
        .clone()
        .or_else(|| ctx.file.get("sweep.alphas").map(String::from))
        .unwrap_or_else(|| DEFAULT_SWEEP_ALPHAS.to_string());
    let mut alphas = Vec::new();
    for token in alphas_spec.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let alpha: f64 = token
            .parse()
            .map_err(|_| Error::Config(format!("cannot parse alpha {token:?}")))?;
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::Config(format!(
                "alpha must be finite and nonnegative, got {token}"
            )));
        }
        alphas.push(alpha);
    }
    if alphas.is_empty() {
        return Err(Error::Config("no alpha values to sweep".into()));
    }

    let corpus = load_corpus(&train_path, &inventory)?;
    let samples = enumerate_samples(&corpus, 0, config.window)?;
    let dev_samples = enumerate_samples(&load_corpus(&dev_path, &inventory)?, 0, config.window)?;
    let test_samples = enumerate_samples(&load_corpus(&test_path, &inventory)?, 0, config.window)?;

    let needs_labels = alphas.iter().any(|&a| a > 0.0);
    let labels: Option<Vec<GrayscaleLabel>> = if needs_labels {
        let path = ctx
            .optional_path(&args.labels, "labels.file")
            .ok_or_else(|| {
                Error::Config(
                    "sweeping positive alphas needs a label file (--labels or labels.file)".into(),
                )
            })?;
        Some(aligned_labels(&path, &samples, &inventory)?)
    } else {
        None
    };
    let label_method = labels
        .as_ref()
        .and_then(|ls| ls.first().map(|l| l.method()))
        .unwrap_or(LabelMethod::OneHot);

    let weighted_on = |params: &ModelParams, eval_samples: &[TrainingSample]| -> Result<Option<f64>> {
        let predictions = predict_samples(params, eval_samples, &table)?;
        let gold: Vec<usize> = predictions.iter().map(|p| p.gold).collect();
        let pred: Vec<usize> = predictions.iter().map(|p| p.pred).collect();
        Ok(evaluate(&gold, &pred, inventory.k(), &[])?.weighted_f1)
    };

    let fmt_opt = |v: Option<f64>| v.map_or("undefined".to_string(), fmt_g9);
    let mut rows = Vec::new();
    let mut best: Option<(f64, f64)> = None;
    for &alpha in &alphas {
        let loss = LossConfig::new(alpha, if alpha > 0.0 { label_method } else { LabelMethod::OneHot })?;
        let report = train(
            &samples,
            if alpha > 0.0 { labels.as_deref() } else { None },
            &table,
            inventory.k(),
            Some(&dev_samples),
            &config,
            &loss,
        )?;
        let dev_f1 = weighted_on(&report.params, &dev_samples)?;
        let test_f1 = weighted_on(&report.params, &test_samples)?;
        println!(
            "alpha {}: dev weighted F1 {}, test weighted F1 {}",
            fmt_g9(alpha),
            fmt_opt(dev_f1),
            fmt_opt(test_f1)
        );
        if let Some(dev) = dev_f1 {
            if best.is_none_or(|(b, _)| dev > b) {
                best = Some((dev, alpha));
            }
        }
        rows.push((alpha, dev_f1, test_f1));
    }

    let out_dir = ctx.out_dir(&args.common.out_dir)?;
    let out_path = out_dir.join(args.out.as_deref().unwrap_or("alpha_sweep.csv"));
    let mut csv = String::from("alpha,dev_weighted_f1,test_weighted_f1\n");
    for (alpha, dev_f1, test_f1) in &rows {
        let cell = |v: &Option<f64>| v.map_or(String::new(), fmt_g9);
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt_g9(*alpha),
            cell(dev_f1),
            cell(test_f1)
        ));
    }
    std::fs::write(&out_path, csv)?;
    if let Some((dev, alpha)) = best {
        println!(
            "best alpha by dev weighted F1: {} ({})",
            fmt_g9(alpha),
            fmt_g9(dev)
        );
    }
    println!("wrote {}", out_path.display());
    Ok(())
}
