//! The `chatmine` command line: argument parsing, resolution of defaults,
//! config file and flags into a [`CommandConfig`], execution with atomic
//! writes, and run manifests that can be replayed.
//!
//! Exit status is 0 when every output was written and 2 otherwise.

mod commands;
mod manifest;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;

pub use commands::{
    CommandConfig, DynamicsRun, Execution, ExpandRun, NgramsRun, Output, StatsRun, SynthRun, TrainRun,
};
pub use manifest::{sha256_hex, write_atomic, FileDigest, RunManifest, TOOL_NAME, TOOL_VERSION};

use crate::corpus::SynthConfig;
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::models::{ClassifierSpec, CvAggregation, ForestConfig, LogisticConfig};
use crate::sentiment::StageMode;
use crate::textstats::{NgramConfig, PmiConfig, PmiWindow, SpeakerFilter, StageFilter};

#[derive(Debug, Parser)]
#[command(
    name = "chatmine",
    version,
    about = "Mine customer-support chat logs for satisfaction signals"
)]
pub struct Cli {
    /// Seed for every random choice. Synth falls back to its config's seed,
    /// everything else to 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// TOML settings for the command. For `synth` this is a generator
    /// config or `default` for the built-in one.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a calibrated synthetic corpus as JSONL.
    Synth(SynthArgs),
    /// Summary statistics of a corpus, as JSON.
    Stats(StatsArgs),
    /// Stage-by-stage mean sentiment for the extreme rating groups, as CSV.
    Dynamics(DynamicsArgs),
    /// Cross-validate a classifier and dump the model trained on all data.
    Train(TrainArgs),
    /// Rank n-grams by association with dissatisfaction, as CSV.
    Ngrams(NgramsArgs),
    /// Expand a seed lexicon with PMI polarity and report coverage.
    Expand(ExpandArgs),
    /// Re-run a command from its manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, short)]
    pub output: PathBuf,
    /// Override the configured number of sessions.
    #[arg(long)]
    pub sessions: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StageModeArg {
    Index,
    Time,
}

impl From<StageModeArg> for StageMode {
    fn from(a: StageModeArg) -> StageMode {
        match a {
            StageModeArg::Index => StageMode::Index,
            StageModeArg::Time => StageMode::Time,
        }
    }
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Valence lexicon TSV (default: bundled).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub stage_mode: Option<StageModeArg>,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Majority,
    Logistic,
    Forest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FeaturesArg {
    All,
    MetaOnly,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AggregationArg {
    Pooled,
    FoldMean,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long, value_enum)]
    pub features: Option<FeaturesArg>,
    #[arg(long)]
    pub cv_k: Option<usize>,
    #[arg(long, value_enum)]
    pub aggregation: Option<AggregationArg>,
    #[arg(long, value_enum)]
    pub stage_mode: Option<StageModeArg>,
    /// Forest size override.
    #[arg(long)]
    pub n_trees: Option<usize>,
    #[arg(long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct NgramsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// customer, agent or both.
    #[arg(long)]
    pub speaker: Option<SpeakerFilter>,
    /// 1-4 or all.
    #[arg(long)]
    pub stage: Option<StageFilter>,
    /// Gram orders, e.g. `1,2`.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub min_support: Option<usize>,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WindowArg {
    Utterance,
    Session,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Seed lexicon TSV (default: bundled).
    #[arg(long)]
    pub seed_lexicon: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub window: Option<WindowArg>,
    #[arg(long)]
    pub min_count: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub smoothing: Option<f64>,
    #[arg(long)]
    pub score_cap: Option<f64>,
    /// Expanded lexicon TSV.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Coverage report JSON (default: `<output>.report.json`).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write outputs here instead of the recorded locations.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Fail unless every output matches its recorded digest.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct DynamicsSettings {
    stage_mode: Option<StageMode>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TrainSettings {
    model: Option<String>,
    features: Option<FeatureSet>,
    cv_k: Option<usize>,
    aggregation: Option<CvAggregation>,
    stage_mode: Option<StageMode>,
    seed: Option<u64>,
    logistic: Option<LogisticConfig>,
    forest: Option<ForestConfig>,
}

fn load_settings<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
}

fn absolute(p: &Path) -> Result<PathBuf> {
    Ok(std::path::absolute(p)?)
}

/// Merge defaults, the `--config` file and flags. Paths are made absolute
/// so a manifest can be replayed from any directory.
pub fn resolve(cli: &Cli) -> Result<CommandConfig> {
    let config = cli.config.as_deref();
    Ok(match &cli.command {
        Command::Synth(a) => {
            let source = config.map_or("default".to_string(), |p| p.to_string_lossy().into_owned());
            let mut synth = SynthConfig::load(&source)?;
            if let Some(seed) = cli.seed {
                synth.seed = seed;
            }
            if let Some(n) = a.sessions {
                synth.n_sessions = n;
            }
            synth.validate()?;
            CommandConfig::Synth(SynthRun {
                synth,
                output: absolute(&a.output)?,
            })
        }
        Command::Stats(a) => {
            if config.is_some() {
                log::warn!("stats takes no settings; --config ignored");
            }
            CommandConfig::Stats(StatsRun {
                corpus: absolute(&a.corpus)?,
                output: absolute(&a.output)?,
            })
        }
        Command::Dynamics(a) => {
            let s: DynamicsSettings = load_settings(config)?;
            CommandConfig::Dynamics(DynamicsRun {
                corpus: absolute(&a.corpus)?,
                lexicon: a.lexicon.as_deref().map(absolute).transpose()?,
                stage_mode: a.stage_mode.map(Into::into).or(s.stage_mode).unwrap_or_default(),
                output: absolute(&a.output)?,
            })
        }
        Command::Train(a) => CommandConfig::Train(resolve_train(cli, a)?),
        Command::Ngrams(a) => {
            let mut ngrams: NgramConfig = load_settings(config)?;
            if let Some(s) = a.speaker {
                ngrams.speaker = s;
            }
            if let Some(s) = a.stage {
                ngrams.stage = s;
            }
            if let Some(n) = &a.n {
                ngrams.n_values = n.iter().copied().collect::<BTreeSet<_>>();
            }
            if let Some(m) = a.min_support {
                ngrams.min_session_support = m;
            }
            ngrams.validate()?;
            CommandConfig::Ngrams(NgramsRun {
                corpus: absolute(&a.corpus)?,
                ngrams,
                output: absolute(&a.output)?,
            })
        }
        Command::Expand(a) => {
            let mut pmi: PmiConfig = load_settings(config)?;
            if let Some(w) = a.window {
                pmi.window = match w {
                    WindowArg::Utterance => PmiWindow::Utterance,
                    WindowArg::Session => PmiWindow::Session,
                };
            }
            if let Some(v) = a.min_count {
                pmi.min_count = v;
            }
            if let Some(v) = a.threshold {
                pmi.polarity_threshold = v;
            }
            if let Some(v) = a.smoothing {
                pmi.smoothing = v;
            }
            if let Some(v) = a.score_cap {
                pmi.score_cap = v;
            }
            pmi.validate()?;
            let output = absolute(&a.output)?;
            let report = match &a.report {
                Some(p) => absolute(p)?,
                None => {
                    let mut s = output.as_os_str().to_owned();
                    s.push(".report.json");
                    PathBuf::from(s)
                }
            };
            CommandConfig::Expand(ExpandRun {
                corpus: absolute(&a.corpus)?,
                seed_lexicon: a.seed_lexicon.as_deref().map(absolute).transpose()?,
                pmi,
                output,
                report,
            })
        }
        Command::Replay(_) => return Err(Error::config("replay has no resolved form")),
    })
}

fn resolve_train(cli: &Cli, a: &TrainArgs) -> Result<TrainRun> {
    let s: TrainSettings = load_settings(cli.config.as_deref())?;
    let name = match (a.model, &s.model) {
        (Some(ModelArg::Majority), _) => "majority".to_string(),
        (Some(ModelArg::Logistic), _) => "logistic".to_string(),
        (Some(ModelArg::Forest), _) => "forest".to_string(),
        (None, Some(m)) => m.clone(),
        (None, None) => return Err(Error::config("no model given (--model majority|logistic|forest)")),
    };
    let mut model = match name.as_str() {
        "majority" => ClassifierSpec::Majority,
        "logistic" => ClassifierSpec::Logistic(s.logistic.unwrap_or_default()),
        "forest" => ClassifierSpec::Forest(s.forest.unwrap_or_default()),
        other => {
            return Err(Error::config(format!(
                "unknown model {other:?} (majority, logistic, forest)"
            )))
        }
    };
    if let (Some(n), ClassifierSpec::Forest(f)) = (a.n_trees, &mut model) {
        f.n_trees = n;
    }
    if let ClassifierSpec::Forest(f) = &model {
        if f.n_trees == 0 {
            return Err(Error::config("n_trees must be at least 1"));
        }
    }
    let cv_k = a.cv_k.or(s.cv_k).unwrap_or(10);
    if cv_k < 2 {
        return Err(Error::config(format!("cv_k must be at least 2, got {cv_k}")));
    }
    Ok(TrainRun {
        corpus: absolute(&a.corpus)?,
        lexicon: a.lexicon.as_deref().map(absolute).transpose()?,
        model,
        features: match a.features {
            Some(FeaturesArg::All) => FeatureSet::All,
            Some(FeaturesArg::MetaOnly) => FeatureSet::MetaOnly,
            None => s.features.unwrap_or_default(),
        },
        cv_k,
        aggregation: match a.aggregation {
            Some(AggregationArg::Pooled) => CvAggregation::Pooled,
            Some(AggregationArg::FoldMean) => CvAggregation::FoldMean,
            None => s.aggregation.unwrap_or_default(),
        },
        stage_mode: a.stage_mode.map(Into::into).or(s.stage_mode).unwrap_or_default(),
        seed: cli.seed.or(s.seed).unwrap_or(0),
        output_dir: absolute(&a.output_dir)?,
    })
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::config("--threads must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Execute a resolved command, write its outputs and its manifest.
pub fn execute(cfg: &CommandConfig, threads: Option<usize>) -> Result<RunManifest> {
    let started = Instant::now();
    let inputs = cfg
        .inputs()
        .iter()
        .map(|p| FileDigest::of_file(p))
        .collect::<Result<Vec<_>>>()?;
    let ex = with_threads(threads, || cfg.execute())??;

    if let CommandConfig::Train(r) = cfg {
        std::fs::create_dir_all(&r.output_dir).map_err(|source| Error::File {
            path: r.output_dir.clone(),
            source,
        })?;
    }
    let mut outputs = Vec::with_capacity(ex.outputs.len());
    for o in &ex.outputs {
        write_atomic(&o.path, &o.bytes)?;
        outputs.push(FileDigest::of_bytes(&o.path, &o.bytes));
    }
    let manifest = RunManifest {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        command: cfg.name().to_string(),
        seed: cfg.seed(),
        config: cfg.clone(),
        inputs,
        outputs,
        warnings: ex.warnings,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    write_atomic(&cfg.manifest_path(), manifest.to_json()?.as_bytes())?;
    Ok(manifest)
}

/// Re-run the command recorded in `manifest_path`. Inputs must still match
/// their digests. With `check`, every output must match too.
pub fn replay(
    manifest_path: &Path,
    output_dir: Option<&Path>,
    check: bool,
    threads: Option<usize>,
) -> Result<RunManifest> {
    let recorded = RunManifest::load(manifest_path)?;
    if recorded.version != TOOL_VERSION {
        log::warn!(
            "manifest was written by version {}, replaying with {TOOL_VERSION}",
            recorded.version
        );
    }
    for input in &recorded.inputs {
        let now = FileDigest::of_file(&input.path)?;
        if now.sha256 != input.sha256 {
            return Err(Error::Replay(format!(
                "input {} has changed since the run",
                input.path.display()
            )));
        }
    }
    let mut cfg = recorded.config.clone();
    if let Some(dir) = output_dir {
        std::fs::create_dir_all(dir).map_err(|source| Error::File {
            path: dir.to_path_buf(),
            source,
        })?;
        cfg.relocate_outputs(&absolute(dir)?);
    }
    let fresh = execute(&cfg, threads)?;
    if check {
        if fresh.outputs.len() != recorded.outputs.len() {
            return Err(Error::Replay(format!(
                "{} outputs recorded, {} produced",
                recorded.outputs.len(),
                fresh.outputs.len()
            )));
        }
        for (old, new) in recorded.outputs.iter().zip(&fresh.outputs) {
            if old.sha256 != new.sha256 {
                return Err(Error::Replay(format!(
                    "{} differs from recorded {}",
                    new.path.display(),
                    old.path.display()
                )));
            }
        }
    }
    Ok(fresh)
}

/// Run a parsed command line.
pub fn run(cli: &Cli) -> Result<RunManifest> {
    match &cli.command {
        Command::Replay(a) => replay(&a.manifest, a.output_dir.as_deref(), a.check, cli.threads),
        _ => execute(&resolve(cli)?, cli.threads),
    }
}
