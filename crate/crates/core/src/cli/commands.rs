use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::corpus::{corpus_stats, read_corpus_file, synthesize_corpus, write_jsonl, Corpus, SynthConfig};
use crate::error::{Error, Result};
use crate::features::{corpus_features, labeled_dataset, FeatureSet};
use crate::models::{
    cross_validate_with, model_to_json, ranked_importance, write_importance_csv, write_metrics_csv,
    ClassifierSpec, CvAggregation, CvOptions, TrainedModel,
};
use crate::sentiment::{extreme_groups, sentiment_dynamics, write_dynamics_csv, SentimentLexicon, StageMode};
use crate::textstats::{
    coverage_counts, expand_lexicon_scored, rank_ngrams, write_ranking_csv, NgramConfig, PmiConfig,
};

/// Ingest warnings beyond this many are summarised rather than listed.
const MAX_LISTED_SKIPS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthRun {
    pub synth: SynthConfig,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRun {
    pub corpus: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsRun {
    pub corpus: PathBuf,
    /// `None` is the bundled lexicon.
    pub lexicon: Option<PathBuf>,
    pub stage_mode: StageMode,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRun {
    pub corpus: PathBuf,
    pub lexicon: Option<PathBuf>,
    pub model: ClassifierSpec,
    pub features: FeatureSet,
    pub cv_k: usize,
    pub aggregation: CvAggregation,
    pub stage_mode: StageMode,
    pub seed: u64,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramsRun {
    pub corpus: PathBuf,
    pub ngrams: NgramConfig,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandRun {
    pub corpus: PathBuf,
    pub seed_lexicon: Option<PathBuf>,
    pub pmi: PmiConfig,
    pub output: PathBuf,
    pub report: PathBuf,
}

/// A fully resolved command: defaults, config file and flags already merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum CommandConfig {
    Synth(SynthRun),
    Stats(StatsRun),
    Dynamics(DynamicsRun),
    Train(TrainRun),
    Ngrams(NgramsRun),
    Expand(ExpandRun),
}

/// A file to be written.
#[derive(Debug, Clone)]
pub struct Output {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, Default)]
pub struct Execution {
    pub outputs: Vec<Output>,
    pub warnings: Vec<String>,
}

impl Execution {
    fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        log::warn!("{msg}");
        self.warnings.push(msg);
    }

    fn emit(&mut self, path: &Path, bytes: Vec<u8>) {
        self.outputs.push(Output {
            path: path.to_path_buf(),
            bytes,
        });
    }
}

fn relocate(path: &mut PathBuf, dir: &Path) {
    if let Some(name) = path.file_name() {
        *path = dir.join(name);
    }
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Synth(_) => "synth",
            CommandConfig::Stats(_) => "stats",
            CommandConfig::Dynamics(_) => "dynamics",
            CommandConfig::Train(_) => "train",
            CommandConfig::Ngrams(_) => "ngrams",
            CommandConfig::Expand(_) => "expand",
        }
    }

    /// The seed the command's randomness derives from; 0 for commands that
    /// use none.
    pub fn seed(&self) -> u64 {
        match self {
            CommandConfig::Synth(r) => r.synth.seed,
            CommandConfig::Train(r) => r.seed,
            _ => 0,
        }
    }

    pub fn inputs(&self) -> Vec<PathBuf> {
        let mut v = Vec::new();
        match self {
            CommandConfig::Synth(_) => {}
            CommandConfig::Stats(r) => v.push(r.corpus.clone()),
            CommandConfig::Dynamics(r) => {
                v.extend([Some(r.corpus.clone()), r.lexicon.clone()].into_iter().flatten())
            }
            CommandConfig::Train(r) => {
                v.extend([Some(r.corpus.clone()), r.lexicon.clone()].into_iter().flatten())
            }
            CommandConfig::Ngrams(r) => v.push(r.corpus.clone()),
            CommandConfig::Expand(r) => v.extend(
                [Some(r.corpus.clone()), r.seed_lexicon.clone()]
                    .into_iter()
                    .flatten(),
            ),
        }
        v
    }

    pub fn manifest_path(&self) -> PathBuf {
        let beside = |p: &Path| {
            let mut s = p.as_os_str().to_owned();
            s.push(".manifest.json");
            PathBuf::from(s)
        };
        match self {
            CommandConfig::Synth(r) => beside(&r.output),
            CommandConfig::Stats(r) => beside(&r.output),
            CommandConfig::Dynamics(r) => beside(&r.output),
            CommandConfig::Train(r) => r.output_dir.join("manifest.json"),
            CommandConfig::Ngrams(r) => beside(&r.output),
            CommandConfig::Expand(r) => beside(&r.output),
        }
    }

    /// Point every output into `dir`, keeping file names.
    pub fn relocate_outputs(&mut self, dir: &Path) {
        match self {
            CommandConfig::Synth(r) => relocate(&mut r.output, dir),
            CommandConfig::Stats(r) => relocate(&mut r.output, dir),
            CommandConfig::Dynamics(r) => relocate(&mut r.output, dir),
            CommandConfig::Train(r) => r.output_dir = dir.to_path_buf(),
            CommandConfig::Ngrams(r) => relocate(&mut r.output, dir),
            CommandConfig::Expand(r) => {
                relocate(&mut r.output, dir);
                relocate(&mut r.report, dir);
            }
        }
    }

    /// Compute every output in memory. Nothing is written here, so a failing
    /// command leaves no partial files.
    pub fn execute(&self) -> Result<Execution> {
        let mut ex = Execution::default();
        match self {
            CommandConfig::Synth(r) => {
                let corpus = synthesize_corpus(&r.synth)?;
                let mut buf = Vec::new();
                write_jsonl(&mut buf, &corpus)?;
                ex.emit(&r.output, buf);
            }
            CommandConfig::Stats(r) => {
                let (corpus, skipped) = load_corpus(&r.corpus, &mut ex)?;
                let report = json!({
                    "stats": corpus_stats(&corpus),
                    "sessions_skipped": skipped,
                });
                ex.emit(&r.output, pretty(&report)?);
            }
            CommandConfig::Dynamics(r) => {
                let (corpus, _) = load_corpus(&r.corpus, &mut ex)?;
                let lex = load_lexicon(r.lexicon.as_deref())?;
                let d = sentiment_dynamics(&corpus, &lex, &extreme_groups(), r.stage_mode);
                ex.warnings.extend(d.warnings.iter().cloned());
                let mut buf = Vec::new();
                write_dynamics_csv(&mut buf, &d)?;
                ex.emit(&r.output, buf);
            }
            CommandConfig::Train(r) => train(r, &mut ex)?,
            CommandConfig::Ngrams(r) => {
                let (corpus, _) = load_corpus(&r.corpus, &mut ex)?;
                let ranking = rank_ngrams(&corpus, &r.ngrams)?;
                if ranking.n_true + ranking.n_false == 0 {
                    return Err(Error::Dataset("corpus has no labeled sessions".into()));
                }
                for w in &ranking.warnings {
                    ex.warn(w.clone());
                }
                let mut buf = Vec::new();
                write_ranking_csv(&mut buf, &ranking, &r.ngrams)?;
                ex.emit(&r.output, buf);
            }
            CommandConfig::Expand(r) => expand(r, &mut ex)?,
        }
        Ok(ex)
    }
}

fn pretty(v: &impl Serialize) -> Result<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(v)?;
    buf.push(b'\n');
    Ok(buf)
}

/// Returns the corpus and the number of sessions dropped during ingest.
fn load_corpus(path: &Path, ex: &mut Execution) -> Result<(Corpus, usize)> {
    let parsed = read_corpus_file(path)?;
    let skipped = parsed.report.skipped.len();
    for s in parsed.report.skipped.iter().take(MAX_LISTED_SKIPS) {
        ex.warn(format!(
            "{}: skipped session at position {} ({}): {}",
            path.display(),
            s.position,
            s.session_id.as_deref().unwrap_or("no id"),
            s.reasons.join("; ")
        ));
    }
    if skipped > MAX_LISTED_SKIPS {
        ex.warn(format!("{}: {skipped} sessions skipped in total", path.display()));
    }
    Ok((parsed.corpus, skipped))
}

fn load_lexicon(path: Option<&Path>) -> Result<SentimentLexicon> {
    match path {
        Some(p) => SentimentLexicon::load(p),
        None => Ok(SentimentLexicon::bundled().clone()),
    }
}

fn train(r: &TrainRun, ex: &mut Execution) -> Result<()> {
    let (corpus, _) = load_corpus(&r.corpus, ex)?;
    let lex = load_lexicon(r.lexicon.as_deref())?;
    let features = corpus_features(&corpus, &lex, r.stage_mode);
    let data = labeled_dataset(&features, r.features)
        .map_err(|e| Error::Dataset(format!("no labeled sessions to train on ({e})")))?;
    if data.n_rows() < r.cv_k {
        return Err(Error::Dataset(format!(
            "{} labeled sessions is fewer than cv_k = {}",
            data.n_rows(),
            r.cv_k
        )));
    }
    let spec = r.model.with_seed(r.seed);
    let opts = CvOptions {
        k: r.cv_k,
        seed: r.seed,
        aggregation: r.aggregation,
    };
    let metrics = cross_validate_with(&data, &spec, &opts)?;
    let header = format!(
        "# features={} cv_k={} aggregation={} spec={}\n",
        r.features.as_str(),
        r.cv_k,
        match r.aggregation {
            CvAggregation::Pooled => "pooled",
            CvAggregation::FoldMean => "fold_mean",
        },
        serde_json::to_string(&spec)?
    );

    let mut buf = header.clone().into_bytes();
    write_metrics_csv(&mut buf, spec.name(), &metrics)?;
    ex.emit(&r.output_dir.join("metrics.csv"), buf);

    let model = spec.fit(&data)?;
    let mut dump = model_to_json(&model, &data.feature_names)?.into_bytes();
    dump.push(b'\n');
    ex.emit(&r.output_dir.join("model.json"), dump);

    if let TrainedModel::Forest(f) = &model {
        let mut buf = header.into_bytes();
        write_importance_csv(&mut buf, &ranked_importance(f, &data))?;
        ex.emit(&r.output_dir.join("importance.csv"), buf);
    }
    Ok(())
}

fn expand(r: &ExpandRun, ex: &mut Execution) -> Result<()> {
    let (corpus, _) = load_corpus(&r.corpus, ex)?;
    let seed = load_lexicon(r.seed_lexicon.as_deref())?;
    let (expanded, added) = expand_lexicon_scored(&corpus, &seed, &r.pmi)?;
    let (before, total) = coverage_counts(&corpus, &seed);
    let (after, _) = coverage_counts(&corpus, &expanded);
    if total == 0 {
        ex.warn("corpus has no utterances; coverage reported as 0");
    }
    let frac = |hits: usize| {
        if total == 0 {
            0.0
        } else {
            hits as f64 / total as f64
        }
    };

    let mut tsv = Vec::new();
    expanded.write_tsv(&mut tsv)?;
    ex.emit(&r.output, tsv);

    let report = json!({
        "seed_lexicon": { "name": seed.name, "version": seed.version, "entries": seed.len() },
        "expanded_entries": expanded.len(),
        "added": added.iter().map(|p| json!({
            "token": p.token,
            "windows": p.count,
            "score": p.score,
            "valence": expanded.valence(&p.token),
        })).collect::<Vec<_>>(),
        "utterances": total,
        "coverage_before": frac(before),
        "coverage_after": frac(after),
        "coverage_delta": frac(after) - frac(before),
    });
    ex.emit(&r.report, pretty(&report)?);
    Ok(())
}
