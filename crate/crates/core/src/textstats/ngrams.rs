use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{chi_squared, cramers_v, ContingencyTable};
use crate::corpus::{Corpus, Session, Speaker};
use crate::error::{Error, Result};
use crate::features::label_dissatisfaction;
use crate::sentiment::{segment, tokenize, StageMode, STAGES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeakerFilter {
    Customer,
    Agent,
    #[default]
    Both,
}

impl SpeakerFilter {
    pub fn admits(self, s: Speaker) -> bool {
        match self {
            SpeakerFilter::Customer => s == Speaker::Customer,
            SpeakerFilter::Agent => s == Speaker::Agent,
            SpeakerFilter::Both => true,
        }
    }
}

impl FromStr for SpeakerFilter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "customer" => Ok(SpeakerFilter::Customer),
            "agent" => Ok(SpeakerFilter::Agent),
            "both" => Ok(SpeakerFilter::Both),
            _ => Err(format!("unknown speaker {s:?} (customer, agent, both)")),
        }
    }
}

impl fmt::Display for SpeakerFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpeakerFilter::Customer => "customer",
            SpeakerFilter::Agent => "agent",
            SpeakerFilter::Both => "both",
        })
    }
}

/// Serialised as `"1"`..`"4"` or `"all"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StageFilter {
    /// 1-based step.
    Step(u8),
    #[default]
    All,
}

impl FromStr for StageFilter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(StageFilter::All);
        }
        match s.parse::<u8>() {
            Ok(k) if (1..=STAGES as u8).contains(&k) => Ok(StageFilter::Step(k)),
            _ => Err(format!("stage must be 1-{STAGES} or all, got {s:?}")),
        }
    }
}

impl TryFrom<String> for StageFilter {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<StageFilter> for String {
    fn from(s: StageFilter) -> String {
        s.to_string()
    }
}

impl fmt::Display for StageFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageFilter::Step(k) => write!(f, "{k}"),
            StageFilter::All => f.write_str("all"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NgramConfig {
    /// Subset of {1, 2}.
    pub n_values: BTreeSet<usize>,
    pub speaker: SpeakerFilter,
    pub stage: StageFilter,
    pub min_session_support: usize,
    pub stage_mode: StageMode,
}

impl Default for NgramConfig {
    fn default() -> Self {
        NgramConfig {
            n_values: BTreeSet::from([1, 2]),
            speaker: SpeakerFilter::Both,
            stage: StageFilter::All,
            min_session_support: 20,
            stage_mode: StageMode::Index,
        }
    }
}

impl NgramConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::config("n_values must not be empty"));
        }
        if let Some(n) = self.n_values.iter().find(|n| !(1..=2).contains(*n)) {
            return Err(Error::config(format!(
                "n-gram order {n} is not supported (1 or 2)"
            )));
        }
        if self.min_session_support == 0 {
            return Err(Error::config("min_session_support must be at least 1"));
        }
        if let StageFilter::Step(k) = self.stage {
            if !(1..=STAGES as u8).contains(&k) {
                return Err(Error::config(format!("stage {k} is out of range")));
            }
        }
        Ok(())
    }
}

/// Distinct grams in the configured speaker/stage slice. Grams are tokens
/// joined by a single space and never span two utterances.
pub fn session_ngrams(s: &Session, cfg: &NgramConfig) -> BTreeSet<String> {
    let range = match cfg.stage {
        StageFilter::All => 0..s.utterances.len(),
        StageFilter::Step(k) => segment(s, cfg.stage_mode)[usize::from(k) - 1].clone(),
    };
    let mut out = BTreeSet::new();
    for u in &s.utterances[range] {
        if !cfg.speaker.admits(u.speaker) {
            continue;
        }
        let toks: Vec<String> = tokenize(&u.text).into_iter().map(|t| t.text).collect();
        for &n in &cfg.n_values {
            for w in toks.windows(n) {
                out.insert(w.join(" "));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramStat {
    pub gram: String,
    /// Number of tokens in the gram.
    pub n: usize,
    pub v: f64,
    pub chi2: f64,
    pub freq_true: f64,
    pub freq_false: f64,
    pub table: ContingencyTable,
}

impl NgramStat {
    pub fn from_table(gram: String, table: ContingencyTable) -> Self {
        NgramStat {
            n: gram.split(' ').count(),
            v: cramers_v(&table),
            chi2: chi_squared(&table),
            freq_true: table.freq_true(),
            freq_false: table.freq_false(),
            gram,
            table,
        }
    }

    pub fn support(&self) -> usize {
        self.table.support()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NgramRanking {
    pub stats: Vec<NgramStat>,
    pub warnings: Vec<String>,
    pub n_true: usize,
    pub n_false: usize,
}

/// Counts `[TRUE, FALSE]` sessions containing each gram, over labeled
/// sessions only. Shards merge by integer addition, so the result does not
/// depend on how the corpus is split.
fn presence_counts(c: &Corpus, cfg: &NgramConfig) -> (HashMap<String, [usize; 2]>, [usize; 2]) {
    c.sessions
        .par_iter()
        .filter_map(|s| s.survey.as_ref().map(|sv| (s, label_dissatisfaction(sv))))
        .fold(
            || (HashMap::new(), [0usize; 2]),
            |(mut counts, mut totals), (s, label)| {
                let slot = usize::from(!label);
                totals[slot] += 1;
                for g in session_ngrams(s, cfg) {
                    counts.entry(g).or_insert([0, 0])[slot] += 1;
                }
                (counts, totals)
            },
        )
        .reduce(
            || (HashMap::new(), [0usize; 2]),
            |(mut a, ta), (b, tb)| {
                for (g, v) in b {
                    let e = a.entry(g).or_insert([0, 0]);
                    e[0] += v[0];
                    e[1] += v[1];
                }
                (a, [ta[0] + tb[0], ta[1] + tb[1]])
            },
        )
}

/// Grams with enough session support, by Cramer's V descending and then by
/// gram. Space sorts below every token character, so comparing joined
/// strings equals comparing token sequences.
pub fn rank_ngrams(c: &Corpus, cfg: &NgramConfig) -> Result<NgramRanking> {
    cfg.validate()?;
    let (counts, [n_true, n_false]) = presence_counts(c, cfg);
    let mut out = NgramRanking {
        n_true,
        n_false,
        ..NgramRanking::default()
    };
    if n_true + n_false == 0 {
        out.warnings
            .push("no labeled sessions; n-gram ranking is empty".into());
        return Ok(out);
    }
    if n_true == 0 || n_false == 0 {
        out.warnings.push(format!(
            "only one label present ({n_true} TRUE, {n_false} FALSE); every V is 0"
        ));
    }
    out.stats = counts
        .into_iter()
        .filter(|(_, [a, b])| a + b >= cfg.min_session_support)
        .map(|(g, [a, b])| NgramStat::from_table(g, ContingencyTable::new(a, b, n_true - a, n_false - b)))
        .collect();
    out.stats
        .sort_by(|x, y| y.v.total_cmp(&x.v).then_with(|| x.gram.cmp(&y.gram)));
    Ok(out)
}

/// Ranking CSV preceded by `#` lines explaining the frequency columns.
pub fn write_ranking_csv<W: Write>(mut out: W, r: &NgramRanking, cfg: &NgramConfig) -> Result<()> {
    writeln!(
        out,
        "# speaker={} stage={} n={} min_session_support={} sessions_true={} sessions_false={}",
        cfg.speaker,
        cfg.stage,
        cfg.n_values
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(","),
        cfg.min_session_support,
        r.n_true,
        r.n_false
    )?;
    writeln!(
        out,
        "# freq_true/freq_false: share of TRUE/FALSE sessions in which the gram occurs (a/(a+c), b/(b+d))"
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "rank",
        "gram",
        "n",
        "v",
        "chi2",
        "freq_true",
        "freq_false",
        "support",
    ])?;
    for (i, s) in r.stats.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            s.gram.clone(),
            s.n.to_string(),
            s.v.to_string(),
            s.chi2.to_string(),
            s.freq_true.to_string(),
            s.freq_false.to_string(),
            s.support().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
