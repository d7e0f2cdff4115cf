//! Per-group, per-speaker, per-stage sentiment means with normal-approximation
//! confidence intervals: the data behind a stage-dynamics plot.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::lexicon::SentimentLexicon;
use super::stages::{stage_sentiment_with, StageMode, StageSentiment, STAGES};
use crate::corpus::{Corpus, Rating, Speaker};
use crate::error::Result;

const Z_95: f64 = 1.96;

/// A named set of survey ratings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub name: String,
    pub ratings: Vec<Rating>,
}

impl Group {
    pub fn new(name: impl Into<String>, ratings: &[Rating]) -> Self {
        Group {
            name: name.into(),
            ratings: ratings.to_vec(),
        }
    }

    pub fn contains(&self, r: Rating) -> bool {
        self.ratings.contains(&r)
    }
}

/// Very Satisfied vs. Very Dissatisfied.
pub fn extreme_groups() -> Vec<Group> {
    vec![
        Group::new("VS", &[Rating::VerySatisfied]),
        Group::new("VD", &[Rating::VeryDissatisfied]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsRow {
    pub group: String,
    pub speaker: Speaker,
    /// 1-based.
    pub step: usize,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

impl DynamicsRow {
    /// A single-session cell has no spread estimate; its interval is the point.
    pub fn is_degenerate(&self) -> bool {
        self.n < 2
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dynamics {
    pub rows: Vec<DynamicsRow>,
    pub warnings: Vec<String>,
}

impl Dynamics {
    pub fn get(&self, group: &str, speaker: Speaker, step: usize) -> Option<&DynamicsRow> {
        self.rows
            .iter()
            .find(|r| r.group == group && r.speaker == speaker && r.step == step)
    }

    /// The four stage means of one (group, speaker) series.
    pub fn series(&self, group: &str, speaker: Speaker) -> Option<[f64; STAGES]> {
        let mut out = [0.0; STAGES];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.get(group, speaker, k + 1)?.mean;
        }
        Some(out)
    }

    /// max - min across stages of a series.
    pub fn spread(&self, group: &str, speaker: Speaker) -> Option<f64> {
        let s = self.series(group, speaker)?;
        let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = s.iter().copied().fold(f64::INFINITY, f64::min);
        Some(max - min)
    }
}

/// Mean over a group's sessions of each session's stage cell. Sessions
/// without a survey belong to no group. Empty groups are dropped with a
/// warning.
pub fn sentiment_dynamics(c: &Corpus, lex: &SentimentLexicon, groups: &[Group], mode: StageMode) -> Dynamics {
    let per_session: Vec<(Rating, StageSentiment)> = c
        .sessions
        .par_iter()
        .filter_map(|s| Some((s.rating()?, s)))
        .map(|(r, s)| (r, stage_sentiment_with(s, lex, mode)))
        .collect();

    let mut out = Dynamics::default();
    for g in groups {
        let members: Vec<&StageSentiment> = per_session
            .iter()
            .filter(|(r, _)| g.contains(*r))
            .map(|(_, st)| st)
            .collect();
        if members.is_empty() {
            let msg = format!("group {} has no surveyed sessions; omitted", g.name);
            log::warn!("{msg}");
            out.warnings.push(msg);
            continue;
        }
        for speaker in Speaker::BOTH {
            for k in 0..STAGES {
                let values: Vec<f64> = members.iter().map(|st| st.by_step(speaker)[k]).collect();
                out.rows.push(summarize(&g.name, speaker, k + 1, &values));
            }
        }
    }
    out
}

fn summarize(group: &str, speaker: Speaker, step: usize, values: &[f64]) -> DynamicsRow {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let half = if n > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Z_95 * (var / n as f64).sqrt()
    } else {
        0.0
    };
    DynamicsRow {
        group: group.to_owned(),
        speaker,
        step,
        mean,
        ci_low: mean - half,
        ci_high: mean + half,
        n,
    }
}

pub fn write_dynamics_csv<W: Write>(out: W, d: &Dynamics) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["group", "speaker", "step", "mean", "ci_low", "ci_high", "n"])?;
    for r in &d.rows {
        w.write_record([
            r.group.clone(),
            r.speaker.to_string(),
            r.step.to_string(),
            r.mean.to_string(),
            r.ci_low.to_string(),
            r.ci_high.to_string(),
            r.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
