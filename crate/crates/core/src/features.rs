//! The 14 per-session predictors and the dissatisfaction label.
//!
//! Six session-level meta features (length, timing, response latency,
//! disconnect) and eight stage sentiments (customer and agent, steps 1-4).
//! Meta features never look at utterance text.

use std::io::Write;

use chrono::{Duration, Timelike};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Disconnect, Session, Speaker, SurveyResult};
use crate::error::Result;
use crate::models::Dataset;
use crate::sentiment::{stage_sentiment_with, SentimentLexicon, StageMode, StageSentiment};

/// Bumped whenever the predictor list changes.
pub const FEATURE_SET_VERSION: &str = "v1";

pub const N_FEATURES: usize = 14;
pub const N_META: usize = 6;

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "utterance_count",
    "duration_minutes",
    "customer_utterance_fraction",
    "mean_agent_response_latency_sec",
    "hour_of_day",
    "disconnected_by_customer",
    "customer_sent_step1",
    "customer_sent_step2",
    "customer_sent_step3",
    "customer_sent_step4",
    "agent_sent_step1",
    "agent_sent_step2",
    "agent_sent_step3",
    "agent_sent_step4",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureSet {
    #[default]
    All,
    /// The six session-level features, without any sentiment.
    MetaOnly,
}

impl FeatureSet {
    pub fn indices(self) -> std::ops::Range<usize> {
        match self {
            FeatureSet::All => 0..N_FEATURES,
            FeatureSet::MetaOnly => 0..N_META,
        }
    }

    pub fn names(self) -> Vec<String> {
        FEATURE_NAMES[self.indices()]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSet::All => "all",
            FeatureSet::MetaOnly => "meta-only",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub utterance_count: usize,
    pub duration_minutes: f64,
    pub customer_utterance_fraction: f64,
    pub mean_agent_response_latency_sec: f64,
    /// Customer-local hour, 0-23.
    pub hour_of_day: u32,
    pub disconnected_by_customer: bool,
    pub customer_sent: [f64; 4],
    pub agent_sent: [f64; 4],
    pub label_dissatisfied: Option<bool>,
}

impl FeatureVector {
    pub fn predictors(&self) -> [f64; N_FEATURES] {
        let mut out = [0.0; N_FEATURES];
        out[0] = self.utterance_count as f64;
        out[1] = self.duration_minutes;
        out[2] = self.customer_utterance_fraction;
        out[3] = self.mean_agent_response_latency_sec;
        out[4] = f64::from(self.hour_of_day);
        out[5] = if self.disconnected_by_customer { 1.0 } else { 0.0 };
        out[6..10].copy_from_slice(&self.customer_sent);
        out[10..14].copy_from_slice(&self.agent_sent);
        out
    }
}

/// TRUE for Very Dissatisfied and Dissatisfied, FALSE otherwise.
pub fn label_dissatisfaction(sv: &SurveyResult) -> bool {
    sv.overall_satisfaction.is_dissatisfied()
}

pub fn extract_features(s: &Session, ss: &StageSentiment) -> FeatureVector {
    let m = s.utterances.len();
    let customer = s
        .utterances
        .iter()
        .filter(|u| u.speaker == Speaker::Customer)
        .count();

    let gaps: Vec<f64> = s
        .utterances
        .windows(2)
        .filter(|w| w[0].speaker == Speaker::Customer && w[1].speaker == Speaker::Agent)
        .map(|w| (w[1].timestamp - w[0].timestamp).num_milliseconds() as f64 / 1000.0)
        .collect();
    let latency = if gaps.is_empty() {
        0.0
    } else {
        gaps.iter().sum::<f64>() / gaps.len() as f64
    };

    let local_start = s.start_time + Duration::minutes(i64::from(s.timezone_offset_minutes));

    FeatureVector {
        utterance_count: m,
        duration_minutes: s.duration_minutes().max(0.0),
        customer_utterance_fraction: if m == 0 { 0.0 } else { customer as f64 / m as f64 },
        mean_agent_response_latency_sec: latency.max(0.0),
        hour_of_day: local_start.hour(),
        disconnected_by_customer: s.disconnected_by == Disconnect::Customer,
        customer_sent: ss.customer_by_step,
        agent_sent: ss.agent_by_step,
        label_dissatisfied: s.survey.as_ref().map(label_dissatisfaction),
    }
}

/// Feature vectors for every session, in corpus order.
pub fn corpus_features(c: &Corpus, lex: &SentimentLexicon, mode: StageMode) -> Vec<FeatureVector> {
    c.sessions
        .par_iter()
        .map(|s| extract_features(s, &stage_sentiment_with(s, lex, mode)))
        .collect()
}

/// Labeled rows only, restricted to `set`'s columns.
pub fn labeled_dataset(features: &[FeatureVector], set: FeatureSet) -> Result<Dataset> {
    let cols = set.indices();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for fv in features {
        if let Some(label) = fv.label_dissatisfied {
            x.extend_from_slice(&fv.predictors()[cols.clone()]);
            y.push(label);
        }
    }
    Dataset::new(x, y, set.names())
}

/// Header names the 14 predictors plus `label_dissatisfied`; unlabeled rows
/// leave the label empty.
pub fn write_feature_csv<W: Write>(out: W, features: &[FeatureVector]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = FEATURE_NAMES.to_vec();
    header.push("label_dissatisfied");
    w.write_record(&header)?;
    for fv in features {
        let mut row: Vec<String> = fv.predictors().iter().map(f64::to_string).collect();
        row.push(match fv.label_dissatisfied {
            Some(true) => "true".into(),
            Some(false) => "false".into(),
            None => String::new(),
        });
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
