//! Chat-session data model, ingestion, validation and synthetic corpora.

mod io;
mod stats;
pub mod synth;
mod validate;

use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

pub use io::{
    parse_sessions, read_corpus_file, write_jsonl, InputFormat, ParseReport, Parsed, SkippedSession,
};
pub use stats::{corpus_stats, CorpusStats, Percentiles};
pub use synth::{synthesize_corpus, SynthConfig};
pub use validate::{validate_session, Violation};

pub type Timestamp = DateTime<Utc>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Speaker {
    Customer,
    Agent,
}

impl Speaker {
    pub const BOTH: [Speaker; 2] = [Speaker::Customer, Speaker::Agent];

    pub fn as_str(self) -> &'static str {
        match self {
            Speaker::Customer => "customer",
            Speaker::Agent => "agent",
        }
    }
}

impl fmt::Display for Speaker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub speaker: Speaker,
    pub timestamp: Timestamp,
    pub text: String,
}

/// Five-point Likert answer, ordered from worst to best.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rating {
    VeryDissatisfied = 1,
    Dissatisfied = 2,
    Average = 3,
    Satisfied = 4,
    VerySatisfied = 5,
}

impl Rating {
    pub const ALL: [Rating; 5] = [
        Rating::VeryDissatisfied,
        Rating::Dissatisfied,
        Rating::Average,
        Rating::Satisfied,
        Rating::VerySatisfied,
    ];

    pub fn from_score(score: u8) -> Option<Rating> {
        match score {
            1 => Some(Rating::VeryDissatisfied),
            2 => Some(Rating::Dissatisfied),
            3 => Some(Rating::Average),
            4 => Some(Rating::Satisfied),
            5 => Some(Rating::VerySatisfied),
            _ => None,
        }
    }

    pub fn score(self) -> u8 {
        self as u8
    }

    /// Zero-based position, usable as a histogram bin.
    pub fn index(self) -> usize {
        self as usize - 1
    }

    /// Snake-case key used in configuration files.
    pub fn key(self) -> &'static str {
        match self {
            Rating::VeryDissatisfied => "very_dissatisfied",
            Rating::Dissatisfied => "dissatisfied",
            Rating::Average => "average",
            Rating::Satisfied => "satisfied",
            Rating::VerySatisfied => "very_satisfied",
        }
    }

    pub fn is_dissatisfied(self) -> bool {
        matches!(self, Rating::VeryDissatisfied | Rating::Dissatisfied)
    }
}

/// Post-chat survey. Only the overall rating is mandatory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyResult {
    pub overall_satisfaction: Rating,
    pub prefer_chat: Option<bool>,
    pub knowledge_rating: Option<Rating>,
    pub dissatisfaction_reason: Option<String>,
}

impl SurveyResult {
    pub fn overall(rating: Rating) -> Self {
        SurveyResult {
            overall_satisfaction: rating,
            prefer_chat: None,
            knowledge_rating: None,
            dissatisfaction_reason: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Disconnect {
    Customer,
    Agent,
    System,
    Unknown,
}

impl Disconnect {
    pub fn as_str(self) -> &'static str {
        match self {
            Disconnect::Customer => "customer",
            Disconnect::Agent => "agent",
            Disconnect::System => "system",
            Disconnect::Unknown => "unknown",
        }
    }

    pub fn parse(s: &str) -> Option<Disconnect> {
        match s.trim().to_ascii_lowercase().as_str() {
            "customer" | "c" => Some(Disconnect::Customer),
            "agent" | "a" => Some(Disconnect::Agent),
            "system" => Some(Disconnect::System),
            "unknown" | "" => Some(Disconnect::Unknown),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub product_type: String,
    pub agent_id: String,
    pub customer_id: String,
    pub timezone_offset_minutes: i32,
    pub start_time: Timestamp,
    pub end_time: Timestamp,
    pub disconnected_by: Disconnect,
    pub utterances: Vec<Utterance>,
    pub survey: Option<SurveyResult>,
}

impl Session {
    pub fn duration_minutes(&self) -> f64 {
        (self.end_time - self.start_time).num_milliseconds() as f64 / 60_000.0
    }

    pub fn rating(&self) -> Option<Rating> {
        self.survey.as_ref().map(|s| s.overall_satisfaction)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Ingested,
    Synthetic { seed: u64, config_hash: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub sessions: Vec<Session>,
    pub provenance: Provenance,
}

impl Corpus {
    pub fn new(sessions: Vec<Session>, provenance: Provenance) -> Self {
        Corpus { sessions, provenance }
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }

    /// Sessions carrying a survey answer, in corpus order.
    pub fn surveyed(&self) -> impl Iterator<Item = &Session> {
        self.sessions.iter().filter(|s| s.survey.is_some())
    }
}
