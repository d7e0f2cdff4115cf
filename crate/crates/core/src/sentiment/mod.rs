//! Rule-based utterance sentiment, conversation-stage segmentation and
//! per-stage aggregation.

mod dynamics;
mod lexicon;
mod score;
mod stages;
mod tokenize;

pub use dynamics::{extreme_groups, sentiment_dynamics, write_dynamics_csv, Dynamics, DynamicsRow, Group};
pub use lexicon::SentimentLexicon;
pub use score::{score_tokens, score_utterance, score_utterance_with, ScoringRules, SentimentScore};
pub use stages::{
    aggregate_stages, segment, segment_stages, segment_stages_by_time, stage_bounds, stage_sentiment,
    stage_sentiment_with, StageMode, StageSentiment, STAGES,
};
pub use tokenize::{tokenize, Token};
