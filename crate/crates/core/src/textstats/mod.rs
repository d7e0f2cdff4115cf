//! N-gram association with the dissatisfaction label, PMI-based lexicon
//! expansion and lexicon coverage.

mod contingency;
mod ngrams;
mod pmi;

pub use contingency::{chi_squared, cramers_v, ContingencyTable};
pub use ngrams::{
    rank_ngrams, session_ngrams, write_ranking_csv, NgramConfig, NgramRanking, NgramStat, SpeakerFilter,
    StageFilter,
};
pub use pmi::{
    added_valence, coverage_counts, expand_lexicon, expand_lexicon_scored, lexicon_coverage, pmi,
    polarity_scores, PmiConfig, PmiWindow, Polarity,
};
