use serde::Serialize;

use super::{Corpus, Rating};

/// Nearest-rank percentiles of per-session utterance counts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Percentiles {
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p95: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CorpusStats {
    pub n_sessions: usize,
    pub duration_mean_min: f64,
    pub duration_median_min: f64,
    pub duration_std_min: f64,
    pub utterance_count: Percentiles,
    pub survey_response_rate: f64,
    /// Indexed by `Rating::index()`, VeryDissatisfied first.
    pub rating_histogram: [usize; 5],
}

impl CorpusStats {
    /// The value reported for an empty corpus: everything zero.
    pub fn empty() -> Self {
        CorpusStats::default()
    }

    pub fn is_empty(&self) -> bool {
        self.n_sessions == 0
    }

    pub fn surveyed(&self) -> usize {
        self.rating_histogram.iter().sum()
    }

    /// Share of surveyed sessions that gave `rating`.
    pub fn rating_fraction(&self, rating: Rating) -> f64 {
        let n = self.surveyed();
        if n == 0 {
            0.0
        } else {
            self.rating_histogram[rating.index()] as f64 / n as f64
        }
    }
}

/// Nearest-rank percentile of an ascending slice: the value at 1-based rank
/// `ceil(p/100 * n)`, clamped to `[1, n]`.
pub(crate) fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let n = sorted.len();
    let rank = ((p / 100.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

pub fn corpus_stats(c: &Corpus) -> CorpusStats {
    let n = c.sessions.len();
    if n == 0 {
        return CorpusStats::empty();
    }

    let mut durations: Vec<f64> = c.sessions.iter().map(|s| s.duration_minutes()).collect();
    durations.sort_by(f64::total_cmp);
    let mean = durations.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        durations.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };

    let mut counts: Vec<f64> = c.sessions.iter().map(|s| s.utterances.len() as f64).collect();
    counts.sort_by(f64::total_cmp);

    let mut hist = [0usize; 5];
    for r in c.sessions.iter().filter_map(|s| s.rating()) {
        hist[r.index()] += 1;
    }

    CorpusStats {
        n_sessions: n,
        duration_mean_min: mean,
        duration_median_min: nearest_rank(&durations, 50.0),
        duration_std_min: var.sqrt(),
        utterance_count: Percentiles {
            p25: nearest_rank(&counts, 25.0),
            p50: nearest_rank(&counts, 50.0),
            p75: nearest_rank(&counts, 75.0),
            p95: nearest_rank(&counts, 95.0),
        },
        survey_response_rate: hist.iter().sum::<usize>() as f64 / n as f64,
        rating_histogram: hist,
    }
}
