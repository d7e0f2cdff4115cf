use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::lexicon::SentimentLexicon;
use super::score::score_utterance;
use crate::corpus::{Session, Speaker};

pub const STAGES: usize = 4;

/// How a session is cut into four stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageMode {
    /// Quarters of the utterance sequence.
    #[default]
    Index,
    /// Quarters of the wall-clock span from start to end.
    Time,
}

/// Stage `k` (1-based) covers `[floor((k-1)m/4), floor(km/4))`.
pub fn stage_bounds(m: usize) -> [Range<usize>; STAGES] {
    std::array::from_fn(|k| (k * m / STAGES)..((k + 1) * m / STAGES))
}

pub fn segment_stages(s: &Session) -> [Range<usize>; STAGES] {
    stage_bounds(s.utterances.len())
}

/// Time-based alternative. A zero-length session falls back to index bounds.
pub fn segment_stages_by_time(s: &Session) -> [Range<usize>; STAGES] {
    let span = (s.end_time - s.start_time).num_milliseconds();
    if span <= 0 {
        return segment_stages(s);
    }
    let stage_of = |i: usize| {
        let off = (s.utterances[i].timestamp - s.start_time)
            .num_milliseconds()
            .clamp(0, span);
        ((off as i128 * STAGES as i128 / span as i128) as usize).min(STAGES - 1)
    };
    let mut starts = [s.utterances.len(); STAGES];
    for i in (0..s.utterances.len()).rev() {
        starts[stage_of(i)] = i;
    }
    // empty stages start where the next non-empty one does
    for k in (0..STAGES - 1).rev() {
        starts[k] = starts[k].min(starts[k + 1]);
    }
    std::array::from_fn(|k| {
        let end = if k + 1 < STAGES {
            starts[k + 1]
        } else {
            s.utterances.len()
        };
        starts[k]..end
    })
}

pub fn segment(s: &Session, mode: StageMode) -> [Range<usize>; STAGES] {
    match mode {
        StageMode::Index => segment_stages(s),
        StageMode::Time => segment_stages_by_time(s),
    }
}

/// Mean utterance valence per (speaker, stage). Cells without utterances
/// hold 0.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StageSentiment {
    pub customer_by_step: [f64; STAGES],
    pub agent_by_step: [f64; STAGES],
    /// `[customer, agent]` utterance counts per stage.
    pub counts: [[usize; STAGES]; 2],
}

impl StageSentiment {
    pub fn by_step(&self, speaker: Speaker) -> &[f64; STAGES] {
        match speaker {
            Speaker::Customer => &self.customer_by_step,
            Speaker::Agent => &self.agent_by_step,
        }
    }

    pub fn count(&self, speaker: Speaker, step: usize) -> usize {
        self.counts[speaker_slot(speaker)][step]
    }
}

fn speaker_slot(s: Speaker) -> usize {
    match s {
        Speaker::Customer => 0,
        Speaker::Agent => 1,
    }
}

pub fn stage_sentiment(s: &Session, lex: &SentimentLexicon) -> StageSentiment {
    stage_sentiment_with(s, lex, StageMode::Index)
}

pub fn stage_sentiment_with(s: &Session, lex: &SentimentLexicon, mode: StageMode) -> StageSentiment {
    let valences: Vec<f64> = s
        .utterances
        .iter()
        .map(|u| score_utterance(&u.text, lex).valence)
        .collect();
    aggregate_stages(s, &valences, mode)
}

/// Aggregate precomputed per-utterance valences into stage cells.
pub fn aggregate_stages(s: &Session, valences: &[f64], mode: StageMode) -> StageSentiment {
    let mut sums = [[0.0; STAGES]; 2];
    let mut counts = [[0usize; STAGES]; 2];
    for (k, range) in segment(s, mode).into_iter().enumerate() {
        for i in range {
            let slot = speaker_slot(s.utterances[i].speaker);
            sums[slot][k] += valences[i];
            counts[slot][k] += 1;
        }
    }
    let mean = |slot: usize| -> [f64; STAGES] {
        std::array::from_fn(|k| {
            if counts[slot][k] == 0 {
                0.0
            } else {
                sums[slot][k] / counts[slot][k] as f64
            }
        })
    };
    StageSentiment {
        customer_by_step: mean(0),
        agent_by_step: mean(1),
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Disconnect, Utterance};
    use chrono::{Duration, TimeZone, Utc};

    #[test]
    fn eight_utterances_split_evenly() {
        assert_eq!(stage_bounds(8), [0..2, 2..4, 4..6, 6..8]);
    }

    #[test]
    fn ten_utterances_follow_floor_formula() {
        assert_eq!(stage_bounds(10), [0..2, 2..5, 5..7, 7..10]);
    }

    #[test]
    fn single_utterance_lands_in_last_stage() {
        assert_eq!(stage_bounds(1), [0..0, 0..0, 0..0, 0..1]);
    }

    fn session(spec: &[(Speaker, &str, i64)], end_s: i64) -> Session {
        let t0 = Utc.with_ymd_and_hms(2014, 6, 1, 8, 0, 0).unwrap();
        Session {
            session_id: "x".into(),
            product_type: String::new(),
            agent_id: String::new(),
            customer_id: String::new(),
            timezone_offset_minutes: 0,
            start_time: t0,
            end_time: t0 + Duration::seconds(end_s),
            disconnected_by: Disconnect::Unknown,
            utterances: spec
                .iter()
                .map(|&(speaker, text, t)| Utterance {
                    speaker,
                    timestamp: t0 + Duration::seconds(t),
                    text: text.into(),
                })
                .collect(),
            survey: None,
        }
    }

    fn tiny() -> SentimentLexicon {
        let mut lex = SentimentLexicon::new("tiny", "1");
        lex.insert_entry("good", 1.9).unwrap();
        lex.insert_entry("bad", -2.5).unwrap();
        lex
    }

    #[test]
    fn neutral_agent_gives_zero_row() {
        use Speaker::*;
        let s = session(
            &[(Agent, "hello", 0), (Customer, "good", 1), (Agent, "ok then", 2)],
            10,
        );
        let st = stage_sentiment(&s, &tiny());
        assert_eq!(st.agent_by_step, [0.0; 4]);
    }

    #[test]
    fn alternating_four_utterances_one_per_stage() {
        use Speaker::*;
        let s = session(
            &[
                (Customer, "good", 0),
                (Agent, "hi", 1),
                (Customer, "bad", 2),
                (Agent, "hi", 3),
            ],
            10,
        );
        let valences = [0.5, 0.0, -0.5, 0.0];
        let st = aggregate_stages(&s, &valences, StageMode::Index);
        assert_eq!(st.customer_by_step, [0.5, 0.0, -0.5, 0.0]);
        assert_eq!(st.agent_by_step, [0.0; 4]);
        assert_eq!(st.counts, [[1, 0, 1, 0], [0, 1, 0, 1]]);
    }

    #[test]
    fn time_mode_uses_wall_clock_quarters() {
        use Speaker::*;
        // span 100s: quarters at 25, 50, 75
        let s = session(
            &[
                (Agent, "a", 0),
                (Agent, "b", 10),
                (Agent, "c", 20),
                (Customer, "d", 60),
                (Customer, "e", 99),
            ],
            100,
        );
        assert_eq!(segment_stages_by_time(&s), [0..3, 3..3, 3..4, 4..5]);
        assert_eq!(segment_stages(&s), [0..1, 1..2, 2..3, 3..5]);
    }
}
