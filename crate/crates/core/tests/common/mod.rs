//! Builders and independent reference implementations shared by the
//! integration tests. Nothing here calls into the library's statistics.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};

use chatmine::corpus::{Corpus, Disconnect, Provenance, Rating, Session, Speaker, SurveyResult, Utterance};
use chrono::{Duration, TimeZone, Utc};
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn session(id: &str, lines: &[(Speaker, String)], rating: Option<Rating>) -> Session {
    let t0 = Utc.with_ymd_and_hms(2014, 6, 1, 9, 0, 0).unwrap();
    Session {
        session_id: id.into(),
        product_type: "phone".into(),
        agent_id: "a1".into(),
        customer_id: format!("c-{id}"),
        timezone_offset_minutes: 0,
        start_time: t0,
        end_time: t0 + Duration::seconds(lines.len() as i64 * 30 + 30),
        disconnected_by: Disconnect::Customer,
        utterances: lines
            .iter()
            .enumerate()
            .map(|(i, (speaker, text))| Utterance {
                speaker: *speaker,
                timestamp: t0 + Duration::seconds(i as i64 * 30),
                text: text.clone(),
            })
            .collect(),
        survey: rating.map(SurveyResult::overall),
    }
}

pub fn corpus(sessions: Vec<Session>) -> Corpus {
    Corpus::new(sessions, Provenance::Ingested)
}

const WORDS: [&str; 8] = [
    "reset", "screen", "phone", "thanks", "wait", "sorry", "ok", "please",
];

/// Sessions of plain lowercase words drawn from a small vocabulary, so
/// tokens are exactly the whitespace-separated words.
pub fn random_word_corpus<R: Rng>(rng: &mut R, n_sessions: usize) -> Corpus {
    let sessions = (0..n_sessions)
        .map(|i| {
            let m = rng.random_range(1..=12);
            let lines: Vec<(Speaker, String)> = (0..m)
                .map(|_| {
                    let sp = if rng.random_bool(0.5) {
                        Speaker::Customer
                    } else {
                        Speaker::Agent
                    };
                    let len = rng.random_range(1..=5);
                    let words: Vec<&str> = (0..len).map(|_| *WORDS.choose(rng).unwrap()).collect();
                    (sp, words.join(" "))
                })
                .collect();
            let rating = if rng.random_bool(0.8) {
                Some(Rating::ALL[rng.random_range(0..5)])
            } else {
                None
            };
            session(&format!("s{i}"), &lines, rating)
        })
        .collect();
    corpus(sessions)
}

/// Chi-squared as the sum over cells of (observed - expected)^2 / expected.
/// Any empty margin gives 0.
pub fn oracle_chi2(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let obs = [[a, b], [c, d]];
    let rows = [a + b, c + d];
    let cols = [a + c, b + d];
    let n = (a + b + c + d) as f64;
    if rows.contains(&0) || cols.contains(&0) {
        return 0.0;
    }
    let mut x = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let e = rows[i] as f64 * cols[j] as f64 / n;
            let o = obs[i][j] as f64;
            x += (o - e) * (o - e) / e;
        }
    }
    x
}

pub fn oracle_v(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let n = (a + b + c + d) as f64;
    if n == 0.0 {
        return 0.0;
    }
    (oracle_chi2(a, b, c, d) / n).sqrt()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleGram {
    pub gram: String,
    pub table: [u64; 4],
}

/// Exact comparison of Cramer's V for two tables sharing column totals:
/// V^2 = (ad - bc)^2 / ((a+b)(c+d)(a+c)(b+d)), compared by cross-multiplying.
fn cmp_v(x: &[u64; 4], y: &[u64; 4]) -> Ordering {
    let parts = |t: &[u64; 4]| -> (u128, u128) {
        let [a, b, c, d] = t.map(u128::from);
        let denom = (a + b) * (c + d) * (a + c) * (b + d);
        if denom == 0 {
            return (0, 1);
        }
        let diff = (a * d).abs_diff(b * c);
        (diff * diff, denom)
    };
    let (nx, dx) = parts(x);
    let (ny, dy) = parts(y);
    (nx * dy).cmp(&(ny * dx))
}

/// Brute-force n-gram ranking: per labeled session, walk the utterances in
/// the requested speaker slice and quarter, collect grams, then count.
pub fn oracle_ranking(
    c: &Corpus,
    orders: &[usize],
    speaker: Option<Speaker>,
    step: Option<usize>,
    min_support: u64,
) -> Vec<OracleGram> {
    let mut present: BTreeMap<String, [u64; 2]> = BTreeMap::new();
    let (mut n_true, mut n_false) = (0u64, 0u64);
    for s in &c.sessions {
        let Some(r) = s.rating() else { continue };
        let label = matches!(r, Rating::VeryDissatisfied | Rating::Dissatisfied);
        if label {
            n_true += 1;
        } else {
            n_false += 1;
        }
        let m = s.utterances.len();
        let mut grams = HashSet::new();
        for (i, u) in s.utterances.iter().enumerate() {
            if let Some(k) = step {
                // utterance i is in quarter k when floor((k-1)m/4) <= i < floor(km/4)
                if !((k - 1) * m / 4 <= i && i < k * m / 4) {
                    continue;
                }
            }
            if speaker.is_some_and(|sp| sp != u.speaker) {
                continue;
            }
            let words: Vec<&str> = u.text.split_whitespace().collect();
            for &n in orders {
                if words.len() < n {
                    continue;
                }
                for start in 0..=words.len() - n {
                    grams.insert(words[start..start + n].join(" "));
                }
            }
        }
        for g in grams {
            present.entry(g).or_default()[usize::from(!label)] += 1;
        }
    }
    let mut out: Vec<OracleGram> = present
        .into_iter()
        .filter(|(_, [a, b])| a + b >= min_support)
        .map(|(gram, [a, b])| OracleGram {
            gram,
            table: [a, b, n_true - a, n_false - b],
        })
        .collect();
    out.sort_by(|x, y| cmp_v(&y.table, &x.table).then_with(|| x.gram.cmp(&y.gram)));
    out
}

/// Utterance windows as word sets, for corpora of plain lowercase words.
pub fn utterance_windows(c: &Corpus) -> Vec<BTreeSet<String>> {
    c.sessions
        .iter()
        .flat_map(|s| &s.utterances)
        .map(|u| u.text.split_whitespace().map(str::to_string).collect())
        .collect()
}

/// Count-based polarity: for each seed (with enough windows) that co-occurs
/// with `token`, add sign(valence) * log2(joint * N / (n_token * n_seed)).
pub fn oracle_polarity(
    windows: &[BTreeSet<String>],
    token: &str,
    seeds: &[(&str, f64)],
    min_count: usize,
) -> f64 {
    let n = windows.len() as f64;
    let count = |t: &str| windows.iter().filter(|w| w.contains(t)).count();
    let nt = count(token) as f64;
    let mut score = 0.0;
    for &(s, v) in seeds {
        let ns = count(s);
        if ns < min_count || v == 0.0 {
            continue;
        }
        let joint = windows
            .iter()
            .filter(|w| w.contains(token) && w.contains(s))
            .count();
        if joint == 0 {
            continue;
        }
        score += v.signum() * (joint as f64 * n / (nt * ns as f64)).log2();
    }
    score
}

pub const PLANTED_NEG: &str = "zorblat";
pub const PLANTED_POS: &str = "quimby";
pub const PLANTED_SEEDS: [(&str, f64); 4] = [("good", 2.0), ("nice", 1.5), ("awful", -2.5), ("bad", -1.0)];
const FILLER: [&str; 8] = [
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel",
];

/// Utterances of filler words, some carrying a seed word. The planted
/// negative token rides along with negative seeds, the positive one with
/// positive seeds, and both appear at a low rate elsewhere.
pub fn planted_corpus<R: Rng>(rng: &mut R, n_sessions: usize) -> Corpus {
    let sessions = (0..n_sessions)
        .map(|i| {
            let lines: Vec<(Speaker, String)> = (0..8)
                .map(|j| {
                    let mut words: Vec<&str> = (0..rng.random_range(2..6))
                        .map(|_| *FILLER.choose(rng).unwrap())
                        .collect();
                    if rng.random_bool(0.4) {
                        let (s, v) = *PLANTED_SEEDS.choose(rng).unwrap();
                        words.push(s);
                        let planted = if v < 0.0 { PLANTED_NEG } else { PLANTED_POS };
                        if rng.random_bool(0.5) {
                            words.push(planted);
                        }
                    } else if rng.random_bool(0.03) {
                        words.push(if rng.random_bool(0.5) {
                            PLANTED_NEG
                        } else {
                            PLANTED_POS
                        });
                    }
                    let sp = if j % 2 == 0 {
                        Speaker::Customer
                    } else {
                        Speaker::Agent
                    };
                    (sp, words.join(" "))
                })
                .collect();
            session(&format!("p{i}"), &lines, None)
        })
        .collect();
    corpus(sessions)
}

pub fn seed_lexicon() -> chatmine::sentiment::SentimentLexicon {
    let mut lex = chatmine::sentiment::SentimentLexicon::new("planted-seed", "1");
    for (t, v) in PLANTED_SEEDS {
        lex.insert_entry(t, v).unwrap();
    }
    lex
}
