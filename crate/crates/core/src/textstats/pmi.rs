use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::sentiment::{tokenize, SentimentLexicon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmiWindow {
    #[default]
    Utterance,
    Session,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PmiConfig {
    pub window: PmiWindow,
    /// Minimum number of windows a token must occur in.
    pub min_count: usize,
    pub polarity_threshold: f64,
    /// Added to each cell of a pair's present/absent table.
    pub smoothing: f64,
    /// Polarity magnitude mapped to the seed's largest valence.
    pub score_cap: f64,
}

impl Default for PmiConfig {
    fn default() -> Self {
        PmiConfig {
            window: PmiWindow::Utterance,
            min_count: 5,
            polarity_threshold: 4.0,
            smoothing: 0.0,
            score_cap: 16.0,
        }
    }
}

impl PmiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_count == 0 {
            return Err(Error::config("min_count must be at least 1"));
        }
        if !(self.polarity_threshold > 0.0 && self.polarity_threshold.is_finite()) {
            return Err(Error::config("polarity_threshold must be positive"));
        }
        if !(self.smoothing >= 0.0 && self.smoothing.is_finite()) {
            return Err(Error::config("smoothing must be >= 0"));
        }
        if !(self.score_cap > 0.0 && self.score_cap.is_finite()) {
            return Err(Error::config("score_cap must be positive"));
        }
        Ok(())
    }
}

/// Distinct tokens of each window, in corpus order.
fn for_each_window(c: &Corpus, window: PmiWindow, session: usize, mut f: impl FnMut(BTreeSet<String>)) {
    let s = &c.sessions[session];
    match window {
        PmiWindow::Utterance => {
            for u in &s.utterances {
                f(tokenize(&u.text).into_iter().map(|t| t.text).collect());
            }
        }
        PmiWindow::Session => f(s
            .utterances
            .iter()
            .flat_map(|u| tokenize(&u.text))
            .map(|t| t.text)
            .collect()),
    }
}

/// `(window count, per-token window frequency)`.
fn token_counts(c: &Corpus, window: PmiWindow) -> (usize, HashMap<String, usize>) {
    (0..c.sessions.len())
        .into_par_iter()
        .fold(
            || (0usize, HashMap::new()),
            |(mut n, mut counts), i| {
                for_each_window(c, window, i, |toks| {
                    n += 1;
                    for t in toks {
                        *counts.entry(t).or_insert(0) += 1;
                    }
                });
                (n, counts)
            },
        )
        .reduce(
            || (0, HashMap::new()),
            |(na, mut a), (nb, b)| {
                for (t, v) in b {
                    *a.entry(t).or_insert(0) += v;
                }
                (na + nb, a)
            },
        )
}

/// Smoothing adds `k` to each cell of the pair's 2x2 presence table.
fn pmi_from_counts(joint: usize, na: usize, nb: usize, n: usize, k: f64) -> f64 {
    let total = n as f64 + 4.0 * k;
    let p_ab = (joint as f64 + k) / total;
    let p_a = (na as f64 + 2.0 * k) / total;
    let p_b = (nb as f64 + 2.0 * k) / total;
    (p_ab / (p_a * p_b)).log2()
}

/// `log2(p(a,b) / (p(a) p(b)))` over window presence. `smoothing` is added
/// to each of the four present/absent cells of the pair. Without smoothing,
/// a pair that never co-occurs gives negative infinity.
pub fn pmi(a: &str, b: &str, c: &Corpus, cfg: &PmiConfig) -> Result<f64> {
    let (a, b) = (a.to_lowercase(), b.to_lowercase());
    let (n, counts) = token_counts(c, cfg.window);
    for t in [&a, &b] {
        let count = counts.get(t).copied().unwrap_or(0);
        if count < cfg.min_count {
            return Err(Error::UndefinedSupport {
                token: t.clone(),
                count,
                min_count: cfg.min_count,
            });
        }
    }
    let joint: usize = (0..c.sessions.len())
        .into_par_iter()
        .map(|i| {
            let mut hits = 0;
            for_each_window(c, cfg.window, i, |toks| {
                hits += usize::from(toks.contains(&a) && toks.contains(&b));
            });
            hits
        })
        .sum();
    Ok(pmi_from_counts(joint, counts[&a], counts[&b], n, cfg.smoothing))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polarity {
    pub token: String,
    /// Windows containing the token.
    pub count: usize,
    /// Summed PMI with positive seeds minus summed PMI with negative seeds.
    pub score: f64,
}

/// Polarity of every non-seed token with at least `min_count` windows,
/// sorted by token.
///
/// Only seeds that themselves meet `min_count` and co-occur with the token at
/// least once contribute, so an unsmoothed score is always finite.
pub fn polarity_scores(c: &Corpus, seed: &SentimentLexicon, cfg: &PmiConfig) -> Result<Vec<Polarity>> {
    cfg.validate()?;
    if seed.is_empty() {
        return Err(Error::config("seed lexicon has no entries"));
    }
    let (n, counts) = token_counts(c, cfg.window);

    let mut candidates: Vec<&str> = counts
        .iter()
        .filter(|(t, &v)| v >= cfg.min_count && !seed.contains(t))
        .map(|(t, _)| t.as_str())
        .collect();
    candidates.sort_unstable();
    let mut seeds: Vec<(&str, f64)> = counts
        .iter()
        .filter(|(_, &v)| v >= cfg.min_count)
        .filter_map(|(t, _)| seed.valence(t).filter(|v| *v != 0.0).map(|v| (t.as_str(), v)))
        .collect();
    seeds.sort_unstable_by(|a, b| a.0.cmp(b.0));

    let cand_id: HashMap<&str, usize> = candidates.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let seed_id: HashMap<&str, usize> = seeds.iter().enumerate().map(|(i, (t, _))| (*t, i)).collect();

    let joint: HashMap<(usize, usize), usize> = (0..c.sessions.len())
        .into_par_iter()
        .fold(HashMap::new, |mut acc, i| {
            for_each_window(c, cfg.window, i, |toks| {
                let cs: Vec<usize> = toks
                    .iter()
                    .filter_map(|t| cand_id.get(t.as_str()).copied())
                    .collect();
                if cs.is_empty() {
                    return;
                }
                let ss: Vec<usize> = toks
                    .iter()
                    .filter_map(|t| seed_id.get(t.as_str()).copied())
                    .collect();
                for &ci in &cs {
                    for &si in &ss {
                        *acc.entry((ci, si)).or_insert(0) += 1;
                    }
                }
            });
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });

    let mut by_candidate: Vec<Vec<(usize, usize)>> = vec![Vec::new(); candidates.len()];
    for (&(ci, si), &v) in &joint {
        by_candidate[ci].push((si, v));
    }

    Ok(candidates
        .iter()
        .zip(by_candidate)
        .map(|(t, mut pairs)| {
            // fixed summation order
            pairs.sort_unstable();
            let nt = counts[*t];
            let score = pairs
                .iter()
                .map(|&(si, joint)| {
                    let (s, valence) = seeds[si];
                    valence.signum() * pmi_from_counts(joint, nt, counts[s], n, cfg.smoothing)
                })
                .sum();
            Polarity {
                token: t.to_string(),
                count: nt,
                score,
            }
        })
        .collect())
}

/// Seed plus every candidate whose `|score| >= polarity_threshold`, at
/// valence `sign(score) * min(|score|, cap) / cap * max |seed valence|`.
pub fn expand_lexicon(c: &Corpus, seed: &SentimentLexicon, cfg: &PmiConfig) -> Result<SentimentLexicon> {
    Ok(expand_lexicon_scored(c, seed, cfg)?.0)
}

/// As [`expand_lexicon`], also returning the polarity of each added token.
pub fn expand_lexicon_scored(
    c: &Corpus,
    seed: &SentimentLexicon,
    cfg: &PmiConfig,
) -> Result<(SentimentLexicon, Vec<Polarity>)> {
    let scores = polarity_scores(c, seed, cfg)?;
    let range = seed.max_abs_valence();
    let mut out = seed.clone();
    let added: Vec<Polarity> = scores
        .into_iter()
        .filter(|p| p.score.abs() >= cfg.polarity_threshold)
        .collect();
    for p in &added {
        out.insert_entry(&p.token, added_valence(p.score, cfg.score_cap, range))
            .map_err(Error::Config)?;
    }
    let window = match cfg.window {
        PmiWindow::Utterance => "utterance",
        PmiWindow::Session => "session",
    };
    out.metadata.extend([
        (
            "expanded_from".to_string(),
            format!("{} {}", seed.name, seed.version),
        ),
        ("pmi_window".to_string(), window.to_string()),
        ("pmi_min_count".to_string(), cfg.min_count.to_string()),
        (
            "pmi_polarity_threshold".to_string(),
            cfg.polarity_threshold.to_string(),
        ),
        ("pmi_smoothing".to_string(), cfg.smoothing.to_string()),
        ("pmi_score_cap".to_string(), cfg.score_cap.to_string()),
        ("pmi_added".to_string(), added.len().to_string()),
    ]);
    Ok((out, added))
}

pub fn added_valence(score: f64, cap: f64, range: f64) -> f64 {
    score.signum() * score.abs().min(cap) / cap * range
}

/// `(utterances with at least one lexicon entry, all utterances)`.
pub fn coverage_counts(c: &Corpus, lex: &SentimentLexicon) -> (usize, usize) {
    c.sessions
        .par_iter()
        .map(|s| {
            let hits = s
                .utterances
                .iter()
                .filter(|u| tokenize(&u.text).iter().any(|t| lex.valence(&t.text).is_some()))
                .count();
            (hits, s.utterances.len())
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Share of utterances containing at least one lexicon entry. An empty
/// corpus gives 0 and a logged warning.
pub fn lexicon_coverage(c: &Corpus, lex: &SentimentLexicon) -> f64 {
    let (hits, total) = coverage_counts(c, lex);
    if total == 0 {
        log::warn!("coverage of an empty corpus is reported as 0");
        return 0.0;
    }
    hits as f64 / total as f64
}
