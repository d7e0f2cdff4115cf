//! Seeded generator for statistically calibrated chat corpora.
//!
//! Session length is log-normal (parameterised by median and mean), the
//! utterance count is a gamma-Poisson (negative binomial) draw whose rate is
//! proportional to session length and calibrated so the 75th percentile hits
//! `utterance_count_p75`. Each session has a latent satisfaction rating; a
//! configurable share of sessions reveal it through a survey. Text is drawn
//! from template banks, with valence-bearing fragments added according to the
//! per-(rating, speaker, stage) sentiment trajectory.

mod phrases;

use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, LogNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Corpus, Disconnect, Provenance, Rating, Session, Speaker, SurveyResult, Utterance};
use crate::error::{Error, Result};
use crate::rng::{self, domain};
use crate::sentiment::stage_bounds;

/// Names accepted by [`SynthConfig::load`] for the built-in configuration.
pub const STANDARD_PRESETS: [&str; 2] = ["default", "paper-defaults"];
const STANDARD_TOML: &str = include_str!("../../../configs/default.toml");

/// Gamma shape of the per-session rate multiplier (negative-binomial dispersion).
const COUNT_DISPERSION: f64 = 8.0;
const MIN_UTTERANCES: usize = 4;
const MAX_UTTERANCES: usize = 400;
const MIN_DURATION_MIN: f64 = 0.5;
const MAX_DURATION_MIN: f64 = 300.0;
const CALIBRATION_DRAWS: usize = 20_000;
/// Valence an appended fragment typically contributes on its own.
const FRAGMENT_VALENCE: f64 = 0.5;
/// Chance of an extra fragment of random polarity in any utterance.
const NOISE_FRAGMENT_RATE: f64 = 0.06;
const RITUAL_RATE_SATISFIED: f64 = 0.80;
const RITUAL_RATE_DROP: f64 = 0.52;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DurationTargets {
    pub median_minutes: f64,
    pub mean_minutes: f64,
}

impl DurationTargets {
    /// (mu, sigma) of the log-normal with this median and mean.
    pub fn lognormal_params(&self) -> (f64, f64) {
        let mu = self.median_minutes.ln();
        let sigma = (2.0 * (self.mean_minutes / self.median_minutes).ln())
            .max(0.0)
            .sqrt();
        (mu, sigma)
    }
}

/// Target mean valence per conversation stage for each speaker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeakerTrajectory {
    pub customer: [f64; 4],
    pub agent: [f64; 4],
}

impl SpeakerTrajectory {
    pub fn get(&self, speaker: Speaker) -> &[f64; 4] {
        match speaker {
            Speaker::Customer => &self.customer,
            Speaker::Agent => &self.agent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentTrajectory {
    pub very_dissatisfied: SpeakerTrajectory,
    pub dissatisfied: SpeakerTrajectory,
    pub average: SpeakerTrajectory,
    pub satisfied: SpeakerTrajectory,
    pub very_satisfied: SpeakerTrajectory,
}

impl SentimentTrajectory {
    pub fn for_rating(&self, r: Rating) -> &SpeakerTrajectory {
        match r {
            Rating::VeryDissatisfied => &self.very_dissatisfied,
            Rating::Dissatisfied => &self.dissatisfied,
            Rating::Average => &self.average,
            Rating::Satisfied => &self.satisfied,
            Rating::VerySatisfied => &self.very_satisfied,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub n_sessions: usize,
    pub seed: u64,
    pub survey_response_rate: f64,
    /// VeryDissatisfied .. VerySatisfied.
    pub rating_distribution: [f64; 5],
    pub utterance_count_p75: usize,
    /// 0 makes every rating share the rating-weighted mean trajectory (no
    /// text signal); 1 applies each rating's own trajectory in full.
    pub label_signal_strength: f64,
    /// When set, exactly `[dissatisfied, not_dissatisfied]` sessions are
    /// surveyed, overriding `survey_response_rate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_counts: Option<[usize; 2]>,
    pub duration_lognormal: DurationTargets,
    pub sentiment_trajectory: SentimentTrajectory,
}

impl SynthConfig {
    pub fn standard() -> SynthConfig {
        SynthConfig::from_toml(STANDARD_TOML).expect("bundled default config is valid")
    }

    pub fn from_toml(text: &str) -> Result<SynthConfig> {
        let cfg: SynthConfig =
            toml::from_str(text).map_err(|e| Error::config(format!("synth config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load from a file, or the built-in config when `source` is a preset name.
    pub fn load(source: &str) -> Result<SynthConfig> {
        if STANDARD_PRESETS.contains(&source) {
            return Ok(SynthConfig::standard());
        }
        let path = Path::new(source);
        let text = std::fs::read_to_string(path).map_err(|source| Error::File {
            path: path.to_path_buf(),
            source,
        })?;
        SynthConfig::from_toml(&text)
    }

    /// Fails for seeds above `i64::MAX`, which TOML integers cannot hold.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(format!("synth config: {e}")))
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serialises to JSON");
        hex::encode(Sha256::digest(&json))
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.rating_distribution;
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::config("rating_distribution entries must be non-negative"));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!(
                "rating_distribution must sum to 1 (got {sum})"
            )));
        }
        if !(0.0..=1.0).contains(&self.survey_response_rate) {
            return Err(Error::config("survey_response_rate must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.label_signal_strength) {
            return Err(Error::config("label_signal_strength must lie in [0, 1]"));
        }
        if self.utterance_count_p75 == 0 {
            return Err(Error::config("utterance_count_p75 must be positive"));
        }
        let d = &self.duration_lognormal;
        if !(d.median_minutes > 0.0 && d.median_minutes.is_finite()) {
            return Err(Error::config(
                "duration_lognormal.median_minutes must be positive",
            ));
        }
        if !(d.mean_minutes >= d.median_minutes && d.mean_minutes.is_finite()) {
            return Err(Error::config(
                "duration_lognormal.mean_minutes must be at least the median",
            ));
        }
        for r in Rating::ALL {
            let t = self.sentiment_trajectory.for_rating(r);
            if t.customer
                .iter()
                .chain(&t.agent)
                .any(|v| !(-1.0..=1.0).contains(v))
            {
                return Err(Error::config(format!(
                    "sentiment_trajectory.{} values must lie in [-1, 1]",
                    r.key()
                )));
            }
        }
        if let Some([n_true, n_false]) = self.label_counts {
            if n_true + n_false > self.n_sessions {
                return Err(Error::config("label_counts exceed n_sessions"));
            }
            let mass_true = p[0] + p[1];
            if (n_true > 0 && mass_true <= 0.0) || (n_false > 0 && mass_true >= 1.0) {
                return Err(Error::config(
                    "label_counts request a class with zero rating probability",
                ));
            }
        }
        Ok(())
    }
}

/// Generate a corpus. A pure function of `cfg`; sessions are produced in
/// parallel but each draws from its own `(seed, index)` stream.
pub fn synthesize_corpus(cfg: &SynthConfig) -> Result<Corpus> {
    cfg.validate()?;
    let provenance = Provenance::Synthetic {
        seed: cfg.seed,
        config_hash: cfg.config_hash(),
    };
    if cfg.n_sessions == 0 {
        return Ok(Corpus::new(Vec::new(), provenance));
    }

    let plan = Plan::new(cfg);
    let assignment = survey_assignment(cfg);
    let sessions = (0..cfg.n_sessions)
        .into_par_iter()
        .map(|i| plan.session(i, assignment.as_ref().map(|a| a[i])))
        .collect();
    Ok(Corpus::new(sessions, provenance))
}

/// Fixed survey slots when exact label counts are requested:
/// `Some(true)` surveyed & dissatisfied, `Some(false)` surveyed & not, `None` unsurveyed.
fn survey_assignment(cfg: &SynthConfig) -> Option<Vec<Option<bool>>> {
    let [n_true, n_false] = cfg.label_counts?;
    let mut slots = Vec::with_capacity(cfg.n_sessions);
    slots.extend(std::iter::repeat_n(Some(true), n_true));
    slots.extend(std::iter::repeat_n(Some(false), n_false));
    slots.resize(cfg.n_sessions, None);
    slots.shuffle(&mut rng::stream(cfg.seed, domain::SURVEY_ASSIGNMENT, 0));
    Some(slots)
}

struct Plan<'a> {
    cfg: &'a SynthConfig,
    duration: LogNormal<f64>,
    rate_per_minute: f64,
    dispersion: Gamma<f64>,
    mean_trajectory: SpeakerTrajectory,
    epoch: DateTime<Utc>,
}

impl<'a> Plan<'a> {
    fn new(cfg: &'a SynthConfig) -> Self {
        let (mu, sigma) = cfg.duration_lognormal.lognormal_params();
        let duration = LogNormal::new(mu, sigma).expect("validated lognormal parameters");
        let dispersion =
            Gamma::new(COUNT_DISPERSION, 1.0 / COUNT_DISPERSION).expect("valid gamma parameters");
        let mut plan = Plan {
            cfg,
            duration,
            rate_per_minute: 0.0,
            dispersion,
            mean_trajectory: mean_trajectory(cfg),
            epoch: Utc.with_ymd_and_hms(2014, 1, 1, 0, 0, 0).unwrap(),
        };
        plan.rate_per_minute = plan.calibrate_rate();
        plan
    }

    fn sample_duration(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.duration
            .sample(rng)
            .clamp(MIN_DURATION_MIN, MAX_DURATION_MIN)
    }

    /// Utterance count from the session length, a dispersion multiplier and
    /// a uniform fed through the Poisson inverse CDF.
    fn utterance_count(&self, rate: f64, minutes: f64, multiplier: f64, u: f64) -> usize {
        let lambda = (rate * minutes * multiplier).min(MAX_UTTERANCES as f64);
        poisson_quantile(lambda, u).clamp(MIN_UTTERANCES, MAX_UTTERANCES)
    }

    /// Smallest messages-per-minute rate whose simulated 75th percentile
    /// reaches the target. Uses common random numbers, so the percentile is
    /// monotone in the rate and bisection is exact.
    fn calibrate_rate(&self) -> f64 {
        let mut rng = rng::stream(self.cfg.seed, domain::CALIBRATION, 0);
        let draws: Vec<(f64, f64, f64)> = (0..CALIBRATION_DRAWS)
            .map(|_| {
                (
                    self.sample_duration(&mut rng),
                    self.dispersion.sample(&mut rng),
                    rng.random::<f64>(),
                )
            })
            .collect();
        let target = self.cfg.utterance_count_p75;
        let p75 = |rate: f64| {
            let mut counts: Vec<usize> = draws
                .iter()
                .map(|&(d, g, u)| self.utterance_count(rate, d, g, u))
                .collect();
            counts.sort_unstable();
            counts[(counts.len() * 3).div_ceil(4) - 1]
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        while p75(hi) < target && hi < 1e4 {
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if p75(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    fn session(&self, index: usize, assigned: Option<Option<bool>>) -> Session {
        let cfg = self.cfg;
        let mut rng = rng::stream(cfg.seed, domain::SESSION, index as u64);

        let (rating, surveyed) = match assigned {
            Some(Some(dissatisfied)) => (sample_rating_in_class(cfg, dissatisfied, &mut rng), true),
            Some(None) => (sample_rating(&cfg.rating_distribution, &mut rng), false),
            None => {
                let r = sample_rating(&cfg.rating_distribution, &mut rng);
                (r, rng.random_bool(cfg.survey_response_rate))
            }
        };
        let dissatisfied = rating.is_dissatisfied();
        let s = cfg.label_signal_strength;

        let minutes = self.sample_duration(&mut rng);
        let multiplier = self.dispersion.sample(&mut rng);
        let m = self.utterance_count(self.rate_per_minute, minutes, multiplier, rng.random());

        let span_ms = (minutes * 60_000.0).round() as i64;
        let start_ms = rng.random_range(0..365 * 24 * 3_600_000i64);
        let start_time = self.epoch + Duration::milliseconds(start_ms);
        let end_time = start_time + Duration::milliseconds(span_ms);
        let timezone_offset_minutes = *[-300, -300, -360, -360, -420, -480]
            .choose(&mut rng)
            .expect("non-empty");

        let offsets = utterance_offsets(m, span_ms, &mut rng);
        let speakers = speaker_sequence(m, &mut rng);
        let target = blend(
            cfg.sentiment_trajectory.for_rating(rating),
            &self.mean_trajectory,
            s,
        );
        let ritual_rate = if dissatisfied {
            RITUAL_RATE_SATISFIED - RITUAL_RATE_DROP * s
        } else {
            RITUAL_RATE_SATISFIED
        };
        let with_ritual = rng.random_bool(ritual_rate);
        let texts = compose_texts(&speakers, &target, with_ritual, &mut rng);

        let utterances = speakers
            .into_iter()
            .zip(texts)
            .zip(offsets)
            .map(|((speaker, text), off)| Utterance {
                speaker,
                timestamp: start_time + Duration::milliseconds(off),
                text,
            })
            .collect();

        let p_customer_disconnect = 0.30 + if dissatisfied { 0.12 * s } else { 0.0 };
        let u: f64 = rng.random();
        let disconnected_by = if u < p_customer_disconnect {
            Disconnect::Customer
        } else if u < 0.85 {
            Disconnect::Agent
        } else if u < 0.95 {
            Disconnect::System
        } else {
            Disconnect::Unknown
        };

        let survey = surveyed.then(|| SurveyResult {
            overall_satisfaction: rating,
            prefer_chat: Some(rng.random_bool(if dissatisfied { 0.35 } else { 0.8 })),
            knowledge_rating: Rating::from_score(
                (rating.score() as i32 + rng.random_range(-1..=1)).clamp(1, 5) as u8,
            ),
            dissatisfaction_reason: dissatisfied.then(|| {
                phrases::DISSATISFACTION_REASONS
                    .choose(&mut rng)
                    .expect("non-empty")
                    .to_string()
            }),
        });

        Session {
            session_id: format!("S{index:07}"),
            product_type: phrases::PRODUCTS.choose(&mut rng).expect("non-empty").to_string(),
            agent_id: format!("A{:03}", rng.random_range(0..250)),
            customer_id: format!("C{:08x}", rng.random::<u32>()),
            timezone_offset_minutes,
            start_time,
            end_time,
            disconnected_by,
            utterances,
            survey,
        }
    }
}

fn sample_rating(p: &[f64; 5], rng: &mut ChaCha8Rng) -> Rating {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (r, pr) in Rating::ALL.iter().zip(p) {
        acc += pr;
        if u < acc {
            return *r;
        }
    }
    // rounding slack: last rating with positive mass
    *Rating::ALL
        .iter()
        .rev()
        .find(|r| p[r.index()] > 0.0)
        .expect("distribution has mass")
}

fn sample_rating_in_class(cfg: &SynthConfig, dissatisfied: bool, rng: &mut ChaCha8Rng) -> Rating {
    let mut p = cfg.rating_distribution;
    for r in Rating::ALL {
        if r.is_dissatisfied() != dissatisfied {
            p[r.index()] = 0.0;
        }
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    sample_rating(&p, rng)
}

fn mean_trajectory(cfg: &SynthConfig) -> SpeakerTrajectory {
    let mut out = SpeakerTrajectory {
        customer: [0.0; 4],
        agent: [0.0; 4],
    };
    for r in Rating::ALL {
        let w = cfg.rating_distribution[r.index()];
        let t = cfg.sentiment_trajectory.for_rating(r);
        for k in 0..4 {
            out.customer[k] += w * t.customer[k];
            out.agent[k] += w * t.agent[k];
        }
    }
    out
}

fn blend(own: &SpeakerTrajectory, mean: &SpeakerTrajectory, s: f64) -> SpeakerTrajectory {
    let mix = |a: &[f64; 4], b: &[f64; 4]| std::array::from_fn(|k| b[k] + s * (a[k] - b[k]));
    SpeakerTrajectory {
        customer: mix(&own.customer, &mean.customer),
        agent: mix(&own.agent, &mean.agent),
    }
}

/// Smallest k with P(Poisson(lambda) <= k) >= u.
fn poisson_quantile(lambda: f64, u: f64) -> usize {
    if lambda <= 0.0 {
        return 0;
    }
    let mut pmf = (-lambda).exp();
    let mut cdf = pmf;
    let mut k = 0usize;
    while cdf < u && k < 10 * MAX_UTTERANCES {
        k += 1;
        pmf *= lambda / k as f64;
        cdf += pmf;
    }
    k
}

/// Millisecond offsets in (0, span): exponential gaps rescaled to the span.
fn utterance_offsets(m: usize, span_ms: i64, rng: &mut ChaCha8Rng) -> Vec<i64> {
    let gaps: Vec<f64> = (0..=m).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = gaps.iter().sum();
    let mut acc = 0.0;
    gaps[..m]
        .iter()
        .map(|g| {
            acc += g;
            ((acc / total) * span_ms as f64).floor() as i64
        })
        .collect()
}

/// Agent opens; afterwards turns mostly alternate with occasional runs.
fn speaker_sequence(m: usize, rng: &mut ChaCha8Rng) -> Vec<Speaker> {
    let mut out = Vec::with_capacity(m);
    out.push(Speaker::Agent);
    for i in 1..m {
        let prev = out[i - 1];
        let switch = rng.random_bool(if prev == Speaker::Agent { 0.65 } else { 0.6 });
        out.push(match (prev, switch) {
            (Speaker::Agent, true) | (Speaker::Customer, false) => Speaker::Customer,
            _ => Speaker::Agent,
        });
    }
    out
}

fn pick(bank: &[&str], rng: &mut ChaCha8Rng) -> String {
    bank.choose(rng).expect("non-empty bank").to_string()
}

fn compose_texts(
    speakers: &[Speaker],
    target: &SpeakerTrajectory,
    with_ritual: bool,
    rng: &mut ChaCha8Rng,
) -> Vec<String> {
    let m = speakers.len();
    let bounds = stage_bounds(m);

    // closing ritual lines go to the final agent turns of the last stage
    let mut ritual_at = vec![None; m];
    if with_ritual {
        let agent_turns: Vec<usize> = bounds[3]
            .clone()
            .filter(|&i| speakers[i] == Speaker::Agent)
            .collect();
        let take = agent_turns.len().min(phrases::CLOSING_RITUAL.len());
        let lines = &phrases::CLOSING_RITUAL[phrases::CLOSING_RITUAL.len() - take..];
        for (&i, line) in agent_turns[agent_turns.len() - take..].iter().zip(lines) {
            ritual_at[i] = Some(*line);
        }
    }

    let mut customer_spoke = false;
    (0..m)
        .map(|i| {
            let stage = bounds.iter().position(|r| r.contains(&i)).expect("stages cover");
            let speaker = speakers[i];
            let base = match (speaker, stage) {
                _ if ritual_at[i].is_some() => ritual_at[i].expect("checked").to_string(),
                (Speaker::Agent, 0) if i == 0 => pick(phrases::AGENT_GREETING, rng),
                (Speaker::Agent, 0 | 1) => pick(phrases::AGENT_PROBING, rng),
                (Speaker::Agent, 2) => pick(phrases::AGENT_INSTRUCTION, rng),
                (Speaker::Agent, _) => pick(phrases::AGENT_CLOSING, rng),
                (Speaker::Customer, 0) if !customer_spoke => pick(phrases::CUSTOMER_OPENING, rng),
                (Speaker::Customer, 0 | 1) => pick(phrases::CUSTOMER_PROBLEM, rng),
                (Speaker::Customer, 2) => pick(phrases::CUSTOMER_ANSWER, rng),
                (Speaker::Customer, _) => pick(phrases::CUSTOMER_CLOSING, rng),
            };
            if speaker == Speaker::Customer {
                customer_spoke = true;
            }
            if ritual_at[i].is_some() {
                return base;
            }

            let valence = target.get(speaker)[stage];
            let (pos, neg) = match speaker {
                Speaker::Customer => (phrases::CUSTOMER_POSITIVE, phrases::CUSTOMER_NEGATIVE),
                Speaker::Agent => (phrases::AGENT_POSITIVE, phrases::AGENT_NEGATIVE),
            };
            let mut text = base;
            if rng.random_bool((valence.abs() / FRAGMENT_VALENCE).min(1.0)) {
                let bank = if valence >= 0.0 { pos } else { neg };
                text = join(text, pick(bank, rng));
            }
            if rng.random_bool(NOISE_FRAGMENT_RATE) {
                let bank = if rng.random_bool(0.5) { pos } else { neg };
                text = join(text, pick(bank, rng));
            }
            text
        })
        .collect()
}

fn join(base: String, fragment: String) -> String {
    let sep = if base.ends_with(['.', '!', '?']) {
        " "
    } else {
        ", "
    };
    format!("{base}{sep}{fragment}")
}
