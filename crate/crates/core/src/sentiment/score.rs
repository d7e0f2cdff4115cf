use serde::{Deserialize, Serialize};

use super::lexicon::SentimentLexicon;
use super::tokenize::{tokenize, Token};

/// Constants of the rule-based scorer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringRules {
    /// How many preceding tokens a negator reaches.
    pub negation_window: usize,
    /// Magnitude kept after a negation flip.
    pub negation_scale: f64,
    pub caps_scale: f64,
    /// `x / sqrt(x^2 + alpha)` squashing constant.
    pub normalization_alpha: f64,
}

impl Default for ScoringRules {
    fn default() -> Self {
        ScoringRules {
            negation_window: 3,
            negation_scale: 0.74,
            caps_scale: 1.25,
            normalization_alpha: 15.0,
        }
    }
}

impl ScoringRules {
    pub fn normalize(&self, raw: f64) -> f64 {
        raw / (raw * raw + self.normalization_alpha).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SentimentScore {
    /// In (-1, 1); exactly 0 when nothing matched.
    pub valence: f64,
    pub matched_tokens: usize,
}

pub fn score_utterance(text: &str, lex: &SentimentLexicon) -> SentimentScore {
    score_tokens(&tokenize(text), lex, &ScoringRules::default())
}

pub fn score_utterance_with(text: &str, lex: &SentimentLexicon, rules: &ScoringRules) -> SentimentScore {
    score_tokens(&tokenize(text), lex, rules)
}

/// Sum per-match contributions, then squash. For each lexicon hit: an
/// immediately preceding booster adds its delta in the direction of the
/// token's sign, all-caps spelling scales by `caps_scale`, and any negator
/// among the previous `negation_window` tokens flips the sign and scales
/// by `negation_scale`.
pub fn score_tokens(tokens: &[Token], lex: &SentimentLexicon, rules: &ScoringRules) -> SentimentScore {
    let mut sum = 0.0;
    let mut matched = 0;
    for (i, tok) in tokens.iter().enumerate() {
        let Some(base) = lex.valence(&tok.text) else {
            continue;
        };
        matched += 1;
        let mut v = base;
        if let Some(delta) = i.checked_sub(1).and_then(|j| lex.booster(&tokens[j].text)) {
            v += delta * v.signum();
        }
        if tok.all_caps {
            v *= rules.caps_scale;
        }
        let from = i.saturating_sub(rules.negation_window);
        if tokens[from..i].iter().any(|t| lex.is_negator(&t.text)) {
            v *= -rules.negation_scale;
        }
        sum += v;
    }
    SentimentScore {
        valence: if matched == 0 { 0.0 } else { rules.normalize(sum) },
        matched_tokens: matched,
    }
}
