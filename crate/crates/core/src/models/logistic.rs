use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    /// Recorded for reproducibility; full-batch descent from zero weights
    /// does not consume randomness.
    pub seed: u64,
    /// Weight on positive-class loss terms. `None` is unweighted.
    #[serde(default)]
    pub positive_weight: Option<f64>,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            learning_rate: 0.1,
            epochs: 500,
            l2: 1e-3,
            seed: 0,
            positive_weight: None,
        }
    }
}

/// Per-column z-scoring. Constant columns map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(d: &Dataset) -> Standardizer {
        let n = d.n_rows() as f64;
        let k = d.n_features();
        let mut mean = vec![0.0; k];
        for row in d.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; k];
        for row in d.rows() {
            for j in 0..k {
                var[j] += (row[j] - mean[j]).powi(2);
            }
        }
        let scale = var
            .into_iter()
            .zip(&mean)
            .map(|(v, m)| {
                let sd = (v / n).sqrt();
                // rounding noise on a constant column is not spread
                if sd > 1e-12 * (1.0 + m.abs()) {
                    sd
                } else {
                    0.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn transform_into(&self, row: &[f64], out: &mut [f64]) {
        for j in 0..row.len() {
            out[j] = if self.scale[j] == 0.0 {
                0.0
            } else {
                (row[j] - self.mean[j]) / self.scale[j]
            };
        }
    }

    pub fn transform(&self, d: &Dataset) -> Vec<f64> {
        let k = d.n_features();
        let mut out = vec![0.0; d.n_rows() * k];
        for (i, row) in d.rows().enumerate() {
            self.transform_into(row, &mut out[i * k..(i + 1) * k]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub standardizer: Standardizer,
    pub config: LogisticConfig,
    #[serde(skip)]
    pub loss_history: Vec<f64>,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^t) without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Mean (optionally class-weighted) negative log-likelihood plus
/// `l2/2 * |w|^2`, with its gradient. `x` is row-major with
/// `weights.len()` columns. The bias is not penalised.
pub fn loss_and_gradient(
    x: &[f64],
    y: &[bool],
    weights: &[f64],
    bias: f64,
    l2: f64,
    positive_weight: Option<f64>,
) -> (f64, Vec<f64>, f64) {
    let k = weights.len();
    let n = y.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; k];
    let mut gb = 0.0;
    for (row, &label) in x.chunks_exact(k).zip(y) {
        let z = bias + row.iter().zip(weights).map(|(a, b)| a * b).sum::<f64>();
        let c = if label {
            positive_weight.unwrap_or(1.0)
        } else {
            1.0
        };
        loss += c * if label { softplus(-z) } else { softplus(z) };
        let r = c * (sigmoid(z) - if label { 1.0 } else { 0.0 });
        for (g, v) in gw.iter_mut().zip(row) {
            *g += r * v;
        }
        gb += r;
    }
    loss /= n;
    gb /= n;
    for (g, w) in gw.iter_mut().zip(weights) {
        *g = *g / n + l2 * w;
    }
    loss += 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
    (loss, gw, gb)
}

/// Full-batch gradient descent on standardised features, from zero weights.
pub fn train_logistic(d: &Dataset, cfg: &LogisticConfig) -> Result<LogisticModel> {
    let standardizer = Standardizer::fit(d);
    let x = standardizer.transform(d);
    let mut weights = vec![0.0; d.n_features()];
    let mut bias = 0.0;
    let mut history = Vec::with_capacity(cfg.epochs + 1);

    for epoch in 0..=cfg.epochs {
        let (loss, gw, gb) = loss_and_gradient(&x, &d.y, &weights, bias, cfg.l2, cfg.positive_weight);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        history.push(loss);
        if epoch == cfg.epochs {
            break;
        }
        for (w, g) in weights.iter_mut().zip(&gw) {
            *w -= cfg.learning_rate * g;
        }
        bias -= cfg.learning_rate * gb;
    }

    Ok(LogisticModel {
        weights,
        bias,
        standardizer,
        config: *cfg,
        loss_history: history,
    })
}

impl LogisticModel {
    pub fn probability(&self, row: &[f64]) -> f64 {
        let mut z = self.bias;
        let st = &self.standardizer;
        for (((x, w), m), s) in row.iter().zip(&self.weights).zip(&st.mean).zip(&st.scale) {
            if *s != 0.0 {
                z += w * (x - m) / s;
            }
        }
        sigmoid(z)
    }

    pub fn predict_row(&self, row: &[f64]) -> bool {
        self.probability(row) > 0.5
    }
}
