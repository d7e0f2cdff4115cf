use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ClassifierSpec, Confusion, Dataset, Metrics};
use crate::error::{Error, Result};
use crate::rng::{self, domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvAggregation {
    /// Metrics from the summed confusion matrix.
    #[default]
    Pooled,
    /// Unweighted mean of per-fold metrics; confusion is still the sum.
    FoldMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvOptions {
    pub k: usize,
    pub seed: u64,
    pub aggregation: CvAggregation,
}

/// Fold index for each of `n` rows after a seeded shuffle. The first
/// `n % k` folds get one extra row.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::config(format!("cross-validation needs k >= 2, got {k}")));
    }
    if k > n {
        return Err(Error::config(format!(
            "cross-validation k = {k} exceeds {n} rows"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(seed, domain::CV_SHUFFLE, 0));
    let (base, extra) = (n / k, n % k);
    let mut fold_of = vec![0; n];
    let mut at = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        for &i in &order[at..at + size] {
            fold_of[i] = f;
        }
        at += size;
    }
    Ok(fold_of)
}

/// Test indices per fold, each ascending.
pub fn folds(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let fold_of = fold_assignment(n, k, seed)?;
    let mut out = vec![Vec::new(); k];
    for (i, f) in fold_of.into_iter().enumerate() {
        out[f].push(i);
    }
    Ok(out)
}

pub fn cross_validate(d: &Dataset, spec: &ClassifierSpec, k: usize, seed: u64) -> Result<Metrics> {
    cross_validate_with(
        d,
        spec,
        &CvOptions {
            k,
            seed,
            aggregation: CvAggregation::Pooled,
        },
    )
}

/// Folds train in parallel; fold `f` trains with seed `(seed, f)` so the
/// result does not depend on scheduling.
pub fn cross_validate_with(d: &Dataset, spec: &ClassifierSpec, opts: &CvOptions) -> Result<Metrics> {
    let test_sets = folds(d.n_rows(), opts.k, opts.seed)?;
    let fold_of = {
        let mut v = vec![0; d.n_rows()];
        for (f, idx) in test_sets.iter().enumerate() {
            idx.iter().for_each(|&i| v[i] = f);
        }
        v
    };

    let per_fold: Vec<Metrics> = test_sets
        .par_iter()
        .enumerate()
        .map(|(f, test)| {
            let train: Vec<usize> = (0..d.n_rows()).filter(|&i| fold_of[i] != f).collect();
            let fold_spec = spec.with_seed(rng::derive_seed(opts.seed, domain::FOLD, f as u64));
            let model = fold_spec.fit(&d.subset(&train))?;
            let mut c = Confusion::default();
            for &i in test {
                c.record(model.predict_row(d.row(i)), d.y[i]);
            }
            Ok(Metrics::from_confusion(c))
        })
        .collect::<Result<_>>()?;

    let pooled = per_fold
        .iter()
        .fold(Confusion::default(), |acc, m| acc + m.confusion);
    let mut out = Metrics::from_confusion(pooled);
    if opts.aggregation == CvAggregation::FoldMean {
        let k = per_fold.len() as f64;
        let mean = |f: fn(&Metrics) -> f64| per_fold.iter().map(f).sum::<f64>() / k;
        out.accuracy = mean(|m| m.accuracy);
        out.precision = mean(|m| m.precision);
        out.recall = mean(|m| m.recall);
        out.f1 = mean(|m| m.f1);
    }
    out.per_fold = Some(per_fold);
    Ok(out)
}
