use std::io::Write;

use super::Metrics;
use crate::error::Result;

fn metric_row(model: &str, fold: &str, m: &Metrics) -> Vec<String> {
    let c = &m.confusion;
    vec![
        model.to_string(),
        fold.to_string(),
        m.accuracy.to_string(),
        m.precision.to_string(),
        m.recall.to_string(),
        m.f1.to_string(),
        c.tp.to_string(),
        c.fp.to_string(),
        c.fn_.to_string(),
        c.tn.to_string(),
    ]
}

/// One row per fold (1-based) and a final `pooled` row.
pub fn write_metrics_csv<W: Write>(out: W, model: &str, m: &Metrics) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "model",
        "fold",
        "accuracy",
        "precision",
        "recall",
        "f1",
        "tp",
        "fp",
        "fn",
        "tn",
    ])?;
    for (f, fm) in m.per_fold.iter().flatten().enumerate() {
        w.write_record(metric_row(model, &(f + 1).to_string(), fm))?;
    }
    w.write_record(metric_row(model, "pooled", m))?;
    w.flush()?;
    Ok(())
}

/// `ranked` must already be sorted descending.
pub fn write_importance_csv<W: Write>(out: W, ranked: &[(String, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "feature", "mean_decrease_entropy"])?;
    for (i, (name, v)) in ranked.iter().enumerate() {
        w.write_record([(i + 1).to_string(), name.clone(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
