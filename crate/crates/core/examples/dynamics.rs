//! Per-stage sentiment for the very satisfied and very dissatisfied groups.

use chatmine::corpus::{synthesize_corpus, Speaker, SynthConfig};
use chatmine::sentiment::{
    extreme_groups, sentiment_dynamics, write_dynamics_csv, SentimentLexicon, StageMode,
};

fn main() -> chatmine::Result<()> {
    let cfg = SynthConfig {
        n_sessions: 8_000,
        seed: 7,
        ..SynthConfig::standard()
    };
    let corpus = synthesize_corpus(&cfg)?;
    let d = sentiment_dynamics(
        &corpus,
        SentimentLexicon::bundled(),
        &extreme_groups(),
        StageMode::Index,
    );

    for g in ["VS", "VD"] {
        for sp in Speaker::BOTH {
            if let Some(series) = d.series(g, sp) {
                let cells: Vec<String> = series.iter().map(|v| format!("{v:+.3}")).collect();
                println!(
                    "{g} {:<8} {}  spread {:.3}",
                    sp.as_str(),
                    cells.join(" "),
                    d.spread(g, sp).unwrap()
                );
            }
        }
    }

    let mut csv = Vec::new();
    write_dynamics_csv(&mut csv, &d)?;
    print!("\n{}", String::from_utf8_lossy(&csv));
    Ok(())
}
