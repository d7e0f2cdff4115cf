//! Grow a small seed lexicon from co-occurrence in a corpus.

use chatmine::corpus::{synthesize_corpus, SynthConfig};
use chatmine::sentiment::SentimentLexicon;
use chatmine::textstats::{expand_lexicon_scored, lexicon_coverage, PmiConfig, PmiWindow};

fn main() -> chatmine::Result<()> {
    let corpus = synthesize_corpus(&SynthConfig {
        n_sessions: 3_000,
        seed: 11,
        ..SynthConfig::standard()
    })?;

    let mut seed = SentimentLexicon::new("tiny-seed", "1");
    for (tok, v) in [
        ("great", 3.1),
        ("thanks", 1.9),
        ("terrible", -2.5),
        ("broken", -2.0),
        ("frustrated", -1.8),
    ] {
        seed.insert_entry(tok, v).expect("distinct tokens");
    }

    let cfg = PmiConfig {
        window: PmiWindow::Utterance,
        min_count: 10,
        ..PmiConfig::default()
    };
    let (expanded, scored) = expand_lexicon_scored(&corpus, &seed, &cfg)?;
    println!("seed {} entries, expanded {} entries", seed.len(), expanded.len());

    let mut added: Vec<_> = scored
        .iter()
        .filter(|p| p.score.abs() >= cfg.polarity_threshold)
        .collect();
    added.sort_by(|a, b| b.score.abs().total_cmp(&a.score.abs()));
    for p in added.iter().take(12) {
        println!(
            "  {:<14} score {:+8.3}  valence {:+.3}",
            p.token,
            p.score,
            expanded.valence(&p.token).unwrap()
        );
    }

    println!(
        "coverage {:.3} -> {:.3}",
        lexicon_coverage(&corpus, &seed),
        lexicon_coverage(&corpus, &expanded)
    );
    Ok(())
}
