//! Agent n-grams in the closing stage most associated with dissatisfaction.

use std::collections::BTreeSet;

use chatmine::corpus::{synthesize_corpus, SynthConfig};
use chatmine::textstats::{rank_ngrams, NgramConfig, SpeakerFilter, StageFilter};

fn main() -> chatmine::Result<()> {
    let corpus = synthesize_corpus(&SynthConfig {
        n_sessions: 6_000,
        seed: 3,
        ..SynthConfig::standard()
    })?;
    let cfg = NgramConfig {
        n_values: BTreeSet::from([1, 2]),
        speaker: SpeakerFilter::Agent,
        stage: StageFilter::Step(4),
        min_session_support: 20,
        ..NgramConfig::default()
    };
    let r = rank_ngrams(&corpus, &cfg)?;
    println!("{} dissatisfied / {} other labeled sessions", r.n_true, r.n_false);
    println!(
        "{:>4} {:<32} {:>7} {:>9} {:>7} {:>7}",
        "rank", "gram", "V", "chi2", "f_true", "f_false"
    );
    for (i, s) in r.stats.iter().take(15).enumerate() {
        println!(
            "{:>4} {:<32} {:>7.4} {:>9.2} {:>7.3} {:>7.3}",
            i + 1,
            s.gram,
            s.v,
            s.chi2,
            s.freq_true,
            s.freq_false
        );
    }
    Ok(())
}
