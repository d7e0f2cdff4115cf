//! Generate a seeded synthetic corpus and summarise it.

use chatmine::corpus::{corpus_stats, synthesize_corpus, Rating, SynthConfig};

fn main() -> chatmine::Result<()> {
    let cfg = SynthConfig {
        n_sessions: 5_000,
        seed: 42,
        ..SynthConfig::standard()
    };
    let corpus = synthesize_corpus(&cfg)?;
    let st = corpus_stats(&corpus);

    println!("sessions            {}", st.n_sessions);
    println!("duration median     {:.2} min", st.duration_median_min);
    println!("duration mean       {:.2} min", st.duration_mean_min);
    println!("survey rate         {:.3}", st.survey_response_rate);
    println!(
        "utterances p50/p75  {}/{}",
        st.utterance_count.p50, st.utterance_count.p75
    );
    for r in Rating::ALL {
        println!("  {:<18} {:.3}", r.key(), st.rating_fraction(r));
    }

    let again = synthesize_corpus(&cfg)?;
    println!("same seed, same corpus: {}", again == corpus);
    Ok(())
}
