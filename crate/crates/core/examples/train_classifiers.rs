//! Ten-fold comparison of the three classifiers, with and without the
//! sentiment features, plus forest feature importance.

use chatmine::corpus::{synthesize_corpus, SynthConfig};
use chatmine::features::{corpus_features, labeled_dataset, FeatureSet};
use chatmine::models::{
    cross_validate, ranked_importance, train_forest, ClassifierSpec, ForestConfig, LogisticConfig,
};
use chatmine::sentiment::{SentimentLexicon, StageMode};

fn main() -> chatmine::Result<()> {
    let cfg = SynthConfig {
        n_sessions: 8_000,
        seed: 42,
        ..SynthConfig::standard()
    };
    let corpus = synthesize_corpus(&cfg)?;
    let fv = corpus_features(&corpus, SentimentLexicon::bundled(), StageMode::Index);

    let forest = ForestConfig {
        n_trees: 50,
        ..ForestConfig::default()
    };
    let specs = [
        ClassifierSpec::Majority,
        ClassifierSpec::Logistic(LogisticConfig::default()),
        ClassifierSpec::Forest(forest),
    ];

    println!("{:<10} {:<10} {:>8} {:>8}", "model", "features", "acc", "f1");
    for set in [FeatureSet::All, FeatureSet::MetaOnly] {
        let d = labeled_dataset(&fv, set)?;
        for spec in &specs {
            let m = cross_validate(&d, spec, 10, 1)?;
            println!(
                "{:<10} {:<10} {:>8.4} {:>8.4}",
                spec.name(),
                set.as_str(),
                m.accuracy,
                m.f1
            );
        }
    }

    let d = labeled_dataset(&fv, FeatureSet::All)?;
    let model = train_forest(&d, &forest);
    println!("\nimportance (mean decrease entropy):");
    for (name, v) in ranked_importance(&model, &d).iter().take(6) {
        println!("  {name:<28} {v:.4}");
    }
    Ok(())
}
