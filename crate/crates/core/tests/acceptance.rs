//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints exactly one PASS/FAIL line; exits non-zero on any FAIL.

mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use chatmine::corpus::{corpus_stats, synthesize_corpus, Corpus, Rating, Speaker, SynthConfig};
use chatmine::features::{corpus_features, labeled_dataset, FeatureSet};
use chatmine::models::{
    cross_validate, evaluate, feature_importance, fold_assignment, folds, loss_and_gradient, train_forest,
    train_majority, ClassifierSpec, Dataset, ForestConfig,
};
use chatmine::sentiment::{extreme_groups, score_utterance, sentiment_dynamics, SentimentLexicon, StageMode};
use chatmine::textstats::{
    chi_squared, cramers_v, expand_lexicon_scored, lexicon_coverage, rank_ngrams, ContingencyTable,
    NgramConfig, PmiConfig, SpeakerFilter, StageFilter,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(t: Instant, budget: Duration) -> std::result::Result<Duration, String> {
    let e = t.elapsed();
    if e > budget {
        Err(format!(
            "took {:.1}s, budget {}s",
            e.as_secs_f64(),
            budget.as_secs()
        ))
    } else {
        Ok(e)
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn default_corpus() -> &'static Corpus {
    static C: std::sync::OnceLock<Corpus> = std::sync::OnceLock::new();
    C.get_or_init(|| synthesize_corpus(&SynthConfig::standard()).expect("default corpus"))
}

fn c1_majority_arithmetic() -> Outcome {
    let t = Instant::now();
    let mut y = vec![true; 4649];
    y.extend(vec![false; 20175]);
    let m = train_majority(&y);
    let metrics = evaluate(&vec![m.label; y.len()], &y);
    check((metrics.accuracy - 0.81272).abs() <= 1e-4, || {
        format!("accuracy {}", metrics.accuracy)
    })?;
    check(metrics.f1 == 0.0, || format!("f1 {}", metrics.f1))?;

    let d = Dataset::from_rows(&vec![vec![0.0]; y.len()], y.clone()).map_err(|e| e.to_string())?;
    let cv = cross_validate(&d, &ClassifierSpec::Majority, 10, 0).map_err(|e| e.to_string())?;
    check((cv.accuracy - 0.81272).abs() <= 1e-4 && cv.f1 == 0.0, || {
        format!("10-fold accuracy {} f1 {}", cv.accuracy, cv.f1)
    })?;
    let e = within(t, Duration::from_secs(1))?;
    Ok(format!(
        "accuracy {:.5}, F1 {}, {:.0} ms",
        metrics.accuracy,
        metrics.f1,
        e.as_secs_f64() * 1e3
    ))
}

fn c2_sentiment_signs() -> Outcome {
    let t = Instant::now();
    let lex = SentimentLexicon::bundled();
    let neg = score_utterance(
        "I purchased phone and then I noticed a terrible scuff on my screen.",
        lex,
    )
    .valence;
    let pos = score_utterance(
        "It was a pleasure assisting you, thank you for contacting Samsung Technical Support.",
        lex,
    )
    .valence;
    check(neg < 0.0, || format!("complaint scored {neg}"))?;
    check(pos > 0.0, || format!("closing scored {pos}"))?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("complaint {neg:+.3}, closing {pos:+.3}"))
}

fn c3_calibration() -> Outcome {
    let t = Instant::now();
    let cfg = SynthConfig::standard();
    check(cfg.n_sessions == 25_000 && cfg.seed == 42, || {
        "unexpected default size/seed".into()
    })?;
    let c = synthesize_corpus(&cfg).map_err(|e| e.to_string())?;
    let e = within(t, Duration::from_secs(60))?;
    let s = corpus_stats(&c);
    let vs = s.rating_fraction(Rating::VerySatisfied);
    let vd = s.rating_fraction(Rating::VeryDissatisfied);
    let checks = [
        ("median", s.duration_median_min, 14.2, 1.0),
        ("mean", s.duration_mean_min, 17.5, 1.0),
        ("survey", s.survey_response_rate, 0.16, 0.02),
        ("VS", vs, 0.45, 0.02),
        ("VD", vd, 0.14, 0.02),
    ];
    for (name, got, want, tol) in checks {
        check((got - want).abs() <= tol, || {
            format!("{name} {got:.4}, want {want} +- {tol}")
        })?;
    }
    Ok(format!(
        "median {:.2}, mean {:.2}, survey {:.3}, VS {vs:.3}, VD {vd:.3}, {:.1}s",
        s.duration_median_min,
        s.duration_mean_min,
        s.survey_response_rate,
        e.as_secs_f64()
    ))
}

fn c4_forest_features() -> Outcome {
    let t = Instant::now();
    let fv = corpus_features(default_corpus(), SentimentLexicon::bundled(), StageMode::Index);
    let all = labeled_dataset(&fv, FeatureSet::All).map_err(|e| e.to_string())?;
    let meta = labeled_dataset(&fv, FeatureSet::MetaOnly).map_err(|e| e.to_string())?;
    let spec = ClassifierSpec::Forest(ForestConfig::default());
    let m_all = cross_validate(&all, &spec, 10, 42).map_err(|e| e.to_string())?;
    let m_meta = cross_validate(&meta, &spec, 10, 42).map_err(|e| e.to_string())?;
    let baseline = cross_validate(&all, &ClassifierSpec::Majority, 10, 42).map_err(|e| e.to_string())?;
    let e = within(t, Duration::from_secs(300))?;
    check(m_all.f1 - m_meta.f1 >= 0.15, || {
        format!("F1 {:.4} vs {:.4}", m_all.f1, m_meta.f1)
    })?;
    let floor = baseline.accuracy - 0.01;
    check(m_all.accuracy >= floor && m_meta.accuracy >= floor, || {
        format!(
            "accuracy {:.4}/{:.4} below {floor:.4}",
            m_all.accuracy, m_meta.accuracy
        )
    })?;
    Ok(format!(
        "F1 {:.4} vs {:.4}; accuracy {:.4}/{:.4} (baseline {:.4}); n={}; {:.0}s",
        m_all.f1,
        m_meta.f1,
        m_all.accuracy,
        m_meta.accuracy,
        baseline.accuracy,
        all.n_rows(),
        e.as_secs_f64()
    ))
}

fn c5_dynamics() -> Outcome {
    let t = Instant::now();
    let d = sentiment_dynamics(
        default_corpus(),
        SentimentLexicon::bundled(),
        &extreme_groups(),
        StageMode::Index,
    );
    let vd = d.series("VD", Speaker::Customer).ok_or("no VD customer series")?;
    let vs = d.series("VS", Speaker::Customer).ok_or("no VS customer series")?;
    check(vd[3] < vs[3], || {
        format!("step 4: VD {:.3}, VS {:.3}", vd[3], vs[3])
    })?;
    let cs = d.spread("VD", Speaker::Customer).ok_or("no VD customer spread")?;
    let ag = d.spread("VD", Speaker::Agent).ok_or("no VD agent spread")?;
    check(cs > ag, || format!("VD spread customer {cs:.3} <= agent {ag:.3}"))?;
    let e = within(t, Duration::from_secs(120))?;
    Ok(format!(
        "step 4 VD {:+.3} < VS {:+.3}; VD spread customer {cs:.3} > agent {ag:.3}; {:.1}s",
        vd[3],
        vs[3],
        e.as_secs_f64()
    ))
}

fn c6_importance() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 600;
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let label = rng.random_bool(0.3);
        let mut row = vec![if label { 1.0 } else { 0.0 }];
        row.extend((0..5).map(|_| rng.random::<f64>()));
        rows.push(row);
        y.push(label);
    }
    let d = Dataset::from_rows(&rows, y).map_err(|e| e.to_string())?;
    let m = train_forest(
        &d,
        &ForestConfig {
            seed: 6,
            ..ForestConfig::default()
        },
    );
    let imp = feature_importance(&m);
    let top = imp[0];
    let runner_up = imp[1..].iter().copied().fold(0.0, f64::max);
    check(imp.iter().all(|&v| v <= top), || {
        format!("feature 0 not first: {imp:?}")
    })?;
    check(top >= 3.0 * runner_up, || format!("{top:.4} vs {runner_up:.4}"))?;
    let e = within(t, Duration::from_secs(30))?;
    Ok(format!(
        "determining feature {top:.4}, next {runner_up:.4} (ratio {:.1}); {:.1}s",
        top / runner_up.max(f64::MIN_POSITIVE),
        e.as_secs_f64()
    ))
}

fn c7_statistics_oracles() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (a, b, c, d) = loop {
            let v: [u64; 4] = std::array::from_fn(|_| rng.random_range(0..500));
            if v[0] + v[1] > 0 && v[2] + v[3] > 0 && v[0] + v[2] > 0 && v[1] + v[3] > 0 {
                break (v[0], v[1], v[2], v[3]);
            }
        };
        let tab = ContingencyTable::new(a as usize, b as usize, c as usize, d as usize);
        let (x, xo) = (chi_squared(&tab), common::oracle_chi2(a, b, c, d));
        let (v, vo) = (cramers_v(&tab), common::oracle_v(a, b, c, d));
        let err = ((x - xo).abs() / xo.abs().max(1.0)).max((v - vo).abs());
        worst = worst.max(err);
        check(err <= 1e-9, || {
            format!("table {a},{b},{c},{d}: chi2 {x} vs {xo}, V {v} vs {vo}")
        })?;
    }

    let mut grams = 0;
    for trial in 0..20 {
        let c = common::random_word_corpus(&mut rng, 50);
        let (speaker, sp) = match trial % 3 {
            0 => (SpeakerFilter::Both, None),
            1 => (SpeakerFilter::Agent, Some(Speaker::Agent)),
            _ => (SpeakerFilter::Customer, Some(Speaker::Customer)),
        };
        let (stage, step) = if trial % 2 == 0 {
            (StageFilter::All, None)
        } else {
            (StageFilter::Step(4), Some(4))
        };
        let orders: Vec<usize> = if trial % 4 == 3 { vec![1] } else { vec![1, 2] };
        let min_support = 1 + trial % 3;
        let cfg = NgramConfig {
            n_values: orders.iter().copied().collect::<BTreeSet<_>>(),
            speaker,
            stage,
            min_session_support: min_support,
            stage_mode: StageMode::Index,
        };
        let got = rank_ngrams(&c, &cfg).map_err(|e| e.to_string())?;
        let want = common::oracle_ranking(&c, &orders, sp, step, min_support as u64);
        check(got.stats.len() == want.len(), || {
            format!("trial {trial}: {} grams vs {}", got.stats.len(), want.len())
        })?;
        for (g, w) in got.stats.iter().zip(&want) {
            let tab = [g.table.a, g.table.b, g.table.c, g.table.d].map(|v| v as u64);
            check(g.gram == w.gram && tab == w.table, || {
                format!("trial {trial}: {} {:?} vs {} {:?}", g.gram, tab, w.gram, w.table)
            })?;
            let [a, b, cc, d] = w.table;
            check((g.v - common::oracle_v(a, b, cc, d)).abs() <= 1e-12, || {
                format!("trial {trial}: V of {}", g.gram)
            })?;
        }
        grams += want.len();
    }
    let e = within(t, Duration::from_secs(30))?;
    Ok(format!(
        "200 tables, max error {worst:.1e}; 20 corpora x 50 sessions, {grams} ranked grams identical; {:.2}s",
        e.as_secs_f64()
    ))
}

fn c8_numerics() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(5..40);
        let k = rng.random_range(1..8);
        let x: Vec<f64> = (0..n * k).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
        let w: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let bias = rng.random_range(-1.0..1.0);
        let l2 = if rng.random_bool(0.5) {
            rng.random_range(0.0..0.5)
        } else {
            0.0
        };
        let pw = rng.random_bool(0.5).then(|| rng.random_range(0.5..5.0));
        let (_, gw, gb) = loss_and_gradient(&x, &y, &w, bias, l2, pw);
        let h = 1e-5;
        let loss_at = |w: &[f64], b: f64| loss_and_gradient(&x, &y, w, b, l2, pw).0;
        let rel = |analytic: f64, numeric: f64| {
            (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
        };
        for j in 0..k {
            let (mut up, mut down) = (w.clone(), w.clone());
            up[j] += h;
            down[j] -= h;
            let fd = (loss_at(&up, bias) - loss_at(&down, bias)) / (2.0 * h);
            worst = worst.max(rel(gw[j], fd));
        }
        let fd = (loss_at(&w, bias + h) - loss_at(&w, bias - h)) / (2.0 * h);
        worst = worst.max(rel(gb, fd));
    }
    check(worst < 1e-4, || {
        format!("max relative gradient error {worst:.2e}")
    })?;

    for _ in 0..100 {
        let n = rng.random_range(2..2000);
        let k = rng.random_range(2..=n.min(20));
        let seed = rng.random();
        let fs = folds(n, k, seed).map_err(|e| e.to_string())?;
        let assign = fold_assignment(n, k, seed).map_err(|e| e.to_string())?;
        let mut seen = vec![false; n];
        for (f, idx) in fs.iter().enumerate() {
            check(idx.len() == n / k || idx.len() == n / k + 1, || {
                format!("n={n} k={k} fold {f} size {}", idx.len())
            })?;
            for &i in idx {
                check(!seen[i] && assign[i] == f, || {
                    format!("n={n} k={k}: row {i} misplaced")
                })?;
                seen[i] = true;
            }
        }
        check(seen.iter().all(|&s| s), || format!("n={n} k={k}: rows missing"))?;
    }
    let e = within(t, Duration::from_secs(30))?;
    Ok(format!(
        "max gradient relative error {worst:.2e} over 20 instances; 100 fold partitions exact; {:.2}s",
        e.as_secs_f64()
    ))
}

fn c9_pmi_oracle() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let c = common::planted_corpus(&mut rng, 200);
    let seed = common::seed_lexicon();
    let cfg = PmiConfig {
        min_count: 5,
        polarity_threshold: 1.0,
        ..PmiConfig::default()
    };
    let (expanded, added) = expand_lexicon_scored(&c, &seed, &cfg).map_err(|e| e.to_string())?;
    let windows = common::utterance_windows(&c);
    let mut report = Vec::new();
    for (token, sign) in [(common::PLANTED_NEG, -1.0), (common::PLANTED_POS, 1.0)] {
        let v = expanded
            .valence(token)
            .ok_or_else(|| format!("{token} not added"))?;
        check(v.signum() == sign, || format!("{token} valence {v}"))?;
        let score = added
            .iter()
            .find(|p| p.token == token)
            .map(|p| p.score)
            .ok_or("missing score")?;
        let want = common::oracle_polarity(&windows, token, &common::PLANTED_SEEDS, cfg.min_count);
        check((score - want).abs() <= 1e-9, || {
            format!("{token}: score {score} vs oracle {want}")
        })?;
        report.push(format!("{token} {score:+.4}"));
    }
    let before = lexicon_coverage(&c, &seed);
    let after = lexicon_coverage(&c, &expanded);
    check(after >= before, || format!("coverage {before} -> {after}"))?;
    for threshold in [0.5, 2.0, 8.0, 1e9] {
        let lex = chatmine::textstats::expand_lexicon(
            &c,
            &seed,
            &PmiConfig {
                polarity_threshold: threshold,
                ..cfg
            },
        )
        .map_err(|e| e.to_string())?;
        let cov = lexicon_coverage(&c, &lex);
        check(cov >= before, || {
            format!("threshold {threshold}: coverage {before} -> {cov}")
        })?;
    }
    let e = within(t, Duration::from_secs(30))?;
    Ok(format!(
        "{}; coverage {before:.3} -> {after:.3}; {:.2}s",
        report.join(", "),
        e.as_secs_f64()
    ))
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_chatmine")
}

fn run_cli(args: &[&str]) -> std::result::Result<(), String> {
    let out = Command::new(bin())
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "chatmine {}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr).trim()
        ))
    }
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

fn c10_replay() -> Outcome {
    let t = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = dir.path();
    let corpus = root.join("corpus.jsonl");
    let lexicon = root.join("seed.tsv");
    let mut seed_tsv = Vec::new();
    common::seed_lexicon()
        .write_tsv(&mut seed_tsv)
        .map_err(|e| e.to_string())?;
    std::fs::write(&lexicon, seed_tsv).map_err(|e| e.to_string())?;

    let train_forest = root.join("train-forest");
    let train_logistic = root.join("train-logistic");
    let runs: Vec<(Vec<String>, PathBuf)> = vec![
        (
            vec![
                "--seed",
                "5",
                "--threads",
                "4",
                "synth",
                "--sessions",
                "4000",
                "-o",
                p(&corpus),
            ],
            root.join("corpus.jsonl.manifest.json"),
        ),
        (
            vec![
                "--threads",
                "4",
                "stats",
                "--corpus",
                p(&corpus),
                "-o",
                p(&root.join("stats.json")),
            ],
            root.join("stats.json.manifest.json"),
        ),
        (
            vec![
                "--threads",
                "4",
                "dynamics",
                "--corpus",
                p(&corpus),
                "-o",
                p(&root.join("dyn.csv")),
            ],
            root.join("dyn.csv.manifest.json"),
        ),
        (
            vec![
                "--seed",
                "3",
                "--threads",
                "4",
                "train",
                "--corpus",
                p(&corpus),
                "--model",
                "forest",
                "--n-trees",
                "30",
                "--output-dir",
                p(&train_forest),
            ],
            train_forest.join("manifest.json"),
        ),
        (
            vec![
                "--threads",
                "4",
                "train",
                "--corpus",
                p(&corpus),
                "--model",
                "logistic",
                "--features",
                "meta-only",
                "--output-dir",
                p(&train_logistic),
            ],
            train_logistic.join("manifest.json"),
        ),
        (
            vec![
                "--threads",
                "4",
                "ngrams",
                "--corpus",
                p(&corpus),
                "--speaker",
                "agent",
                "--stage",
                "4",
                "--n",
                "1,2",
                "-o",
                p(&root.join("ngrams.csv")),
            ],
            root.join("ngrams.csv.manifest.json"),
        ),
        (
            vec![
                "--threads",
                "4",
                "expand",
                "--corpus",
                p(&corpus),
                "--seed-lexicon",
                p(&lexicon),
                "--min-count",
                "20",
                "-o",
                p(&root.join("expanded.tsv")),
            ],
            root.join("expanded.tsv.manifest.json"),
        ),
    ]
    .into_iter()
    .map(|(a, m)| (a.into_iter().map(str::to_string).collect(), m))
    .collect();

    let mut compared = 0;
    for (i, (args, manifest)) in runs.iter().enumerate() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        run_cli(&args)?;
        let recorded = chatmine::cli::RunManifest::load(manifest).map_err(|e| e.to_string())?;
        for threads in ["1", "3"] {
            let replay_dir = root.join(format!("replay-{i}-{threads}"));
            run_cli(&[
                "--threads",
                threads,
                "replay",
                p(manifest),
                "--output-dir",
                p(&replay_dir),
                "--check",
            ])?;
            for o in &recorded.outputs {
                let original = std::fs::read(&o.path).map_err(|e| e.to_string())?;
                let again =
                    std::fs::read(replay_dir.join(o.path.file_name().unwrap())).map_err(|e| e.to_string())?;
                check(original == again, || {
                    format!("{} differs on replay with {threads} threads", o.path.display())
                })?;
                compared += 1;
            }
        }
    }
    let e = within(t, Duration::from_secs(600))?;
    Ok(format!(
        "7 runs across 6 commands, {compared} output files byte-identical on replay (1 and 3 threads); {:.0}s",
        e.as_secs_f64()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 majority-baseline arithmetic", c1_majority_arithmetic),
        ("2 sentiment sign fidelity", c2_sentiment_signs),
        ("3 synthetic-corpus calibration", c3_calibration),
        ("4 forest: sentiment features vs meta-only", c4_forest_features),
        ("5 stage sentiment dynamics", c5_dynamics),
        ("6 feature importance on a determining feature", c6_importance),
        (
            "7 chi-squared / Cramer's V / n-gram ranking oracles",
            c7_statistics_oracles,
        ),
        ("8 gradient and fold-partition numerics", c8_numerics),
        ("9 PMI expansion oracle", c9_pmi_oracle),
        ("10 CLI manifest replay determinism", c10_replay),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
