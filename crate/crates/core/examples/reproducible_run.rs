//! Run a command programmatically, then replay it from its manifest and
//! confirm the outputs are byte-identical.

use chatmine::cli::{execute, replay, CommandConfig, SynthRun};
use chatmine::corpus::SynthConfig;

fn main() -> chatmine::Result<()> {
    let dir = std::env::temp_dir().join(format!("chatmine-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");

    let cfg = CommandConfig::Synth(SynthRun {
        synth: SynthConfig {
            n_sessions: 500,
            seed: 9,
            ..SynthConfig::standard()
        },
        output: dir.join("corpus.jsonl"),
    });
    let first = execute(&cfg, Some(1))?;
    for o in &first.outputs {
        println!(
            "wrote {} ({} bytes, sha256 {})",
            o.path.display(),
            o.bytes,
            &o.sha256[..16]
        );
    }

    let manifest = cfg.manifest_path();
    let again = replay(&manifest, Some(&dir.join("replay")), true, Some(4))?;
    println!(
        "replayed on 4 threads into {}: outputs match",
        again.outputs[0].path.display()
    );

    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
