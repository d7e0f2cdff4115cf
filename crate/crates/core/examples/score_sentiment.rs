//! Score single utterances with the bundled lexicon.

use chatmine::sentiment::{score_utterance, tokenize, SentimentLexicon};

fn main() {
    let lex = SentimentLexicon::bundled();
    println!("lexicon {} v{}: {} entries", lex.name, lex.version, lex.len());

    let lines = [
        "I purchased phone and then I noticed a terrible scuff on my screen.",
        "It was a pleasure assisting you, thank you for contacting Samsung Technical Support.",
        "The battery is not good.",
        "The battery is VERY good!!!",
        "ok",
    ];
    for line in lines {
        let s = score_utterance(line, lex);
        println!("{:+.3}  {line}", s.valence);
    }

    let toks: Vec<String> = tokenize("Don't you LOVE it?!")
        .into_iter()
        .map(|t| t.text)
        .collect();
    println!("tokens: {toks:?}");
}
