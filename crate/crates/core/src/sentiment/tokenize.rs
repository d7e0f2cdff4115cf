/// A lowercased word token with the emphasis flag of its original spelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub all_caps: bool,
}

/// Emoticons kept whole when they appear as a whitespace-delimited chunk.
const EMOTICONS: &[&str] = &[
    ":)", ":-)", ":(", ":-(", ":d", ":-d", ";)", ";-)", ":p", ":-p", ":/", ":-/", ":'(", ":|", ":-|", ":o",
    ":-o", "=)", "=(", "<3", "</3", "xd", ":]", ":[", ":-]", ":-[", ">:(", ":*", ":-*", "^_^", "-_-", ":3",
    "(:", "):",
];

fn is_emoticon(chunk: &str) -> bool {
    let lower = chunk.to_lowercase();
    EMOTICONS.contains(&lower.as_str()) && !chunk.chars().all(char::is_alphanumeric)
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// All-caps means at least two letters, none of them lowercase ("I" and
/// "OK3" with one letter do not count).
fn all_caps(word: &str) -> bool {
    let letters = word.chars().filter(|c| c.is_alphabetic());
    let (mut n, mut upper) = (0, true);
    for c in letters {
        n += 1;
        upper &= !c.is_lowercase();
    }
    n >= 2 && upper
}

fn push_word(out: &mut Vec<Token>, word: &mut String) {
    if word.is_empty() {
        return;
    }
    let trimmed = word.trim_end_matches(is_apostrophe);
    if !trimmed.is_empty() {
        out.push(Token {
            text: trimmed.to_lowercase().replace('\u{2019}', "'"),
            all_caps: all_caps(trimmed),
        });
    }
    word.clear();
}

/// Split on non-alphanumeric boundaries. An apostrophe inside a word is kept
/// ("can't"), and emoticons from a fixed table survive as single tokens.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut word = String::new();
    for chunk in text.split_whitespace() {
        if is_emoticon(chunk) {
            out.push(Token {
                text: chunk.to_lowercase(),
                all_caps: false,
            });
            continue;
        }
        for c in chunk.chars() {
            if c.is_alphanumeric() || (is_apostrophe(c) && !word.is_empty()) {
                word.push(c);
            } else {
                push_word(&mut out, &mut word);
            }
        }
        push_word(&mut out, &mut word);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn shouting_keeps_caps_flags() {
        let t = tokenize("YEAH RIGHT.");
        assert_eq!(words("YEAH RIGHT."), ["yeah", "right"]);
        assert_eq!(t.iter().map(|t| t.all_caps).collect::<Vec<_>>(), [true, true]);
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  ... !!").is_empty());
    }

    #[test]
    fn contractions_stay_whole() {
        assert_eq!(
            words("can't sign into Google accounts"),
            ["can't", "sign", "into", "google", "accounts"]
        );
        assert_eq!(words("it doesn\u{2019}t work"), ["it", "doesn't", "work"]);
        assert_eq!(words("'quoted' words'"), ["quoted", "words"]);
    }

    #[test]
    fn emoticons_survive() {
        assert_eq!(words("thanks :) bye :-("), ["thanks", ":)", "bye", ":-("]);
        assert_eq!(words("lol :D"), ["lol", ":d"]);
        // a bare word that happens to spell an emoticon is still a word
        assert_eq!(words("XD"), ["xd"]);
    }

    #[test]
    fn single_capital_is_not_emphasis() {
        let t = tokenize("I am OK");
        assert!(!t[0].all_caps);
        assert!(t[2].all_caps);
    }

    #[test]
    fn punctuation_splits_words() {
        assert_eq!(words("hello,world!re-set"), ["hello", "world", "re", "set"]);
        assert_eq!(words("version 4.4.2"), ["version", "4", "4", "2"]);
    }
}
