use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const BUNDLED_TSV: &str = include_str!("../../data/default_lexicon.tsv");

/// Token valences plus the modifier words the scorer understands.
///
/// A token belongs to at most one of the three sets. Tokens are stored
/// lowercased.
#[derive(Debug, Clone, PartialEq)]
pub struct SentimentLexicon {
    pub name: String,
    pub version: String,
    /// Free-form `#key=value` lines kept after the header, e.g. provenance.
    pub metadata: Vec<(String, String)>,
    entries: HashMap<String, f64>,
    negators: HashSet<String>,
    boosters: HashMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Entries,
    Negators,
    Boosters,
}

impl SentimentLexicon {
    pub fn new(name: impl Into<String>, version: impl Into<String>) -> Self {
        SentimentLexicon {
            name: name.into(),
            version: version.into(),
            metadata: Vec::new(),
            entries: HashMap::new(),
            negators: HashSet::new(),
            boosters: HashMap::new(),
        }
    }

    /// The shipped ~7,500-entry open valence lexicon.
    pub fn bundled() -> &'static SentimentLexicon {
        static BUNDLED: OnceLock<SentimentLexicon> = OnceLock::new();
        BUNDLED.get_or_init(|| {
            SentimentLexicon::from_tsv(BUNDLED_TSV.as_bytes()).expect("bundled lexicon parses")
        })
    }

    pub fn load(path: &Path) -> Result<SentimentLexicon> {
        let file = File::open(path).map_err(|source| Error::File {
            path: path.to_path_buf(),
            source,
        })?;
        SentimentLexicon::from_tsv(file)
    }

    fn claimed_by(&self, token: &str) -> Option<&'static str> {
        if self.entries.contains_key(token) {
            Some("entries")
        } else if self.negators.contains(token) {
            Some("negators")
        } else if self.boosters.contains_key(token) {
            Some("boosters")
        } else {
            None
        }
    }

    fn check_new(&self, token: &str) -> std::result::Result<(), String> {
        if token.is_empty() {
            return Err("empty token".into());
        }
        match self.claimed_by(token) {
            Some(set) => Err(format!("token {token:?} already listed in {set}")),
            None => Ok(()),
        }
    }

    pub fn insert_entry(&mut self, token: &str, valence: f64) -> std::result::Result<(), String> {
        let token = token.to_lowercase();
        self.check_new(&token)?;
        if !valence.is_finite() {
            return Err(format!("non-finite valence for {token:?}"));
        }
        self.entries.insert(token, valence);
        Ok(())
    }

    pub fn insert_negator(&mut self, token: &str) -> std::result::Result<(), String> {
        let token = token.to_lowercase();
        self.check_new(&token)?;
        self.negators.insert(token);
        Ok(())
    }

    pub fn insert_booster(&mut self, token: &str, delta: f64) -> std::result::Result<(), String> {
        let token = token.to_lowercase();
        self.check_new(&token)?;
        if !delta.is_finite() {
            return Err(format!("non-finite booster delta for {token:?}"));
        }
        self.boosters.insert(token, delta);
        Ok(())
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied()
    }

    pub fn is_negator(&self, token: &str) -> bool {
        self.negators.contains(token)
    }

    pub fn booster(&self, token: &str) -> Option<f64> {
        self.boosters.get(token).copied()
    }

    /// True if the token is in any of the three sets.
    pub fn contains(&self, token: &str) -> bool {
        self.claimed_by(token).is_some()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn negator_count(&self) -> usize {
        self.negators.len()
    }

    pub fn booster_count(&self) -> usize {
        self.boosters.len()
    }

    pub fn max_abs_valence(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Parse the TSV lexicon format: a `#name=.. #version=..` header, then
    /// `token<TAB>valence` lines, optionally followed by `#section=negators`
    /// (one token per line) and `#section=boosters` (`token<TAB>delta`).
    pub fn from_tsv<R: Read>(input: R) -> Result<SentimentLexicon> {
        let mut lines = BufReader::new(input).lines().enumerate();
        let err = |line: usize, message: String| Error::Lexicon { line, message };

        let header = match lines.next() {
            Some((_, l)) => l?,
            None => return Err(err(1, "missing #name=.. #version=.. header".into())),
        };
        let (name, version) =
            parse_header(&header).ok_or_else(|| err(1, format!("bad metadata header {header:?}")))?;
        let mut lex = SentimentLexicon::new(name, version);

        let mut section = Section::Entries;
        for (idx, line) in lines {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.trim().is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("#section=") {
                section = match rest.trim() {
                    "entries" => Section::Entries,
                    "negators" => Section::Negators,
                    "boosters" => Section::Boosters,
                    other => return Err(err(lineno, format!("unknown section {other:?}"))),
                };
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once('=') {
                    lex.metadata.push((k.trim().to_owned(), v.trim().to_owned()));
                }
                continue;
            }
            let mut cols = trimmed.split('\t');
            let token = cols.next().unwrap_or_default().trim();
            let number = |cols: &mut std::str::Split<'_, char>| -> Result<f64> {
                let raw = cols
                    .next()
                    .ok_or_else(|| err(lineno, format!("missing value for {token:?}")))?;
                raw.trim()
                    .parse::<f64>()
                    .map_err(|_| err(lineno, format!("not a number: {raw:?}")))
            };
            let inserted = match section {
                Section::Entries => {
                    let v = number(&mut cols)?;
                    lex.insert_entry(token, v)
                }
                Section::Negators => lex.insert_negator(token),
                Section::Boosters => {
                    let v = number(&mut cols)?;
                    lex.insert_booster(token, v)
                }
            };
            inserted.map_err(|m| err(lineno, m))?;
        }
        Ok(lex)
    }

    /// Write in the same TSV format, each section sorted by token.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "#name={} #version={}", self.name, self.version)?;
        for (k, v) in &self.metadata {
            writeln!(out, "#{k}={v}")?;
        }
        let mut entries: Vec<_> = self.entries.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        for (t, v) in entries {
            writeln!(out, "{t}\t{v}")?;
        }
        if !self.negators.is_empty() {
            writeln!(out, "#section=negators")?;
            let mut neg: Vec<_> = self.negators.iter().collect();
            neg.sort();
            for t in neg {
                writeln!(out, "{t}")?;
            }
        }
        if !self.boosters.is_empty() {
            writeln!(out, "#section=boosters")?;
            let mut boo: Vec<_> = self.boosters.iter().collect();
            boo.sort_by(|a, b| a.0.cmp(b.0));
            for (t, v) in boo {
                writeln!(out, "{t}\t{v}")?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

fn parse_header(line: &str) -> Option<(String, String)> {
    let rest = line.trim().strip_prefix("#name=")?;
    let split = rest.find("#version=")?;
    let name = rest[..split].trim();
    let version = rest[split + "#version=".len()..].trim();
    if name.is_empty() || version.is_empty() {
        return None;
    }
    Some((name.to_owned(), version.to_owned()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_lexicon_loads() {
        let lex = SentimentLexicon::bundled();
        assert!(lex.len() > 7_000, "{}", lex.len());
        assert_eq!(lex.valence("terrible"), Some(-2.1));
        assert_eq!(lex.valence("pleasure"), Some(2.7));
        assert!(lex.is_negator("not"));
        assert!(lex.is_negator("can't"));
        assert!(lex.booster("very").unwrap() > 0.0);
        assert!(lex.booster("slightly").unwrap() < 0.0);
    }

    #[test]
    fn header_is_required() {
        let e = SentimentLexicon::from_tsv("good\t1.9\n".as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Lexicon { line: 1, .. }));
    }

    #[test]
    fn token_in_two_sets_is_rejected() {
        let text = "#name=t #version=1\nno\t-1.2\n#section=negators\nno\n";
        let e = SentimentLexicon::from_tsv(text.as_bytes()).unwrap_err();
        assert!(matches!(e, Error::Lexicon { line: 4, .. }), "{e}");
    }

    #[test]
    fn non_finite_valence_is_rejected() {
        let text = "#name=t #version=1\ngood\tinf\n";
        assert!(SentimentLexicon::from_tsv(text.as_bytes()).is_err());
        let text = "#name=t #version=1\ngood\tabc\n";
        assert!(SentimentLexicon::from_tsv(text.as_bytes()).is_err());
    }

    #[test]
    fn write_then_read_is_identity() {
        let text = "#name=small lex #version=0.1\n#derived_from=seed 2\nGood\t1.9\nbad\t-2.5\n#section=negators\nnot\n#section=boosters\nvery\t0.293\n";
        let lex = SentimentLexicon::from_tsv(text.as_bytes()).unwrap();
        assert_eq!(lex.name, "small lex");
        assert_eq!(lex.valence("good"), Some(1.9));
        assert_eq!(
            lex.metadata,
            vec![("derived_from".to_string(), "seed 2".to_string())]
        );
        let mut buf = Vec::new();
        lex.write_tsv(&mut buf).unwrap();
        assert_eq!(SentimentLexicon::from_tsv(buf.as_slice()).unwrap(), lex);
    }
}
