//! Venue, month, and publisher lexicons.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize, Token};
use crate::extract::normalize;

/// Files expected in a lexicon directory.
pub const LEXICON_FILES: [&str; 3] = ["venues.txt", "months.txt", "publishers.txt"];

const BUNDLED_VENUES: &str = include_str!("../../data/lexicons/venues.txt");
const BUNDLED_MONTHS: &str = include_str!("../../data/lexicons/months.txt");
const BUNDLED_PUBLISHERS: &str = include_str!("../../data/lexicons/publishers.txt");

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("lexicon file missing: {0}")]
    LexiconMissing(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Multi-word phrases matched case-insensitively over word tokens; `.`
/// tokens are skipped on both sides so `Commun. ACM` matches `Commun ACM`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct PhraseSet {
    raw: Vec<String>,
    phrases: Vec<Vec<String>>,
    by_first: HashMap<String, Vec<usize>>,
}

impl PartialEq for PhraseSet {
    fn eq(&self, other: &Self) -> bool {
        self.raw == other.raw
    }
}

fn phrase_words(entry: &str) -> Vec<String> {
    tokenize(&normalize(entry))
        .into_iter()
        .filter(|t| t.text != ".")
        .map(|t| t.text.to_lowercase())
        .collect()
}

impl From<Vec<String>> for PhraseSet {
    fn from(raw: Vec<String>) -> Self {
        let mut raw: Vec<String> = raw
            .into_iter()
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty() && !s.starts_with('#'))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        raw.sort();
        let phrases: Vec<Vec<String>> = raw.iter().map(|e| phrase_words(e)).collect();
        let mut by_first: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, p) in phrases.iter().enumerate() {
            if let Some(first) = p.first() {
                by_first.entry(first.clone()).or_default().push(i);
            }
        }
        PhraseSet { raw, phrases, by_first }
    }
}

impl From<PhraseSet> for Vec<String> {
    fn from(p: PhraseSet) -> Self {
        p.raw
    }
}

impl PhraseSet {
    pub fn parse(content: &str) -> Self {
        content.lines().map(str::to_string).collect::<Vec<_>>().into()
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Longest phrase starting at a capitalized token `i`; returns the exclusive end token
    /// index of the match.
    pub fn longest_match(&self, tokens: &[Token], i: usize) -> Option<usize> {
        let tok = tokens.get(i)?;
        if !tok.text.chars().next().is_some_and(|c| c.is_uppercase()) {
            return None;
        }
        let first = tok.text.to_lowercase();
        let candidates = self.by_first.get(&first)?;
        let mut best: Option<usize> = None;
        for &ci in candidates {
            let phrase = &self.phrases[ci];
            let mut t = i;
            let mut matched = 0;
            while matched < phrase.len() && t < tokens.len() {
                if tokens[t].text == "." && matched > 0 {
                    t += 1;
                    continue;
                }
                if tokens[t].text.to_lowercase() != phrase[matched] {
                    break;
                }
                matched += 1;
                t += 1;
            }
            if matched == phrase.len() && best.is_none_or(|b| t > b) {
                best = Some(t);
            }
        }
        best
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Lexicons {
    pub venues: PhraseSet,
    pub publishers: PhraseSet,
    pub months: BTreeSet<String>,
}

impl Lexicons {
    pub fn from_strs(venues: &str, months: &str, publishers: &str) -> Self {
        Lexicons {
            venues: PhraseSet::parse(venues),
            publishers: PhraseSet::parse(publishers),
            months: months
                .lines()
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect(),
        }
    }

    /// Lexicons shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_strs(BUNDLED_VENUES, BUNDLED_MONTHS, BUNDLED_PUBLISHERS)
    }

    /// Load `venues.txt`, `months.txt`, and `publishers.txt` from a directory.
    pub fn load_dir(dir: &Path) -> Result<Self, LexiconError> {
        let mut contents = Vec::with_capacity(3);
        for name in LEXICON_FILES {
            let path = dir.join(name);
            if !path.is_file() {
                return Err(LexiconError::LexiconMissing(path));
            }
            contents.push(std::fs::read_to_string(&path)?);
        }
        Ok(Self::from_strs(&contents[0], &contents[1], &contents[2]))
    }

    pub fn is_month(&self, word: &str) -> bool {
        word.chars().next().is_some_and(char::is_uppercase) && self.months.contains(&word.to_lowercase())
    }
}
