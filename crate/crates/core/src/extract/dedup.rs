//! Exact per-language deduplication of normalized comments.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::language::Language;

/// Where one occurrence of a comment came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Provenance {
    pub repo: String,
    pub path: String,
    pub line: usize,
}

/// A distinct normalized comment text within one language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedComment {
    #[serde(rename = "lang")]
    pub language: Language,
    pub text: String,
    pub occurrences: usize,
    pub provenance: Vec<Provenance>,
}

/// Mergeable accumulator keyed by `(language, normalized text)`.
///
/// Partial indexes built over disjoint parts of a corpus can be combined
/// with [`DedupIndex::merge`] in any grouping.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DedupIndex {
    groups: BTreeMap<(Language, String), Vec<Provenance>>,
}

impl DedupIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, language: Language, text: String, provenance: Provenance) {
        self.groups.entry((language, text)).or_default().push(provenance);
    }

    pub fn merge(&mut self, other: DedupIndex) {
        for (key, mut prov) in other.groups {
            self.groups.entry(key).or_default().append(&mut prov);
        }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Distinct comments sorted by `(language, text)`; provenance lists are
    /// sorted so the result does not depend on insertion order.
    pub fn finish(self) -> Vec<NormalizedComment> {
        self.groups
            .into_iter()
            .map(|((language, text), mut provenance)| {
                provenance.sort();
                NormalizedComment {
                    language,
                    text,
                    occurrences: provenance.len(),
                    provenance,
                }
            })
            .collect()
    }
}

impl AsRef<str> for NormalizedComment {
    fn as_ref(&self) -> &str {
        &self.text
    }
}

impl Extend<(Language, String, Provenance)> for DedupIndex {
    fn extend<T: IntoIterator<Item = (Language, String, Provenance)>>(&mut self, iter: T) {
        for (l, t, p) in iter {
            self.insert(l, t, p);
        }
    }
}

/// Deduplicate a stream of normalized comments.
pub fn dedup<I>(comments: I) -> Vec<NormalizedComment>
where
    I: IntoIterator<Item = (Language, String, Provenance)>,
{
    let mut index = DedupIndex::new();
    index.extend(comments);
    index.finish()
}

/// Re-deduplicate already grouped comments (keeps every provenance entry).
pub fn dedup_normalized(comments: Vec<NormalizedComment>) -> Vec<NormalizedComment> {
    dedup(comments.into_iter().flat_map(|c| {
        let (lang, text) = (c.language, c.text);
        c.provenance.into_iter().map(move |p| (lang, text.clone(), p))
    }))
}

#[derive(Debug, thiserror::Error)]
pub enum JsonlError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write_comments_jsonl<W: Write>(mut w: W, comments: &[NormalizedComment]) -> std::io::Result<()> {
    for c in comments {
        serde_json::to_writer(&mut w, c)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn read_comments_jsonl<R: BufRead>(r: R) -> Result<Vec<NormalizedComment>, JsonlError> {
    let mut out = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| JsonlError::Parse { line: idx + 1, source })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prov(repo: &str) -> Provenance {
        Provenance {
            repo: repo.into(),
            path: "a.c".into(),
            line: 1,
        }
    }

    #[test]
    fn identical_texts_collapse() {
        let out = dedup([
            (Language::C, "same".to_string(), prov("r1")),
            (Language::C, "same".to_string(), prov("r2")),
        ]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].occurrences, 2);
    }

    #[test]
    fn dedup_is_per_language() {
        let out = dedup([
            (Language::Java, "same".to_string(), prov("r1")),
            (Language::C, "same".to_string(), prov("r2")),
        ]);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].language, Language::C);
    }

    #[test]
    fn typo_variants_stay_distinct() {
        // 142 occurrences spread over 47 texts that differ by small edits
        let mut items = Vec::new();
        for i in 0..142 {
            let variant = i % 47;
            items.push((
                Language::C,
                format!("Twisted GFSR generators variant{variant}"),
                prov(&format!("r{i}")),
            ));
        }
        let out = dedup(items);
        assert_eq!(out.len(), 47);
        assert_eq!(out.iter().map(|c| c.occurrences).sum::<usize>(), 142);
    }

    #[test]
    fn merge_is_order_independent() {
        let items: Vec<_> = (0..30)
            .map(|i| (Language::ALL[i % 7], format!("t{}", i % 5), prov(&format!("r{i}"))))
            .collect();
        let whole = dedup(items.clone());
        let mut a = DedupIndex::new();
        a.extend(items[15..].iter().cloned());
        let mut b = DedupIndex::new();
        b.extend(items[..15].iter().cloned());
        a.merge(b);
        assert_eq!(a.finish(), whole);
    }

    #[test]
    fn jsonl_shape() {
        let out = dedup([(Language::Cpp, "x".to_string(), prov("r"))]);
        let mut buf = Vec::new();
        write_comments_jsonl(&mut buf, &out).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "{\"lang\":\"C++\",\"text\":\"x\",\"occurrences\":1,\"provenance\":[{\"repo\":\"r\",\"path\":\"a.c\",\"line\":1}]}\n"
        );
        assert_eq!(read_comments_jsonl(s.as_bytes()).unwrap(), out);
        let err = read_comments_jsonl("\n{bad".as_bytes()).unwrap_err();
        assert!(matches!(err, JsonlError::Parse { line: 2, .. }));
    }
}
