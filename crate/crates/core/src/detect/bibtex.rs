use std::collections::HashMap;
use std::fmt::Write;

use super::CitationRecord;

/// Surname of an author string: the part before a comma, else the last word.
fn surname(author: &str) -> &str {
    match author.split_once(',') {
        Some((before, _)) if !before.trim().is_empty() => before.trim(),
        _ => author.split_whitespace().last().unwrap_or(""),
    }
}

fn key_part(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Base key: first author surname, year and first title word.
pub fn bibtex_key(record: &CitationRecord) -> String {
    let mut key = String::new();
    if let Some(a) = record.authors.first() {
        key += &key_part(surname(a));
    }
    if let Some(y) = &record.year {
        key += &key_part(y);
    }
    if let Some(t) = &record.title {
        if let Some(w) = t.split_whitespace().map(key_part).find(|w| !w.is_empty()) {
            key += &w;
        }
    }
    if key.is_empty() {
        key.push_str("ref");
    }
    key
}

fn escape(value: &str) -> String {
    value.replace('{', "\\{").replace('}', "\\}")
}

fn entry(key: &str, r: &CitationRecord) -> String {
    let authors = (!r.authors.is_empty()).then(|| r.authors.join(" and "));
    let fields = [
        ("author", authors.as_deref()),
        ("title", r.title.as_deref()),
        ("journal", r.venue.as_deref()),
        ("year", r.year.as_deref()),
        ("volume", r.volume.as_deref()),
        ("number", r.number.as_deref()),
        ("pages", r.pages.as_deref()),
        ("month", r.month.as_deref()),
        ("publisher", r.publisher.as_deref()),
        ("address", r.address.as_deref()),
        ("doi", r.doi.as_deref()),
        ("isbn", r.isbn.as_deref()),
        ("issn", r.issn.as_deref()),
        ("url", r.url.as_deref()),
    ];
    let body: Vec<String> = fields
        .iter()
        .filter_map(|(name, v)| v.map(|v| format!("  {name} = {{{}}}", escape(v))))
        .collect();
    let mut out = String::new();
    let _ = write!(out, "@misc{{{key},\n{}\n}}\n", body.join(",\n"));
    out
}

/// Render a single record as an `@misc` entry.
pub fn to_bibtex(record: &CitationRecord) -> String {
    entry(&bibtex_key(record), record)
}

/// Renders entries while keeping keys unique: repeats get `-2`, `-3`, ...
#[derive(Debug, Default)]
pub struct BibtexWriter {
    seen: HashMap<String, usize>,
}

impl BibtexWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entry(&mut self, record: &CitationRecord) -> String {
        let base = bibtex_key(record);
        let n = self.seen.entry(base.clone()).or_insert(0);
        *n += 1;
        let key = if *n == 1 { base } else { format!("{base}-{n}") };
        entry(&key, record)
    }
}
