//! Aggregate statistics over detection output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::detect::DetectedComment;
use crate::extract::{normalize, NormalizedComment};
use crate::language::Language;

/// Labelled counts in a fixed bucket order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub buckets: Vec<(String, u64)>,
    pub total: u64,
}

impl Histogram {
    fn from_buckets(buckets: Vec<(String, u64)>) -> Self {
        let total = buckets.iter().map(|(_, c)| c).sum();
        Histogram { buckets, total }
    }

    pub fn get(&self, label: &str) -> u64 {
        self.buckets.iter().find(|(l, _)| l == label).map_or(0, |(_, c)| *c)
    }
}

/// Number of records per detected comment.
pub fn citations_per_comment(results: &[DetectedComment]) -> Histogram {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for r in results {
        *counts.entry(r.records.len()).or_default() += 1;
    }
    Histogram::from_buckets(counts.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// Lowercase, collapse whitespace and drop trailing punctuation.
pub fn normalize_title(title: &str) -> String {
    let collapsed = title.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    collapsed
        .trim_end_matches(|c: char| c.is_ascii_punctuation() || c.is_whitespace())
        .to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TitleCount {
    pub title: String,
    pub count: u64,
    pub by_language: BTreeMap<Language, u64>,
}

/// Titles counted once per record, kept when seen at least `min_count`
/// times; most frequent first, then alphabetical.
pub fn top_titles(results: &[DetectedComment], min_count: u64) -> Vec<TitleCount> {
    let mut counts: BTreeMap<String, BTreeMap<Language, u64>> = BTreeMap::new();
    for r in results {
        for rec in &r.records {
            if let Some(t) = rec.title.as_deref().map(normalize_title).filter(|t| !t.is_empty()) {
                *counts.entry(t).or_default().entry(r.lang).or_default() += 1;
            }
        }
    }
    let mut out: Vec<TitleCount> = counts
        .into_iter()
        .map(|(title, by_language)| TitleCount {
            count: by_language.values().sum(),
            title,
            by_language,
        })
        .filter(|t| t.count >= min_count.max(1))
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.title.cmp(&b.title)));
    out
}

/// Distinct publications (by normalized title) per venue. A title seen with
/// several venues is credited to the one it appears with most often.
pub fn venue_frequency(results: &[DetectedComment], min_count: u64) -> Vec<(String, u64)> {
    let mut seen: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for r in results {
        for rec in &r.records {
            let title = rec.title.as_deref().map(normalize_title).filter(|t| !t.is_empty());
            let venue = rec.venue.as_deref().map(normalize_title).filter(|v| !v.is_empty());
            if let (Some(t), Some(v)) = (title, venue) {
                *seen.entry(t).or_default().entry(v).or_default() += 1;
            }
        }
    }
    let mut per_venue: BTreeMap<String, u64> = BTreeMap::new();
    for venues in seen.into_values() {
        // BTreeMap iteration is alphabetical, so the first maximum wins ties
        let mut best: Option<(&String, u64)> = None;
        for (v, &c) in &venues {
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((v, c));
            }
        }
        if let Some((v, _)) = best {
            *per_venue.entry(v.clone()).or_default() += 1;
        }
    }
    let mut out: Vec<(String, u64)> = per_venue.into_iter().filter(|(_, c)| *c >= min_count.max(1)).collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

/// First four-digit run in a year field.
pub fn parse_year(field: &str) -> Option<u32> {
    let chars: Vec<char> = field.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_ascii_digit() {
            let j = (i..chars.len())
                .find(|&j| !chars[j].is_ascii_digit())
                .unwrap_or(chars.len());
            if j - i == 4 {
                return chars[i..j].iter().collect::<String>().parse().ok();
            }
            i = j;
        } else {
            i += 1;
        }
    }
    None
}

pub const EARLY_BUCKET: &str = "<1950";
pub const UNKNOWN_BUCKET: &str = "unknown";

/// Records per decade: `<1950`, then each decade seen, then `unknown`.
pub fn decade_histogram(results: &[DetectedComment]) -> Histogram {
    let (mut early, mut unknown) = (0, 0);
    let mut decades: BTreeMap<u32, u64> = BTreeMap::new();
    for rec in results.iter().flat_map(|r| &r.records) {
        match rec.year.as_deref().and_then(parse_year) {
            Some(y) if y < 1950 => early += 1,
            Some(y) => *decades.entry(y / 10 * 10).or_default() += 1,
            None => unknown += 1,
        }
    }
    let mut buckets = Vec::new();
    if early > 0 {
        buckets.push((EARLY_BUCKET.to_string(), early));
    }
    buckets.extend(decades.into_iter().map(|(d, c)| (d.to_string(), c)));
    if unknown > 0 {
        buckets.push((UNKNOWN_BUCKET.to_string(), unknown));
    }
    Histogram::from_buckets(buckets)
}

pub fn per_language_counts(results: &[DetectedComment]) -> BTreeMap<Language, u64> {
    let mut out = BTreeMap::new();
    for r in results {
        *out.entry(r.lang).or_default() += 1;
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    /// Matching comments counting every occurrence.
    pub total_matches: u64,
    pub distinct_matches: u64,
    pub variants: Vec<String>,
}

/// Case-insensitive search over comments, counting duplicates through their
/// occurrence counts.
pub fn search_title(corpus: &[NormalizedComment], query: &str) -> SearchResult {
    let needle = normalize(query).to_lowercase();
    if needle.is_empty() {
        return SearchResult::default();
    }
    let mut total = 0;
    let mut variants = BTreeSet::new();
    for c in corpus {
        if c.text.to_lowercase().contains(&needle) {
            total += c.occurrences as u64;
            variants.insert(c.text.clone());
        }
    }
    SearchResult {
        total_matches: total,
        distinct_matches: variants.len() as u64,
        variants: variants.into_iter().collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    Csv,
    #[default]
    Markdown,
    Json,
}

#[derive(Debug, thiserror::Error)]
#[error("unknown report format {0:?} (expected csv, md or json)")]
pub struct UnknownFormat(pub String);

impl FromStr for ReportFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            "json" => Ok(ReportFormat::Json),
            _ => Err(UnknownFormat(s.to_string())),
        }
    }
}

/// A titled table that renders to any report format.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Table {
    fn new(name: &str, headers: &[&str], rows: Vec<Vec<Value>>) -> Self {
        Table {
            name: name.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(cell)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "## {}\n\n| {} |\n|{}|\n",
            self.name,
            self.headers.join(" | "),
            "---|".repeat(self.headers.len())
        );
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| cell(v).replace('|', "\\|")).collect();
            let _ = writeln!(out, "| {} |", cells.join(" | "));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.headers.iter().cloned().zip(row.iter().cloned()).collect()))
            .collect();
        json!({ "name": self.name, "rows": rows })
    }
}

/// Render tables; CSV sections are separated by a blank line.
pub fn render(tables: &[Table], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => tables.iter().map(Table::to_csv).collect::<Vec<_>>().join("\n"),
        ReportFormat::Markdown => tables.iter().map(Table::to_markdown).collect::<Vec<_>>().join("\n"),
        ReportFormat::Json => {
            let v: Vec<Value> = tables.iter().map(Table::to_json).collect();
            let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
            s.push('\n');
            s
        }
    }
}

pub fn histogram_table(name: &str, key: &str, h: &Histogram) -> Table {
    let mut rows: Vec<Vec<Value>> = h.buckets.iter().map(|(l, c)| vec![json!(l), json!(c)]).collect();
    rows.push(vec![json!("total"), json!(h.total)]);
    Table::new(name, &[key, "count"], rows)
}

pub fn titles_table(titles: &[TitleCount]) -> Table {
    let mut headers = vec!["title", "count"];
    headers.extend(Language::ALL.iter().map(|l| l.name()));
    let rows = titles
        .iter()
        .map(|t| {
            let mut row = vec![json!(t.title), json!(t.count)];
            row.extend(
                Language::ALL
                    .iter()
                    .map(|l| json!(t.by_language.get(l).copied().unwrap_or(0))),
            );
            row
        })
        .collect();
    Table::new("Top titles", &headers, rows)
}

pub fn venues_table(venues: &[(String, u64)]) -> Table {
    let rows = venues.iter().map(|(v, c)| vec![json!(v), json!(c)]).collect();
    Table::new("Venues", &["venue", "publications"], rows)
}

pub fn languages_table(counts: &BTreeMap<Language, u64>) -> Table {
    let mut rows: Vec<Vec<Value>> = counts.iter().map(|(l, c)| vec![json!(l.name()), json!(c)]).collect();
    rows.push(vec![json!("total"), json!(counts.values().sum::<u64>())]);
    Table::new("Detections per language", &["language", "comments"], rows)
}

pub fn search_table(query: &str, r: &SearchResult) -> Table {
    let mut rows = vec![
        vec![json!("query"), json!(query)],
        vec![json!("total_matches"), json!(r.total_matches)],
        vec![json!("distinct_matches"), json!(r.distinct_matches)],
    ];
    rows.extend(r.variants.iter().map(|v| vec![json!("variant"), json!(v)]));
    Table::new("Search", &["field", "value"], rows)
}

/// Every report section over one set of detections.
pub fn full_report(results: &[DetectedComment], min_count: u64) -> Vec<Table> {
    vec![
        languages_table(&per_language_counts(results)),
        histogram_table("Citations per comment", "citations", &citations_per_comment(results)),
        titles_table(&top_titles(results, min_count)),
        venues_table(&venue_frequency(results, min_count)),
        histogram_table("Citations per decade", "decade", &decade_histogram(results)),
    ]
}
