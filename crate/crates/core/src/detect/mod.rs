//! The detection criterion, citation segmentation and record assembly.

mod baseline;
mod bibtex;

pub use baseline::baseline_detect;
pub use bibtex::{bibtex_key, to_bibtex, BibtexWriter};

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::extract::JsonlError;
use crate::language::Language;
use crate::ner::{EntitySpan, EntityType, TaggerModel};

pub const DEFAULT_MAX_GAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DetectError {
    #[error("no entity spans to measure")]
    EmptySpans,
    #[error("criterion needs at least one required entity type")]
    NoRequiredTypes,
}

/// Required entity types plus the largest allowed gap between spans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionCriterion {
    required_types: BTreeSet<EntityType>,
    max_gap: usize,
}

impl Default for DetectionCriterion {
    fn default() -> Self {
        DetectionCriterion {
            required_types: [
                EntityType::Author,
                EntityType::Title,
                EntityType::Year,
                EntityType::BooktitleOrJournal,
            ]
            .into(),
            max_gap: DEFAULT_MAX_GAP,
        }
    }
}

impl DetectionCriterion {
    pub fn new(required_types: impl IntoIterator<Item = EntityType>, max_gap: usize) -> Result<Self, DetectError> {
        let required_types: BTreeSet<_> = required_types.into_iter().collect();
        if required_types.is_empty() {
            return Err(DetectError::NoRequiredTypes);
        }
        Ok(DetectionCriterion {
            required_types,
            max_gap,
        })
    }

    pub fn required_types(&self) -> &BTreeSet<EntityType> {
        &self.required_types
    }

    pub fn max_gap(&self) -> usize {
        self.max_gap
    }

    pub fn with_max_gap(mut self, max_gap: usize) -> Self {
        self.max_gap = max_gap;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionReason {
    Ok,
    MissingTypes,
    GapExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetectionResult {
    pub detected: bool,
    pub records: Vec<CitationRecord>,
    pub largest_gap: usize,
    pub reason: DetectionReason,
}

/// Largest character distance between consecutive spans once sorted by start.
/// Overlapping neighbours count as distance zero.
pub fn largest_gap(spans: &[EntitySpan]) -> Result<usize, DetectError> {
    if spans.is_empty() {
        return Err(DetectError::EmptySpans);
    }
    let mut sorted = spans.to_vec();
    sorted.sort();
    Ok(sorted
        .windows(2)
        .map(|w| w[1].start.saturating_sub(w[0].end))
        .max()
        .unwrap_or(0))
}

pub fn detect(text: &str, spans: &[EntitySpan], criterion: &DetectionCriterion) -> DetectionResult {
    let present: BTreeSet<EntityType> = spans.iter().map(|s| s.etype).collect();
    let gap = largest_gap(spans).unwrap_or(0);
    let reason = if !criterion.required_types.is_subset(&present) {
        DetectionReason::MissingTypes
    } else if gap > criterion.max_gap {
        DetectionReason::GapExceeded
    } else {
        DetectionReason::Ok
    };
    let detected = reason == DetectionReason::Ok;
    DetectionResult {
        detected,
        records: if detected {
            segment_citations(spans, text)
        } else {
            Vec::new()
        },
        largest_gap: gap,
        reason,
    }
}

/// Tag `text` with the model plus rules, then apply the criterion.
pub fn detect_with_model(model: &TaggerModel, text: &str, criterion: &DetectionCriterion) -> DetectionResult {
    detect(text, &model.tag_with_rules(text), criterion)
}

/// One assembled citation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationRecord {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub authors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub venue: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub number: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pages: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub month: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub publisher: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub address: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isbn: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub issn: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    /// Character range covering every member span.
    pub span: (usize, usize),
    /// Entity spans the record was built from; not serialized.
    #[serde(skip)]
    pub members: Vec<EntitySpan>,
}

impl CitationRecord {
    fn from_spans(members: Vec<EntitySpan>, text: &str) -> Self {
        let mut r = CitationRecord {
            span: (
                members.iter().map(|s| s.start).min().unwrap_or(0),
                members.iter().map(|s| s.end).max().unwrap_or(0),
            ),
            ..Default::default()
        };
        for s in &members {
            let value = s.text(text).trim().to_string();
            let slot = match s.etype {
                EntityType::Author => {
                    r.authors.push(value);
                    continue;
                }
                EntityType::Title => &mut r.title,
                EntityType::BooktitleOrJournal => &mut r.venue,
                EntityType::Year => &mut r.year,
                EntityType::Volume => &mut r.volume,
                EntityType::Number => &mut r.number,
                EntityType::Pages => &mut r.pages,
                EntityType::Month => &mut r.month,
                EntityType::Publisher => &mut r.publisher,
                EntityType::Address => &mut r.address,
                EntityType::Doi => &mut r.doi,
                EntityType::Isbn => &mut r.isbn,
                EntityType::Issn => &mut r.issn,
                EntityType::Url => &mut r.url,
            };
            slot.get_or_insert(value);
        }
        r.members = members;
        r
    }

    pub fn field(&self, etype: EntityType) -> Option<&str> {
        match etype {
            EntityType::Author => self.authors.first().map(String::as_str),
            EntityType::Title => self.title.as_deref(),
            EntityType::BooktitleOrJournal => self.venue.as_deref(),
            EntityType::Year => self.year.as_deref(),
            EntityType::Volume => self.volume.as_deref(),
            EntityType::Number => self.number.as_deref(),
            EntityType::Pages => self.pages.as_deref(),
            EntityType::Month => self.month.as_deref(),
            EntityType::Publisher => self.publisher.as_deref(),
            EntityType::Address => self.address.as_deref(),
            EntityType::Doi => self.doi.as_deref(),
            EntityType::Isbn => self.isbn.as_deref(),
            EntityType::Issn => self.issn.as_deref(),
            EntityType::Url => self.url.as_deref(),
        }
    }
}

/// Split a comment's spans into citation records.
///
/// A non-author type already present in the current record starts a new one.
/// Authors seen after the current record's last non-author span move with the
/// new record, since author lists precede the rest of a reference. A final
/// record with fewer than two distinct types is folded into the previous one.
pub fn segment_citations(spans: &[EntitySpan], text: &str) -> Vec<CitationRecord> {
    let mut sorted = spans.to_vec();
    sorted.sort();
    let mut groups: Vec<Vec<EntitySpan>> = Vec::new();
    let mut current: Vec<EntitySpan> = Vec::new();
    for span in sorted {
        let repeats = span.etype != EntityType::Author && current.iter().any(|s| s.etype == span.etype);
        if repeats {
            let split = current
                .iter()
                .rposition(|s| s.etype != EntityType::Author)
                .map_or(0, |i| i + 1);
            let carried = current.split_off(split);
            groups.push(std::mem::replace(&mut current, carried));
        }
        current.push(span);
    }
    if !current.is_empty() {
        let distinct: BTreeSet<_> = current.iter().map(|s| s.etype).collect();
        match groups.last_mut() {
            Some(prev) if distinct.len() < 2 => prev.extend(current),
            _ => groups.push(current),
        }
    }
    groups
        .into_iter()
        .map(|g| CitationRecord::from_spans(g, text))
        .collect()
}

/// One line of detection output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectedComment {
    pub lang: Language,
    pub text: String,
    pub largest_gap: usize,
    pub records: Vec<CitationRecord>,
}

pub fn write_detections_jsonl<W: Write>(mut w: W, items: &[DetectedComment]) -> std::io::Result<()> {
    for d in items {
        serde_json::to_writer(&mut w, d)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn read_detections_jsonl<R: BufRead>(r: R) -> Result<Vec<DetectedComment>, JsonlError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| JsonlError::Parse { line: i + 1, source })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ner::SpanSource;
    use proptest::prelude::*;

    fn sp(t: EntityType, s: usize, e: usize) -> EntitySpan {
        EntitySpan::new(t, s, e, SpanSource::Model)
    }

    /// O(n^3) check: a pair is consecutive when no third start lies between.
    fn gap_oracle(spans: &[(usize, usize)]) -> usize {
        let mut best = 0;
        for a in spans {
            for b in spans {
                let consecutive = a.0 < b.0 && !spans.iter().any(|c| a.0 < c.0 && c.0 < b.0);
                if consecutive {
                    best = best.max(b.0.saturating_sub(a.1));
                }
            }
        }
        best
    }

    #[test]
    fn gap_examples() {
        let a = EntityType::Author;
        assert_eq!(largest_gap(&[sp(a, 0, 5)]), Ok(0));
        assert_eq!(largest_gap(&[sp(a, 20, 22), sp(a, 0, 5), sp(a, 7, 9)]), Ok(11));
        assert_eq!(largest_gap(&[sp(a, 0, 5), sp(a, 5, 8)]), Ok(0));
        assert_eq!(largest_gap(&[]), Err(DetectError::EmptySpans));
    }

    proptest! {
        #[test]
        fn gap_matches_oracle(raw in prop::collection::vec((0usize..200, 1usize..20), 1..12)) {
            // lay spans out left to right without overlap
            let mut pos = 0;
            let mut ranges = Vec::new();
            for (gap, len) in raw {
                ranges.push((pos + gap, pos + gap + len));
                pos += gap + len;
            }
            let spans: Vec<_> = ranges.iter().rev().map(|&(s, e)| sp(EntityType::Year, s, e)).collect();
            prop_assert_eq!(largest_gap(&spans).unwrap(), gap_oracle(&ranges));
        }
    }

    fn crystal_reference() -> (String, Vec<EntitySpan>) {
        let text = "TYPE-I Lorentzian, Becker , P. J. & Coppens, P. ( 1974 ). Acta Cryst . A30 , 129 ;";
        let find = |s: &str| {
            let b = text.find(s).unwrap();
            (text[..b].chars().count(), text[..b].chars().count() + s.chars().count())
        };
        let mk = |t, s: &str| {
            let (a, b) = find(s);
            sp(t, a, b)
        };
        let spans = vec![
            mk(EntityType::Author, "Becker , P. J."),
            mk(EntityType::Author, "Coppens, P."),
            mk(EntityType::Year, "1974"),
            mk(EntityType::Title, "Acta Cryst"),
            mk(EntityType::BooktitleOrJournal, "A30"),
            mk(EntityType::Volume, "129"),
        ];
        (text.to_string(), spans)
    }

    #[test]
    fn crystal_reference_spans_detected() {
        let (text, spans) = crystal_reference();
        let r = detect(&text, &spans, &DetectionCriterion::default());
        assert_eq!(r.reason, DetectionReason::Ok);
        assert!(r.detected);
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.records[0].authors, ["Becker , P. J.", "Coppens, P."]);
        assert_eq!(r.records[0].volume.as_deref(), Some("129"));
    }

    #[test]
    fn missing_and_gap() {
        let only_year = [sp(EntityType::Year, 0, 4)];
        let r = detect("1999", &only_year, &DetectionCriterion::default());
        assert_eq!(r.reason, DetectionReason::MissingTypes);
        assert!(!r.detected && r.records.is_empty());

        let spread = [
            sp(EntityType::Author, 0, 5),
            sp(EntityType::Title, 6, 10),
            sp(EntityType::Year, 50, 54),
            sp(EntityType::BooktitleOrJournal, 55, 58),
        ];
        let r = detect(&"x".repeat(60), &spread, &DetectionCriterion::default());
        assert_eq!(r.largest_gap, 40);
        assert_eq!(r.reason, DetectionReason::GapExceeded);
        let r = detect(
            &"x".repeat(60),
            &spread,
            &DetectionCriterion::default().with_max_gap(40),
        );
        assert!(r.detected);
        assert!(detect("", &[], &DetectionCriterion::default()).reason == DetectionReason::MissingTypes);
    }

    #[test]
    fn criterion_validation() {
        assert_eq!(DetectionCriterion::new([], 3), Err(DetectError::NoRequiredTypes));
        assert_eq!(DetectionCriterion::default().required_types().len(), 4);
    }

    fn seq(types: &[EntityType]) -> Vec<EntitySpan> {
        types
            .iter()
            .enumerate()
            .map(|(i, &t)| sp(t, i * 4, i * 4 + 3))
            .collect()
    }

    #[test]
    fn segmentation() {
        use EntityType::*;
        let text = "x".repeat(200);
        assert_eq!(
            segment_citations(&seq(&[Author, Title, Year, BooktitleOrJournal]), &text).len(),
            1
        );
        let two = segment_citations(
            &seq(&[
                Author,
                Title,
                Year,
                BooktitleOrJournal,
                Author,
                Title,
                Year,
                BooktitleOrJournal,
            ]),
            &text,
        );
        assert_eq!(two.len(), 2);
        assert_eq!(two[0].authors.len(), 1);
        assert_eq!(two[1].authors.len(), 1);
        assert_eq!(two[1].span.0, 16);

        let mut six = Vec::new();
        for _ in 0..6 {
            six.extend([Author, Author, Title, Year, BooktitleOrJournal, Pages]);
        }
        assert_eq!(segment_citations(&seq(&six), &text).len(), 6);

        // a lone trailing year joins the previous record
        let r = segment_citations(&seq(&[Author, Title, Year, Year]), &text);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].members.len(), 4);
        assert!(segment_citations(&[], &text).is_empty());
    }

    proptest! {
        #[test]
        fn segmentation_conserves_spans(idx in prop::collection::vec(0usize..14, 0..40)) {
            let types: Vec<_> = idx.iter().map(|&i| EntityType::ALL[i]).collect();
            let spans = seq(&types);
            let records = segment_citations(&spans, &"x".repeat(200));
            let mut members: Vec<_> = records.iter().flat_map(|r| r.members.to_vec()).collect();
            members.sort();
            prop_assert_eq!(members, spans);
            for r in &records {
                prop_assert!(r.members.iter().all(|m| r.span.0 <= m.start && m.end <= r.span.1));
            }
        }

        #[test]
        fn dropping_a_required_type_never_detects(drop in 0usize..4, gap in 0usize..30) {
            let (text, spans) = crystal_reference();
            let gone = *DetectionCriterion::default().required_types().iter().nth(drop).unwrap();
            let kept: Vec<_> = spans.into_iter().filter(|s| s.etype != gone).collect();
            let r = detect(&text, &kept, &DetectionCriterion::default().with_max_gap(gap));
            prop_assert!(!r.detected);
        }
    }
}
