//! Keyword grouping, sample sizing, seeded sampling and annotation files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::ner::AnnotatedComment;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("sample of {requested} requested from {available} items")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("confidence must lie strictly between 0 and 1")]
    BadConfidence,
    #[error("confidence interval must be positive")]
    BadInterval,
}

/// How comments that mention a keyword are split into group A (likely
/// citations) and group B (mail addresses, standards and similar noise).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordGroupConfig {
    #[serde(default)]
    pub keyword: String,
    #[serde(default, alias = "group_b_markers")]
    pub markers: Vec<String>,
    #[serde(default)]
    pub std_numbers: Vec<u32>,
    #[serde(default)]
    pub std_prefixes: Vec<String>,
}

impl KeywordGroupConfig {
    pub fn new(keyword: &str) -> Self {
        KeywordGroupConfig {
            keyword: keyword.to_lowercase(),
            markers: Vec::new(),
            std_numbers: Vec::new(),
            std_prefixes: Vec::new(),
        }
    }

    pub fn acm() -> Self {
        KeywordGroupConfig {
            markers: vec!["@acm.org".into()],
            ..Self::new("acm")
        }
    }

    pub fn ieee() -> Self {
        KeywordGroupConfig {
            markers: vec!["ieee.org".into(), "ieee std".into()],
            std_numbers: vec![488, 754, 802, 854, 1003, 1076, 1149, 1275, 1284, 1355, 1363],
            std_prefixes: vec!["ieee".into()],
            ..Self::new("ieee")
        }
    }

    /// Built-in settings for a keyword; unknown keywords get no markers.
    pub fn preset(keyword: &str) -> Self {
        match keyword.to_lowercase().as_str() {
            "acm" => Self::acm(),
            "ieee" => Self::ieee(),
            other => Self::new(other),
        }
    }

    pub fn matches_keyword(&self, text: &str) -> bool {
        text.to_lowercase().contains(&self.keyword.to_lowercase())
    }

    pub fn matcher(&self) -> GroupMatcher {
        let markers = self.markers.iter().map(|m| m.to_lowercase()).collect();
        let std = if self.std_numbers.is_empty() || self.std_prefixes.is_empty() {
            None
        } else {
            let prefixes: Vec<String> = self.std_prefixes.iter().map(|p| regex::escape(p)).collect();
            let numbers: Vec<String> = self.std_numbers.iter().map(u32::to_string).collect();
            let pattern = format!(r"(?i)\b(?:{})[ _-]?(?:{})\b", prefixes.join("|"), numbers.join("|"));
            Some(Regex::new(&pattern).expect("escaped prefixes form a valid pattern"))
        };
        GroupMatcher { markers, std }
    }
}

/// Compiled form of a [`KeywordGroupConfig`].
#[derive(Debug, Clone)]
pub struct GroupMatcher {
    markers: Vec<String>,
    std: Option<Regex>,
}

impl GroupMatcher {
    pub fn is_group_b(&self, text: &str) -> bool {
        let lower = text.to_lowercase();
        self.markers.iter().any(|m| lower.contains(m.as_str())) || self.std.as_ref().is_some_and(|re| re.is_match(text))
    }
}

/// Split comments into (group A, group B), keeping input order in each.
pub fn group_comments<T: AsRef<str> + Clone>(comments: &[T], config: &KeywordGroupConfig) -> (Vec<T>, Vec<T>) {
    let m = config.matcher();
    let (b, a): (Vec<T>, Vec<T>) = comments.iter().cloned().partition(|c| m.is_group_b(c.as_ref()));
    (a, b)
}

/// Parameters of the finite-population sample size formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec<T> {
    pub confidence: T,
    /// Half-width in percentage points.
    pub interval: T,
    pub z: T,
    pub p: T,
}

fn z_for(confidence: f64) -> f64 {
    const TABLE: [(f64, f64); 3] = [(0.90, 1.645), (0.95, 1.96), (0.99, 2.576)];
    for (c, z) in TABLE {
        if (confidence - c).abs() < 1e-12 {
            return z;
        }
    }
    Normal::standard().inverse_cdf(0.5 + confidence / 2.0)
}

impl<T: Float> SampleSpec<T> {
    pub fn new(confidence: T, interval: T) -> Result<Self, DatasetError> {
        if !(confidence > T::zero() && confidence < T::one()) {
            return Err(DatasetError::BadConfidence);
        }
        if interval.is_nan() || interval <= T::zero() {
            return Err(DatasetError::BadInterval);
        }
        let z = T::from(z_for(confidence.to_f64().unwrap_or(0.95))).unwrap_or_else(T::nan);
        Ok(SampleSpec {
            confidence,
            interval,
            z,
            p: T::from(0.5).unwrap(),
        })
    }
}

impl<T: Float> Default for SampleSpec<T> {
    fn default() -> Self {
        Self::new(T::from(0.95).unwrap(), T::from(5.0).unwrap()).expect("defaults are valid")
    }
}

/// Sample size for a finite population, rounded half up and capped at the
/// population.
pub fn sample_size<T: Float>(population: u64, spec: &SampleSpec<T>) -> u64 {
    if population == 0 {
        return 0;
    }
    let e = spec.interval / T::from(100).unwrap();
    let n0 = spec.z * spec.z * spec.p * (T::one() - spec.p) / (e * e);
    let pop = T::from(population).unwrap();
    let n = n0 / (T::one() + (n0 - T::one()) / pop);
    let rounded = (n + T::from(0.5).unwrap()).floor().to_u64().unwrap_or(population);
    rounded.min(population)
}

/// Uniform sample of `n` items without replacement, in input order.
pub fn draw_sample<T: Clone>(items: &[T], n: usize, seed: u64) -> Result<Vec<T>, DatasetError> {
    if n > items.len() {
        return Err(DatasetError::SampleTooLarge {
            requested: n,
            available: items.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, items.len(), n).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| items[i].clone()).collect())
}

#[derive(Debug, thiserror::Error)]
pub enum AnnotationError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: span {start}..{end} outside text of length {len}")]
    OffsetOutOfBounds {
        line: usize,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn read_annotations<R: BufRead>(r: R) -> Result<Vec<AnnotatedComment>, AnnotationError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let c: AnnotatedComment =
            serde_json::from_str(&line).map_err(|source| AnnotationError::Parse { line: line_no, source })?;
        let len = c.text.chars().count();
        if let Some(s) = c.gold.iter().find(|s| s.end > len || s.start >= s.end) {
            return Err(AnnotationError::OffsetOutOfBounds {
                line: line_no,
                start: s.start,
                end: s.end,
                len,
            });
        }
        out.push(c);
    }
    Ok(out)
}

pub fn write_annotations<W: Write>(mut w: W, comments: &[AnnotatedComment]) -> std::io::Result<()> {
    for c in comments {
        serde_json::to_writer(&mut w, c)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn load_annotations(path: &Path) -> Result<Vec<AnnotatedComment>, AnnotationError> {
    read_annotations(BufReader::new(File::open(path)?))
}

pub fn save_annotations(comments: &[AnnotatedComment], path: &Path) -> std::io::Result<()> {
    write_annotations(BufWriter::new(File::create(path)?), comments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ner::{EntitySpan, EntityType, SpanSource};

    #[test]
    fn grouping_examples() {
        let input = vec!["mail john@acm.org for details", "Proc. ACM SIGCOMM 1997, pp. 1-12"];
        let (a, b) = group_comments(&input, &KeywordGroupConfig::acm());
        assert_eq!(a, ["Proc. ACM SIGCOMM 1997, pp. 1-12"]);
        assert_eq!(b, ["mail john@acm.org for details"]);

        let ieee = KeywordGroupConfig::ieee();
        let m = ieee.matcher();
        for t in [
            "IEEE 754 double precision rounding",
            "ieee-754",
            "IEEE_1003.1",
            "see www.IEEE.org",
            "IEEE Std 1076",
        ] {
            assert!(m.is_group_b(t), "{t}");
        }
        for t in ["IEEE 7540", "IEEE Trans. Inf. Theory 1999", "IEEE 2001"] {
            assert!(!m.is_group_b(t), "{t}");
        }
        assert!(ieee.matches_keyword("an Ieee paper"));
    }

    #[test]
    fn config_from_toml_shape() {
        let c: KeywordGroupConfig = serde_json::from_str(r#"{"markers":["x"],"std_numbers":[1]}"#).unwrap();
        assert_eq!(c.markers, ["x"]);
        assert!(c.std_prefixes.is_empty());
        assert_eq!(KeywordGroupConfig::preset("Other").keyword, "other");
    }

    /// Evaluate the formula directly in f64 as an independent check.
    fn oracle(n: f64) -> f64 {
        let n0 = 1.96f64.powi(2) * 0.25 / 0.0025;
        n0 / (1.0 + (n0 - 1.0) / n)
    }

    #[test]
    fn sample_sizes() {
        let spec = SampleSpec::<f64>::default();
        for (pop, want) in [(4372, 353), (7656, 366), (1149, 288), (9026, 369), (11724, 372), (1, 1)] {
            assert_eq!(sample_size(pop, &spec), want, "population {pop}");
            assert_eq!(
                sample_size(pop, &SampleSpec::<f32>::default()),
                want,
                "f32 population {pop}"
            );
        }
        assert!((oracle(4372.0) - 353.2).abs() < 0.05);
        assert_eq!(sample_size(10_000_000, &spec), 384);
        assert_eq!(sample_size(u64::MAX / 2, &spec), 384);
        assert_eq!(sample_size(0, &spec), 0);
    }

    #[test]
    fn sample_size_monotone() {
        let spec = SampleSpec::<f64>::default();
        let mut last = 0;
        for pop in 1..20_000 {
            let n = sample_size(pop, &spec);
            assert!(n >= last);
            last = n;
        }
    }

    #[test]
    fn spec_validation() {
        assert!(SampleSpec::new(1.0, 5.0).is_err());
        assert!(SampleSpec::new(0.95, 0.0).is_err());
        let s = SampleSpec::new(0.8, 5.0).unwrap();
        assert!((s.z - 1.2816).abs() < 1e-3);
    }

    #[test]
    fn sampling() {
        let items: Vec<u32> = (0..50).collect();
        assert_eq!(draw_sample(&items, 50, 1).unwrap(), items);
        let a = draw_sample(&items, 10, 9).unwrap();
        assert_eq!(a, draw_sample(&items, 10, 9).unwrap());
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(
            draw_sample(&items, 51, 0),
            Err(DatasetError::SampleTooLarge {
                requested: 51,
                available: 50
            })
        ));
    }

    fn gold() -> AnnotatedComment {
        let mut c = AnnotatedComment::new(
            "Smith (1999)",
            vec![EntitySpan::new(EntityType::Author, 0, 5, SpanSource::Model)],
        );
        c.labels.insert("paper_type".into(), "journal".into());
        c
    }

    #[test]
    fn annotation_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.jsonl");
        let items = vec![gold(), AnnotatedComment::new("plain", vec![])];
        save_annotations(&items, &path).unwrap();
        assert_eq!(load_annotations(&path).unwrap(), items);
    }

    #[test]
    fn annotation_errors() {
        let bad = "{\"text\":\"ok\",\"entities\":[]}\n{\"text\":\"abc\",\"entities\":[{\"start\":0,\"end\":9,\"type\":\"year\"}]}\n";
        match read_annotations(bad.as_bytes()) {
            Err(AnnotationError::OffsetOutOfBounds {
                line: 2,
                end: 9,
                len: 3,
                ..
            }) => {}
            other => panic!("{other:?}"),
        }
        match read_annotations("\n{oops".as_bytes()) {
            Err(AnnotationError::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
