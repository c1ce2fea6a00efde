//! Publication-entity recognition: tokenization, a deterministic rule tagger,
//! and a trainable averaged-perceptron BIO tagger.

mod lexicon;
mod merge;
mod model;
mod rules;
mod tokenize;

pub use lexicon::{LexiconError, Lexicons, LEXICON_FILES};
pub use merge::merge_spans;
pub use model::{train, ModelError, ModelMetadata, TaggerModel, TrainOptions, MODEL_FORMAT, MODEL_VERSION};
pub use rules::rule_tag;
pub use tokenize::{tokenize, Token, SPLIT_PUNCT};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The fourteen publication-related entity types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityType {
    Author,
    Title,
    Year,
    BooktitleOrJournal,
    Pages,
    Volume,
    Number,
    Month,
    Url,
    Publisher,
    Address,
    Doi,
    Isbn,
    Issn,
}

impl EntityType {
    pub const ALL: [EntityType; 14] = [
        EntityType::Author,
        EntityType::Title,
        EntityType::Year,
        EntityType::BooktitleOrJournal,
        EntityType::Pages,
        EntityType::Volume,
        EntityType::Number,
        EntityType::Month,
        EntityType::Url,
        EntityType::Publisher,
        EntityType::Address,
        EntityType::Doi,
        EntityType::Isbn,
        EntityType::Issn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Author => "author",
            EntityType::Title => "title",
            EntityType::Year => "year",
            EntityType::BooktitleOrJournal => "booktitle_or_journal",
            EntityType::Pages => "pages",
            EntityType::Volume => "volume",
            EntityType::Number => "number",
            EntityType::Month => "month",
            EntityType::Url => "url",
            EntityType::Publisher => "publisher",
            EntityType::Address => "address",
            EntityType::Doi => "doi",
            EntityType::Isbn => "isbn",
            EntityType::Issn => "issn",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown entity type {0:?}")]
pub struct UnknownEntityType(pub String);

impl FromStr for EntityType {
    type Err = UnknownEntityType;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase();
        let key = match key.as_str() {
            "venue" | "journal" | "booktitle" => "booktitle_or_journal",
            other => other,
        };
        EntityType::ALL
            .into_iter()
            .find(|t| t.as_str() == key)
            .ok_or_else(|| UnknownEntityType(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SpanSource {
    #[default]
    Model,
    Rule,
}

/// A typed span of a normalized comment, in Unicode scalar offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub etype: EntityType,
    #[serde(default, skip_serializing)]
    pub source: SpanSource,
}

impl EntitySpan {
    pub fn new(etype: EntityType, start: usize, end: usize, source: SpanSource) -> Self {
        debug_assert!(start < end);
        EntitySpan {
            start,
            end,
            etype,
            source,
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn overlap_len(&self, other: &EntitySpan) -> usize {
        self.end.min(other.end).saturating_sub(self.start.max(other.start))
    }

    /// The covered text, by character offsets.
    pub fn text<'a>(&self, text: &'a str) -> &'a str {
        char_slice(text, self.start, self.end)
    }
}

/// Slice `text` by Unicode scalar offsets, clamping to the text length.
pub fn char_slice(text: &str, start: usize, end: usize) -> &str {
    let mut idx = text.char_indices().map(|(i, _)| i).chain(std::iter::once(text.len()));
    let s = idx.nth(start).unwrap_or(text.len());
    let e = if end > start {
        idx.nth(end - start - 1).unwrap_or(text.len())
    } else {
        s
    };
    &text[s..e]
}

/// A normalized comment with gold entity spans and optional free-form labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedComment {
    pub text: String,
    #[serde(rename = "entities", default)]
    pub gold: Vec<EntitySpan>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

impl AnnotatedComment {
    pub fn new(text: impl Into<String>, gold: Vec<EntitySpan>) -> Self {
        AnnotatedComment {
            text: text.into(),
            gold,
            labels: BTreeMap::new(),
        }
    }

    /// Whether the gold annotation marks this comment as citing a publication.
    pub fn is_citation(&self) -> bool {
        !self.gold.is_empty()
    }
}

impl AsRef<str> for AnnotatedComment {
    fn as_ref(&self) -> &str {
        &self.text
    }
}
