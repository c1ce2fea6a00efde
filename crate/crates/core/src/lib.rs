//! Find and structure academic publication citations in source code comments.
//!
//! The pipeline runs in stages: walk repositories ([`corpus`]), pull and
//! normalize comments ([`extract`]), tag publication entities ([`ner`]),
//! decide which comments cite something ([`detect`]), and summarise the
//! result ([`report`]). [`dataset`] and [`eval`] cover training data and
//! scoring.
//!
//! ```
//! use codecite::detect::{detect, DetectionCriterion};
//! use codecite::ner::{rule_tag, Lexicons};
//!
//! let text = "Matsumoto, M. and Nishimura, T. (1998). Mersenne twister. ACM Trans. Model. Comput. Simul.";
//! let spans = rule_tag(text, &Lexicons::bundled());
//! let result = detect(text, &spans, &DetectionCriterion::default());
//! assert!(result.largest_gap <= 10);
//! ```

pub mod corpus;
pub mod dataset;
pub mod detect;
pub mod eval;
pub mod extract;
pub mod language;
pub mod ner;
pub mod report;

pub use detect::{detect, CitationRecord, DetectedComment, DetectionCriterion, DetectionResult};
pub use language::{classify_language, Language};
pub use ner::{AnnotatedComment, EntitySpan, EntityType, TaggerModel};

pub type Metrics = eval::Metrics<f64>;
pub type Metrics32 = eval::Metrics<f32>;
pub type SampleSpec = dataset::SampleSpec<f64>;
pub type SampleSpec32 = dataset::SampleSpec<f32>;
