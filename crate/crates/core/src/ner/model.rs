//! Averaged-perceptron BIO tagger.
//!
//! Weights are integers while training so runs are reproducible bit for bit;
//! averaging happens once at the end. Decoding is greedy left to right with
//! the previous predicted label as a feature.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::lexicon::Lexicons;
use super::rules::rule_tag;
use super::tokenize::{tokenize, Token};
use super::{AnnotatedComment, EntitySpan, EntityType, SpanSource};

pub const MODEL_FORMAT: &str = "codecite-tagger";
pub const MODEL_VERSION: u32 = 1;

const N_LABELS: usize = 1 + 2 * EntityType::ALL.len();

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("training corpus has no entity labels")]
    DegenerateCorpus,
    #[error("not a tagger model (format {0:?})")]
    UnknownFormat(String),
    #[error("unsupported model version {0}")]
    UnsupportedVersion(u32),
    #[error("model label set does not match this build")]
    LabelMismatch,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    O,
    B(EntityType),
    I(EntityType),
}

impl Label {
    fn index(self) -> usize {
        match self {
            Label::O => 0,
            Label::B(t) => 1 + 2 * t.index(),
            Label::I(t) => 2 + 2 * t.index(),
        }
    }

    fn from_index(i: usize) -> Label {
        if i == 0 {
            return Label::O;
        }
        let t = EntityType::ALL[(i - 1) / 2];
        if (i - 1).is_multiple_of(2) {
            Label::B(t)
        } else {
            Label::I(t)
        }
    }

    fn name(self) -> String {
        match self {
            Label::O => "O".to_string(),
            Label::B(t) => format!("B-{t}"),
            Label::I(t) => format!("I-{t}"),
        }
    }
}

fn label_names() -> Vec<String> {
    (0..N_LABELS).map(|i| Label::from_index(i).name()).collect()
}

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub epochs: usize,
    pub seed: u64,
    pub lexicons: Lexicons,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            epochs: 20,
            seed: 42,
            lexicons: Lexicons::bundled(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub epochs: usize,
    pub seed: u64,
    /// SHA-256 of the training corpus in annotation-file form.
    pub corpus_hash: String,
    pub examples: usize,
    pub tokens: usize,
}

/// A trained tagger. Immutable once built.
#[derive(Debug, Clone)]
pub struct TaggerModel {
    weights: HashMap<String, Vec<f64>>,
    metadata: ModelMetadata,
    lexicons: Lexicons,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    labels: Vec<String>,
    metadata: ModelMetadata,
    lexicons: Lexicons,
    /// feature -> sparse (label index, weight) pairs
    weights: BTreeMap<String, Vec<(u16, f64)>>,
}

/// Per-comment feature context independent of the label history.
struct Sentence {
    tokens: Vec<Token>,
    /// Static feature strings per token.
    feats: Vec<Vec<String>>,
    shapes: Vec<String>,
}

fn shape(word: &str) -> String {
    let mut out = String::new();
    let mut last = None;
    for c in word.chars() {
        let k = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_ascii_digit() {
            'd'
        } else {
            c
        };
        if last != Some(k) {
            out.push(k);
        }
        last = Some(k);
    }
    out
}

fn case_pattern(word: &str) -> &'static str {
    let letters: Vec<char> = word.chars().filter(|c| c.is_alphabetic()).collect();
    if letters.is_empty() {
        return if word.chars().any(|c| c.is_ascii_digit()) {
            "digit"
        } else {
            "punct"
        };
    }
    if letters.iter().all(|c| c.is_uppercase()) {
        "upper"
    } else if letters.iter().all(|c| c.is_lowercase()) {
        "lower"
    } else if letters[0].is_uppercase() && letters[1..].iter().all(|c| c.is_lowercase()) {
        "title"
    } else {
        "mixed"
    }
}

fn digit_pattern(word: &str) -> String {
    let digits = word.chars().filter(|c| c.is_ascii_digit()).count();
    if digits == 0 {
        return "none".into();
    }
    if digits == word.chars().count() {
        return format!("{digits}d");
    }
    if word.contains('-')
        && word
            .split('-')
            .all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_digit()))
    {
        return "range".into();
    }
    "some".into()
}

fn prefix(word: &str, n: usize) -> String {
    word.chars().take(n).collect()
}

fn suffix(word: &str, n: usize) -> String {
    let v: Vec<char> = word.chars().collect();
    v[v.len().saturating_sub(n)..].iter().collect()
}

/// Mark token positions covered by spans with B-/I- tags.
fn token_tags(tokens: &[Token], spans: &[(EntitySpan, &'static str)]) -> Vec<Option<String>> {
    let mut tags = vec![None; tokens.len()];
    for (span, prefix) in spans {
        let mut first = true;
        for (i, t) in tokens.iter().enumerate() {
            if t.start >= span.start && t.end <= span.end && tags[i].is_none() {
                tags[i] = Some(format!("{prefix}{}-{}", if first { 'B' } else { 'I' }, span.etype));
                first = false;
            }
        }
    }
    tags
}

fn lexicon_tags(tokens: &[Token], lex: &Lexicons) -> Vec<Vec<&'static str>> {
    let mut tags: Vec<Vec<&'static str>> = vec![Vec::new(); tokens.len()];
    for (set, b, inner) in [(&lex.venues, "venue-B", "venue-I"), (&lex.publishers, "pub-B", "pub-I")] {
        for i in 0..tokens.len() {
            if let Some(hi) = set.longest_match(tokens, i) {
                tags[i].push(b);
                for t in &mut tags[i + 1..hi] {
                    t.push(inner);
                }
            }
        }
    }
    for (i, t) in tokens.iter().enumerate() {
        if lex.is_month(&t.text) {
            tags[i].push("month");
        }
    }
    tags
}

impl Sentence {
    fn new(text: &str, lex: &Lexicons) -> Sentence {
        let tokens = tokenize(text);
        let rule_spans: Vec<(EntitySpan, &'static str)> = rule_tag(text, lex).into_iter().map(|s| (s, "")).collect();
        let rules = token_tags(&tokens, &rule_spans);
        let lexf = lexicon_tags(&tokens, lex);
        let lower: Vec<String> = tokens.iter().map(|t| t.text.to_lowercase()).collect();
        let shapes: Vec<String> = tokens.iter().map(|t| shape(&t.text)).collect();
        let word_at = |i: isize| -> &str {
            if i < 0 {
                "<s>"
            } else {
                lower.get(i as usize).map_or("</s>", String::as_str)
            }
        };
        let shape_at = |i: isize| -> &str {
            if i < 0 {
                "<s>"
            } else {
                shapes.get(i as usize).map_or("</s>", String::as_str)
            }
        };
        let mut feats = Vec::with_capacity(tokens.len());
        for (i, tok) in tokens.iter().enumerate() {
            let w = &lower[i];
            let ii = i as isize;
            let mut f = vec![
                "bias".to_string(),
                format!("w={w}"),
                format!("shape={}", shapes[i]),
                format!("case={}", case_pattern(&tok.text)),
                format!("digits={}", digit_pattern(&tok.text)),
                format!("p3={}", prefix(w, 3)),
                format!("p4={}", prefix(w, 4)),
                format!("s3={}", suffix(w, 3)),
                format!("s4={}", suffix(w, 4)),
                format!("w-1={}", word_at(ii - 1)),
                format!("w-2={}", word_at(ii - 2)),
                format!("w+1={}", word_at(ii + 1)),
                format!("w+2={}", word_at(ii + 2)),
                format!("shape-1={}", shape_at(ii - 1)),
                format!("shape+1={}", shape_at(ii + 1)),
                format!("shape-1|0={}|{}", shape_at(ii - 1), shapes[i]),
                format!("rule={}", rules[i].as_deref().unwrap_or("O")),
                format!(
                    "rule-1={}",
                    if i == 0 {
                        "<s>"
                    } else {
                        rules[i - 1].as_deref().unwrap_or("O")
                    }
                ),
                format!(
                    "rule+1={}",
                    rules.get(i + 1).map_or("</s>", |r| r.as_deref().unwrap_or("O"))
                ),
            ];
            for l in &lexf[i] {
                f.push(format!("lex={l}"));
            }
            feats.push(f);
        }
        Sentence { tokens, feats, shapes }
    }

    fn dynamic(&self, i: usize, prev: Label) -> [String; 2] {
        let p = prev.name();
        [format!("pl={p}"), format!("pl|shape={p}|{}", self.shapes[i])]
    }
}

/// Gold labels per token; spans not on token boundaries are widened to them.
fn gold_labels(tokens: &[Token], gold: &[EntitySpan], text: &str) -> Vec<Label> {
    let mut labels = vec![Label::O; tokens.len()];
    let mut sorted = gold.to_vec();
    sorted.sort();
    for span in sorted {
        let covered: Vec<usize> = (0..tokens.len())
            .filter(|&i| tokens[i].start < span.end && span.start < tokens[i].end)
            .collect();
        let (Some(&first), Some(&last)) = (covered.first(), covered.last()) else {
            log::warn!("gold span {}..{} covers no token in {:?}", span.start, span.end, text);
            continue;
        };
        if tokens[first].start != span.start || tokens[last].end != span.end {
            log::debug!(
                "gold span {}..{} snapped to {}..{}",
                span.start,
                span.end,
                tokens[first].start,
                tokens[last].end
            );
        }
        if covered.iter().any(|&i| labels[i] != Label::O) {
            log::warn!("overlapping gold span {}..{} skipped", span.start, span.end);
            continue;
        }
        for (k, &i) in covered.iter().enumerate() {
            labels[i] = if k == 0 {
                Label::B(span.etype)
            } else {
                Label::I(span.etype)
            };
        }
    }
    labels
}

/// Hash of a corpus in its annotation-file serialization.
pub fn corpus_hash(corpus: &[AnnotatedComment]) -> String {
    let mut h = Sha256::new();
    for c in corpus {
        h.update(serde_json::to_vec(c).expect("annotated comments serialize"));
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

struct Trainer {
    index: HashMap<String, usize>,
    weights: Vec<i64>,
    totals: Vec<i64>,
    stamps: Vec<u64>,
    clock: u64,
}

impl Trainer {
    fn feature_id(&mut self, f: &str) -> usize {
        if let Some(&id) = self.index.get(f) {
            return id;
        }
        let id = self.index.len();
        self.index.insert(f.to_string(), id);
        self.weights.extend([0; N_LABELS]);
        self.totals.extend([0; N_LABELS]);
        self.stamps.extend([0; N_LABELS]);
        id
    }

    fn predict(&self, ids: &[usize]) -> usize {
        let mut scores = [0i64; N_LABELS];
        for &id in ids {
            let row = &self.weights[id * N_LABELS..(id + 1) * N_LABELS];
            for (s, w) in scores.iter_mut().zip(row) {
                *s += w;
            }
        }
        argmax(scores.iter().copied())
    }

    fn bump(&mut self, slot: usize, delta: i64) {
        self.totals[slot] += (self.clock - self.stamps[slot]) as i64 * self.weights[slot];
        self.stamps[slot] = self.clock;
        self.weights[slot] += delta;
    }

    fn update(&mut self, ids: &[usize], truth: usize, guess: usize) {
        self.clock += 1;
        if truth == guess {
            return;
        }
        for &id in ids {
            self.bump(id * N_LABELS + truth, 1);
            self.bump(id * N_LABELS + guess, -1);
        }
    }

    fn averaged(mut self) -> HashMap<String, Vec<f64>> {
        let clock = self.clock.max(1);
        let mut out = HashMap::with_capacity(self.index.len());
        for (name, id) in std::mem::take(&mut self.index) {
            let mut row = vec![0.0; N_LABELS];
            let mut any = false;
            for (l, slot) in row.iter_mut().enumerate() {
                let s = id * N_LABELS + l;
                let total = self.totals[s] + (clock - self.stamps[s]) as i64 * self.weights[s];
                if total != 0 {
                    *slot = total as f64 / clock as f64;
                    any = true;
                }
            }
            if any {
                out.insert(name, row);
            }
        }
        out
    }
}

fn argmax<T: PartialOrd + Copy>(scores: impl Iterator<Item = T>) -> usize {
    let mut best_i = 0;
    let mut best: Option<T> = None;
    for (i, s) in scores.enumerate() {
        if best.is_none_or(|b| s > b) {
            best = Some(s);
            best_i = i;
        }
    }
    best_i
}

/// Train a tagger for `options.epochs` passes, shuffling the corpus each pass
/// with a generator seeded from `options.seed`.
pub fn train(corpus: &[AnnotatedComment], options: &TrainOptions) -> Result<TaggerModel, ModelError> {
    if corpus.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    let lex = &options.lexicons;
    let sentences: Vec<(Sentence, Vec<Label>)> = corpus
        .iter()
        .map(|c| {
            let s = Sentence::new(&c.text, lex);
            let labels = gold_labels(&s.tokens, &c.gold, &c.text);
            (s, labels)
        })
        .collect();
    if sentences.iter().all(|(_, l)| l.iter().all(|&x| x == Label::O)) {
        return Err(ModelError::DegenerateCorpus);
    }
    let mut trainer = Trainer {
        index: HashMap::new(),
        weights: Vec::new(),
        totals: Vec::new(),
        stamps: Vec::new(),
        clock: 0,
    };
    let static_ids: Vec<Vec<Vec<usize>>> = sentences
        .iter()
        .map(|(s, _)| {
            s.feats
                .iter()
                .map(|fs| fs.iter().map(|f| trainer.feature_id(f)).collect())
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    for _ in 0..options.epochs {
        order.shuffle(&mut rng);
        for &si in &order {
            let (sentence, gold) = &sentences[si];
            let mut prev = Label::O;
            for (i, truth) in gold.iter().enumerate() {
                let mut ids = static_ids[si][i].clone();
                for f in sentence.dynamic(i, prev) {
                    ids.push(trainer.feature_id(&f));
                }
                let guess = trainer.predict(&ids);
                trainer.update(&ids, truth.index(), guess);
                prev = Label::from_index(guess);
            }
        }
    }
    let tokens = sentences.iter().map(|(s, _)| s.tokens.len()).sum();
    Ok(TaggerModel {
        weights: trainer.averaged(),
        metadata: ModelMetadata {
            epochs: options.epochs,
            seed: options.seed,
            corpus_hash: corpus_hash(corpus),
            examples: corpus.len(),
            tokens,
        },
        lexicons: lex.clone(),
    })
}

/// Turn a label sequence into spans, repairing `I-X` that follows `O` or a
/// different type into `B-X`.
fn decode_spans(tokens: &[Token], labels: &[Label]) -> Vec<EntitySpan> {
    let mut spans = Vec::new();
    let mut open: Option<(EntityType, usize, usize)> = None;
    for (tok, &label) in tokens.iter().zip(labels) {
        let label = match (label, open) {
            (Label::I(t), Some((ot, _, _))) if ot == t => Label::I(t),
            (Label::I(t), _) => Label::B(t),
            (l, _) => l,
        };
        match label {
            Label::O => {
                if let Some((t, s, e)) = open.take() {
                    spans.push(EntitySpan::new(t, s, e, SpanSource::Model));
                }
            }
            Label::B(t) => {
                if let Some((ot, s, e)) = open.take() {
                    spans.push(EntitySpan::new(ot, s, e, SpanSource::Model));
                }
                open = Some((t, tok.start, tok.end));
            }
            Label::I(_) => {
                if let Some((_, _, e)) = open.as_mut() {
                    *e = tok.end;
                }
            }
        }
    }
    if let Some((t, s, e)) = open {
        spans.push(EntitySpan::new(t, s, e, SpanSource::Model));
    }
    spans
}

impl TaggerModel {
    pub fn metadata(&self) -> &ModelMetadata {
        &self.metadata
    }

    pub fn lexicons(&self) -> &Lexicons {
        &self.lexicons
    }

    pub fn num_features(&self) -> usize {
        self.weights.len()
    }

    fn score(&self, feats: impl Iterator<Item = impl AsRef<str>>) -> usize {
        let mut scores = [0f64; N_LABELS];
        for f in feats {
            if let Some(row) = self.weights.get(f.as_ref()) {
                for (s, w) in scores.iter_mut().zip(row) {
                    *s += w;
                }
            }
        }
        argmax(scores.iter().copied())
    }

    /// Tag a normalized comment with the model alone.
    pub fn tag(&self, text: &str) -> Vec<EntitySpan> {
        let sentence = Sentence::new(text, &self.lexicons);
        let mut labels = Vec::with_capacity(sentence.tokens.len());
        let mut prev = Label::O;
        for i in 0..sentence.tokens.len() {
            let dynamic = sentence.dynamic(i, prev);
            let guess = self.score(sentence.feats[i].iter().chain(dynamic.iter()));
            prev = Label::from_index(guess);
            labels.push(prev);
        }
        decode_spans(&sentence.tokens, &labels)
    }

    /// Model spans merged with rule spans filling the gaps.
    pub fn tag_with_rules(&self, text: &str) -> Vec<EntitySpan> {
        super::merge_spans(&self.tag(text), &rule_tag(text, &self.lexicons))
    }

    fn to_file(&self) -> ModelFile {
        let weights = self
            .weights
            .iter()
            .map(|(f, row)| {
                let sparse = row
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w != 0.0)
                    .map(|(l, w)| (l as u16, *w))
                    .collect();
                (f.clone(), sparse)
            })
            .collect();
        ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            labels: label_names(),
            metadata: self.metadata.clone(),
            lexicons: self.lexicons.clone(),
            weights,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(&self.to_file()).expect("model serializes")
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<TaggerModel, ModelError> {
        #[derive(Deserialize)]
        struct Header {
            format: String,
            version: u32,
        }
        let header: Header = serde_json::from_slice(bytes)?;
        if header.format != MODEL_FORMAT {
            return Err(ModelError::UnknownFormat(header.format));
        }
        if header.version != MODEL_VERSION {
            return Err(ModelError::UnsupportedVersion(header.version));
        }
        let file: ModelFile = serde_json::from_slice(bytes)?;
        if file.labels != label_names() {
            return Err(ModelError::LabelMismatch);
        }
        let weights = file
            .weights
            .into_iter()
            .map(|(f, sparse)| {
                let mut row = vec![0.0; N_LABELS];
                for (l, w) in sparse {
                    if let Some(slot) = row.get_mut(l as usize) {
                        *slot = w;
                    }
                }
                (f, row)
            })
            .collect();
        Ok(TaggerModel {
            weights,
            metadata: file.metadata,
            lexicons: file.lexicons,
        })
    }

    pub fn save<W: Write>(&self, mut w: W) -> Result<(), ModelError> {
        w.write_all(&self.to_bytes())?;
        w.flush()?;
        Ok(())
    }

    pub fn load<R: Read>(mut r: R) -> Result<TaggerModel, ModelError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    /// SHA-256 of the serialized model.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_bytes()))
    }
}
