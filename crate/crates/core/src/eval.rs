//! Detection scoring, cross-validation, threshold sweeps, per-entity accuracy
//! and inter-annotator agreement.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use num_traits::Float;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::detect::{baseline_detect, detect, DetectionCriterion, DetectionResult};
use crate::ner::{train, AnnotatedComment, EntitySpan, EntityType, ModelError, TaggerModel, TrainOptions};

/// Agreement at or below this value is flagged.
pub const KAPPA_THRESHOLD: f64 = 0.75;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("cannot split {items} items into {k} folds")]
    TooFewItems { items: usize, k: usize },
    #[error("gold set needs both citing and non-citing comments")]
    DegenerateCorpus,
    #[error("label lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no labels to compare")]
    EmptyLabels,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics<T> {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

fn ratio<T: Float>(num: u64, den: u64) -> T {
    if den == 0 {
        T::zero()
    } else {
        T::from(num).unwrap() / T::from(den).unwrap()
    }
}

/// Harmonic mean of precision and recall, zero when both are zero.
pub fn f1_score<T: Float>(precision: T, recall: T) -> T {
    let sum = precision + recall;
    if sum == T::zero() {
        T::zero()
    } else {
        (T::one() + T::one()) * precision * recall / sum
    }
}

pub fn prf<T: Float>(tp: u64, fp: u64, fn_: u64) -> Metrics<T> {
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    Metrics {
        tp,
        fp,
        fn_,
        precision,
        recall,
        f1: f1_score(precision, recall),
    }
}

impl<T: Float> Metrics<T> {
    /// Pool the counts of two results and recompute the ratios.
    pub fn combine(&self, other: &Metrics<T>) -> Metrics<T> {
        prf(self.tp + other.tp, self.fp + other.fp, self.fn_ + other.fn_)
    }
}

/// A seeded assignment of items to folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub seed: u64,
    /// Fold index of each item.
    pub assignment: Vec<usize>,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Shuffle item indices with a seeded generator, then deal them round-robin.
pub fn kfold(n_items: usize, k: usize, seed: u64) -> Result<FoldAssignment, EvalError> {
    if k < 2 || n_items < k {
        return Err(EvalError::TooFewItems { items: n_items, k });
    }
    let mut order: Vec<usize> = (0..n_items).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignment = vec![0; n_items];
    for (pos, &item) in order.iter().enumerate() {
        assignment[item] = pos % k;
    }
    Ok(FoldAssignment { k, seed, assignment })
}

/// The five entity sets compared when choosing the criterion, most
/// demanding first.
pub fn standard_combos() -> Vec<BTreeSet<EntityType>> {
    use EntityType::*;
    [
        vec![Author, Title, Year, BooktitleOrJournal],
        vec![Title, Year, BooktitleOrJournal],
        vec![Author, Year, BooktitleOrJournal],
        vec![Author, Title, BooktitleOrJournal],
        vec![Year, BooktitleOrJournal],
    ]
    .into_iter()
    .map(|v| v.into_iter().collect())
    .collect()
}

pub fn combo_label(combo: &BTreeSet<EntityType>) -> String {
    combo.iter().map(|t| t.as_str()).collect::<Vec<_>>().join("+")
}

/// Comment-level scoring: a comment is a true positive when gold marks it as
/// citing and the criterion fires on its predicted spans.
pub fn score_detection(
    gold: &[AnnotatedComment],
    predicted: &[Vec<EntitySpan>],
    criterion: &DetectionCriterion,
) -> Metrics<f64> {
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (g, p) in gold.iter().zip(predicted) {
        let hit = detect(&g.text, p, criterion).detected;
        match (g.is_citation(), hit) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    prf(tp, fp, fn_)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComboMetrics {
    pub combo: BTreeSet<EntityType>,
    pub max_gap: usize,
    pub metrics: Metrics<f64>,
}

#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub folds: FoldAssignment,
    pub combos: Vec<ComboMetrics>,
    /// Out-of-fold predicted spans for every gold comment.
    pub predictions: Vec<Vec<EntitySpan>>,
}

/// Train on k-1 folds, tag the held-out fold, and score every combo at
/// `max_gap` with counts pooled over folds.
pub fn cross_validate(
    gold: &[AnnotatedComment],
    k: usize,
    seed: u64,
    combos: &[BTreeSet<EntityType>],
    max_gap: usize,
    train_options: &TrainOptions,
) -> Result<CrossValidation, EvalError> {
    let positives = gold.iter().filter(|c| c.is_citation()).count();
    if positives == 0 || positives == gold.len() {
        return Err(EvalError::DegenerateCorpus);
    }
    let folds = kfold(gold.len(), k, seed)?;
    let mut predictions = vec![Vec::new(); gold.len()];
    for fold in 0..k {
        let train_set: Vec<AnnotatedComment> = folds.train_indices(fold).into_iter().map(|i| gold[i].clone()).collect();
        let model = train(&train_set, train_options)?;
        for i in folds.test_indices(fold) {
            predictions[i] = model.tag_with_rules(&gold[i].text);
        }
        log::debug!("fold {fold} done");
    }
    let combos = combos
        .iter()
        .map(|combo| {
            let criterion =
                DetectionCriterion::new(combo.iter().copied(), max_gap).map_err(|_| EvalError::DegenerateCorpus)?;
            Ok(ComboMetrics {
                combo: combo.clone(),
                max_gap,
                metrics: score_detection(gold, &predictions, &criterion),
            })
        })
        .collect::<Result<_, EvalError>>()?;
    Ok(CrossValidation {
        folds,
        combos,
        predictions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub max_gap: usize,
    pub metrics: Metrics<f64>,
    /// Indices of comments detected at this threshold.
    pub detected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub combo: BTreeSet<EntityType>,
    pub points: Vec<SweepPoint>,
    /// Threshold with the highest F1; the smallest one on ties.
    pub best_max_gap: Option<usize>,
}

/// Evaluate the criterion at each threshold over already-tagged comments.
pub fn sweep_tagged(
    gold: &[AnnotatedComment],
    predicted: &[Vec<EntitySpan>],
    combo: &BTreeSet<EntityType>,
    max_gaps: &[usize],
) -> Sweep {
    let points: Vec<SweepPoint> = max_gaps
        .iter()
        .map(|&d| {
            let criterion = DetectionCriterion::new(combo.iter().copied(), d).unwrap_or_default();
            let detected = gold
                .iter()
                .zip(predicted)
                .enumerate()
                .filter(|(_, (g, p))| detect(&g.text, p, &criterion).detected)
                .map(|(i, _)| i)
                .collect();
            SweepPoint {
                max_gap: d,
                metrics: score_detection(gold, predicted, &criterion),
                detected,
            }
        })
        .collect();
    let mut best: Option<&SweepPoint> = None;
    for p in &points {
        if best.is_none_or(|b| p.metrics.f1 > b.metrics.f1) {
            best = Some(p);
        }
    }
    Sweep {
        combo: combo.clone(),
        best_max_gap: best.map(|p| p.max_gap),
        points,
    }
}

/// Tag every gold comment with `model` and sweep the thresholds.
pub fn sensitivity_sweep(
    gold: &[AnnotatedComment],
    model: &TaggerModel,
    combo: &BTreeSet<EntityType>,
    max_gaps: &[usize],
) -> Sweep {
    let predicted: Vec<_> = gold.iter().map(|g| model.tag_with_rules(&g.text)).collect();
    sweep_tagged(gold, &predicted, combo, max_gaps)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AccuracyCounts {
    pub correct: u64,
    pub partially_correct: u64,
    pub incorrect: u64,
}

impl AccuracyCounts {
    pub fn total(&self) -> u64 {
        self.correct + self.partially_correct + self.incorrect
    }
}

pub type EntityAccuracy = BTreeMap<EntityType, AccuracyCounts>;

/// Same type and overlapping by at least half of the shorter span.
pub fn spans_match(a: &EntitySpan, b: &EntitySpan) -> bool {
    a.etype == b.etype && 2 * a.overlap_len(b) >= a.len().min(b.len()) && a.overlaps(b)
}

/// Judge, per comment and predicted type, whether the predicted spans of
/// that type match gold spans: all (correct), some (partial) or none.
pub fn entity_accuracy(gold: &[AnnotatedComment], predicted: &[Vec<EntitySpan>]) -> Result<EntityAccuracy, EvalError> {
    if gold.len() != predicted.len() {
        return Err(EvalError::LengthMismatch(gold.len(), predicted.len()));
    }
    let mut out = EntityAccuracy::new();
    for (g, p) in gold.iter().zip(predicted) {
        let types: BTreeSet<EntityType> = p.iter().map(|s| s.etype).collect();
        for t in types {
            let of_type: Vec<_> = p.iter().filter(|s| s.etype == t).collect();
            let matched = of_type
                .iter()
                .filter(|s| g.gold.iter().any(|gs| spans_match(s, gs)))
                .count();
            let counts = out.entry(t).or_default();
            if matched == of_type.len() {
                counts.correct += 1;
            } else if matched == 0 {
                counts.incorrect += 1;
            } else {
                counts.partially_correct += 1;
            }
        }
    }
    Ok(out)
}

/// Cohen's kappa for two raters over the same items.
pub fn cohen_kappa<T: Float, L: Ord>(a: &[L], b: &[L]) -> Result<T, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(EvalError::EmptyLabels);
    }
    let n = T::from(a.len()).unwrap();
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count();
    let p_o = T::from(agree).unwrap() / n;
    let mut margins: BTreeMap<&L, (usize, usize)> = BTreeMap::new();
    for x in a {
        margins.entry(x).or_default().0 += 1;
    }
    for y in b {
        margins.entry(y).or_default().1 += 1;
    }
    let p_e = margins.values().fold(T::zero(), |acc, &(ca, cb)| {
        acc + (T::from(ca).unwrap() / n) * (T::from(cb).unwrap() / n)
    });
    if p_e == T::one() {
        return Ok(T::one());
    }
    Ok((p_o - p_e) / (T::one() - p_e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaReport {
    pub items: usize,
    pub kappa: f64,
    /// True when agreement does not exceed [`KAPPA_THRESHOLD`].
    pub flagged: bool,
}

pub fn kappa_report<L: Ord>(a: &[L], b: &[L]) -> Result<KappaReport, EvalError> {
    let kappa: f64 = cohen_kappa(a, b)?;
    Ok(KappaReport {
        items: a.len(),
        kappa,
        flagged: kappa <= KAPPA_THRESHOLD,
    })
}

/// Read a dual-annotation CSV with columns `item,rater_a,rater_b`.
pub fn read_kappa_csv<R: Read>(r: R) -> Result<(Vec<String>, Vec<String>), EvalError> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for row in csv::Reader::from_reader(r).records() {
        let row = row?;
        a.push(row.get(1).unwrap_or_default().trim().to_string());
        b.push(row.get(2).unwrap_or_default().trim().to_string());
    }
    Ok((a, b))
}

#[derive(Debug, Serialize)]
struct ComboRow<'a> {
    combo: &'a str,
    #[serde(rename = "D")]
    d: usize,
    tp: u64,
    fp: u64,
    #[serde(rename = "fn")]
    fn_: u64,
    precision: f64,
    recall: f64,
    f1: f64,
}

/// Write `combo,D,tp,fp,fn,precision,recall,f1` rows.
pub fn write_metrics_csv<'a, W: Write>(
    w: W,
    rows: impl IntoIterator<Item = (&'a BTreeSet<EntityType>, usize, &'a Metrics<f64>)>,
) -> Result<(), EvalError> {
    let mut out = csv::Writer::from_writer(w);
    for (combo, d, m) in rows {
        let label = combo_label(combo);
        out.serialize(ComboRow {
            combo: &label,
            d,
            tp: m.tp,
            fp: m.fp,
            fn_: m.fn_,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
        })?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Write one row per entity type with counts and shares of each category.
pub fn write_entity_csv<W: Write>(w: W, acc: &EntityAccuracy) -> Result<(), EvalError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "entity",
        "correct",
        "partially_correct",
        "incorrect",
        "total",
        "correct_pct",
        "partial_pct",
        "incorrect_pct",
    ])?;
    for (t, c) in acc {
        let total = c.total();
        let pct = |x: u64| format!("{:.1}", 100.0 * ratio::<f64>(x, total));
        out.write_record([
            t.as_str().to_string(),
            c.correct.to_string(),
            c.partially_correct.to_string(),
            c.incorrect.to_string(),
            total.to_string(),
            pct(c.correct),
            pct(c.partially_correct),
            pct(c.incorrect),
        ])?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaselineOverlap {
    pub comments: usize,
    pub pipeline_detected: usize,
    pub baseline_detected: usize,
    pub both: usize,
    /// Share of pipeline detections the baseline also finds.
    pub fraction: f64,
}

/// Run the pattern baseline next to the pipeline's decisions.
pub fn baseline_overlap(texts: &[&str], results: &[DetectionResult]) -> BaselineOverlap {
    let mut o = BaselineOverlap {
        comments: texts.len(),
        pipeline_detected: 0,
        baseline_detected: 0,
        both: 0,
        fraction: 0.0,
    };
    for (text, r) in texts.iter().zip(results) {
        let base = baseline_detect(text);
        o.pipeline_detected += r.detected as usize;
        o.baseline_detected += base as usize;
        o.both += (base && r.detected) as usize;
    }
    o.fraction = ratio(o.both as u64, o.pipeline_detected as u64);
    o
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ner::SpanSource;

    #[test]
    fn prf_reference_points() {
        let m: Metrics<f64> = prf(82, 18, 0);
        assert!((m.precision - 0.82).abs() < 1e-12 && m.recall == 1.0);
        assert!((m.f1 - 0.90).abs() < 0.005);
        let m: Metrics<f32> = prf(7722, 78, 2178);
        assert!((m.precision - 0.99).abs() < 1e-6 && (m.recall - 0.78).abs() < 1e-6);
        assert!((m.f1 - 0.87).abs() < 0.005);
        let z: Metrics<f64> = prf(0, 0, 0);
        assert_eq!((z.precision, z.recall, z.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn f1_between_p_and_r() {
        for tp in 1..20 {
            for fp in 0..20 {
                for fn_ in 0..20 {
                    let m: Metrics<f64> = prf(tp, fp, fn_);
                    assert!(m.f1 <= m.precision.max(m.recall) + 1e-12);
                    assert!(m.f1 >= m.precision.min(m.recall) - 1e-12);
                }
            }
        }
    }

    #[test]
    fn folds() {
        let f = kfold(1376, 10, 3).unwrap();
        let mut sizes = f.fold_sizes();
        sizes.sort();
        assert_eq!(sizes, [137, 137, 137, 137, 138, 138, 138, 138, 138, 138]);
        assert_eq!(f, kfold(1376, 10, 3).unwrap());
        assert_ne!(f, kfold(1376, 10, 4).unwrap());
        assert_eq!(kfold(10, 10, 0).unwrap().fold_sizes(), [1; 10]);
        assert!(matches!(
            kfold(3, 10, 0),
            Err(EvalError::TooFewItems { items: 3, k: 10 })
        ));
        assert!(kfold(3, 1, 0).is_err());
        let mut all: Vec<usize> = (0..10).flat_map(|i| f.test_indices(i)).collect();
        all.sort();
        assert_eq!(all, (0..1376).collect::<Vec<_>>());
    }

    #[test]
    fn kappa() {
        let a = ["x", "y", "x", "z"];
        assert_eq!(cohen_kappa::<f64, _>(&a, &a).unwrap(), 1.0);
        let k: f64 = cohen_kappa(&["x", "x", "y", "y"], &["x", "y", "x", "y"]).unwrap();
        assert!(k.abs() < 1e-12);
        assert_eq!(cohen_kappa::<f64, _>(&["x", "x"], &["x", "x"]).unwrap(), 1.0);
        assert!(matches!(
            cohen_kappa::<f64, _>(&["x"], &["x", "y"]),
            Err(EvalError::LengthMismatch(1, 2))
        ));
        assert!(matches!(
            cohen_kappa::<f64, &str>(&[], &[]),
            Err(EvalError::EmptyLabels)
        ));
        let b = ["x", "y", "y", "z"];
        let ab: f64 = cohen_kappa(&a, &b).unwrap();
        let ba: f64 = cohen_kappa(&b, &a).unwrap();
        assert_eq!(ab, ba);
        assert!(kappa_report(&a, &b).unwrap().flagged);
        assert!(!kappa_report(&a, &a).unwrap().flagged);
    }

    fn sp(t: EntityType, s: usize, e: usize) -> EntitySpan {
        EntitySpan::new(t, s, e, SpanSource::Model)
    }

    #[test]
    fn accuracy_categories() {
        let gold = vec![AnnotatedComment::new(
            "x".repeat(40),
            vec![
                sp(EntityType::Author, 0, 6),
                sp(EntityType::Author, 8, 14),
                sp(EntityType::Year, 20, 24),
            ],
        )];
        let same = vec![gold[0].gold.clone()];
        let acc = entity_accuracy(&gold, &same).unwrap();
        assert_eq!(acc[&EntityType::Author].correct, 1);
        assert_eq!(acc[&EntityType::Year].correct, 1);

        let partial = vec![vec![
            sp(EntityType::Author, 0, 6),
            sp(EntityType::Author, 30, 36),
            sp(EntityType::Title, 8, 14),
        ]];
        let acc = entity_accuracy(&gold, &partial).unwrap();
        assert_eq!(acc[&EntityType::Author].partially_correct, 1);
        assert_eq!(acc[&EntityType::Title].incorrect, 1);
        assert!(!acc.contains_key(&EntityType::Year));
        assert!(entity_accuracy(&gold, &[]).is_err());
    }

    #[test]
    fn overlap_rule() {
        let a = sp(EntityType::Title, 0, 10);
        assert!(spans_match(&a, &sp(EntityType::Title, 5, 30)));
        assert!(spans_match(&a, &sp(EntityType::Title, 8, 12)));
        assert!(!spans_match(&a, &sp(EntityType::Title, 9, 13)));
        assert!(!spans_match(&a, &sp(EntityType::Year, 0, 10)));
    }

    #[test]
    fn sweep_monotone_on_fixed_tags() {
        use EntityType::*;
        let gold: Vec<_> = (0..6)
            .map(|i| AnnotatedComment::new("x".repeat(80), if i % 2 == 0 { vec![sp(Year, 0, 4)] } else { vec![] }))
            .collect();
        let predicted: Vec<_> = (0..6)
            .map(|i| {
                vec![
                    sp(Author, 0, 5),
                    sp(Title, 5 + i, 10 + i),
                    sp(Year, 10 + 3 * i, 14 + 3 * i),
                    sp(BooktitleOrJournal, 14 + 5 * i, 20 + 5 * i),
                ]
            })
            .collect();
        let combo = &standard_combos()[0];
        let ds: Vec<usize> = (0..=10).collect();
        let s = sweep_tagged(&gold, &predicted, combo, &ds);
        for w in s.points.windows(2) {
            assert!(w[0].detected.iter().all(|i| w[1].detected.contains(i)));
            assert!(w[0].metrics.recall <= w[1].metrics.recall);
        }
        assert_eq!(s.points[10].detected.len(), 6);
        assert!(s.best_max_gap.is_some());
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        let combo = standard_combos().remove(4);
        write_metrics_csv(&mut buf, [(&combo, 10, &prf(1, 1, 0))]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "combo,D,tp,fp,fn,precision,recall,f1");
        assert!(text.contains("year+booktitle_or_journal,10,1,1,0,0.5,1.0,"));

        let (a, b) = read_kappa_csv("item,a,b\n1,cite, cite\n2,none,cite\n".as_bytes()).unwrap();
        assert_eq!(a, ["cite", "none"]);
        assert_eq!(b, ["cite", "cite"]);
    }
}
