use super::EntitySpan;

/// Combine model and rule output. Model spans win; a rule span is kept only
/// when it overlaps no model span. The result is sorted by position.
pub fn merge_spans(model: &[EntitySpan], rule: &[EntitySpan]) -> Vec<EntitySpan> {
    let mut out: Vec<EntitySpan> = model.to_vec();
    out.extend(rule.iter().filter(|r| !model.iter().any(|m| m.overlaps(r))).copied());
    out.sort();
    out
}
