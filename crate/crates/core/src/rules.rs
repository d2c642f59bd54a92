//! Association rule mining over a formal context: metric computation,
//! threshold filtering, robustness grids, and summary statistics.
//!
//! Candidate antecedents are generated breadth-first with support pruning
//! (support is anti-monotone), then every disjoint (antecedent, consequent)
//! pair is scored by direct cover counting. Support and confidence filters
//! are inclusive (`>=`); the lift filter is strict (`>`).

use crate::context::{AttrSet, ContextError, FormalContext, ObjSet};
use rayon::prelude::*;
use thiserror::Error;

/// Cap on generated candidate itemsets (antecedents plus consequents).
pub const DEFAULT_CANDIDATE_CAP: usize = 10_000_000;

#[derive(Debug, Error)]
pub enum RuleError {
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error("antecedent and consequent overlap")]
    DisjointnessViolation,
    #[error("antecedent covers no objects; confidence undefined")]
    EmptyAntecedentCover,
    #[error("consequent covers no objects; lift undefined")]
    EmptyConsequentCover,
    #[error("antecedent and consequent must be non-empty")]
    EmptySide,
    #[error("rule list is empty")]
    EmptyRuleSet,
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("contexts have different attribute vocabularies")]
    VocabularyMismatch,
    #[error("candidate count exceeded cap of {cap}")]
    ResourceLimit { cap: usize },
}

/// A mined rule X => Y with its three metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRule {
    pub antecedent: AttrSet,
    pub consequent: AttrSet,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

impl AssociationRule {
    /// True when `attr` occurs in the antecedent or the consequent.
    pub fn mentions(&self, attr: usize) -> bool {
        self.antecedent.contains(attr) || self.consequent.contains(attr)
    }
}

/// Extraction thresholds. Support and confidence are inclusive minima,
/// lift is a strict minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleThresholds {
    pub min_support: f64,
    pub min_confidence: f64,
    pub min_lift: f64,
    pub max_antecedent: usize,
    pub consequent_size: usize,
}

impl Default for RuleThresholds {
    fn default() -> Self {
        RuleThresholds {
            min_support: 0.01,
            min_confidence: 0.8,
            min_lift: 1.2,
            max_antecedent: 3,
            consequent_size: 1,
        }
    }
}

impl RuleThresholds {
    pub fn validate(&self) -> Result<(), RuleError> {
        if !(0.0..=1.0).contains(&self.min_support) {
            return Err(RuleError::InvalidThresholds(format!(
                "min_support {} outside [0,1]",
                self.min_support
            )));
        }
        if !(0.0..=1.0).contains(&self.min_confidence) {
            return Err(RuleError::InvalidThresholds(format!(
                "min_confidence {} outside [0,1]",
                self.min_confidence
            )));
        }
        if !self.min_lift.is_finite() || self.min_lift < 0.0 {
            return Err(RuleError::InvalidThresholds(format!(
                "min_lift {} must be finite and non-negative",
                self.min_lift
            )));
        }
        if self.max_antecedent == 0 {
            return Err(RuleError::InvalidThresholds("max_antecedent must be >= 1".into()));
        }
        if self.consequent_size == 0 {
            return Err(RuleError::InvalidThresholds("consequent_size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Raw metrics of a candidate rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleMetrics {
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

/// Computes (support, confidence, lift) for X => Y by direct counting.
pub fn rule_metrics(
    ctx: &FormalContext,
    antecedent: &AttrSet,
    consequent: &AttrSet,
) -> Result<RuleMetrics, RuleError> {
    if antecedent.is_empty() || consequent.is_empty() {
        return Err(RuleError::EmptySide);
    }
    if antecedent.intersects(consequent) {
        return Err(RuleError::DisjointnessViolation);
    }
    let x_cover = ctx.derive_objects(antecedent)?;
    if x_cover.is_empty() {
        return Err(RuleError::EmptyAntecedentCover);
    }
    let y_cover = ctx.derive_objects(consequent)?;
    if y_cover.is_empty() {
        return Err(RuleError::EmptyConsequentCover);
    }
    let n = ctx.object_count() as f64;
    let joint = x_cover.intersection(&y_cover).len() as f64;
    let confidence = joint / x_cover.len() as f64;
    Ok(RuleMetrics {
        support: joint / n,
        confidence,
        lift: confidence / (y_cover.len() as f64 / n),
    })
}

/// An itemset with its cover, carried through level-wise generation.
struct Candidate {
    attrs: Vec<usize>, // ascending
    cover: ObjSet,
}

fn frequent_levels(
    ctx: &FormalContext,
    max_size: usize,
    min_support: f64,
    cap: usize,
    budget: &mut usize,
) -> Result<Vec<Vec<Candidate>>, RuleError> {
    let n = ctx.object_count() as f64;
    let m = ctx.attribute_count();
    let frequent = |cover: &ObjSet| cover.len() as f64 / n >= min_support;

    let mut levels: Vec<Vec<Candidate>> = Vec::new();
    let singles: Vec<Candidate> = (0..m)
        .map(|j| Candidate { attrs: vec![j], cover: ctx.column(j).clone() })
        .filter(|c| frequent(&c.cover))
        .collect();
    *budget = budget.saturating_sub(m);
    levels.push(singles);

    for _ in 1..max_size {
        let prev = levels.last().unwrap();
        let mut next = Vec::new();
        for cand in prev {
            let last = *cand.attrs.last().unwrap();
            for j in last + 1..m {
                if *budget == 0 {
                    return Err(RuleError::ResourceLimit { cap });
                }
                *budget -= 1;
                let cover = cand.cover.intersection(ctx.column(j));
                if frequent(&cover) {
                    let mut attrs = cand.attrs.clone();
                    attrs.push(j);
                    next.push(Candidate { attrs, cover });
                }
            }
        }
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    Ok(levels)
}

/// Mines every rule X => Y with `1 <= |X| <= max_antecedent`,
/// `|Y| = consequent_size`, X and Y disjoint, passing all thresholds.
///
/// Output is sorted by (lift desc, support desc, antecedent indices,
/// consequent indices) and is identical for any rayon pool size.
pub fn mine_rules(
    ctx: &FormalContext,
    thresholds: &RuleThresholds,
) -> Result<Vec<AssociationRule>, RuleError> {
    mine_rules_capped(ctx, thresholds, DEFAULT_CANDIDATE_CAP)
}

/// As [`mine_rules`] with an explicit candidate cap.
pub fn mine_rules_capped(
    ctx: &FormalContext,
    thresholds: &RuleThresholds,
    cap: usize,
) -> Result<Vec<AssociationRule>, RuleError> {
    thresholds.validate()?;
    let n = ctx.object_count() as f64;
    let mut budget = cap;
    let max_side = thresholds.max_antecedent.max(thresholds.consequent_size);
    let levels = frequent_levels(ctx, max_side, thresholds.min_support, cap, &mut budget)?;

    let antecedents: Vec<&Candidate> = levels
        .iter()
        .take(thresholds.max_antecedent)
        .flatten()
        .collect();
    let consequents: Vec<&Candidate> = levels
        .get(thresholds.consequent_size - 1)
        .map(|l| l.iter().collect())
        .unwrap_or_default();

    let th = *thresholds;
    let m = ctx.attribute_count();
    let mut rules: Vec<AssociationRule> = antecedents
        .par_iter()
        .flat_map_iter(|x| {
            let x_count = x.cover.len() as f64;
            consequents.iter().filter_map(move |y| {
                if x.attrs.iter().any(|a| y.attrs.contains(a)) {
                    return None;
                }
                let joint = x.cover.intersection(&y.cover).len() as f64;
                if joint == 0.0 {
                    return None;
                }
                let support = joint / n;
                let confidence = joint / x_count;
                let lift = confidence / (y.cover.len() as f64 / n);
                if support >= th.min_support
                    && confidence >= th.min_confidence
                    && lift > th.min_lift
                {
                    Some(AssociationRule {
                        antecedent: AttrSet::from_indices(m, x.attrs.iter().copied()),
                        consequent: AttrSet::from_indices(m, y.attrs.iter().copied()),
                        support,
                        confidence,
                        lift,
                    })
                } else {
                    None
                }
            })
        })
        .collect();

    rules.sort_by(|a, b| {
        b.lift
            .total_cmp(&a.lift)
            .then(b.support.total_cmp(&a.support))
            .then_with(|| a.antecedent.indices().cmp(&b.antecedent.indices()))
            .then_with(|| a.consequent.indices().cmp(&b.consequent.indices()))
    });
    Ok(rules)
}

/// One row of the cross-condition robustness grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessRow {
    pub thresholds: RuleThresholds,
    pub count_a: usize,
    pub count_b: usize,
}

/// Rule counts for both contexts under every thresholds row.
pub fn robustness_grid(
    ctx_a: &FormalContext,
    ctx_b: &FormalContext,
    grid: &[RuleThresholds],
) -> Result<Vec<RobustnessRow>, RuleError> {
    if !ctx_a.same_vocabulary(ctx_b) {
        return Err(RuleError::VocabularyMismatch);
    }
    grid.iter()
        .map(|th| {
            Ok(RobustnessRow {
                thresholds: *th,
                count_a: mine_rules(ctx_a, th)?.len(),
                count_b: mine_rules(ctx_b, th)?.len(),
            })
        })
        .collect()
}

/// Number of rules whose antecedent or consequent contains `attr`.
pub fn attribute_participation(rules: &[AssociationRule], attr: usize) -> usize {
    rules.iter().filter(|r| r.mentions(attr)).count()
}

/// Mean / median / max of one metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatTriple {
    pub mean: f64,
    pub median: f64,
    pub max: f64,
}

/// Summary statistics over a rule list, per metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleSummary {
    pub support: StatTriple,
    pub confidence: StatTriple,
    pub lift: StatTriple,
}

fn stat_triple(values: &mut [f64]) -> StatTriple {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let median = if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    };
    StatTriple {
        mean: values.iter().sum::<f64>() / n as f64,
        median,
        max: values[n - 1],
    }
}

/// Nine statistics over a non-empty rule list. Median of an even-length
/// list is the average of the two middle values.
pub fn rule_summary(rules: &[AssociationRule]) -> Result<RuleSummary, RuleError> {
    if rules.is_empty() {
        return Err(RuleError::EmptyRuleSet);
    }
    let mut sup: Vec<f64> = rules.iter().map(|r| r.support).collect();
    let mut conf: Vec<f64> = rules.iter().map(|r| r.confidence).collect();
    let mut lift: Vec<f64> = rules.iter().map(|r| r.lift).collect();
    Ok(RuleSummary {
        support: stat_triple(&mut sup),
        confidence: stat_triple(&mut conf),
        lift: stat_triple(&mut lift),
    })
}
