//! Cross-condition structural comparison: marginal prevalence, concept-set
//! differencing, rule premise clusters, and topic-level profiles.
//!
//! Everything here is a pure function of its inputs; re-running a report
//! changes nothing.

use crate::concepts::FormalConcept;
use crate::context::{AttrSet, FormalContext};
use crate::ingest::{CommentRecord, Condition, Sentiment, Topic};
use crate::rules::AssociationRule;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiagnosticError {
    #[error("contexts have different attribute vocabularies")]
    VocabularyMismatch,
    #[error("rule antecedent {antecedent:?} contains {count} topic attributes; premise cluster anchor is ambiguous")]
    AmbiguousAnchor { antecedent: Vec<usize>, count: usize },
}

/// Per-attribute prevalence in two contexts, with `delta = b - a`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrevalenceRow {
    pub attribute_index: usize,
    pub attribute: String,
    pub prevalence_a: f64,
    pub prevalence_b: f64,
    pub delta: f64,
}

/// Column popcount / object count per attribute, rows sorted by delta
/// descending (ties by attribute index).
pub fn marginal_prevalence(
    ctx_a: &FormalContext,
    ctx_b: &FormalContext,
) -> Result<Vec<PrevalenceRow>, DiagnosticError> {
    if !ctx_a.same_vocabulary(ctx_b) {
        return Err(DiagnosticError::VocabularyMismatch);
    }
    let na = ctx_a.object_count() as f64;
    let nb = ctx_b.object_count() as f64;
    let mut rows: Vec<PrevalenceRow> = ctx_a
        .attributes()
        .iter()
        .map(|attr| {
            let j = attr.index();
            let pa = ctx_a.column(j).len() as f64 / na;
            let pb = ctx_b.column(j).len() as f64 / nb;
            PrevalenceRow {
                attribute_index: j,
                attribute: attr.name().to_string(),
                prevalence_a: pa,
                prevalence_b: pb,
                delta: pb - pa,
            }
        })
        .collect();
    rows.sort_by(|x, y| {
        y.delta
            .total_cmp(&x.delta)
            .then(x.attribute_index.cmp(&y.attribute_index))
    });
    Ok(rows)
}

/// Concept intents split into shared / A-only / B-only by set equality.
#[derive(Debug, Clone, PartialEq)]
pub struct IntentComparison {
    pub shared: Vec<AttrSet>,
    pub only_a: Vec<AttrSet>,
    pub only_b: Vec<AttrSet>,
}

pub fn compare_intents(
    concepts_a: &[FormalConcept],
    concepts_b: &[FormalConcept],
) -> IntentComparison {
    let set_a: HashSet<&AttrSet> = concepts_a.iter().map(|c| &c.intent).collect();
    let set_b: HashSet<&AttrSet> = concepts_b.iter().map(|c| &c.intent).collect();
    let mut shared = Vec::new();
    let mut only_a = Vec::new();
    for c in concepts_a {
        if set_b.contains(&c.intent) {
            shared.push(c.intent.clone());
        } else {
            only_a.push(c.intent.clone());
        }
    }
    let only_b = concepts_b
        .iter()
        .filter(|c| !set_a.contains(&c.intent))
        .map(|c| c.intent.clone())
        .collect();
    IntentComparison { shared, only_a, only_b }
}

/// Count of concepts whose intent contains each attribute, sorted by count
/// descending then attribute index.
pub fn concept_attribute_histogram(
    concepts: &[FormalConcept],
    num_attributes: usize,
) -> Vec<(usize, usize)> {
    let mut counts = vec![0usize; num_attributes];
    for c in concepts {
        for j in c.intent.iter() {
            counts[j] += 1;
        }
    }
    let mut out: Vec<(usize, usize)> = counts.into_iter().enumerate().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

/// Rules sharing a premise anchor: the unique topic attribute in the
/// antecedent, or `None` for personality-only rules.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleCluster {
    pub anchor: Option<usize>,
    pub rules: Vec<AssociationRule>,
}

/// Groups rules by the topic attribute in their antecedent. Clusters are
/// sorted by size descending; the anchorless cluster sorts last on ties.
///
/// An antecedent holding two or more topic attributes has no well-defined
/// anchor and is an error; contexts built by ingest cannot produce one
/// (each object carries exactly one topic, so such a rule has zero
/// support).
pub fn cluster_rules(
    rules: &[AssociationRule],
    topic_attrs: &AttrSet,
) -> Result<Vec<RuleCluster>, DiagnosticError> {
    let mut clusters: Vec<RuleCluster> = Vec::new();
    for rule in rules {
        let anchor_set = rule.antecedent.intersection(topic_attrs);
        let anchor = match anchor_set.len() {
            0 => None,
            1 => Some(anchor_set.indices()[0]),
            count => {
                return Err(DiagnosticError::AmbiguousAnchor {
                    antecedent: rule.antecedent.indices(),
                    count,
                })
            }
        };
        match clusters.iter_mut().find(|c| c.anchor == anchor) {
            Some(c) => c.rules.push(rule.clone()),
            None => clusters.push(RuleCluster { anchor, rules: vec![rule.clone()] }),
        }
    }
    clusters.sort_by(|a, b| {
        b.rules
            .len()
            .cmp(&a.rules.len())
            .then_with(|| match (a.anchor, b.anchor) {
                (Some(x), Some(y)) => x.cmp(&y),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            })
    });
    Ok(clusters)
}

/// Sentiment distribution and mean traits of one topic's records.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicProfile {
    pub topic: Topic,
    pub n: usize,
    /// Positive / neutral / negative fractions, summing to 1.
    pub sentiment_fractions: [f64; 3],
    pub mean_traits: [f64; 5],
}

/// Profiles for the requested topics; topics with no records are reported
/// in `absent` rather than failing the run.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicProfiles {
    pub profiles: Vec<TopicProfile>,
    pub absent: Vec<Topic>,
}

pub fn topic_profiles(records: &[CommentRecord], topics: &[Topic]) -> TopicProfiles {
    let mut profiles = Vec::new();
    let mut absent = Vec::new();
    for &topic in topics {
        let members: Vec<&CommentRecord> =
            records.iter().filter(|r| r.topic == topic).collect();
        if members.is_empty() {
            absent.push(topic);
            continue;
        }
        let n = members.len();
        let mut sentiment_counts = [0usize; 3];
        let mut sums = [0.0; 5];
        for r in &members {
            sentiment_counts[r.sentiment as usize] += 1;
            for (s, v) in sums.iter_mut().zip(r.traits.as_array()) {
                *s += v;
            }
        }
        profiles.push(TopicProfile {
            topic,
            n,
            sentiment_fractions: sentiment_counts.map(|c| c as f64 / n as f64),
            mean_traits: sums.map(|s| s / n as f64),
        });
    }
    TopicProfiles { profiles, absent }
}

/// One cell of the condition x sentiment trait table. `mean_traits` is
/// `None` when no records match (the cell is reported absent).
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSectionRow {
    pub condition: Condition,
    pub sentiment: Sentiment,
    pub n: usize,
    pub mean_traits: Option<[f64; 5]>,
}

/// Six rows (2 conditions x 3 sentiments) of per-trait means.
pub fn sentiment_trait_crosssection(records: &[CommentRecord]) -> Vec<CrossSectionRow> {
    let mut rows = Vec::with_capacity(6);
    for condition in Condition::ALL {
        for sentiment in Sentiment::ALL {
            let mut sums = [0.0; 5];
            let mut n = 0usize;
            for r in records
                .iter()
                .filter(|r| r.condition == condition && r.sentiment == sentiment)
            {
                for (s, v) in sums.iter_mut().zip(r.traits.as_array()) {
                    *s += v;
                }
                n += 1;
            }
            rows.push(CrossSectionRow {
                condition,
                sentiment,
                n,
                mean_traits: (n > 0).then(|| sums.map(|s| s / n as f64)),
            });
        }
    }
    rows
}
