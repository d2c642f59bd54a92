//! Synthetic corpora and context pairs with controlled structure.
//!
//! The context-pair generator is the "frequencies lie" demonstration: both
//! contexts get exactly equal column sums, but context A realizes planned
//! attribute couplings while context B destroys them by shuffling the
//! coupled columns. Marginal statistics cannot tell the two apart; concept
//! and rule mining can.

use crate::context::{AttrSet, FormalContext};
use crate::ingest::{
    sentiment_index, topic_index, AttributeVocabulary, CommentRecord, Condition, Sentiment,
    Topic, TraitScores,
};
use chrono::{DateTime, Datelike, Days, NaiveDate, NaiveTime, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("infeasible spec: {0}")]
    InfeasibleSpec(String),
    #[error("unsupported coupling for corpus generation: {0}")]
    UnsupportedCoupling(String),
    #[error("spec parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Context(#[from] crate::context::ContextError),
}

/// A co-occurrence target: the named attributes should jointly hold in a
/// `joint` fraction of objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub attributes: Vec<String>,
    pub joint: f64,
}

/// Generator parameters. Output is a pure function of the spec.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub n_objects: usize,
    pub seed: u64,
    pub vocabulary: AttributeVocabulary,
    /// Target column density per attribute, aligned with the vocabulary.
    pub marginals: Vec<f64>,
    pub couplings: Vec<Coupling>,
}

/// The bundled demonstration spec, verbatim.
pub const DEMO_SPEC_TOML: &str = include_str!("../assets/demo_spec.toml");

/// Parses the bundled demonstration spec.
pub fn demo_spec() -> SynthSpec {
    SynthSpec::from_toml_str(DEMO_SPEC_TOML).expect("bundled demo spec parses")
}

#[derive(Debug, Deserialize)]
struct CouplingFile {
    attributes: Vec<String>,
    joint: f64,
}

#[derive(Debug, Deserialize)]
struct SpecFile {
    n_objects: usize,
    seed: u64,
    vocabulary: Option<Vec<String>>,
    #[serde(default)]
    marginals: BTreeMap<String, f64>,
    #[serde(default, rename = "coupling")]
    couplings: Vec<CouplingFile>,
}

impl SynthSpec {
    /// Reads the flat key-value spec document (TOML: scalar keys, a
    /// `[marginals]` table, and repeated `[[coupling]]` entries).
    pub fn from_toml_str(text: &str) -> Result<SynthSpec, SynthError> {
        let file: SpecFile = toml::from_str(text).map_err(|e| SynthError::Parse(e.to_string()))?;
        let vocabulary = match file.vocabulary {
            Some(names) => AttributeVocabulary::custom(names),
            None => AttributeVocabulary::standard(),
        };
        let mut marginals = vec![0.0; vocabulary.len()];
        for (name, value) in &file.marginals {
            let idx = vocabulary
                .index_of(name)
                .ok_or_else(|| SynthError::InvalidSpec(format!("unknown attribute {name:?}")))?;
            marginals[idx] = *value;
        }
        let spec = SynthSpec {
            n_objects: file.n_objects,
            seed: file.seed,
            vocabulary,
            marginals,
            couplings: file
                .couplings
                .into_iter()
                .map(|c| Coupling { attributes: c.attributes, joint: c.joint })
                .collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A copy with all couplings removed (the decorrelated condition).
    pub fn without_couplings(&self) -> SynthSpec {
        let mut spec = self.clone();
        spec.couplings.clear();
        spec
    }

    fn resolve(&self, name: &str) -> Result<usize, SynthError> {
        self.vocabulary
            .index_of(name)
            .ok_or_else(|| SynthError::InvalidSpec(format!("unknown attribute {name:?}")))
    }

    /// Checks ranges, coupling arities, attribute-disjointness across
    /// couplings, and the Fréchet feasibility bounds.
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_objects == 0 {
            return Err(SynthError::InvalidSpec("n_objects must be >= 1".into()));
        }
        if self.vocabulary.is_empty() {
            return Err(SynthError::InvalidSpec("vocabulary is empty".into()));
        }
        for (name, &p) in self.vocabulary.names().iter().zip(&self.marginals) {
            if !(0.0..=1.0).contains(&p) {
                return Err(SynthError::InvalidSpec(format!(
                    "marginal for {name} is {p}, outside [0,1]"
                )));
            }
        }
        let mut used = std::collections::HashSet::new();
        for c in &self.couplings {
            if c.attributes.len() < 2 || c.attributes.len() > 3 {
                return Err(SynthError::InvalidSpec(
                    "couplings must name 2 or 3 attributes".into(),
                ));
            }
            let mut members = Vec::new();
            for name in &c.attributes {
                let idx = self.resolve(name)?;
                if !used.insert(idx) {
                    return Err(SynthError::InvalidSpec(format!(
                        "attribute {name} participates in more than one coupling"
                    )));
                }
                members.push(idx);
            }
            let min_marginal = members
                .iter()
                .map(|&j| self.marginals[j])
                .fold(f64::INFINITY, f64::min);
            if c.joint > min_marginal + 1e-12 {
                return Err(SynthError::InfeasibleSpec(format!(
                    "joint target {} exceeds the smallest member marginal {} (upper Fréchet bound)",
                    c.joint, min_marginal
                )));
            }
            if c.joint < 0.0 {
                return Err(SynthError::InvalidSpec("joint target is negative".into()));
            }
            // the shared block plus pairwise-disjoint remainders must fit in n
            let n = self.n_objects as f64;
            let joint_count = (c.joint * n).round();
            let total: f64 = members
                .iter()
                .map(|&j| (self.marginals[j] * n).round() - joint_count)
                .sum::<f64>()
                + joint_count;
            if total > n {
                return Err(SynthError::InfeasibleSpec(format!(
                    "coupling on {:?}: union of members needs {} objects but only {} exist (lower Fréchet bound)",
                    c.attributes, total, self.n_objects
                )));
            }
        }
        Ok(())
    }
}

fn round_count(p: f64, n: usize) -> usize {
    ((p * n as f64).round() as usize).min(n)
}

/// Draws a `k`-subset of `pool` without replacement, deterministically from
/// `rng`, returned sorted.
fn sample_subset(rng: &mut ChaCha8Rng, pool: &[usize], k: usize) -> Vec<usize> {
    debug_assert!(k <= pool.len());
    let mut scratch = pool.to_vec();
    let (chosen, _) = scratch.partial_shuffle(rng, k);
    let mut out = chosen.to_vec();
    out.sort_unstable();
    out
}

/// Generates the matched-marginals context pair (A realizes the couplings,
/// B decorrelates the coupled columns by shuffling them).
///
/// Column sums are exactly equal between the two contexts; coupled
/// attributes hit their joint targets exactly in A.
pub fn generate_context_pair(
    spec: &SynthSpec,
) -> Result<(FormalContext, FormalContext), SynthError> {
    spec.validate()?;
    let n = spec.n_objects;
    let m = spec.vocabulary.len();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut columns_a: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut coupled = vec![false; m];
    let all_rows: Vec<usize> = (0..n).collect();

    for c in &spec.couplings {
        let members: Vec<usize> = c
            .attributes
            .iter()
            .map(|name| spec.resolve(name))
            .collect::<Result<_, _>>()?;
        let joint_count = round_count(c.joint, n);
        let block = sample_subset(&mut rng, &all_rows, joint_count);
        let mut taken: Vec<bool> = vec![false; n];
        for &r in &block {
            taken[r] = true;
        }
        for &j in &members {
            coupled[j] = true;
            let want = round_count(spec.marginals[j], n);
            let remainder = want.saturating_sub(joint_count);
            let pool: Vec<usize> = (0..n).filter(|&r| !taken[r]).collect();
            if pool.len() < remainder {
                return Err(SynthError::InfeasibleSpec(format!(
                    "coupling on {:?}: no room left for the remainder of {}",
                    c.attributes,
                    spec.vocabulary.names()[j]
                )));
            }
            let rest = sample_subset(&mut rng, &pool, remainder);
            // remainders stay pairwise disjoint so the joint count is exact
            for &r in &rest {
                taken[r] = true;
            }
            let mut col = block.clone();
            col.extend(rest);
            col.sort_unstable();
            columns_a[j] = col;
        }
    }
    for j in 0..m {
        if !coupled[j] {
            columns_a[j] = sample_subset(&mut rng, &all_rows, round_count(spec.marginals[j], n));
        }
    }

    // B: same columns, then shuffle each coupled column's entries
    let mut columns_b = columns_a.clone();
    for j in 0..m {
        if coupled[j] {
            let mut bits = vec![false; n];
            for &r in &columns_b[j] {
                bits[r] = true;
            }
            bits.shuffle(&mut rng);
            columns_b[j] = bits
                .iter()
                .enumerate()
                .filter_map(|(r, &b)| b.then_some(r))
                .collect();
        }
    }

    let build = |columns: &[Vec<usize>]| -> Result<FormalContext, SynthError> {
        let mut rows = vec![AttrSet::empty(m); n];
        for (j, col) in columns.iter().enumerate() {
            for &r in col {
                rows[r].insert(j);
            }
        }
        Ok(FormalContext::new(
            (0..n).map(|i| format!("o{i}")).collect(),
            spec.vocabulary.names().to_vec(),
            rows,
        )?)
    };
    Ok((build(&columns_a)?, build(&columns_b)?))
}

/// Week grid for corpus generation: `weeks` consecutive ISO weeks starting
/// at the week containing `start`, with a fixed number of comments each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusSchedule {
    pub weeks: usize,
    pub comments_per_week: usize,
    pub start: NaiveDate,
}

impl Default for CorpusSchedule {
    fn default() -> Self {
        CorpusSchedule {
            weeks: 52,
            comments_per_week: 40,
            start: NaiveDate::from_ymd_opt(2023, 1, 2).unwrap(),
        }
    }
}

struct JointSampler {
    sentiments: [f64; 3],
    topics: [f64; 12],
    /// (sentiment index, topic index, joint probability)
    coupling: Option<(usize, usize, f64)>,
}

impl JointSampler {
    fn from_spec(spec: &SynthSpec) -> Result<JointSampler, SynthError> {
        let normalize = |v: Vec<f64>, what: &str| -> Result<Vec<f64>, SynthError> {
            let sum: f64 = v.iter().sum();
            if sum <= 0.0 {
                return Err(SynthError::InvalidSpec(format!("{what} marginals sum to zero")));
            }
            Ok(v.iter().map(|p| p / sum).collect())
        };
        let sentiments = normalize(
            Sentiment::ALL
                .iter()
                .map(|&s| spec.marginals[sentiment_index(s)])
                .collect(),
            "sentiment",
        )?;
        let topics = normalize(
            Topic::ALL
                .iter()
                .map(|&t| spec.marginals[topic_index(t)])
                .collect(),
            "topic",
        )?;

        let mut coupling = None;
        for c in &spec.couplings {
            if c.attributes.len() != 2 {
                return Err(SynthError::UnsupportedCoupling(
                    "corpus mode couples exactly one sentiment with one topic".into(),
                ));
            }
            let a = spec.resolve(&c.attributes[0])?;
            let b = spec.resolve(&c.attributes[1])?;
            let (s, t) = if a < 3 && (3..15).contains(&b) {
                (a, b - 3)
            } else if b < 3 && (3..15).contains(&a) {
                (b, a - 3)
            } else {
                return Err(SynthError::UnsupportedCoupling(format!(
                    "corpus mode needs a (sentiment, topic) pair, got {:?}",
                    c.attributes
                )));
            };
            if coupling.is_some() {
                return Err(SynthError::UnsupportedCoupling(
                    "corpus mode supports at most one coupling".into(),
                ));
            }
            let (ps, pt) = (sentiments[s], topics[t]);
            if c.joint > ps.min(pt) + 1e-12 {
                return Err(SynthError::InfeasibleSpec(format!(
                    "joint target {} exceeds min({ps:.4}, {pt:.4}) (upper Fréchet bound)",
                    c.joint
                )));
            }
            if c.joint < ps + pt - 1.0 - 1e-12 {
                return Err(SynthError::InfeasibleSpec(format!(
                    "joint target {} below {ps:.4} + {pt:.4} - 1 (lower Fréchet bound)",
                    c.joint
                )));
            }
            coupling = Some((s, t, c.joint));
        }
        Ok(JointSampler {
            sentiments: [sentiments[0], sentiments[1], sentiments[2]],
            topics: std::array::from_fn(|i| topics[i]),
            coupling,
        })
    }

    fn pick(weights: &[f64], skip: Option<usize>, rng: &mut ChaCha8Rng) -> usize {
        let total: f64 = weights
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .map(|(_, w)| w)
            .sum();
        if total <= 0.0 {
            // degenerate residual: fall back to the first allowed index
            return (0..weights.len()).find(|i| Some(*i) != skip).unwrap();
        }
        let mut u = rng.gen::<f64>() * total;
        for (i, &w) in weights.iter().enumerate() {
            if Some(i) == skip {
                continue;
            }
            u -= w;
            if u <= 0.0 {
                return i;
            }
        }
        weights.len() - 1
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> (Sentiment, Topic) {
        let (s, t) = match self.coupling {
            None => (
                Self::pick(&self.sentiments, None, rng),
                Self::pick(&self.topics, None, rng),
            ),
            Some((cs, ct, joint)) => {
                let ps = self.sentiments[cs];
                let pt = self.topics[ct];
                let u = rng.gen::<f64>();
                if u < joint {
                    (cs, ct)
                } else if u < pt {
                    // coupled topic, other sentiment
                    (Self::pick(&self.sentiments, Some(cs), rng), ct)
                } else if u < pt + ps - joint {
                    // coupled sentiment, other topic
                    (cs, Self::pick(&self.topics, Some(ct), rng))
                } else {
                    (
                        Self::pick(&self.sentiments, Some(cs), rng),
                        Self::pick(&self.topics, Some(ct), rng),
                    )
                }
            }
        };
        (Sentiment::ALL[s], Topic::ALL[t])
    }
}

/// Generates schema-valid records for one condition whose binarized
/// comment-level context approximates the spec's marginals.
///
/// Requires the standard 25-attribute vocabulary. Sentiment and topic
/// track their targets closely (multinomial sampling, honoring one
/// optional sentiment-topic coupling); trait high/low bins are driven by
/// two-sided value clusters and track targets best inside (0.2, 0.8).
pub fn generate_corpus(
    spec: &SynthSpec,
    schedule: &CorpusSchedule,
    condition: Condition,
) -> Result<Vec<CommentRecord>, SynthError> {
    spec.validate()?;
    if spec.vocabulary != AttributeVocabulary::standard() {
        return Err(SynthError::InvalidSpec(
            "corpus generation requires the standard vocabulary".into(),
        ));
    }
    if schedule.weeks == 0 || schedule.comments_per_week == 0 {
        return Err(SynthError::InvalidSpec("schedule must cover >= 1 comment".into()));
    }
    let sampler = JointSampler::from_spec(spec)?;
    let trait_high: [f64; 5] = std::array::from_fn(|k| {
        let hi = spec.marginals[15 + 2 * k];
        let lo = spec.marginals[15 + 2 * k + 1];
        if hi + lo > 0.0 {
            hi / (hi + lo)
        } else {
            0.5
        }
    });

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    // align to the ISO-week Monday so each scheduled week is one ISO week
    let monday = schedule.start
        - Days::new(schedule.start.weekday().num_days_from_monday() as u64);
    let seconds_per_comment = (7 * 24 * 3600) / schedule.comments_per_week.max(1) as u32;

    let tag = condition.as_str().to_ascii_lowercase();
    let mut records = Vec::with_capacity(schedule.weeks * schedule.comments_per_week);
    for week in 0..schedule.weeks {
        let week_monday = monday + Days::new(7 * week as u64);
        for slot in 0..schedule.comments_per_week {
            let (sentiment, topic) = sampler.sample(&mut rng);
            let traits: [f64; 5] = std::array::from_fn(|k| {
                let u: f64 = rng.gen();
                if rng.gen::<f64>() < trait_high[k] {
                    0.65 + 0.2 * u
                } else {
                    0.15 + 0.2 * u
                }
            });
            let secs = (slot as u32 * seconds_per_comment).min(7 * 24 * 3600 - 1);
            let time = NaiveTime::from_num_seconds_from_midnight_opt(secs % 86_400, 0).unwrap();
            let date = week_monday + Days::new((secs / 86_400) as u64);
            let idx = week * schedule.comments_per_week + slot;
            records.push(CommentRecord {
                comment_id: format!("{tag}-{idx:06}"),
                influencer_id: format!("synth-{tag}"),
                condition,
                timestamp: DateTime::<Utc>::from_naive_utc_and_offset(date.and_time(time), Utc),
                sentiment,
                topic,
                traits: TraitScores::from_array(traits),
            });
        }
    }
    debug_assert_eq!(records.len(), schedule.weeks * schedule.comments_per_week);
    Ok(records)
}

/// Both demo conditions from one spec: the first condition keeps the
/// couplings, the second runs decorrelated on a derived seed.
pub fn generate_demo_corpus(
    spec: &SynthSpec,
    schedule: &CorpusSchedule,
) -> Result<Vec<CommentRecord>, SynthError> {
    let mut records = generate_corpus(spec, schedule, Condition::Vi)?;
    let mut decoupled = spec.without_couplings();
    decoupled.seed = spec.seed.wrapping_add(1);
    records.extend(generate_corpus(&decoupled, schedule, Condition::Hi)?);
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::VOCAB_SIZE;

    fn two_attr_spec() -> SynthSpec {
        SynthSpec {
            n_objects: 1000,
            seed: 11,
            vocabulary: AttributeVocabulary::custom(vec!["t".into(), "s".into()]),
            marginals: vec![0.17, 0.67],
            couplings: vec![Coupling {
                attributes: vec!["t".into(), "s".into()],
                joint: 0.15,
            }],
        }
    }

    #[test]
    fn pair_preserves_column_sums_and_realizes_joint() {
        let spec = two_attr_spec();
        let (a, b) = generate_context_pair(&spec).unwrap();
        assert_eq!(a.column(0).len(), 170);
        assert_eq!(a.column(1).len(), 670);
        assert_eq!(a.column(0).len(), b.column(0).len());
        assert_eq!(a.column(1).len(), b.column(1).len());
        let joint_a = a.column(0).intersection(a.column(1)).len();
        assert_eq!(joint_a, 150);
        let joint_b = b.column(0).intersection(b.column(1)).len() as f64;
        // independence target 0.17 * 0.67 * 1000 = 113.9
        assert!((joint_b - 113.9).abs() <= 10.0, "joint_b = {joint_b}");
    }

    #[test]
    fn infeasible_above_upper_bound() {
        let mut spec = two_attr_spec();
        spec.couplings[0].joint = 0.18; // above min(0.17, 0.67)
        assert!(matches!(
            generate_context_pair(&spec),
            Err(SynthError::InfeasibleSpec(_))
        ));
    }

    #[test]
    fn infeasible_below_lower_bound() {
        let spec = SynthSpec {
            n_objects: 100,
            seed: 1,
            vocabulary: AttributeVocabulary::custom(vec!["x".into(), "y".into()]),
            marginals: vec![0.9, 0.9],
            couplings: vec![Coupling {
                attributes: vec!["x".into(), "y".into()],
                joint: 0.5, // union would need 130 objects
            }],
        };
        let err = spec.validate().unwrap_err();
        assert!(matches!(err, SynthError::InfeasibleSpec(_)));
    }

    #[test]
    fn same_seed_identical_output() {
        let spec = demo_spec();
        let (a1, b1) = generate_context_pair(&spec).unwrap();
        let (a2, b2) = generate_context_pair(&spec).unwrap();
        for i in 0..spec.n_objects {
            assert_eq!(a1.row(i), a2.row(i));
            assert_eq!(b1.row(i), b2.row(i));
        }
    }

    #[test]
    fn demo_spec_parses_and_meets_targets() {
        let spec = demo_spec();
        assert_eq!(spec.n_objects, 50_000);
        assert_eq!(spec.vocabulary.len(), VOCAB_SIZE);
        let (a, b) = generate_context_pair(&spec).unwrap();
        for j in 0..VOCAB_SIZE {
            assert_eq!(a.column(j).len(), b.column(j).len());
        }
        let t = spec.vocabulary.index_of("topic_appearance").unwrap();
        let s = spec.vocabulary.index_of("sentiment_Positive").unwrap();
        assert_eq!(a.column(t).len(), 8500);
        assert_eq!(a.column(t).intersection(a.column(s)).len(), 7500);
    }

    #[test]
    fn corpus_counts_and_weeks() {
        let spec = demo_spec();
        let schedule = CorpusSchedule::default();
        let records = generate_corpus(&spec, &schedule, Condition::Vi).unwrap();
        assert_eq!(records.len(), 2080);
        let weeks: std::collections::BTreeSet<String> =
            records.iter().map(|r| r.week_key()).collect();
        assert_eq!(weeks.len(), 52);
        let ctx = crate::ingest::build_weekly_context(&records).unwrap();
        assert_eq!(ctx.object_count(), 52);
    }

    #[test]
    fn corpus_all_positive_spec() {
        let mut spec = demo_spec().without_couplings();
        for j in 0..3 {
            spec.marginals[j] = 0.0;
        }
        spec.marginals[sentiment_index(Sentiment::Positive)] = 1.0;
        for t in Topic::ALL {
            spec.marginals[topic_index(t)] = 0.0;
        }
        spec.marginals[topic_index(Topic::Positivity)] = 1.0;
        let schedule = CorpusSchedule { weeks: 4, comments_per_week: 25, ..Default::default() };
        let records = generate_corpus(&spec, &schedule, Condition::Hi).unwrap();
        assert!(records.iter().all(|r| r.sentiment == Sentiment::Positive));
        assert!(records.iter().all(|r| r.topic == Topic::Positivity));
        let ctx = crate::ingest::build_comment_context(&records).unwrap();
        assert_eq!(ctx.column(sentiment_index(Sentiment::Positive)).len(), 100);
        assert_eq!(ctx.column(topic_index(Topic::Positivity)).len(), 100);
    }

    #[test]
    fn corpus_negative_prevalence_tracks_target() {
        let spec = demo_spec().without_couplings();
        let schedule = CorpusSchedule { weeks: 50, comments_per_week: 40, ..Default::default() };
        let records = generate_corpus(&spec, &schedule, Condition::Vi).unwrap();
        assert_eq!(records.len(), 2000);
        let neg = records
            .iter()
            .filter(|r| r.sentiment == Sentiment::Negative)
            .count() as f64
            / records.len() as f64;
        assert!((neg - 0.125).abs() <= 0.02, "negative prevalence {neg}");
    }

    #[test]
    fn corpus_rejects_trait_couplings() {
        let mut spec = demo_spec();
        spec.couplings = vec![Coupling {
            attributes: vec!["Openness_high".into(), "sentiment_Positive".into()],
            joint: 0.5,
        }];
        assert!(matches!(
            generate_corpus(&spec, &CorpusSchedule::default(), Condition::Vi),
            Err(SynthError::UnsupportedCoupling(_))
        ));
    }

    #[test]
    fn spec_round_trip_from_toml() {
        let text = r#"
n_objects = 10
seed = 3
vocabulary = ["p", "q", "r"]
[marginals]
p = 0.5
q = 0.4
[[coupling]]
attributes = ["p", "q"]
joint = 0.3
"#;
        let spec = SynthSpec::from_toml_str(text).unwrap();
        assert_eq!(spec.marginals, vec![0.5, 0.4, 0.0]);
        assert_eq!(spec.couplings.len(), 1);
        assert!(SynthSpec::from_toml_str("n_objects = 0\nseed = 1").is_err());
    }
}
