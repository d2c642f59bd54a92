//! Enriched comment records and construction of the two per-condition
//! contexts: weekly-aggregated (one object per ISO week) and comment-level
//! (one object per comment).
//!
//! Every context row carries exactly 7 of the 25 vocabulary bits: one
//! sentiment, one topic, and one high/low bin per trait.

use crate::context::{AttrSet, FormalContext};
use chrono::{DateTime, Datelike, Utc};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("no valid records in input")]
    EmptyInput,
    #[error("{rejected} of {total} rows rejected; input does not match the record schema")]
    SchemaMismatch { rejected: usize, total: usize },
    #[error("records span multiple conditions; expected a single condition")]
    MixedConditions,
    #[error("duplicate comment id: {0}")]
    DuplicateObject(String),
    #[error(transparent)]
    Context(#[from] crate::context::ContextError),
}

/// The two compared discourse conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "VI")]
    Vi,
    #[serde(rename = "HI")]
    Hi,
}

impl Condition {
    pub const ALL: [Condition; 2] = [Condition::Vi, Condition::Hi];

    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::Vi => "VI",
            Condition::Hi => "HI",
        }
    }

    fn parse(s: &str) -> Option<Condition> {
        match s.trim().to_ascii_uppercase().as_str() {
            "VI" => Some(Condition::Vi),
            "HI" => Some(Condition::Hi),
            _ => None,
        }
    }
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Three-class sentiment label, in vocabulary order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sentiment {
    Positive,
    Neutral,
    Negative,
}

impl Sentiment {
    pub const ALL: [Sentiment; 3] = [Sentiment::Positive, Sentiment::Neutral, Sentiment::Negative];

    pub fn as_str(&self) -> &'static str {
        match self {
            Sentiment::Positive => "Positive",
            Sentiment::Neutral => "Neutral",
            Sentiment::Negative => "Negative",
        }
    }

    fn parse(s: &str) -> Option<Sentiment> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Some(Sentiment::Positive),
            "neutral" => Some(Sentiment::Neutral),
            "negative" => Some(Sentiment::Negative),
            _ => None,
        }
    }
}

/// Twelve-class topic label, in vocabulary order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topic {
    Positivity,
    Appearance,
    AuthenticityCritique,
    ArtificialIdentity,
    Parasocial,
    BrandAds,
    Criticism,
    Humor,
    Performance,
    MentalHealth,
    BodyImage,
    SocialComparison,
}

impl Topic {
    pub const ALL: [Topic; 12] = [
        Topic::Positivity,
        Topic::Appearance,
        Topic::AuthenticityCritique,
        Topic::ArtificialIdentity,
        Topic::Parasocial,
        Topic::BrandAds,
        Topic::Criticism,
        Topic::Humor,
        Topic::Performance,
        Topic::MentalHealth,
        Topic::BodyImage,
        Topic::SocialComparison,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Topic::Positivity => "positivity",
            Topic::Appearance => "appearance",
            Topic::AuthenticityCritique => "authenticity_critique",
            Topic::ArtificialIdentity => "artificial_identity",
            Topic::Parasocial => "parasocial",
            Topic::BrandAds => "brand_ads",
            Topic::Criticism => "criticism",
            Topic::Humor => "humor",
            Topic::Performance => "performance",
            Topic::MentalHealth => "mental_health",
            Topic::BodyImage => "body_image",
            Topic::SocialComparison => "social_comparison",
        }
    }

    fn parse(s: &str) -> Option<Topic> {
        let norm = s.trim().to_ascii_lowercase();
        Topic::ALL.iter().copied().find(|t| t.as_str() == norm)
    }
}

impl std::fmt::Display for Topic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Big Five trait order used everywhere in this crate.
pub const TRAIT_NAMES: [&str; 5] = [
    "Openness",
    "Conscientiousness",
    "Extraversion",
    "Agreeableness",
    "Neuroticism",
];

/// Continuous Big Five scores, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraitScores {
    pub openness: f64,
    pub conscientiousness: f64,
    pub extraversion: f64,
    pub agreeableness: f64,
    pub neuroticism: f64,
}

impl TraitScores {
    pub fn as_array(&self) -> [f64; 5] {
        [
            self.openness,
            self.conscientiousness,
            self.extraversion,
            self.agreeableness,
            self.neuroticism,
        ]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        TraitScores {
            openness: a[0],
            conscientiousness: a[1],
            extraversion: a[2],
            agreeableness: a[3],
            neuroticism: a[4],
        }
    }
}

/// One enriched comment. Serializes to the flat record schema (trait
/// scores as top-level fields).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommentRecord {
    pub comment_id: String,
    pub influencer_id: String,
    pub condition: Condition,
    pub timestamp: DateTime<Utc>,
    pub sentiment: Sentiment,
    pub topic: Topic,
    #[serde(flatten)]
    pub traits: TraitScores,
}

impl CommentRecord {
    /// ISO year-week key, e.g. `2024-W05`.
    pub fn week_key(&self) -> String {
        let w = self.timestamp.iso_week();
        format!("{:04}-W{:02}", w.year(), w.week())
    }
}

/// The fixed 25-attribute vocabulary: 3 sentiment bits, 12 topic bits, and
/// a high/low bin pair per trait (trait-major, high before low).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeVocabulary {
    names: Vec<String>,
}

/// Width of the standard vocabulary.
pub const VOCAB_SIZE: usize = 25;

impl AttributeVocabulary {
    pub fn standard() -> Self {
        let mut names = Vec::with_capacity(VOCAB_SIZE);
        for s in Sentiment::ALL {
            names.push(format!("sentiment_{}", s.as_str()));
        }
        for t in Topic::ALL {
            names.push(format!("topic_{}", t.as_str()));
        }
        for t in TRAIT_NAMES {
            names.push(format!("{t}_high"));
            names.push(format!("{t}_low"));
        }
        AttributeVocabulary { names }
    }

    pub fn custom(names: Vec<String>) -> Self {
        AttributeVocabulary { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Index of a sentiment bit in the standard vocabulary.
pub fn sentiment_index(s: Sentiment) -> usize {
    s as usize
}

/// Index of a topic bit in the standard vocabulary.
pub fn topic_index(t: Topic) -> usize {
    3 + t as usize
}

/// Index of the high (or low) bin bit of trait `k` (0..5, vocabulary order).
pub fn trait_bin_index(k: usize, high: bool) -> usize {
    15 + 2 * k + if high { 0 } else { 1 }
}

/// Indices of all topic attributes in the standard vocabulary.
pub fn topic_attr_set() -> AttrSet {
    AttrSet::from_indices(VOCAB_SIZE, (3..15).collect::<Vec<_>>())
}

/// Input record encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    Jsonl,
    Csv,
}

/// A rejected input row with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedRow {
    pub line: usize,
    pub reason: String,
}

/// Parsed records plus the rejection report.
#[derive(Debug)]
pub struct LoadReport {
    pub records: Vec<CommentRecord>,
    pub rejected: Vec<RejectedRow>,
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    comment_id: String,
    influencer_id: String,
    condition: String,
    timestamp: String,
    sentiment: String,
    topic: String,
    openness: f64,
    conscientiousness: f64,
    extraversion: f64,
    agreeableness: f64,
    neuroticism: f64,
}

fn validate_raw(raw: RawRecord) -> Result<CommentRecord, String> {
    let condition = Condition::parse(&raw.condition)
        .ok_or_else(|| format!("unknown condition {:?}", raw.condition))?;
    let sentiment = Sentiment::parse(&raw.sentiment)
        .ok_or_else(|| format!("unknown sentiment {:?}", raw.sentiment))?;
    let topic =
        Topic::parse(&raw.topic).ok_or_else(|| format!("unknown topic {:?}", raw.topic))?;
    let timestamp = DateTime::parse_from_rfc3339(raw.timestamp.trim())
        .map_err(|e| format!("invalid timestamp {:?}: {e}", raw.timestamp))?
        .with_timezone(&Utc);
    let comment_id = raw.comment_id.trim().to_string();
    if comment_id.is_empty() {
        return Err("empty comment_id".into());
    }
    let traits = TraitScores {
        openness: raw.openness,
        conscientiousness: raw.conscientiousness,
        extraversion: raw.extraversion,
        agreeableness: raw.agreeableness,
        neuroticism: raw.neuroticism,
    };
    for (name, v) in TRAIT_NAMES.iter().zip(traits.as_array()) {
        if !v.is_finite() {
            return Err(format!("trait {name} is not finite"));
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(format!("trait out of range: {name} = {v}"));
        }
    }
    Ok(CommentRecord {
        comment_id,
        influencer_id: raw.influencer_id.trim().to_string(),
        condition,
        timestamp,
        sentiment,
        topic,
        traits,
    })
}

/// Parses a JSONL or CSV stream into records plus a line-numbered rejection
/// report. Aborts with [`IngestError::SchemaMismatch`] when more than half
/// of the rows fail, and with [`IngestError::EmptyInput`] when nothing
/// parses.
pub fn load_records(source: impl Read, format: RecordFormat) -> Result<LoadReport, IngestError> {
    let mut records = Vec::new();
    let mut rejected = Vec::new();
    match format {
        RecordFormat::Jsonl => {
            for (idx, line) in BufReader::new(source).lines().enumerate() {
                let line = line?;
                let lineno = idx + 1;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<RawRecord>(&line) {
                    Ok(raw) => match validate_raw(raw) {
                        Ok(r) => records.push(r),
                        Err(reason) => rejected.push(RejectedRow { line: lineno, reason }),
                    },
                    Err(e) => rejected.push(RejectedRow {
                        line: lineno,
                        reason: format!("invalid json: {e}"),
                    }),
                }
            }
        }
        RecordFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .trim(csv::Trim::All)
                .from_reader(source);
            let headers = match reader.headers() {
                Ok(h) => h.clone(),
                Err(e) => {
                    rejected.push(RejectedRow {
                        line: 1,
                        reason: format!("invalid csv header: {e}"),
                    });
                    csv::StringRecord::new()
                }
            };
            let mut raw = csv::StringRecord::new();
            loop {
                let more = reader.read_record(&mut raw);
                let lineno = raw
                    .position()
                    .map(|p| p.line() as usize)
                    .unwrap_or_else(|| reader.position().line() as usize);
                match more {
                    Ok(false) => break,
                    Ok(true) => match raw.deserialize::<RawRecord>(Some(&headers)) {
                        Ok(parsed) => match validate_raw(parsed) {
                            Ok(r) => records.push(r),
                            Err(reason) => rejected.push(RejectedRow { line: lineno, reason }),
                        },
                        Err(e) => rejected.push(RejectedRow {
                            line: lineno,
                            reason: format!("invalid row: {e}"),
                        }),
                    },
                    Err(e) => rejected.push(RejectedRow {
                        line: lineno,
                        reason: format!("invalid row: {e}"),
                    }),
                }
            }
        }
    }
    let total = records.len() + rejected.len();
    if records.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    if rejected.len() * 2 > total {
        return Err(IngestError::SchemaMismatch { rejected: rejected.len(), total });
    }
    Ok(LoadReport { records, rejected })
}

/// Which records feed the trait-mean thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdScope {
    /// Mean over all supplied records regardless of condition.
    Pooled,
    /// Mean over the records of one condition only.
    PerCondition(Condition),
}

/// Per-trait binarization thresholds, in [`TRAIT_NAMES`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraitThresholds(pub [f64; 5]);

fn trait_means<'a>(records: impl Iterator<Item = &'a CommentRecord>) -> Option<[f64; 5]> {
    let mut sums = [0.0; 5];
    let mut n = 0usize;
    for r in records {
        for (s, v) in sums.iter_mut().zip(r.traits.as_array()) {
            *s += v;
        }
        n += 1;
    }
    (n > 0).then(|| sums.map(|s| s / n as f64))
}

/// Arithmetic trait means over the selected scope.
pub fn trait_thresholds(
    records: &[CommentRecord],
    scope: ThresholdScope,
) -> Result<TraitThresholds, IngestError> {
    let means = match scope {
        ThresholdScope::Pooled => trait_means(records.iter()),
        ThresholdScope::PerCondition(c) => {
            trait_means(records.iter().filter(|r| r.condition == c))
        }
    };
    means.map(TraitThresholds).ok_or(IngestError::EmptyInput)
}

fn binarize_parts(
    sentiment: Sentiment,
    topic: Topic,
    traits: [f64; 5],
    thresholds: &TraitThresholds,
) -> AttrSet {
    let mut set = AttrSet::empty(VOCAB_SIZE);
    set.insert(sentiment_index(sentiment));
    set.insert(topic_index(topic));
    for (k, (v, t)) in traits.iter().zip(thresholds.0).enumerate() {
        // ties go to the high bin
        set.insert(trait_bin_index(k, *v >= t));
    }
    set
}

/// Binarizes one record against trait thresholds: exactly 7 bits set.
/// Trait values equal to their threshold bin as high.
///
/// Thresholds are corpus statistics, so re-deriving them after adding or
/// removing records may flip bins of unchanged records; binarization is
/// only stable while the underlying corpus is.
pub fn binarize_comment(record: &CommentRecord, thresholds: &TraitThresholds) -> AttrSet {
    binarize_parts(record.sentiment, record.topic, record.traits.as_array(), thresholds)
}

/// One ISO week of one condition, summarised by modal labels and mean traits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeeklyObject {
    pub week_key: String,
    pub modal_sentiment: Sentiment,
    pub modal_topic: Topic,
    pub mean_traits: [f64; 5],
    pub comment_count: usize,
}

fn modal<T: Copy + Eq>(counts: &mut dyn Iterator<Item = (T, usize)>) -> T {
    // ties break toward the earlier vocabulary entry; callers iterate in
    // vocabulary order, so strict `>` keeps the first maximum
    let mut best: Option<(T, usize)> = None;
    for (value, count) in counts {
        match best {
            Some((_, c)) if count <= c => {}
            _ => best = Some((value, count)),
        }
    }
    best.expect("non-empty week").0
}

/// Groups one condition's records into ISO weeks, chronologically ordered.
pub fn weekly_aggregate(records: &[CommentRecord]) -> Result<Vec<WeeklyObject>, IngestError> {
    if records.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    if records.iter().any(|r| r.condition != records[0].condition) {
        return Err(IngestError::MixedConditions);
    }
    // BTreeMap keyed by (iso_year, iso_week) keeps weeks chronological
    let mut weeks: BTreeMap<(i32, u32), Vec<&CommentRecord>> = BTreeMap::new();
    for r in records {
        let w = r.timestamp.iso_week();
        weeks.entry((w.year(), w.week())).or_default().push(r);
    }
    Ok(weeks
        .into_iter()
        .map(|((year, week), members)| {
            let mut sentiment_counts = [0usize; 3];
            let mut topic_counts = [0usize; 12];
            for r in &members {
                sentiment_counts[r.sentiment as usize] += 1;
                topic_counts[r.topic as usize] += 1;
            }
            let modal_sentiment = modal(
                &mut Sentiment::ALL
                    .iter()
                    .map(|&s| (s, sentiment_counts[s as usize])),
            );
            let modal_topic =
                modal(&mut Topic::ALL.iter().map(|&t| (t, topic_counts[t as usize])));
            let mean_traits =
                trait_means(members.iter().copied()).expect("week has members");
            WeeklyObject {
                week_key: format!("{year:04}-W{week:02}"),
                modal_sentiment,
                modal_topic,
                mean_traits,
                comment_count: members.len(),
            }
        })
        .collect())
}

/// Weekly context with explicit trait thresholds (for pooled scopes).
pub fn build_weekly_context_with(
    records: &[CommentRecord],
    thresholds: &TraitThresholds,
) -> Result<FormalContext, IngestError> {
    let weeks = weekly_aggregate(records)?;
    let vocab = AttributeVocabulary::standard();
    let labels = weeks.iter().map(|w| w.week_key.clone()).collect();
    let rows = weeks
        .iter()
        .map(|w| binarize_parts(w.modal_sentiment, w.modal_topic, w.mean_traits, thresholds))
        .collect();
    Ok(FormalContext::new(labels, vocab.names().to_vec(), rows)?)
}

/// Builds the weekly-aggregated context for one condition's records.
///
/// Trait bits are binarized against the unweighted mean of weekly trait
/// means for that condition, ties to high.
pub fn build_weekly_context(records: &[CommentRecord]) -> Result<FormalContext, IngestError> {
    let weeks = weekly_aggregate(records)?;
    let mut sums = [0.0; 5];
    for w in &weeks {
        for (s, v) in sums.iter_mut().zip(w.mean_traits) {
            *s += v;
        }
    }
    let thresholds = TraitThresholds(sums.map(|s| s / weeks.len() as f64));
    build_weekly_context_with(records, &thresholds)
}

/// Comment-level context with explicit trait thresholds.
pub fn build_comment_context_with(
    records: &[CommentRecord],
    thresholds: &TraitThresholds,
) -> Result<FormalContext, IngestError> {
    if records.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    if records.iter().any(|r| r.condition != records[0].condition) {
        return Err(IngestError::MixedConditions);
    }
    let mut seen = std::collections::HashSet::new();
    for r in records {
        if !seen.insert(r.comment_id.as_str()) {
            return Err(IngestError::DuplicateObject(r.comment_id.clone()));
        }
    }
    let vocab = AttributeVocabulary::standard();
    let labels = records.iter().map(|r| r.comment_id.clone()).collect();
    let rows = records
        .iter()
        .map(|r| binarize_comment(r, thresholds))
        .collect();
    Ok(FormalContext::new(labels, vocab.names().to_vec(), rows)?)
}

/// Builds the comment-level context for one condition's records, with trait
/// thresholds at that condition's global comment-level means.
pub fn build_comment_context(records: &[CommentRecord]) -> Result<FormalContext, IngestError> {
    let thresholds = trait_thresholds(records, ThresholdScope::Pooled)?;
    build_comment_context_with(records, &thresholds)
}


#[cfg(test)]
mod tests {
    use super::test_support::record;
    use super::*;

    const T5: [f64; 5] = [0.5, 0.5, 0.5, 0.5, 0.5];

    #[test]
    fn jsonl_parse_and_normalize() {
        let input = concat!(
            r#"{"comment_id":"c1","influencer_id":"i1","condition":"VI","timestamp":"2024-03-04T10:00:00Z","sentiment":"Positive","topic":"positivity","openness":0.5,"conscientiousness":0.5,"extraversion":0.5,"agreeableness":0.5,"neuroticism":0.5}"#,
            "\n",
            r#"{"comment_id":"c2","influencer_id":"i1","condition":"hi","timestamp":"2024-03-04T11:00:00Z","sentiment":"positive ","topic":" Mental_Health","openness":0.1,"conscientiousness":0.2,"extraversion":0.3,"agreeableness":0.4,"neuroticism":0.5}"#,
            "\n",
            r#"{"comment_id":"c3","influencer_id":"i1","condition":"VI","timestamp":"2024-03-04T12:00:00Z","sentiment":"positive","topic":"positivity","openness":1.7,"conscientiousness":0.5,"extraversion":0.5,"agreeableness":0.5,"neuroticism":0.5}"#,
            "\n",
        );
        let report = load_records(input.as_bytes(), RecordFormat::Jsonl).unwrap();
        assert_eq!(report.records.len(), 2);
        assert_eq!(report.records[1].condition, Condition::Hi);
        assert_eq!(report.records[1].sentiment, Sentiment::Positive);
        assert_eq!(report.records[1].topic, Topic::MentalHealth);
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(report.rejected[0].line, 3);
        assert!(report.rejected[0].reason.contains("trait out of range"));
    }

    #[test]
    fn csv_parse() {
        let input = "comment_id,influencer_id,condition,timestamp,sentiment,topic,openness,conscientiousness,extraversion,agreeableness,neuroticism\n\
            c1,i1,VI,2024-03-04T10:00:00Z,Negative,body_image,0.5,0.5,0.5,0.5,0.5\n\
            c2,i1,XX,2024-03-04T10:00:00Z,Negative,body_image,0.5,0.5,0.5,0.5,0.5\n\
            c3,i1,HI,2024-03-04T10:00:00Z,Neutral,humor,0,1,0.5,0.25,0.75\n";
        let report = load_records(input.as_bytes(), RecordFormat::Csv).unwrap();
        assert_eq!(report.records.len(), 2);
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(report.rejected[0].line, 3);
        assert!(report.rejected[0].reason.contains("condition"));
    }

    #[test]
    fn schema_mismatch_aborts() {
        let input = "not json\nnot json either\n{\"x\":1}\n";
        assert!(matches!(
            load_records(input.as_bytes(), RecordFormat::Jsonl),
            Err(IngestError::EmptyInput)
        ));
        let mixed = concat!(
            r#"{"comment_id":"c1","influencer_id":"i1","condition":"VI","timestamp":"2024-03-04T10:00:00Z","sentiment":"Positive","topic":"positivity","openness":0.5,"conscientiousness":0.5,"extraversion":0.5,"agreeableness":0.5,"neuroticism":0.5}"#,
            "\n",
            "garbage\n",
            "garbage\n",
        );
        assert!(matches!(
            load_records(mixed.as_bytes(), RecordFormat::Jsonl),
            Err(IngestError::SchemaMismatch { rejected: 2, total: 3 })
        ));
    }

    #[test]
    fn vocabulary_layout() {
        let v = AttributeVocabulary::standard();
        assert_eq!(v.len(), 25);
        assert_eq!(v.names()[0], "sentiment_Positive");
        assert_eq!(v.names()[2], "sentiment_Negative");
        assert_eq!(v.names()[3], "topic_positivity");
        assert_eq!(v.names()[14], "topic_social_comparison");
        assert_eq!(v.names()[15], "Openness_high");
        assert_eq!(v.names()[24], "Neuroticism_low");
        assert_eq!(v.index_of("topic_appearance"), Some(4));
        assert_eq!(topic_attr_set().indices(), (3..15).collect::<Vec<_>>());
    }

    #[test]
    fn thresholds_scopes() {
        let records = vec![
            record("c1", Condition::Vi, "2024-01-01T00:00:00Z", Sentiment::Positive, Topic::Positivity, [0.2; 5]),
            record("c2", Condition::Vi, "2024-01-01T01:00:00Z", Sentiment::Positive, Topic::Positivity, [0.8; 5]),
            record("c3", Condition::Hi, "2024-01-01T02:00:00Z", Sentiment::Positive, Topic::Positivity, [0.6; 5]),
        ];
        let pooled = trait_thresholds(&records, ThresholdScope::Pooled).unwrap();
        for t in pooled.0 {
            assert!((t - (0.2 + 0.8 + 0.6) / 3.0).abs() < 1e-12);
        }
        let vi = trait_thresholds(&records, ThresholdScope::PerCondition(Condition::Vi)).unwrap();
        for t in vi.0 {
            assert!((t - 0.5).abs() < 1e-12);
        }
        assert_ne!(pooled, vi);
        let single = trait_thresholds(&records[..1], ThresholdScope::Pooled).unwrap();
        assert_eq!(single.0, [0.2; 5]);
        assert!(matches!(
            trait_thresholds(&[], ThresholdScope::Pooled),
            Err(IngestError::EmptyInput)
        ));
    }

    #[test]
    fn binarize_tie_goes_high() {
        let r = record("c1", Condition::Vi, "2024-01-01T00:00:00Z", Sentiment::Positive, Topic::Positivity, T5);
        let bits = binarize_comment(&r, &TraitThresholds(T5));
        assert_eq!(bits.len(), 7);
        for k in 0..5 {
            assert!(bits.contains(trait_bin_index(k, true)));
            assert!(!bits.contains(trait_bin_index(k, false)));
        }
    }

    #[test]
    fn binarize_below_thresholds() {
        let r = record("c1", Condition::Vi, "2024-01-01T00:00:00Z", Sentiment::Positive, Topic::Positivity, [0.1; 5]);
        let bits = binarize_comment(&r, &TraitThresholds(T5));
        let expected: Vec<usize> = vec![
            sentiment_index(Sentiment::Positive),
            topic_index(Topic::Positivity),
            trait_bin_index(0, false),
            trait_bin_index(1, false),
            trait_bin_index(2, false),
            trait_bin_index(3, false),
            trait_bin_index(4, false),
        ]
        .into_iter()
        .collect();
        let mut expected = expected;
        expected.sort_unstable();
        assert_eq!(bits.indices(), expected);
        assert_eq!(bits.len(), 7);
    }

    #[test]
    fn weekly_modal_majority_and_tie() {
        let records = vec![
            record("c1", Condition::Vi, "2024-03-04T10:00:00Z", Sentiment::Positive, Topic::Humor, T5),
            record("c2", Condition::Vi, "2024-03-05T10:00:00Z", Sentiment::Positive, Topic::Criticism, T5),
            record("c3", Condition::Vi, "2024-03-06T10:00:00Z", Sentiment::Negative, Topic::Criticism, T5),
        ];
        let weeks = weekly_aggregate(&records).unwrap();
        assert_eq!(weeks.len(), 1);
        assert_eq!(weeks[0].modal_sentiment, Sentiment::Positive);
        assert_eq!(weeks[0].modal_topic, Topic::Criticism);
        assert_eq!(weeks[0].comment_count, 3);

        // 1-1 sentiment tie -> earlier vocabulary entry (Positive)
        let tie = vec![
            record("c1", Condition::Vi, "2024-03-04T10:00:00Z", Sentiment::Positive, Topic::Humor, T5),
            record("c2", Condition::Vi, "2024-03-05T10:00:00Z", Sentiment::Negative, Topic::Humor, T5),
        ];
        assert_eq!(weekly_aggregate(&tie).unwrap()[0].modal_sentiment, Sentiment::Positive);
    }

    #[test]
    fn iso_year_boundary_single_week() {
        // 2014-12-29 .. 2015-01-04 all belong to ISO week 2015-W01
        let records = vec![
            record("c1", Condition::Vi, "2014-12-29T10:00:00Z", Sentiment::Positive, Topic::Humor, T5),
            record("c2", Condition::Vi, "2015-01-04T10:00:00Z", Sentiment::Positive, Topic::Humor, T5),
        ];
        let weeks = weekly_aggregate(&records).unwrap();
        assert_eq!(weeks.len(), 1);
        assert_eq!(weeks[0].week_key, "2015-W01");
    }

    #[test]
    fn weekly_aggregate_partitions_records() {
        let records: Vec<CommentRecord> = (0..20)
            .map(|i| {
                record(
                    &format!("c{i}"),
                    Condition::Hi,
                    &format!("2024-01-{:02}T10:00:00Z", i % 28 + 1),
                    Sentiment::Neutral,
                    Topic::Humor,
                    T5,
                )
            })
            .collect();
        let weeks = weekly_aggregate(&records).unwrap();
        let total: usize = weeks.iter().map(|w| w.comment_count).sum();
        assert_eq!(total, records.len());
        assert!(matches!(weekly_aggregate(&[]), Err(IngestError::EmptyInput)));
    }

    #[test]
    fn mixed_conditions_rejected() {
        let records = vec![
            record("c1", Condition::Vi, "2024-03-04T10:00:00Z", Sentiment::Positive, Topic::Humor, T5),
            record("c2", Condition::Hi, "2024-03-05T10:00:00Z", Sentiment::Positive, Topic::Humor, T5),
        ];
        assert!(matches!(weekly_aggregate(&records), Err(IngestError::MixedConditions)));
        assert!(matches!(
            build_comment_context(&records),
            Err(IngestError::MixedConditions)
        ));
    }

    #[test]
    fn single_week_traits_all_high() {
        let records = vec![
            record("c1", Condition::Vi, "2024-03-04T10:00:00Z", Sentiment::Positive, Topic::Humor, [0.3, 0.4, 0.5, 0.6, 0.7]),
            record("c2", Condition::Vi, "2024-03-05T10:00:00Z", Sentiment::Positive, Topic::Humor, [0.5, 0.6, 0.7, 0.8, 0.9]),
        ];
        let ctx = build_weekly_context(&records).unwrap();
        assert_eq!(ctx.object_count(), 1);
        let row = ctx.row(0);
        assert_eq!(row.len(), 7);
        for k in 0..5 {
            assert!(row.contains(trait_bin_index(k, true)));
        }
    }

    #[test]
    fn weekly_context_matches_manual_binarization() {
        // Three weeks, hand-computed. Weekly O means: 0.2, 0.5, 0.8 ->
        // group mean 0.5; weeks 2 and 3 are O_high (tie at 0.5 goes high).
        let records = vec![
            record("c1", Condition::Vi, "2024-01-01T10:00:00Z", Sentiment::Positive, Topic::Humor, [0.2, 0.9, 0.1, 0.5, 0.5]),
            record("c2", Condition::Vi, "2024-01-08T10:00:00Z", Sentiment::Negative, Topic::Criticism, [0.5, 0.1, 0.9, 0.5, 0.5]),
            record("c3", Condition::Vi, "2024-01-15T10:00:00Z", Sentiment::Neutral, Topic::BodyImage, [0.8, 0.5, 0.5, 0.5, 0.5]),
        ];
        let ctx = build_weekly_context(&records).unwrap();
        assert_eq!(ctx.object_count(), 3);
        assert_eq!(ctx.objects()[0].label(), "2024-W01");
        // week 1: O 0.2 < 0.5 -> low; C 0.9 >= 0.5 -> high; E 0.1 -> low
        let row = ctx.row(0);
        assert!(row.contains(sentiment_index(Sentiment::Positive)));
        assert!(row.contains(topic_index(Topic::Humor)));
        assert!(row.contains(trait_bin_index(0, false)));
        assert!(row.contains(trait_bin_index(1, true)));
        assert!(row.contains(trait_bin_index(2, false)));
        assert!(row.contains(trait_bin_index(3, true)));
        assert!(row.contains(trait_bin_index(4, true)));
        // week 2: O 0.5 ties group mean -> high
        assert!(ctx.row(1).contains(trait_bin_index(0, true)));
        // every row has exactly 7 bits and one bin per trait
        for i in 0..3 {
            assert_eq!(ctx.row(i).len(), 7);
            for k in 0..5 {
                let hi = ctx.row(i).contains(trait_bin_index(k, true));
                let lo = ctx.row(i).contains(trait_bin_index(k, false));
                assert!(hi ^ lo);
            }
        }
    }

    #[test]
    fn comment_context_rows_and_duplicates() {
        let records = vec![
            record("c1", Condition::Vi, "2024-01-01T10:00:00Z", Sentiment::Positive, Topic::Humor, [0.2; 5]),
            record("c2", Condition::Vi, "2024-01-02T10:00:00Z", Sentiment::Negative, Topic::Criticism, [0.8; 5]),
            record("c3", Condition::Vi, "2024-01-03T10:00:00Z", Sentiment::Neutral, Topic::BodyImage, [0.5; 5]),
        ];
        let ctx = build_comment_context(&records).unwrap();
        assert_eq!(ctx.object_count(), 3);
        assert_eq!(ctx.attribute_count(), 25);
        // thresholds are the condition means: 0.5 each
        // c1: all low; c2: all high; c3: ties -> high
        assert!(ctx.row(0).contains(trait_bin_index(0, false)));
        assert!(ctx.row(1).contains(trait_bin_index(0, true)));
        assert!(ctx.row(2).contains(trait_bin_index(0, true)));
        for i in 0..3 {
            assert_eq!(ctx.row(i).len(), 7);
        }
        assert_eq!(ctx.objects()[0].label(), "c1");

        let mut dup = records.clone();
        dup[2].comment_id = "c1".into();
        assert!(matches!(
            build_comment_context(&dup),
            Err(IngestError::DuplicateObject(_))
        ));
    }
}
