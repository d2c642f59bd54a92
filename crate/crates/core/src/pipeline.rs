//! End-to-end pipeline behind the CLI subcommands: ingest records, build
//! contexts, mine concepts and rules, and emit deterministic reports.
//!
//! Every command is a pure function of (config, input bytes): stable sort
//! orders, six-significant-digit floats, no timestamps in payloads. Running
//! a command twice over the same input produces byte-identical trees.

use crate::concepts::{
    concept_count_grid_capped, enumerate_concepts_capped, iceberg_filter, ConceptError,
    FormalConcept, IcebergParams,
};
use crate::context::FormalContext;
use crate::diagnostic::{
    cluster_rules, compare_intents, concept_attribute_histogram, marginal_prevalence,
    sentiment_trait_crosssection, topic_profiles, DiagnosticError,
};
use crate::ingest::{
    build_comment_context_with, build_weekly_context_with, load_records, trait_thresholds,
    weekly_aggregate, CommentRecord, Condition, IngestError, LoadReport, RecordFormat, Sentiment,
    ThresholdScope, Topic, TraitThresholds,
};
use crate::io::{read_context, write_context, ContextIoError};
use crate::report::{csv_table, fmt6, headers, join_names, round6};
use crate::rules::{
    attribute_participation, mine_rules_capped, robustness_grid, rule_summary, AssociationRule,
    RuleError, RuleThresholds, StatTriple,
};
use crate::synth::{
    demo_spec, generate_context_pair, generate_demo_corpus, CorpusSchedule, SynthError, SynthSpec,
};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error("required context file missing: {0}")]
    MissingFile(PathBuf),
    #[error("input has no {0} records")]
    MissingCondition(Condition),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Concept(#[from] ConceptError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Diagnostic(#[from] DiagnosticError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    ContextIo(#[from] ContextIoError),
}

impl PipelineError {
    /// Process exit code: 0 success, 2 input/schema error, 3 resource cap,
    /// 1 internal error.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Concept(ConceptError::ResourceLimit { .. })
            | PipelineError::Rule(RuleError::ResourceLimit { .. }) => 3,
            PipelineError::Input { .. }
            | PipelineError::MissingFile(_)
            | PipelineError::MissingCondition(_)
            | PipelineError::Ingest(_)
            | PipelineError::Synth(_)
            | PipelineError::ContextIo(_) => 2,
            _ => 1,
        }
    }
}

/// Trait binarization scope for context construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BinarizationScope {
    /// Thresholds from each condition's own records (the default).
    PerCondition,
    /// Thresholds pooled over both conditions.
    Pooled,
}

/// Prevalence table granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrevalenceLevel {
    Comment,
    Weekly,
}

/// Effective run configuration, embedded verbatim in every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    /// Iceberg minimum temporal support.
    pub min_support: f64,
    /// Iceberg minimum intent size (inclusive).
    pub min_intent: usize,
    pub minsup: f64,
    pub minconf: f64,
    pub minlift: f64,
    pub max_antecedent: usize,
    pub consequent_size: usize,
    pub scope: BinarizationScope,
    pub prevalence_level: PrevalenceLevel,
    pub grid_supports: Vec<f64>,
    pub grid_intents: Vec<usize>,
    pub grid_minsups: Vec<f64>,
    pub grid_minconfs: Vec<f64>,
    /// Cap on enumerated concepts before the run aborts (exit code 3).
    pub concept_cap: usize,
    /// Cap on generated rule candidates before the run aborts (exit code 3).
    pub candidate_cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            min_support: 0.20,
            min_intent: 3,
            minsup: 0.01,
            minconf: 0.8,
            minlift: 1.2,
            max_antecedent: 3,
            consequent_size: 1,
            scope: BinarizationScope::PerCondition,
            prevalence_level: PrevalenceLevel::Comment,
            grid_supports: vec![0.10, 0.20],
            grid_intents: vec![2, 3],
            grid_minsups: vec![0.005, 0.01, 0.02],
            grid_minconfs: vec![0.8, 0.9],
            concept_cap: crate::concepts::DEFAULT_CONCEPT_CAP,
            candidate_cap: crate::rules::DEFAULT_CANDIDATE_CAP,
        }
    }
}

impl RunConfig {
    pub fn iceberg(&self) -> IcebergParams {
        IcebergParams::new(self.min_support, self.min_intent)
    }

    pub fn rule_thresholds(&self) -> RuleThresholds {
        RuleThresholds {
            min_support: self.minsup,
            min_confidence: self.minconf,
            min_lift: self.minlift,
            max_antecedent: self.max_antecedent,
            consequent_size: self.consequent_size,
        }
    }

    fn rule_grid(&self) -> Vec<RuleThresholds> {
        let mut grid = Vec::new();
        for &minsup in &self.grid_minsups {
            for &minconf in &self.grid_minconfs {
                grid.push(RuleThresholds {
                    min_support: minsup,
                    min_confidence: minconf,
                    ..self.rule_thresholds()
                });
            }
        }
        grid
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|source| PipelineError::Output { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, bytes).map_err(|source| PipelineError::Output { path: path.into(), source })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization");
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn read_input(path: &Path) -> Result<Vec<u8>, PipelineError> {
    fs::read(path).map_err(|source| PipelineError::Input { path: path.into(), source })
}

fn detect_format(path: &Path, forced: Option<RecordFormat>) -> RecordFormat {
    forced.unwrap_or_else(|| {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => RecordFormat::Csv,
            _ => RecordFormat::Jsonl,
        }
    })
}

fn split_by_condition(records: &[CommentRecord]) -> BTreeMap<Condition, Vec<CommentRecord>> {
    let mut map: BTreeMap<Condition, Vec<CommentRecord>> = BTreeMap::new();
    for r in records {
        map.entry(r.condition).or_default().push(r.clone());
    }
    map
}

/// Weekly and comment-level contexts for one condition.
pub struct ConditionContexts {
    pub weekly: FormalContext,
    pub comments: FormalContext,
}

/// Builds both context granularities for one condition under the given
/// binarization scope (`all_records` supplies the pooled thresholds).
pub fn build_condition_contexts(
    all_records: &[CommentRecord],
    own: &[CommentRecord],
    scope: BinarizationScope,
) -> Result<ConditionContexts, PipelineError> {
    let comment_thresholds = match scope {
        BinarizationScope::PerCondition => trait_thresholds(own, ThresholdScope::Pooled)?,
        BinarizationScope::Pooled => trait_thresholds(all_records, ThresholdScope::Pooled)?,
    };
    let weekly_thresholds = match scope {
        BinarizationScope::PerCondition => weekly_trait_means(own)?,
        BinarizationScope::Pooled => weekly_trait_means(all_records)?,
    };
    Ok(ConditionContexts {
        weekly: build_weekly_context_with(own, &weekly_thresholds)?,
        comments: build_comment_context_with(own, &comment_thresholds)?,
    })
}

/// Unweighted mean of weekly trait means, the weekly binarization threshold.
fn weekly_trait_means(records: &[CommentRecord]) -> Result<TraitThresholds, PipelineError> {
    let mut weeks = Vec::new();
    for (_, own) in split_by_condition(records) {
        weeks.extend(weekly_aggregate(&own)?);
    }
    if weeks.is_empty() {
        return Err(PipelineError::Ingest(IngestError::EmptyInput));
    }
    let mut sums = [0.0; 5];
    for w in &weeks {
        for (s, v) in sums.iter_mut().zip(w.mean_traits) {
            *s += v;
        }
    }
    Ok(TraitThresholds(sums.map(|s| s / weeks.len() as f64)))
}

fn context_file_name(condition: Condition, granularity: &str) -> String {
    format!("{}_{granularity}.json", condition.as_str().to_ascii_lowercase())
}

fn load_context_file(dir: &Path, condition: Condition, granularity: &str) -> Result<FormalContext, PipelineError> {
    let path = dir.join(context_file_name(condition, granularity));
    if !path.exists() {
        return Err(PipelineError::MissingFile(path));
    }
    let bytes = read_input(&path)?;
    Ok(read_context(bytes.as_slice())?)
}

#[derive(Serialize)]
struct IngestSummary {
    config: RunConfig,
    total_rows: usize,
    accepted: usize,
    rejected: usize,
    conditions: BTreeMap<String, usize>,
    context_files: Vec<String>,
}

/// `ingest`: parse records, build per-condition contexts, write them plus a
/// rejection report.
pub fn cmd_ingest(
    config: &RunConfig,
    input: &Path,
    format: Option<RecordFormat>,
    out: &Path,
) -> Result<(), PipelineError> {
    let bytes = read_input(input)?;
    let report = load_records(bytes.as_slice(), detect_format(input, format))?;
    write_ingest_outputs(config, &report, out)
}

fn write_ingest_outputs(
    config: &RunConfig,
    report: &LoadReport,
    out: &Path,
) -> Result<(), PipelineError> {
    let by_condition = split_by_condition(&report.records);
    let mut context_files = Vec::new();
    for (&condition, own) in &by_condition {
        let contexts = build_condition_contexts(&report.records, own, config.scope)?;
        for (granularity, ctx) in [("weekly", &contexts.weekly), ("comments", &contexts.comments)] {
            let name = context_file_name(condition, granularity);
            let mut buf = Vec::new();
            write_context(ctx, &mut buf)?;
            write_file(&out.join("contexts").join(&name), &buf)?;
            context_files.push(format!("contexts/{name}"));
        }
    }
    let reject_rows: Vec<[String; 2]> = report
        .rejected
        .iter()
        .map(|r| [r.line.to_string(), r.reason.clone()])
        .collect();
    write_file(
        &out.join("ingest").join("rejects.csv"),
        csv_table(headers::REJECTS, &reject_rows).as_bytes(),
    )?;
    write_json(
        &out.join("ingest").join("summary.json"),
        &IngestSummary {
            config: config.clone(),
            total_rows: report.records.len() + report.rejected.len(),
            accepted: report.records.len(),
            rejected: report.rejected.len(),
            conditions: by_condition
                .iter()
                .map(|(c, v)| (c.to_string(), v.len()))
                .collect(),
            context_files,
        },
    )
}

#[derive(Serialize)]
struct ConceptEntry {
    intent: Vec<String>,
    support: f64,
    extent_size: usize,
}

#[derive(Serialize)]
struct ConditionConcepts {
    raw_count: usize,
    filtered_count: usize,
    filtered: Vec<ConceptEntry>,
}

#[derive(Serialize)]
struct ConceptsReport {
    config: RunConfig,
    vi: ConditionConcepts,
    hi: ConditionConcepts,
    grid: Vec<ConceptGridEntry>,
}

#[derive(Serialize)]
struct ConceptGridEntry {
    intent: usize,
    support: f64,
    vi_raw: usize,
    vi_filtered: usize,
    hi_raw: usize,
    hi_filtered: usize,
}

fn concept_entries(ctx: &FormalContext, concepts: &[FormalConcept]) -> Vec<ConceptEntry> {
    let names = ctx.attribute_names();
    concepts
        .iter()
        .map(|c| ConceptEntry {
            intent: c.intent.iter().map(|j| names[j].clone()).collect(),
            support: round6(c.support),
            extent_size: c.extent.len(),
        })
        .collect()
}

fn concepts_csv(ctx: &FormalContext, concepts: &[FormalConcept]) -> String {
    let names = ctx.attribute_names();
    let rows: Vec<[String; 4]> = concepts
        .iter()
        .map(|c| {
            [
                c.intent.len().to_string(),
                fmt6(c.support),
                c.extent.len().to_string(),
                join_names(&c.intent.iter().map(|j| names[j].clone()).collect::<Vec<_>>()),
            ]
        })
        .collect();
    csv_table(headers::CONCEPTS, &rows)
}

struct ConceptsComputation {
    report: ConceptsReport,
    vi_csv: String,
    hi_csv: String,
    grid_csv: String,
}

fn compute_concepts(
    config: &RunConfig,
    vi: &FormalContext,
    hi: &FormalContext,
) -> Result<ConceptsComputation, PipelineError> {
    let params = config.iceberg();
    let concepts_vi = enumerate_concepts_capped(vi, config.concept_cap)?;
    let concepts_hi = enumerate_concepts_capped(hi, config.concept_cap)?;
    let filtered_vi = iceberg_filter(&concepts_vi, &params);
    let filtered_hi = iceberg_filter(&concepts_hi, &params);

    let grid_vi =
        concept_count_grid_capped(vi, &config.grid_supports, &config.grid_intents, config.concept_cap)?;
    let grid_hi =
        concept_count_grid_capped(hi, &config.grid_supports, &config.grid_intents, config.concept_cap)?;
    let mut grid: Vec<ConceptGridEntry> = grid_vi
        .iter()
        .zip(&grid_hi)
        .map(|(v, h)| ConceptGridEntry {
            intent: v.min_intent_size,
            support: round6(v.min_support),
            vi_raw: v.raw_count,
            vi_filtered: v.filtered_count,
            hi_raw: h.raw_count,
            hi_filtered: h.filtered_count,
        })
        .collect();
    // presentation order: intent descending, then support descending
    grid.sort_by(|a, b| {
        b.intent
            .cmp(&a.intent)
            .then(b.support.total_cmp(&a.support))
    });
    let grid_rows: Vec<[String; 6]> = grid
        .iter()
        .map(|r| {
            [
                r.intent.to_string(),
                fmt6(r.support),
                r.vi_raw.to_string(),
                r.vi_filtered.to_string(),
                r.hi_raw.to_string(),
                r.hi_filtered.to_string(),
            ]
        })
        .collect();

    Ok(ConceptsComputation {
        vi_csv: concepts_csv(vi, &filtered_vi),
        hi_csv: concepts_csv(hi, &filtered_hi),
        grid_csv: csv_table(headers::CONCEPT_GRID, &grid_rows),
        report: ConceptsReport {
            config: config.clone(),
            vi: ConditionConcepts {
                raw_count: concepts_vi.len(),
                filtered_count: filtered_vi.len(),
                filtered: concept_entries(vi, &filtered_vi),
            },
            hi: ConditionConcepts {
                raw_count: concepts_hi.len(),
                filtered_count: filtered_hi.len(),
                filtered: concept_entries(hi, &filtered_hi),
            },
            grid,
        },
    })
}

fn write_concepts_outputs(out: &Path, computed: &ConceptsComputation) -> Result<(), PipelineError> {
    let dir = out.join("concepts");
    write_file(&dir.join("concepts_vi.csv"), computed.vi_csv.as_bytes())?;
    write_file(&dir.join("concepts_hi.csv"), computed.hi_csv.as_bytes())?;
    write_file(&dir.join("concept_grid.csv"), computed.grid_csv.as_bytes())?;
    write_json(&dir.join("concepts.json"), &computed.report)
}

/// `concepts`: enumerate and filter weekly concepts for both conditions
/// from serialized contexts, plus the threshold ablation grid.
pub fn cmd_concepts(config: &RunConfig, contexts: &Path, out: &Path) -> Result<(), PipelineError> {
    let vi = load_context_file(contexts, Condition::Vi, "weekly")?;
    let hi = load_context_file(contexts, Condition::Hi, "weekly")?;
    let computed = compute_concepts(config, &vi, &hi)?;
    write_concepts_outputs(out, &computed)
}

#[derive(Serialize)]
struct RuleEntry {
    antecedent: Vec<String>,
    consequent: Vec<String>,
    support: f64,
    confidence: f64,
    lift: f64,
}

#[derive(Serialize)]
struct ClusterEntry {
    anchor: Option<String>,
    rule_count: usize,
    rules: Vec<RuleEntry>,
}

#[derive(Serialize)]
struct ConditionRules {
    rule_count: usize,
    rules: Vec<RuleEntry>,
    summary: Option<BTreeMap<String, SummaryEntry>>,
    clusters: Vec<ClusterEntry>,
}

#[derive(Serialize)]
struct SummaryEntry {
    mean: f64,
    median: f64,
    max: f64,
}

#[derive(Serialize)]
struct RuleGridEntry {
    minsup: f64,
    minconf: f64,
    hi_rules: usize,
    vi_rules: usize,
}

#[derive(Serialize)]
struct RulesReport {
    config: RunConfig,
    vi: ConditionRules,
    hi: ConditionRules,
    grid: Vec<RuleGridEntry>,
}

fn rule_entries(ctx: &FormalContext, rules: &[AssociationRule]) -> Vec<RuleEntry> {
    let names = ctx.attribute_names();
    let side = |s: &crate::context::AttrSet| -> Vec<String> {
        s.iter().map(|j| names[j].clone()).collect()
    };
    rules
        .iter()
        .map(|r| RuleEntry {
            antecedent: side(&r.antecedent),
            consequent: side(&r.consequent),
            support: round6(r.support),
            confidence: round6(r.confidence),
            lift: round6(r.lift),
        })
        .collect()
}

fn rules_csv(entries: &[RuleEntry]) -> String {
    let rows: Vec<[String; 5]> = entries
        .iter()
        .map(|r| {
            [
                join_names(&r.antecedent),
                join_names(&r.consequent),
                fmt6(r.support),
                fmt6(r.confidence),
                fmt6(r.lift),
            ]
        })
        .collect();
    csv_table(headers::RULES, &rows)
}

fn summary_map(s: &crate::rules::RuleSummary) -> BTreeMap<String, SummaryEntry> {
    let entry = |t: &StatTriple| SummaryEntry {
        mean: round6(t.mean),
        median: round6(t.median),
        max: round6(t.max),
    };
    BTreeMap::from([
        ("support".to_string(), entry(&s.support)),
        ("confidence".to_string(), entry(&s.confidence)),
        ("lift".to_string(), entry(&s.lift)),
    ])
}

/// Topic attributes are recognized by name prefix so library-mode contexts
/// with custom vocabularies cluster sensibly too.
fn topic_attrs_of(ctx: &FormalContext) -> crate::context::AttrSet {
    crate::context::AttrSet::from_indices(
        ctx.attribute_count(),
        ctx.attributes()
            .iter()
            .filter(|a| a.name().starts_with("topic_"))
            .map(|a| a.index()),
    )
}

fn condition_rules(
    config: &RunConfig,
    ctx: &FormalContext,
) -> Result<(Vec<AssociationRule>, ConditionRules), PipelineError> {
    let rules = mine_rules_capped(ctx, &config.rule_thresholds(), config.candidate_cap)?;
    let names = ctx.attribute_names();
    let clusters = cluster_rules(&rules, &topic_attrs_of(ctx))?
        .into_iter()
        .map(|c| ClusterEntry {
            anchor: c.anchor.map(|j| names[j].clone()),
            rule_count: c.rules.len(),
            rules: rule_entries(ctx, &c.rules),
        })
        .collect();
    let summary = rule_summary(&rules).ok().map(|s| summary_map(&s));
    let entry = ConditionRules {
        rule_count: rules.len(),
        rules: rule_entries(ctx, &rules),
        summary,
        clusters,
    };
    Ok((rules, entry))
}

struct RulesComputation {
    report: RulesReport,
    vi_csv: String,
    hi_csv: String,
    summary_csv: String,
    grid_csv: String,
    clusters_csv: String,
}

fn compute_rules(
    config: &RunConfig,
    vi: &FormalContext,
    hi: &FormalContext,
) -> Result<RulesComputation, PipelineError> {
    let (_, vi_entry) = condition_rules(config, vi)?;
    let (_, hi_entry) = condition_rules(config, hi)?;

    let mut summary_rows: Vec<[String; 5]> = Vec::new();
    for (label, entry) in [("HI", &hi_entry), ("VI", &vi_entry)] {
        if let Some(summary) = &entry.summary {
            for metric in ["support", "confidence", "lift"] {
                let s = &summary[metric];
                summary_rows.push([
                    label.to_string(),
                    metric.to_string(),
                    fmt6(s.mean),
                    fmt6(s.median),
                    fmt6(s.max),
                ]);
            }
        }
    }

    let grid = robustness_grid(hi, vi, &config.rule_grid())?;
    let grid_entries: Vec<RuleGridEntry> = grid
        .iter()
        .map(|row| RuleGridEntry {
            minsup: round6(row.thresholds.min_support),
            minconf: round6(row.thresholds.min_confidence),
            hi_rules: row.count_a,
            vi_rules: row.count_b,
        })
        .collect();
    let grid_rows: Vec<[String; 4]> = grid_entries
        .iter()
        .map(|r| {
            [
                fmt6(r.minsup),
                fmt6(r.minconf),
                r.hi_rules.to_string(),
                r.vi_rules.to_string(),
            ]
        })
        .collect();

    let mut cluster_rows: Vec<[String; 3]> = Vec::new();
    for (label, entry) in [("HI", &hi_entry), ("VI", &vi_entry)] {
        for c in &entry.clusters {
            cluster_rows.push([
                label.to_string(),
                c.anchor.clone().unwrap_or_else(|| "(none)".to_string()),
                c.rule_count.to_string(),
            ]);
        }
    }

    Ok(RulesComputation {
        vi_csv: rules_csv(&vi_entry.rules),
        hi_csv: rules_csv(&hi_entry.rules),
        summary_csv: csv_table(headers::RULE_SUMMARY, &summary_rows),
        grid_csv: csv_table(headers::RULE_GRID, &grid_rows),
        clusters_csv: csv_table(headers::CLUSTERS, &cluster_rows),
        report: RulesReport {
            config: config.clone(),
            vi: vi_entry,
            hi: hi_entry,
            grid: grid_entries,
        },
    })
}

fn write_rules_outputs(out: &Path, computed: &RulesComputation) -> Result<(), PipelineError> {
    let dir = out.join("rules");
    write_file(&dir.join("rules_vi.csv"), computed.vi_csv.as_bytes())?;
    write_file(&dir.join("rules_hi.csv"), computed.hi_csv.as_bytes())?;
    write_file(&dir.join("rule_summary.csv"), computed.summary_csv.as_bytes())?;
    write_file(&dir.join("rule_grid.csv"), computed.grid_csv.as_bytes())?;
    write_file(&dir.join("clusters.csv"), computed.clusters_csv.as_bytes())?;
    write_json(&dir.join("rules.json"), &computed.report)
}

/// `rules`: mine, summarize, cluster, and grid-sweep comment-level rules
/// for both conditions from serialized contexts.
pub fn cmd_rules(config: &RunConfig, contexts: &Path, out: &Path) -> Result<(), PipelineError> {
    let vi = load_context_file(contexts, Condition::Vi, "comments")?;
    let hi = load_context_file(contexts, Condition::Hi, "comments")?;
    let computed = compute_rules(config, &vi, &hi)?;
    write_rules_outputs(out, &computed)
}

#[derive(Serialize)]
struct PrevalenceEntry {
    attribute: String,
    hi: f64,
    vi: f64,
    delta: f64,
}

#[derive(Serialize)]
struct IntentComparisonReport {
    shared_count: usize,
    vi_only_count: usize,
    hi_only_count: usize,
    shared: Vec<Vec<String>>,
    vi_only: Vec<Vec<String>>,
    hi_only: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct TopicProfileEntry {
    condition: String,
    topic: String,
    n: usize,
    positive: Option<f64>,
    neutral: Option<f64>,
    negative: Option<f64>,
    mean_traits: Option<[f64; 5]>,
}

#[derive(Serialize)]
struct CrossSectionEntry {
    condition: String,
    sentiment: String,
    n: usize,
    mean_traits: Option<[f64; 5]>,
}

#[derive(Serialize)]
struct ParticipationEntry {
    attribute: String,
    hi_rules: usize,
    vi_rules: usize,
}

#[derive(Serialize)]
struct CompareReport {
    config: RunConfig,
    prevalence: Vec<PrevalenceEntry>,
    intent_comparison: IntentComparisonReport,
    rule_participation: Vec<ParticipationEntry>,
    topic_profiles: Vec<TopicProfileEntry>,
    crosssection: Vec<CrossSectionEntry>,
}

struct CompareComputation {
    report: CompareReport,
    prevalence_csv: String,
    histogram_csv: String,
    topic_profiles_csv: String,
    crosssection_csv: String,
}

fn compute_compare(
    config: &RunConfig,
    records: &[CommentRecord],
    vi: &ConditionContexts,
    hi: &ConditionContexts,
) -> Result<CompareComputation, PipelineError> {
    let names = vi.comments.attribute_names();

    // prevalence (comment-level by default)
    let (pa, pb) = match config.prevalence_level {
        PrevalenceLevel::Comment => (&hi.comments, &vi.comments),
        PrevalenceLevel::Weekly => (&hi.weekly, &vi.weekly),
    };
    let prevalence = marginal_prevalence(pa, pb)?;
    let prevalence_rows: Vec<[String; 4]> = prevalence
        .iter()
        .map(|r| {
            [
                r.attribute.clone(),
                fmt6(r.prevalence_a),
                fmt6(r.prevalence_b),
                fmt6(r.delta),
            ]
        })
        .collect();
    let prevalence_entries: Vec<PrevalenceEntry> = prevalence
        .iter()
        .map(|r| PrevalenceEntry {
            attribute: r.attribute.clone(),
            hi: round6(r.prevalence_a),
            vi: round6(r.prevalence_b),
            delta: round6(r.delta),
        })
        .collect();

    // weekly concepts, iceberg-filtered, compared by intent
    let params = config.iceberg();
    let vi_concepts = iceberg_filter(&enumerate_concepts_capped(&vi.weekly, config.concept_cap)?, &params);
    let hi_concepts = iceberg_filter(&enumerate_concepts_capped(&hi.weekly, config.concept_cap)?, &params);
    let cmp = compare_intents(&vi_concepts, &hi_concepts);
    let to_names = |sets: &[crate::context::AttrSet]| -> Vec<Vec<String>> {
        sets.iter()
            .map(|s| s.iter().map(|j| names[j].clone()).collect())
            .collect()
    };
    let intent_report = IntentComparisonReport {
        shared_count: cmp.shared.len(),
        vi_only_count: cmp.only_a.len(),
        hi_only_count: cmp.only_b.len(),
        shared: to_names(&cmp.shared),
        vi_only: to_names(&cmp.only_a),
        hi_only: to_names(&cmp.only_b),
    };

    // attribute histograms per category (shared / vi_only / hi_only)
    let m = names.len();
    let shared_concepts: Vec<FormalConcept> = vi_concepts
        .iter()
        .filter(|c| cmp.shared.contains(&c.intent))
        .cloned()
        .collect();
    let vi_only_concepts: Vec<FormalConcept> = vi_concepts
        .iter()
        .filter(|c| !cmp.shared.contains(&c.intent))
        .cloned()
        .collect();
    let hi_only_concepts: Vec<FormalConcept> = hi_concepts
        .iter()
        .filter(|c| !cmp.shared.contains(&c.intent))
        .cloned()
        .collect();
    let mut histogram_rows: Vec<[String; 3]> = Vec::new();
    for (category, concepts) in [
        ("shared", &shared_concepts),
        ("vi_only", &vi_only_concepts),
        ("hi_only", &hi_only_concepts),
    ] {
        for (attr, count) in concept_attribute_histogram(concepts, m) {
            histogram_rows.push([category.to_string(), names[attr].clone(), count.to_string()]);
        }
    }

    // rule participation per attribute (comment-level mining)
    let th = config.rule_thresholds();
    let vi_rules = mine_rules_capped(&vi.comments, &th, config.candidate_cap)?;
    let hi_rules = mine_rules_capped(&hi.comments, &th, config.candidate_cap)?;
    let rule_participation: Vec<ParticipationEntry> = (0..m)
        .map(|j| ParticipationEntry {
            attribute: names[j].clone(),
            hi_rules: attribute_participation(&hi_rules, j),
            vi_rules: attribute_participation(&vi_rules, j),
        })
        .collect();

    // topic profiles for all topics, both conditions
    let by_condition = split_by_condition(records);
    let mut topic_entries: Vec<TopicProfileEntry> = Vec::new();
    let mut topic_rows: Vec<[String; 11]> = Vec::new();
    for condition in [Condition::Hi, Condition::Vi] {
        let own = by_condition.get(&condition).map(|v| v.as_slice()).unwrap_or(&[]);
        let profiles = topic_profiles(own, &Topic::ALL);
        for topic in Topic::ALL {
            let found = profiles.profiles.iter().find(|p| p.topic == topic);
            let entry = TopicProfileEntry {
                condition: condition.to_string(),
                topic: topic.to_string(),
                n: found.map_or(0, |p| p.n),
                positive: found.map(|p| round6(p.sentiment_fractions[0])),
                neutral: found.map(|p| round6(p.sentiment_fractions[1])),
                negative: found.map(|p| round6(p.sentiment_fractions[2])),
                mean_traits: found.map(|p| p.mean_traits.map(round6)),
            };
            let fmt_opt = |v: Option<f64>| v.map(fmt6).unwrap_or_default();
            let traits = found.map(|p| p.mean_traits);
            let trait_cell = |k: usize| traits.map(|t| fmt6(t[k])).unwrap_or_default();
            topic_rows.push([
                entry.condition.clone(),
                entry.topic.clone(),
                entry.n.to_string(),
                fmt_opt(entry.positive),
                fmt_opt(entry.neutral),
                fmt_opt(entry.negative),
                trait_cell(0),
                trait_cell(1),
                trait_cell(2),
                trait_cell(3),
                trait_cell(4),
            ]);
            topic_entries.push(entry);
        }
    }

    // sentiment x condition trait cross-section (published row order:
    // sentiment blocks, HI before VI)
    let cross = sentiment_trait_crosssection(records);
    let mut cross_entries = Vec::new();
    let mut cross_rows: Vec<[String; 8]> = Vec::new();
    for sentiment in Sentiment::ALL {
        for condition in [Condition::Hi, Condition::Vi] {
            let row = cross
                .iter()
                .find(|r| r.condition == condition && r.sentiment == sentiment)
                .expect("crosssection covers all cells");
            let t = row.mean_traits;
            let cell = |k: usize| t.map(|v| fmt6(v[k])).unwrap_or_default();
            cross_rows.push([
                condition.to_string(),
                sentiment.as_str().to_string(),
                cell(2), // extraversion
                cell(4), // neuroticism
                cell(3), // agreeableness
                cell(1), // conscientiousness
                cell(0), // openness
                row.n.to_string(),
            ]);
            cross_entries.push(CrossSectionEntry {
                condition: condition.to_string(),
                sentiment: sentiment.as_str().to_string(),
                n: row.n,
                mean_traits: t.map(|v| v.map(round6)),
            });
        }
    }

    Ok(CompareComputation {
        prevalence_csv: csv_table(headers::PREVALENCE, &prevalence_rows),
        histogram_csv: csv_table(headers::CONCEPT_HISTOGRAM, &histogram_rows),
        topic_profiles_csv: csv_table(headers::TOPIC_PROFILES, &topic_rows),
        crosssection_csv: csv_table(headers::CROSSSECTION, &cross_rows),
        report: CompareReport {
            config: config.clone(),
            prevalence: prevalence_entries,
            intent_comparison: intent_report,
            rule_participation,
            topic_profiles: topic_entries,
            crosssection: cross_entries,
        },
    })
}

fn write_compare_outputs(out: &Path, computed: &CompareComputation) -> Result<(), PipelineError> {
    let dir = out.join("compare");
    write_file(&dir.join("prevalence.csv"), computed.prevalence_csv.as_bytes())?;
    write_file(&dir.join("concept_histogram.csv"), computed.histogram_csv.as_bytes())?;
    write_file(
        &dir.join("topic_profiles.csv"),
        computed.topic_profiles_csv.as_bytes(),
    )?;
    write_file(&dir.join("crosssection.csv"), computed.crosssection_csv.as_bytes())?;
    write_json(&dir.join("compare.json"), &computed.report)
}

fn load_both_conditions(
    config: &RunConfig,
    input: &Path,
    format: Option<RecordFormat>,
) -> Result<(LoadReport, ConditionContexts, ConditionContexts), PipelineError> {
    let bytes = read_input(input)?;
    let report = load_records(bytes.as_slice(), detect_format(input, format))?;
    let by_condition = split_by_condition(&report.records);
    for condition in Condition::ALL {
        if !by_condition.contains_key(&condition) {
            return Err(PipelineError::MissingCondition(condition));
        }
    }
    let vi = build_condition_contexts(&report.records, &by_condition[&Condition::Vi], config.scope)?;
    let hi = build_condition_contexts(&report.records, &by_condition[&Condition::Hi], config.scope)?;
    Ok((report, vi, hi))
}

/// `compare`: the full cross-condition diagnostic from a record stream
/// containing both conditions.
pub fn cmd_compare(
    config: &RunConfig,
    input: &Path,
    format: Option<RecordFormat>,
    out: &Path,
) -> Result<(), PipelineError> {
    let (report, vi, hi) = load_both_conditions(config, input, format)?;
    let computed = compute_compare(config, &report.records, &vi, &hi)?;
    write_compare_outputs(out, &computed)
}

/// What `synth` should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthMode {
    /// A matched-marginals context pair (A coupled, B decorrelated).
    ContextPair,
    /// A two-condition record corpus (first condition coupled).
    Corpus,
}

#[derive(Serialize)]
struct SynthSummary {
    mode: String,
    n_objects: usize,
    seed: u64,
    files: Vec<String>,
}

/// `synth`: generate the demonstration artifacts from a spec (bundled demo
/// spec when `spec` is `None`).
pub fn cmd_synth(
    spec: Option<&Path>,
    mode: SynthMode,
    schedule: &CorpusSchedule,
    out: &Path,
) -> Result<(), PipelineError> {
    let spec = match spec {
        Some(path) => {
            let bytes = read_input(path)?;
            let text = String::from_utf8(bytes)
                .map_err(|e| PipelineError::Synth(SynthError::Parse(e.to_string())))?;
            SynthSpec::from_toml_str(&text)?
        }
        None => demo_spec(),
    };
    let mut files = Vec::new();
    match mode {
        SynthMode::ContextPair => {
            let (a, b) = generate_context_pair(&spec)?;
            for (name, ctx) in [("context_a.json", &a), ("context_b.json", &b)] {
                let mut buf = Vec::new();
                write_context(ctx, &mut buf)?;
                write_file(&out.join(name), &buf)?;
                files.push(name.to_string());
            }
        }
        SynthMode::Corpus => {
            let records = generate_demo_corpus(&spec, schedule)?;
            let mut text = String::new();
            for r in &records {
                text.push_str(&serde_json::to_string(r).expect("record serialization"));
                text.push('\n');
            }
            write_file(&out.join("corpus.jsonl"), text.as_bytes())?;
            files.push("corpus.jsonl".to_string());
        }
    }
    write_json(
        &out.join("synth_summary.json"),
        &SynthSummary {
            mode: match mode {
                SynthMode::ContextPair => "context-pair".to_string(),
                SynthMode::Corpus => "corpus".to_string(),
            },
            n_objects: spec.n_objects,
            seed: spec.seed,
            files,
        },
    )
}

/// `report`: ingest plus concepts plus rules plus compare, one output tree.
pub fn cmd_report(
    config: &RunConfig,
    input: &Path,
    format: Option<RecordFormat>,
    out: &Path,
) -> Result<(), PipelineError> {
    let (report, vi, hi) = load_both_conditions(config, input, format)?;
    write_ingest_outputs(config, &report, out)?;
    let concepts = compute_concepts(config, &vi.weekly, &hi.weekly)?;
    write_concepts_outputs(out, &concepts)?;
    let rules = compute_rules(config, &vi.comments, &hi.comments)?;
    write_rules_outputs(out, &rules)?;
    let compare = compute_compare(config, &report.records, &vi, &hi)?;
    write_compare_outputs(out, &compare)?;
    write_json(&out.join("run_config.json"), config)
}
