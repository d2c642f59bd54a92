use clap::{Args, Parser, Subcommand, ValueEnum};
use discourse_fca::ingest::RecordFormat;
use discourse_fca::pipeline::{
    cmd_compare, cmd_concepts, cmd_ingest, cmd_report, cmd_rules, cmd_synth, BinarizationScope,
    PrevalenceLevel, RunConfig, SynthMode,
};
use discourse_fca::synth::CorpusSchedule;
use std::path::PathBuf;
use std::process::ExitCode;

/// Structural discourse diagnostics: formal concepts, association rules,
/// and cross-condition comparison over enriched comment records.
#[derive(Parser)]
#[command(name = "discourse-fca", version, about)]
struct Cli {
    /// Size of the worker thread pool (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    PerCondition,
    Pooled,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Comment,
    Weekly,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    ContextPair,
    Corpus,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Iceberg minimum temporal support for weekly concepts.
    #[arg(long, default_value_t = 0.20)]
    min_support: f64,
    /// Iceberg minimum intent size (inclusive).
    #[arg(long, default_value_t = 3)]
    min_intent: usize,
    /// Minimum rule support.
    #[arg(long, default_value_t = 0.01)]
    minsup: f64,
    /// Minimum rule confidence.
    #[arg(long, default_value_t = 0.8)]
    minconf: f64,
    /// Strict minimum rule lift.
    #[arg(long, default_value_t = 1.2)]
    minlift: f64,
    /// Largest antecedent size.
    #[arg(long, default_value_t = 3)]
    max_antecedent: usize,
    /// Consequent size (1 = singleton consequents).
    #[arg(long, default_value_t = 1)]
    consequent_size: usize,
    /// Trait binarization scope.
    #[arg(long, value_enum, default_value_t = ScopeArg::PerCondition)]
    scope: ScopeArg,
    /// Prevalence table granularity.
    #[arg(long, value_enum, default_value_t = LevelArg::Comment)]
    prevalence_level: LevelArg,
    /// Concept-grid support thresholds.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.10, 0.20])]
    grid_supports: Vec<f64>,
    /// Concept-grid intent-size thresholds.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3])]
    grid_intents: Vec<usize>,
    /// Rule-grid support thresholds.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.005, 0.01, 0.02])]
    grid_minsups: Vec<f64>,
    /// Rule-grid confidence thresholds.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.8, 0.9])]
    grid_minconfs: Vec<f64>,
    /// Abort (exit 3) past this many enumerated concepts.
    #[arg(long, default_value_t = discourse_fca::concepts::DEFAULT_CONCEPT_CAP)]
    concept_cap: usize,
    /// Abort (exit 3) past this many rule candidates.
    #[arg(long, default_value_t = discourse_fca::rules::DEFAULT_CANDIDATE_CAP)]
    candidate_cap: usize,
}

impl ThresholdArgs {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            min_support: self.min_support,
            min_intent: self.min_intent,
            minsup: self.minsup,
            minconf: self.minconf,
            minlift: self.minlift,
            max_antecedent: self.max_antecedent,
            consequent_size: self.consequent_size,
            scope: match self.scope {
                ScopeArg::PerCondition => BinarizationScope::PerCondition,
                ScopeArg::Pooled => BinarizationScope::Pooled,
            },
            prevalence_level: match self.prevalence_level {
                LevelArg::Comment => PrevalenceLevel::Comment,
                LevelArg::Weekly => PrevalenceLevel::Weekly,
            },
            grid_supports: self.grid_supports.clone(),
            grid_intents: self.grid_intents.clone(),
            grid_minsups: self.grid_minsups.clone(),
            grid_minconfs: self.grid_minconfs.clone(),
            concept_cap: self.concept_cap,
            candidate_cap: self.candidate_cap,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse records and serialize per-condition contexts.
    Ingest {
        /// Record stream (JSONL or CSV).
        #[arg(long)]
        input: PathBuf,
        /// Input encoding (default: by file extension).
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Enumerate and filter weekly concepts from serialized contexts.
    Concepts {
        /// Directory holding vi_weekly.json and hi_weekly.json.
        #[arg(long)]
        contexts: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Mine comment-level rules from serialized contexts.
    Rules {
        /// Directory holding vi_comments.json and hi_comments.json.
        #[arg(long)]
        contexts: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Cross-condition comparison from a two-condition record stream.
    Compare {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Generate demonstration data (context pair or record corpus).
    Synth {
        /// Generator spec (TOML); bundled demo spec when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModeArg::ContextPair)]
        mode: ModeArg,
        /// Corpus mode: number of ISO weeks.
        #[arg(long, default_value_t = 52)]
        weeks: usize,
        /// Corpus mode: comments per week.
        #[arg(long, default_value_t = 40)]
        per_week: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the whole pipeline: ingest, concepts, rules, compare.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
}

fn record_format(arg: Option<FormatArg>) -> Option<RecordFormat> {
    arg.map(|f| match f {
        FormatArg::Jsonl => RecordFormat::Jsonl,
        FormatArg::Csv => RecordFormat::Csv,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // a fixed pool size; results are identical for any setting
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(1);
        }
    }

    let result = match &cli.command {
        Command::Ingest { input, format, out, thresholds } => {
            cmd_ingest(&thresholds.to_config(), input, record_format(*format), out)
        }
        Command::Concepts { contexts, out, thresholds } => {
            cmd_concepts(&thresholds.to_config(), contexts, out)
        }
        Command::Rules { contexts, out, thresholds } => {
            cmd_rules(&thresholds.to_config(), contexts, out)
        }
        Command::Compare { input, format, out, thresholds } => {
            cmd_compare(&thresholds.to_config(), input, record_format(*format), out)
        }
        Command::Synth { spec, mode, weeks, per_week, out } => {
            let schedule = CorpusSchedule {
                weeks: *weeks,
                comments_per_week: *per_week,
                ..Default::default()
            };
            let mode = match mode {
                ModeArg::ContextPair => SynthMode::ContextPair,
                ModeArg::Corpus => SynthMode::Corpus,
            };
            cmd_synth(spec.as_deref(), mode, &schedule, out)
        }
        Command::Report { input, format, out, thresholds } => {
            cmd_report(&thresholds.to_config(), input, record_format(*format), out)
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
