//! Weekly concept mining with iceberg filtering.
//!
//! Generates a synthetic two-condition corpus, aggregates each condition by
//! ISO week, enumerates all weekly concepts, and shows how the iceberg
//! thresholds compress the concept space (the ablation grid).
//!
//! Run with:
//! ```bash
//! cargo run --example iceberg_concepts
//! ```

use discourse_fca::concepts::{concept_count_grid, enumerate_concepts, iceberg_filter, IcebergParams};
use discourse_fca::ingest::{build_weekly_context, Condition};
use discourse_fca::synth::{demo_spec, generate_demo_corpus, CorpusSchedule};

fn main() {
    let spec = demo_spec();
    let schedule = CorpusSchedule::default();
    let records = generate_demo_corpus(&spec, &schedule).unwrap();

    for condition in [Condition::Hi, Condition::Vi] {
        let own: Vec<_> = records
            .iter()
            .filter(|r| r.condition == condition)
            .cloned()
            .collect();
        let ctx = build_weekly_context(&own).unwrap();
        println!(
            "== {condition}: {} weeks, {} attributes",
            ctx.object_count(),
            ctx.attribute_count()
        );

        let concepts = enumerate_concepts(&ctx).unwrap();
        let params = IcebergParams::new(0.20, 3);
        let stable = iceberg_filter(&concepts, &params);
        println!(
            "{} raw concepts -> {} stable (support >= {}, intent >= {})",
            concepts.len(),
            stable.len(),
            params.min_support,
            params.min_intent_size
        );

        let names = ctx.attribute_names();
        println!("top stable concepts by support:");
        let mut by_support = stable.clone();
        by_support.sort_by(|a, b| b.support.total_cmp(&a.support));
        for c in by_support.iter().take(5) {
            let intent: Vec<&str> = c.intent.iter().map(|j| names[j].as_str()).collect();
            println!("  support {:.2}  {}", c.support, intent.join(" & "));
        }

        // threshold ablation: the compression is monotone in both knobs
        println!("ablation grid (intent, support -> kept):");
        let grid = concept_count_grid(&ctx, &[0.10, 0.20], &[2, 3]).unwrap();
        for row in &grid {
            println!(
                "  intent >= {}, support >= {:.2}: {} of {}",
                row.min_intent_size, row.min_support, row.filtered_count, row.raw_count
            );
        }
        println!();
    }
}
