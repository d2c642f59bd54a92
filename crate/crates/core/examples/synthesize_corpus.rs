//! Corpus generation round trip: synthesize records, serialize to JSONL,
//! reload through the ingest path, and verify the structural invariants
//! (25-attribute vocabulary, exactly 7 bits per row, one bin per trait).
//!
//! Run with:
//! ```bash
//! cargo run --example synthesize_corpus
//! ```

use discourse_fca::ingest::{
    load_records, trait_bin_index, Condition, RecordFormat, VOCAB_SIZE,
};
use discourse_fca::pipeline::{build_condition_contexts, BinarizationScope};
use discourse_fca::synth::{demo_spec, generate_demo_corpus, CorpusSchedule};

fn main() {
    let spec = demo_spec();
    let schedule = CorpusSchedule { weeks: 52, comments_per_week: 40, ..Default::default() };
    let records = generate_demo_corpus(&spec, &schedule).unwrap();
    println!(
        "generated {} records across both conditions ({} per condition)",
        records.len(),
        schedule.weeks * schedule.comments_per_week
    );

    // serialize as JSONL and read back through the loader
    let mut jsonl = String::new();
    for r in &records {
        jsonl.push_str(&serde_json::to_string(r).unwrap());
        jsonl.push('\n');
    }
    let report = load_records(jsonl.as_bytes(), RecordFormat::Jsonl).unwrap();
    assert_eq!(report.records.len(), records.len());
    assert!(report.rejected.is_empty());
    println!("round trip through the JSONL loader: 0 rejects");

    for condition in [Condition::Hi, Condition::Vi] {
        let own: Vec<_> = report
            .records
            .iter()
            .filter(|r| r.condition == condition)
            .cloned()
            .collect();
        let contexts =
            build_condition_contexts(&report.records, &own, BinarizationScope::PerCondition)
                .unwrap();
        assert_eq!(contexts.comments.attribute_count(), VOCAB_SIZE);
        for i in 0..contexts.comments.object_count() {
            assert_eq!(contexts.comments.row(i).len(), 7);
        }
        for i in 0..contexts.weekly.object_count() {
            let row = contexts.weekly.row(i);
            assert_eq!(row.len(), 7);
            for k in 0..5 {
                assert!(row.contains(trait_bin_index(k, true)) ^ row.contains(trait_bin_index(k, false)));
            }
        }
        println!(
            "{condition}: comment context {} x {}, weekly context {} x {} — all rows carry 7 bits",
            contexts.comments.object_count(),
            contexts.comments.attribute_count(),
            contexts.weekly.object_count(),
            contexts.weekly.attribute_count()
        );
    }

    let week_count = {
        let mut weeks: Vec<String> = report.records.iter().map(|r| r.week_key()).collect();
        weeks.sort();
        weeks.dedup();
        weeks.len()
    };
    println!("distinct ISO weeks in the corpus: {week_count}");
}
