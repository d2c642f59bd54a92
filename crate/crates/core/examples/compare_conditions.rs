//! Full cross-condition diagnostic: marginal prevalence, shared vs
//! condition-only concept intents, attribute histograms, topic profiles,
//! and the sentiment x trait cross-section.
//!
//! Run with:
//! ```bash
//! cargo run --example compare_conditions
//! ```

use discourse_fca::concepts::{enumerate_concepts, iceberg_filter, IcebergParams};
use discourse_fca::diagnostic::{
    compare_intents, concept_attribute_histogram, marginal_prevalence,
    sentiment_trait_crosssection, topic_profiles,
};
use discourse_fca::ingest::{build_comment_context, build_weekly_context, Condition, Topic};
use discourse_fca::synth::{demo_spec, generate_demo_corpus, CorpusSchedule};

fn main() {
    let records = generate_demo_corpus(&demo_spec(), &CorpusSchedule::default()).unwrap();
    let split = |c: Condition| -> Vec<_> {
        records.iter().filter(|r| r.condition == c).cloned().collect()
    };
    let vi = split(Condition::Vi);
    let hi = split(Condition::Hi);

    // marginal prevalence on comment-level contexts, sorted by delta
    let ctx_vi = build_comment_context(&vi).unwrap();
    let ctx_hi = build_comment_context(&hi).unwrap();
    let names = ctx_vi.attribute_names();
    println!("attribute prevalence (delta = VI - HI), largest gaps:");
    let rows = marginal_prevalence(&ctx_hi, &ctx_vi).unwrap();
    for r in rows.iter().take(3).chain(rows.iter().rev().take(3).rev()) {
        println!(
            "  {:<28} HI {:.3}  VI {:.3}  delta {:+.3}",
            r.attribute, r.prevalence_a, r.prevalence_b, r.delta
        );
    }

    // weekly stable concepts, shared vs condition-only
    let params = IcebergParams::new(0.20, 3);
    let weekly_vi = iceberg_filter(
        &enumerate_concepts(&build_weekly_context(&vi).unwrap()).unwrap(),
        &params,
    );
    let weekly_hi = iceberg_filter(
        &enumerate_concepts(&build_weekly_context(&hi).unwrap()).unwrap(),
        &params,
    );
    let cmp = compare_intents(&weekly_vi, &weekly_hi);
    println!(
        "\nstable weekly concepts: shared {}, VI-only {}, HI-only {}",
        cmp.shared.len(),
        cmp.only_a.len(),
        cmp.only_b.len()
    );

    let vi_only: Vec<_> = weekly_vi
        .iter()
        .filter(|c| !cmp.shared.contains(&c.intent))
        .cloned()
        .collect();
    println!("dominant attributes in VI-only stable concepts:");
    for (attr, count) in concept_attribute_histogram(&vi_only, names.len()).into_iter().take(5) {
        if count > 0 {
            println!("  {:<28} {count}", names[attr]);
        }
    }

    // topic-level sentiment profiles for the sensitive topics
    let sensitive = [
        Topic::ArtificialIdentity,
        Topic::AuthenticityCritique,
        Topic::BodyImage,
        Topic::MentalHealth,
    ];
    println!("\ntopic sentiment profiles (positive/neutral/negative):");
    for (label, own) in [("HI", &hi), ("VI", &vi)] {
        let out = topic_profiles(own, &sensitive);
        for p in &out.profiles {
            println!(
                "  {label} {:<22} n={:<5} {:.2}/{:.2}/{:.2}",
                p.topic.to_string(),
                p.n,
                p.sentiment_fractions[0],
                p.sentiment_fractions[1],
                p.sentiment_fractions[2]
            );
        }
        for t in &out.absent {
            println!("  {label} {:<22} (no records)", t.to_string());
        }
    }

    // trait means by condition x sentiment
    println!("\ntrait means by condition and sentiment (O C E A N):");
    for row in sentiment_trait_crosssection(&records) {
        match row.mean_traits {
            Some(t) => println!(
                "  {} {:<8} n={:<5} {:.2} {:.2} {:.2} {:.2} {:.2}",
                row.condition, row.sentiment.as_str(), row.n, t[0], t[1], t[2], t[3], t[4]
            ),
            None => println!("  {} {:<8} (empty cell)", row.condition, row.sentiment.as_str()),
        }
    }
}
