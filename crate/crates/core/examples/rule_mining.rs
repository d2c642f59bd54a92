//! Comment-level association rules: mining, summary statistics, premise
//! clusters, and the threshold robustness grid.
//!
//! Run with:
//! ```bash
//! cargo run --example rule_mining
//! ```

use discourse_fca::diagnostic::cluster_rules;
use discourse_fca::ingest::{build_comment_context, topic_attr_set, Condition};
use discourse_fca::rules::{mine_rules, robustness_grid, rule_summary, RuleThresholds};
use discourse_fca::synth::{demo_spec, generate_demo_corpus, CorpusSchedule};

fn main() {
    let records = generate_demo_corpus(&demo_spec(), &CorpusSchedule::default()).unwrap();
    let split = |c: Condition| -> Vec<_> {
        records.iter().filter(|r| r.condition == c).cloned().collect()
    };
    let ctx_vi = build_comment_context(&split(Condition::Vi)).unwrap();
    let ctx_hi = build_comment_context(&split(Condition::Hi)).unwrap();

    let th = RuleThresholds::default();
    println!(
        "thresholds: minsup {} minconf {} lift > {} |X| <= {}",
        th.min_support, th.min_confidence, th.min_lift, th.max_antecedent
    );

    for (label, ctx) in [("HI", &ctx_hi), ("VI", &ctx_vi)] {
        let rules = mine_rules(ctx, &th).unwrap();
        println!("\n== {label}: {} rules", rules.len());
        let names = ctx.attribute_names();
        for r in rules.iter().take(5) {
            let x: Vec<&str> = r.antecedent.iter().map(|j| names[j].as_str()).collect();
            let y: Vec<&str> = r.consequent.iter().map(|j| names[j].as_str()).collect();
            println!(
                "  {} => {}  supp {:.3} conf {:.2} lift {:.2}",
                x.join(" & "),
                y.join(" & "),
                r.support,
                r.confidence,
                r.lift
            );
        }
        if let Ok(s) = rule_summary(&rules) {
            println!(
                "  summary: support mean {:.3} median {:.3} max {:.3}",
                s.support.mean, s.support.median, s.support.max
            );
            println!(
                "           lift    mean {:.2} median {:.2} max {:.2}",
                s.lift.mean, s.lift.median, s.lift.max
            );
        }
        let clusters = cluster_rules(&rules, &topic_attr_set()).unwrap();
        println!("  premise clusters:");
        for c in &clusters {
            let anchor = c.anchor.map_or("(personality-only)".to_string(), |j| names[j].clone());
            println!("    {anchor}: {} rules", c.rules.len());
        }
    }

    // rule counts across extraction thresholds, checked for both conditions
    println!("\nrobustness grid (lift > 1.2):");
    println!("{:>7} {:>8} {:>9} {:>9}", "minsup", "minconf", "HI rules", "VI rules");
    let mut grid = Vec::new();
    for minsup in [0.005, 0.01, 0.02] {
        for minconf in [0.8, 0.9] {
            grid.push(RuleThresholds { min_support: minsup, min_confidence: minconf, ..th });
        }
    }
    for row in robustness_grid(&ctx_hi, &ctx_vi, &grid).unwrap() {
        println!(
            "{:>7} {:>8} {:>9} {:>9}",
            row.thresholds.min_support, row.thresholds.min_confidence, row.count_a, row.count_b
        );
    }
}
