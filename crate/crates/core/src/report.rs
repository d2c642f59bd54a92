//! Deterministic number formatting and the CSV table layouts shared by the
//! CLI and the examples.
//!
//! Floats render at six significant digits everywhere a report is written,
//! so identical runs produce byte-identical files.

/// Rounds to six significant digits (for JSON payloads).
pub fn round6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(5 - mag);
    (x * factor).round() / factor
}

/// Formats with six significant digits, trailing zeros trimmed.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).clamp(0, 17) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// CSV headers, one per emitted table. The layouts mirror the published
/// table formats (prevalence, concept-count grid, rule listings, rule
/// summary, threshold grid, sentiment cross-section) so external rows can
/// be pasted alongside artifact output.
pub mod headers {
    pub const PREVALENCE: [&str; 4] = ["attribute", "hi", "vi", "delta"];
    pub const CONCEPT_GRID: [&str; 6] =
        ["intent", "support", "vi_raw", "vi_filtered", "hi_raw", "hi_filtered"];
    pub const CONCEPTS: [&str; 4] = ["intent_size", "support", "extent_size", "intent"];
    pub const RULES: [&str; 5] = ["antecedent", "consequent", "support", "confidence", "lift"];
    pub const RULE_SUMMARY: [&str; 5] = ["condition", "metric", "mean", "median", "max"];
    pub const RULE_GRID: [&str; 4] = ["minsup", "minconf", "hi_rules", "vi_rules"];
    pub const CROSSSECTION: [&str; 8] = [
        "condition",
        "sentiment",
        "extraversion",
        "neuroticism",
        "agreeableness",
        "conscientiousness",
        "openness",
        "n",
    ];
    pub const TOPIC_PROFILES: [&str; 11] = [
        "condition",
        "topic",
        "n",
        "positive",
        "neutral",
        "negative",
        "openness",
        "conscientiousness",
        "extraversion",
        "agreeableness",
        "neuroticism",
    ];
    pub const CONCEPT_HISTOGRAM: [&str; 3] = ["category", "attribute", "count"];
    pub const CLUSTERS: [&str; 3] = ["condition", "anchor", "rule_count"];
    pub const REJECTS: [&str; 2] = ["line", "reason"];
}

/// Builds a CSV document from a header and string rows.
pub fn csv_table<const W: usize>(header: [&str; W], rows: &[[String; W]]) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(header).expect("csv header");
    for row in rows {
        wtr.write_record(row.iter()).expect("csv row");
    }
    String::from_utf8(wtr.into_inner().expect("csv flush")).expect("csv utf8")
}

/// Joins attribute names for a rule side or intent: `a;b;c`.
pub fn join_names(names: &[String]) -> String {
    names.join(";")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt6_sig_digits() {
        assert_eq!(fmt6(0.0), "0");
        assert_eq!(fmt6(2.0 / 3.0), "0.666667");
        assert_eq!(fmt6(0.125), "0.125");
        assert_eq!(fmt6(1.0), "1");
        assert_eq!(fmt6(-0.205), "-0.205");
        assert_eq!(fmt6(123456.0), "123456");
        assert_eq!(fmt6(1234567.0), "1234567");
        assert_eq!(fmt6(0.0000001), "0.0000001");
        assert_eq!(fmt6(1.3199999999999), "1.32");
    }

    #[test]
    fn round6_stable() {
        assert_eq!(round6(2.0 / 3.0), 0.666667);
        assert_eq!(round6(0.0), 0.0);
        assert_eq!(round6(1.3199049), 1.3199);
        assert_eq!(round6(131.990521), 131.991);
    }

    #[test]
    fn csv_escapes() {
        let rows = vec![["has,comma".to_string(), "plain".to_string()]];
        let out = csv_table(["a", "b"], &rows);
        assert_eq!(out, "a,b\n\"has,comma\",plain\n");
    }
}
