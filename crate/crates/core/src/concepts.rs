//! Exhaustive formal-concept enumeration and iceberg filtering.
//!
//! Enumeration is exact (lectic-order closure generation), so every result
//! downstream of it can be checked against brute force over all attribute
//! subsets. Approximate mining is deliberately out of scope.

use crate::context::{AttrSet, ContextError, FormalContext, ObjSet};
use thiserror::Error;

/// Default cap on enumerated concepts; a dense adversarial context fails
/// loudly instead of exhausting memory.
pub const DEFAULT_CONCEPT_CAP: usize = 10_000_000;

#[derive(Debug, Error)]
pub enum ConceptError {
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error("concept count exceeded cap of {cap}")]
    ResourceLimit { cap: usize },
    #[error("threshold lists must be non-empty")]
    EmptyGrid,
    #[error("concept list is not a complete concept set: {reason}")]
    IncompleteConceptSet { reason: String },
}

/// A formal concept: extent and intent derive to each other; `support` is
/// `|extent| / |G|`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalConcept {
    pub extent: ObjSet,
    pub intent: AttrSet,
    pub support: f64,
}

impl FormalConcept {
    pub fn intent_size(&self) -> usize {
        self.intent.len()
    }

    pub fn extent_size(&self) -> usize {
        self.extent.len()
    }
}

/// Iceberg thresholds: keep concepts with `support >= min_support` and
/// `|intent| >= min_intent_size`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcebergParams {
    pub min_support: f64,
    pub min_intent_size: usize,
}

impl IcebergParams {
    pub fn new(min_support: f64, min_intent_size: usize) -> Self {
        assert!(
            (0.0..=1.0).contains(&min_support),
            "min_support must be in [0,1]"
        );
        IcebergParams { min_support, min_intent_size }
    }
}

/// One row of the concept-count ablation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptGridRow {
    pub min_support: f64,
    pub min_intent_size: usize,
    pub raw_count: usize,
    pub filtered_count: usize,
}

/// Enumerates every formal concept of `ctx` exactly once, canonically
/// sorted (intent cardinality ascending, then lexicographic attribute
/// indices), with the default concept cap.
pub fn enumerate_concepts(ctx: &FormalContext) -> Result<Vec<FormalConcept>, ConceptError> {
    enumerate_concepts_capped(ctx, DEFAULT_CONCEPT_CAP)
}

/// As [`enumerate_concepts`] with an explicit concept cap.
pub fn enumerate_concepts_capped(
    ctx: &FormalContext,
    cap: usize,
) -> Result<Vec<FormalConcept>, ConceptError> {
    let m = ctx.attribute_count();
    let g = ctx.object_count() as f64;
    let mut concepts = Vec::new();

    // Lectic-order closure generation: starting from the closure of the
    // empty set, repeatedly find the next closed set in lectic order by
    // closing A∩{0..i-1} ∪ {i} for descending i and accepting the first
    // candidate whose new attributes all lie at positions >= i.
    let mut current = ctx.closure_attrs(&AttrSet::empty(m))?;
    loop {
        let extent = ctx.derive_objects(&current)?;
        concepts.push(FormalConcept {
            support: extent.len() as f64 / g,
            extent,
            intent: current.clone(),
        });
        if concepts.len() > cap {
            return Err(ConceptError::ResourceLimit { cap });
        }

        let mut next = None;
        for i in (0..m).rev() {
            if current.contains(i) {
                continue;
            }
            let mut seed = current.clone();
            seed.0.truncate_below(i);
            seed.insert(i);
            let candidate = ctx.closure_attrs(&seed)?;
            // canonical: nothing new below i
            let mut below = candidate.clone();
            below.0.truncate_below(i);
            let mut prefix = current.clone();
            prefix.0.truncate_below(i);
            prefix.insert(i);
            if below.is_subset(&prefix) {
                next = Some(candidate);
                break;
            }
        }
        match next {
            Some(c) => current = c,
            None => break,
        }
    }

    concepts.sort_by_cached_key(|c| (c.intent.len(), c.intent.indices()));
    Ok(concepts)
}

/// Keeps concepts passing both iceberg thresholds, preserving input order.
pub fn iceberg_filter(concepts: &[FormalConcept], params: &IcebergParams) -> Vec<FormalConcept> {
    concepts
        .iter()
        .filter(|c| c.support >= params.min_support && c.intent.len() >= params.min_intent_size)
        .cloned()
        .collect()
}

/// Raw and filtered concept counts over the cartesian grid of thresholds.
///
/// `raw_count` is identical in every row; `filtered_count` is weakly
/// decreasing in each threshold.
pub fn concept_count_grid(
    ctx: &FormalContext,
    support_values: &[f64],
    intent_values: &[usize],
) -> Result<Vec<ConceptGridRow>, ConceptError> {
    concept_count_grid_capped(ctx, support_values, intent_values, DEFAULT_CONCEPT_CAP)
}

/// As [`concept_count_grid`] with an explicit concept cap.
pub fn concept_count_grid_capped(
    ctx: &FormalContext,
    support_values: &[f64],
    intent_values: &[usize],
    cap: usize,
) -> Result<Vec<ConceptGridRow>, ConceptError> {
    if support_values.is_empty() || intent_values.is_empty() {
        return Err(ConceptError::EmptyGrid);
    }
    let concepts = enumerate_concepts_capped(ctx, cap)?;
    let mut rows = Vec::with_capacity(support_values.len() * intent_values.len());
    for &s in support_values {
        for &k in intent_values {
            let params = IcebergParams::new(s, k);
            rows.push(ConceptGridRow {
                min_support: s,
                min_intent_size: k,
                raw_count: concepts.len(),
                filtered_count: iceberg_filter(&concepts, &params).len(),
            });
        }
    }
    Ok(rows)
}

/// Hasse edges of the concept lattice: the transitive reduction of
/// extent inclusion, as `(parent_index, child_index)` pairs into the
/// canonical concept list (parent = larger extent).
///
/// Errors if the list is detectably not the complete concept set of one
/// context: duplicate intents/extents, a missing top, or a pairwise extent
/// intersection that is not itself an extent in the list.
pub fn covering_edges(concepts: &[FormalConcept]) -> Result<Vec<(usize, usize)>, ConceptError> {
    if concepts.is_empty() {
        return Ok(Vec::new());
    }
    let mut intents = std::collections::HashSet::new();
    let mut extents = std::collections::HashSet::new();
    for c in concepts {
        if !intents.insert(c.intent.clone()) {
            return Err(ConceptError::IncompleteConceptSet {
                reason: format!("duplicate intent {:?}", c.intent.indices()),
            });
        }
        if !extents.insert(c.extent.clone()) {
            return Err(ConceptError::IncompleteConceptSet {
                reason: format!("duplicate extent {:?}", c.extent.indices()),
            });
        }
    }
    // Extents of a complete concept set form a closure system: closed under
    // pairwise intersection and containing the full object set.
    if !extents.contains(&ObjSet::full(concepts[0].extent.width())) {
        return Err(ConceptError::IncompleteConceptSet {
            reason: "missing top concept (full object set)".into(),
        });
    }
    for (i, a) in concepts.iter().enumerate() {
        for b in concepts.iter().skip(i + 1) {
            let meet = a.extent.intersection(&b.extent);
            if !extents.contains(&meet) {
                return Err(ConceptError::IncompleteConceptSet {
                    reason: format!(
                        "extent intersection {:?} missing from the set",
                        meet.indices()
                    ),
                });
            }
        }
    }

    let mut edges = Vec::new();
    for (child, c) in concepts.iter().enumerate() {
        for (parent, p) in concepts.iter().enumerate() {
            if parent == child
                || !c.extent.is_subset(&p.extent)
                || c.extent == p.extent
            {
                continue;
            }
            let covered = concepts.iter().enumerate().any(|(k, z)| {
                k != parent
                    && k != child
                    && c.extent.is_subset(&z.extent)
                    && z.extent.is_subset(&p.extent)
                    && z.extent != c.extent
                    && z.extent != p.extent
            });
            if !covered {
                edges.push((parent, child));
            }
        }
    }
    edges.sort_unstable();
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::test_support::c3;
    use crate::context::FormalContext;
    use proptest::prelude::*;

    /// Brute-force oracle: close every attribute subset by direct row scans
    /// over plain bool matrices, no bitset machinery shared with the
    /// implementation.
    fn brute_force_concepts(ctx: &FormalContext) -> Vec<(Vec<usize>, Vec<usize>)> {
        let g = ctx.object_count();
        let m = ctx.attribute_count();
        let incidence: Vec<Vec<bool>> = (0..g)
            .map(|i| (0..m).map(|j| ctx.row(i).contains(j)).collect())
            .collect();
        let derive_objs = |attrs: &[usize]| -> Vec<usize> {
            (0..g)
                .filter(|&i| attrs.iter().all(|&j| incidence[i][j]))
                .collect()
        };
        let derive_attrs = |objs: &[usize]| -> Vec<usize> {
            (0..m)
                .filter(|&j| objs.iter().all(|&i| incidence[i][j]))
                .collect()
        };
        let mut seen = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << m) {
            let attrs: Vec<usize> = (0..m).filter(|j| mask & (1 << j) != 0).collect();
            let ext = derive_objs(&attrs);
            let closed = derive_attrs(&ext);
            seen.insert((derive_objs(&closed), closed));
        }
        seen.into_iter().collect()
    }

    fn as_pairs(concepts: &[FormalConcept]) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut v: Vec<_> = concepts
            .iter()
            .map(|c| (c.extent.indices(), c.intent.indices()))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn c3_has_four_concepts() {
        let ctx = c3();
        let concepts = enumerate_concepts(&ctx).unwrap();
        let got: Vec<(Vec<usize>, Vec<usize>)> = concepts
            .iter()
            .map(|c| (c.extent.indices(), c.intent.indices()))
            .collect();
        assert_eq!(
            got,
            vec![
                (vec![0, 1, 2], vec![0]),
                (vec![0, 2], vec![0, 1]),
                (vec![1, 2], vec![0, 2]),
                (vec![2], vec![0, 1, 2]),
            ]
        );
        for c in &concepts {
            assert!(ctx.is_concept(&c.extent, &c.intent).unwrap());
        }
    }

    #[test]
    fn all_ones_single_concept() {
        let ctx = FormalContext::from_index_rows(
            vec!["g1".into(), "g2".into()],
            vec!["a".into(), "b".into()],
            vec![vec![0, 1], vec![0, 1]],
        )
        .unwrap();
        let concepts = enumerate_concepts(&ctx).unwrap();
        assert_eq!(concepts.len(), 1);
        assert_eq!(concepts[0].extent.len(), 2);
        assert_eq!(concepts[0].intent.len(), 2);
    }

    #[test]
    fn identity_context_five_concepts_six_edges() {
        let ctx = FormalContext::from_index_rows(
            vec!["g1".into(), "g2".into(), "g3".into()],
            vec!["a1".into(), "a2".into(), "a3".into()],
            vec![vec![0], vec![1], vec![2]],
        )
        .unwrap();
        let concepts = enumerate_concepts(&ctx).unwrap();
        assert_eq!(concepts.len(), 5);
        assert_eq!(concepts[0].intent.len(), 0); // top: empty intent
        assert_eq!(concepts[4].extent.len(), 0); // bottom: empty extent
        let edges = covering_edges(&concepts).unwrap();
        assert_eq!(edges.len(), 6);
    }

    #[test]
    fn c3_covering_edges() {
        let concepts = enumerate_concepts(&c3()).unwrap();
        let edges = covering_edges(&concepts).unwrap();
        // canonical order: 0={a}, 1={a,b}, 2={a,c}, 3={a,b,c}
        assert_eq!(edges, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn covering_edges_rejects_gappy_input() {
        // identity context minus its bottom: atom extents {0} and {1} meet
        // in the missing empty extent
        let ctx = FormalContext::from_index_rows(
            vec!["g1".into(), "g2".into(), "g3".into()],
            vec!["a1".into(), "a2".into(), "a3".into()],
            vec![vec![0], vec![1], vec![2]],
        )
        .unwrap();
        let mut concepts = enumerate_concepts(&ctx).unwrap();
        concepts.pop();
        assert!(matches!(
            covering_edges(&concepts),
            Err(ConceptError::IncompleteConceptSet { .. })
        ));
        // duplicate intents are rejected too
        let dup = vec![concepts[0].clone(), concepts[0].clone()];
        assert!(matches!(
            covering_edges(&dup),
            Err(ConceptError::IncompleteConceptSet { .. })
        ));
    }

    #[test]
    fn iceberg_filter_c3() {
        let ctx = c3();
        let concepts = enumerate_concepts(&ctx).unwrap();
        let kept = iceberg_filter(&concepts, &IcebergParams::new(0.5, 2));
        assert_eq!(kept.len(), 2);
        assert_eq!(kept[0].intent.indices(), vec![0, 1]);
        assert_eq!(kept[1].intent.indices(), vec![0, 2]);
        assert_eq!(iceberg_filter(&concepts, &IcebergParams::new(0.0, 0)).len(), 4);
        let kept = iceberg_filter(&concepts, &IcebergParams::new(1.0, 1));
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].extent.len(), 3);
    }

    #[test]
    fn grid_c3() {
        let ctx = c3();
        let rows = concept_count_grid(&ctx, &[0.5, 1.0], &[0, 2]).unwrap();
        let got: Vec<(f64, usize, usize, usize)> = rows
            .iter()
            .map(|r| (r.min_support, r.min_intent_size, r.raw_count, r.filtered_count))
            .collect();
        assert_eq!(
            got,
            vec![
                (0.5, 0, 4, 3),
                (0.5, 2, 4, 2),
                (1.0, 0, 4, 1),
                (1.0, 2, 4, 0),
            ]
        );
    }

    #[test]
    fn grid_noop_thresholds() {
        let rows = concept_count_grid(&c3(), &[0.0], &[0]).unwrap();
        assert_eq!(rows[0].filtered_count, rows[0].raw_count);
        assert!(matches!(
            concept_count_grid(&c3(), &[], &[0]),
            Err(ConceptError::EmptyGrid)
        ));
    }

    #[test]
    fn concept_cap_trips() {
        // Contranominal 8x8 scale (complement of identity) has 2^8 concepts.
        let ctx = FormalContext::from_index_rows(
            (0..8).map(|i| format!("g{i}")).collect(),
            (0..8).map(|j| format!("m{j}")).collect(),
            (0..8).map(|i| (0..8).filter(|&j| j != i).collect()).collect(),
        )
        .unwrap();
        assert_eq!(enumerate_concepts(&ctx).unwrap().len(), 256);
        assert!(matches!(
            enumerate_concepts_capped(&ctx, 100),
            Err(ConceptError::ResourceLimit { cap: 100 })
        ));
    }

    prop_compose! {
        fn arb_context()(g in 1usize..=10, m in 1usize..=12)
            (g in Just(g), m in Just(m),
             bits in proptest::collection::vec(proptest::bool::ANY, g * m))
            -> FormalContext
        {
            let rows: Vec<Vec<usize>> = (0..g)
                .map(|i| (0..m).filter(|j| bits[i * m + j]).collect())
                .collect();
            FormalContext::from_index_rows(
                (0..g).map(|i| format!("g{i}")).collect(),
                (0..m).map(|j| format!("m{j}")).collect(),
                rows,
            )
            .unwrap()
        }
    }

    prop_compose! {
        fn arb_small_context()(g in 1usize..=6, m in 1usize..=6)
            (g in Just(g), m in Just(m),
             bits in proptest::collection::vec(proptest::bool::ANY, g * m))
            -> FormalContext
        {
            let rows: Vec<Vec<usize>> = (0..g)
                .map(|i| (0..m).filter(|j| bits[i * m + j]).collect())
                .collect();
            FormalContext::from_index_rows(
                (0..g).map(|i| format!("g{i}")).collect(),
                (0..m).map(|j| format!("m{j}")).collect(),
                rows,
            )
            .unwrap()
        }
    }

    proptest! {
        #[test]
        fn matches_brute_force(ctx in arb_context()) {
            let concepts = enumerate_concepts(&ctx).unwrap();
            prop_assert_eq!(as_pairs(&concepts), brute_force_concepts(&ctx));
        }

        #[test]
        fn no_duplicate_intents_or_extents(ctx in arb_context()) {
            let concepts = enumerate_concepts(&ctx).unwrap();
            let intents: std::collections::HashSet<_> =
                concepts.iter().map(|c| c.intent.indices()).collect();
            let extents: std::collections::HashSet<_> =
                concepts.iter().map(|c| c.extent.indices()).collect();
            prop_assert_eq!(intents.len(), concepts.len());
            prop_assert_eq!(extents.len(), concepts.len());
        }

        #[test]
        fn filter_monotone(ctx in arb_context(), s1 in 0.0f64..=1.0, s2 in 0.0f64..=1.0, k1 in 0usize..6, k2 in 0usize..6) {
            let (s_lo, s_hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
            let (k_lo, k_hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
            let concepts = enumerate_concepts(&ctx).unwrap();
            let loose = iceberg_filter(&concepts, &IcebergParams::new(s_lo, k_lo)).len();
            let tight_s = iceberg_filter(&concepts, &IcebergParams::new(s_hi, k_lo)).len();
            let tight_k = iceberg_filter(&concepts, &IcebergParams::new(s_lo, k_hi)).len();
            prop_assert!(tight_s <= loose);
            prop_assert!(tight_k <= loose);
        }

        #[test]
        fn covering_edges_transitive_closure_is_extent_inclusion(ctx in arb_small_context()) {
            let concepts = enumerate_concepts(&ctx).unwrap();
            let edges = covering_edges(&concepts).unwrap();
            let n = concepts.len();
            // reachability over Hasse edges
            let mut reach = vec![vec![false; n]; n];
            for &(p, c) in &edges {
                reach[p][c] = true;
            }
            for k in 0..n {
                let row_k = reach[k].clone();
                for row in reach.iter_mut() {
                    if row[k] {
                        for (j, &through) in row_k.iter().enumerate() {
                            if through {
                                row[j] = true;
                            }
                        }
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let strict_sub = i != j && concepts[j].extent.is_subset(&concepts[i].extent)
                        && concepts[j].extent != concepts[i].extent;
                    prop_assert_eq!(reach[i][j], strict_sub);
                }
            }
        }
    }
}
