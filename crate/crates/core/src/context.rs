//! Binary formal contexts and the derivation/closure operators.
//!
//! A context is a triple (G, M, I): objects, attributes, and a boolean
//! incidence relation stored as packed bit rows (one `AttrSet` per object)
//! plus precomputed columns (one `ObjSet` per attribute). Contexts are
//! immutable after construction, so they can be shared freely across
//! threads; every operation here is a pure read.

use crate::bits::BitSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContextError {
    #[error("{set} width {got} does not match context ({expected})")]
    WidthMismatch { set: &'static str, expected: usize, got: usize },
    #[error("context needs at least one object and one attribute")]
    EmptyDimension,
    #[error("duplicate attribute name: {0}")]
    DuplicateAttribute(String),
    #[error("duplicate object label: {0}")]
    DuplicateObject(String),
    #[error("incidence row {row} has width {got}, expected {expected}")]
    RowWidth { row: usize, expected: usize, got: usize },
}

/// An attribute of a context: dense index plus display name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeId {
    index: usize,
    name: String,
}

impl AttributeId {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// An object of a context: dense index plus label (week key or comment id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectId {
    index: usize,
    label: String,
}

impl ObjectId {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

macro_rules! index_set {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Clone, PartialEq, Eq, Hash)]
        pub struct $name(pub(crate) BitSet);

        impl $name {
            pub fn empty(width: usize) -> Self {
                Self(BitSet::empty(width))
            }

            pub fn full(width: usize) -> Self {
                Self(BitSet::full(width))
            }

            pub fn from_indices(width: usize, indices: impl IntoIterator<Item = usize>) -> Self {
                Self(BitSet::from_indices(width, indices))
            }

            pub fn width(&self) -> usize {
                self.0.width()
            }

            /// Cardinality of the set.
            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn insert(&mut self, i: usize) {
                self.0.insert(i)
            }

            pub fn contains(&self, i: usize) -> bool {
                self.0.contains(i)
            }

            pub fn is_subset(&self, other: &Self) -> bool {
                self.0.is_subset(&other.0)
            }

            pub fn intersects(&self, other: &Self) -> bool {
                self.0.intersects(&other.0)
            }

            pub fn intersection(&self, other: &Self) -> Self {
                Self(self.0.intersection(&other.0))
            }

            pub fn union(&self, other: &Self) -> Self {
                Self(self.0.union(&other.0))
            }

            pub fn complement(&self) -> Self {
                Self(self.0.complement())
            }

            pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
                self.0.iter()
            }

            pub fn indices(&self) -> Vec<usize> {
                self.0.indices()
            }
        }

        impl std::fmt::Debug for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, "{}{:?}", stringify!($name), self.0.indices())
            }
        }
    };
}

index_set!(AttrSet, "A set of attribute indices, fixed to a context's attribute width.");
index_set!(ObjSet, "A set of object indices, fixed to a context's object width.");

/// A binary formal context over dense object/attribute indices.
pub struct FormalContext {
    objects: Vec<ObjectId>,
    attributes: Vec<AttributeId>,
    rows: Vec<AttrSet>,
    columns: Vec<ObjSet>,
}

impl FormalContext {
    /// Builds a context from labels, names, and one incidence row per object.
    ///
    /// Rows must all have width `attribute_names.len()`; labels and names
    /// must be unique; both dimensions must be non-empty.
    pub fn new(
        object_labels: Vec<String>,
        attribute_names: Vec<String>,
        rows: Vec<AttrSet>,
    ) -> Result<Self, ContextError> {
        if object_labels.is_empty() || attribute_names.is_empty() {
            return Err(ContextError::EmptyDimension);
        }
        let m = attribute_names.len();
        let g = object_labels.len();
        if rows.len() != g {
            return Err(ContextError::RowWidth { row: rows.len(), expected: g, got: rows.len() });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.width() != m {
                return Err(ContextError::RowWidth { row: i, expected: m, got: row.width() });
            }
        }
        let mut seen = std::collections::HashSet::new();
        for n in &attribute_names {
            if !seen.insert(n.as_str()) {
                return Err(ContextError::DuplicateAttribute(n.clone()));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for l in &object_labels {
            if !seen.insert(l.as_str()) {
                return Err(ContextError::DuplicateObject(l.clone()));
            }
        }

        let mut columns = vec![ObjSet::empty(g); m];
        for (i, row) in rows.iter().enumerate() {
            for j in row.iter() {
                columns[j].insert(i);
            }
        }
        Ok(FormalContext {
            objects: object_labels
                .into_iter()
                .enumerate()
                .map(|(index, label)| ObjectId { index, label })
                .collect(),
            attributes: attribute_names
                .into_iter()
                .enumerate()
                .map(|(index, name)| AttributeId { index, name })
                .collect(),
            rows,
            columns,
        })
    }

    /// Convenience constructor from per-object attribute index lists.
    pub fn from_index_rows(
        object_labels: Vec<String>,
        attribute_names: Vec<String>,
        index_rows: Vec<Vec<usize>>,
    ) -> Result<Self, ContextError> {
        let m = attribute_names.len();
        let rows = index_rows
            .into_iter()
            .map(|idx| AttrSet::from_indices(m, idx))
            .collect();
        Self::new(object_labels, attribute_names, rows)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn objects(&self) -> &[ObjectId] {
        &self.objects
    }

    pub fn attributes(&self) -> &[AttributeId] {
        &self.attributes
    }

    pub fn attribute_names(&self) -> Vec<String> {
        self.attributes.iter().map(|a| a.name.clone()).collect()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// The incidence row of object `i`.
    pub fn row(&self, i: usize) -> &AttrSet {
        &self.rows[i]
    }

    /// The incidence column of attribute `j`: all objects carrying it.
    pub fn column(&self, j: usize) -> &ObjSet {
        &self.columns[j]
    }

    /// True when both contexts have the same attribute names in the same order.
    pub fn same_vocabulary(&self, other: &FormalContext) -> bool {
        self.attributes.len() == other.attributes.len()
            && self
                .attributes
                .iter()
                .zip(&other.attributes)
                .all(|(a, b)| a.name == b.name)
    }

    fn check_attrs(&self, attrs: &AttrSet) -> Result<(), ContextError> {
        if attrs.width() != self.attribute_count() {
            return Err(ContextError::WidthMismatch {
                set: "attribute set",
                expected: self.attribute_count(),
                got: attrs.width(),
            });
        }
        Ok(())
    }

    fn check_objs(&self, objs: &ObjSet) -> Result<(), ContextError> {
        if objs.width() != self.object_count() {
            return Err(ContextError::WidthMismatch {
                set: "object set",
                expected: self.object_count(),
                got: objs.width(),
            });
        }
        Ok(())
    }

    /// Attributes shared by every object in `objs`.
    ///
    /// The empty object set derives to the full attribute set.
    pub fn derive_attrs(&self, objs: &ObjSet) -> Result<AttrSet, ContextError> {
        self.check_objs(objs)?;
        let mut out = BitSet::full(self.attribute_count());
        for i in objs.iter() {
            out.intersect_with(&self.rows[i].0);
        }
        Ok(AttrSet(out))
    }

    /// Objects carrying every attribute in `attrs`.
    ///
    /// The empty attribute set derives to the full object set.
    pub fn derive_objects(&self, attrs: &AttrSet) -> Result<ObjSet, ContextError> {
        self.check_attrs(attrs)?;
        let mut out = BitSet::full(self.object_count());
        for j in attrs.iter() {
            out.intersect_with(&self.columns[j].0);
        }
        Ok(ObjSet(out))
    }

    /// The closure `attrs''`: a superset of `attrs` and a fixpoint.
    pub fn closure_attrs(&self, attrs: &AttrSet) -> Result<AttrSet, ContextError> {
        let extent = self.derive_objects(attrs)?;
        self.derive_attrs(&extent)
    }

    /// True iff (`extent`, `intent`) is a formal concept: each derives to the other.
    pub fn is_concept(&self, extent: &ObjSet, intent: &AttrSet) -> Result<bool, ContextError> {
        self.check_objs(extent)?;
        self.check_attrs(intent)?;
        Ok(&self.derive_attrs(extent)? == intent && &self.derive_objects(intent)? == extent)
    }
}

impl std::fmt::Debug for FormalContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "FormalContext({} objects x {} attributes)",
            self.object_count(),
            self.attribute_count()
        )
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Three objects over {a, b, c}: g1 {a,b}, g2 {a,c}, g3 {a,b,c}.
    pub fn c3() -> FormalContext {
        FormalContext::from_index_rows(
            vec!["g1".into(), "g2".into(), "g3".into()],
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1], vec![0, 2], vec![0, 1, 2]],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::c3;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn derive_attrs_c3() {
        let ctx = c3();
        let got = ctx.derive_attrs(&ObjSet::from_indices(3, [0, 2])).unwrap();
        assert_eq!(got.indices(), vec![0, 1]); // {a,b}
        let got = ctx.derive_attrs(&ObjSet::empty(3)).unwrap();
        assert_eq!(got.indices(), vec![0, 1, 2]); // full set
        let got = ctx.derive_attrs(&ObjSet::full(3)).unwrap();
        assert_eq!(got.indices(), vec![0]); // {a}
    }

    #[test]
    fn derive_objects_c3() {
        let ctx = c3();
        let got = ctx.derive_objects(&AttrSet::from_indices(3, [1])).unwrap();
        assert_eq!(got.indices(), vec![0, 2]); // {g1,g3}
        let got = ctx.derive_objects(&AttrSet::empty(3)).unwrap();
        assert_eq!(got.indices(), vec![0, 1, 2]);
        let got = ctx.derive_objects(&AttrSet::from_indices(3, [1, 2])).unwrap();
        assert_eq!(got.indices(), vec![2]); // {g3}
    }

    #[test]
    fn closure_c3() {
        let ctx = c3();
        let got = ctx.closure_attrs(&AttrSet::from_indices(3, [1])).unwrap();
        assert_eq!(got.indices(), vec![0, 1]); // {b} -> {a,b}
        let closed = AttrSet::from_indices(3, [0, 1]);
        assert_eq!(ctx.closure_attrs(&closed).unwrap(), closed);
        let got = ctx.closure_attrs(&AttrSet::empty(3)).unwrap();
        assert_eq!(got.indices(), vec![0]); // {a} is common to all objects
    }

    #[test]
    fn is_concept_c3() {
        let ctx = c3();
        let ext = ObjSet::from_indices(3, [0, 2]);
        assert!(ctx.is_concept(&ext, &AttrSet::from_indices(3, [0, 1])).unwrap());
        assert!(!ctx.is_concept(&ext, &AttrSet::from_indices(3, [1])).unwrap());
        assert!(ctx
            .is_concept(&ObjSet::full(3), &AttrSet::from_indices(3, [0]))
            .unwrap());
    }

    #[test]
    fn width_mismatch_errors() {
        let ctx = c3();
        let err = ctx.derive_attrs(&ObjSet::empty(4)).unwrap_err();
        assert!(matches!(err, ContextError::WidthMismatch { .. }));
        let err = ctx.derive_objects(&AttrSet::empty(2)).unwrap_err();
        assert!(matches!(err, ContextError::WidthMismatch { .. }));
    }

    #[test]
    fn construction_validation() {
        assert_eq!(
            FormalContext::from_index_rows(vec![], vec!["a".into()], vec![]).unwrap_err(),
            ContextError::EmptyDimension
        );
        assert!(matches!(
            FormalContext::from_index_rows(
                vec!["g".into(), "g".into()],
                vec!["a".into()],
                vec![vec![], vec![0]],
            )
            .unwrap_err(),
            ContextError::DuplicateObject(_)
        ));
        assert!(matches!(
            FormalContext::from_index_rows(
                vec!["g".into()],
                vec!["a".into(), "a".into()],
                vec![vec![0]],
            )
            .unwrap_err(),
            ContextError::DuplicateAttribute(_)
        ));
    }

    prop_compose! {
        fn arb_context()(g in 1usize..=12, m in 1usize..=10)
            (g in Just(g), m in Just(m),
             bits in proptest::collection::vec(proptest::bool::ANY, g * m))
            -> FormalContext
        {
            let rows = (0..g)
                .map(|i| AttrSet::from_indices(m, (0..m).filter(|j| bits[i * m + j])))
                .collect();
            FormalContext::new(
                (0..g).map(|i| format!("g{i}")).collect(),
                (0..m).map(|j| format!("m{j}")).collect(),
                rows,
            )
            .unwrap()
        }
    }

    proptest! {
        #[test]
        fn closure_laws(ctx in arb_context(), raw in proptest::collection::vec(proptest::bool::ANY, 10), raw2 in proptest::collection::vec(proptest::bool::ANY, 10)) {
            let m = ctx.attribute_count();
            let x = AttrSet::from_indices(m, (0..m).filter(|&j| raw[j]));
            let y_sup = x.union(&AttrSet::from_indices(m, (0..m).filter(|&j| raw2[j])));

            // extensive
            let cx = ctx.closure_attrs(&x).unwrap();
            prop_assert!(x.is_subset(&cx));
            // idempotent
            prop_assert_eq!(ctx.closure_attrs(&cx).unwrap(), cx.clone());
            // monotone on X ⊆ Y
            let cy = ctx.closure_attrs(&y_sup).unwrap();
            prop_assert!(cx.is_subset(&cy));
            // Galois antitone: X ⊆ Y implies Y' ⊆ X'
            prop_assert!(ctx.derive_objects(&y_sup).unwrap().is_subset(&ctx.derive_objects(&x).unwrap()));
            // triple application collapses
            let ext = ctx.derive_objects(&x).unwrap();
            let back = ctx.derive_objects(&ctx.derive_attrs(&ext).unwrap()).unwrap();
            prop_assert_eq!(back, ext);
        }
    }
}
