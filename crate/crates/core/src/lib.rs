//! Two-layer structural diagnostics for multi-signal binary data.
//!
//! Layer 1 builds binary formal contexts (weekly-aggregated discourse
//! signals), enumerates every formal concept exactly, and prunes them with
//! iceberg thresholds (minimum extent support, minimum intent size).
//! Layer 2 mines association rules at the individual-record level and
//! compares rule grammars across two conditions: marginal prevalence,
//! shared/condition-only concept intents, premise clusters, and topic-level
//! sentiment/trait profiles.
//!
//! The point of the pairing: two datasets can have near-identical attribute
//! frequencies yet entirely different closed-set and rule structure. The
//! [`synth`] module generates matched-marginal context pairs that
//! demonstrate exactly that, and the `examples/` directory walks through
//! every capability end to end.
//!
//! Start with [`context::FormalContext`], or run
//! `cargo run --example galois_basics`.

pub mod bits;
pub mod concepts;
pub mod context;
pub mod diagnostic;
pub mod ingest;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod rules;
pub mod synth;

pub use concepts::{enumerate_concepts, iceberg_filter, FormalConcept, IcebergParams};
pub use context::{AttrSet, AttributeId, FormalContext, ObjSet, ObjectId};
pub use ingest::{CommentRecord, Condition, Sentiment, Topic};
pub use rules::{mine_rules, AssociationRule, RuleThresholds};
