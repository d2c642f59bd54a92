//! Formal contexts and the derivation/closure operators.
//!
//! Builds a tiny three-object context, walks through both derivation
//! directions, closures, and the full concept lattice.
//!
//! Run with:
//! ```bash
//! cargo run --example galois_basics
//! ```

use discourse_fca::concepts::{covering_edges, enumerate_concepts};
use discourse_fca::context::{AttrSet, FormalContext, ObjSet};

fn main() {
    // g1 likes {a,b}, g2 likes {a,c}, g3 likes {a,b,c}
    let ctx = FormalContext::from_index_rows(
        vec!["g1".into(), "g2".into(), "g3".into()],
        vec!["a".into(), "b".into(), "c".into()],
        vec![vec![0, 1], vec![0, 2], vec![0, 1, 2]],
    )
    .unwrap();
    println!("context: {} objects x {} attributes", ctx.object_count(), ctx.attribute_count());

    let names = ctx.attribute_names();
    let show_attrs = |s: &AttrSet| -> String {
        let v: Vec<&str> = s.iter().map(|j| names[j].as_str()).collect();
        format!("{{{}}}", v.join(","))
    };
    let show_objs = |s: &ObjSet| -> String {
        let v: Vec<&str> = s.iter().map(|i| ctx.objects()[i].label()).collect();
        format!("{{{}}}", v.join(","))
    };

    // objects -> shared attributes
    let some_objects = ObjSet::from_indices(3, [0, 2]);
    let shared = ctx.derive_attrs(&some_objects).unwrap();
    println!("attributes shared by {}: {}", show_objs(&some_objects), show_attrs(&shared));

    // attributes -> covering objects
    let b = AttrSet::from_indices(3, [1]);
    let cover = ctx.derive_objects(&b).unwrap();
    println!("objects with {}: {}", show_attrs(&b), show_objs(&cover));

    // closure: the smallest concept intent containing {b}
    let closed = ctx.closure_attrs(&b).unwrap();
    println!("closure of {} = {}", show_attrs(&b), show_attrs(&closed));
    assert!(ctx.is_concept(&cover, &closed).unwrap());

    // the whole lattice
    let concepts = enumerate_concepts(&ctx).unwrap();
    println!("\nall {} formal concepts (extent, intent, support):", concepts.len());
    for c in &concepts {
        println!(
            "  {} {} support {:.3}",
            show_objs(&c.extent),
            show_attrs(&c.intent),
            c.support
        );
    }

    let edges = covering_edges(&concepts).unwrap();
    println!("\nlattice covering edges (parent > child):");
    for (p, c) in edges {
        println!(
            "  {} > {}",
            show_attrs(&concepts[p].intent),
            show_attrs(&concepts[c].intent)
        );
    }
}
