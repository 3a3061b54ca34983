//! The per-class invariants of the staged quotient: image, rank,
//! transitive closure, the rank sets R_n, and the DOT export of the stage
//! graph.

use std::collections::BTreeSet;

use qw::{Caps, Polynomial, RuleSet, StageFamily, TermStore};

fn main() -> qw::Result<()> {
    let poly = Polynomial::new([("leaf", 0), ("node", 2)])?;
    let node = poly.lookup("node").unwrap();
    let mut store = TermStore::new(poly.clone());
    let mut stages = StageFamily::build(poly, RuleSet::symmetric([node]), 4, Caps::default())?;

    let t = store.parse("(node (leaf) (node (leaf) (leaf)))")?;
    let x = stages.canonicalize(&store, t)?;
    println!("term {}", store.render(t));
    println!("  class        {x}");
    println!("  rank         {}", stages.rank(x));
    println!("  first stage  {}", stages.first_stage(x));
    let fmt_ids = |ids: Vec<qw::ClassId>| {
        let parts: Vec<String> = ids.iter().map(|c| c.to_string()).collect();
        format!("{{{}}}", parts.join(", "))
    };
    println!("  image        {}", fmt_ids(stages.image(x).to_vec()));
    println!(
        "  closure      {}",
        fmt_ids(stages.transitive_closure(x).into_iter().collect())
    );
    for n in 1..=3 {
        println!("  R_{n}          {:?}", stages.r_n(x, n));
    }

    // Two facts that hold for every class: the ranks in the transitive
    // closure fill 0..rank exactly, and their union over all depths is the
    // same set.
    for y in stages.class_ids() {
        let closure_ranks: BTreeSet<u32> = stages
            .transitive_closure(y)
            .into_iter()
            .map(|z| stages.rank(z))
            .collect();
        let expected: BTreeSet<u32> = (0..stages.rank(y)).collect();
        assert_eq!(closure_ranks, expected);
        let mut union: BTreeSet<u32> = BTreeSet::new();
        for n in 1..=stages.depth() {
            union.extend(stages.r_n(y, n));
        }
        assert_eq!(union, expected);
    }
    println!("\nverified: TC ranks and the union of the R_n fill 0..rank for all classes");

    println!("\nstage graph in DOT format:\n{}", stages.to_dot());
    Ok(())
}
