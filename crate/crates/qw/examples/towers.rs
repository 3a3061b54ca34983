//! Towers witness every finite rank: t_0 is a leaf and t_{β+1} applies the
//! branching constructor to copies of t_β. Mapping ordered terms into the
//! unordered quotient preserves rank and, at finite depth, reaches every
//! class.

use std::collections::BTreeSet;

use qw::{ordered_to_unordered, Caps, ClassId, Polynomial, RuleSet, StageFamily, TermStore};

fn main() -> qw::Result<()> {
    let poly = Polynomial::new([("leaf", 0), ("node", 2)])?;
    let node = poly.lookup("node").unwrap();
    let mut store = TermStore::new(poly.clone());

    // Interning keeps the tower linear in β even though the tree doubles.
    for beta in [0, 1, 2, 5, 8] {
        let t = store.tower(node, beta)?;
        println!(
            "tower({beta}): rank {}, store holds {} nodes",
            store.rank(t),
            store.len()
        );
    }

    let mut unordered =
        StageFamily::build(poly.clone(), RuleSet::symmetric([node]), 5, Caps::default())?;
    let t3 = store.tower(node, 3)?;
    let report = ordered_to_unordered(&mut unordered, &store, t3)?;
    println!(
        "\ntower(3) maps to class {} with rank {} (term rank {})",
        report.class, report.class_rank, report.term_rank
    );

    // Every ordered term of rank <= 4 lands on a class of the same rank,
    // and together they cover all unordered classes of rank <= 4.
    let mut free_store = TermStore::new(poly.clone());
    let terms = free_store.enumerate(4, 100_000)?;
    let mut reached: BTreeSet<ClassId> = BTreeSet::new();
    for &t in &terms {
        let report = ordered_to_unordered(&mut unordered, &free_store, t)?;
        assert!(report.rank_preserved());
        reached.insert(report.class);
    }
    println!(
        "{} ordered terms of rank <= 4 cover {} of {} unordered classes, rank preserved",
        terms.len(),
        reached.len(),
        unordered.classes_of_rank_le(4).len()
    );
    Ok(())
}
