//! Unordered binary trees: a symmetric constructor makes child order
//! irrelevant, and the staged quotient decides equality.

use qw::{Caps, Polynomial, RuleSet, StageFamily, TermStore};

fn main() -> qw::Result<()> {
    let poly = Polynomial::new([("leaf", 0), ("node", 2)])?;
    let node = poly.lookup("node").unwrap();
    let rules = RuleSet::symmetric([node]);

    let mut store = TermStore::new(poly.clone());
    let mut stages = StageFamily::build(poly.clone(), rules.clone(), 4, Caps::default())?;
    println!("stage sizes up to depth 4: {:?}", stages.stage_sizes());

    let ab = store.parse("(node (leaf) (node (leaf) (leaf)))")?;
    let ba = store.parse("(node (node (leaf) (leaf)) (leaf))")?;
    println!(
        "{}  ==  {}  ?  {}",
        store.render(ab),
        store.render(ba),
        stages.decide_eq(&store, ab, ba)?
    );

    let distinct = store.parse("(node (node (leaf) (leaf)) (node (leaf) (leaf)))")?;
    println!(
        "{}  ==  {}  ?  {}",
        store.render(ab),
        store.render(distinct),
        stages.decide_eq(&store, ab, distinct)?
    );

    // The fast path: sorting children of symmetric constructors is a
    // complete canonical form.
    let sym = rules.sym_ctors();
    let canon = qw::canon_multiset(&store, &sym, ba);
    println!(
        "canonical form of the swapped tree: {}",
        canon.render(&poly)
    );

    // Classes carry stable ids, image sets and ranks.
    let class = stages.canonicalize(&store, ab)?;
    let image: Vec<String> = stages.image(class).iter().map(|c| c.to_string()).collect();
    println!(
        "class {} has rank {} and image {{{}}}",
        class,
        stages.rank(class),
        image.join(", ")
    );
    Ok(())
}
