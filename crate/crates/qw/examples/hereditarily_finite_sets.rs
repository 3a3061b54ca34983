//! With the family of all image-preserving equations, the quotient of the
//! term algebra is exactly the universe of hereditarily finite sets small
//! relative to the arities: here, sets of at most two elements all the way
//! down.

use qw::{
    approx_fold, canon_extensional, ApproxValue, Caps, HfStore, Polynomial, RuleSet, StageFamily,
    TermStore,
};

fn main() -> qw::Result<()> {
    let poly = Polynomial::new([("empty", 0), ("pair", 2)])?;
    let rules = RuleSet::all_image_preserving();

    let mut hf = HfStore::new();
    println!("hereditarily small sets by rank:");
    for max_rank in 0..=3 {
        let values = hf.enumerate(&poly, max_rank, 10_000)?;
        let rendered: Vec<String> = values.iter().map(|&v| hf.render(v)).collect();
        println!(
            "  rank <= {max_rank}: {} values: {}",
            values.len(),
            rendered.join("  ")
        );
    }

    // Terms denote sets: duplicates collapse, order is irrelevant.
    let mut store = TermStore::new(poly.clone());
    let mut stages = StageFamily::build(poly.clone(), rules, 4, Caps::default())?;
    println!(
        "\nstage sizes: {:?} (same growth as the enumeration)",
        stages.stage_sizes()
    );

    for text in [
        "(pair (empty) (empty))",
        "(pair (empty) (pair (empty) (empty)))",
        "(pair (pair (empty) (empty)) (empty))",
    ] {
        let t = store.parse(text)?;
        let v = canon_extensional(&store, &mut hf, t);
        let class = stages.canonicalize(&store, t)?;
        println!("{text}  denotes  {}  (class {class})", hf.render(v));
    }

    // The rank-bounded approximation of the set-valued fold: defined below
    // the bound, overflow above, and raising the bound never rewrites a
    // defined value.
    println!("\napproximation at successive rank bounds:");
    for bound in [0, 2, 4] {
        let values = approx_fold(&stages, &mut hf, bound);
        let line: Vec<String> = stages
            .class_ids()
            .map(|x| match values[x.index()] {
                ApproxValue::Defined(v) => format!("{x}:{}", hf.render(v)),
                ApproxValue::Overflow => format!("{x}:^"),
            })
            .collect();
        println!("  bound {bound}: {}", line.join(" "));
    }
    Ok(())
}
