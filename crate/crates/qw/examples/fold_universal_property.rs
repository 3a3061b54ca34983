//! The quotient is the initial algebra for its rules: any finite algebra
//! satisfying them receives exactly one homomorphism, computable by rank
//! recursion.

use qw::{
    check_satisfies_rules, count_homomorphisms, fold, is_homomorphism, random_satisfying_algebras,
    Caps, FiniteAlgebra, Polynomial, RuleSet, StageFamily,
};

fn main() -> qw::Result<()> {
    let poly = Polynomial::new([("leaf", 0), ("node", 2)])?;
    let node = poly.lookup("node").unwrap();
    let rules = RuleSet::symmetric([node]);
    let stages = StageFamily::build(poly.clone(), rules.clone(), 4, Caps::default())?;

    // A satisfying algebra needs a commutative node table. "Contains at
    // least one node" is the constant-1 table over carrier {0, 1}.
    let contains_node = FiniteAlgebra::from_json(
        &poly,
        r#"{ "carrier": 2, "ops": { "leaf": 0, "node": [[1,1],[1,1]] } }"#,
    )?;
    assert!(check_satisfies_rules(&poly, &contains_node, &rules, Caps::default())?.is_satisfied());
    let h = fold(&stages, &contains_node)?;
    println!("fold into the contains-a-node algebra: {h:?}");
    println!(
        "is a homomorphism: {}",
        is_homomorphism(&stages, &contains_node, &h)
    );

    // min(max + 1, 2) over carrier {0, 1, 2} folds every class to its
    // rank, capped at 2.
    let capped_rank = FiniteAlgebra::from_json(
        &poly,
        r#"{ "carrier": 3, "ops": { "leaf": 0, "node": [[1,2,2],[2,2,2],[2,2,2]] } }"#,
    )?;
    let h = fold(&stages, &capped_rank)?;
    for x in stages.class_ids() {
        assert_eq!(h[x.index()], (stages.rank(x) as usize).min(2));
    }
    println!("fold of the capped-increment algebra equals min(rank, 2) on every class");

    // First projection is not commutative: the fold detects the first
    // merged pair of applications on which the tables disagree.
    let projection = FiniteAlgebra::from_json(
        &poly,
        r#"{ "carrier": 2, "ops": { "leaf": 0, "node": [[1,1],[0,0]] } }"#,
    )?;
    match fold(&stages, &projection) {
        Err(e) => println!("non-commutative table rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    // Uniqueness, brute-forced: among all functions from the classes of
    // rank <= 2 to the carrier, exactly one satisfies the homomorphism
    // condition -- for any satisfying algebra.
    let sample = random_satisfying_algebras(&poly, &rules, 3, 20, 11, Caps::default())?;
    for alg in &sample {
        assert_eq!(count_homomorphisms(&stages, alg, 2, 1_000_000)?, 1);
    }
    println!(
        "uniqueness verified against {} random satisfying algebras (carrier <= 3)",
        sample.len()
    );
    Ok(())
}
