//! Ordinal bookkeeping at finite scale: the aleph of a signature, order
//! types, the Cantor pairing with its tuple coding, and the canonical
//! surjections from powers of the aleph onto the rank sets of a class.

use qw::{
    aleph, cantor_pair, cantor_unpair, f_surjection, omega_tuple_code, omega_tuple_decode, Caps,
    FiniteOrdinalSet, Polynomial, RuleSet, StageFamily, TermStore,
};

fn main() -> qw::Result<()> {
    let poly = Polynomial::new([("leaf", 0), ("node", 2)])?;
    let node = poly.lookup("node").unwrap();
    let kappa = aleph(&poly);
    println!("aleph of {poly}: {kappa} (least size no arity surjects onto)");

    let set = FiniteOrdinalSet::new([9, 2, 5]);
    let (beta, theta) = set.order_type();
    println!("order type of {{2,5,9}}: {beta}, isomorphism {theta:?}");

    println!("cantor_pair(3, 5) = {}", cantor_pair(3, 5));
    println!(
        "cantor_unpair({}) = {:?}",
        cantor_pair(3, 5),
        cantor_unpair(cantor_pair(3, 5))
    );
    let code = omega_tuple_code(&[1, 2, 3]);
    println!(
        "tuple [1,2,3] codes to {code}, decodes to {:?}",
        omega_tuple_decode(code)
    );

    // F_{x,n} : kappa^n -> R_n(x) ∪ {0}, built from order types of rank
    // sets; its image is exactly R_n(x) plus the padding zero.
    let mut store = TermStore::new(poly.clone());
    let mut stages = StageFamily::build(poly, RuleSet::symmetric([node]), 4, Caps::default())?;
    let t = store.parse("(node (leaf) (node (leaf) (leaf)))")?;
    let x = stages.canonicalize(&store, t)?;
    println!(
        "\nclass {x} = [{}], rank {}",
        store.render(t),
        stages.rank(x)
    );
    for n in 1..=3 {
        let table = f_surjection(&stages, x, n)?;
        println!(
            "  F_(x,{n}) over kappa^{n}: image {:?}, R_{n}(x) = {:?}",
            table.image(),
            stages.r_n(x, n)
        );
    }
    println!(
        "\nCSV of F_(x,1):\n{}",
        f_surjection(&stages, x, 1)?.to_csv()
    );
    Ok(())
}
