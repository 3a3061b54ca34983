//! The saturation engine and the canonical-form fast paths must induce the
//! same partition on every term; `crosscheck` compares them exhaustively
//! up to a rank bound.

use qw::{crosscheck, Caps, Polynomial, RuleSet};

fn main() -> qw::Result<()> {
    let unordered = Polynomial::new([("leaf", 0), ("node", 2)])?;
    let node = unordered.lookup("node").unwrap();
    let sets = Polynomial::new([("empty", 0), ("pair", 2)])?;

    for (name, poly, rules, depth) in [
        (
            "unordered trees ",
            unordered.clone(),
            RuleSet::symmetric([node]),
            4,
        ),
        ("extensional sets", sets, RuleSet::all_image_preserving(), 4),
        ("free trees      ", unordered, RuleSet::free(), 3),
    ] {
        let report = crosscheck(&poly, &rules, depth, Caps::default())?;
        println!(
            "{name}: agree = {}, classes by rank {:?} over {} terms",
            report.agree, report.counts, report.terms_checked
        );
        assert!(report.agree);
    }
    Ok(())
}
