//! Canonical-form engines for the two flagship rule families, plus a
//! cross-check harness against the generic saturation engine.
//!
//! Sorting works for symmetric constructors because the orbit of child
//! permutations is exactly the child multiset; extensional reading works
//! for the all-image-preserving family because applications are merged
//! precisely on equal child image sets. Anything else falls back to
//! saturation.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::hered::{HfId, HfStore};
use crate::signature::{CtorId, Polynomial, RuleKind, RuleSet};
use crate::stages::{Caps, StageFamily};
use crate::term::{TermId, TermStore};

/// A term normalized under the canonical total order: rank, then
/// constructor index, then children lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CanonicalTree {
    pub rank: u32,
    pub ctor: CtorId,
    pub children: Vec<CanonicalTree>,
}

impl CanonicalTree {
    pub fn render(&self, poly: &Polynomial) -> String {
        let mut out = String::new();
        self.render_into(poly, &mut out);
        out
    }

    fn render_into(&self, poly: &Polynomial, out: &mut String) {
        out.push('(');
        out.push_str(poly.name(self.ctor));
        for c in &self.children {
            out.push(' ');
            c.render_into(poly, out);
        }
        out.push(')');
    }
}

/// Canonicalizes children recursively, then sorts the child lists of
/// symmetric constructors. Two terms receive the same tree exactly when the
/// symmetric saturation identifies them.
pub fn canon_multiset(store: &TermStore, sym_ctors: &BTreeSet<CtorId>, t: TermId) -> CanonicalTree {
    let mut children: Vec<CanonicalTree> = store
        .children(t)
        .iter()
        .map(|&c| canon_multiset(store, sym_ctors, c))
        .collect();
    let ctor = store.ctor(t);
    if sym_ctors.contains(&ctor) {
        children.sort();
    }
    let rank = if children.is_empty() {
        0
    } else {
        1 + children.iter().map(|c| c.rank).max().unwrap()
    };
    CanonicalTree {
        rank,
        ctor,
        children,
    }
}

/// The hereditarily finite set denoted by a term: children recursively,
/// duplicates collapsed.
pub fn canon_extensional(store: &TermStore, hf: &mut HfStore, t: TermId) -> HfId {
    let children: Vec<HfId> = store
        .children(t)
        .iter()
        .map(|&c| canon_extensional(store, hf, c))
        .collect();
    hf.make(children)
}

/// Outcome of comparing the saturation partition with the canonical-form
/// partition over all terms of rank below `max_stage`.
#[derive(Debug)]
pub struct CrosscheckReport {
    pub agree: bool,
    /// Distinct classes among terms of rank ≤ r, for r = 0..max_stage.
    pub counts: Vec<usize>,
    pub terms_checked: usize,
    /// A witnessing pair of terms on which the partitions disagree.
    pub mismatch: Option<(String, String)>,
}

/// Partitions every term of rank < `max_stage` by both engines and
/// compares. Supported rule sets: free, symmetric-only, or
/// all-image-preserving-only.
pub fn crosscheck(
    poly: &Polynomial,
    rules: &RuleSet,
    max_stage: usize,
    caps: Caps,
) -> Result<CrosscheckReport> {
    let kind = rules.kind();
    if matches!(kind, RuleKind::Mixed) {
        return Err(Error::UnsupportedRuleSet);
    }
    if max_stage == 0 {
        return Ok(CrosscheckReport {
            agree: true,
            counts: Vec::new(),
            terms_checked: 0,
            mismatch: None,
        });
    }
    let mut store = TermStore::new(poly.clone());
    let terms = store.enumerate(max_stage as u32 - 1, caps.max_enumeration)?;
    let mut sf = StageFamily::build(poly.clone(), rules.clone(), max_stage, caps)?;
    let mut hf = HfStore::new();

    let mut by_class: HashMap<crate::stages::ClassId, (String, String)> = HashMap::new();
    let mut by_key: HashMap<String, (crate::stages::ClassId, String)> = HashMap::new();
    let mut seen_classes: BTreeSet<crate::stages::ClassId> = BTreeSet::new();
    let mut counts = vec![0usize; max_stage];
    let mut agree = true;
    let mut mismatch = None;

    for &t in &terms {
        let class = sf.canonicalize(&store, t)?;
        let key = match &kind {
            RuleKind::Free => store.render(t),
            RuleKind::SymmetricOnly(sym) => canon_multiset(&store, sym, t).render(poly),
            RuleKind::AllImagePreservingOnly => {
                let v = canon_extensional(&store, &mut hf, t);
                hf.render(v)
            }
            RuleKind::Mixed => unreachable!(),
        };
        let rendered = store.render(t);
        if let Some((prev_key, prev_term)) = by_class.get(&class) {
            if *prev_key != key && mismatch.is_none() {
                agree = false;
                mismatch = Some((prev_term.clone(), rendered.clone()));
            }
        } else {
            by_class.insert(class, (key.clone(), rendered.clone()));
        }
        if let Some((prev_class, prev_term)) = by_key.get(&key) {
            if *prev_class != class && mismatch.is_none() {
                agree = false;
                mismatch = Some((prev_term.clone(), rendered.clone()));
            }
        } else {
            by_key.insert(key, (class, rendered));
        }
        seen_classes.insert(class);
        counts[store.rank(t) as usize] = seen_classes.len();
    }
    // Bands without new terms inherit the running total.
    for r in 1..counts.len() {
        if counts[r] < counts[r - 1] {
            counts[r] = counts[r - 1];
        }
    }
    Ok(CrosscheckReport {
        agree,
        counts,
        terms_checked: terms.len(),
        mismatch,
    })
}
