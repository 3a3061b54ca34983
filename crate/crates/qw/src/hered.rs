//! Hereditarily finite sets as first-class extensional values.
//!
//! Values are interned in an [`HfStore`]: elements are stored sorted and
//! duplicate-free, so two handles are equal exactly when the sets are.
//! Relative to a signature, a value is *small* when some constructor arity
//! surjects onto its element set: the empty set needs a nullary
//! constructor, a set of k distinct elements needs an arity of at least k.
//! These values form an algebra for the signature (a constructor
//! application takes the set of its children) and that algebra satisfies
//! every image-preserving equation, which is what the fold here exploits.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::algebra::{FiniteAlgebra, SatCheck, SatViolation};
use crate::error::{Error, Result};
use crate::signature::{tuples, CtorId, Polynomial};
use crate::stages::StageFamily;
use crate::term::{TermId, TermStore};

/// Handle to an interned hereditarily finite set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HfId(pub u32);

impl HfId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

struct HfNode {
    elements: Vec<HfId>, // sorted by the canonical value order, duplicate-free
    rank: u32,
}

/// Interning table for hereditarily finite sets.
pub struct HfStore {
    nodes: Vec<HfNode>,
    memo: HashMap<Vec<HfId>, HfId>,
}

impl Default for HfStore {
    fn default() -> Self {
        Self::new()
    }
}

impl HfStore {
    pub fn new() -> Self {
        HfStore {
            nodes: Vec::new(),
            memo: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn empty(&mut self) -> HfId {
        self.make(vec![])
    }

    /// Interns the set of the given values; duplicates collapse.
    pub fn make(&mut self, mut elements: Vec<HfId>) -> HfId {
        elements.sort_by(|&a, &b| self.cmp_values(a, b));
        elements.dedup();
        if let Some(&id) = self.memo.get(&elements) {
            return id;
        }
        let rank = if elements.is_empty() {
            0
        } else {
            1 + elements.iter().map(|&e| self.rank(e)).max().unwrap()
        };
        let id = HfId(self.nodes.len() as u32);
        self.nodes.push(HfNode {
            elements: elements.clone(),
            rank,
        });
        self.memo.insert(elements, id);
        id
    }

    pub fn elements(&self, x: HfId) -> &[HfId] {
        &self.nodes[x.index()].elements
    }

    /// 0 for the empty set, else one more than the largest element rank.
    pub fn rank(&self, x: HfId) -> u32 {
        self.nodes[x.index()].rank
    }

    /// Canonical total order: rank first, then elements lexicographically.
    pub fn cmp_values(&self, a: HfId, b: HfId) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        self.rank(a).cmp(&self.rank(b)).then_with(|| {
            let (ea, eb) = (self.elements(a), self.elements(b));
            for (&x, &y) in ea.iter().zip(eb.iter()) {
                match self.cmp_values(x, y) {
                    Ordering::Equal => continue,
                    other => return other,
                }
            }
            ea.len().cmp(&eb.len())
        })
    }

    /// The algebra structure: the set of the children of one constructor
    /// application. Smallness relative to `poly` holds by construction.
    pub fn hf_build(&mut self, poly: &Polynomial, ctor: CtorId, children: &[HfId]) -> Result<HfId> {
        let arity = poly.arity(ctor);
        if children.len() != arity {
            return Err(Error::ArityMismatch {
                ctor: poly.name(ctor).to_string(),
                expected: arity,
                got: children.len(),
            });
        }
        Ok(self.make(children.to_vec()))
    }

    /// Whether `x` and all its members, hereditarily, are small relative to
    /// the signature's arities.
    pub fn is_hereditarily_small(&self, poly: &Polynomial, x: HfId) -> bool {
        let elems = self.elements(x);
        let small = if elems.is_empty() {
            poly.nullary().is_some()
        } else {
            elems.len() <= poly.max_arity()
        };
        small && elems.iter().all(|&e| self.is_hereditarily_small(poly, e))
    }

    /// All hereditarily small sets of rank at most `max_rank`, in the
    /// canonical value order. Empty when no constructor is nullary (then no
    /// set at all is hereditarily small).
    pub fn enumerate(&mut self, poly: &Polynomial, max_rank: u32, cap: u64) -> Result<Vec<HfId>> {
        if poly.nullary().is_none() {
            return Ok(Vec::new());
        }
        let max_size = poly.max_arity();
        let mut out = vec![self.empty()];
        let mut prev_len = 0usize; // values of rank < r − 1 occupy out[..prev_len]
        for _r in 1..=max_rank {
            let cur_len = out.len();
            let mut fresh = Vec::new();
            let mut stack: Vec<usize> = Vec::new();
            // Subsets of out[..cur_len] of size 1..=max_size containing at
            // least one value of the newest rank band.
            subsets(cur_len, max_size, &mut stack, &mut |positions| {
                if positions.iter().any(|&p| p >= prev_len) {
                    let elements: Vec<HfId> = positions.iter().map(|&p| out[p]).collect();
                    fresh.push(self.make(elements));
                }
            });
            fresh.sort_by(|&a, &b| self.cmp_values(a, b));
            out.extend(fresh);
            if out.len() as u64 > cap {
                return Err(Error::CapExceeded {
                    what: "hereditarily finite set enumeration",
                    needed: out.len() as u64,
                    cap,
                });
            }
            prev_len = cur_len;
        }
        Ok(out)
    }

    /// Renders in set-brace notation: `∅`, `{∅,{∅}}`.
    pub fn render(&self, x: HfId) -> String {
        let elems = self.elements(x);
        if elems.is_empty() {
            return "∅".to_string();
        }
        let inner: Vec<String> = elems.iter().map(|&e| self.render(e)).collect();
        format!("{{{}}}", inner.join(","))
    }

    /// Parses set-brace notation; `∅`, `0`, and `{}` all denote the empty set.
    pub fn parse(&mut self, text: &str) -> Result<HfId> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let id = self.parse_at(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Parse("unexpected trailing input after set".into()));
        }
        Ok(id)
    }

    fn parse_at(&mut self, chars: &[char], pos: &mut usize) -> Result<HfId> {
        match chars.get(*pos) {
            Some('∅') | Some('0') => {
                *pos += 1;
                Ok(self.empty())
            }
            Some('{') => {
                *pos += 1;
                let mut elements = Vec::new();
                if chars.get(*pos) == Some(&'}') {
                    *pos += 1;
                    return Ok(self.empty());
                }
                loop {
                    elements.push(self.parse_at(chars, pos)?);
                    match chars.get(*pos) {
                        Some(',') => *pos += 1,
                        Some('}') => {
                            *pos += 1;
                            return Ok(self.make(elements));
                        }
                        other => {
                            return Err(Error::Parse(format!(
                                "expected `,` or `}}`, found {other:?}"
                            )))
                        }
                    }
                }
            }
            other => Err(Error::Parse(format!("expected a set, found {other:?}"))),
        }
    }

    /// A term denoting `x`: the minimal-arity constructor whose arity
    /// surjects onto the elements, children repeating the last element to
    /// pad. Round-trips through the extensional reading of terms.
    pub fn to_term(&self, poly: &Polynomial, store: &mut TermStore, x: HfId) -> Result<TermId> {
        let elems = self.elements(x).to_vec();
        let k = elems.len();
        let ctor = fitting_ctor(poly, k)?;
        let arity = poly.arity(ctor);
        let mut children = Vec::with_capacity(arity);
        for i in 0..arity {
            let e = elems[i.min(k - 1)];
            children.push(self.to_term(poly, store, e)?);
        }
        store.intern(ctor, children)
    }
}

fn subsets(n: usize, max_size: usize, stack: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    let start = stack.last().map_or(0, |&p| p + 1);
    for p in start..n {
        stack.push(p);
        visit(stack);
        if stack.len() < max_size {
            subsets(n, max_size, stack, visit);
        }
        stack.pop();
    }
}

/// The minimal-arity constructor admitting a surjection onto a set of `k`
/// elements; first by index on ties.
fn fitting_ctor(poly: &Polynomial, k: usize) -> Result<CtorId> {
    poly.ctor_ids()
        .filter(|&a| {
            let n = poly.arity(a);
            if k == 0 {
                n == 0
            } else {
                n >= k
            }
        })
        .min_by_key(|&a| poly.arity(a))
        .ok_or(Error::NoConstructorFits(k))
}

/// Whether a finite algebra satisfies all image-preserving equations, via
/// the closed-form criterion: any two constructor applications whose
/// argument tuples have the same image must evaluate equally.
pub fn check_ip_algebra(poly: &Polynomial, alg: &FiniteAlgebra) -> SatCheck {
    let mut seen: HashMap<Vec<usize>, (CtorId, Vec<usize>, usize)> = HashMap::new();
    for a in poly.ctor_ids() {
        for args in tuples(alg.carrier(), poly.arity(a)) {
            let value = alg.eval(a, &args);
            let mut image = args.clone();
            image.sort();
            image.dedup();
            match seen.get(&image) {
                Some(&(b, ref prev_args, prev_value)) => {
                    if prev_value != value {
                        return SatCheck::Violated(SatViolation::Image {
                            left_ctor: b,
                            left_args: prev_args.clone(),
                            right_ctor: a,
                            right_args: args,
                            left: prev_value,
                            right: value,
                        });
                    }
                }
                None => {
                    seen.insert(image, (a, args, value));
                }
            }
        }
    }
    SatCheck::Satisfied
}

/// The unique homomorphism from hereditarily small sets into an algebra
/// satisfying all image-preserving equations, by ∈-recursion. The
/// constructor choice per set is the minimal fitting arity; satisfaction
/// makes the choice immaterial.
pub fn hf_fold(store: &HfStore, poly: &Polynomial, alg: &FiniteAlgebra, x: HfId) -> Result<usize> {
    if let SatCheck::Violated(v) = check_ip_algebra(poly, alg) {
        return Err(Error::NotSatisfying(v.to_string()));
    }
    let mut memo = HashMap::new();
    hf_fold_at(store, poly, alg, x, &mut memo)
}

fn hf_fold_at(
    store: &HfStore,
    poly: &Polynomial,
    alg: &FiniteAlgebra,
    x: HfId,
    memo: &mut HashMap<HfId, usize>,
) -> Result<usize> {
    if let Some(&v) = memo.get(&x) {
        return Ok(v);
    }
    let elems = store.elements(x).to_vec();
    let k = elems.len();
    let ctor = fitting_ctor(poly, k)?;
    let arity = poly.arity(ctor);
    let mut args = Vec::with_capacity(arity);
    for i in 0..arity {
        args.push(hf_fold_at(store, poly, alg, elems[i.min(k - 1)], memo)?);
    }
    let value = alg.eval(ctor, &args);
    memo.insert(x, value);
    Ok(value)
}

/// Value of a class under the rank-bounded approximation of the set-valued
/// fold: defined below the bound, overflow at or above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxValue {
    Defined(HfId),
    Overflow,
}

/// The homomorphism from a stage family into the algebra of hereditarily
/// small sets truncated below `alpha_bound`, plus an overflow point.
/// Indexed by class id. Raising the bound never changes a defined value.
pub fn approx_fold(sf: &StageFamily, store: &mut HfStore, alpha_bound: u32) -> Vec<ApproxValue> {
    let mut out: Vec<ApproxValue> = Vec::with_capacity(sf.class_count());
    for x in sf.class_ids() {
        if sf.rank(x) >= alpha_bound {
            out.push(ApproxValue::Overflow);
            continue;
        }
        // Children have strictly smaller rank, so they are defined already.
        let elements: Vec<HfId> = sf
            .image(x)
            .iter()
            .map(|y| match out[y.index()] {
                ApproxValue::Defined(v) => v,
                ApproxValue::Overflow => unreachable!("child rank below parent rank"),
            })
            .collect();
        out.push(ApproxValue::Defined(store.make(elements)));
    }
    out
}
