//! Polynomial signatures and image-preserving equations.
//!
//! A signature is a finite list of named constructors with finite arities;
//! the arity of constructor `a` is the index set `{0, …, arity(a) − 1}`.
//! An equation relates one constructor application to another through two
//! variable maps with equal image; that equal-image condition is the sole
//! admissibility criterion and everything downstream relies on it.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use itertools::Itertools;
use serde::Deserialize;

use crate::error::{Error, Result};

/// Index of a constructor within its [`Polynomial`], in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CtorId(pub u32);

impl CtorId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A validated signature: distinct nonempty constructor names with arities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    constructors: Vec<(String, usize)>,
}

impl Polynomial {
    /// Validates a raw list of `(name, arity)` pairs.
    pub fn new<I, S>(constructors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let constructors: Vec<(String, usize)> = constructors
            .into_iter()
            .map(|(n, a)| (n.into(), a))
            .collect();
        if constructors.is_empty() {
            return Err(Error::EmptySignature);
        }
        let mut seen = BTreeSet::new();
        for (name, _) in &constructors {
            if name.is_empty()
                || !name
                    .chars()
                    .all(|c| c.is_alphanumeric() || c == '_' || c == '-')
            {
                return Err(Error::BadName(name.clone()));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        Ok(Polynomial { constructors })
    }

    pub fn ctor_count(&self) -> usize {
        self.constructors.len()
    }

    pub fn ctor_ids(&self) -> impl Iterator<Item = CtorId> {
        (0..self.constructors.len() as u32).map(CtorId)
    }

    pub fn name(&self, a: CtorId) -> &str {
        &self.constructors[a.index()].0
    }

    pub fn arity(&self, a: CtorId) -> usize {
        self.constructors[a.index()].1
    }

    pub fn lookup(&self, name: &str) -> Option<CtorId> {
        self.constructors
            .iter()
            .position(|(n, _)| n == name)
            .map(|i| CtorId(i as u32))
    }

    /// First nullary constructor, if any.
    pub fn nullary(&self) -> Option<CtorId> {
        self.ctor_ids().find(|&a| self.arity(a) == 0)
    }

    pub fn max_arity(&self) -> usize {
        self.constructors.iter().map(|&(_, a)| a).max().unwrap_or(0)
    }
}

/// A validated image-preserving equation between two constructor applications.
///
/// Variables are `{0, …, var_count − 1}`; `left_map[i]` is the variable
/// filling child slot `i` of `left_ctor`, likewise on the right. Validation
/// guarantees `set(left_map) == set(right_map)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub var_count: usize,
    pub left_ctor: CtorId,
    pub left_map: Vec<usize>,
    pub right_ctor: CtorId,
    pub right_map: Vec<usize>,
}

impl Equation {
    /// Validates a raw equation against a signature. The equal-image condition
    /// is the sole admissibility criterion.
    pub fn new(
        poly: &Polynomial,
        var_count: usize,
        left_ctor: CtorId,
        left_map: Vec<usize>,
        right_ctor: CtorId,
        right_map: Vec<usize>,
    ) -> Result<Self> {
        for (ctor, map) in [(left_ctor, &left_map), (right_ctor, &right_map)] {
            let arity = poly.arity(ctor);
            if map.len() != arity {
                return Err(Error::ArityMismatch {
                    ctor: poly.name(ctor).to_string(),
                    expected: arity,
                    got: map.len(),
                });
            }
            for &v in map {
                if v >= var_count {
                    return Err(Error::BadVariableIndex {
                        index: v,
                        vars: var_count,
                    });
                }
            }
        }
        let left_image: BTreeSet<usize> = left_map.iter().copied().collect();
        let right_image: BTreeSet<usize> = right_map.iter().copied().collect();
        if left_image != right_image {
            return Err(Error::NotImagePreserving {
                left: left_image.into_iter().collect(),
                right: right_image.into_iter().collect(),
            });
        }
        Ok(Equation {
            var_count,
            left_ctor,
            left_map,
            right_ctor,
            right_map,
        })
    }

    /// The common image of the two variable maps, sorted.
    pub fn shared_image(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.left_map.iter().copied().collect();
        set.into_iter().collect()
    }
}

/// A symbolic equation family, kept unexpanded; the stage engine applies each
/// through a closed-form criterion rather than by enumerating its members.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// All permutations of the arity of one constructor.
    Symmetric(CtorId),
    /// Every image-preserving equation over the canonical variable set
    /// `S = Σ_a P(B_a)`.
    AllImagePreserving,
}

/// Explicit equations plus symbolic families.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    pub explicit: Vec<Equation>,
    pub families: Vec<Family>,
}

/// Shape of a rule set, used to pick canonical-form fast paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleKind {
    /// No identifications at all: the plain term algebra.
    Free,
    /// Only `Symmetric` families; carries the affected constructors.
    SymmetricOnly(BTreeSet<CtorId>),
    /// Only the all-image-preserving family.
    AllImagePreservingOnly,
    /// Anything else; only the saturation engine applies.
    Mixed,
}

impl RuleSet {
    pub fn free() -> Self {
        RuleSet::default()
    }

    pub fn symmetric(ctors: impl IntoIterator<Item = CtorId>) -> Self {
        RuleSet {
            explicit: Vec::new(),
            families: ctors.into_iter().map(Family::Symmetric).collect(),
        }
    }

    pub fn all_image_preserving() -> Self {
        RuleSet {
            explicit: Vec::new(),
            families: vec![Family::AllImagePreserving],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.explicit.is_empty() && self.families.is_empty()
    }

    pub fn sym_ctors(&self) -> BTreeSet<CtorId> {
        self.families
            .iter()
            .filter_map(|f| match f {
                Family::Symmetric(a) => Some(*a),
                Family::AllImagePreserving => None,
            })
            .collect()
    }

    pub fn has_all_ip(&self) -> bool {
        self.families.contains(&Family::AllImagePreserving)
    }

    pub fn kind(&self) -> RuleKind {
        if self.is_empty() {
            return RuleKind::Free;
        }
        if !self.explicit.is_empty() {
            return RuleKind::Mixed;
        }
        let syms = self.sym_ctors();
        if self.has_all_ip() {
            if syms.is_empty() {
                RuleKind::AllImagePreservingOnly
            } else {
                RuleKind::Mixed
            }
        } else {
            RuleKind::SymmetricOnly(syms)
        }
    }
}

/// The canonical variable set `S = Σ_a P(B_a)` for the all-image-preserving
/// family: one variable per (constructor, subset-of-arity) pair, enumerated
/// in constructor order then subset bitmask order.
pub fn canonical_variable_set_size(poly: &Polynomial) -> u64 {
    poly.ctor_ids().map(|a| 1u64 << poly.arity(a).min(62)).sum()
}

/// Expands a symbolic family into its explicit equation list. This is an
/// enumeration oracle for cross-checks; `cap_vars` bounds the blowup
/// (`arity!` for `Symmetric`, `|S|` for `AllImagePreserving`).
pub fn expand_family(poly: &Polynomial, family: Family, cap_vars: usize) -> Result<Vec<Equation>> {
    match family {
        Family::Symmetric(a) => {
            let n = poly.arity(a);
            let count: u64 = (1..=n as u64).product();
            if count > cap_vars as u64 {
                return Err(Error::CapExceeded {
                    what: "symmetric family expansion",
                    needed: count,
                    cap: cap_vars as u64,
                });
            }
            let identity: Vec<usize> = (0..n).collect();
            let mut eqs = Vec::new();
            for perm in (0..n).permutations(n) {
                eqs.push(Equation::new(poly, n, a, identity.clone(), a, perm)?);
            }
            Ok(eqs)
        }
        Family::AllImagePreserving => {
            let s = canonical_variable_set_size(poly);
            if s > cap_vars as u64 {
                return Err(Error::CapExceeded {
                    what: "all-image-preserving variable set",
                    needed: s,
                    cap: cap_vars as u64,
                });
            }
            let s = s as usize;
            let mut candidate_pairs: u64 = 0;
            for a in poly.ctor_ids() {
                for b in poly.ctor_ids() {
                    let exp = (poly.arity(a) + poly.arity(b)) as u32;
                    candidate_pairs =
                        candidate_pairs.saturating_add((s as u64).saturating_pow(exp));
                }
            }
            const PAIR_GUARD: u64 = 10_000_000;
            if candidate_pairs > PAIR_GUARD {
                return Err(Error::CapExceeded {
                    what: "all-image-preserving map pairs",
                    needed: candidate_pairs,
                    cap: PAIR_GUARD,
                });
            }
            let mut eqs = Vec::new();
            for a in poly.ctor_ids() {
                for b in poly.ctor_ids() {
                    for l in tuples(s, poly.arity(a)) {
                        let l_img: BTreeSet<usize> = l.iter().copied().collect();
                        for r in tuples(s, poly.arity(b)) {
                            let r_img: BTreeSet<usize> = r.iter().copied().collect();
                            if l_img == r_img {
                                eqs.push(Equation::new(poly, s, a, l.clone(), b, r)?);
                            }
                        }
                    }
                }
            }
            Ok(eqs)
        }
    }
}

/// All length-`len` tuples over `{0, …, base − 1}` in lexicographic order.
/// The empty tuple is the sole tuple of length 0 regardless of base.
pub(crate) fn tuples(base: usize, len: usize) -> Tuples {
    Tuples {
        base,
        current: vec![0; len],
        done: len > 0 && base == 0,
        started: false,
    }
}

pub(crate) struct Tuples {
    base: usize,
    current: Vec<usize>,
    done: bool,
    started: bool,
}

impl Iterator for Tuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current.clone());
        }
        // Odometer increment, most significant digit first.
        for i in (0..self.current.len()).rev() {
            self.current[i] += 1;
            if self.current[i] < self.base {
                return Some(self.current.clone());
            }
            self.current[i] = 0;
        }
        self.done = true;
        None
    }
}

// --- signature file format -------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSignature {
    constructors: Vec<RawCtor>,
    #[serde(default)]
    equations: Option<RawEquations>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCtor {
    name: String,
    arity: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEquations {
    #[serde(default)]
    explicit: Vec<RawEquation>,
    #[serde(default)]
    families: Vec<RawFamily>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEquation {
    vars: usize,
    left: RawSide,
    right: RawSide,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSide {
    constructor: String,
    map: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    kind: String,
    #[serde(default)]
    constructor: Option<String>,
}

/// Parses and validates a signature file.
pub fn parse_signature(text: &str) -> Result<(Polynomial, RuleSet)> {
    let raw: RawSignature = serde_json::from_str(text)?;
    let poly = Polynomial::new(raw.constructors.into_iter().map(|c| (c.name, c.arity)))?;
    let mut rules = RuleSet::free();
    if let Some(eqs) = raw.equations {
        for (i, raw_eq) in eqs.explicit.into_iter().enumerate() {
            let left = resolve(&poly, &raw_eq.left.constructor)?;
            let right = resolve(&poly, &raw_eq.right.constructor)?;
            let eq = Equation::new(
                &poly,
                raw_eq.vars,
                left,
                raw_eq.left.map,
                right,
                raw_eq.right.map,
            )
            .map_err(|e| Error::InEquation {
                index: i,
                source: Box::new(e),
            })?;
            rules.explicit.push(eq);
        }
        for f in eqs.families {
            match f.kind.as_str() {
                "symmetric" => {
                    let name = f.constructor.ok_or_else(|| {
                        Error::Parse("symmetric family requires \"constructor\"".into())
                    })?;
                    rules
                        .families
                        .push(Family::Symmetric(resolve(&poly, &name)?));
                }
                "all-image-preserving" => {
                    if f.constructor.is_some() {
                        return Err(Error::Parse(
                            "all-image-preserving family takes no constructor".into(),
                        ));
                    }
                    rules.families.push(Family::AllImagePreserving);
                }
                other => {
                    return Err(Error::Parse(format!("unknown family kind `{other}`")));
                }
            }
        }
    }
    Ok((poly, rules))
}

/// Reads and validates a signature file from disk.
pub fn load_signature(path: impl AsRef<Path>) -> Result<(Polynomial, RuleSet)> {
    parse_signature(&std::fs::read_to_string(path)?)
}

fn resolve(poly: &Polynomial, name: &str) -> Result<CtorId> {
    poly.lookup(name)
        .ok_or_else(|| Error::UnknownConstructor(name.to_string()))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .constructors
            .iter()
            .map(|(n, a)| format!("{n}:{a}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ut2() -> Polynomial {
        Polynomial::new([("leaf", 0), ("node", 2)]).unwrap()
    }

    #[test]
    fn polynomial_assigns_indices_in_declaration_order() {
        let p = ut2();
        assert_eq!(p.lookup("leaf"), Some(CtorId(0)));
        assert_eq!(p.lookup("node"), Some(CtorId(1)));
        assert_eq!(p.arity(CtorId(0)), 0);
        assert_eq!(p.arity(CtorId(1)), 2);
    }

    #[test]
    fn duplicate_and_empty_signatures_rejected() {
        assert!(matches!(
            Polynomial::new([("leaf", 0), ("leaf", 1)]),
            Err(Error::DuplicateName(_))
        ));
        assert!(matches!(
            Polynomial::new(Vec::<(String, usize)>::new()),
            Err(Error::EmptySignature)
        ));
    }

    #[test]
    fn transposition_is_image_preserving() {
        let p = ut2();
        let node = p.lookup("node").unwrap();
        let eq = Equation::new(&p, 2, node, vec![0, 1], node, vec![1, 0]).unwrap();
        assert_eq!(eq.shared_image(), vec![0, 1]);
    }

    #[test]
    fn unequal_images_rejected() {
        let p = ut2();
        let node = p.lookup("node").unwrap();
        let err = Equation::new(&p, 2, node, vec![0, 0], node, vec![0, 1]).unwrap_err();
        match err {
            Error::NotImagePreserving { left, right } => {
                assert_eq!(left, vec![0]);
                assert_eq!(right, vec![0, 1]);
            }
            other => panic!("expected NotImagePreserving, got {other:?}"),
        }
    }

    #[test]
    fn equal_images_with_different_multiplicity_are_valid() {
        let p = Polynomial::new([("p", 2), ("q", 3)]).unwrap();
        let eq = Equation::new(
            &p,
            2,
            p.lookup("p").unwrap(),
            vec![0, 1],
            p.lookup("q").unwrap(),
            vec![0, 0, 1],
        );
        assert!(eq.is_ok());
    }

    #[test]
    fn map_length_and_variable_range_checked() {
        let p = ut2();
        let node = p.lookup("node").unwrap();
        assert!(matches!(
            Equation::new(&p, 2, node, vec![0], node, vec![0, 1]),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            Equation::new(&p, 2, node, vec![0, 2], node, vec![0, 2]),
            Err(Error::BadVariableIndex { index: 2, vars: 2 })
        ));
    }

    #[test]
    fn empty_variable_set_legal_only_for_nullary_pairs() {
        let p = Polynomial::new([("z", 0), ("o", 0), ("node", 2)]).unwrap();
        let z = p.lookup("z").unwrap();
        let o = p.lookup("o").unwrap();
        assert!(Equation::new(&p, 0, z, vec![], o, vec![]).is_ok());
        // With V = ∅ a map out of a nonempty arity cannot exist.
        let node = p.lookup("node").unwrap();
        assert!(matches!(
            Equation::new(&p, 0, node, vec![0, 0], node, vec![0, 0]),
            Err(Error::BadVariableIndex { .. })
        ));
    }

    #[test]
    fn symmetric_expansion_counts_and_identity() {
        let p = ut2();
        let node = p.lookup("node").unwrap();
        let eqs = expand_family(&p, Family::Symmetric(node), 100).unwrap();
        assert_eq!(eqs.len(), 2);
        assert!(eqs
            .iter()
            .any(|e| e.left_map == e.right_map && e.left_map == vec![0, 1]));

        let p3 = Polynomial::new([("leaf", 0), ("node", 3)]).unwrap();
        let n3 = p3.lookup("node").unwrap();
        assert_eq!(
            expand_family(&p3, Family::Symmetric(n3), 100)
                .unwrap()
                .len(),
            6
        );

        let nullary = expand_family(&p, Family::Symmetric(CtorId(0)), 100).unwrap();
        assert_eq!(nullary.len(), 1);
    }

    #[test]
    fn symmetric_expansion_cap() {
        let p = Polynomial::new([("n", 5)]).unwrap();
        assert!(matches!(
            expand_family(&p, Family::Symmetric(CtorId(0)), 100),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn all_ip_expansion_matches_brute_force_oracle() {
        // Independent oracle: enumerate every (a, b, l, r) over S and filter
        // by equal image, counting without constructing Equation values.
        let p = Polynomial::new([("empty", 0), ("pair", 2)]).unwrap();
        let s = canonical_variable_set_size(&p) as usize;
        assert_eq!(s, 5);
        let mut expected = 0usize;
        for a in 0..2usize {
            for b in 0..2usize {
                let arity = |i: usize| if i == 0 { 0 } else { 2 };
                for l in tuples(s, arity(a)) {
                    let li: BTreeSet<usize> = l.iter().copied().collect();
                    for r in tuples(s, arity(b)) {
                        let ri: BTreeSet<usize> = r.iter().copied().collect();
                        if li == ri {
                            expected += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(expected, 46);
        let eqs = expand_family(&p, Family::AllImagePreserving, 8).unwrap();
        assert_eq!(eqs.len(), 46);
        // Every produced equation re-validates, and none is missed: validity
        // of a candidate is exactly the equal-image filter above.
        for eq in &eqs {
            assert!(Equation::new(
                &p,
                eq.var_count,
                eq.left_ctor,
                eq.left_map.clone(),
                eq.right_ctor,
                eq.right_map.clone()
            )
            .is_ok());
        }
    }

    #[test]
    fn all_ip_expansion_cap_on_variable_set() {
        let p = Polynomial::new([("big", 4)]).unwrap();
        assert!(matches!(
            expand_family(&p, Family::AllImagePreserving, 8),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn signature_file_round_trip() {
        let text = r#"
        { "constructors": [ {"name": "leaf", "arity": 0}, {"name": "node", "arity": 2} ],
          "equations": { "explicit": [ {"vars": 2,
                                        "left": {"constructor": "node", "map": [0,1]},
                                        "right": {"constructor": "node", "map": [1,0]}} ],
                         "families": [ {"kind": "symmetric", "constructor": "node"},
                                       {"kind": "all-image-preserving"} ] } }
        "#;
        let (poly, rules) = parse_signature(text).unwrap();
        assert_eq!(poly.ctor_count(), 2);
        assert_eq!(rules.explicit.len(), 1);
        assert_eq!(rules.families.len(), 2);
        assert_eq!(rules.kind(), RuleKind::Mixed);
    }

    #[test]
    fn signature_file_rejects_unknown_keys() {
        let text = r#"{ "constructors": [{"name": "leaf", "arity": 0}], "extra": 1 }"#;
        assert!(parse_signature(text).is_err());
        let text = r#"{ "constructors": [{"name": "leaf", "arity": 0, "color": "red"}] }"#;
        assert!(parse_signature(text).is_err());
    }

    #[test]
    fn signature_file_without_equations_is_free() {
        let text =
            r#"{ "constructors": [ {"name": "leaf", "arity": 0}, {"name": "node", "arity": 2} ] }"#;
        let (_, rules) = parse_signature(text).unwrap();
        assert_eq!(rules.kind(), RuleKind::Free);
    }

    #[test]
    fn signature_file_diagnostics_name_the_equation() {
        let text = r#"
        { "constructors": [ {"name": "leaf", "arity": 0}, {"name": "node", "arity": 2} ],
          "equations": { "explicit": [ {"vars": 2,
                                        "left": {"constructor": "node", "map": [0,0]},
                                        "right": {"constructor": "node", "map": [0,1]}} ] } }
        "#;
        let err = parse_signature(text).unwrap_err();
        assert!(err.to_string().contains("equation #0"));
        assert!(err.to_string().contains("not image preserving"));
    }

    #[test]
    fn tuples_odometer_shapes() {
        assert_eq!(tuples(3, 0).count(), 1);
        assert_eq!(tuples(0, 2).count(), 0);
        let all: Vec<Vec<usize>> = tuples(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }
}
