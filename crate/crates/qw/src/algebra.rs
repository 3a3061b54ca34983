//! Finite algebras over a signature and the universal-property surface:
//! satisfaction checking, the fold out of a stage family, homomorphism
//! verification, and brute-force uniqueness counting.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::signature::{tuples, CtorId, Equation, Family, Polynomial, RuleSet};
use crate::stages::{Caps, ClassId, Node, StageFamily};
use crate::term::{TermId, TermStore};

/// A finite carrier `{0, …, m−1}` with one total operation table per
/// constructor, stored row-major with the first argument most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    carrier: usize,
    tables: Vec<Vec<usize>>,
}

impl FiniteAlgebra {
    pub fn new(poly: &Polynomial, carrier: usize, tables: Vec<Vec<usize>>) -> Result<Self> {
        if carrier == 0 {
            return Err(Error::Parse("carrier must be nonempty".into()));
        }
        if tables.len() != poly.ctor_count() {
            return Err(Error::Parse(format!(
                "expected {} operation tables, got {}",
                poly.ctor_count(),
                tables.len()
            )));
        }
        for a in poly.ctor_ids() {
            let expected = carrier
                .checked_pow(poly.arity(a) as u32)
                .ok_or_else(|| Error::Parse("operation table too large".into()))?;
            let table = &tables[a.index()];
            if table.len() != expected {
                return Err(Error::Parse(format!(
                    "op table for `{}` has {} entries, expected {}",
                    poly.name(a),
                    table.len(),
                    expected
                )));
            }
            if let Some(&bad) = table.iter().find(|&&v| v >= carrier) {
                return Err(Error::Parse(format!(
                    "op table for `{}` contains {} outside the carrier",
                    poly.name(a),
                    bad
                )));
            }
        }
        Ok(FiniteAlgebra { carrier, tables })
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn eval(&self, ctor: CtorId, args: &[usize]) -> usize {
        let idx = args.iter().fold(0usize, |acc, &a| acc * self.carrier + a);
        self.tables[ctor.index()][idx]
    }

    /// Parses `{ "carrier": 2, "ops": { "leaf": 0, "node": [[0,1],[1,1]] } }`.
    /// Tables are nested arrays indexed by argument, one nesting level per
    /// child; a nullary op is a bare element.
    pub fn from_json(poly: &Polynomial, text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RawAlgebra {
            carrier: usize,
            ops: serde_json::Map<String, serde_json::Value>,
        }
        let raw: RawAlgebra = serde_json::from_str(text)?;
        for name in raw.ops.keys() {
            if poly.lookup(name).is_none() {
                return Err(Error::UnknownConstructor(name.clone()));
            }
        }
        let mut tables = Vec::with_capacity(poly.ctor_count());
        for a in poly.ctor_ids() {
            let value = raw
                .ops
                .get(poly.name(a))
                .ok_or_else(|| Error::Parse(format!("missing op table for `{}`", poly.name(a))))?;
            let mut flat = Vec::new();
            flatten_table(value, poly.arity(a), raw.carrier, &mut flat)?;
            tables.push(flat);
        }
        FiniteAlgebra::new(poly, raw.carrier, tables)
    }

    pub fn load(poly: &Polynomial, path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(poly, &std::fs::read_to_string(path)?)
    }
}

fn flatten_table(
    value: &serde_json::Value,
    depth: usize,
    carrier: usize,
    out: &mut Vec<usize>,
) -> Result<()> {
    if depth == 0 {
        let v = value
            .as_u64()
            .ok_or_else(|| Error::Parse(format!("expected a carrier element, got {value}")))?;
        out.push(v as usize);
        return Ok(());
    }
    let arr = value
        .as_array()
        .ok_or_else(|| Error::Parse(format!("expected a nested array, got {value}")))?;
    if arr.len() != carrier {
        return Err(Error::Parse(format!(
            "expected {} table rows, got {}",
            carrier,
            arr.len()
        )));
    }
    for v in arr {
        flatten_table(v, depth - 1, carrier, out)?;
    }
    Ok(())
}

/// Outcome of a satisfaction check, with the first witnessing instance on
/// failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatCheck {
    Satisfied,
    Violated(SatViolation),
}

impl SatCheck {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, SatCheck::Satisfied)
    }

    pub fn violation(&self) -> Option<&SatViolation> {
        match self {
            SatCheck::Satisfied => None,
            SatCheck::Violated(v) => Some(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatViolation {
    /// An explicit equation fails at an assignment of its variables.
    Equation {
        index: usize,
        assignment: Vec<usize>,
        left: usize,
        right: usize,
    },
    /// A symmetric constructor's table is not permutation-invariant.
    Permutation {
        ctor: CtorId,
        args: Vec<usize>,
        sorted: Vec<usize>,
        left: usize,
        right: usize,
    },
    /// Two applications with equal argument image evaluate differently.
    Image {
        left_ctor: CtorId,
        left_args: Vec<usize>,
        right_ctor: CtorId,
        right_args: Vec<usize>,
        left: usize,
        right: usize,
    },
}

impl fmt::Display for SatViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SatViolation::Equation {
                index,
                assignment,
                left,
                right,
            } => write!(
                f,
                "equation #{index} fails at assignment {assignment:?}: {left} != {right}"
            ),
            SatViolation::Permutation {
                ctor,
                args,
                sorted,
                left,
                right,
            } => write!(
                f,
                "constructor {} not symmetric: {args:?} -> {left}, {sorted:?} -> {right}",
                ctor.0
            ),
            SatViolation::Image {
                left_ctor,
                left_args,
                right_ctor,
                right_args,
                left,
                right,
            } => write!(
                f,
                "equal-image applications disagree: ctor {} at {left_args:?} -> {left}, ctor {} at {right_args:?} -> {right}",
                left_ctor.0, right_ctor.0
            ),
        }
    }
}

/// Checks explicit equations by full assignment enumeration; the first
/// failing `(equation, assignment)` pair is the witness.
pub fn check_satisfies(alg: &FiniteAlgebra, eqs: &[Equation], caps: Caps) -> Result<SatCheck> {
    let m = alg.carrier();
    for (index, eq) in eqs.iter().enumerate() {
        let count = (m as u64).saturating_pow(eq.var_count as u32);
        if count > caps.max_assignments {
            return Err(Error::CapExceeded {
                what: "satisfaction assignments",
                needed: count,
                cap: caps.max_assignments,
            });
        }
        for h in tuples(m, eq.var_count) {
            let left_args: Vec<usize> = eq.left_map.iter().map(|&v| h[v]).collect();
            let right_args: Vec<usize> = eq.right_map.iter().map(|&v| h[v]).collect();
            let left = alg.eval(eq.left_ctor, &left_args);
            let right = alg.eval(eq.right_ctor, &right_args);
            if left != right {
                return Ok(SatCheck::Violated(SatViolation::Equation {
                    index,
                    assignment: h,
                    left,
                    right,
                }));
            }
        }
    }
    Ok(SatCheck::Satisfied)
}

/// Checks a full rule set: explicit equations by enumeration, `Symmetric`
/// families by comparing each table entry against its sorted argument
/// tuple (permutation invariance is equivalent to that), and the
/// all-image-preserving family by the equal-image criterion.
pub fn check_satisfies_rules(
    poly: &Polynomial,
    alg: &FiniteAlgebra,
    rules: &RuleSet,
    caps: Caps,
) -> Result<SatCheck> {
    if let SatCheck::Violated(v) = check_satisfies(alg, &rules.explicit, caps)? {
        return Ok(SatCheck::Violated(v));
    }
    for family in &rules.families {
        match family {
            Family::Symmetric(a) => {
                for args in tuples(alg.carrier(), poly.arity(*a)) {
                    let mut sorted = args.clone();
                    sorted.sort();
                    let left = alg.eval(*a, &args);
                    let right = alg.eval(*a, &sorted);
                    if left != right {
                        return Ok(SatCheck::Violated(SatViolation::Permutation {
                            ctor: *a,
                            args,
                            sorted,
                            left,
                            right,
                        }));
                    }
                }
            }
            Family::AllImagePreserving => {
                if let SatCheck::Violated(v) = crate::hered::check_ip_algebra(poly, alg) {
                    return Ok(SatCheck::Violated(v));
                }
            }
        }
    }
    Ok(SatCheck::Satisfied)
}

/// The fold of a stage family into a finite algebra: one carrier element
/// per class, computed by rank recursion over representatives and then
/// verified against every member application. Disagreement on a merged
/// pair means the algebra fails the equations realized at this depth and
/// is reported as the witness.
pub fn fold(sf: &StageFamily, alg: &FiniteAlgebra) -> Result<Vec<usize>> {
    let poly = sf.poly();
    let mut h: Vec<usize> = Vec::with_capacity(sf.class_count());
    for x in sf.class_ids() {
        let repr = sf.representative(x);
        let args: Vec<usize> = repr.children.iter().map(|c| h[c.index()]).collect();
        h.push(alg.eval(repr.ctor, &args));
    }
    let mut nodes: Vec<(&Node, ClassId)> = sf.nodes().collect();
    nodes.sort();
    for (node, class) in nodes {
        let args: Vec<usize> = node.children.iter().map(|c| h[c.index()]).collect();
        let got = alg.eval(node.ctor, &args);
        if got != h[class.index()] {
            let repr = sf.representative(class);
            return Err(Error::NotSatisfying(format!(
                "merged applications disagree: {} -> {}, {} -> {}",
                describe_node(poly, repr),
                h[class.index()],
                describe_node(poly, node),
                got
            )));
        }
    }
    Ok(h)
}

fn describe_node(poly: &Polynomial, node: &Node) -> String {
    let children: Vec<String> = node.children.iter().map(|c| c.to_string()).collect();
    format!("{}({})", poly.name(node.ctor), children.join(","))
}

/// Whether `h` (total on all classes) satisfies the homomorphism equation
/// for every application whose children have rank below `depth − 1`, so
/// that the parent still lies within the computed truncation.
pub fn is_homomorphism(sf: &StageFamily, alg: &FiniteAlgebra, h: &[usize]) -> bool {
    assert_eq!(h.len(), sf.class_count());
    let depth = sf.depth();
    if depth == 0 {
        return true;
    }
    // Classes of rank < depth − 1 are exactly Q(depth − 1), a prefix of ids.
    let pool = sf.stage_sizes()[depth - 1];
    for a in sf.poly().ctor_ids() {
        for tuple in tuples(pool, sf.poly().arity(a)) {
            let node = Node {
                ctor: a,
                children: tuple.iter().map(|&i| ClassId(i as u32)).collect(),
            };
            let parent = sf
                .class_of_node(&node)
                .expect("application within computed depth");
            let args: Vec<usize> = node.children.iter().map(|c| h[c.index()]).collect();
            if h[parent.index()] != alg.eval(a, &args) {
                return false;
            }
        }
    }
    true
}

/// Counts all functions from the classes of rank ≤ `rank_bound` to the
/// carrier that satisfy the homomorphism equation on every application
/// whose children have rank < `rank_bound` (every parent of rank ≤
/// `rank_bound` arises that way). Exactly 1 whenever the algebra satisfies
/// the rules.
pub fn count_homomorphisms(
    sf: &StageFamily,
    alg: &FiniteAlgebra,
    rank_bound: u32,
    cap: u64,
) -> Result<u64> {
    assert!(
        sf.depth() > rank_bound as usize,
        "stage family too shallow for the requested bound"
    );
    let domain = sf.stage_sizes()[rank_bound as usize + 1]; // classes of rank ≤ bound
    let pool = sf.stage_sizes()[rank_bound as usize]; // classes of rank < bound
    let m = alg.carrier();
    let total = (m as u64).saturating_pow(domain as u32);
    if total > cap {
        return Err(Error::CapExceeded {
            what: "homomorphism candidates",
            needed: total,
            cap,
        });
    }
    // Precompute the condition set once.
    let mut conditions: Vec<(usize, CtorId, Vec<usize>)> = Vec::new();
    for a in sf.poly().ctor_ids() {
        for tuple in tuples(pool, sf.poly().arity(a)) {
            let node = Node {
                ctor: a,
                children: tuple.iter().map(|&i| ClassId(i as u32)).collect(),
            };
            let parent = sf
                .class_of_node(&node)
                .expect("application within computed depth");
            conditions.push((parent.index(), a, tuple));
        }
    }
    let mut count = 0;
    for h in tuples(m, domain) {
        let ok = conditions.iter().all(|(parent, a, children)| {
            let args: Vec<usize> = children.iter().map(|&c| h[c]).collect();
            h[*parent] == alg.eval(*a, &args)
        });
        if ok {
            count += 1;
        }
    }
    Ok(count)
}

/// Every explicit equation instantiated by every assignment of its
/// variables to `Q(stage − 1)` must canonicalize both sides to one class;
/// this checks the stage algebra against its own equations at finite depth.
pub fn stage_respects_equations(sf: &StageFamily, eqs: &[Equation], stage: usize) -> bool {
    assert!(stage >= 1 && stage <= sf.depth());
    let q = sf.stage_sizes()[stage - 1];
    for eq in eqs {
        for g in tuples(q, eq.var_count) {
            let node = |ctor: CtorId, map: &[usize]| Node {
                ctor,
                children: map.iter().map(|&v| ClassId(g[v] as u32)).collect(),
            };
            let left = sf.class_of_node(&node(eq.left_ctor, &eq.left_map));
            let right = sf.class_of_node(&node(eq.right_ctor, &eq.right_map));
            match (left, right) {
                (Some(l), Some(r)) if l == r => {}
                _ => return false,
            }
        }
    }
    true
}

/// Result of mapping an ordered term into a symmetric stage family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnorderedReport {
    pub class: ClassId,
    pub term_rank: u32,
    pub class_rank: u32,
}

impl UnorderedReport {
    pub fn rank_preserved(&self) -> bool {
        self.term_rank == self.class_rank
    }
}

/// Maps a plain ordered term to its class in a symmetric (or otherwise
/// quotiented) stage family and reports both ranks.
pub fn ordered_to_unordered(
    sf: &mut StageFamily,
    store: &TermStore,
    t: TermId,
) -> Result<UnorderedReport> {
    let class = sf.canonicalize(store, t)?;
    Ok(UnorderedReport {
        class,
        term_rank: store.rank(t),
        class_rank: sf.rank(class),
    })
}

/// Samples operation tables uniformly and keeps algebras satisfying the
/// rules, until `count` are found. Deterministic for a fixed seed.
pub fn random_satisfying_algebras(
    poly: &Polynomial,
    rules: &RuleSet,
    max_carrier: usize,
    count: usize,
    seed: u64,
    caps: Caps,
) -> Result<Vec<FiniteAlgebra>> {
    assert!(max_carrier >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts: u64 = 0;
    const MAX_ATTEMPTS: u64 = 1_000_000;
    while out.len() < count {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            return Err(Error::CapExceeded {
                what: "random algebra attempts",
                needed: attempts,
                cap: MAX_ATTEMPTS,
            });
        }
        let m = rng.gen_range(1..=max_carrier);
        let tables: Vec<Vec<usize>> = poly
            .ctor_ids()
            .map(|a| {
                (0..m.pow(poly.arity(a) as u32))
                    .map(|_| rng.gen_range(0..m))
                    .collect()
            })
            .collect();
        let alg = FiniteAlgebra::new(poly, m, tables)?;
        if check_satisfies_rules(poly, &alg, rules, caps)?.is_satisfied() {
            out.push(alg);
        }
    }
    Ok(out)
}
