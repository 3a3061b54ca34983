//! The staged quotient construction.
//!
//! Stage 0 is empty. Stage k+1 takes every constructor application over the
//! classes of stage k and quotients it by the equivalence generated by the
//! rules: explicit equations are instantiated by assignments of their
//! variables to stage-k classes, a `Symmetric` family identifies
//! applications with equal child multisets, and `AllImagePreserving`
//! identifies applications with equal child image sets. Because both sides
//! of every rule share an image set, identifications never cross rank
//! bands: a class first appearing at stage k+1 has rank exactly k, and
//! classes existing at stage k keep their ids forever.
//!
//! Each stage replays every rule instance over the full class set, so stage
//! monotonicity (no later stage merges previously distinct classes) and
//! image well-definedness (all member applications of a class share one
//! image set) are checked on every build rather than assumed.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::signature::{tuples, CtorId, Polynomial, RuleSet};
use crate::term::{TermId, TermStore};

/// Handle to one quotient class. Ids are dense and assigned in order of
/// first appearance (stage, then constructor index, then lexicographic
/// child tuple of the least member), so children always have smaller ids
/// than their parents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub u32);

impl ClassId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for ClassId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One constructor application over classes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub ctor: CtorId,
    pub children: Vec<ClassId>,
}

impl Node {
    /// The image set of the child function: sorted, duplicate-free.
    pub fn image(&self) -> Vec<ClassId> {
        let set: BTreeSet<ClassId> = self.children.iter().copied().collect();
        set.into_iter().collect()
    }
}

/// Resource limits for saturation and enumeration. Exceeding a cap aborts
/// with [`Error::CapExceeded`] rather than degrading.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub max_classes: usize,
    pub max_assignments: u64,
    pub max_enumeration: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_classes: 100_000,
            max_assignments: 10_000_000,
            max_enumeration: 10_000_000,
        }
    }
}

struct ClassInfo {
    first_stage: u32,
    rank: u32,
    repr: Node,
    image: Vec<ClassId>,
}

/// The computed quotient stages of one signature and rule set.
pub struct StageFamily {
    poly: Polynomial,
    rules: RuleSet,
    caps: Caps,
    classes: Vec<ClassInfo>,
    stage_sizes: Vec<usize>,
    node_class: HashMap<Node, ClassId>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Member {
    Old(ClassId),
    New(usize),
}

impl StageFamily {
    /// Builds stages 0..=depth.
    pub fn build(poly: Polynomial, rules: RuleSet, depth: usize, caps: Caps) -> Result<Self> {
        Ok(Self::build_audited(poly, rules, depth, caps)?.0)
    }

    /// Like [`StageFamily::build`] but additionally reports, per stage, how
    /// many saturation rounds performed at least one merge. The rule
    /// instances at a stage depend only on the previous stage, so a single
    /// round closes the generated equivalence; the report lets callers audit
    /// that no stage ever needed a second round.
    pub fn build_audited(
        poly: Polynomial,
        rules: RuleSet,
        depth: usize,
        caps: Caps,
    ) -> Result<(Self, Vec<usize>)> {
        let mut family = StageFamily {
            poly,
            rules,
            caps,
            classes: Vec::new(),
            stage_sizes: vec![0],
            node_class: HashMap::new(),
        };
        let mut rounds = Vec::new();
        for _ in 0..depth {
            rounds.push(family.extend_one(true)?);
        }
        Ok((family, rounds))
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    /// Highest computed stage index n; classes cover ranks `< n`.
    pub fn depth(&self) -> usize {
        self.stage_sizes.len() - 1
    }

    /// Cumulative sizes `|Q(0)|, …, |Q(depth)|`.
    pub fn stage_sizes(&self) -> &[usize] {
        &self.stage_sizes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_ids(&self) -> impl Iterator<Item = ClassId> {
        (0..self.classes.len() as u32).map(ClassId)
    }

    pub fn classes_of_rank_le(&self, rank: u32) -> Vec<ClassId> {
        self.class_ids().filter(|&x| self.rank(x) <= rank).collect()
    }

    /// Smallest stage containing the class; always `rank + 1`.
    pub fn first_stage(&self, x: ClassId) -> u32 {
        self.classes[x.index()].first_stage
    }

    pub fn rank(&self, x: ClassId) -> u32 {
        self.classes[x.index()].rank
    }

    /// The least member application of the class.
    pub fn representative(&self, x: ClassId) -> &Node {
        &self.classes[x.index()].repr
    }

    /// The common child-image set of every member application.
    pub fn image(&self, x: ClassId) -> &[ClassId] {
        &self.classes[x.index()].image
    }

    /// All known applications with their classes. Iteration order is
    /// unspecified; sort before relying on it.
    pub fn nodes(&self) -> impl Iterator<Item = (&Node, ClassId)> {
        self.node_class.iter().map(|(n, &c)| (n, c))
    }

    /// Looks up the class of an application whose children are classes.
    pub fn class_of_node(&self, node: &Node) -> Option<ClassId> {
        self.node_class.get(node).copied()
    }

    /// `∪X`: the union of the images of the members of `X`.
    pub fn union_of(&self, xs: impl IntoIterator<Item = ClassId>) -> BTreeSet<ClassId> {
        let mut out = BTreeSet::new();
        for x in xs {
            out.extend(self.image(x).iter().copied());
        }
        out
    }

    /// Everything reachable from `x` by one or more image steps.
    pub fn transitive_closure(&self, x: ClassId) -> BTreeSet<ClassId> {
        let mut out = BTreeSet::new();
        let mut frontier = self.union_of([x]);
        while !frontier.is_empty() {
            let next = self.union_of(frontier.iter().copied());
            out.extend(frontier);
            frontier = next;
        }
        out
    }

    /// `R_n(x)`: the ranks found at image-depth exactly `n` below `x`.
    pub fn r_n(&self, x: ClassId, n: usize) -> BTreeSet<u32> {
        assert!(n >= 1, "image depth starts at 1");
        let mut frontier: BTreeSet<ClassId> = [x].into();
        for _ in 0..n {
            frontier = self.union_of(frontier.iter().copied());
        }
        frontier.into_iter().map(|y| self.rank(y)).collect()
    }

    /// Extends the family to stage `depth` if it is shallower.
    pub fn extend_to(&mut self, depth: usize) -> Result<()> {
        while self.depth() < depth {
            self.extend_one(false)?;
        }
        Ok(())
    }

    /// The class of a term, extending the family to `rank(t) + 1` stages if
    /// necessary.
    pub fn canonicalize(&mut self, store: &TermStore, t: TermId) -> Result<ClassId> {
        debug_assert_eq!(store.poly(), &self.poly, "term store signature mismatch");
        self.extend_to(store.rank(t) as usize + 1)?;
        let mut memo = HashMap::new();
        Ok(self.resolve_term(store, t, &mut memo))
    }

    fn resolve_term(
        &self,
        store: &TermStore,
        t: TermId,
        memo: &mut HashMap<TermId, ClassId>,
    ) -> ClassId {
        if let Some(&c) = memo.get(&t) {
            return c;
        }
        let children = store
            .children(t)
            .iter()
            .map(|&c| self.resolve_term(store, c, memo))
            .collect();
        let node = Node {
            ctor: store.ctor(t),
            children,
        };
        let class = *self
            .node_class
            .get(&node)
            .expect("application present within computed depth");
        memo.insert(t, class);
        class
    }

    /// Decides whether two terms denote the same class. Terms of different
    /// raw rank are distinct without building anything.
    pub fn decide_eq(&mut self, store: &TermStore, t1: TermId, t2: TermId) -> Result<bool> {
        if store.rank(t1) != store.rank(t2) {
            return Ok(false);
        }
        Ok(self.canonicalize(store, t1)? == self.canonicalize(store, t2)?)
    }

    /// The stage graph in DOT format: one node per class labeled `id:rank`,
    /// one edge per image membership.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph stages {\n");
        for x in self.class_ids() {
            let _ = writeln!(out, "  c{} [label=\"{}:{}\"];", x, x, self.rank(x));
        }
        for x in self.class_ids() {
            for y in self.image(x) {
                let _ = writeln!(out, "  c{} -> c{};", x, y);
            }
        }
        out.push_str("}\n");
        out
    }

    fn resolve_node(&self, new_index: &HashMap<Node, usize>, node: &Node) -> Member {
        if let Some(&c) = self.node_class.get(node) {
            Member::Old(c)
        } else {
            Member::New(
                *new_index
                    .get(node)
                    .expect("application enumerated this stage"),
            )
        }
    }

    /// Builds one further stage; returns the number of saturation rounds
    /// that merged anything (0 or 1 unless the rule set were to interact
    /// across rounds, which the construction rules out).
    fn extend_one(&mut self, audit_fixpoint: bool) -> Result<usize> {
        let k = self.stage_sizes.len() as u32; // the stage being built
        let q = self.classes.len();

        let mut node_budget: u64 = 0;
        for a in self.poly.ctor_ids() {
            node_budget =
                node_budget.saturating_add((q as u64).saturating_pow(self.poly.arity(a) as u32));
        }
        if node_budget > self.caps.max_enumeration {
            return Err(Error::CapExceeded {
                what: "stage application enumeration",
                needed: node_budget,
                cap: self.caps.max_enumeration,
            });
        }

        // All applications over Q(k−1), new ones in deterministic order.
        let mut new_nodes: Vec<Node> = Vec::new();
        let mut new_index: HashMap<Node, usize> = HashMap::new();
        for a in self.poly.ctor_ids() {
            for tuple in tuples(q, self.poly.arity(a)) {
                let node = Node {
                    ctor: a,
                    children: tuple.into_iter().map(|i| ClassId(i as u32)).collect(),
                };
                if !self.node_class.contains_key(&node) && !new_index.contains_key(&node) {
                    new_index.insert(node.clone(), new_nodes.len());
                    new_nodes.push(node);
                }
            }
        }

        let mut uf = UnionFind::new(new_nodes.len());
        let mut merge_rounds = 0;
        loop {
            let mut merged = false;
            merged |= self.apply_explicit(&mut uf, &new_index, q)?;
            merged |= self.apply_symmetric(&mut uf, &new_nodes);
            merged |= self.apply_all_image_preserving(&mut uf, &new_nodes);
            if merged {
                merge_rounds += 1;
            }
            if !audit_fixpoint || !merged {
                break;
            }
        }

        // Collect the new classes and assign ids deterministically.
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..new_nodes.len() {
            groups.entry(uf.find(i)).or_default().push(i);
        }
        let mut group_list: Vec<(Node, Vec<usize>)> = groups
            .into_values()
            .map(|members| {
                let repr = members
                    .iter()
                    .map(|&i| new_nodes[i].clone())
                    .min()
                    .expect("nonempty class");
                (repr, members)
            })
            .collect();
        group_list.sort();

        for (repr, members) in group_list {
            let id = ClassId(self.classes.len() as u32);
            let image = repr.image();
            for &m in &members {
                assert_eq!(
                    new_nodes[m].image(),
                    image,
                    "image well-definedness violated during saturation"
                );
            }
            let rank = if image.is_empty() {
                0
            } else {
                1 + image.iter().map(|y| self.rank(*y)).max().unwrap()
            };
            assert_eq!(rank, k - 1, "new class rank must match its first stage");
            self.classes.push(ClassInfo {
                first_stage: k,
                rank,
                repr,
                image,
            });
            for m in members {
                self.node_class.insert(new_nodes[m].clone(), id);
            }
        }

        if self.classes.len() > self.caps.max_classes {
            return Err(Error::CapExceeded {
                what: "class count",
                needed: self.classes.len() as u64,
                cap: self.caps.max_classes as u64,
            });
        }
        self.stage_sizes.push(self.classes.len());
        Ok(merge_rounds)
    }

    /// Instantiates every explicit equation over the previous stage.
    /// Assignments range over the shared image of the two variable maps;
    /// the induced applications depend on nothing else, and this keeps the
    /// pair set meaningful even while the previous stage is empty.
    fn apply_explicit(
        &self,
        uf: &mut UnionFind,
        new_index: &HashMap<Node, usize>,
        q: usize,
    ) -> Result<bool> {
        let mut merged = false;
        for eq in &self.rules.explicit {
            let image_vars = eq.shared_image();
            let count = (q as u64).saturating_pow(image_vars.len() as u32);
            if count > self.caps.max_assignments {
                return Err(Error::CapExceeded {
                    what: "equation assignments per stage",
                    needed: count,
                    cap: self.caps.max_assignments,
                });
            }
            let slot = |v: usize| image_vars.binary_search(&v).expect("variable in image");
            for assignment in tuples(q, image_vars.len()) {
                let instantiate = |ctor: CtorId, map: &[usize]| Node {
                    ctor,
                    children: map
                        .iter()
                        .map(|&v| ClassId(assignment[slot(v)] as u32))
                        .collect(),
                };
                let left = instantiate(eq.left_ctor, &eq.left_map);
                let right = instantiate(eq.right_ctor, &eq.right_map);
                merged |= self.identify(
                    uf,
                    self.resolve_node(new_index, &left),
                    self.resolve_node(new_index, &right),
                );
            }
        }
        Ok(merged)
    }

    /// Equal child multisets within a symmetric constructor: exactly the
    /// orbit of precomposition with permutations.
    fn apply_symmetric(&self, uf: &mut UnionFind, new_nodes: &[Node]) -> bool {
        let sym = self.rules.sym_ctors();
        if sym.is_empty() {
            return false;
        }
        let mut groups: HashMap<(CtorId, Vec<ClassId>), Vec<Member>> = HashMap::new();
        let add = |node: &Node, member: Member, groups: &mut HashMap<_, Vec<Member>>| {
            if sym.contains(&node.ctor) {
                let mut key = node.children.clone();
                key.sort();
                groups.entry((node.ctor, key)).or_default().push(member);
            }
        };
        for (node, &class) in &self.node_class {
            add(node, Member::Old(class), &mut groups);
        }
        for (i, node) in new_nodes.iter().enumerate() {
            add(node, Member::New(i), &mut groups);
        }
        self.merge_groups(uf, groups.into_values())
    }

    /// Equal child image sets across all constructors: the closed form of
    /// the all-image-preserving family. One substitution step witnesses
    /// each such identification, so grouping is exact.
    fn apply_all_image_preserving(&self, uf: &mut UnionFind, new_nodes: &[Node]) -> bool {
        if !self.rules.has_all_ip() {
            return false;
        }
        let mut groups: HashMap<Vec<ClassId>, Vec<Member>> = HashMap::new();
        for (node, &class) in &self.node_class {
            groups
                .entry(node.image())
                .or_default()
                .push(Member::Old(class));
        }
        for (i, node) in new_nodes.iter().enumerate() {
            groups.entry(node.image()).or_default().push(Member::New(i));
        }
        self.merge_groups(uf, groups.into_values())
    }

    fn merge_groups(
        &self,
        uf: &mut UnionFind,
        groups: impl IntoIterator<Item = Vec<Member>>,
    ) -> bool {
        let mut merged = false;
        for members in groups {
            let anchor = members[0];
            for &m in &members[1..] {
                merged |= self.identify(uf, anchor, m);
            }
        }
        merged
    }

    /// Applies one identification. Both sides of any rule share an image
    /// set, hence a rank, so a pair is either two applications already
    /// classed at an earlier stage (replay: they must agree) or two
    /// applications new this stage (union).
    fn identify(&self, uf: &mut UnionFind, m1: Member, m2: Member) -> bool {
        match (m1, m2) {
            (Member::Old(a), Member::Old(b)) => {
                assert_eq!(a, b, "stage monotonicity violated: replay split a class");
                false
            }
            (Member::New(i), Member::New(j)) => uf.union(i, j),
            _ => unreachable!("identification crossed rank bands"),
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            self.parent[x] = self.find(self.parent[x]);
        }
        self.parent[x]
    }

    /// Returns true when two distinct classes were joined.
    fn union(&mut self, x: usize, y: usize) -> bool {
        let (mut x, mut y) = (self.find(x), self.find(y));
        if x == y {
            return false;
        }
        if self.size[x] < self.size[y] {
            std::mem::swap(&mut x, &mut y);
        }
        self.size[x] += self.size[y];
        self.parent[y] = x;
        true
    }
}
