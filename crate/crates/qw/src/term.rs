//! Raw constructor trees with hash-consing.
//!
//! Terms live in a [`TermStore`] that interns every node, so structurally
//! equal subtrees share one id and equality is id comparison. Ranks are
//! computed once at intern time.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::signature::{CtorId, Polynomial};

/// Handle to an interned term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(pub u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

struct TermNode {
    ctor: CtorId,
    children: Vec<TermId>,
    rank: u32,
}

/// Interning table for terms over one signature.
pub struct TermStore {
    poly: Polynomial,
    nodes: Vec<TermNode>,
    memo: HashMap<(CtorId, Vec<TermId>), TermId>,
}

impl TermStore {
    pub fn new(poly: Polynomial) -> Self {
        TermStore {
            poly,
            nodes: Vec::new(),
            memo: HashMap::new(),
        }
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    /// Number of distinct interned terms.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interns a constructor application, checking the arity.
    pub fn intern(&mut self, ctor: CtorId, children: Vec<TermId>) -> Result<TermId> {
        let arity = self.poly.arity(ctor);
        if children.len() != arity {
            return Err(Error::ArityMismatch {
                ctor: self.poly.name(ctor).to_string(),
                expected: arity,
                got: children.len(),
            });
        }
        if let Some(&id) = self.memo.get(&(ctor, children.clone())) {
            return Ok(id);
        }
        let rank = if children.is_empty() {
            0
        } else {
            1 + children.iter().map(|&c| self.rank(c)).max().unwrap()
        };
        let id = TermId(self.nodes.len() as u32);
        self.nodes.push(TermNode {
            ctor,
            children: children.clone(),
            rank,
        });
        self.memo.insert((ctor, children), id);
        Ok(id)
    }

    pub fn ctor(&self, t: TermId) -> CtorId {
        self.nodes[t.index()].ctor
    }

    pub fn children(&self, t: TermId) -> &[TermId] {
        &self.nodes[t.index()].children
    }

    /// Rank of a raw term: 0 for childless nodes, else one more than the
    /// maximum child rank. Identified terms always agree on this value, so it
    /// also equals the rank of the term's class in any stage family.
    pub fn rank(&self, t: TermId) -> u32 {
        self.nodes[t.index()].rank
    }

    /// Parses an s-expression like `(node (leaf) (leaf))`. A bare name is
    /// shorthand for a nullary application.
    pub fn parse(&mut self, text: &str) -> Result<TermId> {
        let tokens = tokenize(text)?;
        let mut pos = 0;
        let term = self.parse_at(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected trailing input after term: `{}`",
                tokens[pos]
            )));
        }
        Ok(term)
    }

    fn parse_at(&mut self, tokens: &[String], pos: &mut usize) -> Result<TermId> {
        match tokens.get(*pos) {
            None => Err(Error::Parse("unexpected end of input".into())),
            Some(t) if t == "(" => {
                *pos += 1;
                let name = match tokens.get(*pos) {
                    Some(t) if t != "(" && t != ")" => t.clone(),
                    _ => return Err(Error::Parse("expected constructor name after `(`".into())),
                };
                *pos += 1;
                let ctor = self
                    .poly
                    .lookup(&name)
                    .ok_or(Error::UnknownConstructor(name))?;
                let mut children = Vec::new();
                loop {
                    match tokens.get(*pos) {
                        Some(t) if t == ")" => {
                            *pos += 1;
                            break;
                        }
                        Some(_) => children.push(self.parse_at(tokens, pos)?),
                        None => return Err(Error::Parse("missing `)`".into())),
                    }
                }
                self.intern(ctor, children)
            }
            Some(t) if t == ")" => Err(Error::Parse("unexpected `)`".into())),
            Some(name) => {
                let ctor = self
                    .poly
                    .lookup(name)
                    .ok_or_else(|| Error::UnknownConstructor(name.clone()))?;
                *pos += 1;
                self.intern(ctor, vec![])
            }
        }
    }

    pub fn render(&self, t: TermId) -> String {
        let mut out = String::new();
        self.render_into(t, &mut out);
        out
    }

    fn render_into(&self, t: TermId, out: &mut String) {
        out.push('(');
        out.push_str(self.poly.name(self.ctor(t)));
        for &c in self.children(t) {
            out.push(' ');
            self.render_into(c, out);
        }
        out.push(')');
    }

    /// All terms of rank at most `max_rank`, each exactly once, ordered by
    /// rank, then constructor index, then lexicographically on the positions
    /// of the children within this same enumeration.
    pub fn enumerate(&mut self, max_rank: u32, cap: u64) -> Result<Vec<TermId>> {
        let mut out: Vec<TermId> = Vec::new();
        let guard = |len: usize| -> Result<()> {
            if len as u64 > cap {
                Err(Error::CapExceeded {
                    what: "term enumeration",
                    needed: len as u64,
                    cap,
                })
            } else {
                Ok(())
            }
        };
        for a in self.poly.ctor_ids() {
            if self.poly.arity(a) == 0 {
                out.push(self.intern(a, vec![])?);
                guard(out.len())?;
            }
        }
        let mut prev_len = 0usize; // terms of rank < r − 1 occupy out[..prev_len]
        for _r in 1..=max_rank {
            let cur_len = out.len();
            let snapshot = out.clone();
            for a in self.poly.ctor_ids() {
                let arity = self.poly.arity(a);
                if arity == 0 {
                    continue;
                }
                for tuple in crate::signature::tuples(cur_len, arity) {
                    // At least one child must sit in the newest rank band,
                    // otherwise the term was already produced.
                    if tuple.iter().all(|&i| i < prev_len) {
                        continue;
                    }
                    let children: Vec<TermId> = tuple.iter().map(|&i| snapshot[i]).collect();
                    out.push(self.intern(a, children)?);
                    guard(out.len())?;
                }
            }
            prev_len = cur_len;
        }
        Ok(out)
    }

    /// The tower family: `t_0` is the first nullary constructor and
    /// `t_{β+1}` applies `node_ctor` to arity-many copies of `t_β`, so
    /// `rank(t_β) = β`. Thanks to interning the tower of height β costs
    /// O(β) nodes.
    pub fn tower(&mut self, node_ctor: CtorId, beta: u32) -> Result<TermId> {
        let base = self.poly.nullary().ok_or(Error::NoNullaryConstructor)?;
        let arity = self.poly.arity(node_ctor);
        if arity == 0 {
            return Err(Error::ArityMismatch {
                ctor: self.poly.name(node_ctor).to_string(),
                expected: 1,
                got: 0,
            });
        }
        let mut t = self.intern(base, vec![])?;
        for _ in 0..beta {
            t = self.intern(node_ctor, vec![t; arity])?;
        }
        Ok(t)
    }
}

fn tokenize(text: &str) -> Result<Vec<String>> {
    let mut tokens = Vec::new();
    let mut atom = String::new();
    for c in text.chars() {
        match c {
            '(' | ')' => {
                if !atom.is_empty() {
                    tokens.push(std::mem::take(&mut atom));
                }
                tokens.push(c.to_string());
            }
            c if c.is_whitespace() => {
                if !atom.is_empty() {
                    tokens.push(std::mem::take(&mut atom));
                }
            }
            c => atom.push(c),
        }
    }
    if !atom.is_empty() {
        tokens.push(atom);
    }
    if tokens.is_empty() {
        return Err(Error::Parse("empty input".into()));
    }
    Ok(tokens)
}
