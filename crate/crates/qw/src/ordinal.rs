//! Finite ordinal machinery: order types, the aleph function of a
//! signature, the Cantor pairing bijection with its tuple coding, and the
//! canonical rank surjections `F_{x,n} : κⁿ ↠ R_n(x) ∪ {0}`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::signature::Polynomial;
use crate::stages::{ClassId, StageFamily};

/// A finite set of naturals standing in for a finite set of ordinals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteOrdinalSet {
    values: Vec<u64>, // sorted, duplicate-free
}

impl FiniteOrdinalSet {
    pub fn new(values: impl IntoIterator<Item = u64>) -> Self {
        let set: BTreeSet<u64> = values.into_iter().collect();
        FiniteOrdinalSet {
            values: set.into_iter().collect(),
        }
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// The order type β = |X| together with the unique order isomorphism
    /// θ : {0, …, β−1} → X, i.e. the sorted values indexed by position.
    pub fn order_type(&self) -> (u64, &[u64]) {
        (self.values.len() as u64, &self.values)
    }
}

/// κ for a signature: the least natural not a surjective image of any
/// arity, which is one more than the largest arity.
pub fn aleph(poly: &Polynomial) -> u64 {
    poly.max_arity() as u64 + 1
}

/// The Cantor pairing bijection ω × ω → ω. Intermediate arithmetic is
/// exact; a code that would not fit in a `u64` panics rather than wraps.
pub fn cantor_pair(m: u64, n: u64) -> u64 {
    let s = m as u128 + n as u128;
    let p = s * (s + 1) / 2 + n as u128;
    u64::try_from(p).expect("pair code exceeds u64")
}

/// Inverse of [`cantor_pair`], total on `u64`.
pub fn cantor_unpair(p: u64) -> (u64, u64) {
    let w = ((8 * p as u128 + 1).isqrt() - 1) / 2;
    let t = w * (w + 1) / 2;
    let n = p as u128 - t;
    ((w - n) as u64, n as u64)
}

/// Codes a nonempty tuple as `pair(len − 1, fold of cantor_pair)`, a
/// bijection between nonempty tuples of naturals and ω.
pub fn omega_tuple_code(xs: &[u64]) -> u64 {
    assert!(!xs.is_empty(), "tuple coding starts at length 1");
    let folded = xs.iter().copied().reduce(cantor_pair).unwrap();
    cantor_pair(xs.len() as u64 - 1, folded)
}

/// Inverse of [`omega_tuple_code`].
pub fn omega_tuple_decode(p: u64) -> Vec<u64> {
    let (len_minus_one, mut folded) = cantor_unpair(p);
    let len = len_minus_one as usize + 1;
    let mut out = vec![0u64; len];
    for i in (1..len).rev() {
        let (rest, last) = cantor_unpair(folded);
        out[i] = last;
        folded = rest;
    }
    out[0] = folded;
    out
}

/// The table of one canonical surjection `F_{x,n} : κⁿ ↠ R_n(x) ∪ {0}`,
/// stored row-major with the first coordinate most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FTable {
    pub kappa: u64,
    pub depth: usize,
    values: Vec<u64>,
}

impl FTable {
    pub fn get(&self, tuple: &[u64]) -> u64 {
        assert_eq!(tuple.len(), self.depth);
        let mut idx = 0usize;
        for &b in tuple {
            assert!(b < self.kappa);
            idx = idx * self.kappa as usize + b as usize;
        }
        self.values[idx]
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn image(&self) -> BTreeSet<u64> {
        self.values.iter().copied().collect()
    }

    /// One row per tuple: `b1,…,bn,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 1..=self.depth {
            let _ = write!(out, "b{i},");
        }
        out.push_str("value\n");
        let mut tuple = vec![0u64; self.depth];
        for (i, v) in self.values.iter().enumerate() {
            let mut rest = i;
            for j in (0..self.depth).rev() {
                tuple[j] = (rest % self.kappa as usize) as u64;
                rest /= self.kappa as usize;
            }
            for b in &tuple {
                let _ = write!(out, "{b},");
            }
            let _ = writeln!(out, "{v}");
        }
        out
    }
}

/// Builds `F_{x,n}` for a class of a stage family, with κ the aleph of the
/// family's signature.
///
/// At depth 1 the table is the order-type surjection onto `R_1(x)` padded
/// with 0. At depth m+1, for each prefix the child tables at depth m yield
/// a finite set of ordinals, and the last coordinate passes through that
/// set's order-type surjection. Everything depends only on image sets, so
/// the result is representative-independent.
pub fn f_surjection(sf: &StageFamily, x: ClassId, n: usize) -> Result<FTable> {
    assert!(n >= 1, "surjections start at depth 1");
    let kappa = aleph(sf.poly());
    let size = match kappa.checked_pow(n as u32).filter(|&s| s <= 10_000_000) {
        Some(s) => s as usize,
        None => {
            return Err(Error::CapExceeded {
                what: "surjection table size",
                needed: u64::MAX,
                cap: 10_000_000,
            })
        }
    };
    let mut memo: HashMap<(ClassId, usize), FTable> = HashMap::new();
    let table = f_table(sf, x, n, kappa, &mut memo);
    debug_assert_eq!(table.values.len(), size);
    Ok(table)
}

fn f_table(
    sf: &StageFamily,
    x: ClassId,
    n: usize,
    kappa: u64,
    memo: &mut HashMap<(ClassId, usize), FTable>,
) -> FTable {
    if let Some(t) = memo.get(&(x, n)) {
        return t.clone();
    }
    let table = if n == 1 {
        let ranks = FiniteOrdinalSet::new(sf.image(x).iter().map(|&y| sf.rank(y) as u64));
        let (beta, theta) = ranks.order_type();
        assert!(beta < kappa, "order type bounded by the aleph");
        let values = (0..kappa)
            .map(|alpha| {
                if alpha < beta {
                    theta[alpha as usize]
                } else {
                    0
                }
            })
            .collect();
        FTable {
            kappa,
            depth: 1,
            values,
        }
    } else {
        let children: Vec<FTable> = sf
            .image(x)
            .iter()
            .map(|&y| f_table(sf, y, n - 1, kappa, memo))
            .collect();
        let prefix_count = (kappa as usize).pow(n as u32 - 1);
        let mut values = Vec::with_capacity(prefix_count * kappa as usize);
        let mut prefix = vec![0u64; n - 1];
        for i in 0..prefix_count {
            let mut rest = i;
            for j in (0..n - 1).rev() {
                prefix[j] = (rest % kappa as usize) as u64;
                rest /= kappa as usize;
            }
            let reachable = FiniteOrdinalSet::new(children.iter().map(|child| child.get(&prefix)));
            let (beta, theta) = reachable.order_type();
            assert!(beta < kappa, "order type bounded by the aleph");
            for alpha in 0..kappa {
                values.push(if alpha < beta {
                    theta[alpha as usize]
                } else {
                    0
                });
            }
        }
        FTable {
            kappa,
            depth: n,
            values,
        }
    };
    memo.insert((x, n), table.clone());
    table
}
