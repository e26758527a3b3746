//! Modular symbols for Q-rank one spaces: reduction to Voronoi-reduced
//! symbols, the relation space built from the Voronoi complex, and Hecke
//! operators.

mod hecke;
mod manin;
mod reduce;
mod space;

use std::collections::BTreeMap;
use std::fmt;

pub use hecke::{
    charpoly, gamma0_hecke_operator, hecke_matrix, principal_hecke_operator, rational_roots,
    HeckeOperator,
};
pub use manin::{cf_expand, cusp_of_rational, manin_reduce};
pub use reduce::{
    edge_rewrite, is_voronoi_reduced, partition_depth, reduce_symbol, reduce_symbol_with,
    sufficiently_fine_partition, PartitionPoint, TieBreak,
};
pub use space::{build_relation_space, Level, ReducedSymbolSpace};

use crate::cone::CuspPoint;

/// The ordered pair `[u, v]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModularSymbol {
    pub u: CuspPoint,
    pub v: CuspPoint,
}

impl ModularSymbol {
    pub fn new(u: CuspPoint, v: CuspPoint) -> Self {
        Self { u, v }
    }

    pub fn is_zero(&self) -> bool {
        self.u == self.v
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.v.clone(), self.u.clone())
    }
}

impl fmt::Debug for ModularSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.u, self.v)
    }
}

/// A finite Z-combination of symbols, stored with `u < v` so that
/// `[u, v] = -[v, u]` holds by construction.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct SymbolChain {
    terms: BTreeMap<ModularSymbol, i64>,
}

impl fmt::Debug for SymbolChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl SymbolChain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, s: &ModularSymbol, c: i64) {
        if s.is_zero() || c == 0 {
            return;
        }
        let (key, c) = if s.u < s.v {
            (s.clone(), c)
        } else {
            (s.reversed(), -c)
        };
        let e = self.terms.entry(key.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn add(&mut self, other: &SymbolChain) {
        for (s, c) in &other.terms {
            self.add_term(s, *c);
        }
    }

    pub fn from_path(path: &[ModularSymbol]) -> Self {
        let mut c = Self::new();
        for s in path {
            c.add_term(s, 1);
        }
        c
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ModularSymbol, i64)> {
        self.terms.iter().map(|(s, c)| (s, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The formal 0-chain `sum c (v - u)`.
    pub fn boundary(&self) -> BTreeMap<CuspPoint, i64> {
        let mut b = BTreeMap::new();
        for (s, c) in &self.terms {
            *b.entry(s.v.clone()).or_insert(0) += c;
            *b.entry(s.u.clone()).or_insert(0) -= c;
        }
        b.retain(|_, c| *c != 0);
        b
    }
}

/// Whether a path of symbols telescopes from `u` to `v`.
pub fn telescopes(path: &[ModularSymbol], u: &CuspPoint, v: &CuspPoint) -> bool {
    if path.is_empty() {
        return u == v;
    }
    path.first().is_some_and(|s| &s.u == u)
        && path.last().is_some_and(|s| &s.v == v)
        && path.windows(2).all(|w| w[0].v == w[1].u)
}

#[cfg(test)]
mod tests;
