//! Digraphs as binary relations over their vertex domain.

use std::fmt;

use crate::domain::{FiniteDomain, Value};
use crate::error::{Error, Result};
use crate::relation::Relation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    arcs: Relation,
}

impl Digraph {
    pub fn new(arcs: Relation) -> Result<Self> {
        if arcs.arity() != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                found: arcs.arity(),
            });
        }
        Ok(Digraph { arcs })
    }

    pub fn from_arcs(vertices: u32, arcs: &[(Value, Value)]) -> Result<Self> {
        let domain = FiniteDomain::new(vertices)?;
        Digraph::new(Relation::new(domain, 2, arcs.iter().map(|&(u, v)| [u, v]))?)
    }

    /// Adds both directions of every edge.
    pub fn symmetric(vertices: u32, edges: &[(Value, Value)]) -> Result<Self> {
        let both: Vec<_> = edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect();
        Digraph::from_arcs(vertices, &both)
    }

    pub fn arcs(&self) -> &Relation {
        &self.arcs
    }

    pub fn into_arcs(self) -> Relation {
        self.arcs
    }

    pub fn vertex_count(&self) -> usize {
        self.arcs.domain().size() as usize
    }

    pub fn vertices(&self) -> std::ops::Range<Value> {
        self.arcs.domain().elements()
    }

    pub fn has_arc(&self, u: Value, v: Value) -> bool {
        self.arcs.contains(&[u, v])
    }

    /// Out-neighbours in increasing order.
    pub fn out_neighbors(&self, u: Value) -> Vec<Value> {
        self.vertices().filter(|&v| self.has_arc(u, v)).collect()
    }

    pub fn out_set(&self, u: Value) -> BitSet {
        let mut s = BitSet::new(self.vertex_count());
        for v in self.vertices() {
            if self.has_arc(u, v) {
                s.insert(v as usize);
            }
        }
        s
    }

    /// Adds a loop at every vertex.
    pub fn reflexive_closure(&self) -> Digraph {
        let n = self.vertex_count() as u32;
        let d = self.arcs.domain().size();
        let mut codes = self.arcs.codes().to_vec();
        codes.extend((0..n).map(|v| v * d + v));
        Digraph {
            arcs: Relation::from_codes(self.arcs.domain().clone(), 2, codes),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs.tuples().all(|t| self.has_arc(t[1], t[0]))
    }
}

impl fmt::Display for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.arcs)
    }
}

/// Fixed-width bit set over `0..len`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn singleton(len: usize, i: usize) -> Self {
        let mut s = BitSet::new(len);
        s.insert(i);
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_disjoint(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.contains(i))
    }
}

impl fmt::Display for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflexive_closure_of_tournament() {
        let t3 = Digraph::from_arcs(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let r = t3.reflexive_closure();
        let mut expected = Vec::new();
        for i in 0..3 {
            for j in i..3 {
                expected.push((i, j));
            }
        }
        assert_eq!(r, Digraph::from_arcs(3, &expected).unwrap());
        assert_eq!(r.reflexive_closure(), r);
    }

    #[test]
    fn closure_of_empty_digraph_is_diagonal() {
        let g = Digraph::new(Relation::empty(FiniteDomain::boolean(), 2).unwrap()).unwrap();
        assert_eq!(
            g.reflexive_closure().into_arcs(),
            Relation::diagonal(FiniteDomain::boolean())
        );
    }

    #[test]
    fn rejects_non_binary() {
        assert!(Digraph::new(Relation::full(FiniteDomain::boolean(), 3).unwrap()).is_err());
    }

    #[test]
    fn bitsets() {
        let mut a = BitSet::new(130);
        a.insert(3);
        a.insert(129);
        let b = BitSet::singleton(130, 64);
        assert!(a.is_disjoint(&b));
        a.union_with(&b);
        assert_eq!(a.count(), 3);
        assert_eq!(a.to_string(), "{3,64,129}");
    }
}
