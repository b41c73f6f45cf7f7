//! Explicit finite relations and the solution-graph structure on them.
//!
//! A relation stores its tuples as mixed-radix codes (first coordinate most
//! significant), so sorting codes is the same as sorting tuples
//! lexicographically. The enumeration cap `|D|^r <= 2^24` keeps every code in
//! a `u32`.

use std::collections::VecDeque;
use std::fmt;

use crate::domain::{FiniteDomain, Value};
use crate::error::{Error, Result};

/// Largest `|D|^r` a relation may range over.
pub const RELATION_CAP: u128 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple(Vec<Value>);

impl Tuple {
    pub fn new(values: Vec<Value>) -> Self {
        Tuple(values)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn into_values(self) -> Vec<Value> {
        self.0
    }
}

impl From<Vec<Value>> for Tuple {
    fn from(values: Vec<Value>) -> Self {
        Tuple(values)
    }
}

impl<const N: usize> From<[Value; N]> for Tuple {
    fn from(values: [Value; N]) -> Self {
        Tuple(values.to_vec())
    }
}

impl std::ops::Deref for Tuple {
    type Target = [Value];

    fn deref(&self) -> &[Value] {
        &self.0
    }
}

impl AsRef<[Value]> for Tuple {
    fn as_ref(&self) -> &[Value] {
        &self.0
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Number of coordinates in which `a` and `b` differ.
pub fn hamming_distance(a: &[Value], b: &[Value]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::IncompatibleTuples {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    domain: FiniteDomain,
    arity: usize,
    codes: Vec<u32>,
}

impl Relation {
    /// Builds a relation from arbitrary tuples; duplicates are merged.
    pub fn new<I, T>(domain: FiniteDomain, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[Value]>,
    {
        let mut relation = Relation::empty(domain, arity)?;
        for t in tuples {
            let t = t.as_ref();
            relation.check_tuple(t)?;
            relation.codes.push(relation.encode(t));
        }
        relation.codes.sort_unstable();
        relation.codes.dedup();
        Ok(relation)
    }

    /// The empty relation of the given arity.
    pub fn empty(domain: FiniteDomain, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Invalid("relations must have positive arity".into()));
        }
        let size = domain.power(arity);
        if size > RELATION_CAP {
            return Err(Error::CapExceeded {
                what: "|D|^r for a relation",
                size,
                cap: RELATION_CAP,
            });
        }
        Ok(Relation {
            domain,
            arity,
            codes: Vec::new(),
        })
    }

    /// All of `D^r`.
    pub fn full(domain: FiniteDomain, arity: usize) -> Result<Self> {
        let mut relation = Relation::empty(domain, arity)?;
        let size = relation.domain.power(arity) as u32;
        relation.codes = (0..size).collect();
        Ok(relation)
    }

    /// The equality relation `{(d,d)}`.
    pub fn diagonal(domain: FiniteDomain) -> Self {
        let tuples: Vec<[Value; 2]> = domain.elements().map(|d| [d, d]).collect();
        Relation::new(domain, 2, tuples).expect("diagonal is within the cap")
    }

    /// The inequality relation `{(c,d) : c != d}`.
    pub fn inequality(domain: FiniteDomain) -> Self {
        let n = domain.size();
        let tuples: Vec<[Value; 2]> = (0..n)
            .flat_map(|c| (0..n).filter(move |&d| d != c).map(move |d| [c, d]))
            .collect();
        Relation::new(domain, 2, tuples).expect("inequality is within the cap")
    }

    /// The unary singleton `{(d)}`.
    pub fn constant(domain: FiniteDomain, value: Value) -> Result<Self> {
        domain.check_value(value)?;
        Relation::new(domain, 1, [[value]])
    }

    /// Builds directly from sorted, deduplicated codes. Callers inside the crate
    /// guarantee the invariant.
    pub(crate) fn from_sorted_codes(domain: FiniteDomain, arity: usize, codes: Vec<u32>) -> Self {
        debug_assert!(codes.windows(2).all(|w| w[0] < w[1]));
        Relation {
            domain,
            arity,
            codes,
        }
    }

    pub(crate) fn from_codes(domain: FiniteDomain, arity: usize, mut codes: Vec<u32>) -> Self {
        codes.sort_unstable();
        codes.dedup();
        Self::from_sorted_codes(domain, arity, codes)
    }

    pub fn domain(&self) -> &FiniteDomain {
        &self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub(crate) fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn contains(&self, tuple: &[Value]) -> bool {
        tuple.len() == self.arity
            && tuple.iter().all(|&v| v < self.domain.size())
            && self.contains_code(self.encode(tuple))
    }

    pub(crate) fn contains_code(&self, code: u32) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    pub(crate) fn encode(&self, tuple: &[Value]) -> u32 {
        let d = self.domain.size();
        tuple.iter().fold(0u32, |acc, &v| acc * d + v)
    }

    pub(crate) fn decode_into(&self, mut code: u32, out: &mut [Value]) {
        let d = self.domain.size();
        for slot in out.iter_mut().rev() {
            *slot = code % d;
            code /= d;
        }
    }

    pub(crate) fn decode(&self, code: u32) -> Tuple {
        let mut values = vec![0; self.arity];
        self.decode_into(code, &mut values);
        Tuple(values)
    }

    /// Tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Tuple> + '_ {
        self.codes.iter().map(|&c| self.decode(c))
    }

    pub fn to_vec(&self) -> Vec<Tuple> {
        self.tuples().collect()
    }

    /// Row-major flattening of the tuples, for hot loops.
    pub(crate) fn flat_rows(&self) -> Vec<Value> {
        let mut rows = vec![0; self.codes.len() * self.arity];
        for (i, &c) in self.codes.iter().enumerate() {
            self.decode_into(c, &mut rows[i * self.arity..(i + 1) * self.arity]);
        }
        rows
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.arity == other.arity
            && self.domain.size() == other.domain.size()
            && self.codes.iter().all(|&c| other.contains_code(c))
    }

    /// The sub-relation keeping the tuples selected by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&[Value]) -> bool) -> Relation {
        let mut buf = vec![0; self.arity];
        let codes = self
            .codes
            .iter()
            .copied()
            .filter(|&c| {
                self.decode_into(c, &mut buf);
                keep(&buf)
            })
            .collect();
        Relation::from_sorted_codes(self.domain.clone(), self.arity, codes)
    }

    pub(crate) fn with_codes(&self, codes: Vec<u32>) -> Relation {
        Relation::from_codes(self.domain.clone(), self.arity, codes)
    }

    fn check_tuple(&self, t: &[Value]) -> Result<()> {
        if t.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: t.len(),
            });
        }
        t.iter().try_for_each(|&v| self.domain.check_value(v))
    }

    /// Codes of the tuples at Hamming distance one from `code` that lie in `self`.
    pub(crate) fn neighbor_codes(&self, code: u32, out: &mut Vec<u32>) {
        out.clear();
        let d = self.domain.size();
        let mut weight = 1u32;
        let mut rest = code;
        for _ in 0..self.arity {
            let digit = rest % d;
            rest /= d;
            let base = code - digit * weight;
            for v in 0..d {
                if v != digit {
                    let candidate = base + v * weight;
                    if self.contains_code(candidate) {
                        out.push(candidate);
                    }
                }
            }
            weight = weight.wrapping_mul(d);
        }
    }
}

/// Connected components of the solution graph `G(R)`: vertices are the tuples,
/// edges join tuples at Hamming distance one. Components are ordered by their
/// lexicographically least member.
pub fn connected_components(relation: &Relation) -> Vec<Relation> {
    let codes = relation.codes();
    let mut seen = vec![false; codes.len()];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    let mut neighbors = Vec::new();
    for start in 0..codes.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(codes[start]);
        let mut members = Vec::new();
        while let Some(code) = queue.pop_front() {
            members.push(code);
            relation.neighbor_codes(code, &mut neighbors);
            for &n in &neighbors {
                let idx = codes.binary_search(&n).expect("neighbor is a member");
                if !seen[idx] {
                    seen[idx] = true;
                    queue.push_back(n);
                }
            }
        }
        components.push(relation.with_codes(members));
    }
    components
}

/// Cartesian product; the result has arity `r1 + r2`.
pub fn product(left: &Relation, right: &Relation) -> Result<Relation> {
    left.domain().check_compatible(right.domain())?;
    let arity = left.arity() + right.arity();
    let mut out = Relation::empty(left.domain().clone(), arity)?;
    let shift = left.domain().power(right.arity()) as u32;
    out.codes = left
        .codes()
        .iter()
        .flat_map(|&a| right.codes().iter().map(move |&b| a * shift + b))
        .collect();
    Ok(out)
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.tuples().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("}")
    }
}
