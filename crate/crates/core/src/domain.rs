//! Finite domains and total orders over them.
//!
//! Elements are always encoded canonically as `0..size`; display labels are
//! cosmetic. Orders are permutations of that encoding, least element first.

use std::fmt;

use crate::error::{Error, Result};

/// A domain element in canonical encoding.
pub type Value = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteDomain {
    size: u32,
    labels: Option<Vec<String>>,
}

impl FiniteDomain {
    pub fn new(size: u32) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidDomain(format!(
                "a domain needs at least two elements, got {size}"
            )));
        }
        Ok(FiniteDomain { size, labels: None })
    }

    pub fn boolean() -> Self {
        FiniteDomain {
            size: 2,
            labels: None,
        }
    }

    pub fn with_labels(size: u32, labels: Vec<String>) -> Result<Self> {
        let mut domain = Self::new(size)?;
        if labels.len() != size as usize {
            return Err(Error::InvalidDomain(format!(
                "{} labels given for a domain of size {size}",
                labels.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidDomain(format!("duplicate label {label:?}")));
            }
        }
        domain.labels = Some(labels);
        Ok(domain)
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn is_boolean(&self) -> bool {
        self.size == 2
    }

    pub fn elements(&self) -> std::ops::Range<Value> {
        0..self.size
    }

    pub fn check_value(&self, value: Value) -> Result<()> {
        if value < self.size {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                value,
                size: self.size,
            })
        }
    }

    /// Errors unless both domains have the same size. Labels are ignored.
    pub fn check_compatible(&self, other: &FiniteDomain) -> Result<()> {
        if self.size == other.size {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                left: self.size,
                right: other.size,
            })
        }
    }

    /// `size^exponent`, saturating instead of overflowing.
    pub fn power(&self, exponent: usize) -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..exponent {
            acc = acc.saturating_mul(self.size as u128);
        }
        acc
    }
}

/// A total order on a finite domain, stored as the permutation listing
/// elements from least to greatest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TotalOrder {
    permutation: Vec<Value>,
    rank: Vec<usize>,
}

impl TotalOrder {
    pub fn natural(domain: &FiniteDomain) -> Self {
        Self::from_permutation(domain.elements().collect()).expect("identity is a permutation")
    }

    pub fn from_permutation(permutation: Vec<Value>) -> Result<Self> {
        let n = permutation.len();
        if n < 2 {
            return Err(Error::InvalidOrder(format!(
                "an order must list at least two elements, got {n}"
            )));
        }
        let mut rank = vec![usize::MAX; n];
        for (position, &element) in permutation.iter().enumerate() {
            let slot = rank.get_mut(element as usize).ok_or_else(|| {
                Error::InvalidOrder(format!("element {element} is outside 0..{n}"))
            })?;
            if *slot != usize::MAX {
                return Err(Error::InvalidOrder(format!("element {element} listed twice")));
            }
            *slot = position;
        }
        Ok(TotalOrder { permutation, rank })
    }

    /// Parses a comma- or whitespace-separated permutation, e.g. `"2,0,1"`.
    pub fn parse(text: &str) -> Result<Self> {
        let permutation = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<Value>()
                    .map_err(|_| Error::InvalidOrder(format!("not an element: {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_permutation(permutation)
    }

    pub fn for_domain(self, domain: &FiniteDomain) -> Result<Self> {
        if self.permutation.len() != domain.size() as usize {
            return Err(Error::InvalidOrder(format!(
                "order lists {} elements but the domain has {}",
                self.permutation.len(),
                domain.size()
            )));
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    pub fn permutation(&self) -> &[Value] {
        &self.permutation
    }

    pub fn rank(&self, value: Value) -> usize {
        self.rank[value as usize]
    }

    pub fn le(&self, a: Value, b: Value) -> bool {
        self.rank(a) <= self.rank(b)
    }

    pub fn lt(&self, a: Value, b: Value) -> bool {
        self.rank(a) < self.rank(b)
    }

    pub fn min(&self, a: Value, b: Value) -> Value {
        if self.le(a, b) {
            a
        } else {
            b
        }
    }

    pub fn least(&self) -> Value {
        self.permutation[0]
    }

    /// Elements strictly below `value`, least first.
    pub fn below(&self, value: Value) -> &[Value] {
        &self.permutation[..self.rank(value)]
    }

    /// Steps to the lexicographically next permutation; `None` after the last one.
    pub fn next_permutation(&self) -> Option<TotalOrder> {
        let mut p = self.permutation.clone();
        let i = p.windows(2).rposition(|w| w[0] < w[1])?;
        let j = p.iter().rposition(|&x| x > p[i]).expect("pivot has a successor");
        p.swap(i, j);
        p[i + 1..].reverse();
        Some(TotalOrder::from_permutation(p).expect("still a permutation"))
    }
}

impl fmt::Display for TotalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.permutation.iter().enumerate() {
            if i > 0 {
                f.write_str("<")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
