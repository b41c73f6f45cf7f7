//! Partial operations as explicit tables, the canonical families, and
//! partial-polymorphism (invariance) checking.

use std::fmt;

use crate::domain::{FiniteDomain, TotalOrder, Value};
use crate::error::{Error, Result};
use crate::formula::ConstraintLanguage;
use crate::relation::{Relation, Tuple};

/// Largest `|D|^k` an operation table may have.
pub const OPERATION_CAP: u128 = 1 << 20;
/// Largest number of row sequences `|R|^k` an invariance check may visit.
pub const INVARIANCE_BUDGET: u128 = 1 << 26;

const UNDEFINED: u32 = u32::MAX;

/// A `k`-ary partial operation `D^k -> D`, stored densely; keys are encoded
/// mixed-radix with the first argument most significant.
#[derive(Clone, Debug)]
pub struct PartialOperation {
    domain: FiniteDomain,
    arity: usize,
    table: Vec<u32>,
    defined: usize,
    /// `prefixes[i][p]` holds iff some defined key starts with the length-`i` prefix `p`.
    prefixes: Vec<Vec<bool>>,
}

impl PartialEq for PartialOperation {
    fn eq(&self, other: &Self) -> bool {
        self.domain.size() == other.domain.size()
            && self.arity == other.arity
            && self.table == other.table
    }
}

impl Eq for PartialOperation {}

impl PartialOperation {
    /// Builds an operation from `(arguments, value)` entries. Conflicting
    /// duplicate keys are an error.
    pub fn from_entries<I, K>(domain: FiniteDomain, arity: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, Value)>,
        K: AsRef<[Value]>,
    {
        if arity == 0 {
            return Err(Error::Invalid("operations must have positive arity".into()));
        }
        let size = domain.power(arity);
        if size > OPERATION_CAP {
            return Err(Error::CapExceeded {
                what: "|D|^k for an operation table",
                size,
                cap: OPERATION_CAP,
            });
        }
        let mut table = vec![UNDEFINED; size as usize];
        for (key, value) in entries {
            let key = key.as_ref();
            if key.len() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: key.len(),
                });
            }
            for &v in key {
                domain.check_value(v)?;
            }
            domain.check_value(value)?;
            let slot = &mut table[encode(domain.size(), key)];
            if *slot != UNDEFINED && *slot != value {
                return Err(Error::Invalid(format!(
                    "conflicting values for {}",
                    Tuple::new(key.to_vec())
                )));
            }
            *slot = value;
        }
        Ok(Self::from_table(domain, arity, table))
    }

    fn from_table(domain: FiniteDomain, arity: usize, table: Vec<u32>) -> Self {
        let d = domain.size() as usize;
        let defined = table.iter().filter(|&&v| v != UNDEFINED).count();
        let mut prefixes = Vec::with_capacity(arity);
        for len in 0..arity {
            let width = d.pow(len as u32);
            let shift = table.len() / width;
            let mut valid = vec![false; width];
            for (key, &v) in table.iter().enumerate() {
                if v != UNDEFINED {
                    valid[key / shift] = true;
                }
            }
            prefixes.push(valid);
        }
        PartialOperation {
            domain,
            arity,
            table,
            defined,
            prefixes,
        }
    }

    /// A total operation given by a function.
    pub fn total(
        domain: FiniteDomain,
        arity: usize,
        f: impl Fn(&[Value]) -> Value,
    ) -> Result<Self> {
        let keys = all_keys(&domain, arity)?;
        let entries: Vec<(Vec<Value>, Value)> = keys
            .into_iter()
            .map(|k| {
                let v = f(&k);
                (k, v)
            })
            .collect();
        Self::from_entries(domain, arity, entries)
    }

    pub fn domain(&self) -> &FiniteDomain {
        &self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, args: &[Value]) -> Option<Value> {
        if args.len() != self.arity || args.iter().any(|&v| v >= self.domain.size()) {
            return None;
        }
        match self.table[encode(self.domain.size(), args)] {
            UNDEFINED => None,
            v => Some(v),
        }
    }

    /// `|dom(f)|`.
    pub fn domain_len(&self) -> usize {
        self.defined
    }

    pub fn is_total(&self) -> bool {
        self.defined == self.table.len()
    }

    /// Entries of the table in lexicographic key order.
    pub fn entries(&self) -> impl Iterator<Item = (Tuple, Value)> + '_ {
        let d = self.domain.size();
        self.table
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != UNDEFINED)
            .map(move |(key, &v)| (decode(d, self.arity, key), v))
    }

    pub fn is_idempotent(&self) -> bool {
        self.ensure_idempotent().is_ok()
    }

    /// Fails unless `f(x,..,x) = x` wherever defined.
    pub fn ensure_idempotent(&self) -> Result<()> {
        for x in self.domain.elements() {
            if let Some(y) = self.get(&vec![x; self.arity]) {
                if y != x {
                    return Err(Error::Invalid(format!(
                        "operation is not idempotent: f({x},..,{x}) = {y}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The subfunction defined on the keys selected by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&[Value]) -> bool) -> PartialOperation {
        let d = self.domain.size();
        let table = self
            .table
            .iter()
            .enumerate()
            .map(|(key, &v)| {
                if v != UNDEFINED && keep(decode(d, self.arity, key).values()) {
                    v
                } else {
                    UNDEFINED
                }
            })
            .collect();
        Self::from_table(self.domain.clone(), self.arity, table)
    }

    fn lookup(&self, key: usize) -> u32 {
        self.table[key]
    }
}

fn encode(d: u32, key: &[Value]) -> usize {
    key.iter().fold(0usize, |acc, &v| acc * d as usize + v as usize)
}

fn decode(d: u32, arity: usize, mut key: usize) -> Tuple {
    let mut values = vec![0; arity];
    for slot in values.iter_mut().rev() {
        *slot = (key % d as usize) as Value;
        key /= d as usize;
    }
    Tuple::new(values)
}

fn all_keys(domain: &FiniteDomain, arity: usize) -> Result<Vec<Vec<Value>>> {
    let size = domain.power(arity);
    if size > OPERATION_CAP {
        return Err(Error::CapExceeded {
            what: "|D|^k for an operation table",
            size,
            cap: OPERATION_CAP,
        });
    }
    Ok((0..size as usize)
        .map(|k| decode(domain.size(), arity, k).into_values())
        .collect())
}

/// The named operation families used throughout the toolkit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpFamily {
    /// `M_{D,<=}`: `M(x,y,y) = M(y,y,x) = x` for `x <= y`, undefined elsewhere.
    OrderedMaltsev(TotalOrder),
    /// `M_p`: `M(x,y,y) = M(y,y,x) = x` for all `x, y`.
    PartialMaltsev,
    /// The total majority operation on `{0,1}`.
    BooleanMajority,
    /// Binary minimum with respect to an order.
    Min(TotalOrder),
}

impl OpFamily {
    pub fn build(&self, domain: &FiniteDomain) -> Result<PartialOperation> {
        match self {
            OpFamily::OrderedMaltsev(order) => make_ordered_maltsev(domain, order),
            OpFamily::PartialMaltsev => Ok(make_partial_maltsev(domain)),
            OpFamily::BooleanMajority => make_boolean_majority(domain),
            OpFamily::Min(order) => make_min(domain, order),
        }
    }
}

impl fmt::Display for OpFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpFamily::OrderedMaltsev(o) => write!(f, "ordered-maltsev[{o}]"),
            OpFamily::PartialMaltsev => f.write_str("partial-maltsev"),
            OpFamily::BooleanMajority => f.write_str("majority"),
            OpFamily::Min(o) => write!(f, "min[{o}]"),
        }
    }
}

pub fn make_ordered_maltsev(domain: &FiniteDomain, order: &TotalOrder) -> Result<PartialOperation> {
    let order = order.clone().for_domain(domain)?;
    let mut entries = Vec::new();
    for x in domain.elements() {
        for y in domain.elements() {
            if order.le(x, y) {
                entries.push(([x, y, y], x));
                entries.push(([y, y, x], x));
            }
        }
    }
    PartialOperation::from_entries(domain.clone(), 3, entries)
}

pub fn make_partial_maltsev(domain: &FiniteDomain) -> PartialOperation {
    let mut entries = Vec::new();
    for x in domain.elements() {
        for y in domain.elements() {
            entries.push(([x, y, y], x));
            entries.push(([y, y, x], x));
        }
    }
    PartialOperation::from_entries(domain.clone(), 3, entries).expect("3-ary table fits")
}

pub fn make_boolean_majority(domain: &FiniteDomain) -> Result<PartialOperation> {
    if !domain.is_boolean() {
        return Err(Error::InvalidDomain(
            "the Boolean majority operation needs |D| = 2".into(),
        ));
    }
    PartialOperation::total(domain.clone(), 3, |a| {
        if a[0] == a[1] || a[0] == a[2] {
            a[0]
        } else {
            a[1]
        }
    })
}

pub fn make_min(domain: &FiniteDomain, order: &TotalOrder) -> Result<PartialOperation> {
    let order = order.clone().for_domain(domain)?;
    PartialOperation::total(domain.clone(), 2, |a| order.min(a[0], a[1]))
}

/// `f <= g`: `dom(f) ⊆ dom(g)` and the two agree on `dom(f)`.
pub fn is_subfunction(f: &PartialOperation, g: &PartialOperation) -> Result<bool> {
    f.domain.check_compatible(&g.domain)?;
    if f.arity != g.arity {
        return Err(Error::ArityMismatch {
            expected: g.arity,
            found: f.arity,
        });
    }
    Ok(f.table
        .iter()
        .zip(&g.table)
        .all(|(&a, &b)| a == UNDEFINED || a == b))
}

/// Applies `f` coordinatewise to `k` rows; `Ok(None)` when some coordinate is undefined.
pub fn apply_componentwise(f: &PartialOperation, rows: &[Tuple]) -> Result<Option<Tuple>> {
    if rows.len() != f.arity {
        return Err(Error::ArityMismatch {
            expected: f.arity,
            found: rows.len(),
        });
    }
    let width = rows[0].arity();
    if let Some(bad) = rows.iter().find(|r| r.arity() != width) {
        return Err(Error::IncompatibleTuples {
            left: width,
            right: bad.arity(),
        });
    }
    for row in rows {
        for &v in row.values() {
            f.domain.check_value(v)?;
        }
    }
    let mut out = Vec::with_capacity(width);
    let mut key = vec![0; f.arity];
    for j in 0..width {
        for (slot, row) in key.iter_mut().zip(rows) {
            *slot = row[j];
        }
        match f.get(&key) {
            Some(v) => out.push(v),
            None => return Ok(None),
        }
    }
    Ok(Some(Tuple::new(out)))
}

/// Rows of a relation that `f` maps outside the relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub rows: Vec<Tuple>,
    pub image: Tuple,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("f(")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ") = {}", self.image)
    }
}

/// Outcome of an invariance check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Invariance {
    Invariant,
    Violated(Counterexample),
}

impl Invariance {
    pub fn holds(&self) -> bool {
        matches!(self, Invariance::Invariant)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Invariance::Invariant => None,
            Invariance::Violated(c) => Some(c),
        }
    }
}

/// Decides whether `relation` is invariant under `f`: every sequence of `k`
/// tuples (with repetition) on which `f` is defined coordinatewise is mapped
/// back into the relation. The reported counterexample is the first one in
/// lexicographic order of row sequences.
pub fn is_invariant(relation: &Relation, f: &PartialOperation) -> Result<Invariance> {
    relation.domain().check_compatible(f.domain())?;
    let n = relation.len();
    let k = f.arity;
    let visits = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if visits > INVARIANCE_BUDGET {
        return Err(Error::BudgetExceeded {
            rows: n,
            arity: k,
            cap: INVARIANCE_BUDGET,
        });
    }
    if n == 0 {
        return Ok(Invariance::Invariant);
    }

    let r = relation.arity();
    let d = relation.domain().size() as usize;
    let rows = relation.flat_rows();
    // keys[depth * r + j]: encoded prefix of coordinate j after `depth + 1` rows
    let mut keys = vec![0usize; k * r];
    let mut choice = vec![0usize; k];
    let mut image = vec![0u32; r];
    let mut depth = 0usize;

    loop {
        // try to extend `depth` with row choice[depth]
        if choice[depth] == n {
            if depth == 0 {
                return Ok(Invariance::Invariant);
            }
            depth -= 1;
            choice[depth] += 1;
            continue;
        }
        let row = &rows[choice[depth] * r..(choice[depth] + 1) * r];
        let mut viable = true;
        for j in 0..r {
            let prev = if depth == 0 { 0 } else { keys[(depth - 1) * r + j] };
            let key = prev * d + row[j] as usize;
            keys[depth * r + j] = key;
            let ok = if depth + 1 < k {
                f.prefixes[depth + 1][key]
            } else {
                let v = f.lookup(key);
                image[j] = v;
                v != UNDEFINED
            };
            if !ok {
                viable = false;
                break;
            }
        }
        if !viable {
            choice[depth] += 1;
            continue;
        }
        if depth + 1 < k {
            depth += 1;
            choice[depth] = 0;
            continue;
        }
        if !relation.contains_code(relation.encode(&image)) {
            let rows = choice
                .iter()
                .map(|&i| Tuple::new(rows[i * r..(i + 1) * r].to_vec()))
                .collect();
            return Ok(Invariance::Violated(Counterexample {
                rows,
                image: Tuple::new(image),
            }));
        }
        choice[depth] += 1;
    }
}

/// A member of a language that escapes under an operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub relation: String,
    pub counterexample: Counterexample,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.relation, self.counterexample)
    }
}

/// Invariance of every member, in member order; `Ok(None)` when all hold.
pub fn language_invariant(
    language: &ConstraintLanguage,
    f: &PartialOperation,
) -> Result<Option<Violation>> {
    for (name, relation) in language.members() {
        if let Invariance::Violated(counterexample) = is_invariant(relation, f)? {
            return Ok(Some(Violation {
                relation: name.clone(),
                counterexample,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boolean(arity: usize, tuples: &[&[Value]]) -> Relation {
        Relation::new(FiniteDomain::boolean(), arity, tuples.iter().copied()).unwrap()
    }

    fn order(text: &str) -> TotalOrder {
        TotalOrder::parse(text).unwrap()
    }

    fn table(f: &PartialOperation) -> Vec<(Vec<Value>, Value)> {
        f.entries().map(|(k, v)| (k.into_values(), v)).collect()
    }

    #[test]
    fn ordered_maltsev_zero_below_one() {
        let m = make_ordered_maltsev(&FiniteDomain::boolean(), &order("0,1")).unwrap();
        assert_eq!(
            table(&m),
            vec![
                (vec![0, 0, 0], 0),
                (vec![0, 1, 1], 0),
                (vec![1, 1, 0], 0),
                (vec![1, 1, 1], 1),
            ]
        );
    }

    #[test]
    fn ordered_maltsev_one_below_zero() {
        let m = make_ordered_maltsev(&FiniteDomain::boolean(), &order("1,0")).unwrap();
        assert_eq!(
            table(&m),
            vec![
                (vec![0, 0, 0], 0),
                (vec![0, 0, 1], 1),
                (vec![1, 0, 0], 1),
                (vec![1, 1, 1], 1),
            ]
        );
    }

    #[test]
    fn ordered_maltsev_domain_size_is_d_squared() {
        for d in 2..=6u32 {
            let domain = FiniteDomain::new(d).unwrap();
            let m = make_ordered_maltsev(&domain, &TotalOrder::natural(&domain)).unwrap();
            // independent count of {(x,y,y) : x<=y} ∪ {(y,y,x) : x<=y}
            let mut keys = std::collections::BTreeSet::new();
            for x in 0..d {
                for y in x..d {
                    keys.insert((x, y, y));
                    keys.insert((y, y, x));
                }
            }
            assert_eq!(m.domain_len(), keys.len());
            assert_eq!(m.domain_len(), (d * d) as usize);
            assert!(m.ensure_idempotent().is_ok());
        }
    }

    #[test]
    fn partial_maltsev_values() {
        let mp = make_partial_maltsev(&FiniteDomain::boolean());
        assert_eq!(mp.get(&[1, 0, 0]), Some(1));
        assert_eq!(mp.get(&[0, 0, 0]), Some(0));
        assert_eq!(mp.get(&[0, 1, 0]), None);
    }

    #[test]
    fn subfunction_examples() {
        for d in 2..=4 {
            let domain = FiniteDomain::new(d).unwrap();
            let mp = make_partial_maltsev(&domain);
            let mut ord = Some(TotalOrder::natural(&domain));
            while let Some(o) = ord {
                let m = make_ordered_maltsev(&domain, &o).unwrap();
                assert!(is_subfunction(&m, &mp).unwrap());
                ord = o.next_permutation();
            }
            assert!(is_subfunction(&mp, &mp).unwrap());
        }
        let domain = FiniteDomain::boolean();
        let m = make_ordered_maltsev(&domain, &order("0,1")).unwrap();
        let mp = make_partial_maltsev(&domain);
        assert!(!is_subfunction(&mp, &m).unwrap());
        let maj = make_boolean_majority(&domain).unwrap();
        assert!(is_subfunction(&m, &maj).is_ok());
        let min = make_min(&domain, &order("0,1")).unwrap();
        assert!(is_subfunction(&min, &m).is_err());
    }

    #[test]
    fn componentwise_application() {
        let m = make_ordered_maltsev(&FiniteDomain::boolean(), &order("0,1")).unwrap();
        let rows = [Tuple::from([0, 1]), Tuple::from([1, 1]), Tuple::from([1, 0])];
        assert_eq!(apply_componentwise(&m, &rows).unwrap(), Some(Tuple::from([0, 0])));

        let same = [Tuple::from([1, 0]), Tuple::from([1, 0]), Tuple::from([1, 0])];
        assert_eq!(apply_componentwise(&m, &same).unwrap(), Some(Tuple::from([1, 0])));

        let mp = make_partial_maltsev(&FiniteDomain::new(4).unwrap());
        let rows = [Tuple::from([3, 2]), Tuple::from([2, 2]), Tuple::from([2, 1])];
        assert_eq!(apply_componentwise(&mp, &rows).unwrap(), Some(Tuple::from([3, 1])));

        let undefined = [Tuple::from([0, 1]), Tuple::from([1, 0]), Tuple::from([0, 0])];
        assert_eq!(apply_componentwise(&mp, &undefined).unwrap(), None);
        assert!(apply_componentwise(&mp, &rows[..2]).is_err());
    }

    #[test]
    fn or_is_not_invariant_under_ordered_maltsev() {
        let or = boolean(2, &[&[0, 1], &[1, 0], &[1, 1]]);
        let m = make_ordered_maltsev(&FiniteDomain::boolean(), &order("0,1")).unwrap();
        let result = is_invariant(&or, &m).unwrap();
        assert_eq!(
            result,
            Invariance::Violated(Counterexample {
                rows: vec![Tuple::from([0, 1]), Tuple::from([1, 1]), Tuple::from([1, 0])],
                image: Tuple::from([0, 0]),
            })
        );
    }

    #[test]
    fn diagonal_is_invariant_under_every_family() {
        for d in 2..=4 {
            let domain = FiniteDomain::new(d).unwrap();
            let delta = Relation::diagonal(domain.clone());
            let natural = TotalOrder::natural(&domain);
            let mut families = vec![
                OpFamily::OrderedMaltsev(natural.clone()),
                OpFamily::PartialMaltsev,
                OpFamily::Min(natural),
            ];
            if d == 2 {
                families.push(OpFamily::BooleanMajority);
            }
            for family in families {
                let f = family.build(&domain).unwrap();
                assert!(is_invariant(&delta, &f).unwrap().holds(), "{family}");
            }
        }
    }

    #[test]
    fn nand_is_invariant_under_ordered_maltsev() {
        let nand = boolean(2, &[&[0, 0], &[0, 1], &[1, 0]]);
        let m = make_ordered_maltsev(&FiniteDomain::boolean(), &order("0,1")).unwrap();
        // independent brute force over the 27 row triples
        let tuples = nand.to_vec();
        let mut escapes = 0;
        for a in &tuples {
            for b in &tuples {
                for c in &tuples {
                    if let Some(t) =
                        apply_componentwise(&m, &[a.clone(), b.clone(), c.clone()]).unwrap()
                    {
                        if !nand.contains(&t) {
                            escapes += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(escapes, 0);
        assert!(is_invariant(&nand, &m).unwrap().holds());
    }

    #[test]
    fn budget_guard() {
        let domain = FiniteDomain::new(2).unwrap();
        let full = Relation::full(domain.clone(), 12).unwrap(); // 4096 tuples
        let m = make_partial_maltsev(&domain);
        assert!(matches!(
            is_invariant(&full, &m),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn majority_needs_boolean_domain() {
        assert!(make_boolean_majority(&FiniteDomain::new(3).unwrap()).is_err());
    }

    #[test]
    fn conflicting_entries_rejected() {
        let d = FiniteDomain::boolean();
        assert!(PartialOperation::from_entries(d, 1, [([0], 0), ([0], 1)]).is_err());
    }

    #[test]
    fn idempotence_check() {
        let d = FiniteDomain::boolean();
        let not = PartialOperation::total(d.clone(), 1, |a| 1 - a[0]).unwrap();
        assert!(!not.is_idempotent());
        assert!(not.ensure_idempotent().is_err());
        assert!(make_partial_maltsev(&d).is_idempotent());
    }
}
