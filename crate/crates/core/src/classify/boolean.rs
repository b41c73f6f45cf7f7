//! Boolean properties behind the reconfiguration dichotomy.

use std::fmt;

use crate::domain::{FiniteDomain, Value};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::partial_ops::{is_invariant, make_boolean_majority, Counterexample, Invariance};
use crate::pattern::{apply_slots, Pattern, Slot, Term};
use crate::relation::{connected_components, Relation};

/// `{(0,1),(1,0),(1,1)}` as a bit mask over codes `2a+b`.
const OR_MASK: u8 = 0b1110;
/// `{(0,0),(0,1),(1,0)}`.
const NAND_MASK: u8 = 0b0111;

pub fn or_relation() -> Relation {
    Relation::new(FiniteDomain::boolean(), 2, [[0, 1], [1, 0], [1, 1]]).expect("binary")
}

pub fn nand_relation() -> Relation {
    Relation::new(FiniteDomain::boolean(), 2, [[0, 0], [0, 1], [1, 0]]).expect("binary")
}

pub(crate) fn require_boolean(relation: &Relation) -> Result<()> {
    if relation.domain().is_boolean() {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!(
            "expected a Boolean relation, got |D| = {}",
            relation.domain().size()
        )))
    }
}

/// Swaps 0 and 1 in every tuple.
pub fn dual(relation: &Relation) -> Result<Relation> {
    require_boolean(relation)?;
    Relation::new(
        relation.domain().clone(),
        relation.arity(),
        relation
            .tuples()
            .map(|t| t.iter().map(|&v| 1 - v).collect::<Vec<Value>>()),
    )
}

/// Why a property fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A pattern whose image is the forbidden binary relation.
    Pattern(Pattern),
    /// Rows of the relation mapped outside it by the operation.
    Rows(Counterexample),
    /// An identification whose image has a connected component that is not
    /// closed under majority; `rows` lie in that component.
    Component {
        pattern: Pattern,
        counterexample: Counterexample,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Pattern(p) => write!(f, "pattern {p}"),
            Witness::Rows(c) => write!(f, "{c}"),
            Witness::Component {
                pattern,
                counterexample,
            } => write!(f, "pattern {pattern}: {counterexample}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyCheck {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl PropertyCheck {
    fn pass() -> Self {
        PropertyCheck {
            holds: true,
            witness: None,
        }
    }

    fn fail(witness: Witness) -> Self {
        PropertyCheck {
            holds: false,
            witness: Some(witness),
        }
    }
}

const UNSET: u8 = 2;

/// Depth-first search over patterns in `{x1, x2, 0, 1}^r` (in that order per
/// coordinate, `x1` occurring before `x2`) for one whose image equals `target`.
/// With `once`, each variable must occur exactly once (no identification).
fn find_pattern(relation: &Relation, target: u8, once: bool) -> Option<Pattern> {
    struct Search<'a> {
        rows: &'a [Value],
        r: usize,
        target: u8,
        once: bool,
        choice: Vec<u8>,
    }

    impl Search<'_> {
        fn go(&mut self, pos: usize, alive: &[(usize, u8, u8)], used: (u8, u8)) -> bool {
            if alive.is_empty() {
                return false;
            }
            if pos == self.r {
                if used.0 == 0 || used.1 == 0 {
                    return false;
                }
                let mask = alive
                    .iter()
                    .fold(0u8, |m, &(_, a, b)| m | 1 << (2 * a + b));
                return mask == self.target;
            }
            for c in 0..4u8 {
                match c {
                    1 if used.0 == 0 => continue,
                    0 if self.once && used.0 > 0 => continue,
                    1 if self.once && used.1 > 0 => continue,
                    _ => {}
                }
                let next: Vec<(usize, u8, u8)> = alive
                    .iter()
                    .filter_map(|&(i, a, b)| {
                        let v = self.rows[i * self.r + pos] as u8;
                        match c {
                            0 if a == UNSET || a == v => Some((i, v, b)),
                            1 if b == UNSET || b == v => Some((i, a, v)),
                            2 | 3 if v == c - 2 => Some((i, a, b)),
                            _ => None,
                        }
                    })
                    .collect();
                let used = match c {
                    0 => (used.0 + 1, used.1),
                    1 => (used.0, used.1 + 1),
                    _ => used,
                };
                self.choice[pos] = c;
                if self.go(pos + 1, &next, used) {
                    return true;
                }
            }
            false
        }
    }

    let rows = relation.flat_rows();
    let mut search = Search {
        rows: &rows,
        r: relation.arity(),
        target,
        once,
        choice: vec![0; relation.arity()],
    };
    let alive: Vec<(usize, u8, u8)> = (0..relation.len()).map(|i| (i, UNSET, UNSET)).collect();
    if !search.go(0, &alive, (0, 0)) {
        return None;
    }
    Some(Pattern::new(
        search
            .choice
            .iter()
            .map(|&c| match c {
                0 => Term::var("x1"),
                1 => Term::var("x2"),
                c => Term::Const((c - 2) as Value),
            })
            .collect(),
    ))
}

fn forbidden_check(
    relation: &Relation,
    target: u8,
    safe: bool,
    limits: &Limits,
) -> Result<PropertyCheck> {
    require_boolean(relation)?;
    if relation.arity() > limits.pattern_arity {
        return Err(Error::GuardExceeded(format!(
            "pattern search on arity {} exceeds the arity guard {}",
            relation.arity(),
            limits.pattern_arity
        )));
    }
    Ok(match find_pattern(relation, target, !safe) {
        Some(p) => PropertyCheck::fail(Witness::Pattern(p)),
        None => PropertyCheck::pass(),
    })
}

/// OR cannot be obtained by substituting constants.
pub fn or_free(relation: &Relation) -> Result<PropertyCheck> {
    forbidden_check(relation, OR_MASK, false, &Limits::default())
}

/// NAND cannot be obtained by substituting constants.
pub fn nand_free(relation: &Relation) -> Result<PropertyCheck> {
    forbidden_check(relation, NAND_MASK, false, &Limits::default())
}

pub fn safely_or_free(relation: &Relation) -> Result<PropertyCheck> {
    safely_or_free_with(relation, &Limits::default())
}

/// OR cannot be obtained by identifying variables and substituting constants.
pub fn safely_or_free_with(relation: &Relation, limits: &Limits) -> Result<PropertyCheck> {
    forbidden_check(relation, OR_MASK, true, limits)
}

pub fn safely_nand_free(relation: &Relation) -> Result<PropertyCheck> {
    safely_nand_free_with(relation, &Limits::default())
}

pub fn safely_nand_free_with(relation: &Relation, limits: &Limits) -> Result<PropertyCheck> {
    forbidden_check(relation, NAND_MASK, true, limits)
}

/// Closed under the Boolean majority operation.
pub fn is_bijunctive(relation: &Relation) -> Result<PropertyCheck> {
    require_boolean(relation)?;
    let maj = make_boolean_majority(relation.domain())?;
    Ok(match is_invariant(relation, &maj)? {
        Invariance::Invariant => PropertyCheck::pass(),
        Invariance::Violated(c) => PropertyCheck::fail(Witness::Rows(c)),
    })
}

fn component_escape(relation: &Relation) -> Result<Option<Counterexample>> {
    let maj = make_boolean_majority(relation.domain())?;
    for component in connected_components(relation) {
        if let Invariance::Violated(c) = is_invariant(&component, &maj)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Every connected component of the solution graph is bijunctive.
pub fn is_cw_bijunctive(relation: &Relation) -> Result<PropertyCheck> {
    require_boolean(relation)?;
    Ok(match component_escape(relation)? {
        None => PropertyCheck::pass(),
        Some(c) => PropertyCheck::fail(Witness::Rows(c)),
    })
}

pub fn is_safely_cw_bijunctive(relation: &Relation) -> Result<PropertyCheck> {
    is_safely_cw_bijunctive_with(relation, &Limits::default())
}

/// Componentwise bijunctive after every identification of coordinates.
pub fn is_safely_cw_bijunctive_with(relation: &Relation, limits: &Limits) -> Result<PropertyCheck> {
    require_boolean(relation)?;
    let r = relation.arity();
    if r > limits.scb_arity {
        return Err(Error::GuardExceeded(format!(
            "identifications of arity {r} exceed the arity guard {}",
            limits.scb_arity
        )));
    }
    let mut failure = None;
    for_each_partition(r, |blocks| {
        let width = blocks.iter().max().map_or(0, |m| m + 1);
        let slots: Vec<Slot> = blocks.iter().map(|&b| Slot::Var(b)).collect();
        let image = apply_slots(relation, &slots, width);
        match component_escape(&image) {
            Ok(None) => true,
            Ok(Some(c)) => {
                failure = Some(Ok(Witness::Component {
                    pattern: Pattern::identification(blocks),
                    counterexample: c,
                }));
                false
            }
            Err(e) => {
                failure = Some(Err(e));
                false
            }
        }
    });
    match failure {
        None => Ok(PropertyCheck::pass()),
        Some(w) => Ok(PropertyCheck::fail(w?)),
    }
}

/// Calls `visit` on every set partition of `0..n` as a restricted growth
/// string, in lexicographic order, until it returns `false`.
pub fn for_each_partition(n: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if n == 0 {
        return;
    }
    let mut a = vec![0usize; n];
    let mut max = vec![0usize; n];
    loop {
        if !visit(&a) {
            return;
        }
        // rightmost position that can still grow
        let Some(i) = (1..n).rev().find(|&i| a[i] <= max[i - 1]) else {
            return;
        };
        a[i] += 1;
        max[i] = max[i - 1].max(a[i]);
        for j in i + 1..n {
            a[j] = 0;
            max[j] = max[i];
        }
    }
}

/// A sign per coordinate; `Plus` keeps the natural order, `Minus` reverses it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation(pub Vec<Sign>);

impl Orientation {
    /// `a <=_o b`.
    pub fn le(&self, a: &[Value], b: &[Value]) -> bool {
        self.0.iter().zip(a.iter().zip(b)).all(|(s, (x, y))| match s {
            Sign::Plus => x <= y,
            Sign::Minus => x >= y,
        })
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Sign::Plus => "+",
                Sign::Minus => "-",
            })?;
        }
        Ok(())
    }
}

pub fn admits_total_order(relation: &Relation) -> Result<Option<Orientation>> {
    admits_total_order_with(relation, &Limits::default())
}

/// Lexicographically least orientation (`+` before `-`) under which any two
/// tuples are comparable.
pub fn admits_total_order_with(relation: &Relation, limits: &Limits) -> Result<Option<Orientation>> {
    require_boolean(relation)?;
    let r = relation.arity();
    if r > limits.pattern_arity {
        return Err(Error::GuardExceeded(format!(
            "orientation search on arity {r} exceeds the arity guard {}",
            limits.pattern_arity
        )));
    }
    let tuples = relation.to_vec();
    'masks: for mask in 0u64..1 << r {
        let o = Orientation(
            (0..r)
                .map(|i| {
                    if mask >> (r - 1 - i) & 1 == 1 {
                        Sign::Minus
                    } else {
                        Sign::Plus
                    }
                })
                .collect(),
        );
        for (i, a) in tuples.iter().enumerate() {
            for b in &tuples[i + 1..] {
                if !o.le(a, b) && !o.le(b, a) {
                    continue 'masks;
                }
            }
        }
        return Ok(Some(o));
    }
    Ok(None)
}
