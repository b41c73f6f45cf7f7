//! Substitution of constants and identification of variables.
//!
//! A [`Pattern`] lists, for each coordinate of a relation, either a variable
//! name or a constant. Applying it yields the relation over the pattern's
//! distinct variables (ordered by first occurrence).

use std::fmt;

use crate::domain::Value;
use crate::error::{Error, Result};
use crate::relation::Relation;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(Value),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(name) => Some(name),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(name) => f.write_str(name),
            Term::Const(v) => write!(f, "#{v}"),
        }
    }
}

impl std::str::FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(digits) = s.strip_prefix('#') {
            return digits
                .parse()
                .map(Term::Const)
                .map_err(|_| Error::Invalid(format!("bad constant {s:?}")));
        }
        if is_identifier(s) {
            Ok(Term::Var(s.to_string()))
        } else {
            Err(Error::Invalid(format!("bad variable name {s:?}")))
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    terms: Vec<Term>,
}

impl Pattern {
    pub fn new(terms: Vec<Term>) -> Self {
        Pattern { terms }
    }

    /// `x1 .. xr`, all distinct.
    pub fn identity(arity: usize) -> Self {
        Pattern::new((1..=arity).map(|i| Term::Var(format!("x{i}"))).collect())
    }

    /// Pattern identifying coordinates with equal labels, e.g. `[0,0,1]` gives `x1 x1 x2`.
    pub fn identification(blocks: &[usize]) -> Self {
        Pattern::new(
            blocks
                .iter()
                .map(|b| Term::Var(format!("x{}", b + 1)))
                .collect(),
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>>>()
            .map(Pattern::new)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Distinct variable names in order of first occurrence.
    pub fn variables(&self) -> Vec<&str> {
        let mut vars: Vec<&str> = Vec::new();
        for t in &self.terms {
            if let Term::Var(name) = t {
                if !vars.contains(&name.as_str()) {
                    vars.push(name);
                }
            }
        }
        vars
    }

    /// Substitutes `inner` for this pattern's variables: applying `self` and then
    /// `inner` is the same as applying the composed pattern once.
    pub fn compose(&self, inner: &Pattern) -> Result<Pattern> {
        let vars = self.variables();
        if inner.len() != vars.len() {
            return Err(Error::ArityMismatch {
                expected: vars.len(),
                found: inner.len(),
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| match t {
                Term::Const(c) => Term::Const(*c),
                Term::Var(name) => {
                    let idx = vars.iter().position(|v| v == name).expect("listed");
                    inner.terms[idx].clone()
                }
            })
            .collect();
        Ok(Pattern::new(terms))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Slot-level view of a pattern: each coordinate is either a variable index
/// (into the result's coordinates) or a constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Slot {
    Var(usize),
    Const(Value),
}

pub(crate) fn compile(pattern: &Pattern) -> (Vec<Slot>, usize) {
    let vars = pattern.variables();
    let slots = pattern
        .terms()
        .iter()
        .map(|t| match t {
            Term::Const(c) => Slot::Const(*c),
            Term::Var(name) => Slot::Var(vars.iter().position(|v| v == name).expect("listed")),
        })
        .collect();
    (slots, vars.len())
}

/// `R'(vars) = R(pattern)`: keeps tuples agreeing with the constants and with
/// repeated variables, projected onto the distinct variables.
pub fn apply_pattern(relation: &Relation, pattern: &Pattern) -> Result<Relation> {
    if pattern.len() != relation.arity() {
        return Err(Error::ArityMismatch {
            expected: relation.arity(),
            found: pattern.len(),
        });
    }
    for t in pattern.terms() {
        if let Term::Const(c) = t {
            relation.domain().check_value(*c)?;
        }
    }
    let (slots, width) = compile(pattern);
    if width == 0 {
        return Err(Error::Invalid(
            "pattern has no variables; the result would be 0-ary".into(),
        ));
    }
    Ok(apply_slots(relation, &slots, width))
}

pub(crate) fn apply_slots(relation: &Relation, slots: &[Slot], width: usize) -> Relation {
    let d = relation.domain().size();
    let mut tuple = vec![0; relation.arity()];
    let mut image = vec![u32::MAX; width];
    let mut codes = Vec::new();
    'tuples: for &code in relation.codes() {
        relation.decode_into(code, &mut tuple);
        image.iter_mut().for_each(|v| *v = u32::MAX);
        for (slot, &value) in slots.iter().zip(&tuple) {
            match *slot {
                Slot::Const(c) if c != value => continue 'tuples,
                Slot::Const(_) => {}
                Slot::Var(i) => {
                    if image[i] == u32::MAX {
                        image[i] = value;
                    } else if image[i] != value {
                        continue 'tuples;
                    }
                }
            }
        }
        codes.push(image.iter().fold(0u32, |acc, &v| acc * d + v));
    }
    Relation::from_codes(relation.domain().clone(), width, codes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::FiniteDomain;
    use crate::relation::Tuple;

    fn boolean(arity: usize, tuples: &[&[Value]]) -> Relation {
        Relation::new(FiniteDomain::boolean(), arity, tuples.iter().copied()).unwrap()
    }

    fn clause(i: Value, j: Value) -> Relation {
        Relation::full(FiniteDomain::boolean(), 2)
            .unwrap()
            .filter(|t| t != [i, j])
    }

    #[test]
    fn substitution_of_a_constant() {
        let r01 = clause(0, 1);
        let out = apply_pattern(&r01, &Pattern::parse("#0 x2").unwrap()).unwrap();
        assert_eq!(out.to_vec(), vec![Tuple::from([0])]);
    }

    #[test]
    fn identification_of_variables() {
        let r00 = clause(0, 0);
        let out = apply_pattern(&r00, &Pattern::parse("x3 x3").unwrap()).unwrap();
        assert_eq!(out.to_vec(), vec![Tuple::from([1])]);
    }

    #[test]
    fn nae_with_a_zero_is_or() {
        let nae = Relation::full(FiniteDomain::boolean(), 3)
            .unwrap()
            .filter(|t| !(t == [0, 0, 0] || t == [1, 1, 1]));
        let out = apply_pattern(&nae, &Pattern::parse("x1 x2 #0").unwrap()).unwrap();
        assert_eq!(out, boolean(2, &[&[0, 1], &[1, 0], &[1, 1]]));
    }

    #[test]
    fn variables_follow_first_occurrence() {
        let r = boolean(3, &[&[0, 1, 1], &[1, 0, 0]]);
        let out = apply_pattern(&r, &Pattern::parse("b a a").unwrap()).unwrap();
        assert_eq!(out.to_vec(), vec![Tuple::from([0, 1]), Tuple::from([1, 0])]);
    }

    #[test]
    fn errors() {
        let r = boolean(2, &[&[0, 1]]);
        assert!(matches!(
            apply_pattern(&r, &Pattern::parse("x").unwrap()),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(apply_pattern(&r, &Pattern::parse("#0 #1").unwrap()).is_err());
        assert!(apply_pattern(&r, &Pattern::parse("#2 x").unwrap()).is_err());
    }

    #[test]
    fn pattern_text_round_trip() {
        let p = Pattern::parse("x1 #0 y_2 x1").unwrap();
        assert_eq!(p.to_string(), "x1 #0 y_2 x1");
        assert_eq!(p.variables(), vec!["x1", "y_2"]);
        assert!(Pattern::parse("1x").is_err());
    }
}
