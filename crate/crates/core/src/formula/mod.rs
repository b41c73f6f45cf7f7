//! Constraint languages, formulas with constants, and reconfiguration instances.

mod parser;

use std::collections::BTreeMap;
use std::fmt;

use crate::domain::{FiniteDomain, Value};
use crate::error::{Error, Result};
use crate::pattern::{Slot, Term};
use crate::relation::{Relation, Tuple};

pub use parser::{parse_document, parse_formula, parse_instance, Document};

/// Default cap on `|D|^n` for exhaustive solution enumeration.
pub const ENUMERATION_CAP: u128 = 1 << 22;

/// A finite set of named, non-empty relations over one domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintLanguage {
    domain: FiniteDomain,
    members: BTreeMap<String, Relation>,
}

impl ConstraintLanguage {
    pub fn new<I, S>(domain: FiniteDomain, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Relation)>,
        S: Into<String>,
    {
        let mut language = ConstraintLanguage {
            domain,
            members: BTreeMap::new(),
        };
        for (name, relation) in members {
            language.insert(name.into(), relation)?;
        }
        Ok(language)
    }

    pub fn insert(&mut self, name: String, relation: Relation) -> Result<()> {
        self.domain.check_compatible(relation.domain())?;
        if relation.is_empty() {
            return Err(Error::Invalid(format!(
                "relation {name} is empty; language members must be non-empty"
            )));
        }
        if self.members.contains_key(&name) {
            return Err(Error::Invalid(format!("duplicate relation name {name}")));
        }
        self.members.insert(name, relation);
        Ok(())
    }

    pub fn domain(&self) -> &FiniteDomain {
        &self.domain
    }

    pub fn get(&self, name: &str) -> Option<&Relation> {
        self.members.get(name)
    }

    /// Members in name order.
    pub fn members(&self) -> impl Iterator<Item = (&String, &Relation)> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Name of a member equal to `relation`, if any.
    pub fn find(&self, relation: &Relation) -> Option<&str> {
        self.members
            .iter()
            .find(|(_, r)| *r == relation)
            .map(|(n, _)| n.as_str())
    }

    /// A name starting with `base` that is not yet taken.
    pub fn fresh_name(&self, base: &str) -> String {
        let mut name = base.to_string();
        let mut i = 1;
        while self.members.contains_key(&name) {
            name = format!("{base}_{i}");
            i += 1;
        }
        name
    }
}

/// `R(ξ1, .., ξr)` with each `ξ` a variable or a constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub relation: String,
    pub args: Vec<Term>,
}

impl Constraint {
    pub fn new(relation: impl Into<String>, args: Vec<Term>) -> Self {
        Constraint {
            relation: relation.into(),
            args,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.relation)?;
        f.write_str("(")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug)]
struct Compiled {
    relation: usize,
    slots: Vec<Slot>,
    /// Largest variable index in `slots`, or `None` for all-constant constraints.
    last_var: Option<usize>,
}

/// A conjunction of constraints over a language. Coordinates of assignments
/// follow [`Formula::variables`].
#[derive(Clone, Debug)]
pub struct Formula {
    language: ConstraintLanguage,
    constraints: Vec<Constraint>,
    variables: Vec<String>,
    relations: Vec<Relation>,
    compiled: Vec<Compiled>,
    incident: Vec<Vec<usize>>,
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.language == other.language
            && self.constraints == other.constraints
            && self.variables == other.variables
    }
}

impl Eq for Formula {}

/// An assignment in the formula's variable order.
pub type Assignment = Tuple;

impl Formula {
    /// Variables are ordered by first occurrence.
    pub fn new(language: ConstraintLanguage, constraints: Vec<Constraint>) -> Result<Self> {
        Self::build(language, constraints, None)
    }

    /// Uses `variables` as the coordinate order. Every declared variable must
    /// occur in some constraint and every occurring variable must be declared.
    pub fn with_variables(
        language: ConstraintLanguage,
        constraints: Vec<Constraint>,
        variables: Vec<String>,
    ) -> Result<Self> {
        Self::build(language, constraints, Some(variables))
    }

    fn build(
        language: ConstraintLanguage,
        constraints: Vec<Constraint>,
        declared: Option<Vec<String>>,
    ) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::Invalid("a formula needs at least one constraint".into()));
        }
        let mut occurring: Vec<String> = Vec::new();
        for c in &constraints {
            for a in &c.args {
                if let Term::Var(v) = a {
                    if !occurring.contains(v) {
                        occurring.push(v.clone());
                    }
                }
            }
        }
        let variables = match declared {
            None => occurring,
            Some(declared) => {
                for (i, v) in declared.iter().enumerate() {
                    if declared[..i].contains(v) {
                        return Err(Error::Invalid(format!("variable {v} declared twice")));
                    }
                    if !occurring.contains(v) {
                        return Err(Error::Invalid(format!(
                            "variable {v} is declared but occurs in no constraint"
                        )));
                    }
                }
                if let Some(v) = occurring.iter().find(|v| !declared.contains(v)) {
                    return Err(Error::Invalid(format!("variable {v} is not declared")));
                }
                declared
            }
        };
        if variables.is_empty() {
            return Err(Error::Invalid("a formula needs at least one variable".into()));
        }

        let mut names: Vec<&str> = Vec::new();
        let mut relations = Vec::new();
        let mut compiled = Vec::with_capacity(constraints.len());
        let mut incident = vec![Vec::new(); variables.len()];
        for (ci, c) in constraints.iter().enumerate() {
            let relation = language
                .get(&c.relation)
                .ok_or_else(|| Error::Invalid(format!("unknown relation name {}", c.relation)))?;
            if relation.arity() != c.args.len() {
                return Err(Error::ArityMismatch {
                    expected: relation.arity(),
                    found: c.args.len(),
                });
            }
            let idx = match names.iter().position(|n| *n == c.relation) {
                Some(i) => i,
                None => {
                    names.push(&c.relation);
                    relations.push(relation.clone());
                    relations.len() - 1
                }
            };
            let mut slots = Vec::with_capacity(c.args.len());
            let mut last_var = None;
            for a in &c.args {
                match a {
                    Term::Const(v) => {
                        language.domain().check_value(*v)?;
                        slots.push(Slot::Const(*v));
                    }
                    Term::Var(name) => {
                        let vi = variables.iter().position(|v| v == name).expect("collected");
                        if !incident[vi].contains(&ci) {
                            incident[vi].push(ci);
                        }
                        last_var = Some(last_var.map_or(vi, |m: usize| m.max(vi)));
                        slots.push(Slot::Var(vi));
                    }
                }
            }
            compiled.push(Compiled {
                relation: idx,
                slots,
                last_var,
            });
        }
        Ok(Formula {
            language,
            constraints,
            variables,
            relations,
            compiled,
            incident,
        })
    }

    pub fn language(&self) -> &ConstraintLanguage {
        &self.language
    }

    pub fn domain(&self) -> &FiniteDomain {
        self.language.domain()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    fn holds(&self, ci: usize, values: &[Value]) -> bool {
        let c = &self.compiled[ci];
        let relation = &self.relations[c.relation];
        let d = relation.domain().size();
        let code = c.slots.iter().fold(0u32, |acc, s| {
            acc * d
                + match *s {
                    Slot::Var(i) => values[i],
                    Slot::Const(v) => v,
                }
        });
        relation.contains_code(code)
    }

    /// Whether every constraint mentioning variable `var` holds.
    pub(crate) fn holds_around(&self, var: usize, values: &[Value]) -> bool {
        self.incident[var].iter().all(|&ci| self.holds(ci, values))
    }

    pub(crate) fn satisfies_unchecked(&self, values: &[Value]) -> bool {
        (0..self.compiled.len()).all(|ci| self.holds(ci, values))
    }

    fn check_assignment(&self, a: &[Value]) -> Result<()> {
        if a.len() != self.variables.len() {
            return Err(Error::Invalid(format!(
                "partial assignment: {} values for {} variables",
                a.len(),
                self.variables.len()
            )));
        }
        a.iter().try_for_each(|&v| self.domain().check_value(v))
    }

    pub fn satisfies(&self, assignment: &[Value]) -> Result<bool> {
        self.check_assignment(assignment)?;
        Ok(self.satisfies_unchecked(assignment))
    }

    /// Builds an assignment from a name → value map.
    pub fn assignment_from_map(&self, map: &BTreeMap<String, Value>) -> Result<Assignment> {
        let values = self
            .variables
            .iter()
            .map(|v| {
                map.get(v)
                    .copied()
                    .ok_or_else(|| Error::Invalid(format!("partial assignment: {v} unset")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.check_assignment(&values)?;
        Ok(Tuple::new(values))
    }

    /// `s(I)` as an `n`-ary relation over the formula's variable order.
    pub fn solution_relation(&self) -> Result<Relation> {
        self.solution_relation_with_cap(ENUMERATION_CAP)
    }

    pub fn solution_relation_with_cap(&self, cap: u128) -> Result<Relation> {
        let n = self.variables.len();
        let size = self.domain().power(n);
        if size > cap {
            return Err(Error::TooLargeForEnumeration { size, cap });
        }
        let out = Relation::empty(self.domain().clone(), n)?;
        let mut ready: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (ci, c) in self.compiled.iter().enumerate() {
            match c.last_var {
                Some(v) => ready[v].push(ci),
                None => {
                    if !self.holds(ci, &[]) {
                        return Ok(out);
                    }
                }
            }
        }
        let d = self.domain().size();
        let mut values = vec![0 as Value; n];
        let mut codes = Vec::new();
        let mut depth = 0usize;
        let mut next = vec![0 as Value; n];
        loop {
            if next[depth] == d {
                if depth == 0 {
                    break;
                }
                depth -= 1;
                continue;
            }
            values[depth] = next[depth];
            next[depth] += 1;
            if !ready[depth].iter().all(|&ci| self.holds(ci, &values)) {
                continue;
            }
            if depth + 1 == n {
                codes.push(values.iter().fold(0u32, |acc, &v| acc * d + v));
            } else {
                depth += 1;
                next[depth] = 0;
            }
        }
        Ok(Relation::from_sorted_codes(self.domain().clone(), n, codes))
    }
}

/// A formula with two solutions to be connected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RcspInstance {
    formula: Formula,
    start: Assignment,
    target: Assignment,
}

impl RcspInstance {
    pub fn new(formula: Formula, start: Assignment, target: Assignment) -> Result<Self> {
        if !formula.satisfies(&start)? {
            return Err(Error::NotASolution("start"));
        }
        if !formula.satisfies(&target)? {
            return Err(Error::NotASolution("target"));
        }
        Ok(RcspInstance {
            formula,
            start,
            target,
        })
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn start(&self) -> &Assignment {
        &self.start
    }

    pub fn target(&self) -> &Assignment {
        &self.target
    }
}

fn write_values(f: &mut fmt::Formatter<'_>, values: &[Value]) -> fmt::Result {
    for v in values {
        write!(f, " {v}")?;
    }
    Ok(())
}

/// Prints `domain` and `rel` statements; `parse_document` reads them back.
impl fmt::Display for ConstraintLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "domain {}", self.domain.size())?;
        if let Some(labels) = self.domain.labels() {
            for l in labels {
                write!(f, " {l}")?;
            }
        }
        writeln!(f)?;
        for (name, relation) in self.members() {
            write!(f, "rel {name} {} {{", relation.arity())?;
            for (i, t) in relation.tuples().enumerate() {
                if i > 0 {
                    f.write_str(" ;")?;
                }
                write_values(f, &t)?;
            }
            writeln!(f, " }}")?;
        }
        Ok(())
    }
}

/// Prints in the instance file format; `parse_formula` reads it back.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.language)?;
        f.write_str("var")?;
        for v in &self.variables {
            write!(f, " {v}")?;
        }
        writeln!(f)?;
        for c in &self.constraints {
            write!(f, "cst {}", c.relation)?;
            for a in &c.args {
                write!(f, " {a}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl fmt::Display for RcspInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.formula)?;
        f.write_str("start")?;
        write_values(f, &self.start)?;
        f.write_str("\ntarget")?;
        write_values(f, &self.target)?;
        writeln!(f)
    }
}
