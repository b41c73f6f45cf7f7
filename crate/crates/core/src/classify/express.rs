//! Expressing a relation as a conjunction of atoms over a language, equality
//! and constants, and rewriting instances through such expressions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::{Constraint, ConstraintLanguage, Formula, RcspInstance};
use crate::limits::Limits;
use crate::pattern::{apply_pattern, Pattern, Term};
use crate::relation::{Relation, Tuple};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expressibility {
    /// A conjunction over `y1 .. yr` whose solution set is the relation.
    Formula(Formula),
    /// The empty relation, expressed by the empty unary relation by convention.
    EmptyRelation,
    /// Tuples satisfying every implied atom but missing from the relation.
    NotExpressible { slack: Vec<Tuple> },
}

/// The language with the equality relation adjoined (under a fresh name if
/// absent), and the name equality goes by.
pub fn with_equality(language: &ConstraintLanguage) -> (ConstraintLanguage, String) {
    let eq = Relation::diagonal(language.domain().clone());
    if let Some(name) = language.find(&eq) {
        return (language.clone(), name.to_string());
    }
    let mut extended = language.clone();
    let name = extended.fresh_name("eq");
    extended
        .insert(name.clone(), eq)
        .expect("fresh name, non-empty relation");
    (extended, name)
}

fn variables(arity: usize) -> Vec<String> {
    (1..=arity).map(|i| format!("y{i}")).collect()
}

fn covers_all(constraints: &[Constraint], vars: &[String]) -> bool {
    vars.iter().all(|v| {
        constraints
            .iter()
            .any(|c| c.args.iter().any(|a| a.as_var() == Some(v)))
    })
}

pub fn express_check(relation: &Relation, language: &ConstraintLanguage) -> Result<Expressibility> {
    express_check_with(relation, language, &Limits::default())
}

/// Builds the strongest conjunction of atoms `S(args)` implied by `relation`,
/// with `S` ranging over the language plus equality and `args` over the
/// variables `y1 .. yr` and the constants; the relation is expressible iff
/// that conjunction defines it exactly.
pub fn express_check_with(
    relation: &Relation,
    language: &ConstraintLanguage,
    limits: &Limits,
) -> Result<Expressibility> {
    language.domain().check_compatible(relation.domain())?;
    let r = relation.arity();
    if r > limits.express_arity {
        return Err(Error::GuardExceeded(format!(
            "expressibility of arity {r} exceeds the arity guard {}",
            limits.express_arity
        )));
    }
    if relation.is_empty() {
        return Ok(Expressibility::EmptyRelation);
    }
    let (language, eq) = with_equality(language);
    let vars = variables(r);
    let domain = language.domain().clone();

    if let Some(name) = language.find(relation) {
        let args = vars.iter().map(|v| Term::var(v.as_str())).collect();
        let f = Formula::with_variables(language.clone(), vec![Constraint::new(name, args)], vars)?;
        return Ok(Expressibility::Formula(f));
    }

    let alphabet: Vec<Term> = vars
        .iter()
        .map(|v| Term::var(v.as_str()))
        .chain(domain.elements().map(Term::Const))
        .collect();
    let width = alphabet.len();
    let candidates: u128 = language
        .members()
        .map(|(_, s)| (width as u128).saturating_pow(s.arity() as u32))
        .sum();
    if candidates > limits.express_atoms {
        return Err(Error::GuardExceeded(format!(
            "{candidates} candidate atoms exceed the guard of {}",
            limits.express_atoms
        )));
    }

    let rows = relation.to_vec();
    let mut atoms = Vec::new();
    let mut values = Vec::new();
    for (name, s) in language.members() {
        let k = s.arity();
        let mut digits = vec![0usize; k];
        loop {
            if digits.iter().any(|&i| i < r) {
                let implied = rows.iter().all(|t| {
                    values.clear();
                    values.extend(digits.iter().map(|&i| match &alphabet[i] {
                        Term::Var(_) => t[i],
                        Term::Const(c) => *c,
                    }));
                    s.contains(&values)
                });
                if implied {
                    let args: Vec<Term> = digits.iter().map(|&i| alphabet[i].clone()).collect();
                    // atoms allowing every value of their variables say nothing
                    let image = apply_pattern(s, &Pattern::new(args.clone()))?;
                    if (image.len() as u128) < domain.power(image.arity()) {
                        atoms.push(Constraint::new(name.as_str(), args));
                    }
                }
            }
            let Some(pos) = (0..k).rev().find(|&i| digits[i] + 1 < width) else {
                break;
            };
            digits[pos] += 1;
            digits[pos + 1..].iter_mut().for_each(|d| *d = 0);
        }
    }
    for v in &vars {
        if !covers_all(&atoms, std::slice::from_ref(v)) {
            atoms.push(Constraint::new(eq.as_str(), vec![Term::var(v.as_str()), Term::var(v.as_str())]));
        }
    }

    let formula = Formula::with_variables(language.clone(), atoms.clone(), vars.clone())?;
    let solutions = formula.solution_relation_with_cap(limits.max_enum)?;
    if solutions.codes() != relation.codes() {
        let slack = solutions.tuples().filter(|t| !relation.contains(t)).collect();
        return Ok(Expressibility::NotExpressible { slack });
    }

    // Greedy pruning of redundant atoms, only where re-enumeration is cheap.
    let budget = domain.power(r).saturating_mul(atoms.len() as u128);
    if budget <= 1 << 20 {
        let mut i = 0;
        while i < atoms.len() {
            let mut fewer = atoms.clone();
            fewer.remove(i);
            if !fewer.is_empty() && covers_all(&fewer, &vars) {
                let f = Formula::with_variables(language.clone(), fewer.clone(), vars.clone())?;
                if f.solution_relation_with_cap(limits.max_enum)?.codes() == relation.codes() {
                    atoms = fewer;
                    continue;
                }
            }
            i += 1;
        }
    }
    Ok(Expressibility::Formula(Formula::with_variables(
        language, atoms, vars,
    )?))
}

pub fn rewrite_instance(instance: &RcspInstance, target: &ConstraintLanguage) -> Result<RcspInstance> {
    rewrite_instance_with(instance, target, &Limits::default())
}

/// Replaces every constraint by its expression over `target` (with equality
/// adjoined). Variables, start and target assignments are kept.
pub fn rewrite_instance_with(
    instance: &RcspInstance,
    target: &ConstraintLanguage,
    limits: &Limits,
) -> Result<RcspInstance> {
    let formula = instance.formula();
    let source = formula.language();
    source.domain().check_compatible(target.domain())?;
    let (target, _) = with_equality(target);

    let mut expressions: BTreeMap<&str, Option<Formula>> = BTreeMap::new();
    for (name, relation) in source.members() {
        let expr = if target.get(name) == Some(relation) {
            None
        } else {
            match express_check_with(relation, &target, limits)? {
                Expressibility::Formula(f) => Some(f),
                _ => return Err(Error::NotExpressible(name.clone())),
            }
        };
        expressions.insert(name, expr);
    }

    let mut constraints: Vec<Constraint> = Vec::new();
    let mut push = |c: Constraint| {
        if !constraints.contains(&c) {
            constraints.push(c);
        }
    };
    for c in formula.constraints() {
        match &expressions[c.relation.as_str()] {
            None => push(c.clone()),
            Some(expr) => {
                for atom in expr.constraints() {
                    let args: Vec<Term> = atom
                        .args
                        .iter()
                        .map(|a| match a {
                            Term::Const(v) => Term::Const(*v),
                            Term::Var(y) => {
                                let i = expr.variables().iter().position(|v| v == y).expect("own variable");
                                c.args[i].clone()
                            }
                        })
                        .collect();
                    if args.iter().all(|a| a.as_var().is_none()) {
                        let values: Vec<_> = args
                            .iter()
                            .map(|a| match a {
                                Term::Const(v) => *v,
                                Term::Var(_) => unreachable!(),
                            })
                            .collect();
                        if target.get(&atom.relation).is_some_and(|s| s.contains(&values)) {
                            continue;
                        }
                        return Err(Error::Invalid(format!(
                            "constraint {c} is unsatisfiable"
                        )));
                    }
                    push(Constraint::new(atom.relation.as_str(), args));
                }
            }
        }
    }

    let rewritten = Formula::with_variables(target, constraints, formula.variables().to_vec())?;
    if formula.domain().power(formula.num_variables()) <= limits.max_enum {
        let before = formula.solution_relation_with_cap(limits.max_enum)?;
        let after = rewritten.solution_relation_with_cap(limits.max_enum)?;
        if before.codes() != after.codes() {
            return Err(Error::Invalid("rewriting changed the solution set".into()));
        }
    }
    RcspInstance::new(rewritten, instance.start().clone(), instance.target().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::FiniteDomain;
    use crate::formula::parse_instance;

    fn clause(i: u32, j: u32) -> Relation {
        Relation::full(FiniteDomain::boolean(), 2)
            .unwrap()
            .filter(|t| t != [i, j])
    }

    fn two_sat() -> ConstraintLanguage {
        ConstraintLanguage::new(
            FiniteDomain::boolean(),
            [
                ("R00", clause(0, 0)),
                ("R01", clause(0, 1)),
                ("R10", clause(1, 0)),
                ("R11", clause(1, 1)),
            ],
        )
        .unwrap()
    }

    fn nae() -> Relation {
        Relation::full(FiniteDomain::boolean(), 3)
            .unwrap()
            .filter(|t| !(t == [0, 0, 0] || t == [1, 1, 1]))
    }

    fn language(name: &str, r: Relation) -> ConstraintLanguage {
        ConstraintLanguage::new(r.domain().clone(), [(name, r)]).unwrap()
    }

    #[test]
    fn single_solution_is_expressible_over_two_sat() {
        let r = Relation::new(FiniteDomain::boolean(), 3, [[1, 0, 1]]).unwrap();
        let Expressibility::Formula(f) = express_check(&r, &two_sat()).unwrap() else {
            panic!("expected a formula");
        };
        assert_eq!(f.solution_relation().unwrap().to_vec(), r.to_vec());
        assert_eq!(f.variables(), &["y1", "y2", "y3"]);
    }

    #[test]
    fn equality_is_always_available() {
        for d in 2..5 {
            let dom = FiniteDomain::new(d).unwrap();
            let lang = language("C", Relation::constant(dom.clone(), 0).unwrap());
            let Expressibility::Formula(f) = express_check(&Relation::diagonal(dom.clone()), &lang).unwrap()
            else {
                panic!()
            };
            assert_eq!(f.solution_relation().unwrap().to_vec(), Relation::diagonal(dom).to_vec());
        }
    }

    #[test]
    fn implication_from_or_is_not_expressible() {
        let or = clause(0, 0);
        let imp = clause(1, 0);
        match express_check(&imp, &language("OR", or)).unwrap() {
            Expressibility::NotExpressible { slack } => assert_eq!(slack, vec![Tuple::from([1, 0])]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_relation_by_convention() {
        let e = Relation::empty(FiniteDomain::boolean(), 2).unwrap();
        assert_eq!(express_check(&e, &two_sat()).unwrap(), Expressibility::EmptyRelation);
    }

    #[test]
    fn rewrite_implication_into_flipped_clause() {
        let text = "domain 2\nrel IMPL 2 { 0 0 ; 0 1 ; 1 1 }\ncst IMPL a b\ncst IMPL b c\nstart 0 0 0\ntarget 1 1 1\n";
        let inst = parse_instance(text).unwrap();
        let target = language("R01", clause(0, 1));
        let out = rewrite_instance(&inst, &target).unwrap();
        assert_eq!(out.formula().variables(), inst.formula().variables());
        assert!(out.formula().constraints().iter().all(|c| c.relation != "IMPL"));
        assert_eq!(
            out.formula().solution_relation().unwrap(),
            inst.formula().solution_relation().unwrap()
        );
        assert_eq!(out.start(), inst.start());
    }

    #[test]
    fn rewrite_into_superset_is_identity() {
        let text = "domain 2\nrel R01 2 { 0 0 ; 1 0 ; 1 1 }\ncst R01 a #1\ncst R01 b a\nstart 1 1\ntarget 1 1\n";
        let inst = parse_instance(text).unwrap();
        let out = rewrite_instance(&inst, &two_sat()).unwrap();
        assert_eq!(out.formula().constraints(), inst.formula().constraints());
    }

    #[test]
    fn nae_does_not_reduce_to_or() {
        let text = "domain 2\nrel NAE 3 { 0 0 1 ; 0 1 0 ; 0 1 1 ; 1 0 0 ; 1 0 1 ; 1 1 0 }\ncst NAE a b c\nstart 0 0 1\ntarget 0 1 0\n";
        let inst = parse_instance(text).unwrap();
        let mut target = language("OR", clause(0, 0));
        target
            .insert("eq".into(), Relation::diagonal(FiniteDomain::boolean()))
            .unwrap();
        assert_eq!(
            rewrite_instance(&inst, &target),
            Err(Error::NotExpressible("NAE".into()))
        );
        let e = rewrite_instance(&inst, &target).unwrap_err();
        assert_eq!(e.to_string(), "no \u{2227},=-reduction exists for NAE");
        assert!(matches!(
            express_check(&nae(), &target).unwrap(),
            Expressibility::NotExpressible { .. }
        ));
    }
}
