//! Searching for orders whose ordered partial Maltsev operation preserves a language.

use crate::domain::TotalOrder;
use crate::error::{Error, Result};
use crate::formula::ConstraintLanguage;
use crate::limits::Limits;
use crate::partial_ops::{language_invariant, make_min, make_ordered_maltsev, Violation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderSearch {
    /// The first accepted order, if any.
    pub found: Option<TotalOrder>,
    /// Orders tried before `found` (or all of them), each with the escape that rejected it.
    pub rejected: Vec<(TotalOrder, Violation)>,
}

/// `Ok(None)` when the ordered partial Maltsev operation for `order` preserves every member.
pub fn check_order(language: &ConstraintLanguage, order: &TotalOrder) -> Result<Option<Violation>> {
    let m = make_ordered_maltsev(language.domain(), order)?;
    language_invariant(language, &m)
}

pub fn find_ordered_maltsev_order(language: &ConstraintLanguage) -> Result<OrderSearch> {
    find_ordered_maltsev_order_with(language, &Limits::default())
}

/// Scans all orders in lexicographic order of their permutations.
pub fn find_ordered_maltsev_order_with(
    language: &ConstraintLanguage,
    limits: &Limits,
) -> Result<OrderSearch> {
    let d = language.domain().size();
    if d > limits.order_domain {
        return Err(Error::GuardExceeded(format!(
            "{d}! orders exceed the order-search guard (|D| <= {})",
            limits.order_domain
        )));
    }
    let mut rejected = Vec::new();
    let mut order = Some(TotalOrder::natural(language.domain()));
    while let Some(o) = order {
        match check_order(language, &o)? {
            None => {
                return Ok(OrderSearch {
                    found: Some(o),
                    rejected,
                })
            }
            Some(v) => {
                order = o.next_permutation();
                rejected.push((o, v));
            }
        }
    }
    Ok(OrderSearch {
        found: None,
        rejected,
    })
}

/// First member not closed under binary `min` with respect to `order`.
pub fn min_closure_violation(
    language: &ConstraintLanguage,
    order: &TotalOrder,
) -> Result<Option<Violation>> {
    let min = make_min(language.domain(), order)?;
    language_invariant(language, &min)
}

pub fn is_min_closed(language: &ConstraintLanguage, order: &TotalOrder) -> Result<bool> {
    Ok(min_closure_violation(language, order)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::FiniteDomain;
    use crate::relation::{Relation, Tuple};

    fn language(name: &str, r: Relation) -> ConstraintLanguage {
        ConstraintLanguage::new(r.domain().clone(), [(name, r)]).unwrap()
    }

    fn implication() -> Relation {
        Relation::new(FiniteDomain::boolean(), 2, [[0, 0], [0, 1], [1, 1]]).unwrap()
    }

    #[test]
    fn inequality_on_three_elements_has_no_order() {
        let k3 = Relation::inequality(FiniteDomain::new(3).unwrap());
        let search = find_ordered_maltsev_order(&language("neq", k3)).unwrap();
        assert_eq!(search.found, None);
        assert_eq!(search.rejected.len(), 6);
    }

    #[test]
    fn implication_accepts_the_natural_order() {
        let search = find_ordered_maltsev_order(&language("IMPL", implication())).unwrap();
        assert_eq!(search.found, Some(TotalOrder::parse("0,1").unwrap()));
        assert!(search.rejected.is_empty());
    }

    #[test]
    fn min_closure() {
        let natural = TotalOrder::parse("0,1").unwrap();
        assert!(is_min_closed(&language("IMPL", implication()), &natural).unwrap());
        let or = Relation::new(FiniteDomain::boolean(), 2, [[0, 1], [1, 0], [1, 1]]).unwrap();
        let v = min_closure_violation(&language("OR", or), &natural)
            .unwrap()
            .unwrap();
        assert_eq!(v.counterexample.rows, vec![Tuple::from([0, 1]), Tuple::from([1, 0])]);
        assert_eq!(v.counterexample.image, Tuple::from([0, 0]));
        let d = FiniteDomain::new(4).unwrap();
        let any = TotalOrder::parse("2,0,3,1").unwrap();
        assert!(is_min_closed(&language("eq", Relation::diagonal(d)), &any).unwrap());
    }

    #[test]
    fn guard() {
        let d = FiniteDomain::new(9).unwrap();
        let lang = language("eq", Relation::diagonal(d));
        assert!(matches!(
            find_ordered_maltsev_order(&lang),
            Err(Error::GuardExceeded(_))
        ));
    }
}
