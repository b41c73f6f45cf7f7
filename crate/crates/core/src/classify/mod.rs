//! Classifiers for relations, languages and digraphs.

pub mod boolean;
pub mod digraph;
pub mod express;
pub mod order;

use std::fmt;

pub use boolean::{
    admits_total_order, dual, is_bijunctive, is_cw_bijunctive, is_safely_cw_bijunctive,
    nand_free, or_free, safely_nand_free, safely_or_free, Orientation, PropertyCheck, Sign,
    Witness,
};
pub use digraph::{
    is_k_rectangular, is_rectangular, is_totally_rectangular, k_rectangle_violation,
    rectangle_violation, Certificate, TotalRectangularity,
};
pub use express::{
    express_check, express_check_with, rewrite_instance, rewrite_instance_with, Expressibility,
};
pub use order::{
    check_order, find_ordered_maltsev_order, find_ordered_maltsev_order_with, is_min_closed,
    OrderSearch,
};

use crate::error::Result;
use crate::formula::ConstraintLanguage;
use crate::limits::Limits;

/// Per-relation flags of the Boolean classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub name: String,
    pub or_free: PropertyCheck,
    pub nand_free: PropertyCheck,
    pub safely_or_free: PropertyCheck,
    pub safely_nand_free: PropertyCheck,
    pub cw_bijunctive: PropertyCheck,
    pub safely_cw_bijunctive: PropertyCheck,
}

impl RelationReport {
    /// `(key, check)` pairs in report order.
    pub fn checks(&self) -> [(&'static str, &PropertyCheck); 6] {
        [
            ("or_free", &self.or_free),
            ("nand_free", &self.nand_free),
            ("safely_or_free", &self.safely_or_free),
            ("safely_nand_free", &self.safely_nand_free),
            ("cw_bijunctive", &self.cw_bijunctive),
            ("safely_cw_bijunctive", &self.safely_cw_bijunctive),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Complexity {
    P,
    PspaceComplete,
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Complexity::P => "P",
            Complexity::PspaceComplete => "PSPACE-complete",
        })
    }
}

/// The property shared by every member of a (safely) tight language.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tightness {
    CwBijunctive,
    OrFree,
    NandFree,
}

impl fmt::Display for Tightness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tightness::CwBijunctive => "cw_bijunctive",
            Tightness::OrFree => "or_free",
            Tightness::NandFree => "nand_free",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub relations: Vec<RelationReport>,
    pub tight: Option<Tightness>,
    pub safely_tight: Option<Tightness>,
    pub dichotomy: Complexity,
}

impl Verdict {
    pub fn is_tight(&self) -> bool {
        self.tight.is_some()
    }

    pub fn is_safely_tight(&self) -> bool {
        self.safely_tight.is_some()
    }

    /// Machine-readable `key=value` lines.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for r in &self.relations {
            for (key, check) in r.checks() {
                out.push_str(&format!("relation.{}.{key}={}\n", r.name, check.holds));
                if let Some(w) = &check.witness {
                    out.push_str(&format!("relation.{}.{key}.witness={w}\n", r.name));
                }
            }
        }
        out.push_str(&format!("tight={}\n", self.is_tight()));
        if let Some(t) = self.tight {
            out.push_str(&format!("tight_via={t}\n"));
        }
        out.push_str(&format!("safely_tight={}\n", self.is_safely_tight()));
        if let Some(t) = self.safely_tight {
            out.push_str(&format!("safely_tight_via=safely_{t}\n"));
        }
        out.push_str(&format!("dichotomy={}\n", self.dichotomy));
        out
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.relations {
            writeln!(f, "relation {}", r.name)?;
            for (key, check) in r.checks() {
                write!(f, "  {key}={}", check.holds)?;
                if let Some(w) = &check.witness {
                    write!(f, "  ({w})")?;
                }
                writeln!(f)?;
            }
        }
        writeln!(f, "tight={}", self.is_tight())?;
        writeln!(
            f,
            "safely_tight={} dichotomy={}",
            self.is_safely_tight(),
            self.dichotomy
        )
    }
}

pub fn classify_relation(
    name: &str,
    relation: &crate::relation::Relation,
    limits: &Limits,
) -> Result<RelationReport> {
    Ok(RelationReport {
        name: name.to_string(),
        or_free: boolean::or_free(relation)?,
        nand_free: boolean::nand_free(relation)?,
        safely_or_free: boolean::safely_or_free_with(relation, limits)?,
        safely_nand_free: boolean::safely_nand_free_with(relation, limits)?,
        cw_bijunctive: boolean::is_cw_bijunctive(relation)?,
        safely_cw_bijunctive: boolean::is_safely_cw_bijunctive_with(relation, limits)?,
    })
}

pub fn dichotomy_verdict(language: &ConstraintLanguage) -> Result<Verdict> {
    dichotomy_verdict_with(language, &Limits::default())
}

/// Classifies a Boolean language: polynomial exactly when safely tight.
pub fn dichotomy_verdict_with(language: &ConstraintLanguage, limits: &Limits) -> Result<Verdict> {
    let relations = language
        .members()
        .map(|(name, r)| classify_relation(name, r, limits))
        .collect::<Result<Vec<_>>>()?;
    let all = |pick: fn(&RelationReport) -> &PropertyCheck| relations.iter().all(|r| pick(r).holds);
    let first = |cw: bool, or: bool, nand: bool| {
        if cw {
            Some(Tightness::CwBijunctive)
        } else if or {
            Some(Tightness::OrFree)
        } else if nand {
            Some(Tightness::NandFree)
        } else {
            None
        }
    };
    let tight = first(
        all(|r| &r.cw_bijunctive),
        all(|r| &r.or_free),
        all(|r| &r.nand_free),
    );
    let safely_tight = first(
        all(|r| &r.safely_cw_bijunctive),
        all(|r| &r.safely_or_free),
        all(|r| &r.safely_nand_free),
    );
    let dichotomy = if safely_tight.is_some() {
        Complexity::P
    } else {
        Complexity::PspaceComplete
    };
    Ok(Verdict {
        relations,
        tight,
        safely_tight,
        dichotomy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::FiniteDomain;
    use crate::relation::Relation;

    fn clause(i: u32, j: u32) -> Relation {
        Relation::full(FiniteDomain::boolean(), 2)
            .unwrap()
            .filter(|t| t != [i, j])
    }

    fn nae() -> Relation {
        Relation::full(FiniteDomain::boolean(), 3)
            .unwrap()
            .filter(|t| !(t == [0, 0, 0] || t == [1, 1, 1]))
    }

    fn verdict(members: Vec<(&str, Relation)>) -> Verdict {
        dichotomy_verdict(&ConstraintLanguage::new(FiniteDomain::boolean(), members).unwrap()).unwrap()
    }

    #[test]
    fn implication_is_polynomial() {
        let v = verdict(vec![("IMPL", clause(1, 0))]);
        assert!(v.relations[0].safely_or_free.holds);
        assert_eq!(v.dichotomy, Complexity::P);
    }

    #[test]
    fn nae_is_hard() {
        let v = verdict(vec![("NAE", nae())]);
        let r = &v.relations[0];
        assert!(!r.safely_or_free.holds && !r.safely_nand_free.holds && !r.safely_cw_bijunctive.holds);
        assert_eq!(v.safely_tight, None);
        assert_eq!(v.dichotomy, Complexity::PspaceComplete);
        assert!(v.to_string().contains("safely_tight=false dichotomy=PSPACE-complete"));
    }

    #[test]
    fn or_and_nand_together_via_bijunctivity() {
        let v = verdict(vec![("OR", clause(0, 0)), ("NAND", clause(1, 1))]);
        assert_eq!(v.safely_tight, Some(Tightness::CwBijunctive));
        assert_eq!(v.dichotomy, Complexity::P);
        assert!(v.to_kv().contains("dichotomy=P\n"));
    }

    #[test]
    fn safe_flags_imply_plain_flags() {
        let full = Relation::full(FiniteDomain::boolean(), 3).unwrap();
        for mask in 1u32..256 {
            let r = full.filter(|t| mask >> (t[0] * 4 + t[1] * 2 + t[2]) & 1 == 1);
            let rep = classify_relation("R", &r, &Limits::default()).unwrap();
            assert!(!rep.safely_or_free.holds || rep.or_free.holds);
            assert!(!rep.safely_nand_free.holds || rep.nand_free.holds);
            assert!(!rep.safely_cw_bijunctive.holds || rep.cw_bijunctive.holds);
        }
    }
}
