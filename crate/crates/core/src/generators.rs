//! Named relations and digraphs, and seeded random test data.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digraph::Digraph;
use crate::domain::{FiniteDomain, TotalOrder, Value};
use crate::error::{Error, Result};
use crate::formula::{Constraint, ConstraintLanguage, Formula, RcspInstance};
use crate::limits::Limits;
use crate::pattern::Term;
use crate::relation::{connected_components, Relation, Tuple};

/// Identifier of the pseudorandom generator, recorded in generated output.
pub const RNG_ALGORITHM: &str = "chacha8";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    MFamily(usize),
    CircularClique(u32, u32),
    TransitiveTournament { n: u32, reflexive: bool },
    C4Orientation(u8),
    /// The undirected cycle on `n` vertices, as a symmetric digraph.
    Cycle(u32),
    NamedBoolean(String),
    RandomMinClosed {
        domain: u32,
        arity: usize,
        seed: u64,
        density: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generated {
    Relation(Relation),
    Digraph(Digraph),
}

impl Generated {
    pub fn into_relation(self) -> Relation {
        match self {
            Generated::Relation(r) => r,
            Generated::Digraph(g) => g.into_arcs(),
        }
    }
}

pub fn gen(spec: &FamilySpec) -> Result<Generated> {
    Ok(match spec {
        FamilySpec::MFamily(r) => Generated::Relation(m_family(*r)?),
        FamilySpec::CircularClique(p, q) => Generated::Digraph(circular_clique(*p, *q)?),
        FamilySpec::TransitiveTournament { n, reflexive } => {
            let t = transitive_tournament(*n)?;
            Generated::Digraph(if *reflexive { t.reflexive_closure() } else { t })
        }
        FamilySpec::C4Orientation(which) => Generated::Digraph(c4_orientation(*which)?),
        FamilySpec::Cycle(n) => Generated::Digraph(cycle(*n)?),
        FamilySpec::NamedBoolean(name) => Generated::Relation(named_boolean(name)?),
        FamilySpec::RandomMinClosed {
            domain,
            arity,
            seed,
            density,
        } => Generated::Relation(gen_random_min_closed(
            &FiniteDomain::new(*domain)?,
            *arity,
            *seed,
            *density,
        )?),
    })
}

/// The tuples of the arity-`r` family in construction order: start from
/// `(0,1,0,1,..)`, flip coordinates `1, 2, .., r` in turn, then coordinate 1 again.
pub fn m_family_sequence(r: usize) -> Result<Vec<Tuple>> {
    if r < 3 {
        return Err(Error::Invalid(format!("the M family needs r >= 3, got {r}")));
    }
    let mut u: Vec<Value> = (0..r).map(|i| (i % 2) as Value).collect();
    let mut out = vec![Tuple::new(u.clone())];
    for i in 0..r {
        u[i] ^= 1;
        out.push(Tuple::new(u.clone()));
    }
    u[0] ^= 1;
    out.push(Tuple::new(u));
    Ok(out)
}

pub fn m_family(r: usize) -> Result<Relation> {
    Relation::new(FiniteDomain::boolean(), r, m_family_sequence(r)?)
}

/// Vertices `0..p`, edges between `i, j` with `q <= |i-j| <= p-q`.
pub fn circular_clique(p: u32, q: u32) -> Result<Digraph> {
    if q == 0 || p < 2 * q {
        return Err(Error::Invalid(format!(
            "circular clique needs p >= 2q > 0, got p={p} q={q}"
        )));
    }
    let mut edges = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            let gap = j - i;
            if q <= gap && gap <= p - q {
                edges.push((i, j));
            }
        }
    }
    Digraph::symmetric(p, &edges)
}

/// Arcs `(i, j)` for `i < j`.
pub fn transitive_tournament(n: u32) -> Result<Digraph> {
    if n < 3 {
        return Err(Error::Invalid(format!("tournament needs n >= 3, got {n}")));
    }
    let arcs: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    Digraph::from_arcs(n, &arcs)
}

/// The two orientations of the 4-cycle with algebraic girth zero.
pub fn c4_orientation(which: u8) -> Result<Digraph> {
    match which {
        1 => Digraph::from_arcs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]),
        2 => Digraph::from_arcs(4, &[(0, 1), (0, 2), (3, 1), (3, 2)]),
        _ => Err(Error::Invalid(format!("orientation must be 1 or 2, got {which}"))),
    }
}

pub fn cycle(n: u32) -> Result<Digraph> {
    if n < 3 {
        return Err(Error::Invalid(format!("cycle needs n >= 3, got {n}")));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Digraph::symmetric(n, &edges)
}

/// OR, NAND, NAE, IMPL, EQ, NEQ and the 2-clauses `Rij = {0,1}^2 \ {(i,j)}`.
pub fn named_boolean(name: &str) -> Result<Relation> {
    let d = FiniteDomain::boolean();
    let pairs = Relation::full(d.clone(), 2)?;
    Ok(match name.to_ascii_uppercase().as_str() {
        "OR" => pairs.filter(|t| t != [0, 0]),
        "NAND" => pairs.filter(|t| t != [1, 1]),
        "IMPL" => pairs.filter(|t| t != [1, 0]),
        "NAE" => Relation::full(d, 3)?.filter(|t| !(t == [0, 0, 0] || t == [1, 1, 1])),
        "EQ" => Relation::diagonal(d),
        "NEQ" => Relation::inequality(d),
        other => {
            let clause = other
                .strip_prefix('R')
                .filter(|s| s.len() == 2)
                .and_then(|s| {
                    let b = s.as_bytes();
                    match (b[0], b[1]) {
                        (i @ b'0'..=b'1', j @ b'0'..=b'1') => {
                            Some(((i - b'0') as Value, (j - b'0') as Value))
                        }
                        _ => None,
                    }
                });
            let Some((i, j)) = clause else {
                return Err(Error::Invalid(format!("unknown Boolean relation {name}")));
            };
            pairs.filter(|t| t != [i, j])
        }
    })
}

/// Smallest superset closed under coordinatewise `min` for `order`.
pub fn min_closure(relation: &Relation, order: &TotalOrder) -> Result<Relation> {
    let order = order.clone().for_domain(relation.domain())?;
    let mut set: BTreeSet<Tuple> = relation.tuples().collect();
    let mut frontier: Vec<Tuple> = set.iter().cloned().collect();
    while let Some(a) = frontier.pop() {
        let snapshot: Vec<Tuple> = set.iter().cloned().collect();
        for b in snapshot {
            let m: Tuple = a.iter().zip(b.iter()).map(|(&x, &y)| order.min(x, y)).collect::<Vec<_>>().into();
            if set.insert(m.clone()) {
                frontier.push(m);
            }
        }
    }
    Relation::new(relation.domain().clone(), relation.arity(), set)
}

/// Each tuple of `D^r` is kept with probability `density`; the sample is
/// closed under `min` for the natural order. An empty sample becomes the
/// all-least tuple.
pub fn gen_random_min_closed(
    domain: &FiniteDomain,
    arity: usize,
    seed: u64,
    density: f64,
) -> Result<Relation> {
    random_min_closed(domain, arity, density, &mut rng(seed))
}

pub fn random_min_closed(
    domain: &FiniteDomain,
    arity: usize,
    density: f64,
    rng: &mut impl Rng,
) -> Result<Relation> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Invalid(format!("density must lie in [0,1], got {density}")));
    }
    let full = Relation::full(domain.clone(), arity)?;
    let mut sample = full.filter(|_| rng.random_bool(density));
    if sample.is_empty() {
        sample = Relation::new(domain.clone(), arity, [vec![0; arity]])?;
    }
    min_closure(&sample, &TotalOrder::natural(domain))
}

/// Uniformly random relation (possibly empty) over `D^r`.
pub fn random_relation(domain: &FiniteDomain, arity: usize, rng: &mut impl Rng) -> Result<Relation> {
    Ok(Relation::full(domain.clone(), arity)?.filter(|_| rng.random_bool(0.5)))
}

/// Shape of random reconfiguration instances.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceParams {
    pub domain_sizes: Vec<u32>,
    pub max_vars: usize,
    pub max_constraints: usize,
    pub max_arity: usize,
    pub max_relations: usize,
    /// Probability that an instance is resampled until its solution graph is
    /// disconnected, with start and target in different components.
    pub split_bias: f64,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            domain_sizes: vec![2, 3],
            max_vars: 8,
            max_constraints: 12,
            max_arity: 3,
            max_relations: 3,
            split_bias: 0.5,
        }
    }
}

/// A random instance over a language of min-closed relations, with start and
/// target drawn uniformly from the solutions.
pub fn random_min_closed_instance(params: &InstanceParams, rng: &mut impl Rng) -> Result<RcspInstance> {
    if params.domain_sizes.is_empty() || params.max_vars == 0 || params.max_constraints == 0 {
        return Err(Error::Invalid("empty instance parameters".into()));
    }
    let limits = Limits::default();
    let mut want_split = params.max_vars >= 2 && rng.random_bool(params.split_bias);
    let mut attempts = 0u32;
    loop {
        attempts += 1;
        if attempts > 10_000 {
            want_split = false;
        }
        let d = params.domain_sizes[rng.random_range(0..params.domain_sizes.len())];
        let domain = FiniteDomain::new(d)?;
        let n = rng.random_range(1..=params.max_vars);
        let k = rng.random_range(1..=params.max_relations.max(1));
        let mut members = Vec::new();
        for i in 0..k {
            let arity = rng.random_range(1..=params.max_arity.min(n).max(1));
            let density = rng.random_range(0.2..0.9);
            members.push((format!("R{i}"), random_min_closed(&domain, arity, density, rng)?));
        }
        let language = ConstraintLanguage::new(domain, members.clone())?;
        let m = rng.random_range(1..=params.max_constraints);
        let constraints: Vec<Constraint> = (0..m)
            .map(|_| {
                let (name, r) = &members[rng.random_range(0..members.len())];
                let args = (0..r.arity())
                    .map(|_| {
                        if rng.random_bool(0.1) {
                            Term::Const(rng.random_range(0..d))
                        } else {
                            Term::Var(format!("x{}", rng.random_range(1..=n)))
                        }
                    })
                    .collect();
                Constraint::new(name.as_str(), args)
            })
            .collect();
        let Ok(formula) = Formula::new(language, constraints) else {
            continue;
        };
        let solutions = formula.solution_relation_with_cap(limits.max_enum)?;
        if solutions.is_empty() {
            continue;
        }
        let components = connected_components(&solutions);
        if want_split && components.len() < 2 {
            continue;
        }
        let home = rng.random_range(0..components.len());
        let members = components[home].to_vec();
        let s = members[rng.random_range(0..members.len())].clone();
        let pool: Vec<Tuple> = if want_split {
            let mut other = rng.random_range(0..components.len() - 1);
            if other >= home {
                other += 1;
            }
            components[other].to_vec()
        } else {
            solutions.to_vec()
        };
        let t = pool[rng.random_range(0..pool.len())].clone();
        return RcspInstance::new(formula, s, t);
    }
}
