//! Deciding whether two solutions are connected in the solution graph.
//!
//! The greedy solver descends both endpoints to a locally minimal solution
//! and compares them; it is exact when the language is preserved by the
//! ordered partial Maltsev operation of the chosen order. The BFS oracle
//! explores the solution graph directly.

use std::collections::VecDeque;
use std::fmt;

use crate::classify::order::{check_order, find_ordered_maltsev_order_with};
use crate::domain::{TotalOrder, Value};
use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula, RcspInstance};
use crate::limits::Limits;
use crate::relation::{connected_components, Relation, Tuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
}

impl Answer {
    fn from_bool(b: bool) -> Self {
        if b {
            Answer::Yes
        } else {
            Answer::No
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Greedy,
    Bfs,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Greedy => "greedy",
            Method::Bfs => "bfs",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub answer: Answer,
    pub method: Method,
    /// Order used by the greedy solver.
    pub order: Option<TotalOrder>,
    pub s_min: Option<Tuple>,
    pub t_min: Option<Tuple>,
    pub s_descent: Option<usize>,
    pub t_descent: Option<usize>,
    /// Solutions visited by the oracle.
    pub visited: Option<usize>,
    /// A shortest reconfiguration sequence, when requested and one exists.
    pub path: Option<Vec<Tuple>>,
    /// Greedy was run without a verified order, so the answer may be wrong.
    pub heuristic: bool,
}

impl SolveResult {
    /// `key=value` lines, followed by the path (one assignment per line).
    pub fn report(&self) -> String {
        let mut out = format!("answer={} method={}\n", self.answer, self.method);
        if let Some(o) = &self.order {
            out.push_str(&format!("order={o}\n"));
        }
        if let (Some(s), Some(t)) = (&self.s_min, &self.t_min) {
            out.push_str(&format!("s_min={s}\nt_min={t}\n"));
        }
        if let (Some(s), Some(t)) = (self.s_descent, self.t_descent) {
            out.push_str(&format!("s_descent={s}\nt_descent={t}\n"));
        }
        if let Some(v) = self.visited {
            out.push_str(&format!("visited={v}\n"));
        }
        if self.method == Method::Greedy {
            out.push_str(&format!("heuristic={}\n", self.heuristic));
        }
        if let Some(path) = &self.path {
            out.push_str(&format!("path_length={}\n", path.len().saturating_sub(1)));
            for step in path {
                let vals: Vec<String> = step.iter().map(|v| v.to_string()).collect();
                out.push_str(&vals.join(" "));
                out.push('\n');
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descent {
    pub minimum: Assignment,
    pub length: usize,
}

/// Repeatedly lowers one variable to a smaller value keeping the formula
/// satisfied, until no such move exists. Variables are scanned in order and
/// values tried least first; the scan restarts after every move.
pub fn descend_to_minimum(formula: &Formula, order: &TotalOrder, start: &[Value]) -> Result<Descent> {
    let order = order.clone().for_domain(formula.domain())?;
    if !formula.satisfies(start)? {
        return Err(Error::NotASolution("the assignment"));
    }
    let mut values = start.to_vec();
    let mut length = 0;
    'scan: loop {
        for i in 0..values.len() {
            let current = values[i];
            for &lower in order.below(current) {
                values[i] = lower;
                if formula.holds_around(i, &values) {
                    length += 1;
                    continue 'scan;
                }
            }
            values[i] = current;
        }
        break;
    }
    Ok(Descent {
        minimum: Tuple::new(values),
        length,
    })
}

/// No satisfying neighbour is smaller in the one coordinate where it differs.
pub fn is_locally_minimal(formula: &Formula, order: &TotalOrder, a: &[Value]) -> bool {
    let mut values = a.to_vec();
    for i in 0..values.len() {
        let current = values[i];
        for &lower in order.below(current) {
            values[i] = lower;
            if formula.holds_around(i, &values) {
                return false;
            }
        }
        values[i] = current;
    }
    true
}

/// Greedy descent from both endpoints. The language is checked against the
/// order; when the check fails (or is too large to run) the result is
/// flagged as heuristic.
pub fn solve_greedy(instance: &RcspInstance, order: &TotalOrder) -> Result<SolveResult> {
    let formula = instance.formula();
    let verified = matches!(check_order(formula.language(), order), Ok(None));
    let s = descend_to_minimum(formula, order, instance.start())?;
    let t = descend_to_minimum(formula, order, instance.target())?;
    Ok(SolveResult {
        answer: Answer::from_bool(s.minimum == t.minimum),
        method: Method::Greedy,
        order: Some(order.clone()),
        s_min: Some(s.minimum),
        t_min: Some(t.minimum),
        s_descent: Some(s.length),
        t_descent: Some(t.length),
        visited: None,
        path: None,
        heuristic: !verified,
    })
}

fn encode(values: &[Value], d: u32) -> usize {
    values.iter().fold(0usize, |acc, &v| acc * d as usize + v as usize)
}

fn decode(mut code: usize, d: u32, n: usize) -> Vec<Value> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = (code % d as usize) as Value;
        code /= d as usize;
    }
    out
}

pub fn solve_bfs_oracle(instance: &RcspInstance, want_path: bool) -> Result<SolveResult> {
    solve_bfs_oracle_with(instance, want_path, &Limits::default())
}

/// Breadth-first search from the start over solutions at Hamming distance 1.
pub fn solve_bfs_oracle_with(
    instance: &RcspInstance,
    want_path: bool,
    limits: &Limits,
) -> Result<SolveResult> {
    let formula = instance.formula();
    let n = formula.num_variables();
    let size = formula.domain().power(n);
    if size > limits.max_enum {
        return Err(Error::TooLargeForEnumeration {
            size,
            cap: limits.max_enum,
        });
    }
    let d = formula.domain().size();
    const UNSEEN: u32 = u32::MAX;
    let mut parent = vec![UNSEEN; size as usize];
    let start = encode(instance.start(), d);
    let goal = encode(instance.target(), d);
    parent[start] = start as u32;
    let mut queue = VecDeque::from([start]);
    let mut visited = 1usize;
    let mut values = vec![0; n];
    while let Some(code) = queue.pop_front() {
        if code == goal {
            break;
        }
        values.copy_from_slice(&decode(code, d, n));
        for i in 0..n {
            let current = values[i];
            for v in 0..d {
                if v == current {
                    continue;
                }
                values[i] = v;
                let next = encode(&values, d);
                if parent[next] == UNSEEN && formula.holds_around(i, &values) {
                    parent[next] = code as u32;
                    visited += 1;
                    queue.push_back(next);
                }
            }
            values[i] = current;
        }
    }
    let reached = parent[goal] != UNSEEN;
    let path = (want_path && reached).then(|| {
        let mut path = vec![Tuple::new(decode(goal, d, n))];
        let mut at = goal;
        while at != start {
            at = parent[at] as usize;
            path.push(Tuple::new(decode(at, d, n)));
        }
        path.reverse();
        path
    });
    Ok(SolveResult {
        answer: Answer::from_bool(reached),
        method: Method::Bfs,
        order: None,
        s_min: None,
        t_min: None,
        s_descent: None,
        t_descent: None,
        visited: Some(visited),
        path,
        heuristic: false,
    })
}

pub fn solve_auto(instance: &RcspInstance) -> Result<SolveResult> {
    solve_auto_with(instance, &Limits::default())
}

/// Greedy under the first order that preserves the language, else the oracle.
pub fn solve_auto_with(instance: &RcspInstance, limits: &Limits) -> Result<SolveResult> {
    let formula = instance.formula();
    let found = match find_ordered_maltsev_order_with(formula.language(), limits) {
        Ok(search) => search.found,
        Err(e) if e.kind() == crate::error::ErrorKind::Guard => None,
        Err(e) => return Err(e),
    };
    if let Some(order) = found {
        return solve_greedy(instance, &order);
    }
    let size = formula.domain().power(formula.num_variables());
    if size <= limits.max_enum {
        return solve_bfs_oracle_with(instance, false, limits);
    }
    Err(Error::NoMethod(format!(
        "no ordered partial Maltsev order preserves the language and |D|^n = {size} exceeds the enumeration cap {}",
        limits.max_enum
    )))
}

/// One connected component of the solution graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentStats {
    pub size: usize,
    pub least: Tuple,
    /// Members with no smaller satisfying neighbour under the order.
    pub local_minima: Vec<Tuple>,
    /// Largest shortest-path distance inside the component.
    pub diameter: usize,
}

/// Enumerates the solution graph and measures each component.
pub fn analyze_solution_graph(
    formula: &Formula,
    order: &TotalOrder,
    limits: &Limits,
) -> Result<Vec<ComponentStats>> {
    let order = order.clone().for_domain(formula.domain())?;
    let solutions = formula.solution_relation_with_cap(limits.max_enum)?;
    connected_components(&solutions)
        .into_iter()
        .map(|c| component_stats(formula, &order, &c))
        .collect()
}

fn component_stats(formula: &Formula, order: &TotalOrder, component: &Relation) -> Result<ComponentStats> {
    let members = component.to_vec();
    let local_minima = members
        .iter()
        .filter(|t| is_locally_minimal(formula, order, t))
        .cloned()
        .collect();
    // adjacency by index; members are sorted, so neighbours are found by binary search
    let mut scratch = Vec::new();
    let adjacency: Vec<Vec<u32>> = component
        .codes()
        .iter()
        .map(|&code| {
            component.neighbor_codes(code, &mut scratch);
            scratch
                .iter()
                .map(|c| component.codes().binary_search(c).expect("member") as u32)
                .collect()
        })
        .collect();
    let n = members.len();
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    let mut diameter = 0u32;
    for source in 0..n {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            diameter = diameter.max(dist[u]);
            for &v in &adjacency[u] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = dist[u] + 1;
                    queue.push_back(v as usize);
                }
            }
        }
    }
    Ok(ComponentStats {
        size: n,
        least: members[0].clone(),
        local_minima,
        diameter: diameter as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_instance;

    const IMPL: &str = "domain 2\nrel IMPL 2 { 0 0 ; 0 1 ; 1 1 }\ncst IMPL x1 x2\n";
    const NEQ: &str = "domain 2\nrel neq 2 { 0 1 ; 1 0 }\ncst neq x1 x2\n";

    fn inst(base: &str, s: &str, t: &str) -> RcspInstance {
        parse_instance(&format!("{base}start {s}\ntarget {t}\n")).unwrap()
    }

    fn natural() -> TotalOrder {
        TotalOrder::parse("0,1").unwrap()
    }

    #[test]
    fn descent_on_implication() {
        let i = inst(IMPL, "1 1", "1 1");
        let d = descend_to_minimum(i.formula(), &natural(), &[1, 1]).unwrap();
        assert_eq!(d.minimum, Tuple::from([0, 0]));
        assert_eq!(d.length, 2);
        let d = descend_to_minimum(i.formula(), &natural(), &[0, 0]).unwrap();
        assert_eq!(d.length, 0);
    }

    #[test]
    fn descent_on_inequality_stays() {
        let i = inst(NEQ, "0 1", "1 0");
        let d = descend_to_minimum(i.formula(), &natural(), &[0, 1]).unwrap();
        assert_eq!(d.minimum, Tuple::from([0, 1]));
        assert_eq!(d.length, 0);
        assert!(descend_to_minimum(i.formula(), &natural(), &[1, 1]).is_err());
    }

    #[test]
    fn greedy_and_oracle_agree_on_examples() {
        for (i, expected) in [
            (inst(IMPL, "0 0", "1 1"), Answer::Yes),
            (inst(NEQ, "0 1", "1 0"), Answer::No),
            (inst(NEQ, "0 1", "0 1"), Answer::Yes),
        ] {
            let g = solve_greedy(&i, &natural()).unwrap();
            let b = solve_bfs_oracle(&i, true).unwrap();
            assert_eq!(g.answer, expected);
            assert_eq!(b.answer, expected);
            assert!(!g.heuristic);
        }
    }

    #[test]
    fn oracle_path_is_valid() {
        let i = inst(IMPL, "0 0", "1 1");
        let r = solve_bfs_oracle(&i, true).unwrap();
        let path = r.path.unwrap();
        assert_eq!(path.first().unwrap(), i.start());
        assert_eq!(path.last().unwrap(), i.target());
        assert_eq!(path.len(), 3);
        for w in path.windows(2) {
            assert_eq!(crate::relation::hamming_distance(&w[0], &w[1]).unwrap(), 1);
        }
        for p in &path {
            assert!(i.formula().satisfies(p).unwrap());
        }
    }

    #[test]
    fn m3_is_connected() {
        let text = "domain 2\nrel M 3 { 0 1 0 ; 1 1 0 ; 1 0 0 ; 1 0 1 ; 0 0 1 }\ncst M a b c\n";
        let r = solve_bfs_oracle(&inst(text, "0 1 0", "0 0 1"), false).unwrap();
        assert_eq!(r.answer, Answer::Yes);
    }

    #[test]
    fn auto_dispatch() {
        let r = solve_auto(&inst(IMPL, "0 0", "1 1")).unwrap();
        assert_eq!(r.method, Method::Greedy);
        let nae = "domain 2\nrel NAE 3 { 0 0 1 ; 0 1 0 ; 0 1 1 ; 1 0 0 ; 1 0 1 ; 1 1 0 }\ncst NAE a b c\n";
        let r = solve_auto(&inst(nae, "0 0 1", "1 1 0")).unwrap();
        assert_eq!(r.method, Method::Bfs);
        assert_eq!(r.answer, Answer::Yes);
    }

    #[test]
    fn auto_without_method() {
        let mut text = String::from("domain 2\nrel NAE 3 { 0 0 1 ; 0 1 0 ; 0 1 1 ; 1 0 0 ; 1 0 1 ; 1 1 0 }\n");
        for i in 0..10 {
            text.push_str(&format!("cst NAE v{} v{} v{}\n", 3 * i, 3 * i + 1, 3 * i + 2));
        }
        let s = ["0 0 1"; 10].join(" ");
        let e = solve_auto(&inst(&text, &s, &s)).unwrap_err();
        assert!(matches!(e, Error::NoMethod(_)));
    }

    #[test]
    fn heuristic_flag() {
        let i = inst(NEQ, "0 1", "1 0");
        // neq on {0,1} is preserved by both ordered Maltsev operations
        assert!(!solve_greedy(&i, &natural()).unwrap().heuristic);
        let or = "domain 2\nrel OR 2 { 0 1 ; 1 0 ; 1 1 }\ncst OR a b\n";
        assert!(solve_greedy(&inst(or, "0 1", "1 0"), &natural()).unwrap().heuristic);
    }

    #[test]
    fn component_statistics() {
        let i = inst(IMPL, "0 0", "1 1");
        let stats = analyze_solution_graph(i.formula(), &natural(), &Limits::default()).unwrap();
        assert_eq!(stats.len(), 1);
        assert_eq!(stats[0].size, 3);
        assert_eq!(stats[0].diameter, 2);
        assert_eq!(stats[0].local_minima, vec![Tuple::from([0, 0])]);
    }
}
