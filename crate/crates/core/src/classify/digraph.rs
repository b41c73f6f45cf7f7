//! Rectangularity of digraphs, for one step, `k` steps and all step counts.

use std::fmt;

use crate::digraph::{BitSet, Digraph};
use crate::domain::Value;
use crate::error::{Error, Result};

/// Arcs `(u,w), (v,w), (v,x)` present while `(u,x)` is missing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RectangleWitness {
    pub u: Value,
    pub w: Value,
    pub v: Value,
    pub x: Value,
}

impl fmt::Display for RectangleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u={} w={} v={} x={}", self.u, self.w, self.v, self.x)
    }
}

/// `None` when rectangular; otherwise the first witness in `u, w, v, x` order.
pub fn rectangle_violation(g: &Digraph) -> Option<RectangleWitness> {
    let out: Vec<Vec<Value>> = g.vertices().map(|u| g.out_neighbors(u)).collect();
    let into: Vec<Vec<Value>> = g
        .vertices()
        .map(|w| g.vertices().filter(|&v| g.has_arc(v, w)).collect())
        .collect();
    for u in g.vertices() {
        for &w in &out[u as usize] {
            for &v in &into[w as usize] {
                for &x in &out[v as usize] {
                    if !g.has_arc(u, x) {
                        return Some(RectangleWitness { u, w, v, x });
                    }
                }
            }
        }
    }
    None
}

pub fn is_rectangular(g: &Digraph) -> bool {
    rectangle_violation(g).is_none()
}

/// Two vertices whose `k`-step sets overlap without being equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapWitness {
    pub k: usize,
    pub u: Value,
    pub v: Value,
    pub u_set: BitSet,
    pub v_set: BitSet,
}

impl fmt::Display for OverlapWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={} u={} v={} u+k={} v+k={}",
            self.k, self.u, self.v, self.u_set, self.v_set
        )
    }
}

type State = Vec<BitSet>;

fn initial(g: &Digraph) -> State {
    let n = g.vertex_count();
    (0..n).map(|u| BitSet::singleton(n, u)).collect()
}

fn step(out: &[BitSet], state: &State) -> State {
    state
        .iter()
        .map(|s| {
            let mut next = BitSet::new(s.len());
            for v in s.iter() {
                next.union_with(&out[v]);
            }
            next
        })
        .collect()
}

fn overlap(state: &State, k: usize) -> Option<OverlapWitness> {
    for (u, a) in state.iter().enumerate() {
        for (v, b) in state.iter().enumerate().skip(u + 1) {
            if a != b && !a.is_disjoint(b) {
                return Some(OverlapWitness {
                    k,
                    u: u as Value,
                    v: v as Value,
                    u_set: a.clone(),
                    v_set: b.clone(),
                });
            }
        }
    }
    None
}

/// The sets `u^{+k}` of vertices reachable by walks of length exactly `k`.
pub fn k_step_sets(g: &Digraph, k: usize) -> Vec<BitSet> {
    let out: Vec<BitSet> = g.vertices().map(|u| g.out_set(u)).collect();
    let mut state = initial(g);
    for _ in 0..k {
        state = step(&out, &state);
    }
    state
}

/// `None` when any two `k`-step sets are equal or disjoint.
pub fn k_rectangle_violation(g: &Digraph, k: usize) -> Result<Option<OverlapWitness>> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    Ok(overlap(&k_step_sets(g, k), k))
}

pub fn is_k_rectangular(g: &Digraph, k: usize) -> Result<bool> {
    Ok(k_rectangle_violation(g, k)?.is_none())
}

/// The sequence of state vectors `(u^{+k})_u` repeats from `preperiod` on
/// with period `period`; checking `1..=max_k` covers every state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub preperiod: usize,
    pub period: usize,
    pub max_k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalRectangularity {
    pub holds: bool,
    pub certificate: Certificate,
    /// The smallest failing `k`, if any.
    pub failure: Option<OverlapWitness>,
}

/// Decides `k`-rectangularity for every `k >= 1` by finding the cycle of the
/// state-vector sequence (Brent's method) and checking each distinct state.
pub fn is_totally_rectangular(g: &Digraph) -> Result<TotalRectangularity> {
    let n = g.vertex_count();
    let guard: u128 = if n >= 120 {
        u128::MAX
    } else {
        (n as u128) << n
    };
    let out: Vec<BitSet> = g.vertices().map(|u| g.out_set(u)).collect();
    let x0 = initial(g);

    let mut power = 1usize;
    let mut period = 1usize;
    let mut tortoise = x0.clone();
    let mut hare = step(&out, &x0);
    let mut iterations: u128 = 1;
    while tortoise != hare {
        if power == period {
            tortoise = hare.clone();
            power *= 2;
            period = 0;
        }
        hare = step(&out, &hare);
        period += 1;
        iterations += 1;
        if iterations > guard {
            return Err(Error::GuardExceeded(format!(
                "no repeated state vector within {guard} iterations"
            )));
        }
    }

    let mut hare = x0.clone();
    for _ in 0..period {
        hare = step(&out, &hare);
    }
    let mut tortoise = x0;
    let mut preperiod = 0usize;
    while tortoise != hare {
        tortoise = step(&out, &tortoise);
        hare = step(&out, &hare);
        preperiod += 1;
    }

    let max_k = (preperiod + period - 1).max(1);
    let certificate = Certificate {
        preperiod,
        period,
        max_k,
    };
    let mut state = initial(g);
    for k in 1..=max_k {
        state = step(&out, &state);
        if let Some(w) = overlap(&state, k) {
            return Ok(TotalRectangularity {
                holds: false,
                certificate,
                failure: Some(w),
            });
        }
    }
    Ok(TotalRectangularity {
        holds: true,
        certificate,
        failure: None,
    })
}
