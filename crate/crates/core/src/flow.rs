//! Identifying sets for unit s-t flows.
//!
//! A set `S` identifies the unit flows exactly when the relevant arcs
//! outside `S` contain no undirected cycle, where an arc is relevant if it
//! lies on some s-t path or some directed cycle. Minimal identifying sets
//! are therefore complements of spanning forests of the relevant arcs.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    bfs_path, coreach_mask, reach_mask, spanning_forest_max_weight, strongly_connected_components, undirected_cycle,
    Digraph, StPair, WeightedGroundSet,
};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowIdentifyResult {
    #[serde(rename = "S")]
    pub identifying_set: Vec<usize>,
    #[serde(rename = "E_prime")]
    pub relevant_arcs: Vec<usize>,
    #[serde(rename = "forest")]
    pub forest_certificate: Vec<usize>,
    #[serde(rename = "weight", with = "rational::serde_rational")]
    pub total_weight: Rational,
}

/// Two distinct unit flows agreeing outside an undirected cycle that avoids `S`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowWitness {
    /// `(arc, forward)` in traversal order.
    pub cycle: Vec<(usize, bool)>,
    #[serde(with = "rational::serde_rational_vec")]
    pub x: Vec<Rational>,
    #[serde(with = "rational::serde_rational_vec")]
    pub x_prime: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowVerdict {
    pub identifying: bool,
    pub witness: Option<FlowWitness>,
}

/// Arcs on some s-t path or some directed cycle, sorted.
///
/// Cycle arcs are those inside one strongly connected component; every other
/// arc `(v, w)` is relevant iff `s` reaches `v` and `w` reaches `t`.
pub fn relevant_arcs(g: &Digraph, st: StPair) -> Result<Vec<usize>> {
    g.reject_self_loops()?;
    let from_s = reach_mask(g, st.source, |_| true);
    if !from_s[st.sink] {
        return Err(Error::NoStPath);
    }
    let to_t = coreach_mask(g, st.sink, |_| true);
    let scc = strongly_connected_components(g);
    Ok((0..g.arc_count())
        .filter(|&a| {
            let (v, w) = g.arc(a);
            scc[v] == scc[w] || (from_s[v] && to_t[w])
        })
        .collect())
}

/// Minimum-weight identifying set: relevant arcs minus a maximum-weight
/// spanning forest of them.
pub fn min_weight_flow_identifying(g: &Digraph, st: StPair, w: &WeightedGroundSet) -> Result<FlowIdentifyResult> {
    w.expect_size(g.arc_count())?;
    let relevant = relevant_arcs(g, st)?;
    let forest = spanning_forest_max_weight(g, &relevant, w)?;
    let mut in_forest = vec![false; g.arc_count()];
    for &a in &forest {
        in_forest[a] = true;
    }
    let set: Vec<usize> = relevant.iter().copied().filter(|&a| !in_forest[a]).collect();
    let total_weight = w.total(set.iter().copied());
    Ok(FlowIdentifyResult {
        identifying_set: set,
        relevant_arcs: relevant,
        forest_certificate: forest,
        total_weight,
    })
}

/// Decides whether `set` identifies the unit s-t flows. When it does not,
/// returns an undirected cycle of relevant arcs outside `set` together with
/// two distinct unit flows that agree on every arc off that cycle.
pub fn verify_flow_identifying(g: &Digraph, st: StPair, set: &[usize]) -> Result<FlowVerdict> {
    let in_set = g.arc_mask(set)?;
    let relevant = relevant_arcs(g, st)?;
    let free: Vec<usize> = relevant.into_iter().filter(|&a| !in_set[a]).collect();
    let Some(mut cycle) = undirected_cycle(g, &free) else {
        return Ok(FlowVerdict {
            identifying: true,
            witness: None,
        });
    };
    // The augmentation step needs at least one backward arc.
    if cycle.iter().all(|&(_, fwd)| fwd) {
        cycle.reverse();
        for entry in cycle.iter_mut() {
            entry.1 = false;
        }
    }
    let scc = strongly_connected_components(g);
    let mut x = vec![Rational::zero(); g.arc_count()];
    for &(arc, _) in &cycle {
        for (xe, fe) in x.iter_mut().zip(flow_through(g, st, arc, &scc)) {
            *xe += fe;
        }
    }
    let share = Rational::from_integer(cycle.len().into());
    for xe in x.iter_mut() {
        *xe /= &share;
    }
    let eps = cycle
        .iter()
        .filter(|(_, fwd)| !fwd)
        .map(|(arc, _)| x[*arc].clone())
        .min()
        .expect("cycle has a backward arc");
    let mut x_prime = x.clone();
    for &(arc, fwd) in &cycle {
        if fwd {
            x_prime[arc] += &eps;
        } else {
            x_prime[arc] -= &eps;
        }
    }
    Ok(FlowVerdict {
        identifying: false,
        witness: Some(FlowWitness { cycle, x, x_prime }),
    })
}

/// A unit s-t flow that is positive on the relevant arc `arc`.
fn flow_through(g: &Digraph, st: StPair, arc: usize, scc: &[usize]) -> Vec<Rational> {
    let mut flow = vec![Rational::zero(); g.arc_count()];
    let mut add = |arcs: &[usize]| {
        for &a in arcs {
            flow[a] += Rational::one();
        }
    };
    let (v, w) = g.arc(arc);
    let to_tail = bfs_path(g, st.source, v, |_| true);
    let from_head = bfs_path(g, w, st.sink, |_| true);
    match (to_tail, from_head) {
        (Some(p), Some(q)) => {
            add(&p);
            add(&[arc]);
            add(&q);
        }
        _ => {
            debug_assert_eq!(scc[v], scc[w]);
            let back = bfs_path(g, w, v, |_| true).expect("arc lies on a directed cycle");
            let base = bfs_path(g, st.source, st.sink, |_| true).expect("s-t path exists");
            add(&base);
            add(&[arc]);
            add(&back);
        }
    }
    flow
}

/// Checks nonnegativity and unit-value flow conservation.
pub fn is_unit_flow(g: &Digraph, st: StPair, x: &[Rational]) -> bool {
    if x.len() != g.arc_count() || x.iter().any(|v| *v < Rational::zero()) {
        return false;
    }
    let mut excess = vec![Rational::zero(); g.node_count()];
    for (a, value) in x.iter().enumerate() {
        let (t, h) = g.arc(a);
        excess[t] += value;
        excess[h] -= value;
    }
    (0..g.node_count()).all(|v| {
        let expected = if v == st.source {
            rational::int(1)
        } else if v == st.sink {
            rational::int(-1)
        } else {
            Rational::zero()
        };
        excess[v] == expected
    })
}
