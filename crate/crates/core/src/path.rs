//! Identifying sets for s-t paths.
//!
//! On acyclic graphs a set `S` identifies the s-t paths iff, after pruning
//! nodes that lie on no s-t path, the arcs of `E \ S` reachable from any
//! node `v` form an arborescence rooted at `v`. On general digraphs the
//! decision problem is hard, so only enumeration is offered.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::min_weight_flow_identifying;
use crate::graph::{
    bfs_path, coreach_mask, enumerate_st_paths, reach_mask, topological_order, Digraph, StPair, TopologicalOrder,
    WeightedGroundSet,
};
use crate::hitting::min_weight_hitting_set;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_paths: usize,
    pub max_subsets: u64,
    pub max_ground: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_paths: 100_000,
            max_subsets: 1 << 24,
            max_ground: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathMethod {
    ExactBruteforce,
    FlowApprox,
    VerifiedInput,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathIdentifyResult {
    #[serde(rename = "S")]
    pub identifying_set: Vec<usize>,
    #[serde(rename = "weight", with = "rational::serde_rational")]
    pub total_weight: Rational,
    pub method: PathMethod,
    /// Guaranteed ratio for the size objective, when one is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approx_bound: Option<f64>,
}

/// Verdict with two distinct s-t paths (arc ids in path order) agreeing on `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathVerdict {
    pub identifying: bool,
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

impl PathVerdict {
    fn yes() -> Self {
        PathVerdict {
            identifying: true,
            witness: None,
        }
    }
}

fn require_acyclic(g: &Digraph) -> Result<()> {
    match topological_order(g) {
        TopologicalOrder::Ranks(_) => Ok(()),
        TopologicalOrder::Cycle(cycle) => Err(Error::NotAcyclic { cycle }),
    }
}

/// Arborescence test on an acyclic graph.
pub fn verify_path_identifying_dag(g: &Digraph, st: StPair, set: &[usize]) -> Result<PathVerdict> {
    let in_set = g.arc_mask(set)?;
    require_acyclic(g)?;
    let from_s = reach_mask(g, st.source, |_| true);
    if !from_s[st.sink] {
        return Err(Error::NoStPath);
    }
    let to_t = coreach_mask(g, st.sink, |_| true);
    // In a DAG an arc lies on an s-t path iff s reaches its tail and its head reaches t.
    let kept: Vec<bool> = (0..g.arc_count())
        .map(|a| from_s[g.tail(a)] && to_t[g.head(a)])
        .collect();
    let free = |a: usize| kept[a] && !in_set[a];

    let mut first_in = vec![usize::MAX; g.node_count()];
    for v in (0..g.node_count()).filter(|&v| from_s[v] && to_t[v]) {
        let seen = reach_mask(g, v, free);
        first_in.iter_mut().for_each(|x| *x = usize::MAX);
        for a in (0..g.arc_count()).filter(|&a| free(a) && seen[g.tail(a)]) {
            let w = g.head(a);
            if first_in[w] == usize::MAX {
                first_in[w] = a;
                continue;
            }
            let b = first_in[w];
            let prefix = bfs_path(g, st.source, v, |x| kept[x]).expect("v is reachable");
            let suffix = bfs_path(g, w, st.sink, |x| kept[x]).expect("w reaches t");
            let build = |last: usize| {
                let mut p = prefix.clone();
                p.extend(bfs_path(g, v, g.tail(last), free).expect("tail is reachable"));
                p.push(last);
                p.extend(suffix.iter().copied());
                p
            };
            return Ok(PathVerdict {
                identifying: false,
                witness: Some((build(b), build(a))),
            });
        }
    }
    Ok(PathVerdict::yes())
}

/// Brute force over all simple s-t paths. True when at most one path exists.
pub fn verify_path_identifying_general(
    g: &Digraph,
    st: StPair,
    set: &[usize],
    max_paths: usize,
) -> Result<PathVerdict> {
    let in_set = g.arc_mask(set)?;
    g.reject_self_loops()?;
    let paths = enumerate_st_paths(g, st, max_paths)?;
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    for (i, p) in paths.iter().enumerate() {
        let trace: Vec<usize> = p.iter().copied().filter(|&a| in_set[a]).collect();
        if let Some(&j) = seen.get(&trace) {
            return Ok(PathVerdict {
                identifying: false,
                witness: Some((path_order(g, st, &paths[j]), path_order(g, st, p))),
            });
        }
        seen.insert(trace, i);
    }
    Ok(PathVerdict::yes())
}

/// Orders the arc set of a simple s-t path from s to t.
pub fn path_order(g: &Digraph, st: StPair, arcs: &[usize]) -> Vec<usize> {
    let mut out_of: HashMap<usize, usize> = HashMap::new();
    for &a in arcs {
        out_of.insert(g.tail(a), a);
    }
    let mut ordered = Vec::with_capacity(arcs.len());
    let mut at = st.source;
    while let Some(&a) = out_of.get(&at) {
        ordered.push(a);
        at = g.head(a);
        if ordered.len() > arcs.len() {
            break;
        }
    }
    ordered
}

/// Minimum-weight identifying set (weight, then lexicographic order) found
/// by an exact hitting-set search over pairwise path differences.
pub fn exact_min_path_identifying(
    g: &Digraph,
    st: StPair,
    w: &WeightedGroundSet,
    caps: Caps,
) -> Result<PathIdentifyResult> {
    w.expect_size(g.arc_count())?;
    g.reject_self_loops()?;
    let paths = enumerate_st_paths(g, st, caps.max_paths)?;
    let pairs = (paths.len() as u64).saturating_mul(paths.len().saturating_sub(1) as u64) / 2;
    if pairs > caps.max_subsets {
        return Err(Error::SubsetExplosion { cap: caps.max_subsets });
    }
    let mut edges = Vec::with_capacity(pairs as usize);
    for (i, p) in paths.iter().enumerate() {
        for q in &paths[i + 1..] {
            edges.push(symmetric_difference(p, q));
        }
    }
    let scaled = rational::scale_to_integers(w.weights())?;
    let set = min_weight_hitting_set(g.arc_count(), &scaled, edges, caps.max_subsets)?;
    let total_weight = w.total(set.iter().copied());
    Ok(PathIdentifyResult {
        identifying_set: set,
        total_weight,
        method: PathMethod::ExactBruteforce,
        approx_bound: None,
    })
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(*x);
                i += 1;
            }
            (Some(_), Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (Some(x), None) => {
                out.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// The flow-identifying set, which also identifies the paths; within a
/// factor √|E| of the minimum size.
pub fn approx_min_path_identifying_dag(g: &Digraph, st: StPair, w: &WeightedGroundSet) -> Result<PathIdentifyResult> {
    require_acyclic(g)?;
    let flow = min_weight_flow_identifying(g, st, w)?;
    Ok(PathIdentifyResult {
        identifying_set: flow.identifying_set,
        total_weight: flow.total_weight,
        method: PathMethod::FlowApprox,
        approx_bound: Some((g.arc_count() as f64).sqrt()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub flow_size: usize,
    pub optimum_size: usize,
    #[serde(with = "rational::serde_rational")]
    pub ratio: Rational,
}

/// `|S'| / |S*|` for the flow-based set and the exact path optimum under
/// unit weights; `0/0` counts as 1.
pub fn gap_ratio(g: &Digraph, st: StPair, caps: Caps) -> Result<GapReport> {
    let unit = WeightedGroundSet::unit(g.arc_count());
    let flow_size = min_weight_flow_identifying(g, st, &unit)?.identifying_set.len();
    let optimum_size = exact_min_path_identifying(g, st, &unit, caps)?.identifying_set.len();
    let ratio = match (flow_size, optimum_size) {
        (0, 0) => rational::int(1),
        (_, 0) => {
            return Err(Error::OracleInconsistent(
                "flow set nonempty while the path optimum is empty".into(),
            ))
        }
        (a, b) => rational::ratio(a as i64, b as i64),
    };
    Ok(GapReport {
        flow_size,
        optimum_size,
        ratio,
    })
}

/// Whether `|S'| ≤ (|S*|+1)|S*|/2`.
pub fn within_gap_bound(flow_size: usize, optimum_size: usize) -> bool {
    flow_size <= (optimum_size + 1) * optimum_size / 2
}

impl PathIdentifyResult {
    /// Wraps a user-supplied set that has already been verified.
    pub fn verified_input(set: Vec<usize>, w: &WeightedGroundSet) -> Self {
        let total_weight = w.total(set.iter().copied());
        PathIdentifyResult {
            identifying_set: set,
            total_weight,
            method: PathMethod::VerifiedInput,
            approx_bound: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_bundle_instance, gen_tight_gap_family};
    use crate::rational::{int, ratio};

    fn parallel() -> (Digraph, StPair) {
        let g = Digraph::new(2, vec![(0, 1), (0, 1)]).unwrap();
        let st = StPair::new(&g, 0, 1).unwrap();
        (g, st)
    }

    #[test]
    fn dag_examples() {
        let (g, st) = parallel();
        assert!(verify_path_identifying_dag(&g, st, &[0]).unwrap().identifying);
        let v = verify_path_identifying_dag(&g, st, &[]).unwrap();
        assert_eq!(v.witness, Some((vec![0], vec![1])));

        let t = gen_tight_gap_family(3).unwrap();
        let marked = &t.meta.arc_sets["marked"];
        assert!(verify_path_identifying_dag(&t.graph, t.st, marked).unwrap().identifying);
    }

    #[test]
    fn dag_errors() {
        let g = Digraph::new(3, vec![(0, 1), (1, 2), (2, 1)]).unwrap();
        let st = StPair::new(&g, 0, 1).unwrap();
        assert!(matches!(
            verify_path_identifying_dag(&g, st, &[]),
            Err(Error::NotAcyclic { .. })
        ));
        let g = Digraph::new(2, vec![(1, 0)]).unwrap();
        let st = StPair::new(&g, 0, 1).unwrap();
        assert!(matches!(verify_path_identifying_dag(&g, st, &[]), Err(Error::NoStPath)));
    }

    #[test]
    fn dag_witness_paths_are_real() {
        let t = gen_tight_gap_family(3).unwrap();
        let v = verify_path_identifying_dag(&t.graph, t.st, &[0]).unwrap();
        let (p, q) = v.witness.unwrap();
        assert_ne!(p, q);
        for path in [&p, &q] {
            assert_eq!(path_order(&t.graph, t.st, path), *path);
            assert_eq!(t.graph.head(*path.last().unwrap()), t.st.sink);
        }
        let trace = |x: &Vec<usize>| x.contains(&0);
        assert_eq!(trace(&p), trace(&q));
    }

    #[test]
    fn general_examples() {
        // Path 0→1→2→3 with the middle arc replaced by a bundle of three.
        let base = Digraph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        let st = StPair::new(&base, 0, 3).unwrap();
        let inst = gen_bundle_instance(&base, st, 1, 3).unwrap();
        let bundle = &inst.meta.arc_sets["B"];
        let rest: Vec<usize> = (0..inst.graph.arc_count()).filter(|a| !bundle.contains(a)).collect();
        let v = verify_path_identifying_general(&inst.graph, inst.st, &rest, 100).unwrap();
        assert!(!v.identifying);
        let (p, q) = v.witness.unwrap();
        assert!(p.iter().any(|a| bundle.contains(a)) && q.iter().any(|a| bundle.contains(a)));

        // Bundle tail unreachable from s.
        let base = Digraph::new(4, vec![(0, 3), (1, 2), (2, 3)]).unwrap();
        let st = StPair::new(&base, 0, 3).unwrap();
        let inst = gen_bundle_instance(&base, st, 1, 3).unwrap();
        assert!(
            verify_path_identifying_general(&inst.graph, inst.st, &[], 100)
                .unwrap()
                .identifying
        );

        let g = Digraph::new(2, vec![(0, 1)]).unwrap();
        let st = StPair::new(&g, 0, 1).unwrap();
        assert!(verify_path_identifying_general(&g, st, &[], 10).unwrap().identifying);
    }

    #[test]
    fn exact_examples() {
        let t = gen_tight_gap_family(2).unwrap();
        let r = exact_min_path_identifying(
            &t.graph,
            t.st,
            &WeightedGroundSet::unit(t.graph.arc_count()),
            Caps::default(),
        )
        .unwrap();
        assert_eq!(r.identifying_set.len(), 2);
        assert!(
            verify_path_identifying_dag(&t.graph, t.st, &r.identifying_set)
                .unwrap()
                .identifying
        );

        let (g, st) = parallel();
        let w = WeightedGroundSet::new(vec![int(1), int(5)]).unwrap();
        let r = exact_min_path_identifying(&g, st, &w, Caps::default()).unwrap();
        assert_eq!(r.identifying_set, vec![0]);
        assert_eq!(r.total_weight, int(1));
    }

    #[test]
    fn approx_examples() {
        let t = gen_tight_gap_family(3).unwrap();
        let r = approx_min_path_identifying_dag(&t.graph, t.st, &WeightedGroundSet::unit(13)).unwrap();
        assert_eq!(r.identifying_set.len(), 6);
        let g = Digraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let st = StPair::new(&g, 0, 2).unwrap();
        let r = approx_min_path_identifying_dag(&g, st, &WeightedGroundSet::unit(2)).unwrap();
        assert!(r.identifying_set.is_empty());
    }

    #[test]
    fn gap_on_tight_family() {
        for k in 1..=4usize {
            let t = gen_tight_gap_family(k).unwrap();
            let r = gap_ratio(&t.graph, t.st, Caps::default()).unwrap();
            assert_eq!(r.optimum_size, k);
            assert_eq!(r.flow_size, k * (k + 1) / 2);
            assert_eq!(r.ratio, ratio(k as i64 + 1, 2));
        }
        let g = Digraph::new(2, vec![(0, 1)]).unwrap();
        let st = StPair::new(&g, 0, 1).unwrap();
        assert_eq!(gap_ratio(&g, st, Caps::default()).unwrap().ratio, int(1));
    }

    #[test]
    fn path_cap() {
        let t = gen_tight_gap_family(4).unwrap();
        let err = verify_path_identifying_general(&t.graph, t.st, &[], 2).unwrap_err();
        assert!(err.is_cap_exceeded());
    }
}
