//! Generators for the structured instance families used in tests,
//! benchmarks and the `gen` subcommand.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, NotIdentifyingWitness, Result};
use crate::graph::{Digraph, StPair};
use crate::path::verify_path_identifying_dag;

/// Construction name, parameters and named arc sets of a generated instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub construction: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub note: String,
    /// Individually named arcs, e.g. `e1`..`ek` of the tight gap family.
    #[serde(default)]
    pub named_arcs: BTreeMap<String, usize>,
    /// Named arc groups, e.g. the bundle `B`.
    #[serde(default)]
    pub arc_sets: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub graph: Digraph,
    pub st: StPair,
    pub meta: InstanceMeta,
}

/// The tight family for the flow/path gap: nodes `v0..v(2k+1)` with
/// `s = v0`, `t = v(2k+1)`, arcs `(v(2i), v(2j+1))` for `0 ≤ i ≤ j ≤ k`, and
/// the marked arcs `e_i = (v(2i-1), v(2i))`.
///
/// Arc ids follow that order, so the marked arcs come last.
pub fn gen_tight_gap_family(k: usize) -> Result<GeneratedInstance> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    let nodes = 2 * k + 2;
    let mut arcs = Vec::new();
    for i in 0..=k {
        for j in i..=k {
            arcs.push((2 * i, 2 * j + 1));
        }
    }
    let mut named = BTreeMap::new();
    let mut marked = Vec::new();
    for i in 1..=k {
        named.insert(format!("e{i}"), arcs.len());
        marked.push(arcs.len());
        arcs.push((2 * i - 1, 2 * i));
    }
    let graph = Digraph::new(nodes, arcs)?;
    let st = StPair::new(&graph, 0, nodes - 1)?;
    let mut meta = InstanceMeta {
        construction: "tight-gap".into(),
        note: "flow/path gap family; the marked arcs identify all s-t paths".into(),
        named_arcs: named,
        ..Default::default()
    };
    meta.params.insert("k".into(), json!(k));
    meta.arc_sets.insert("marked".into(), marked);
    Ok(GeneratedInstance { graph, st, meta })
}

/// Simple undirected graph for the vertex-cover construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UndirectedGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl UndirectedGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(a, b) in &edges {
            if a >= vertices || b >= vertices {
                return Err(Error::InvalidParams(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidParams(format!("loop at vertex {a}")));
            }
        }
        Ok(UndirectedGraph { vertices, edges })
    }

    pub fn is_vertex_cover(&self, cover: &[usize]) -> bool {
        let set: BTreeSet<usize> = cover.iter().copied().collect();
        self.edges.iter().all(|(a, b)| set.contains(a) || set.contains(b))
    }

    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].0 == v || self.edges[e].1 == v)
            .collect()
    }
}

/// Layered DAG encoding a vertex-cover instance: `s → u_e → v_i → t`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCoverDag {
    pub instance: GeneratedInstance,
    pub vc_graph: UndirectedGraph,
    pub copies: usize,
    /// `(s, u_e)` per edge `e`.
    pub source_arcs: Vec<usize>,
    /// `middle_arcs[e][side][i]` is `(u_e, v_i)` where `v` is endpoint `side` of `e`.
    pub middle_arcs: Vec<[Vec<usize>; 2]>,
    /// `sink_arcs[v][i]` is `(v_i, t)`.
    pub sink_arcs: Vec<Vec<usize>>,
}

pub fn gen_vertex_cover_dag(vc_graph: &UndirectedGraph, copies: usize) -> Result<VertexCoverDag> {
    if vc_graph.edges.is_empty() {
        return Err(Error::InvalidParams("vertex-cover graph has no edges".into()));
    }
    if copies == 0 {
        return Err(Error::InvalidParams("need at least one copy".into()));
    }
    let m = vc_graph.edges.len();
    let (s, t) = (0, 1);
    let u_node = |e: usize| 2 + e;
    let v_node = |v: usize, i: usize| 2 + m + v * copies + i;
    let nodes = 2 + m + vc_graph.vertices * copies;

    let mut arcs = Vec::new();
    let source_arcs: Vec<usize> = (0..m)
        .map(|e| {
            arcs.push((s, u_node(e)));
            arcs.len() - 1
        })
        .collect();
    let mut middle_arcs = Vec::with_capacity(m);
    for (e, &(a, b)) in vc_graph.edges.iter().enumerate() {
        let mut sides: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for (side, v) in [a, b].into_iter().enumerate() {
            for i in 0..copies {
                arcs.push((u_node(e), v_node(v, i)));
                sides[side].push(arcs.len() - 1);
            }
        }
        middle_arcs.push(sides);
    }
    let mut sink_arcs = vec![Vec::with_capacity(copies); vc_graph.vertices];
    for i in 0..copies {
        for (v, per_vertex) in sink_arcs.iter_mut().enumerate() {
            arcs.push((v_node(v, i), t));
            per_vertex.push(arcs.len() - 1);
        }
    }
    let graph = Digraph::new(nodes, arcs)?;
    let st = StPair::new(&graph, s, t)?;
    let mut meta = InstanceMeta {
        construction: "vc-dag".into(),
        note: "vertex-cover reduction DAG".into(),
        ..Default::default()
    };
    meta.params.insert("copies".into(), json!(copies));
    meta.params.insert("vc_graph".into(), json!(vc_graph));
    meta.arc_sets.insert("E_s".into(), source_arcs.clone());
    meta.arc_sets.insert(
        "E_mid".into(),
        middle_arcs.iter().flat_map(|s| s.iter().flatten().copied()).collect(),
    );
    for i in 0..copies {
        meta.arc_sets
            .insert(format!("E_{}", i + 1), sink_arcs.iter().map(|per| per[i]).collect());
    }
    Ok(VertexCoverDag {
        instance: GeneratedInstance { graph, st, meta },
        vc_graph: vc_graph.clone(),
        copies,
        source_arcs,
        middle_arcs,
        sink_arcs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCoverExtraction {
    /// Rewritten identifying set, free of middle arcs; sorted.
    pub normalized: Vec<usize>,
    /// `covers[i]` holds the vertices `v` with `(v_i, t)` in the rewritten set.
    pub covers: Vec<Vec<usize>>,
}

/// Pushes every middle arc `(u_e, v_i)` out of an identifying set, replacing
/// it by source/sink arcs, then reads a vertex cover off each copy.
///
/// The result is checked before it is returned: it must still identify the
/// paths, be no larger than `set`, and every copy must yield a cover.
pub fn extract_vertex_cover(dag: &VertexCoverDag, set: &[usize]) -> Result<VertexCoverExtraction> {
    let inst = &dag.instance;
    let verdict = verify_path_identifying_dag(&inst.graph, inst.st, set)?;
    if let Some((first, second)) = verdict.witness {
        return Err(Error::NotIdentifying(NotIdentifyingWitness::PathPair(first, second)));
    }
    let mut middle_owner = BTreeMap::new();
    for (e, sides) in dag.middle_arcs.iter().enumerate() {
        for (side, arcs) in sides.iter().enumerate() {
            for (i, &arc) in arcs.iter().enumerate() {
                middle_owner.insert(arc, (e, side, i));
            }
        }
    }
    let endpoint = |e: usize, side: usize| {
        let (a, b) = dag.vc_graph.edges[e];
        if side == 0 {
            a
        } else {
            b
        }
    };
    // Middle arcs (u_f, v_j) for a fixed edge f and vertex v, across copies.
    let arcs_to_vertex = |f: usize, v: usize| -> Vec<usize> {
        let (a, b) = dag.vc_graph.edges[f];
        let mut out = Vec::new();
        if a == v {
            out.extend(&dag.middle_arcs[f][0]);
        }
        if b == v {
            out.extend(&dag.middle_arcs[f][1]);
        }
        out
    };

    let mut current: BTreeSet<usize> = set.iter().copied().collect();
    while let Some((&arc, &(e, side, i))) = middle_owner.iter().find(|(arc, _)| current.contains(arc)) {
        let v = endpoint(e, side);
        let others: Vec<usize> = dag.vc_graph.incident_edges(v).into_iter().filter(|&f| f != e).collect();
        let source_in = |f: usize, cur: &BTreeSet<usize>| cur.contains(&dag.source_arcs[f]);
        if source_in(e, &current) || others.iter().all(|&f| source_in(f, &current)) {
            current.remove(&arc);
            current.insert(dag.sink_arcs[v][i]);
        } else {
            let f = *others
                .iter()
                .find(|&&f| !source_in(f, &current))
                .expect("some neighbouring source arc is missing");
            for a in arcs_to_vertex(e, v).into_iter().chain(arcs_to_vertex(f, v)) {
                current.remove(&a);
            }
            current.insert(dag.source_arcs[e]);
            current.insert(dag.source_arcs[f]);
            current.extend(dag.sink_arcs[v].iter().copied());
        }
    }
    let normalized: Vec<usize> = current.into_iter().collect();
    if normalized.len() > set.len() {
        return Err(Error::RewriteFailed(format!(
            "rewritten set has {} arcs, input had {}",
            normalized.len(),
            set.len()
        )));
    }
    if !verify_path_identifying_dag(&inst.graph, inst.st, &normalized)?.identifying {
        return Err(Error::RewriteFailed("rewritten set is not identifying".into()));
    }
    let chosen: BTreeSet<usize> = normalized.iter().copied().collect();
    let covers: Vec<Vec<usize>> = (0..dag.copies)
        .map(|i| {
            (0..dag.vc_graph.vertices)
                .filter(|&v| chosen.contains(&dag.sink_arcs[v][i]))
                .collect()
        })
        .collect();
    if let Some(i) = covers.iter().position(|c| !dag.vc_graph.is_vertex_cover(c)) {
        return Err(Error::RewriteFailed(format!(
            "copy {} yields {:?}, which is not a vertex cover",
            i + 1,
            covers[i]
        )));
    }
    Ok(VertexCoverExtraction { normalized, covers })
}

/// Replaces arc `arc` by `bundle_size` parallel copies occupying ids
/// `arc..arc + bundle_size`; later arcs shift up.
pub fn gen_bundle_instance(base: &Digraph, st: StPair, arc: usize, bundle_size: usize) -> Result<GeneratedInstance> {
    if arc >= base.arc_count() {
        return Err(Error::InvalidArc {
            arc,
            arc_count: base.arc_count(),
        });
    }
    if bundle_size < 2 {
        return Err(Error::InvalidParams("bundle size must be at least 2".into()));
    }
    let mut arcs = Vec::with_capacity(base.arc_count() + bundle_size - 1);
    arcs.extend_from_slice(&base.arcs()[..arc]);
    arcs.extend(std::iter::repeat_n(base.arc(arc), bundle_size));
    arcs.extend_from_slice(&base.arcs()[arc + 1..]);
    let graph = Digraph::new(base.node_count(), arcs)?;
    let st = StPair::new(&graph, st.source, st.sink)?;
    let mut meta = InstanceMeta {
        construction: "bundle".into(),
        note: "arc replaced by a bundle of parallel copies".into(),
        ..Default::default()
    };
    meta.params.insert("arc".into(), json!(arc));
    meta.params.insert("bundle_size".into(), json!(bundle_size));
    meta.arc_sets.insert("B".into(), (arc..arc + bundle_size).collect());
    Ok(GeneratedInstance { graph, st, meta })
}

fn check_random_params(nodes: usize, arc_prob: f64) -> Result<()> {
    if nodes < 2 {
        return Err(Error::InvalidParams("need at least two nodes".into()));
    }
    if !(0.0..=1.0).contains(&arc_prob) {
        return Err(Error::InvalidParams("arc probability must lie in [0, 1]".into()));
    }
    Ok(())
}

/// Random DAG: arcs follow a seeded random node permutation; `s` and `t` are
/// its first and last node.
pub fn gen_random_dag(nodes: usize, arc_prob: f64, seed: u64) -> Result<GeneratedInstance> {
    check_random_params(nodes, arc_prob)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..nodes).collect();
    perm.shuffle(&mut rng);
    let mut arcs = Vec::new();
    for i in 0..nodes {
        for j in i + 1..nodes {
            if rng.gen_bool(arc_prob) {
                arcs.push((perm[i], perm[j]));
            }
        }
    }
    random_instance("random-dag", nodes, arcs, perm[0], perm[nodes - 1], arc_prob, seed)
}

/// Random digraph without self-loops; `s`/`t` are the endpoints of a seeded
/// random permutation.
pub fn gen_random_digraph(nodes: usize, arc_prob: f64, seed: u64) -> Result<GeneratedInstance> {
    check_random_params(nodes, arc_prob)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..nodes).collect();
    perm.shuffle(&mut rng);
    let mut arcs = Vec::new();
    for u in 0..nodes {
        for v in 0..nodes {
            if u != v && rng.gen_bool(arc_prob) {
                arcs.push((u, v));
            }
        }
    }
    random_instance("random-digraph", nodes, arcs, perm[0], perm[nodes - 1], arc_prob, seed)
}

fn random_instance(
    name: &str,
    nodes: usize,
    arcs: Vec<(usize, usize)>,
    s: usize,
    t: usize,
    arc_prob: f64,
    seed: u64,
) -> Result<GeneratedInstance> {
    let graph = Digraph::new(nodes, arcs)?;
    let st = StPair::new(&graph, s, t)?;
    let mut meta = InstanceMeta {
        construction: name.into(),
        ..Default::default()
    };
    meta.params.insert("nodes".into(), json!(nodes));
    meta.params.insert("arc_prob".into(), json!(arc_prob));
    meta.params.insert("seed".into(), json!(seed));
    Ok(GeneratedInstance { graph, st, meta })
}
