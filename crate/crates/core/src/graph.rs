//! Directed multigraphs with dense arc ids, and the graph primitives the
//! solvers share.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Directed multigraph. Arc ids are the positions in `arcs` and never change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    node_count: usize,
    arcs: Vec<(usize, usize)>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(node_count: usize, arcs: Vec<(usize, usize)>) -> Result<Self> {
        let mut out_arcs = vec![Vec::new(); node_count];
        let mut in_arcs = vec![Vec::new(); node_count];
        for (id, &(tail, head)) in arcs.iter().enumerate() {
            for node in [tail, head] {
                if node >= node_count {
                    return Err(Error::InvalidNode { node, node_count });
                }
            }
            out_arcs[tail].push(id);
            in_arcs[head].push(id);
        }
        Ok(Digraph {
            node_count,
            arcs,
            out_arcs,
            in_arcs,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> (usize, usize) {
        self.arcs[id]
    }

    pub fn tail(&self, id: usize) -> usize {
        self.arcs[id].0
    }

    pub fn head(&self, id: usize) -> usize {
        self.arcs[id].1
    }

    pub fn out_arcs(&self, node: usize) -> &[usize] {
        &self.out_arcs[node]
    }

    pub fn in_arcs(&self, node: usize) -> &[usize] {
        &self.in_arcs[node]
    }

    /// Path and flow settings call this at ingestion.
    pub fn reject_self_loops(&self) -> Result<()> {
        match self.arcs.iter().position(|&(t, h)| t == h) {
            Some(arc) => Err(Error::SelfLoop { arc }),
            None => Ok(()),
        }
    }

    /// Validates a list of arc ids and returns a membership mask.
    pub fn arc_mask(&self, ids: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.arc_count()];
        for &id in ids {
            if id >= self.arc_count() {
                return Err(Error::InvalidArc {
                    arc: id,
                    arc_count: self.arc_count(),
                });
            }
            mask[id] = true;
        }
        Ok(mask)
    }
}

/// Designated source and sink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StPair {
    pub source: usize,
    pub sink: usize,
}

impl StPair {
    pub fn new(g: &Digraph, source: usize, sink: usize) -> Result<Self> {
        for node in [source, sink] {
            if node >= g.node_count() {
                return Err(Error::InvalidNode {
                    node,
                    node_count: g.node_count(),
                });
            }
        }
        if source == sink {
            return Err(Error::SameSourceSink);
        }
        Ok(StPair { source, sink })
    }
}

/// Nonnegative rational weight per element of a ground set.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGroundSet {
    weights: Vec<Rational>,
}

impl WeightedGroundSet {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if let Some(element) = weights.iter().position(|w| w.is_negative()) {
            return Err(Error::NegativeWeight { element });
        }
        Ok(WeightedGroundSet { weights })
    }

    pub fn unit(size: usize) -> Self {
        WeightedGroundSet {
            weights: vec![rational::int(1); size],
        }
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, element: usize) -> &Rational {
        &self.weights[element]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn total<I: IntoIterator<Item = usize>>(&self, elements: I) -> Rational {
        elements
            .into_iter()
            .fold(Rational::zero(), |acc, e| acc + &self.weights[e])
    }

    pub fn expect_size(&self, size: usize) -> Result<()> {
        if self.size() != size {
            return Err(Error::LengthMismatch {
                expected: size,
                got: self.size(),
            });
        }
        Ok(())
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Component id per node. Ids are assigned in order of the smallest node
/// of each component.
pub fn strongly_connected_components(g: &Digraph) -> Vec<usize> {
    let n = g.node_count();
    // Kosaraju: iterative DFS for finishing order, then sweep the reverse graph.
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some((node, idx)) = stack.pop() {
            if let Some(&arc) = g.out_arcs(node).get(idx) {
                stack.push((node, idx + 1));
                let next = g.head(arc);
                if !visited[next] {
                    visited[next] = true;
                    stack.push((next, 0));
                }
            } else {
                order.push(node);
            }
        }
    }
    let mut raw = vec![usize::MAX; n];
    let mut count = 0;
    for &root in order.iter().rev() {
        if raw[root] != usize::MAX {
            continue;
        }
        raw[root] = count;
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            for &arc in g.in_arcs(node) {
                let prev = g.tail(arc);
                if raw[prev] == usize::MAX {
                    raw[prev] = count;
                    stack.push(prev);
                }
            }
        }
        count += 1;
    }
    // Renumber by smallest member.
    let mut relabel = vec![usize::MAX; count];
    let mut next = 0;
    let mut comp = vec![0; n];
    for node in 0..n {
        if relabel[raw[node]] == usize::MAX {
            relabel[raw[node]] = next;
            next += 1;
        }
        comp[node] = relabel[raw[node]];
    }
    comp
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologicalOrder {
    /// `rank[node]`, a permutation of `0..n` with `rank[tail] < rank[head]`.
    Ranks(Vec<usize>),
    /// Arc ids of a directed cycle, in traversal order.
    Cycle(Vec<usize>),
}

/// Kahn's algorithm, always releasing the smallest ready node first.
pub fn topological_order(g: &Digraph) -> TopologicalOrder {
    let n = g.node_count();
    let mut indegree: Vec<usize> = (0..n).map(|v| g.in_arcs(v).len()).collect();
    let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| indegree[v] == 0).map(Reverse).collect();
    let mut rank = vec![usize::MAX; n];
    let mut next = 0;
    while let Some(Reverse(v)) = ready.pop() {
        rank[v] = next;
        next += 1;
        for &arc in g.out_arcs(v) {
            let w = g.head(arc);
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(Reverse(w));
            }
        }
    }
    if next == n {
        return TopologicalOrder::Ranks(rank);
    }
    TopologicalOrder::Cycle(find_cycle_among(g, &rank))
}

/// Every unranked node keeps an unranked predecessor, so walking backwards
/// must revisit a node.
fn find_cycle_among(g: &Digraph, rank: &[usize]) -> Vec<usize> {
    let start = (0..g.node_count())
        .find(|&v| rank[v] == usize::MAX)
        .expect("some node is unranked");
    let mut seen_at = vec![usize::MAX; g.node_count()];
    let mut walk = Vec::new();
    let mut node = start;
    loop {
        if seen_at[node] != usize::MAX {
            let mut cycle: Vec<usize> = walk[seen_at[node]..].to_vec();
            cycle.reverse();
            return cycle;
        }
        seen_at[node] = walk.len();
        let arc = *g
            .in_arcs(node)
            .iter()
            .filter(|&&a| rank[g.tail(a)] == usize::MAX)
            .min()
            .expect("unranked node has an unranked predecessor");
        walk.push(arc);
        node = g.tail(arc);
    }
}

/// Forward-reachability mask from `start` using arcs where `allowed(arc)`.
pub fn reach_mask(g: &Digraph, start: usize, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; g.node_count()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &arc in g.out_arcs(v) {
            let w = g.head(arc);
            if !seen[w] && allowed(arc) {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Nodes from which `target` is reachable using allowed arcs.
pub fn coreach_mask(g: &Digraph, target: usize, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; g.node_count()];
    seen[target] = true;
    let mut stack = vec![target];
    while let Some(v) = stack.pop() {
        for &arc in g.in_arcs(v) {
            let u = g.tail(arc);
            if !seen[u] && allowed(arc) {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen
}

/// Sorted node ids reachable from `start` (inclusive) over `allowed` arcs.
pub fn reachable_from(g: &Digraph, start: usize, allowed: &[usize]) -> Result<Vec<usize>> {
    if start >= g.node_count() {
        return Err(Error::InvalidNode {
            node: start,
            node_count: g.node_count(),
        });
    }
    let mask = g.arc_mask(allowed)?;
    let seen = reach_mask(g, start, |a| mask[a]);
    Ok((0..g.node_count()).filter(|&v| seen[v]).collect())
}

/// Shortest (fewest arcs) directed path from `from` to `to` over allowed
/// arcs, as arc ids in order. Scans arcs by ascending id.
pub fn bfs_path(g: &Digraph, from: usize, to: usize, allowed: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
    let mut via = vec![usize::MAX; g.node_count()];
    let mut seen = vec![false; g.node_count()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = Vec::new();
            let mut cur = to;
            while cur != from {
                let arc = via[cur];
                path.push(arc);
                cur = g.tail(arc);
            }
            path.reverse();
            return Some(path);
        }
        for &arc in g.out_arcs(v) {
            let w = g.head(arc);
            if !seen[w] && allowed(arc) {
                seen[w] = true;
                via[w] = arc;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Maximum-weight spanning forest of the undirected multigraph formed by
/// `restrict`. Kruskal with ties broken by smallest arc id. Returns sorted
/// arc ids.
pub fn spanning_forest_max_weight(g: &Digraph, restrict: &[usize], w: &WeightedGroundSet) -> Result<Vec<usize>> {
    w.expect_size(g.arc_count())?;
    let mask = g.arc_mask(restrict)?;
    let mut order: Vec<usize> = (0..g.arc_count()).filter(|&a| mask[a]).collect();
    order.sort_by(|&a, &b| w.weight(b).cmp(w.weight(a)).then(a.cmp(&b)));
    let mut uf = UnionFind::new(g.node_count());
    let mut forest: Vec<usize> = order
        .into_iter()
        .filter(|&a| {
            let (t, h) = g.arc(a);
            uf.union(t, h)
        })
        .collect();
    forest.sort_unstable();
    Ok(forest)
}

/// Finds an undirected cycle among `arcs` (treating arcs as undirected
/// edges). Returns `(arc, forward)` pairs in traversal order, where
/// `forward` means the cycle walks the arc from tail to head.
pub fn undirected_cycle(g: &Digraph, arcs: &[usize]) -> Option<Vec<(usize, bool)>> {
    let mut uf = UnionFind::new(g.node_count());
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.node_count()];
    let mut sorted = arcs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for arc in sorted {
        let (t, h) = g.arc(arc);
        if t == h {
            return Some(vec![(arc, true)]);
        }
        if !uf.union(t, h) {
            // Closing arc t→h, then the forest path h ⇝ t.
            let back = forest_path(&adjacency, h, t);
            let mut cycle = vec![(arc, true)];
            let mut at = h;
            for edge in back {
                let (et, eh) = g.arc(edge);
                let forward = et == at;
                at = if forward { eh } else { et };
                cycle.push((edge, forward));
            }
            return Some(cycle);
        }
        adjacency[t].push((h, arc));
        adjacency[h].push((t, arc));
    }
    None
}

fn forest_path(adjacency: &[Vec<(usize, usize)>], from: usize, to: usize) -> Vec<usize> {
    let mut via: Vec<Option<(usize, usize)>> = vec![None; adjacency.len()];
    let mut seen = vec![false; adjacency.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &(w, arc) in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                via[w] = Some((v, arc));
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while let Some((prev, arc)) = via[cur] {
        path.push(arc);
        cur = prev;
    }
    path.reverse();
    path
}

/// All simple directed s-t paths as sorted arc-id lists, in lexicographic
/// order. Fails once more than `cap` paths have been found.
pub fn enumerate_st_paths(g: &Digraph, st: StPair, cap: usize) -> Result<Vec<Vec<usize>>> {
    if cap == 0 {
        return Err(Error::InvalidParams("path cap must be at least 1".into()));
    }
    // Nodes that cannot reach the sink never lie on a path.
    let useful = coreach_mask(g, st.sink, |_| true);
    let mut paths: BTreeSet<Vec<usize>> = BTreeSet::new();
    if !useful[st.source] {
        return Ok(Vec::new());
    }
    let mut on_path = vec![false; g.node_count()];
    let mut arcs_used: Vec<usize> = Vec::new();
    on_path[st.source] = true;
    let mut stack: Vec<(usize, usize)> = vec![(st.source, 0)];
    while let Some(&mut (node, ref mut idx)) = stack.last_mut() {
        if node == st.sink {
            let mut p = arcs_used.clone();
            p.sort_unstable();
            paths.insert(p);
            if paths.len() > cap {
                return Err(Error::PathExplosion { cap });
            }
            stack.pop();
            on_path[node] = false;
            arcs_used.pop();
            continue;
        }
        match g.out_arcs(node).get(*idx) {
            Some(&arc) => {
                *idx += 1;
                let next = g.head(arc);
                if !on_path[next] && useful[next] {
                    on_path[next] = true;
                    arcs_used.push(arc);
                    stack.push((next, 0));
                }
            }
            None => {
                stack.pop();
                on_path[node] = false;
                arcs_used.pop();
            }
        }
    }
    Ok(paths.into_iter().collect())
}
