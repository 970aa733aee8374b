//! Independent brute-force oracles and fixture families shared by the
//! integration tests. Nothing here calls the algorithms under test.
#![allow(dead_code)]

use std::collections::HashSet;

use ctrlset::matroid::{BuiltinMatroid, Matroid};
use ctrlset::polymatroid::{Coverage, Polymatroid, TablePolymatroid};
use ctrlset::rational::{int, ratio};
use ctrlset::{Digraph, ElementSet, Rational, StPair};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Positive rationals with small numerators and denominators.
pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| ratio(rng.gen_range(1..=12), rng.gen_range(1..=4)))
        .collect()
}

/// Simple s-t paths as arc sets (sorted), by plain DFS.
pub fn st_paths(g: &Digraph, s: usize, t: usize) -> Vec<Vec<usize>> {
    fn go(g: &Digraph, v: usize, t: usize, on: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if v == t {
            let mut p = cur.clone();
            p.sort_unstable();
            out.push(p);
            return;
        }
        for a in 0..g.arc_count() {
            let (x, y) = g.arc(a);
            if x == v && !on[y] {
                on[y] = true;
                cur.push(a);
                go(g, y, t, on, cur, out);
                cur.pop();
                on[y] = false;
            }
        }
    }
    let mut on = vec![false; g.node_count()];
    on[s] = true;
    let mut out = Vec::new();
    go(g, s, t, &mut on, &mut Vec::new(), &mut out);
    out
}

/// Directed simple cycles as arc sets, each reported once.
pub fn directed_cycles(g: &Digraph) -> Vec<Vec<usize>> {
    let mut seen = HashSet::new();
    for a in 0..g.arc_count() {
        let (x, y) = g.arc(a);
        // cycles through arc a: a followed by a simple y-x path
        for mut p in if x == y { vec![vec![]] } else { st_paths(g, y, x) } {
            p.push(a);
            p.sort_unstable();
            seen.insert(p);
        }
    }
    let mut v: Vec<_> = seen.into_iter().collect();
    v.sort();
    v
}

pub fn mask_of(arcs: &[usize]) -> u64 {
    arcs.iter().fold(0, |m, &a| m | 1 << a)
}

/// Whether the given arc sets have pairwise distinct projections onto `set`.
pub fn projections_distinct(sets: &[u64], set: u64) -> bool {
    let mut seen = HashSet::with_capacity(sets.len());
    sets.iter().all(|p| seen.insert(p & set))
}

/// Smallest size of a set on which the arc sets have distinct projections.
pub fn brute_min_separating_size(sets: &[u64], m: usize) -> usize {
    (0..=m)
        .find(|&k| subsets_of_size(m, k).any(|s| projections_distinct(sets, s)))
        .expect("the full set separates distinct sets")
}

pub fn subsets_of_size(m: usize, k: usize) -> impl Iterator<Item = u64> {
    (0u64..1 << m).filter(move |s| s.count_ones() as usize == k)
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn int_rank(mut rows: Vec<Vec<i128>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            for j in c + 1..cols {
                rows[i][j] = (rows[r][c] * rows[i][j] - rows[i][c] * rows[r][j]) / prev;
            }
            rows[i][c] = 0;
        }
        prev = rows[r][c];
        r += 1;
    }
    r
}

/// Undirected acyclicity of an arc set, by union-find.
pub fn undirected_acyclic(g: &Digraph, arcs: impl IntoIterator<Item = usize>) -> bool {
    let mut parent: Vec<usize> = (0..g.node_count()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for a in arcs {
        let (x, y) = g.arc(a);
        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
        if rx == ry {
            return false;
        }
        parent[rx] = ry;
    }
    true
}

/// Conservation, nonnegativity and unit value.
pub fn is_unit_flow(g: &Digraph, st: StPair, x: &[Rational]) -> bool {
    if x.len() != g.arc_count() || x.iter().any(|v| v < &Rational::zero()) {
        return false;
    }
    let mut balance = vec![Rational::zero(); g.node_count()];
    for (a, v) in x.iter().enumerate() {
        let (p, q) = g.arc(a);
        balance[p] += v;
        balance[q] -= v;
    }
    balance.iter().enumerate().all(|(v, b)| {
        if v == st.source {
            *b == int(1)
        } else if v == st.sink {
            *b == int(-1)
        } else {
            b.is_zero()
        }
    })
}

/// Every simple digraph (no self-loops) on `n` nodes, as arc lists.
pub fn all_digraphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    (0u64..1 << pairs.len())
        .map(|m| {
            (0..pairs.len())
                .filter(|&i| m >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect()
        })
        .collect()
}

/// Seeded multigraphs without self-loops.
pub fn random_multigraph(rng: &mut ChaCha8Rng, n: usize, arcs: usize) -> Vec<(usize, usize)> {
    (0..arcs)
        .map(|_| loop {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if u != v {
                break (u, v);
            }
        })
        .collect()
}

/// Undirected graphs on `n` vertices with at least one edge, one per
/// isomorphism class.
pub fn graphs_up_to_isomorphism(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for m in 1u64..1 << pairs.len() {
        let edges: Vec<(usize, usize)> = (0..pairs.len())
            .filter(|&i| m >> i & 1 == 1)
            .map(|i| pairs[i])
            .collect();
        let canon = perms
            .iter()
            .map(|p| {
                let mut e: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
                e.sort_unstable();
                e
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            out.push(edges);
        }
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn min_vertex_cover(n: usize, edges: &[(usize, usize)]) -> usize {
    (0u32..1 << n)
        .filter(|c| edges.iter().all(|&(a, b)| c >> a & 1 == 1 || c >> b & 1 == 1))
        .map(u32::count_ones)
        .min()
        .unwrap() as usize
}

/// All bases of a matroid, from the independence oracle alone.
pub fn bases<M: Matroid + ?Sized>(m: &M) -> Vec<u64> {
    let n = m.ground_size();
    let indep: Vec<u64> = (0u64..1 << n).filter(|&s| m.is_independent(ElementSet(s))).collect();
    let r = indep.iter().map(|s| s.count_ones()).max().unwrap_or(0);
    indep.into_iter().filter(|s| s.count_ones() == r).collect()
}

/// Minimal dependent sets, from the independence oracle alone.
pub fn circuits<M: Matroid + ?Sized>(m: &M) -> Vec<u64> {
    let n = m.ground_size();
    (1u64..1 << n)
        .filter(|&s| {
            !m.is_independent(ElementSet(s))
                && (0..n)
                    .filter(|e| s >> e & 1 == 1)
                    .all(|e| m.is_independent(ElementSet(s & !(1 << e))))
        })
        .collect()
}

/// Classes of the relation "lie on a common circuit" (singletons otherwise).
pub fn circuit_classes(n: usize, circuits: &[u64]) -> Vec<u64> {
    let mut class: Vec<u64> = (0..n).map(|e| 1 << e).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &c in circuits {
            for e in 0..n {
                if c >> e & 1 == 1 && class[e] & c != c {
                    let merged = class[e] | c;
                    for (f, cl) in class.iter_mut().enumerate() {
                        if merged >> f & 1 == 1 && *cl != merged {
                            *cl |= merged;
                            changed = true;
                        }
                    }
                }
            }
        }
    }
    let mut out: Vec<u64> = class;
    out.sort_unstable();
    out.dedup();
    out
}

pub fn partition_masks(partition: &[Vec<usize>]) -> Vec<u64> {
    let mut v: Vec<u64> = partition.iter().map(|c| mask_of(c)).collect();
    v.sort_unstable();
    v
}

pub fn component_condition(classes: &[u64], set: u64) -> bool {
    classes
        .iter()
        .all(|&c| c.count_ones() < 2 || (c & set).count_ones() + 1 >= c.count_ones())
}

/// Built-in matroids on at most eight elements.
pub fn matroid_fixtures() -> Vec<(String, BuiltinMatroid)> {
    let mut out = Vec::new();
    for n in 2..=4 {
        for edges in all_digraphs(n).into_iter().filter(|a| a.iter().all(|&(u, v)| u < v)) {
            out.push((
                format!("graphic K{n} {edges:?}"),
                BuiltinMatroid::graphic(n, edges).unwrap(),
            ));
        }
    }
    for n in 0..=6 {
        for k in 0..=n {
            out.push((format!("U({k},{n})"), BuiltinMatroid::uniform(k, n).unwrap()));
        }
    }
    let multi = [
        (3, vec![(0, 1), (0, 1), (1, 2), (2, 0)]),
        (2, vec![(0, 0), (0, 1), (0, 1)]),
        (4, vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3), (1, 1), (2, 3)]),
        (5, vec![(0, 1), (1, 2), (2, 0), (3, 4), (3, 4), (4, 3)]),
    ];
    for (n, edges) in multi {
        out.push((
            format!("multigraph {edges:?}"),
            BuiltinMatroid::graphic(n, edges).unwrap(),
        ));
    }
    let partitions = [
        (vec![vec![0, 1, 2], vec![3, 4]], vec![1, 1]),
        (vec![vec![0, 2, 4], vec![1, 3, 5]], vec![2, 1]),
        (vec![vec![0], vec![1, 2, 3, 4, 5, 6, 7]], vec![1, 3]),
        (vec![vec![0, 1], vec![2, 3], vec![4, 5]], vec![0, 1, 2]),
    ];
    for (blocks, caps) in partitions {
        out.push((
            format!("partition {blocks:?} {caps:?}"),
            BuiltinMatroid::partition(blocks, caps).unwrap(),
        ));
    }
    for n in 0..=3 {
        out.push((format!("free {n}"), BuiltinMatroid::free(n).unwrap()));
    }
    out
}

fn table_of(n: usize, f: impl Fn(u64) -> Rational) -> TablePolymatroid {
    TablePolymatroid::new(n, (0u64..1 << n).map(f).collect()).unwrap()
}

/// Table polymatroids on at most six elements.
pub fn polymatroid_fixtures() -> Vec<(String, TablePolymatroid)> {
    let mut out = Vec::new();
    for (name, m) in matroid_fixtures() {
        if m.ground_size() <= 6 {
            out.push((
                format!("rank of {name}"),
                table_of(m.ground_size(), |s| {
                    int(ctrlset::matroid::rank(&m, ElementSet(s)) as i64)
                }),
            ));
        }
    }
    let mut r = rng(0x9017);
    for i in 0..40 {
        let sets = r.gen_range(2..=6);
        let items = r.gen_range(2..=6);
        let covers: Vec<Vec<usize>> = (0..sets)
            .map(|_| (0..items).filter(|_| r.gen_bool(0.4)).collect())
            .collect();
        let weights = random_weights(&mut r, items);
        let c = Coverage::new(covers.clone(), weights).unwrap();
        out.push((
            format!("coverage #{i} {covers:?}"),
            table_of(sets, |s| c.value(ElementSet(s))),
        ));
    }
    for i in 0..20 {
        let n = r.gen_range(2..=6);
        let a: Vec<Rational> = (0..n).map(|_| int(r.gen_range(0..=4))).collect();
        let budget = int(r.gen_range(0..=10));
        let (a2, b2) = (a.clone(), budget.clone());
        out.push((
            format!("budget-additive #{i} {budget} {a:?}"),
            table_of(n, move |s| {
                let total: Rational = (0..n).filter(|e| s >> e & 1 == 1).map(|e| &a2[e]).sum();
                total.min(b2.clone())
            }),
        ));
    }
    // direct sums of a uniform rank and a budget-additive part
    for split in 1..=4usize {
        let n = 6;
        out.push((
            format!("direct sum at {split}"),
            table_of(n, move |s| {
                let left = (s & ((1 << split) - 1)).count_ones().min(1);
                let right = (s >> split).count_ones().min(2);
                int((left + 2 * right) as i64)
            }),
        ));
    }
    out.push(("modular".into(), table_of(4, |s| int((s.count_ones() * 2) as i64))));
    out.push(("zero".into(), table_of(3, |_| int(0))));
    out
}

/// Whether `x` lies in the base polyhedron of the table `f`.
pub fn in_base_polyhedron(f: &TablePolymatroid, x: &[Rational]) -> bool {
    let n = f.ground_size();
    if x.iter().any(|v| v < &Rational::zero()) {
        return false;
    }
    let full = (1u64 << n) - 1;
    (0u64..=full).all(|s| {
        let xs: Rational = (0..n).filter(|e| s >> e & 1 == 1).map(|e| &x[e]).sum();
        let fs = f.value(ElementSet(s));
        if s == full {
            xs == fs
        } else {
            xs <= fs
        }
    })
}

/// Components of a polymatroid: atoms of its separators
/// `T` with `f(T) + f(E \ T) = f(E)`.
pub fn separator_classes(f: &TablePolymatroid) -> Vec<u64> {
    let n = f.ground_size();
    let full = (1u64 << n) - 1;
    let fe = f.value(ElementSet(full));
    let seps: Vec<u64> = (0..=full)
        .filter(|&t| f.value(ElementSet(t)) + f.value(ElementSet(full & !t)) == fe)
        .collect();
    let mut out: Vec<u64> = (0..n)
        .map(|e| seps.iter().filter(|&&t| t >> e & 1 == 1).fold(full, |acc, &t| acc & t))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}
