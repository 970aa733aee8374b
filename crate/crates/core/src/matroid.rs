//! Identifying sets for the bases of a matroid.
//!
//! `S` identifies the bases iff `|S ∩ C| ≥ |C| - 1` for every circuit `C`,
//! iff `|S ∩ E_i| ≥ |E_i| - 1` for every connected component `E_i`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::element_set::{ElementSet, MAX_ELEMENTS};
use crate::error::{Error, Result};
use crate::graph::{UnionFind, WeightedGroundSet};
use crate::par;
use crate::rational::{self, Rational};

/// Independence oracle. Queries must be pure; they may run concurrently.
pub trait Matroid: Sync {
    fn ground_size(&self) -> usize;
    fn is_independent(&self, set: ElementSet) -> bool;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BuiltinMatroid {
    Uniform {
        k: usize,
        n: usize,
    },
    /// Edges of an undirected multigraph; a self-loop is a matroid loop.
    Graphic {
        nodes: usize,
        edges: Vec<(usize, usize)>,
    },
    /// `blocks` partition the ground set; at most `capacities[i]` from block `i`.
    Partition {
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
    },
    Free {
        n: usize,
    },
}

fn check_ground(n: usize) -> Result<()> {
    if n > MAX_ELEMENTS {
        return Err(Error::InvalidParams(format!(
            "ground set of {n} elements exceeds the {MAX_ELEMENTS}-element limit"
        )));
    }
    Ok(())
}

impl BuiltinMatroid {
    pub fn uniform(k: usize, n: usize) -> Result<Self> {
        check_ground(n)?;
        if k > n {
            return Err(Error::InvalidParams(format!("uniform rank {k} exceeds size {n}")));
        }
        Self::checked(BuiltinMatroid::Uniform { k, n })
    }

    pub fn graphic(nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        check_ground(edges.len())?;
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= nodes || v >= nodes) {
            return Err(Error::InvalidParams(format!(
                "edge ({u},{v}) references a node outside 0..{nodes}"
            )));
        }
        Self::checked(BuiltinMatroid::Graphic { nodes, edges })
    }

    pub fn partition(blocks: Vec<Vec<usize>>, capacities: Vec<usize>) -> Result<Self> {
        if blocks.len() != capacities.len() {
            return Err(Error::LengthMismatch {
                expected: blocks.len(),
                got: capacities.len(),
            });
        }
        let n: usize = blocks.iter().map(Vec::len).sum();
        check_ground(n)?;
        let mut seen = vec![false; n];
        for &e in blocks.iter().flatten() {
            if e >= n || seen[e] {
                return Err(Error::InvalidParams(
                    "blocks must partition 0..n without repeats".into(),
                ));
            }
            seen[e] = true;
        }
        Self::checked(BuiltinMatroid::Partition { blocks, capacities })
    }

    pub fn free(n: usize) -> Result<Self> {
        check_ground(n)?;
        Self::checked(BuiltinMatroid::Free { n })
    }

    fn checked(m: Self) -> Result<Self> {
        sanity_check(&m, 32, 0)?;
        Ok(m)
    }
}

impl Matroid for BuiltinMatroid {
    fn ground_size(&self) -> usize {
        match self {
            BuiltinMatroid::Uniform { n, .. } | BuiltinMatroid::Free { n } => *n,
            BuiltinMatroid::Graphic { edges, .. } => edges.len(),
            BuiltinMatroid::Partition { blocks, .. } => blocks.iter().map(Vec::len).sum(),
        }
    }

    fn is_independent(&self, set: ElementSet) -> bool {
        match self {
            BuiltinMatroid::Uniform { k, .. } => set.len() <= *k,
            BuiltinMatroid::Free { .. } => true,
            BuiltinMatroid::Graphic { nodes, edges } => {
                let mut uf = UnionFind::new(*nodes);
                set.iter().all(|e| {
                    let (u, v) = edges[e];
                    uf.union(u, v)
                })
            }
            BuiltinMatroid::Partition { blocks, capacities } => blocks
                .iter()
                .zip(capacities)
                .all(|(b, &cap)| b.iter().filter(|&&e| set.contains(e)).count() <= cap),
        }
    }
}

/// Cheap consistency checks: `∅` independent, heredity and augmentation on
/// `samples` random independent sets.
pub fn sanity_check<M: Matroid + ?Sized>(m: &M, samples: usize, seed: u64) -> Result<()> {
    let n = m.ground_size();
    check_ground(n)?;
    if !m.is_independent(ElementSet::EMPTY) {
        return Err(Error::OracleInconsistent("the empty set is dependent".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let random_independent = |rng: &mut ChaCha8Rng, order: &mut Vec<usize>| {
        order.shuffle(rng);
        let take = rng.gen_range(0..=order.len());
        let mut set = ElementSet::EMPTY;
        for &e in order.iter().take(take) {
            if m.is_independent(set.with(e)) {
                set.insert(e);
            }
        }
        set
    };
    for _ in 0..samples {
        let i = random_independent(&mut rng, &mut order);
        if !m.is_independent(i) {
            return Err(Error::OracleInconsistent("greedy produced a dependent set".into()));
        }
        if let Some(e) = i.iter().find(|&e| !m.is_independent(i.without(e))) {
            return Err(Error::OracleInconsistent(format!(
                "independent set {:?} has a dependent subset without {e}",
                i
            )));
        }
        let j = basis_in_order(m, &order);
        if i.len() < j.len() && !j.difference(i).iter().any(|e| m.is_independent(i.with(e))) {
            return Err(Error::OracleInconsistent(format!(
                "augmentation fails for {:?} and {:?}",
                i, j
            )));
        }
    }
    Ok(())
}

fn basis_in_order<M: Matroid + ?Sized>(m: &M, order: &[usize]) -> ElementSet {
    let mut b = ElementSet::EMPTY;
    for &e in order {
        if m.is_independent(b.with(e)) {
            b.insert(e);
        }
    }
    b
}

/// Greedy basis scanning elements by ascending id.
pub fn greedy_basis<M: Matroid + ?Sized>(m: &M) -> ElementSet {
    let order: Vec<usize> = (0..m.ground_size()).collect();
    basis_in_order(m, &order)
}

/// Extends the independent set `start` to a basis, scanning by ascending id.
pub fn extend_to_basis<M: Matroid + ?Sized>(m: &M, start: ElementSet) -> ElementSet {
    let mut b = start;
    for e in 0..m.ground_size() {
        if !b.contains(e) && m.is_independent(b.with(e)) {
            b.insert(e);
        }
    }
    b
}

pub fn rank<M: Matroid + ?Sized>(m: &M, set: ElementSet) -> usize {
    let mut b = ElementSet::EMPTY;
    for e in set.iter() {
        if m.is_independent(b.with(e)) {
            b.insert(e);
        }
    }
    b.len()
}

pub fn is_basis<M: Matroid + ?Sized>(m: &M, set: ElementSet) -> bool {
    m.is_independent(set) && (0..m.ground_size()).all(|e| set.contains(e) || !m.is_independent(set.with(e)))
}

/// The unique circuit in `B + e`: `e` together with every `b ∈ B` whose
/// removal makes `B + e - b` independent.
pub fn fundamental_circuit<M: Matroid + ?Sized>(m: &M, basis: ElementSet, e: usize) -> Result<ElementSet> {
    let n = m.ground_size();
    if e >= n {
        return Err(Error::InvalidElement { element: e, size: n });
    }
    if basis.contains(e) {
        return Err(Error::ElementInBasis { element: e });
    }
    if basis.iter().any(|b| b >= n) || !is_basis(m, basis) {
        return Err(Error::NotABasis);
    }
    let closed = basis.with(e);
    Ok(basis
        .iter()
        .filter(|&b| m.is_independent(closed.without(b)))
        .chain(std::iter::once(e))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatroidComponents {
    /// Classes sorted internally and by smallest element.
    pub partition: Vec<Vec<usize>>,
}

/// Connected components from the fundamental graph of the greedy basis.
/// Loops and coloops end up as singletons.
pub fn matroid_components<M: Matroid + ?Sized>(m: &M) -> Result<MatroidComponents> {
    let n = m.ground_size();
    check_ground(n)?;
    if !m.is_independent(ElementSet::EMPTY) {
        return Err(Error::OracleInconsistent("the empty set is dependent".into()));
    }
    let basis = greedy_basis(m);
    let mut uf = UnionFind::new(n);
    for e in (0..n).filter(|&e| !basis.contains(e)) {
        let circuit = fundamental_circuit(m, basis, e)?;
        for x in circuit.iter() {
            uf.union(e, x);
        }
    }
    Ok(MatroidComponents {
        partition: partition_from(&mut uf, n),
    })
}

pub(crate) fn partition_from(uf: &mut UnionFind, n: usize) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for e in 0..n {
        let r = uf.find(e);
        if index[r] == usize::MAX {
            index[r] = classes.len();
            classes.push(Vec::new());
        }
        classes[index[r]].push(e);
    }
    classes
}

/// Result of the per-component greedy shared by matroids and polymatroids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentIdentifyResult {
    #[serde(rename = "S")]
    pub identifying_set: Vec<usize>,
    #[serde(rename = "weight", with = "rational::serde_rational")]
    pub total_weight: Rational,
    pub components: Vec<Vec<usize>>,
    /// The element left out of each component with at least two elements.
    pub dropped: Vec<usize>,
}

/// Everything except the heaviest element (smallest id on ties) of each
/// component with at least two elements.
pub fn component_greedy(components: Vec<Vec<usize>>, w: &WeightedGroundSet) -> ComponentIdentifyResult {
    let mut set = Vec::new();
    let mut dropped = Vec::new();
    for class in &components {
        if class.len() < 2 {
            continue;
        }
        let heaviest = class
            .iter()
            .copied()
            .max_by(|&a, &b| w.weight(a).cmp(w.weight(b)).then(b.cmp(&a)))
            .expect("class is nonempty");
        dropped.push(heaviest);
        set.extend(class.iter().copied().filter(|&e| e != heaviest));
    }
    set.sort_unstable();
    dropped.sort_unstable();
    let total_weight = w.total(set.iter().copied());
    ComponentIdentifyResult {
        identifying_set: set,
        total_weight,
        components,
        dropped,
    }
}

pub fn min_weight_matroid_identifying<M: Matroid + ?Sized>(
    m: &M,
    w: &WeightedGroundSet,
) -> Result<ComponentIdentifyResult> {
    w.expect_size(m.ground_size())?;
    let comps = matroid_components(m)?;
    Ok(component_greedy(comps.partition, w))
}

/// Whether `|S ∩ E_i| ≥ |E_i| - 1` for every class.
pub fn satisfies_component_condition(partition: &[Vec<usize>], set: ElementSet) -> bool {
    partition
        .iter()
        .all(|c| c.iter().filter(|&&e| !set.contains(e)).count() <= 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatroidWitness {
    pub circuit: ElementSet,
    pub basis: ElementSet,
    pub other_basis: ElementSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatroidVerdict {
    pub identifying: bool,
    pub witness: Option<MatroidWitness>,
}

fn is_circuit<M: Matroid + ?Sized>(m: &M, set: ElementSet) -> bool {
    !set.is_empty() && !m.is_independent(set) && set.iter().all(|e| m.is_independent(set.without(e)))
}

/// All circuits in increasing mask order.
pub fn enumerate_circuits<M: Matroid + ?Sized>(m: &M, max_ground: usize) -> Result<Vec<ElementSet>> {
    let n = enumeration_guard(m.ground_size(), max_ground)?;
    let found = par::map_range(1usize << n, |mask| {
        let s = ElementSet(mask as u64);
        is_circuit(m, s).then_some(s)
    });
    Ok(found.into_iter().flatten().collect())
}

/// All bases in increasing mask order.
pub fn enumerate_bases<M: Matroid + ?Sized>(m: &M, max_ground: usize) -> Result<Vec<ElementSet>> {
    let n = enumeration_guard(m.ground_size(), max_ground)?;
    let r = greedy_basis(m).len();
    let found = par::map_range(1usize << n, |mask| {
        let s = ElementSet(mask as u64);
        (s.len() == r && m.is_independent(s)).then_some(s)
    });
    Ok(found.into_iter().flatten().collect())
}

pub(crate) fn enumeration_guard(n: usize, max_ground: usize) -> Result<usize> {
    if n > max_ground || n >= usize::BITS as usize {
        return Err(Error::EnumerationExplosion {
            size: n,
            cap: max_ground,
        });
    }
    Ok(n)
}

/// Checks the circuit condition by enumeration. On failure, picks the first
/// circuit `C` (mask order) with two elements `e < f` outside `S`, a basis
/// `B ⊇ C - f`, and `B' = B + f - e`.
pub fn verify_matroid_identifying<M: Matroid + ?Sized>(
    m: &M,
    set: ElementSet,
    max_ground: usize,
) -> Result<MatroidVerdict> {
    let n = enumeration_guard(m.ground_size(), max_ground)?;
    if let Some(bad) = set.iter().find(|&e| e >= n) {
        return Err(Error::InvalidElement { element: bad, size: n });
    }
    let hit = par::find_first(1usize << n, |mask| {
        let c = ElementSet(mask as u64);
        (c.difference(set).len() >= 2 && is_circuit(m, c)).then_some(c)
    });
    let Some((_, circuit)) = hit else {
        return Ok(MatroidVerdict {
            identifying: true,
            witness: None,
        });
    };
    let mut outside = circuit.difference(set).iter();
    let e = outside.next().expect("two elements outside S");
    let f = outside.next().expect("two elements outside S");
    let basis = extend_to_basis(m, circuit.without(f));
    let other_basis = basis.with(f).without(e);
    debug_assert!(is_basis(m, other_basis));
    Ok(MatroidVerdict {
        identifying: false,
        witness: Some(MatroidWitness {
            circuit,
            basis,
            other_basis,
        }),
    })
}
