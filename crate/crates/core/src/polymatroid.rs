//! Identifying sets for base polyhedra of polymatroids.
//!
//! `S` identifies `B(f)` iff `|S ∩ E_i| ≥ |E_i| - 1` for every connected
//! component `E_i`, where components come from splitting `E` along sets `T`
//! with `f(T) + f(E \ T) = f(E)`.

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::element_set::{ElementSet, MAX_ELEMENTS};
use crate::error::{Error, Result};
use crate::graph::WeightedGroundSet;
use crate::matroid::{component_greedy, enumeration_guard, rank, ComponentIdentifyResult, Matroid};
use crate::par;
use crate::rational::{self, Rational};

/// Set-function oracle. Must be pure; queries may run concurrently.
pub trait Polymatroid: Sync {
    fn ground_size(&self) -> usize;
    fn value(&self, set: ElementSet) -> Rational;
}

/// Explicit table indexed by subset mask.
#[derive(Debug, Clone, PartialEq)]
pub struct TablePolymatroid {
    n: usize,
    values: Vec<Rational>,
}

impl TablePolymatroid {
    /// Validates normalization, monotonicity and submodularity.
    pub fn new(n: usize, values: Vec<Rational>) -> Result<Self> {
        if n > 24 {
            return Err(Error::InvalidParams(format!("table over {n} elements is too large")));
        }
        if values.len() != 1 << n {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                got: values.len(),
            });
        }
        let f = TablePolymatroid { n, values };
        validate(&f, 12, 0)?;
        Ok(f)
    }

    /// Tabulates another oracle.
    pub fn from_oracle<P: Polymatroid + ?Sized>(f: &P) -> Result<Self> {
        let n = f.ground_size();
        Self::new(n, table(f))
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

impl Polymatroid for TablePolymatroid {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, set: ElementSet) -> Rational {
        self.values[set.0 as usize].clone()
    }
}

/// Rank function of a matroid.
pub struct MatroidRank<M>(pub M);

impl<M: Matroid> Polymatroid for MatroidRank<M> {
    fn ground_size(&self) -> usize {
        self.0.ground_size()
    }

    fn value(&self, set: ElementSet) -> Rational {
        Rational::from_integer(rank(&self.0, set).into())
    }
}

/// `f(T)` = total weight of the items covered by the sets in `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coverage {
    covers: Vec<Vec<usize>>,
    item_weights: Vec<Rational>,
}

impl Coverage {
    pub fn new(covers: Vec<Vec<usize>>, item_weights: Vec<Rational>) -> Result<Self> {
        if covers.len() > MAX_ELEMENTS {
            return Err(Error::InvalidParams("too many covering sets".into()));
        }
        if let Some(&bad) = covers.iter().flatten().find(|&&i| i >= item_weights.len()) {
            return Err(Error::InvalidParams(format!("item {bad} has no weight")));
        }
        if let Some(i) = item_weights.iter().position(|w| w.is_negative()) {
            return Err(Error::NegativeWeight { element: i });
        }
        Ok(Coverage { covers, item_weights })
    }
}

impl Polymatroid for Coverage {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn value(&self, set: ElementSet) -> Rational {
        let mut covered = vec![false; self.item_weights.len()];
        for e in set.iter() {
            for &i in &self.covers[e] {
                covered[i] = true;
            }
        }
        covered
            .iter()
            .zip(&self.item_weights)
            .filter(|(c, _)| **c)
            .map(|(_, w)| w)
            .sum()
    }
}

/// `f(T) = min(budget, Σ_{e∈T} a_e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetAdditive {
    budget: Rational,
    a: Vec<Rational>,
}

impl BudgetAdditive {
    pub fn new(budget: Rational, a: Vec<Rational>) -> Result<Self> {
        if a.len() > MAX_ELEMENTS {
            return Err(Error::InvalidParams("too many elements".into()));
        }
        if budget.is_negative() {
            return Err(Error::InvalidParams("budget must be nonnegative".into()));
        }
        if let Some(i) = a.iter().position(|w| w.is_negative()) {
            return Err(Error::NegativeWeight { element: i });
        }
        Ok(BudgetAdditive { budget, a })
    }
}

impl Polymatroid for BudgetAdditive {
    fn ground_size(&self) -> usize {
        self.a.len()
    }

    fn value(&self, set: ElementSet) -> Rational {
        let total: Rational = set.iter().map(|e| &self.a[e]).sum();
        total.min(self.budget.clone())
    }
}

/// All values by mask.
pub fn table<P: Polymatroid + ?Sized>(f: &P) -> Vec<Rational> {
    par::map_range(1usize << f.ground_size(), |mask| f.value(ElementSet(mask as u64)))
}

/// Checks `f(∅) = 0`, monotonicity and submodularity: exhaustively for
/// `|E| ≤ exhaustive_up_to`, on random sets with a fixed seed beyond.
pub fn validate<P: Polymatroid + ?Sized>(f: &P, exhaustive_up_to: usize, seed: u64) -> Result<()> {
    let n = f.ground_size();
    if !f.value(ElementSet::EMPTY).is_zero() {
        return Err(Error::OracleInconsistent("f(∅) must be 0".into()));
    }
    let check_at = |base: ElementSet| -> Result<()> {
        let fb = f.value(base);
        for e in (0..n).filter(|&e| !base.contains(e)) {
            let fe = f.value(base.with(e));
            if fe < fb {
                return Err(Error::OracleInconsistent(format!(
                    "not monotone: adding {e} to {:?}",
                    base
                )));
            }
            for g in (e + 1..n).filter(|&g| !base.contains(g)) {
                let fg = f.value(base.with(g));
                let feg = f.value(base.with(e).with(g));
                if &fe + &fg < &feg + &fb {
                    return Err(Error::OracleInconsistent(format!(
                        "not submodular at {:?} with {e} and {g}",
                        base
                    )));
                }
            }
        }
        Ok(())
    };
    if n <= exhaustive_up_to {
        let bad = par::find_first(1usize << n, |mask| check_at(ElementSet(mask as u64)).err());
        if let Some((_, err)) = bad {
            return Err(err);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..512 {
            let base: ElementSet = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            check_at(base)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaseCheck {
    pub member: bool,
    pub violated: Option<Vec<usize>>,
}

/// `x ∈ B(f)`; otherwise a set where a constraint fails, preferring the
/// most violated rank inequality.
pub fn base_membership<P: Polymatroid + ?Sized>(f: &P, x: &[Rational], max_ground: usize) -> Result<BaseCheck> {
    let n = enumeration_guard(f.ground_size(), max_ground)?;
    if x.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: x.len(),
        });
    }
    if let Some(e) = x.iter().position(|v| v.is_negative()) {
        return Ok(BaseCheck {
            member: false,
            violated: Some(vec![e]),
        });
    }
    let excess = par::min_by_key_u64(1u64 << n, |mask| {
        let t = ElementSet(mask);
        let over = sum_on(x, t) - f.value(t);
        over.is_positive().then_some(std::cmp::Reverse(over))
    });
    if let Some((_, mask)) = excess {
        return Ok(BaseCheck {
            member: false,
            violated: Some(ElementSet(mask).to_vec()),
        });
    }
    let full = ElementSet::full(n);
    if sum_on(x, full) != f.value(full) {
        return Ok(BaseCheck {
            member: false,
            violated: Some(full.to_vec()),
        });
    }
    Ok(BaseCheck {
        member: true,
        violated: None,
    })
}

fn sum_on(x: &[Rational], t: ElementSet) -> Rational {
    t.iter().map(|e| &x[e]).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitChoice {
    /// The splitting set of smallest mask.
    First,
    /// The splitting set of largest mask.
    Last,
    /// A seeded random splitting set.
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitCertificate {
    pub part: Vec<usize>,
    pub split: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolymatroidComponents {
    pub partition: Vec<Vec<usize>>,
    pub certificates: Vec<SplitCertificate>,
}

pub fn polymatroid_components<P: Polymatroid + ?Sized>(f: &P, max_ground: usize) -> Result<PolymatroidComponents> {
    polymatroid_components_with(f, max_ground, SplitChoice::First)
}

/// Recursively splits along any `T` with `f(T) + f(P \ T) = f(P)`.
pub fn polymatroid_components_with<P: Polymatroid + ?Sized>(
    f: &P,
    max_ground: usize,
    choice: SplitChoice,
) -> Result<PolymatroidComponents> {
    let n = enumeration_guard(f.ground_size(), max_ground)?;
    let mut rng = match choice {
        SplitChoice::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut pending = vec![ElementSet::full(n)];
    let mut done = Vec::new();
    let mut certificates = Vec::new();
    while let Some(part) = pending.pop() {
        if part.len() <= 1 {
            if !part.is_empty() {
                done.push(part);
            }
            continue;
        }
        let fp = f.value(part);
        let splits: Vec<ElementSet> = par::map(&part.subsets().collect::<Vec<_>>(), |&t| {
            (!t.is_empty() && t != part && f.value(t) + f.value(part.difference(t)) == fp).then_some(t)
        })
        .into_iter()
        .flatten()
        .collect();
        let pick = match (choice, splits.is_empty()) {
            (_, true) => None,
            (SplitChoice::First, _) => splits.first().copied(),
            (SplitChoice::Last, _) => splits.last().copied(),
            (SplitChoice::Seeded(_), _) => {
                let rng = rng.as_mut().expect("seeded");
                Some(splits[rng.gen_range(0..splits.len())])
            }
        };
        match pick {
            Some(t) => {
                certificates.push(SplitCertificate {
                    part: part.to_vec(),
                    split: t.to_vec(),
                });
                pending.push(part.difference(t));
                pending.push(t);
            }
            None => done.push(part),
        }
    }
    done.sort_by_key(|c| ElementSet::min(*c));
    Ok(PolymatroidComponents {
        partition: done.into_iter().map(ElementSet::to_vec).collect(),
        certificates,
    })
}

/// `dep(x, e)`: `e` together with every `e'` with `x_{e'} > 0` that lies in
/// every `x`-tight set containing `e`.
pub fn dependence_function<P: Polymatroid + ?Sized>(
    f: &P,
    x: &[Rational],
    e: usize,
    max_ground: usize,
) -> Result<Vec<usize>> {
    let n = enumeration_guard(f.ground_size(), max_ground)?;
    if e >= n {
        return Err(Error::InvalidElement { element: e, size: n });
    }
    if !base_membership(f, x, max_ground)?.member {
        return Err(Error::NotABase);
    }
    let all = ElementSet::full(n);
    let common = (0..1u64 << n)
        .map(ElementSet)
        .filter(|t| t.contains(e) && sum_on(x, *t) == f.value(*t))
        .fold(all, ElementSet::intersection);
    Ok((0..n)
        .filter(|&g| g == e || (common.contains(g) && x[g].is_positive()))
        .collect())
}

/// Greedy base of `f` restricted to the elements of `order`, placed into a
/// full-length vector.
fn greedy_base<P: Polymatroid + ?Sized>(f: &P, order: &[usize], x: &mut [Rational]) {
    let mut prefix = ElementSet::EMPTY;
    let mut previous = Rational::zero();
    for &e in order {
        prefix.insert(e);
        let value = f.value(prefix);
        x[e] = &value - &previous;
        previous = value;
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Average of greedy bases of `f` on `component` over all orderings (at most
/// eight elements) or 200 seeded orderings, certified to satisfy
/// `x(T) < f(T)` for every nonempty proper `T ⊂ component`.
pub fn interior_base<P: Polymatroid + ?Sized>(f: &P, component: &[usize], seed: u64) -> Result<Vec<Rational>> {
    let n = f.ground_size();
    let orders = if component.len() <= 8 {
        permutations(component)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..200)
            .map(|_| {
                let mut o = component.to_vec();
                o.shuffle(&mut rng);
                o
            })
            .collect()
    };
    let count = Rational::from_integer(orders.len().into());
    let bases = par::map(&orders, |o| {
        let mut x = vec![Rational::zero(); n];
        greedy_base(f, o, &mut x);
        x
    });
    let mut avg = vec![Rational::zero(); n];
    for b in &bases {
        for (a, v) in avg.iter_mut().zip(b) {
            *a += v;
        }
    }
    for a in avg.iter_mut() {
        *a /= &count;
    }
    let comp: ElementSet = component.iter().copied().collect();
    let strict = comp
        .subsets()
        .filter(|t| !t.is_empty() && *t != comp)
        .all(|t| sum_on(&avg, t) < f.value(t));
    if !strict {
        return Err(Error::InteriorBaseNotFound {
            component: component.to_vec(),
        });
    }
    Ok(avg)
}

pub fn min_weight_polymatroid_identifying<P: Polymatroid + ?Sized>(
    f: &P,
    w: &WeightedGroundSet,
    max_ground: usize,
) -> Result<ComponentIdentifyResult> {
    w.expect_size(f.ground_size())?;
    let comps = polymatroid_components(f, max_ground)?;
    Ok(component_greedy(comps.partition, w))
}

/// Two bases `x ≠ y` agreeing on `S`, with `y = x + ε(χ_{e'} - χ_e)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolymatroidWitness {
    pub component: Vec<usize>,
    pub e: usize,
    pub e_prime: usize,
    #[serde(with = "rational::serde_rational")]
    pub epsilon: Rational,
    #[serde(with = "rational::serde_rational_vec")]
    pub x: Vec<Rational>,
    #[serde(with = "rational::serde_rational_vec")]
    pub y: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolymatroidVerdict {
    pub identifying: bool,
    pub components: Vec<Vec<usize>>,
    pub witness: Option<PolymatroidWitness>,
}

/// Checks the component condition. On failure takes the two smallest
/// elements `e < e'` of the first offending component outside `S`, a base
/// `x` interior on that component, and the largest feasible `ε`.
pub fn verify_polymatroid_identifying<P: Polymatroid + ?Sized>(
    f: &P,
    set: ElementSet,
    max_ground: usize,
) -> Result<PolymatroidVerdict> {
    let n = enumeration_guard(f.ground_size(), max_ground)?;
    if let Some(bad) = set.iter().find(|&e| e >= n) {
        return Err(Error::InvalidElement { element: bad, size: n });
    }
    let comps = polymatroid_components(f, max_ground)?;
    let offending = comps
        .partition
        .iter()
        .find(|c| c.iter().filter(|&&e| !set.contains(e)).count() >= 2);
    let Some(component) = offending else {
        return Ok(PolymatroidVerdict {
            identifying: true,
            components: comps.partition,
            witness: None,
        });
    };
    let mut outside = component.iter().copied().filter(|&e| !set.contains(e));
    let e = outside.next().expect("two free elements");
    let e_prime = outside.next().expect("two free elements");

    let mut x = interior_base(f, component, 0)?;
    for other in comps.partition.iter().filter(|c| *c != component) {
        greedy_base(f, other, &mut x);
    }
    // y_e = x_e - ε ≥ 0 and x(T) + ε ≤ f(T) whenever e' ∈ T, e ∉ T.
    let epsilon = (0..1u64 << n)
        .map(ElementSet)
        .filter(|t| t.contains(e_prime) && !t.contains(e))
        .map(|t| f.value(t) - sum_on(&x, t))
        .fold(x[e].clone(), |a, b| a.min(b));
    if !epsilon.is_positive() {
        return Err(Error::InteriorBaseNotFound {
            component: component.clone(),
        });
    }
    let mut y = x.clone();
    y[e] -= &epsilon;
    y[e_prime] += &epsilon;
    Ok(PolymatroidVerdict {
        identifying: false,
        components: comps.partition.clone(),
        witness: Some(PolymatroidWitness {
            component: component.clone(),
            e,
            e_prime,
            epsilon,
            x,
            y,
        }),
    })
}
