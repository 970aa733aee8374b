//! Exact minimum-weight hitting sets by branch and bound.
//!
//! Used by the exact path search: a set of arcs identifies the s-t paths iff
//! it meets the symmetric difference of every pair of distinct paths.

use crate::error::{Error, Result};

/// Minimum-weight set meeting every edge, ties broken towards the
/// lexicographically smallest element sequence (a proper prefix first).
///
/// `budget` bounds the number of search nodes over both phases.
pub fn min_weight_hitting_set(n: usize, weights: &[u128], edges: Vec<Vec<usize>>, budget: u64) -> Result<Vec<usize>> {
    if weights.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: weights.len(),
        });
    }
    let edges = minimal_edges(edges);
    if edges.iter().any(|e| e.is_empty()) {
        return Err(Error::InvalidParams("hypergraph has an empty edge".into()));
    }
    if let Some(&bad) = edges.iter().flatten().find(|&&e| e >= n) {
        return Err(Error::InvalidElement { element: bad, size: n });
    }
    let mut search = Search::new(n, weights, edges, budget);
    let upper = search.greedy_weight();
    search.best = upper;
    search.optimise(0)?;
    let target = search.best;
    search.reset();
    if !search.lex_first(0, 0, target)? {
        unreachable!("an optimum of weight {target} exists");
    }
    Ok((0..n).filter(|&e| search.chosen[e]).collect())
}

/// Sorted, deduplicated edges with every strict superset of another edge dropped.
pub fn minimal_edges(edges: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let mut edges: Vec<Vec<usize>> = edges
        .into_iter()
        .map(|mut e| {
            e.sort_unstable();
            e.dedup();
            e
        })
        .collect();
    edges.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    edges.dedup();
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for e in edges {
        if !kept.iter().any(|k| is_sorted_subset(k, &e)) {
            kept.push(e);
        }
    }
    kept
}

fn is_sorted_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

struct Search {
    n: usize,
    weights: Vec<u128>,
    edges: Vec<Vec<usize>>,
    incidence: Vec<Vec<usize>>,
    hits: Vec<u32>,
    chosen: Vec<bool>,
    excluded: Vec<bool>,
    best: u128,
    nodes: u64,
    budget: u64,
    // scratch for the packing bound
    used: Vec<bool>,
}

impl Search {
    fn new(n: usize, weights: &[u128], edges: Vec<Vec<usize>>, budget: u64) -> Self {
        let mut incidence = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            for &x in e {
                incidence[x].push(i);
            }
        }
        Search {
            n,
            weights: weights.to_vec(),
            hits: vec![0; edges.len()],
            edges,
            incidence,
            chosen: vec![false; n],
            excluded: vec![false; n],
            best: u128::MAX,
            nodes: 0,
            budget,
            used: vec![false; n],
        }
    }

    fn reset(&mut self) {
        self.hits.iter_mut().for_each(|h| *h = 0);
        self.chosen.iter_mut().for_each(|c| *c = false);
        self.excluded.iter_mut().for_each(|c| *c = false);
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::SubsetExplosion { cap: self.budget });
        }
        Ok(())
    }

    fn allowed(&self, e: usize) -> bool {
        !self.chosen[e] && !self.excluded[e]
    }

    fn choose(&mut self, e: usize) {
        self.chosen[e] = true;
        for &i in &self.incidence[e] {
            self.hits[i] += 1;
        }
    }

    fn unchoose(&mut self, e: usize) {
        self.chosen[e] = false;
        for &i in &self.incidence[e] {
            self.hits[i] -= 1;
        }
    }

    /// Weight of the ratio-greedy cover, an initial upper bound.
    fn greedy_weight(&mut self) -> u128 {
        let mut total = 0u128;
        let mut picked = Vec::new();
        while self.hits.contains(&0) {
            let mut best: Option<(usize, usize)> = None;
            for e in 0..self.n {
                if self.chosen[e] {
                    continue;
                }
                let gain = self.incidence[e].iter().filter(|&&i| self.hits[i] == 0).count();
                if gain == 0 {
                    continue;
                }
                // weight/gain < best_weight/best_gain, compared exactly
                let better = match best {
                    None => true,
                    Some((b, bg)) => self.weights[e] * (bg as u128) < self.weights[b] * (gain as u128),
                };
                if better {
                    best = Some((e, gain));
                }
            }
            let (e, _) = best.expect("every edge is nonempty");
            total += self.weights[e];
            self.choose(e);
            picked.push(e);
        }
        for e in picked {
            self.unchoose(e);
        }
        total
    }

    /// Lower bound on the extra weight needed, from a packing of pairwise
    /// disjoint unhit edges. `None` if some unhit edge cannot be hit.
    fn packing_bound(&mut self) -> Option<u128> {
        self.used.iter_mut().for_each(|u| *u = false);
        let mut bound = 0u128;
        for i in 0..self.edges.len() {
            if self.hits[i] > 0 {
                continue;
            }
            let mut cheapest: Option<u128> = None;
            let mut disjoint = true;
            for &x in &self.edges[i] {
                if !self.allowed(x) {
                    continue;
                }
                if self.used[x] {
                    disjoint = false;
                }
                cheapest = Some(cheapest.map_or(self.weights[x], |c| c.min(self.weights[x])));
            }
            let cheapest = cheapest?;
            if disjoint {
                bound += cheapest;
                for &x in &self.edges[i] {
                    self.used[x] = true;
                }
            }
        }
        Some(bound)
    }

    fn current_weight(&self) -> u128 {
        (0..self.n).filter(|&e| self.chosen[e]).map(|e| self.weights[e]).sum()
    }

    /// Lowers `best` to the optimum weight.
    fn optimise(&mut self, weight: u128) -> Result<()> {
        self.tick()?;
        let Some(lb) = self.packing_bound() else {
            return Ok(());
        };
        if weight + lb >= self.best {
            return Ok(());
        }
        let branch = (0..self.edges.len())
            .filter(|&i| self.hits[i] == 0)
            .min_by_key(|&i| self.edges[i].iter().filter(|&&x| self.allowed(x)).count());
        let Some(branch) = branch else {
            self.best = weight;
            return Ok(());
        };
        let mut options: Vec<usize> = self.edges[branch]
            .iter()
            .copied()
            .filter(|&x| self.allowed(x))
            .collect();
        options.sort_by_key(|&x| (self.weights[x], x));
        let mut excluded_here = Vec::new();
        for x in options {
            self.choose(x);
            let res = self.optimise(weight + self.weights[x]);
            self.unchoose(x);
            res?;
            self.excluded[x] = true;
            excluded_here.push(x);
        }
        for x in excluded_here {
            self.excluded[x] = false;
        }
        Ok(())
    }

    /// Depth-first over elements in id order: the current prefix, then
    /// prefixes containing `i`, then those skipping it. The first hitting
    /// set of weight at most `target` found this way is lexicographically least.
    fn lex_first(&mut self, i: usize, weight: u128, target: u128) -> Result<bool> {
        self.tick()?;
        if weight > target {
            return Ok(false);
        }
        if self.hits.iter().all(|&h| h > 0) {
            return Ok(true);
        }
        if i == self.n {
            return Ok(false);
        }
        match self.packing_bound() {
            Some(lb) if weight + lb <= target => {}
            _ => return Ok(false),
        }
        self.choose(i);
        if self.lex_first(i + 1, weight + self.weights[i], target)? {
            return Ok(true);
        }
        self.unchoose(i);
        self.excluded[i] = true;
        let found = self.lex_first(i + 1, weight, target)?;
        self.excluded[i] = false;
        debug_assert!(!found || self.current_weight() <= target);
        Ok(found)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element_set::ElementSet;

    fn brute(n: usize, w: &[u128], edges: &[Vec<usize>]) -> Vec<usize> {
        let masks: Vec<ElementSet> = edges.iter().map(|e| e.iter().copied().collect()).collect();
        ElementSet::full(n)
            .subsets()
            .filter(|s| masks.iter().all(|m| !m.intersection(*s).is_empty()))
            .min_by(|a, b| {
                let wa: u128 = a.iter().map(|e| w[e]).sum();
                let wb: u128 = b.iter().map(|e| w[e]).sum();
                wa.cmp(&wb).then(a.lex_cmp(*b))
            })
            .unwrap()
            .to_vec()
    }

    #[test]
    fn minimal_edges_drops_supersets() {
        let e = minimal_edges(vec![vec![2, 1], vec![1, 2, 3], vec![1, 2], vec![4]]);
        assert_eq!(e, vec![vec![4], vec![1, 2]]);
    }

    #[test]
    fn small_cases() {
        assert_eq!(
            min_weight_hitting_set(3, &[1, 1, 1], vec![], 100).unwrap(),
            Vec::<usize>::new()
        );
        let edges = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        assert_eq!(
            min_weight_hitting_set(3, &[1, 1, 1], edges.clone(), 1000).unwrap(),
            vec![0, 1]
        );
        assert_eq!(min_weight_hitting_set(3, &[5, 1, 1], edges, 1000).unwrap(), vec![1, 2]);
    }

    #[test]
    fn zero_weights_prefer_lex_smaller() {
        // {0,2} and {0,1,2} both weigh 1; the latter sorts first.
        let edges = vec![vec![0], vec![2]];
        assert_eq!(
            min_weight_hitting_set(3, &[1, 0, 0], edges, 100).unwrap(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn budget_exceeded() {
        let edges = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        assert!(matches!(
            min_weight_hitting_set(3, &[1, 1, 1], edges, 1),
            Err(Error::SubsetExplosion { cap: 1 })
        ));
    }

    proptest::proptest! {
        #[test]
        fn matches_brute_force(
            n in 1usize..8,
            raw_edges in proptest::collection::vec(proptest::collection::vec(0usize..8, 1..4), 0..8),
            raw_w in proptest::collection::vec(0u128..4, 8),
        ) {
            let edges: Vec<Vec<usize>> = raw_edges
                .into_iter()
                .map(|e| e.into_iter().map(|x| x % n).collect())
                .collect();
            let w = &raw_w[..n];
            let got = min_weight_hitting_set(n, w, edges.clone(), 1 << 20).unwrap();
            proptest::prop_assert_eq!(got, brute(n, w, &edges));
        }
    }
}
