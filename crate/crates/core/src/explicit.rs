//! Identifying sets for an explicitly listed `X ⊆ {0,1}^E`, via weighted
//! set cover over the pairs of solutions.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::element_set::ElementSet;
use crate::error::{Error, Result};
use crate::graph::WeightedGroundSet;
use crate::par;
use crate::rational::{self, Rational};

/// Distinct binary vectors of a common length, bit-packed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionList {
    dim: usize,
    words: usize,
    vectors: Vec<Vec<u64>>,
}

/// JSON form: `{"dim": n, "vectors": ["0101", ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionListFile {
    pub dim: usize,
    pub vectors: Vec<String>,
}

impl SolutionList {
    /// Keeps the first occurrence of each vector.
    pub fn new(dim: usize, vectors: Vec<Vec<bool>>) -> Result<Self> {
        let words = dim.div_ceil(64).max(1);
        let mut seen = HashMap::new();
        let mut packed = Vec::new();
        for v in vectors {
            if v.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            let mut w = vec![0u64; words];
            for (e, &bit) in v.iter().enumerate() {
                if bit {
                    w[e / 64] |= 1 << (e % 64);
                }
            }
            if seen.insert(w.clone(), ()).is_none() {
                packed.push(w);
            }
        }
        Ok(SolutionList {
            dim,
            words,
            vectors: packed,
        })
    }

    /// Parses strings of `0`/`1`.
    pub fn from_strings<S: AsRef<str>>(dim: usize, rows: &[S]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| {
                r.as_ref()
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(Error::InvalidParams(format!("'{other}' is not a binary digit"))),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        SolutionList::new(dim, parsed)
    }

    pub fn from_file(file: &SolutionListFile) -> Result<Self> {
        SolutionList::from_strings(file.dim, &file.vectors)
    }

    pub fn to_file(&self) -> SolutionListFile {
        SolutionListFile {
            dim: self.dim,
            vectors: (0..self.len())
                .map(|i| self.vector(i).iter().map(|&b| if b { '1' } else { '0' }).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn bit(&self, i: usize, e: usize) -> bool {
        self.vectors[i][e / 64] >> (e % 64) & 1 == 1
    }

    pub fn vector(&self, i: usize) -> Vec<bool> {
        (0..self.dim).map(|e| self.bit(i, e)).collect()
    }

    pub fn rational_vector(&self, i: usize) -> Vec<Rational> {
        (0..self.dim).map(|e| rational::int(self.bit(i, e) as i64)).collect()
    }

    pub fn index_of(&self, v: &[bool]) -> Option<usize> {
        (0..self.len()).find(|&i| v.len() == self.dim && self.vector(i) == v)
    }

    fn mask(&self, set: &[usize]) -> Result<Vec<u64>> {
        let mut m = vec![0u64; self.words];
        for &e in set {
            if e >= self.dim {
                return Err(Error::InvalidElement {
                    element: e,
                    size: self.dim,
                });
            }
            m[e / 64] |= 1 << (e % 64);
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExplicitVerdict {
    pub identifying: bool,
    /// Indices of two solutions that agree on `S`.
    pub witness: Option<(usize, usize)>,
}

/// `S` identifies iff the projections of `X` onto `S` are pairwise distinct.
pub fn verify_explicit_identifying(x: &SolutionList, set: &[usize]) -> Result<ExplicitVerdict> {
    let mask = x.mask(set)?;
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    for (i, v) in x.vectors.iter().enumerate() {
        let proj: Vec<u64> = v.iter().zip(&mask).map(|(a, m)| a & m).collect();
        if let Some(&j) = seen.get(&proj) {
            return Ok(ExplicitVerdict {
                identifying: false,
                witness: Some((j, i)),
            });
        }
        seen.insert(proj, i);
    }
    Ok(ExplicitVerdict {
        identifying: true,
        witness: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyStep {
    pub element: usize,
    pub newly_separated: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplicitIdentifyResult {
    #[serde(rename = "S")]
    pub identifying_set: Vec<usize>,
    #[serde(rename = "weight", with = "rational::serde_rational")]
    pub total_weight: Rational,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<GreedyStep>,
}

/// Bitset over the pairs `{i < j}` of solutions.
struct PairSet(Vec<u64>);

impl PairSet {
    fn count_and(&self, other: &PairSet) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }
}

fn separating_pairs(x: &SolutionList, e: usize) -> PairSet {
    let n = x.len();
    let total = n * n.saturating_sub(1) / 2;
    let mut bits = vec![0u64; total.div_ceil(64)];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if x.bit(i, e) != x.bit(j, e) {
                bits[k / 64] |= 1 << (k % 64);
            }
            k += 1;
        }
    }
    PairSet(bits)
}

/// `gain_a / w_a` versus `gain_b / w_b` with zero weight as infinite ratio.
fn ratio_cmp(gain_a: u64, w_a: &Rational, gain_b: u64, w_b: &Rational) -> Ordering {
    match (w_a.is_zero(), w_b.is_zero()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => {
            let lhs = Rational::from_integer(gain_a.into()) * w_b;
            let rhs = Rational::from_integer(gain_b.into()) * w_a;
            lhs.cmp(&rhs)
        }
    }
}

/// Greedy weighted set cover: repeatedly take the element with the largest
/// ratio of newly separated pairs to weight, smaller id on ties.
pub fn greedy_identifying(x: &SolutionList, w: &WeightedGroundSet) -> Result<ExplicitIdentifyResult> {
    w.expect_size(x.dim())?;
    let elements: Vec<usize> = (0..x.dim()).collect();
    let covers = par::map(&elements, |&e| separating_pairs(x, e));
    let n = x.len();
    let total = n * n.saturating_sub(1) / 2;
    let mut uncovered = PairSet(vec![0u64; total.div_ceil(64)]);
    for k in 0..total {
        uncovered.0[k / 64] |= 1 << (k % 64);
    }
    let mut left = total as u64;
    let mut chosen = vec![false; x.dim()];
    let mut trace = Vec::new();
    while left > 0 {
        let gains = par::map(
            &elements,
            |&e| {
                if chosen[e] {
                    0
                } else {
                    covers[e].count_and(&uncovered)
                }
            },
        );
        let mut best: Option<usize> = None;
        for e in (0..x.dim()).filter(|&e| gains[e] > 0) {
            let better = match best {
                None => true,
                Some(b) => ratio_cmp(gains[e], w.weight(e), gains[b], w.weight(b)) == Ordering::Greater,
            };
            if better {
                best = Some(e);
            }
        }
        let e = best.ok_or_else(|| Error::OracleInconsistent("solutions are not distinct".into()))?;
        chosen[e] = true;
        for (u, c) in uncovered.0.iter_mut().zip(&covers[e].0) {
            *u &= !c;
        }
        left -= gains[e];
        trace.push(GreedyStep {
            element: e,
            newly_separated: gains[e],
        });
    }
    let set: Vec<usize> = (0..x.dim()).filter(|&e| chosen[e]).collect();
    let total_weight = w.total(set.iter().copied());
    Ok(ExplicitIdentifyResult {
        identifying_set: set,
        total_weight,
        trace,
    })
}

#[derive(PartialEq, Eq)]
struct Lex(ElementSet);

impl PartialOrd for Lex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Lex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.lex_cmp(other.0)
    }
}

/// Minimum weight over all `2^|E|` subsets, ties to the lexicographically
/// smallest. Fails when `2^|E|` exceeds `max_subsets`.
pub fn exact_identifying(x: &SolutionList, w: &WeightedGroundSet, max_subsets: u64) -> Result<ExplicitIdentifyResult> {
    w.expect_size(x.dim())?;
    if x.dim() >= 63 || 1u64 << x.dim() > max_subsets {
        return Err(Error::SubsetExplosion { cap: max_subsets });
    }
    let n = x.len();
    let mut differences = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            differences.push(x.vectors[i][0] ^ x.vectors[j][0]);
        }
    }
    let best = par::min_by_key_u64(1u64 << x.dim(), |mask| {
        differences.iter().all(|d| d & mask != 0).then(|| {
            let s = ElementSet(mask);
            (w.total(s.iter()), Lex(s))
        })
    });
    let (_, mask) = best.expect("the full ground set separates distinct vectors");
    let set = ElementSet(mask).to_vec();
    let total_weight = w.total(set.iter().copied());
    Ok(ExplicitIdentifyResult {
        identifying_set: set,
        total_weight,
        trace: Vec::new(),
    })
}
