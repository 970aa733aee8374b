//! Identifying sets for a convex set given by an affine basis `x_0..x_k`.
//!
//! With `D = {x_i - x_0}`, a set `F ⊆ E` is independent in `A_X` when
//! `D ∪ {χ_e : e ∈ F}` is linearly independent. Minimal identifying sets are
//! the complements of bases of `A_X`, so all of them have size `k`.

use serde::{Deserialize, Serialize};

use crate::element_set::ElementSet;
use crate::error::{Error, Result};
use crate::graph::WeightedGroundSet;
use crate::linalg;
use crate::matroid::Matroid;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineBasis {
    #[serde(with = "points_serde")]
    points: Vec<Vec<Rational>>,
}

mod points_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: Vec<Vec<String>> = p.iter().map(|r| r.iter().map(rational::format).collect()).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
        let raw: Vec<Vec<rational::RawRational>> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|v| v.into_rational().map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

impl AffineBasis {
    /// Requires the differences `x_i - x_0` to be linearly independent.
    pub fn new(points: Vec<Vec<Rational>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidBasis("no points".into()));
        };
        let n = first.len();
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(Error::InvalidBasis(format!(
                "point of dimension {} among points of dimension {n}",
                p.len()
            )));
        }
        let basis = AffineBasis { points };
        let d = basis.differences();
        if linalg::rank(&d, n) != d.len() {
            return Err(Error::InvalidBasis("points are affinely dependent".into()));
        }
        Ok(basis)
    }

    /// Greedily keeps each point that is affinely independent of those kept.
    pub fn from_spanning_points(points: &[Vec<Rational>]) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidBasis("no points".into()));
        };
        let n = first.len();
        let mut kept = vec![first.clone()];
        let mut diffs: Vec<Vec<Rational>> = Vec::new();
        for p in &points[1..] {
            if p.len() != n {
                return Err(Error::InvalidBasis("points differ in dimension".into()));
            }
            let d: Vec<Rational> = p.iter().zip(first).map(|(a, b)| a - b).collect();
            diffs.push(d);
            if linalg::rank(&diffs, n) == diffs.len() {
                kept.push(p.clone());
            } else {
                diffs.pop();
            }
        }
        AffineBasis::new(kept)
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    pub fn dimension(&self) -> usize {
        self.points[0].len()
    }

    /// `k`, the dimension of the affine hull.
    pub fn k(&self) -> usize {
        self.points.len() - 1
    }

    pub fn differences(&self) -> Vec<Vec<Rational>> {
        let x0 = &self.points[0];
        self.points[1..]
            .iter()
            .map(|p| p.iter().zip(x0).map(|(a, b)| a - b).collect())
            .collect()
    }

    /// `D` restricted to the given columns.
    fn restricted(&self, cols: &[usize]) -> Vec<Vec<Rational>> {
        self.differences()
            .into_iter()
            .map(|d| cols.iter().map(|&c| d[c].clone()).collect())
            .collect()
    }

    /// Whether `point` lies in the affine hull.
    pub fn contains_in_hull(&self, point: &[Rational]) -> Result<bool> {
        Ok(self.hull_coordinates(point)?.is_some())
    }

    /// `μ` with `point = x_0 + Σ μ_i (x_i - x_0)`, if it exists.
    pub fn hull_coordinates(&self, point: &[Rational]) -> Result<Option<Vec<Rational>>> {
        let n = self.dimension();
        if point.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: point.len(),
            });
        }
        let rhs: Vec<Rational> = point.iter().zip(&self.points[0]).map(|(a, b)| a - b).collect();
        let dt = linalg::transpose(&self.differences(), n);
        Ok(linalg::solve(&dt, self.k(), &rhs))
    }

    fn check_elements(&self, set: &[usize]) -> Result<()> {
        let n = self.dimension();
        match set.iter().find(|&&e| e >= n) {
            Some(&e) => Err(Error::InvalidElement { element: e, size: n }),
            None => Ok(()),
        }
    }
}

/// Independence of `D ∪ {χ_e : e ∈ F}`, decided as `rank(D restricted to E \ F) = k`.
pub fn ax_independent(basis: &AffineBasis, f: &[usize]) -> Result<bool> {
    basis.check_elements(f)?;
    let mut in_f = vec![false; basis.dimension()];
    for &e in f {
        if in_f[e] {
            return Ok(false);
        }
        in_f[e] = true;
    }
    let rest: Vec<usize> = (0..basis.dimension()).filter(|&e| !in_f[e]).collect();
    Ok(linalg::rank(&basis.restricted(&rest), rest.len()) == basis.k())
}

/// `A_X` as an independence oracle (ground sets up to 64 elements).
pub struct AxMatroid<'a>(pub &'a AffineBasis);

impl Matroid for AxMatroid<'_> {
    fn ground_size(&self) -> usize {
        self.0.dimension()
    }

    fn is_independent(&self, set: ElementSet) -> bool {
        ax_independent(self.0, &set.to_vec()).unwrap_or(false)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearIdentifyResult {
    #[serde(rename = "S")]
    pub identifying_set: Vec<usize>,
    #[serde(rename = "weight", with = "rational::serde_rational")]
    pub total_weight: Rational,
    /// The complementary basis of `A_X`.
    #[serde(rename = "F")]
    pub basis_of_ax: Vec<usize>,
}

/// Heaviest elements first into a basis `F` of `A_X`; returns `S = E \ F`.
pub fn min_weight_identifying_from_basis(basis: &AffineBasis, w: &WeightedGroundSet) -> Result<LinearIdentifyResult> {
    let n = basis.dimension();
    w.expect_size(n)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| w.weight(b).cmp(w.weight(a)).then(a.cmp(&b)));
    let mut f = Vec::new();
    for e in order {
        f.push(e);
        if !ax_independent(basis, &f)? {
            f.pop();
        }
    }
    f.sort_unstable();
    let set: Vec<usize> = (0..n).filter(|e| f.binary_search(e).is_err()).collect();
    let total_weight = w.total(set.iter().copied());
    Ok(LinearIdentifyResult {
        identifying_set: set,
        total_weight,
        basis_of_ax: f,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearVerdict {
    pub identifying: bool,
    /// Nonzero `Δ ∈ lin(D)` with `Δ_e = 0` for `e ∈ S`.
    #[serde(with = "rational::serde_rational_vec_opt")]
    pub direction: Option<Vec<Rational>>,
}

/// `S` identifies iff `E \ S ∈ A_X`, i.e. `D` restricted to `S` has rank `k`.
/// Otherwise a left-kernel vector `λ` gives `Δ = Σ λ_i (x_i - x_0)`.
pub fn verify_identifying_from_basis(basis: &AffineBasis, set: &[usize]) -> Result<LinearVerdict> {
    basis.check_elements(set)?;
    let mut cols = set.to_vec();
    cols.sort_unstable();
    cols.dedup();
    let restricted = basis.restricted(&cols);
    let lambdas = linalg::null_space(&linalg::transpose(&restricted, cols.len()), basis.k());
    let Some(lambda) = lambdas.into_iter().next() else {
        return Ok(LinearVerdict {
            identifying: true,
            direction: None,
        });
    };
    let d = basis.differences();
    let delta: Vec<Rational> = (0..basis.dimension())
        .map(|e| d.iter().zip(&lambda).map(|(row, l)| &row[e] * l).sum())
        .collect();
    Ok(LinearVerdict {
        identifying: false,
        direction: Some(delta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use num_traits::Zero;

    fn pts(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    fn parallel() -> AffineBasis {
        AffineBasis::new(pts(&[&[1, 0], &[0, 1]])).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(AffineBasis::new(pts(&[&[0, 0], &[1, 1], &[2, 2]])).is_err());
        assert!(AffineBasis::new(vec![]).is_err());
        assert!(AffineBasis::new(pts(&[&[0, 0], &[1]])).is_err());
        let b = AffineBasis::from_spanning_points(&pts(&[&[0, 0], &[1, 1], &[2, 2], &[1, 0]])).unwrap();
        assert_eq!(b.k(), 2);
    }

    #[test]
    fn independence_examples() {
        let b = parallel();
        assert!(ax_independent(&b, &[0]).unwrap());
        assert!(!ax_independent(&b, &[0, 1]).unwrap());
        let single = AffineBasis::new(pts(&[&[1, 0, 1]])).unwrap();
        assert!(ax_independent(&single, &[0, 1, 2]).unwrap());
    }

    #[test]
    fn greedy_examples() {
        let b = parallel();
        let w = WeightedGroundSet::new(vec![int(1), int(5)]).unwrap();
        let r = min_weight_identifying_from_basis(&b, &w).unwrap();
        assert_eq!(r.identifying_set, vec![0]);
        assert_eq!(r.basis_of_ax, vec![1]);
        assert_eq!(r.total_weight, int(1));
        let single = AffineBasis::new(pts(&[&[1, 0, 1]])).unwrap();
        assert!(min_weight_identifying_from_basis(&single, &WeightedGroundSet::unit(3))
            .unwrap()
            .identifying_set
            .is_empty());
        // the two paths of the k=1 tight instance: arcs (s,v1),(s,t),(v2,t),(v1,v2)
        let tight = AffineBasis::new(pts(&[&[0, 1, 0, 0], &[1, 0, 1, 1]])).unwrap();
        let w = WeightedGroundSet::new(vec![int(3), int(2), int(4), int(9)]).unwrap();
        assert_eq!(
            min_weight_identifying_from_basis(&tight, &w).unwrap().identifying_set,
            vec![1]
        );
    }

    #[test]
    fn verify_examples() {
        let b = parallel();
        let v = verify_identifying_from_basis(&b, &[]).unwrap();
        assert_eq!(v.direction, Some(vec![int(-1), int(1)]));
        assert!(verify_identifying_from_basis(&b, &[0]).unwrap().identifying);
        assert!(verify_identifying_from_basis(&b, &[0, 1]).unwrap().identifying);
    }

    #[test]
    fn witness_direction_stays_in_hull() {
        let b = AffineBasis::new(pts(&[&[0, 0, 0, 1], &[1, 0, 1, 0], &[0, 1, 1, 0]])).unwrap();
        let v = verify_identifying_from_basis(&b, &[2]).unwrap();
        let delta = v.direction.unwrap();
        assert!(delta.iter().any(|x| !x.is_zero()));
        assert!(delta[2].is_zero());
        let moved: Vec<Rational> = b.points()[0].iter().zip(&delta).map(|(a, d)| a + d * int(3)).collect();
        assert!(b.contains_in_hull(&moved).unwrap());
    }
}
