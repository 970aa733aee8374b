//! Toll vectors that make a target state a minimizer of the tolled cost
//! `c(x) + γᵀx`, with `γ` supported on a set `S`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, NotIdentifyingWitness, Result};
use crate::explicit::{verify_explicit_identifying, SolutionList};
use crate::linalg;
use crate::linear::{verify_identifying_from_basis, AffineBasis};
use crate::rational::{self, Rational};

pub trait CostOracle {
    fn evaluate(&self, x: &[Rational]) -> Result<Rational>;

    fn subgradient(&self, _x: &[Rational]) -> Option<Vec<Rational>> {
        None
    }
}

/// `c(x) = cᵀx`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCost(pub Vec<Rational>);

impl CostOracle for LinearCost {
    fn evaluate(&self, x: &[Rational]) -> Result<Rational> {
        check_len(self.0.len(), x)?;
        Ok(linalg::dot(&self.0, x))
    }

    fn subgradient(&self, x: &[Rational]) -> Option<Vec<Rational>> {
        (x.len() == self.0.len()).then(|| self.0.clone())
    }
}

/// `c(x) = Σ_e (a_e x_e² / 2 + b_e x_e)` with `a ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableQuadratic {
    a: Vec<Rational>,
    b: Vec<Rational>,
}

impl SeparableQuadratic {
    pub fn new(a: Vec<Rational>, b: Vec<Rational>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        if let Some(e) = a.iter().position(|v| v.is_negative()) {
            return Err(Error::NegativeWeight { element: e });
        }
        Ok(SeparableQuadratic { a, b })
    }

    /// `Σ R_e x_e² / 2`, the energy of a resistor network.
    pub fn resistances(r: Vec<Rational>) -> Result<Self> {
        let n = r.len();
        SeparableQuadratic::new(r, vec![Rational::zero(); n])
    }

    pub fn a(&self) -> &[Rational] {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }
}

impl CostOracle for SeparableQuadratic {
    fn evaluate(&self, x: &[Rational]) -> Result<Rational> {
        check_len(self.a.len(), x)?;
        let half = rational::ratio(1, 2);
        Ok(x.iter()
            .zip(self.a.iter().zip(&self.b))
            .map(|(xe, (a, b))| &half * a * xe * xe + b * xe)
            .sum())
    }

    fn subgradient(&self, x: &[Rational]) -> Option<Vec<Rational>> {
        (x.len() == self.a.len()).then(|| {
            x.iter()
                .zip(self.a.iter().zip(&self.b))
                .map(|(xe, (a, b))| a * xe + b)
                .collect()
        })
    }
}

/// Costs listed point by point.
#[derive(Debug, Clone, PartialEq)]
pub struct TableCost {
    entries: Vec<(Vec<Rational>, Rational)>,
}

impl TableCost {
    pub fn new(entries: Vec<(Vec<Rational>, Rational)>) -> Self {
        TableCost { entries }
    }
}

impl CostOracle for TableCost {
    fn evaluate(&self, x: &[Rational]) -> Result<Rational> {
        self.entries
            .iter()
            .find(|(p, _)| p.as_slice() == x)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::InvalidParams("cost table has no entry for this point".into()))
    }
}

fn check_len(expected: usize, x: &[Rational]) -> Result<()> {
    if x.len() != expected {
        return Err(Error::LengthMismatch { expected, got: x.len() });
    }
    Ok(())
}

/// Dense `γ` together with the set it is supported on.
#[derive(Debug, Clone, PartialEq)]
pub struct TollVector {
    pub gamma: Vec<Rational>,
    pub set: Vec<usize>,
}

impl TollVector {
    pub fn tolled(&self, c: &dyn CostOracle, x: &[Rational]) -> Result<Rational> {
        Ok(c.evaluate(x)? + linalg::dot(&self.gamma, x))
    }

    pub fn as_map(&self) -> BTreeMap<usize, Rational> {
        self.set.iter().map(|&e| (e, self.gamma[e].clone())).collect()
    }
}

impl Serialize for TollVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut outer = s.serialize_map(Some(1))?;
        let inner: BTreeMap<String, String> = self
            .set
            .iter()
            .map(|&e| (e.to_string(), rational::format(&self.gamma[e])))
            .collect();
        outer.serialize_entry("gamma", &inner)?;
        outer.end()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TollOptions {
    /// Added to `M`; any positive value makes the target the unique minimizer.
    pub margin: Option<Rational>,
    pub require_nonnegative: bool,
}

fn finish(gamma: Vec<Rational>, set: Vec<usize>, opts: &TollOptions) -> Result<TollVector> {
    if opts.require_nonnegative {
        let negative: Vec<usize> = set.iter().copied().filter(|&e| gamma[e].is_negative()).collect();
        if !negative.is_empty() {
            return Err(Error::NegativeTolls { elements: negative });
        }
    }
    Ok(TollVector { gamma, set })
}

fn normalized(set: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&e) = s.iter().find(|&&e| e >= n) {
        return Err(Error::InvalidElement { element: e, size: n });
    }
    Ok(s)
}

/// `γ_e = -M` where the target has a one and `+M` where it has a zero, for
/// `e ∈ S`, with `M = max(1, 2·max_{x∈X} |c(x)|)` plus the optional margin.
pub fn discrete_tolls(
    x: &SolutionList,
    set: &[usize],
    c: &dyn CostOracle,
    target: &[bool],
    opts: &TollOptions,
) -> Result<TollVector> {
    let set = normalized(set, x.dim())?;
    let verdict = verify_explicit_identifying(x, &set)?;
    if let Some((i, j)) = verdict.witness {
        return Err(Error::NotIdentifying(NotIdentifyingWitness::SolutionPair(i, j)));
    }
    if x.index_of(target).is_none() {
        return Err(Error::TargetNotInX);
    }
    let mut big = Rational::zero();
    for i in 0..x.len() {
        big = big.max(c.evaluate(&x.rational_vector(i))?.abs());
    }
    let mut m = (big * rational::int(2)).max(Rational::one());
    if let Some(margin) = &opts.margin {
        m += margin;
    }
    let mut gamma = vec![Rational::zero(); x.dim()];
    for &e in &set {
        gamma[e] = if target[e] { -m.clone() } else { m.clone() };
    }
    finish(gamma, set, opts)
}

/// Indices of the solutions minimizing `c(x) + γᵀx`.
pub fn tolled_minimizers(x: &SolutionList, c: &dyn CostOracle, tolls: &TollVector) -> Result<Vec<usize>> {
    let values = (0..x.len())
        .map(|i| tolls.tolled(c, &x.rational_vector(i)))
        .collect::<Result<Vec<_>>>()?;
    let Some(best) = values.iter().min() else {
        return Ok(Vec::new());
    };
    Ok((0..x.len()).filter(|&i| &values[i] == best).collect())
}

/// Solves `(x_i - x_0)ᵀγ = -dᵀ(x_i - x_0)` for all `i`, with `γ` zero off
/// `S` and `d` a subgradient of `c` at the target.
pub fn convex_tolls(
    basis: &AffineBasis,
    set: &[usize],
    c: &dyn CostOracle,
    target: &[Rational],
    opts: &TollOptions,
) -> Result<TollVector> {
    let n = basis.dimension();
    let set = normalized(set, n)?;
    let verdict = verify_identifying_from_basis(basis, &set)?;
    if let Some(delta) = verdict.direction {
        return Err(Error::NotIdentifying(NotIdentifyingWitness::Direction(delta)));
    }
    if !basis.contains_in_hull(target)? {
        return Err(Error::TargetOutsideAffineHull);
    }
    let d = c.subgradient(target).ok_or(Error::NoSubgradient)?;
    let diffs = basis.differences();
    let rows: Vec<Vec<Rational>> = diffs
        .iter()
        .map(|di| set.iter().map(|&e| di[e].clone()).collect())
        .collect();
    let rhs: Vec<Rational> = diffs.iter().map(|di| -linalg::dot(&d, di)).collect();
    let solution = linalg::solve(&rows, set.len(), &rhs)
        .ok_or_else(|| Error::OracleInconsistent("toll system has no solution".into()))?;
    let mut gamma = vec![Rational::zero(); n];
    for (&e, v) in set.iter().zip(solution) {
        gamma[e] = v;
    }
    finish(gamma, set, opts)
}

/// One inequality `coeffs·γ ≤ rhs` of the optimality system for a target,
/// coming from the comparison with solution `against`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TollInequality {
    pub against: usize,
    #[serde(with = "rational::serde_rational_vec")]
    pub coeffs: Vec<Rational>,
    #[serde(with = "rational::serde_rational")]
    pub rhs: Rational,
}

/// An infeasible system together with nonnegative multipliers `y` such that
/// `Σ y_i coeffs_i = 0` and `Σ y_i rhs_i < 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlCounterexample {
    pub cost_index: usize,
    pub target_index: usize,
    #[serde(with = "rational::serde_rational_vec")]
    pub target: Vec<Rational>,
    pub inequalities: Vec<TollInequality>,
    #[serde(with = "rational::serde_rational_vec")]
    pub multipliers: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlVerdict {
    pub identifying: bool,
    pub controlling: bool,
    pub counterexample: Option<ControlCounterexample>,
}

/// For each cost and each target in `X`, decides by Fourier–Motzkin
/// elimination whether some `γ` supported on `S` makes the target optimal.
/// Reports the first failing `(cost, target)` pair.
pub fn controlling_counterexample_check(
    points: &[Vec<Rational>],
    set: &[usize],
    costs: &[LinearCost],
    max_inequalities: usize,
) -> Result<ControlVerdict> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidParams("no solutions".into()));
    };
    let n = first.len();
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: p.len(),
        });
    }
    let set = normalized(set, n)?;
    let mut projections: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| set.iter().map(|&e| p[e].clone()).collect())
        .collect();
    projections.sort();
    projections.dedup();
    let identifying = projections.len() == points.len();

    for (ci, c) in costs.iter().enumerate() {
        let values = points.iter().map(|p| c.evaluate(p)).collect::<Result<Vec<_>>>()?;
        for (ti, target) in points.iter().enumerate() {
            let inequalities: Vec<TollInequality> = points
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != ti)
                .map(|(i, p)| TollInequality {
                    against: i,
                    coeffs: set.iter().map(|&e| &target[e] - &p[e]).collect(),
                    rhs: &values[i] - &values[ti],
                })
                .collect();
            if let Feasibility::Infeasible(multipliers) = fourier_motzkin(&inequalities, set.len(), max_inequalities)? {
                return Ok(ControlVerdict {
                    identifying,
                    controlling: false,
                    counterexample: Some(ControlCounterexample {
                        cost_index: ci,
                        target_index: ti,
                        target: target.clone(),
                        inequalities,
                        multipliers,
                    }),
                });
            }
        }
    }
    Ok(ControlVerdict {
        identifying,
        controlling: true,
        counterexample: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    /// Farkas multipliers over the input inequalities.
    Infeasible(Vec<Rational>),
}

#[derive(Clone)]
struct Row {
    coeffs: Vec<Rational>,
    rhs: Rational,
    mult: Vec<Rational>,
}

/// Decides `{γ : coeffs_i·γ ≤ rhs_i}` exactly. Returns a point or a Farkas
/// certificate; fails once an elimination round exceeds `max_rows`.
pub fn fourier_motzkin(ineqs: &[TollInequality], vars: usize, max_rows: usize) -> Result<Feasibility> {
    let m = ineqs.len();
    let mut rows: Vec<Row> = ineqs
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let mut mult = vec![Rational::zero(); m];
            mult[i] = Rational::one();
            Row {
                coeffs: q.coeffs.clone(),
                rhs: q.rhs.clone(),
                mult,
            }
        })
        .collect();
    // stages[j] holds the system before variable j is eliminated
    let mut stages: Vec<Vec<Row>> = Vec::with_capacity(vars);
    for j in 0..vars {
        let (mut upper, mut lower, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in &rows {
            if r.coeffs[j].is_positive() {
                upper.push(r.clone());
            } else if r.coeffs[j].is_negative() {
                lower.push(r.clone());
            } else {
                rest.push(r.clone());
            }
        }
        if rest.len() + upper.len() * lower.len() > max_rows {
            return Err(Error::EliminationExplosion(format!(
                "{} inequalities after eliminating variable {j}",
                rest.len() + upper.len() * lower.len()
            )));
        }
        for u in &upper {
            for l in &lower {
                let (a, b) = (-l.coeffs[j].clone(), u.coeffs[j].clone());
                rest.push(Row {
                    coeffs: u.coeffs.iter().zip(&l.coeffs).map(|(x, y)| &a * x + &b * y).collect(),
                    rhs: &a * &u.rhs + &b * &l.rhs,
                    mult: u.mult.iter().zip(&l.mult).map(|(x, y)| &a * x + &b * y).collect(),
                });
            }
        }
        stages.push(std::mem::replace(&mut rows, rest));
    }
    if let Some(bad) = rows.iter().find(|r| r.rhs.is_negative()) {
        return Ok(Feasibility::Infeasible(bad.mult.clone()));
    }
    let mut gamma = vec![Rational::zero(); vars];
    for j in (0..vars).rev() {
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for r in &stages[j] {
            let a = &r.coeffs[j];
            if a.is_zero() {
                continue;
            }
            let rest: Rational = (j + 1..vars).map(|k| &r.coeffs[k] * &gamma[k]).sum();
            let bound = (&r.rhs - rest) / a;
            if a.is_positive() {
                hi = Some(hi.map_or(bound.clone(), |h| h.min(bound)));
            } else {
                lo = Some(lo.map_or(bound.clone(), |l| l.max(bound)));
            }
        }
        let zero = Rational::zero();
        gamma[j] = match (lo, hi) {
            (Some(l), _) if l > zero => l,
            (_, Some(h)) if h < zero => h,
            _ => zero,
        };
    }
    Ok(Feasibility::Feasible(gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn list(rows: &[&str]) -> SolutionList {
        SolutionList::from_strings(rows[0].len(), rows).unwrap()
    }

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn zero_cost_uses_unit_toll() {
        let x = list(&["10", "01"]);
        let c = LinearCost(vec![int(0), int(0)]);
        let t = discrete_tolls(&x, &[0], &c, &bits("01"), &TollOptions::default()).unwrap();
        assert_eq!(t.gamma, vec![int(1), int(0)]);
        assert_eq!(tolled_minimizers(&x, &c, &t).unwrap(), vec![1]);
    }

    #[test]
    fn long_path_made_optimal() {
        // k=1 tight instance arcs: (s,v1), (s,t), (v2,t), e1=(v1,v2)
        let x = list(&["0100", "1011"]);
        let c = LinearCost(vec![int(1); 4]);
        let t = discrete_tolls(&x, &[3], &c, &bits("1011"), &TollOptions::default()).unwrap();
        assert_eq!(t.gamma[3], int(-6));
        assert!(tolled_minimizers(&x, &c, &t).unwrap().contains(&1));
    }

    #[test]
    fn discrete_errors() {
        let x = list(&["00", "01", "10"]);
        let c = LinearCost(vec![int(1), int(1)]);
        assert!(matches!(
            discrete_tolls(&x, &[0], &c, &bits("00"), &TollOptions::default()),
            Err(Error::NotIdentifying(NotIdentifyingWitness::SolutionPair(0, 1)))
        ));
        assert!(matches!(
            discrete_tolls(&x, &[0, 1], &c, &bits("11"), &TollOptions::default()),
            Err(Error::TargetNotInX)
        ));
        let opts = TollOptions {
            require_nonnegative: true,
            ..Default::default()
        };
        assert!(matches!(
            discrete_tolls(&x, &[0, 1], &c, &bits("01"), &opts),
            Err(Error::NegativeTolls { elements }) if elements == vec![1]
        ));
    }

    #[test]
    fn margin_makes_target_unique() {
        let x = list(&["10", "01"]);
        let c = LinearCost(vec![int(0), int(0)]);
        let opts = TollOptions {
            margin: Some(ratio(1, 10)),
            ..Default::default()
        };
        let t = discrete_tolls(&x, &[0], &c, &bits("10"), &opts).unwrap();
        assert_eq!(tolled_minimizers(&x, &c, &t).unwrap(), vec![0]);
    }

    #[test]
    fn convex_parallel_arcs() {
        let basis = AffineBasis::new(vec![vec![int(1), int(0)], vec![int(0), int(1)]]).unwrap();
        let c = SeparableQuadratic::resistances(vec![int(1), int(1)]).unwrap();
        let t = convex_tolls(&basis, &[0], &c, &[ratio(3, 4), ratio(1, 4)], &TollOptions::default()).unwrap();
        assert_eq!(t.gamma, vec![ratio(-1, 2), int(0)]);
        let t = convex_tolls(&basis, &[0], &c, &[ratio(1, 2), ratio(1, 2)], &TollOptions::default()).unwrap();
        assert_eq!(t.gamma, vec![int(0), int(0)]);
        assert!(matches!(
            convex_tolls(&basis, &[], &c, &[ratio(1, 2), ratio(1, 2)], &TollOptions::default()),
            Err(Error::NotIdentifying(NotIdentifyingWitness::Direction(_)))
        ));
        assert!(matches!(
            convex_tolls(&basis, &[0], &c, &[int(1), int(1)], &TollOptions::default()),
            Err(Error::TargetOutsideAffineHull)
        ));
        let table = TableCost::new(vec![]);
        assert!(matches!(
            convex_tolls(&basis, &[0], &table, &[int(1), int(0)], &TollOptions::default()),
            Err(Error::NoSubgradient)
        ));
    }

    #[test]
    fn integer_example_is_not_controlling() {
        let pts: Vec<Vec<Rational>> = [[0, 0, 0], [0, 1, 1], [1, 0, 2], [1, 1, 3]]
            .iter()
            .map(|p| p.iter().map(|&v| int(v)).collect())
            .collect();
        let c = LinearCost(vec![int(1), int(-1), int(1)]);
        let v = controlling_counterexample_check(&pts, &[2], &[c], 1000).unwrap();
        assert!(v.identifying);
        assert!(!v.controlling);
        let cx = v.counterexample.unwrap();
        assert_eq!(cx.target, vec![int(1), int(0), int(2)]);
        let combined: Rational = cx
            .inequalities
            .iter()
            .zip(&cx.multipliers)
            .map(|(q, y)| &q.coeffs[0] * y)
            .sum();
        let rhs: Rational = cx
            .inequalities
            .iter()
            .zip(&cx.multipliers)
            .map(|(q, y)| &q.rhs * y)
            .sum();
        assert!(combined.is_zero());
        assert!(rhs.is_negative());
        assert!(cx.multipliers.iter().all(|y| !y.is_negative()));
    }

    #[test]
    fn singleton_and_binary_are_controlling() {
        let one = vec![vec![int(1), int(0)]];
        let v = controlling_counterexample_check(&one, &[], &[LinearCost(vec![int(5), int(-2)])], 100).unwrap();
        assert!(v.controlling);
        let pts: Vec<Vec<Rational>> = [[0, 0], [0, 1], [1, 0], [1, 1]]
            .iter()
            .map(|p| p.iter().map(|&v| int(v)).collect())
            .collect();
        let costs = vec![LinearCost(vec![int(1), int(-3)]), LinearCost(vec![int(-2), int(7)])];
        assert!(
            controlling_counterexample_check(&pts, &[0, 1], &costs, 1000)
                .unwrap()
                .controlling
        );
    }

    #[test]
    fn fourier_motzkin_point_is_feasible() {
        let q = |c: &[i64], r: i64| TollInequality {
            against: 0,
            coeffs: c.iter().map(|&v| int(v)).collect(),
            rhs: int(r),
        };
        let sys = vec![q(&[1, 1], 4), q(&[-1, 0], -1), q(&[0, -1], -2), q(&[1, -1], 0)];
        match fourier_motzkin(&sys, 2, 100).unwrap() {
            Feasibility::Feasible(g) => {
                for s in &sys {
                    assert!(linalg::dot(&s.coeffs, &g) <= s.rhs);
                }
            }
            Feasibility::Infeasible(_) => panic!("system is feasible"),
        }
        assert!(matches!(
            fourier_motzkin(&sys, 2, 1),
            Err(Error::EliminationExplosion(_))
        ));
    }
}
