//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Reduced row echelon form of `rows` (each of length `cols`) and the pivot
/// column of each nonzero row.
pub fn rref(rows: &[Vec<Rational>], cols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<Rational>], cols: usize) -> usize {
    rref(rows, cols).1.len()
}

/// Basis of `{v : A v = 0}` for `A` given by `rows`.
pub fn null_space(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let (m, pivots) = rref(rows, cols);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = -row[free].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `A v = b`, with free variables set to zero.
pub fn solve(rows: &[Vec<Rational>], cols: usize, rhs: &[Rational]) -> Option<Vec<Rational>> {
    let augmented: Vec<Vec<Rational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&augmented, cols + 1);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut v = vec![Rational::zero(); cols];
    for (row, &p) in m.iter().zip(&pivots) {
        v[p] = row[cols].clone();
    }
    Some(v)
}

pub fn transpose(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    (0..cols).map(|c| rows.iter().map(|r| r[c].clone()).collect()).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a, 3), 2);
        let k = null_space(&a, 3);
        assert_eq!(k.len(), 1);
        for row in &a {
            assert!(dot(row, &k[0]).is_zero());
        }
        assert_eq!(rank(&[], 4), 0);
        assert_eq!(null_space(&[], 2).len(), 2);
    }

    #[test]
    fn solving() {
        let a = m(&[&[1, 1], &[1, -1]]);
        assert_eq!(solve(&a, 2, &[int(3), int(1)]), Some(vec![int(2), int(1)]));
        let b = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve(&b, 2, &[int(1), int(3)]), None);
    }

    proptest::proptest! {
        #[test]
        fn kernel_vectors_are_annihilated(raw in proptest::collection::vec(-3i64..4, 12)) {
            let a: Vec<Vec<Rational>> = raw.chunks(4).map(|r| r.iter().map(|&v| int(v)).collect()).collect();
            let k = null_space(&a, 4);
            proptest::prop_assert_eq!(k.len() + rank(&a, 4), 4);
            for v in &k {
                for row in &a {
                    proptest::prop_assert!(dot(row, v).is_zero());
                }
            }
        }
    }
}
