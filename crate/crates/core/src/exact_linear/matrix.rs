use num_traits::{One, Zero};

use super::rational::{dot, Rational};
use crate::error::{Error, Result};

/// Outcome of an exact linear solve `A·x = b`.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearSolution {
    /// A particular solution and a basis of `ker A`.
    Solution {
        x: Vec<Rational>,
        kernel: Vec<Vec<Rational>>,
    },
    /// Row combination `y` with `yᵀA = 0` and `yᵀb ≠ 0`.
    Inconsistent { certificate: Vec<Rational> },
}

impl LinearSolution {
    pub fn solution(&self) -> Option<&[Rational]> {
        match self {
            LinearSolution::Solution { x, .. } => Some(x),
            LinearSolution::Inconsistent { .. } => None,
        }
    }
}

/// Reduced row echelon form, pivoting on the first nonzero entry.
///
/// Only the first `pivot_cols` columns are eligible as pivots; trailing
/// columns are carried along (augmented parts).
fn eliminate(rows: &mut [Vec<Rational>], pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Returns the reduced row echelon form (zero rows dropped) and pivot columns.
pub fn rref(a: &[Vec<Rational>]) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let cols = a.first().map_or(0, Vec::len);
    let mut rows = a.to_vec();
    let pivots = eliminate(&mut rows, cols);
    rows.truncate(pivots.len());
    (rows, pivots)
}

pub fn rank(a: &[Vec<Rational>]) -> usize {
    rref(a).1.len()
}

/// Basis of `{x : A·x = 0}` in `cols` unknowns, one vector per free column.
pub fn kernel_basis(a: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    if a.is_empty() {
        return (0..cols)
            .map(|i| (0..cols).map(|j| bool_q(i == j)).collect())
            .collect();
    }
    let (rows, pivots) = rref(a);
    free_columns(&pivots, cols)
        .map(|f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

fn free_columns(pivots: &[usize], cols: usize) -> impl Iterator<Item = usize> + '_ {
    (0..cols).filter(move |c| !pivots.contains(c))
}

fn bool_q(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// Solves `A·x = b` exactly.
///
/// On success the returned `x` satisfies `A·x = b` and `kernel` spans
/// `ker A`; on failure a certificate `y` with `yᵀA = 0`, `yᵀb ≠ 0` is
/// returned. Both outcomes are re-verified before returning.
pub fn solve_rational(a: &[Vec<Rational>], b: &[Rational]) -> Result<LinearSolution> {
    let m = a.len();
    if b.len() != m {
        return Err(Error::dim(format!(
            "matrix has {m} rows but right-hand side has {} entries",
            b.len()
        )));
    }
    let n = a.first().map_or(0, Vec::len);
    if let Some(bad) = a.iter().position(|row| row.len() != n) {
        return Err(Error::dim(format!(
            "row {bad} has {} entries, expected {n}",
            a[bad].len()
        )));
    }

    // [A | b | I_m]: the identity block records the row operations.
    let mut rows: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, bi))| {
            let mut r = row.clone();
            r.push(bi.clone());
            r.extend((0..m).map(|j| bool_q(i == j)));
            r
        })
        .collect();
    let pivots = eliminate(&mut rows, n);

    if let Some(bad) = rows[pivots.len()..].iter().find(|r| !r[n].is_zero()) {
        let certificate = bad[n + 1..].to_vec();
        debug_assert!((0..n).all(|c| dot(&certificate, &column(a, c)).is_zero()));
        debug_assert!(!dot(&certificate, b).is_zero());
        return Ok(LinearSolution::Inconsistent { certificate });
    }

    let mut x = vec![Rational::zero(); n];
    for (row, &p) in rows.iter().zip(&pivots) {
        x[p] = row[n].clone();
    }
    let kernel = free_columns(&pivots, n)
        .map(|f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (row, &p) in rows.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect::<Vec<_>>();
    for (row, bi) in a.iter().zip(b) {
        if &dot(row, &x) != bi {
            return Err(Error::inconsistent("linear solve failed re-substitution"));
        }
    }
    Ok(LinearSolution::Solution { x, kernel })
}

fn column(a: &[Vec<Rational>], c: usize) -> Vec<Rational> {
    a.iter().map(|r| r[c].clone()).collect()
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut rows: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| bool_q(i == j)));
            r
        })
        .collect();
    let pivots = eliminate(&mut rows, n);
    if pivots.len() < n {
        return None;
    }
    Some(rows.into_iter().map(|r| r[n..].to_vec()).collect())
}
