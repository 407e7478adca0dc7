//! Exact two-phase simplex with Bland's rule.
//!
//! `min ⟨c, x⟩` over `{x : A x ≥ b}` with `x` free is solved in standard form
//! `x = x⁺ − x⁻`, `A x − s = b`, one artificial per row. Every outcome carries
//! a certificate that is re-checked before returning.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::HPolyhedron;
use crate::error::{Error, Result};
use crate::exact_linear::{dot, serde_rational, serde_rational_vec, QVec, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum LpOutcome {
    /// `dual` is a row multiplier `y ≥ 0` with `Aᵀy = c` and `⟨b, y⟩ = value`.
    Optimal {
        #[serde(with = "serde_rational")]
        value: Rational,
        #[serde(with = "serde_rational_vec")]
        point: QVec,
        #[serde(with = "serde_rational_vec")]
        dual: QVec,
    },
    /// `point` is feasible; `A·direction ≥ 0` and `⟨c, direction⟩ < 0`.
    Unbounded {
        #[serde(with = "serde_rational_vec")]
        point: QVec,
        #[serde(with = "serde_rational_vec")]
        direction: QVec,
    },
    /// Farkas multiplier: `y ≥ 0`, `Aᵀy = 0`, `⟨b, y⟩ > 0`.
    Infeasible {
        #[serde(with = "serde_rational_vec")]
        certificate: QVec,
    },
}

impl LpOutcome {
    pub fn optimal_value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn optimal_point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<QVec>,
    rhs: QVec,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        self.rhs[r] *= &inv;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (v, p) in self.rows[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    fn reduced_cost(&self, cost: &[Rational], j: usize) -> Rational {
        let mut d = cost[j].clone();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if !cost[b].is_zero() && !row[j].is_zero() {
                d -= &cost[b] * &row[j];
            }
        }
        d
    }

    /// Runs Bland's rule over the allowed columns. Returns the entering column
    /// of an unbounded ray, if one is found.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> Option<usize> {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.reduced_cost(cost, j).is_negative())
            else {
                return None;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Some(enter),
            }
        }
    }

    fn value_of(&self, total: usize) -> QVec {
        let mut x = vec![Rational::zero(); total];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rhs[i].clone();
        }
        x
    }

    /// `c_B B⁻¹` read off the artificial block starting at `art`.
    fn duals(&self, cost: &[Rational], art: usize) -> QVec {
        let m = self.rows.len();
        (0..m)
            .map(|i| {
                let mut y = Rational::zero();
                for (row, &b) in self.rows.iter().zip(&self.basis) {
                    if !cost[b].is_zero() {
                        y += &cost[b] * &row[art + i];
                    }
                }
                y
            })
            .collect()
    }
}

/// Minimizes `⟨objective, x⟩` over `region`.
pub fn lp_minimize(objective: &[Rational], region: &HPolyhedron) -> Result<LpOutcome> {
    let n = region.dim;
    if objective.len() != n {
        return Err(Error::dim(format!(
            "objective has {} entries for a {n}-dimensional region",
            objective.len()
        )));
    }
    let m = region.constraints.len();
    let (xp, xm, sl, art) = (0, n, 2 * n, 2 * n + m);
    let total = 2 * n + 2 * m;

    let mut flip = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, c) in region.constraints.iter().enumerate() {
        let f = if c.rhs.is_negative() { -1 } else { 1 };
        let fq = Rational::from_integer(f.into());
        let mut row = vec![Rational::zero(); total];
        for j in 0..n {
            row[xp + j] = &fq * &c.normal[j];
            row[xm + j] = -&row[xp + j];
        }
        row[sl + i] = -fq.clone();
        row[art + i] = Rational::one();
        rows.push(row);
        rhs.push(&fq * &c.rhs);
        flip.push(fq);
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (art..art + m).collect(),
    };

    let mut phase1 = vec![Rational::zero(); total];
    for c in phase1.iter_mut().skip(art) {
        *c = Rational::one();
    }
    t.optimize(&phase1, art);
    let infeasibility: Rational = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(&b, _)| b >= art)
        .map(|(_, v)| v.clone())
        .sum();
    if infeasibility.is_positive() {
        let y: QVec = t
            .duals(&phase1, art)
            .iter()
            .zip(&flip)
            .map(|(y, f)| y * f)
            .collect();
        return certify_infeasible(region, y);
    }

    // Drive zero-level artificials out of the basis where possible.
    for r in 0..m {
        if t.basis[r] >= art {
            if let Some(j) = (0..art).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, j);
            }
        }
    }

    let mut cost = vec![Rational::zero(); total];
    for j in 0..n {
        cost[xp + j] = objective[j].clone();
        cost[xm + j] = -objective[j].clone();
    }
    let unbounded = t.optimize(&cost, art);
    let values = t.value_of(total);
    let point: QVec = (0..n).map(|j| &values[xp + j] - &values[xm + j]).collect();

    if let Some(enter) = unbounded {
        let mut dir_std = vec![Rational::zero(); total];
        dir_std[enter] = Rational::one();
        for (i, &b) in t.basis.iter().enumerate() {
            dir_std[b] = -t.rows[i][enter].clone();
        }
        let direction: QVec = (0..n).map(|j| &dir_std[xp + j] - &dir_std[xm + j]).collect();
        return certify_unbounded(objective, region, point, direction);
    }

    let value = dot(objective, &point);
    let dual: QVec = t
        .duals(&cost, art)
        .iter()
        .zip(&flip)
        .map(|(y, f)| y * f)
        .collect();
    certify_optimal(objective, region, value, point, dual)
}

fn transpose_apply(region: &HPolyhedron, y: &[Rational]) -> QVec {
    let mut out = vec![Rational::zero(); region.dim];
    for (c, yi) in region.constraints.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (o, a) in out.iter_mut().zip(&c.normal) {
            *o += yi * a;
        }
    }
    out
}

fn rhs_dot(region: &HPolyhedron, y: &[Rational]) -> Rational {
    region
        .constraints
        .iter()
        .zip(y)
        .map(|(c, yi)| &c.rhs * yi)
        .sum()
}

fn certify_infeasible(region: &HPolyhedron, y: QVec) -> Result<LpOutcome> {
    let ok = y.iter().all(|v| !v.is_negative())
        && transpose_apply(region, &y).iter().all(Zero::is_zero)
        && rhs_dot(region, &y).is_positive();
    if !ok {
        return Err(Error::inconsistent("simplex produced an invalid Farkas certificate"));
    }
    Ok(LpOutcome::Infeasible { certificate: y })
}

fn certify_unbounded(
    objective: &[Rational],
    region: &HPolyhedron,
    point: QVec,
    direction: QVec,
) -> Result<LpOutcome> {
    let ok = region.contains(&point)
        && region
            .constraints
            .iter()
            .all(|c| !dot(&c.normal, &direction).is_negative())
        && dot(objective, &direction).is_negative();
    if !ok {
        return Err(Error::inconsistent("simplex produced an invalid unbounded ray"));
    }
    Ok(LpOutcome::Unbounded { point, direction })
}

fn certify_optimal(
    objective: &[Rational],
    region: &HPolyhedron,
    value: Rational,
    point: QVec,
    dual: QVec,
) -> Result<LpOutcome> {
    let ok = region.contains(&point)
        && dual.iter().all(|v| !v.is_negative())
        && transpose_apply(region, &dual) == objective
        && rhs_dot(region, &dual) == value;
    if !ok {
        return Err(Error::inconsistent("simplex optimum failed its duality check"));
    }
    Ok(LpOutcome::Optimal { value, point, dual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linear::{int, ratio};

    fn region(rows: &[(&[i64], i64)]) -> HPolyhedron {
        HPolyhedron::from_int_rows(
            &rows
                .iter()
                .map(|(n, r)| (n.to_vec(), int(*r)))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn half_line_minimum() {
        let out = lp_minimize(&[int(1)], &region(&[(&[1], 3)])).unwrap();
        assert_eq!(out.optimal_value(), Some(&int(3)));
        assert_eq!(out.optimal_point().unwrap(), &[int(3)]);
    }

    #[test]
    fn contradictory_bounds() {
        let r = region(&[(&[1], 0), (&[-1], 1)]);
        match lp_minimize(&[int(1)], &r).unwrap() {
            LpOutcome::Infeasible { certificate } => {
                assert_eq!(certificate.len(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_direction() {
        let r = region(&[(&[1, 0], 0)]);
        match lp_minimize(&[int(0), int(1)], &r).unwrap() {
            LpOutcome::Unbounded { direction, .. } => assert!(direction[1].is_negative()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn no_constraints() {
        let r = HPolyhedron::new(2, Vec::new()).unwrap();
        assert_eq!(
            lp_minimize(&[int(0), int(0)], &r).unwrap().optimal_value(),
            Some(&int(0))
        );
        assert!(matches!(
            lp_minimize(&[int(1), int(0)], &r).unwrap(),
            LpOutcome::Unbounded { .. }
        ));
    }

    #[test]
    fn fractional_vertex() {
        // min x + y s.t. 2x + y >= 1, x + 2y >= 1: optimum 2/3 at (1/3, 1/3).
        let r = region(&[(&[2, 1], 1), (&[1, 2], 1)]);
        let out = lp_minimize(&[int(1), int(1)], &r).unwrap();
        assert_eq!(out.optimal_value(), Some(&ratio(2, 3)));
        assert_eq!(out.optimal_point().unwrap(), &[ratio(1, 3), ratio(1, 3)]);
    }

    #[test]
    fn degenerate_equalities() {
        // x = 1 written as two inequalities plus a redundant copy.
        let r = region(&[(&[1], 1), (&[-1], -1), (&[2], 2)]);
        let out = lp_minimize(&[int(-5)], &r).unwrap();
        assert_eq!(out.optimal_value(), Some(&int(-5)));
    }
}
