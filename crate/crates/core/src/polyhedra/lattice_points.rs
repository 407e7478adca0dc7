//! Lattice points of bounded polyhedra.
//!
//! The polytope is projected onto each coordinate prefix (projected vertices,
//! then facets), so each prefix level is an exact description of the shadow.
//! Enumeration walks coordinates in order, taking the integer range of the
//! next coordinate from the shadow one level down. Arithmetic in the walk is
//! `i128` with checked operations.

use num_traits::{ToPrimitive, Zero};

use super::{lp_minimize, HPolyhedron, LpOutcome, VPolyhedron};
use crate::error::{Error, Result};
use crate::exact_linear::{int, lcm_of_denominators, QVec, Rational};

struct IntRow {
    coeffs: Vec<i128>,
    rhs: i128,
}

fn overflow() -> Error {
    Error::domain("lattice enumeration exceeds 128-bit coordinates")
}

fn integer_row(normal: &[Rational], rhs: &Rational) -> Result<IntRow> {
    let l = lcm_of_denominators(normal.iter().chain(std::iter::once(rhs)));
    let scale = Rational::from_integer(l);
    let conv = |q: &Rational| -> Result<i128> {
        let v = q * &scale;
        v.to_integer().to_i128().ok_or_else(overflow)
    };
    Ok(IntRow {
        coeffs: normal.iter().map(conv).collect::<Result<_>>()?,
        rhs: conv(rhs)?,
    })
}

/// Integer-row descriptions of the projections onto coordinates `0..=k`.
fn shadows(v: &VPolyhedron) -> Result<Vec<Vec<IntRow>>> {
    let n = v.dim;
    let mut levels = Vec::with_capacity(n);
    for k in 0..n {
        let pts: Vec<QVec> = v.vertices.iter().map(|p| p[..=k].to_vec()).collect();
        let shadow = VPolyhedron {
            dim: k + 1,
            vertices: pts,
            rays: Vec::new(),
            lines: Vec::new(),
        }
        .to_h();
        let rows = shadow
            .constraints
            .iter()
            .map(|c| integer_row(&c.normal, &c.rhs))
            .collect::<Result<Vec<_>>>()?;
        levels.push(rows);
    }
    Ok(levels)
}

/// `ceil(a / b)` for `b > 0`.
fn div_ceil(a: i128, b: i128) -> i128 {
    -(-a).div_euclid(b)
}

/// `floor(a / b)` for `b > 0`.
fn div_floor(a: i128, b: i128) -> i128 {
    -div_ceil(-a, b)
}

/// Integer range of coordinate `k` given the fixed prefix.
fn range(rows: &[IntRow], prefix: &[i128], k: usize) -> Result<Option<(i128, i128)>> {
    let mut lo: Option<i128> = None;
    let mut hi: Option<i128> = None;
    for row in rows {
        let a = row.coeffs[k];
        if a == 0 {
            continue;
        }
        let mut s = row.rhs;
        for (c, x) in row.coeffs[..k].iter().zip(prefix) {
            let t = c.checked_mul(*x).ok_or_else(overflow)?;
            s = s.checked_sub(t).ok_or_else(overflow)?;
        }
        if a > 0 {
            let b = div_ceil(s, a);
            lo = Some(lo.map_or(b, |l| l.max(b)));
        } else {
            let b = div_floor(-s, -a);
            hi = Some(hi.map_or(b, |h| h.min(b)));
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) => Ok((l <= h).then_some((l, h))),
        _ => Err(Error::inconsistent("bounded shadow missing a coordinate bound")),
    }
}

fn walk(
    levels: &[Vec<IntRow>],
    prefix: &mut Vec<i128>,
    visit: &mut dyn FnMut(&[i128], i128, i128) -> Result<()>,
) -> Result<()> {
    let k = prefix.len();
    let Some((lo, hi)) = range(&levels[k], prefix, k)? else {
        return Ok(());
    };
    if k + 1 == levels.len() {
        return visit(prefix, lo, hi);
    }
    for x in lo..=hi {
        prefix.push(x);
        walk(levels, prefix, visit)?;
        prefix.pop();
    }
    Ok(())
}

/// Checks boundedness by minimizing and maximizing every coordinate.
fn prepare(p: &HPolyhedron) -> Result<Option<VPolyhedron>> {
    for k in 0..p.dim {
        for sign in [1, -1] {
            let mut c = vec![Rational::zero(); p.dim];
            c[k] = int(sign);
            match lp_minimize(&c, p)? {
                LpOutcome::Infeasible { .. } => return Ok(None),
                LpOutcome::Unbounded { direction, .. } => {
                    let d: Vec<String> = direction.iter().map(ToString::to_string).collect();
                    return Err(Error::pre(format!(
                        "polyhedron is unbounded along ({})",
                        d.join(", ")
                    )));
                }
                LpOutcome::Optimal { .. } => {}
            }
        }
    }
    let v = p.to_v();
    Ok((!v.is_empty()).then_some(v))
}

fn to_i64(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| overflow())
}

/// All integer points of a bounded polyhedron, in lexicographic order.
pub fn lattice_points(p: &HPolyhedron) -> Result<Vec<Vec<i64>>> {
    if p.dim == 0 {
        return Ok(if p.is_empty() { vec![] } else { vec![vec![]] });
    }
    let Some(v) = prepare(p)? else {
        return Ok(Vec::new());
    };
    let levels = shadows(&v)?;
    let mut out = Vec::new();
    walk(&levels, &mut Vec::new(), &mut |prefix, lo, hi| {
        for x in lo..=hi {
            let mut pt = prefix.iter().map(|&c| to_i64(c)).collect::<Result<Vec<_>>>()?;
            pt.push(to_i64(x)?);
            out.push(pt);
        }
        Ok(())
    })?;
    debug_assert!(out.iter().all(|pt| p.contains(&crate::exact_linear::to_rational_vec(pt))));
    Ok(out)
}

/// Number of integer points of a bounded polyhedron.
pub fn count_lattice_points(p: &HPolyhedron) -> Result<u128> {
    if p.dim == 0 {
        return Ok(u128::from(!p.is_empty()));
    }
    let Some(v) = prepare(p)? else {
        return Ok(0);
    };
    let levels = shadows(&v)?;
    let mut total: u128 = 0;
    walk(&levels, &mut Vec::new(), &mut |_, lo, hi| {
        let span = u128::try_from(hi - lo + 1).map_err(|_| overflow())?;
        total = total.checked_add(span).ok_or_else(overflow)?;
        Ok(())
    })?;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(rows: &[(&[i64], i64)]) -> HPolyhedron {
        HPolyhedron::from_int_rows(
            &rows
                .iter()
                .map(|(n, r)| (n.to_vec(), int(*r)))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(div_ceil(7, 2), 4);
        assert_eq!(div_ceil(-7, 2), -3);
        assert_eq!(div_ceil(6, 3), 2);
        assert_eq!(div_floor(7, 2), 3);
        assert_eq!(div_floor(-7, 2), -4);
    }

    #[test]
    fn unit_triangle() {
        let p = poly(&[(&[1, 0], 0), (&[0, 1], 0), (&[-1, -1], -1)]);
        assert_eq!(lattice_points(&p).unwrap(), vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(count_lattice_points(&p).unwrap(), 3);
    }

    #[test]
    fn single_point() {
        let p = poly(&[(&[1], 0), (&[-1], 0)]);
        assert_eq!(lattice_points(&p).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn dilated_triangle() {
        let p = poly(&[(&[1, 0], 0), (&[0, 1], 0), (&[-1, -1], -2)]);
        assert_eq!(lattice_points(&p).unwrap().len(), 6);
    }

    #[test]
    fn unbounded_rejected() {
        let p = poly(&[(&[1, 0], 0)]);
        assert!(matches!(lattice_points(&p), Err(Error::Precondition(_))));
    }

    #[test]
    fn empty_and_thin() {
        let p = poly(&[(&[2], 1), (&[-2], -1)]);
        assert!(lattice_points(&p).unwrap().is_empty());
        // segment from (0,0) to (3/2, 3/4) contains only the origin
        let seg = VPolyhedron::from_points(
            2,
            vec![vec![int(0), int(0)], vec![crate::exact_linear::ratio(3, 2), crate::exact_linear::ratio(3, 4)]],
        )
        .unwrap()
        .to_h();
        assert_eq!(lattice_points(&seg).unwrap(), vec![vec![0, 0]]);
    }
}
