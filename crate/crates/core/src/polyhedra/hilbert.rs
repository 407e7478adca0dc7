//! Triangulations and Hilbert bases of pointed rational cones.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::dd;
use crate::error::{Error, Result};
use crate::exact_linear::{
    primitive_integer_direction, rank, smith_normal_form, to_rational_vec, IntegerMatrix, QVec,
    Rational,
};

fn q_rows(v: &[Vec<i64>]) -> Vec<QVec> {
    v.iter().map(|r| to_rational_vec(r)).collect()
}

fn int_dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| i128::from(x) * i128::from(y)).sum()
}

/// Primitive inward facet normals of `cone(gens)` and a basis of equations
/// of its span.
pub(crate) fn cone_facets_int(dim: usize, gens: &[Vec<i64>]) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    let (facets, eqs) = dd::cone_facets(dim, &q_rows(gens));
    let to_int = |rows: Vec<QVec>| -> Result<Vec<Vec<i64>>> {
        rows.iter().map(|r| primitive_integer_direction(r)).collect()
    };
    Ok((to_int(facets)?, to_int(eqs)?))
}

fn check_pointed(dim: usize, gens: &[Vec<i64>]) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    if let Some(bad) = gens.iter().find(|g| g.len() != dim) {
        return Err(Error::dim(format!(
            "generator of length {} in dimension {dim}",
            bad.len()
        )));
    }
    let (facets, eqs) = cone_facets_int(dim, gens)?;
    // Pointed iff the facet normals and equations together span the dual.
    let mut all = facets.clone();
    all.extend(eqs.iter().cloned());
    if rank(&q_rows(&all)) < dim {
        return Err(Error::pre("cone contains a line (not pointed)"));
    }
    Ok((facets, eqs))
}

/// Pulling triangulation of `cone(rays)` using only the given rays.
///
/// Returns index sets of linearly independent rays; their cones cover the
/// input cone and meet along common faces.
pub fn triangulate_cone(rays: &[Vec<i64>]) -> Result<Vec<Vec<usize>>> {
    let Some(dim) = rays.first().map(Vec::len) else {
        return Ok(Vec::new());
    };
    check_pointed(dim, rays)?;
    let all: Vec<usize> = (0..rays.len()).collect();
    let mut out = Vec::new();
    pull(rays, &all, &mut out)?;
    for s in out.iter_mut() {
        s.sort_unstable();
    }
    out.sort();
    Ok(out)
}

fn pull(rays: &[Vec<i64>], subset: &[usize], out: &mut Vec<Vec<usize>>) -> Result<()> {
    let gens: Vec<Vec<i64>> = subset.iter().map(|&i| rays[i].clone()).collect();
    let r = rank(&q_rows(&gens));
    if r == subset.len() {
        out.push(subset.to_vec());
        return Ok(());
    }
    let dim = gens[0].len();
    let (facets, _) = cone_facets_int(dim, &gens)?;
    let apex = subset[0];
    for f in facets {
        if int_dot(&f, &rays[apex]) == 0 {
            continue;
        }
        let face: Vec<usize> = subset
            .iter()
            .copied()
            .filter(|&i| int_dot(&f, &rays[i]) == 0)
            .collect();
        let mut pieces = Vec::new();
        pull(rays, &face, &mut pieces)?;
        for mut p in pieces {
            p.insert(0, apex);
            out.push(p);
        }
    }
    Ok(())
}

/// Extreme rays among `gens`, primitive and deduplicated.
pub(crate) fn extreme_rays(dim: usize, gens: &[Vec<i64>], facets: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    let target = dim - 1;
    for g in gens {
        if g.iter().all(|&x| x == 0) {
            continue;
        }
        let tight: Vec<Vec<i64>> = facets
            .iter()
            .filter(|f| int_dot(f, g) == 0)
            .cloned()
            .collect();
        if rank(&q_rows(&tight)) == target {
            let p = crate::exact_linear::primitivize(g)?;
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Lattice points of the half-open parallelepiped `{Σ λ_i g_i : 0 ≤ λ_i < 1}`
/// of a full-rank simplicial cone, via the Smith form of the generator matrix.
pub(crate) fn parallelepiped_points(simplex: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = simplex.len();
    // Columns are generators: M = [g_1 … g_n].
    let cols: Vec<Vec<i64>> = (0..n).map(|i| simplex.iter().map(|g| g[i]).collect()).collect();
    let m = IntegerMatrix::from_rows(&cols)?;
    let snf = smith_normal_form(&m);
    let s: Vec<BigInt> = snf.diagonal();
    let sizes: Vec<u64> = s
        .iter()
        .map(|d| d.abs().to_u64().filter(|&v| v > 0))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::pre("simplicial cone generators are not independent"))?;
    let total: u64 = sizes.iter().product();
    if total > 5_000_000 {
        return Err(Error::domain(format!("parallelepiped with {total} points is too large")));
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut k = vec![0u64; n];
    loop {
        // λ = V · (k_i / s_i), reduced mod 1; point = M · frac(λ).
        let scaled: Vec<Rational> = k
            .iter()
            .zip(&s)
            .map(|(&ki, si)| Rational::new(BigInt::from(ki), si.abs()))
            .collect();
        let lambda: Vec<Rational> = (0..n)
            .map(|i| {
                let mut acc = Rational::zero();
                for (j, sj) in scaled.iter().enumerate() {
                    if !sj.is_zero() {
                        acc += Rational::from_integer(snf.v[(i, j)].clone()) * sj;
                    }
                }
                &acc - acc.floor()
            })
            .collect();
        let mut point = Vec::with_capacity(n);
        for row in 0..n {
            let mut acc = Rational::zero();
            for (j, l) in lambda.iter().enumerate() {
                if !l.is_zero() {
                    acc += l * Rational::from_integer(BigInt::from(cols[row][j]));
                }
            }
            if !acc.is_integer() {
                return Err(Error::inconsistent("parallelepiped point is not integral"));
            }
            point.push(
                acc.to_integer()
                    .to_i64()
                    .ok_or_else(|| Error::domain("parallelepiped point exceeds 64 bits"))?,
            );
        }
        out.push(point);
        let mut i = 0;
        loop {
            if i == n {
                out.sort();
                out.dedup();
                return Ok(out);
            }
            k[i] += 1;
            if k[i] < sizes[i] {
                break;
            }
            k[i] = 0;
            i += 1;
        }
    }
}

/// Minimal generating set of the semigroup `cone(gens) ∩ Z^n`.
///
/// The cone must be pointed and full-dimensional.
pub fn hilbert_basis(gens: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let Some(dim) = gens.first().map(Vec::len) else {
        return Err(Error::pre("cone has no generators"));
    };
    let (facets, eqs) = check_pointed(dim, gens)?;
    if !eqs.is_empty() {
        return Err(Error::pre("cone is not full-dimensional"));
    }
    let rays = extreme_rays(dim, gens, &facets)?;
    let mut candidates: Vec<Vec<i64>> = rays.clone();
    for simplex in triangulate_cone(&rays)? {
        let g: Vec<Vec<i64>> = simplex.iter().map(|&i| rays[i].clone()).collect();
        candidates.extend(
            parallelepiped_points(&g)?
                .into_iter()
                .filter(|p| p.iter().any(|&x| x != 0)),
        );
    }
    candidates.sort();
    candidates.dedup();
    let in_cone = |x: &[i64]| facets.iter().all(|f| int_dot(f, x) >= 0);
    let basis: Vec<Vec<i64>> = candidates
        .iter()
        .filter(|x| {
            !candidates.iter().any(|h| {
                h != *x && {
                    let d: Vec<i64> = x.iter().zip(h).map(|(a, b)| a - b).collect();
                    in_cone(&d)
                }
            })
        })
        .cloned()
        .collect();
    Ok(basis)
}

/// True when `x` lies in the cone with the given inward facet normals.
pub fn cone_in_lattice_contains(facets: &[Vec<i64>], x: &[i64]) -> bool {
    facets.iter().all(|f| int_dot(f, x) >= 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_cone() {
        assert_eq!(hilbert_basis(&[vec![1, 0], vec![0, 1]]).unwrap(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn a1_cone() {
        assert_eq!(
            hilbert_basis(&[vec![1, 0], vec![1, 2]]).unwrap(),
            vec![vec![1, 0], vec![1, 1], vec![1, 2]]
        );
    }

    #[test]
    fn a2_cone() {
        assert_eq!(
            hilbert_basis(&[vec![1, 0], vec![1, 3]]).unwrap(),
            vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![1, 3]]
        );
    }

    #[test]
    fn quadric_cone_is_its_rays() {
        let g = vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 1]];
        let mut expected = g.clone();
        expected.sort();
        assert_eq!(hilbert_basis(&g).unwrap(), expected);
        assert_eq!(triangulate_cone(&g).unwrap().len(), 2);
    }

    #[test]
    fn rejects_lines_and_thin_cones() {
        assert!(matches!(
            hilbert_basis(&[vec![1, 0], vec![-1, 0], vec![0, 1]]),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            hilbert_basis(&[vec![1, 0, 0], vec![0, 1, 0]]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn parallelepiped_size_is_index() {
        let pts = parallelepiped_points(&[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 4]]).unwrap();
        assert_eq!(pts.len(), 4);
    }
}
