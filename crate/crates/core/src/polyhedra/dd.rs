//! Double description method for polyhedral cones `{y : ⟨a_i, y⟩ ≥ 0}`.
//!
//! Constraints are inserted in the given order. The lineality space is kept
//! as an explicit basis of lines; a constraint that cuts a line consumes it
//! (the line turns into a ray), otherwise the usual ray-pair step runs with
//! the algebraic adjacency test.

use num_traits::{Signed, Zero};

use crate::exact_linear::{dot, primitive_integer_direction, rank, Rational};

#[derive(Debug, Clone, Default)]
pub(crate) struct ConeGenerators {
    pub rays: Vec<Vec<Rational>>,
    pub lines: Vec<Vec<Rational>>,
}

fn scale_to_integer(v: &[Rational]) -> Vec<Rational> {
    match primitive_integer_direction(v) {
        Ok(p) => p.into_iter().map(|x| Rational::from_integer(x.into())).collect(),
        // Out of i64 range: keep the exact direction unscaled.
        Err(_) => v.to_vec(),
    }
}

fn combine(a: &Rational, v: &[Rational], b: &Rational, w: &[Rational]) -> Vec<Rational> {
    v.iter().zip(w).map(|(x, y)| a * x + b * y).collect()
}

/// Generators of `{y ∈ Q^dim : ⟨row, y⟩ ≥ 0 for every row}`.
pub(crate) fn cone_from_inequalities(dim: usize, rows: &[Vec<Rational>]) -> ConeGenerators {
    let mut lines: Vec<Vec<Rational>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| Rational::from_integer(((i == j) as i64).into()))
                .collect()
        })
        .collect();
    let mut rays: Vec<Vec<Rational>> = Vec::new();
    let mut processed: Vec<&Vec<Rational>> = Vec::new();

    for a in rows {
        if let Some(p) = lines.iter().position(|l| !dot(a, l).is_zero()) {
            let mut line = lines.remove(p);
            let mut al = dot(a, &line);
            if al.is_negative() {
                line.iter_mut().for_each(|x| *x = -x.clone());
                al = -al;
            }
            for other in lines.iter_mut().chain(rays.iter_mut()) {
                let f = dot(a, other) / &al;
                if !f.is_zero() {
                    for (x, l) in other.iter_mut().zip(&line) {
                        *x -= &f * l;
                    }
                }
            }
            rays.iter_mut().for_each(|r| *r = scale_to_integer(r));
            rays.push(scale_to_integer(&line));
            processed.push(a);
            continue;
        }

        let values: Vec<Rational> = rays.iter().map(|r| dot(a, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        if neg.is_empty() {
            processed.push(a);
            continue;
        }

        // Rank a pair's common active set must reach to span a 2-face.
        let target = dim - lines.len();
        let active: Vec<Vec<bool>> = rays
            .iter()
            .map(|r| processed.iter().map(|row| dot(row, r).is_zero()).collect())
            .collect();
        let mut next: Vec<Vec<Rational>> = (0..rays.len())
            .filter(|&i| !values[i].is_negative())
            .map(|i| rays[i].clone())
            .collect();
        for &p in &pos {
            for &n in &neg {
                let common: Vec<usize> = (0..processed.len())
                    .filter(|&k| active[p][k] && active[n][k])
                    .collect();
                if target < 2 || common.len() + 2 < target {
                    continue;
                }
                let common_rows: Vec<Vec<Rational>> =
                    common.iter().map(|&k| processed[k].clone()).collect();
                if rank(&common_rows) != target - 2 {
                    continue;
                }
                let new = combine(&values[p], &rays[n], &(-values[n].clone()), &rays[p]);
                next.push(scale_to_integer(&new));
            }
        }
        next.sort();
        next.dedup();
        rays = next;
        processed.push(a);
    }
    ConeGenerators { rays, lines }
}

/// Facet description of `cone(gens)`: inward normals of facets (`⟨n, x⟩ ≥ 0`)
/// and a basis of linear equations (`⟨e, x⟩ = 0`) cutting out its span.
pub(crate) fn cone_facets(dim: usize, gens: &[Vec<Rational>]) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
    let dual = cone_from_inequalities(dim, gens);
    (dual.rays, dual.lines)
}
