//! Seeded random instances: face fans of lattice polytopes around the origin.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use num_integer::Integer;
use rand_chacha::ChaCha8Rng;

use crate::divisor::{cartier_status, ToricDivisor};
use crate::exact_linear::{to_rational_vec, IntVec};
use crate::fan::{face_fan, Fan, FanValidity};
use crate::polyhedra::VPolyhedron;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complete fan over the faces of a random lattice polytope with the origin
/// in its interior, in dimension 2 or 3.
pub fn random_complete_fan<R: Rng>(rng: &mut R, dim: usize) -> Fan {
    random_polytope_fan(rng, dim).1
}

fn random_polytope_fan<R: Rng>(rng: &mut R, dim: usize) -> (VPolyhedron, Fan) {
    assert!((2..=3).contains(&dim), "random fans are drawn in dimension 2 or 3");
    let mut pool: Vec<IntVec> = Vec::new();
    let r: i64 = if dim == 2 { 3 } else { 2 };
    let mut cursor = vec![-r; dim];
    loop {
        if cursor.iter().any(|&x| x != 0) {
            pool.push(cursor.clone());
        }
        let mut i = 0;
        while i < dim && cursor[i] == r {
            cursor[i] = -r;
            i += 1;
        }
        if i == dim {
            break;
        }
        cursor[i] += 1;
    }
    loop {
        let count = rng.gen_range(dim + 2..=dim + 5);
        let picked: Vec<IntVec> = pool.choose_multiple(rng, count).cloned().collect();
        let pts = picked.iter().map(|p| to_rational_vec(p)).collect();
        let Ok(poly) = VPolyhedron::from_points(dim, pts) else {
            continue;
        };
        if poly.vertices.len() > 8 || poly.check_origin_interior().is_err() {
            continue;
        }
        if let Ok(f) = face_fan(&poly) {
            if f.validate() == FanValidity::Valid && f.is_complete() {
                return (poly.canonical(), f);
            }
        }
    }
}

/// Random complete fan together with a Cartier ample divisor `A`.
///
/// The fan is the face fan of a lattice polytope `Q`, so the divisor with
/// `Q_A = Q` is ample; it is scaled to integral coefficients and then to its
/// Cartier index. In dimension 3 it is doubled, which makes it very ample.
pub fn random_fan_with_ample<R: Rng>(rng: &mut R, dim: usize) -> (Arc<Fan>, ToricDivisor) {
    let (poly, fan) = random_polytope_fan(rng, dim);
    let fan = Arc::new(fan);
    // Vertex v_ρ = c_ρ·u_ρ with c_ρ the content of v_ρ.
    let contents: Vec<i64> = poly
        .vertices
        .iter()
        .map(|v| {
            v.iter()
                .fold(0i64, |g, x| g.gcd(&x.to_integer().try_into().expect("small vertex")))
        })
        .collect();
    let l = contents.iter().fold(1i64, |acc, c| acc.lcm(c));
    let coeffs: Vec<i64> = contents.iter().map(|c| l / c).collect();
    let a = ToricDivisor::from_ints(fan.clone(), &coeffs).expect("matching ray count");
    let k = cartier_status(&a)
        .ok()
        .and_then(|s| s.index())
        .expect("face-fan divisor is Q-Cartier");
    let scale = i64::try_from(k).expect("small index") * if dim >= 3 { dim as i64 - 1 } else { 1 };
    (fan, a.scaled(&crate::exact_linear::int(scale)))
}

/// Integral divisor with coefficients drawn uniformly from `lo..=hi`.
pub fn random_divisor<R: Rng>(rng: &mut R, fan: &Arc<Fan>, lo: i64, hi: i64) -> ToricDivisor {
    let c: Vec<i64> = (0..fan.rays.len()).map(|_| rng.gen_range(lo..=hi)).collect();
    ToricDivisor::from_ints(fan.clone(), &c).expect("matching ray count")
}

/// Random Q-Cartier divisor found by rejection sampling, falling back to a
/// random principal divisor.
pub fn random_q_cartier_divisor<R: Rng>(rng: &mut R, fan: &Arc<Fan>) -> ToricDivisor {
    for _ in 0..40 {
        let d = random_divisor(rng, fan, -3, 3);
        if cartier_status(&d).is_ok_and(|s| s.is_q_cartier()) {
            return d;
        }
    }
    let m: Vec<i64> = (0..fan.dim).map(|_| rng.gen_range(-3..=3)).collect();
    let coeffs: Vec<i64> = fan
        .rays
        .iter()
        .map(|u| -u.iter().zip(&m).map(|(a, b)| a * b).sum::<i64>())
        .collect();
    ToricDivisor::from_ints(fan.clone(), &coeffs).expect("matching ray count")
}
