use std::sync::Arc;

use toridiv::divisor::{cartier_status, is_globally_generated, ToricDivisor};
use toridiv::error::Error;
use toridiv::exact_linear::{int, ratio, Rational};
use toridiv::fan::Fan;
use toridiv::gallery;
use toridiv::qnef::{
    check_gg_conjecture, enforce_vertex_claims, ensure_ample, is_nef_qcartier, is_qnef,
    qcartierize, qd_polytope, qnt, vertex_claims,
};
use toridiv::random::{random_complete_fan, random_divisor, random_fan_with_ample, rng};

fn qnef_at(d: &ToricDivisor, a: &ToricDivisor, t: &Rational) -> bool {
    is_qnef(&d.plus(t, a).unwrap()).unwrap().is_yes()
}

/// Rational bisection on `t ↦ is_qnef(D + tA)`; returns `(lo, hi)` with
/// `lo` failing and `hi` passing.
fn bisect(d: &ToricDivisor, a: &ToricDivisor) -> (Rational, Rational) {
    let (mut lo, mut hi) = (int(-64), int(64));
    assert!(!qnef_at(d, a, &lo) && qnef_at(d, a, &hi));
    for _ in 0..40 {
        let mid = (&lo + &hi) / int(2);
        if qnef_at(d, a, &mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

fn corner_perturbed_cube() -> (Arc<Fan>, ToricDivisor) {
    let cube = Arc::new(gallery::cube_fan());
    let mut c = vec![1; 8];
    c[cube.ray_index(&[1, 1, 1]).unwrap()] = 2;
    let d = ToricDivisor::from_ints(cube.clone(), &c).unwrap();
    (cube, d)
}

#[test]
fn qd_is_the_polar_of_pd() {
    let mut r = rng(41);
    for i in 0..20 {
        let f = Arc::new(random_complete_fan(&mut r, 2 + i % 2));
        let d = random_divisor(&mut r, &f, 1, 4);
        let polar = d.polytope_pd().to_v().polar_dual().unwrap();
        assert_eq!(qd_polytope(&d).unwrap(), polar);
    }
}

#[test]
fn quasi_nef_iff_strict_transform_nef() {
    let mut r = rng(42);
    let (mut yes, mut no) = (0, 0);
    for i in 0..40 {
        let f = Arc::new(random_complete_fan(&mut r, 2 + i % 2));
        let d = random_divisor(&mut r, &f, 1, 4);
        let qc = qcartierize(&d).unwrap();
        assert_eq!(qc.fan_prime.rays, f.rays);
        let q = is_qnef(&d).unwrap().is_yes();
        assert_eq!(q, is_nef_qcartier(&qc.dbar).unwrap());
        if q {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 0 && no > 0);
}

#[test]
fn quadric_fan_instances_agree() {
    let f = Arc::new(gallery::quadric_complete_fan());
    let mut r = rng(43);
    for _ in 0..15 {
        let d = random_divisor(&mut r, &f, 1, 4);
        let qc = qcartierize(&d).unwrap();
        assert_eq!(is_qnef(&d).unwrap().is_yes(), is_nef_qcartier(&qc.dbar).unwrap());
    }
}

#[test]
fn thresholds_match_bisection() {
    let (cube, d) = corner_perturbed_cube();
    let a = ToricDivisor::anticanonical(cube);
    let mut cases = vec![(d, a)];
    let mut r = rng(44);
    for i in 0..8 {
        let (f, a) = random_fan_with_ample(&mut r, 2 + i % 2);
        cases.push((random_divisor(&mut r, &f, -3, 3), a));
    }
    for (d, a) in cases {
        let t = qnt(&d, &a).unwrap().value;
        assert!(qnef_at(&d, &a, &(&t + int(1))));
        assert!(!qnef_at(&d, &a, &(&t - int(1))));
        assert!(qnef_at(&d, &a, &t));
        let (lo, hi) = bisect(&d, &a);
        assert!(lo < t && t <= hi, "{t} outside ({lo}, {hi}]");
    }
}

#[test]
fn pencil_thresholds() {
    let p2 = Arc::new(gallery::projective_plane());
    let h = ToricDivisor::prime(p2, 2);
    assert_eq!(qnt(&h.scaled(&int(-1)), &h).unwrap().value, int(1));
    assert_eq!(qnt(&h, &h).unwrap().value, int(-1));
    assert_eq!(qnt(&h.scaled(&ratio(1, 2)), &h).unwrap().value, ratio(-1, 2));
}

#[test]
fn non_ample_threshold_divisor_is_rejected() {
    let quad = Arc::new(gallery::quadric_complete_fan());
    let d = ToricDivisor::prime(quad.clone(), 0);
    assert!(matches!(qnt(&d, &d), Err(Error::Precondition(_))));
}

#[test]
fn vertex_claims_hold_for_quasi_nef_divisors() {
    let (_, d) = corner_perturbed_cube();
    assert!(vertex_claims(&d).unwrap().all_hold());
    let mut r = rng(45);
    let mut checked = 0;
    for i in 0..60 {
        let f = Arc::new(random_complete_fan(&mut r, 2 + i % 2));
        let d = random_divisor(&mut r, &f, 1, 4);
        if is_qnef(&d).unwrap().is_yes() {
            assert!(vertex_claims(&d).unwrap().all_hold());
            checked += 1;
        }
    }
    assert!(checked > 10);
}

/// Globally generated, yet a fractional vertex of a local polyhedron lies
/// outside `P_D`: the Cartier data of `D̄` are not the vertices of `P_D`.
#[test]
fn generated_divisor_with_a_fractional_vertex_outside_pd() {
    let f = Arc::new(
        Fan::new(
            3,
            vec![vec![-1, 0, 1], vec![-1, 1, 2], vec![0, 1, -2], vec![1, -1, 0], vec![2, 1, 2]],
            vec![vec![2, 3, 4], vec![1, 2, 4], vec![1, 3, 4], vec![0, 1, 3], vec![0, 1, 2], vec![0, 2, 3]],
        )
        .unwrap(),
    );
    f.ensure_complete().unwrap();
    let d = ToricDivisor::from_ints(f, &[3, 4, 2, 3, 4]).unwrap();
    assert!(is_globally_generated(&d).unwrap().is_yes());
    assert!(!is_qnef(&d).unwrap().is_yes());
    let claims = vertex_claims(&d).unwrap();
    assert!(!claims.vertices_match);
    assert!(claims.facet_data_in_pd && claims.small);
    let bad = vec![int(0), int(3), ratio(-7, 2)];
    assert!(claims.cartier_data.contains(&bad) && !d.in_pd(&bad));
    assert!(matches!(enforce_vertex_claims(&d), Err(Error::Inconsistency(_))));
}

#[test]
fn conjecture_examples() {
    let p2 = Arc::new(gallery::projective_plane());
    let h = ToricDivisor::prime(p2, 2);
    assert!(check_gg_conjecture(&h.scaled(&int(-1)), &h, 6)
        .unwrap()
        .iter()
        .all(|(_, g)| g.is_yes()));

    let quad = Arc::new(gallery::quadric_complete_fan());
    let a = ToricDivisor::anticanonical(quad.clone());
    let k = cartier_status(&a).unwrap().index().unwrap() as i64;
    let a = a.scaled(&int(k));
    ensure_ample(&a).unwrap();
    let d = ToricDivisor::prime(quad, 0);
    assert!(check_gg_conjecture(&d, &a, 6).unwrap().iter().all(|(_, g)| g.is_yes()));

    // With A = −K the sum D + A is already quasi-nef (threshold 1/2) but
    // O(D + A) itself is not generated; doubling A repairs m = 1.
    let (cube, _) = corner_perturbed_cube();
    let a = ToricDivisor::anticanonical(cube.clone());
    let d = ToricDivisor::prime(cube.clone(), cube.ray_index(&[1, 1, 1]).unwrap());
    assert_eq!(qnt(&d, &a).unwrap().value, ratio(1, 2));
    let rows = check_gg_conjecture(&d, &a, 6).unwrap();
    assert!(!rows[0].1.is_yes() && rows[1..].iter().all(|(_, g)| g.is_yes()));
    let rows = check_gg_conjecture(&d, &a.scaled(&int(2)), 6).unwrap();
    assert!(rows.iter().all(|(_, g)| g.is_yes()));
}
