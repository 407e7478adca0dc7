use std::sync::Arc;

use num_traits::Signed;
use toridiv::divisor::{
    cartier_status, global_sections, is_globally_generated, local_generators,
    section_hilbert_function, CartierStatus, ToricDivisor,
};
use toridiv::exact_linear::{int, to_rational_vec};
use toridiv::fan::Fan;
use toridiv::gallery;
use toridiv::random::{random_complete_fan, random_divisor, random_q_cartier_divisor, rng};

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn box_points(dim: usize, r: i64) -> Vec<Vec<i64>> {
    (0..dim).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|p| {
                (-r..=r).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect()
    })
}

/// Minimal module elements by exhaustive scan of a box large enough to hold
/// `conv(vertices) + Σ [0,1]·w` for the rays `w` of the dual cone.
fn brute_generators(d: &ToricDivisor, cone: usize) -> Vec<Vec<i64>> {
    let fan = &d.fan;
    let geom = &fan.cones[cone];
    let coeffs = d.integer_coeffs().unwrap();
    let verts = d.local_polyhedron(cone).to_v().vertices;
    let vmax = verts
        .iter()
        .flatten()
        .map(|x| x.abs().ceil().to_integer())
        .max()
        .unwrap();
    let vmax: i64 = vmax.try_into().unwrap();
    let wsum: i64 = geom
        .facets
        .iter()
        .map(|f| f.iter().map(|x| x.abs()).max().unwrap())
        .sum();
    let in_module = |m: &[i64]| geom.rays.iter().all(|&r| dot(m, &fan.rays[r]) >= -coeffs[r]);
    let in_dual = |m: &[i64]| geom.rays.iter().all(|&r| dot(m, &fan.rays[r]) >= 0);
    let pts: Vec<Vec<i64>> = box_points(fan.dim, vmax + wsum)
        .into_iter()
        .filter(|m| in_module(m))
        .collect();
    let mut mins: Vec<Vec<i64>> = pts
        .iter()
        .filter(|x| {
            !pts.iter().any(|y| {
                y != *x && in_dual(&x.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>())
            })
        })
        .cloned()
        .collect();
    mins.sort();
    mins
}

#[test]
fn generators_match_exhaustive_scan() {
    let mut r = rng(31);
    for i in 0..24 {
        let f = Arc::new(random_complete_fan(&mut r, if i % 3 == 2 { 3 } else { 2 }));
        let d = random_divisor(&mut r, &f, -2, 2);
        for c in 0..f.cones.len() {
            assert_eq!(
                local_generators(&d, c).unwrap().generators,
                brute_generators(&d, c),
                "fan {:?}, divisor {:?}, cone {c}",
                f.max_cones(),
                d.coeffs
            );
        }
    }
}

#[test]
fn global_generation_matches_scan() {
    let mut r = rng(32);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..30 {
        let f = Arc::new(random_complete_fan(&mut r, 2));
        let d = random_divisor(&mut r, &f, -1, 3);
        let expected = (0..f.cones.len())
            .all(|c| brute_generators(&d, c).iter().all(|g| d.in_pd(&to_rational_vec(g))));
        let got = is_globally_generated(&d).unwrap().is_yes();
        assert_eq!(got, expected);
        if got {
            yes += 1
        } else {
            no += 1
        }
    }
    assert!(yes > 0 && no > 0);
}

#[test]
fn cartier_divisors_have_one_generator_per_cone() {
    let mut r = rng(33);
    for i in 0..20 {
        let f = Arc::new(random_complete_fan(&mut r, 2 + i % 2));
        let d = random_q_cartier_divisor(&mut r, &f);
        let k = cartier_status(&d).unwrap().index().unwrap() as i64;
        let kd = d.scaled(&int(k));
        let CartierStatus::Cartier { data } = cartier_status(&kd).unwrap() else {
            panic!("multiple by the index is Cartier");
        };
        for c in 0..f.cones.len() {
            assert_eq!(local_generators(&kd, c).unwrap().generators, vec![data[c].clone()]);
        }
    }
}

#[test]
fn projective_plane_section_counts() {
    let f = Arc::new(gallery::projective_plane());
    let h = ToricDivisor::prime(f, 2);
    let counts = section_hilbert_function(&h, 10).unwrap();
    let expected: Vec<u128> = (0..=10u128).map(|m| (m + 1) * (m + 2) / 2).collect();
    assert_eq!(counts, expected);
}

#[test]
fn sections_match_box_scan() {
    let mut r = rng(34);
    for i in 0..12 {
        let f = Arc::new(random_complete_fan(&mut r, 2 + i % 2));
        let d = random_divisor(&mut r, &f, -1, 3);
        let scan: Vec<Vec<i64>> = box_points(f.dim, 12)
            .into_iter()
            .filter(|m| f.rays.iter().zip(&d.integer_coeffs().unwrap()).all(|(u, c)| dot(m, u) >= -c))
            .collect();
        assert_eq!(global_sections(&d).unwrap(), scan);
    }
}

#[test]
fn weil_divisor_on_the_quadric_needs_two_generators() {
    let f = Arc::new(gallery::quadric_cone());
    let d = ToricDivisor::prime(f.clone(), 0);
    assert_eq!(brute_generators(&d, 0), local_generators(&d, 0).unwrap().generators);
    assert!(matches!(cartier_status(&d).unwrap(), CartierStatus::NotQCartier { cone: 0, .. }));
    let both = ToricDivisor::from_ints(f, &[1, 0, 1, 0]).unwrap();
    assert!(cartier_status(&both).unwrap().is_q_cartier());
}

#[test]
fn coefficient_count_must_match() {
    let f = Arc::new(Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap());
    assert!(ToricDivisor::from_ints(f, &[1, 2, 3]).is_err());
}
