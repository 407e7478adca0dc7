use std::sync::Arc;

use proptest::prelude::*;
use toridiv::divisor::{global_sections, ToricDivisor};
use toridiv::exact_linear::{int, to_rational_vec, QVec, Rational};
use toridiv::fan::Fan;
use toridiv::gallery;
use toridiv::polyhedra::{
    count_lattice_points, hilbert_basis, lattice_points, lp_minimize, Halfspace, HPolyhedron,
    LpOutcome, VPolyhedron,
};

fn points(dim: usize, raw: &[Vec<i64>]) -> Vec<QVec> {
    raw.iter().map(|p| to_rational_vec(&p[..dim])).collect()
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

fn point_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 2..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn double_description_round_trip(dim in 2usize..=3, raw in point_strategy()) {
        let p = VPolyhedron::from_points(dim, points(dim, &raw)).unwrap().canonical();
        let h = p.to_h();
        prop_assert_eq!(h.to_v().canonical(), p.clone());
        for v in &p.vertices {
            prop_assert!(h.contains(v));
        }
        for q in points(dim, &raw) {
            prop_assert!(h.contains(&q));
        }
    }

    #[test]
    fn polar_is_an_involution(dim in 2usize..=3, raw in point_strategy()) {
        let mut pts = points(dim, &raw);
        // Surround the origin so it is interior.
        for i in 0..dim {
            let mut e = vec![int(0); dim];
            e[i] = int(2);
            pts.push(e.clone());
            e[i] = int(-2);
            pts.push(e);
        }
        let p = VPolyhedron::from_points(dim, pts).unwrap().canonical();
        let back = p.polar_dual().unwrap().polar_dual().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn lattice_points_match_box_scan(dim in 2usize..=3, raw in point_strategy(), den in 1i64..=3) {
        let pts: Vec<QVec> = points(dim, &raw)
            .into_iter()
            .map(|p| p.into_iter().map(|x| x / int(den)).collect())
            .collect();
        let h = VPolyhedron::from_points(dim, pts).unwrap().to_h();
        let mut expected: Vec<Vec<i64>> = box_points(dim, 3)
            .into_iter()
            .filter(|x| h.contains(&to_rational_vec(x)))
            .collect();
        expected.sort();
        prop_assert_eq!(lattice_points(&h).unwrap(), expected.clone());
        prop_assert_eq!(count_lattice_points(&h).unwrap(), expected.len() as u128);
    }

    #[test]
    fn hilbert_basis_matches_irreducible_scan(raw in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 3..5)) {
        let fan = match Fan::new(3, raw.iter().map(|r| {
            let g = r.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
            if g == 0 { r.clone() } else { r.iter().map(|x| x / g).collect() }
        }).collect(), vec![(0..raw.len()).collect()]) {
            Ok(f) => f,
            Err(_) => return Ok(()),
        };
        let gens = fan.cone_vectors(0);
        let Ok(basis) = hilbert_basis(&gens) else { return Ok(()) };
        let cone = &fan.cones[0];
        // ℓ = sum of facet normals is positive on the cone minus the origin.
        let ell: Vec<i64> = (0..3).map(|i| cone.facets.iter().map(|f| f[i]).sum()).collect();
        let lv = |x: &[i64]| x.iter().zip(&ell).map(|(a, b)| a * b).sum::<i64>();
        let limit: i64 = gens.iter().map(|g| lv(g)).sum();
        let reach: i64 = gens.iter().map(|g| g.iter().map(|x| x.abs()).sum::<i64>()).sum();
        let mut pts: Vec<Vec<i64>> = box_points(3, reach)
            .into_iter()
            .filter(|x| x != &[0, 0, 0] && cone.contains_int(x) && lv(x) <= limit)
            .collect();
        pts.sort_by_key(|x| lv(x));
        let mut irreducible: Vec<Vec<i64>> = Vec::new();
        for x in pts {
            let reducible = irreducible.iter().any(|h| {
                let d: Vec<i64> = x.iter().zip(h).map(|(a, b)| a - b).collect();
                cone.contains_int(&d)
            });
            if !reducible {
                irreducible.push(x);
            }
        }
        irreducible.sort();
        prop_assert_eq!(basis, irreducible);
    }
}

/// Every basic feasible point of `{⟨m,u_i⟩ ≥ 1}` via Cramer's rule.
fn vertex_enumeration_min(rows: &[[i64; 3]], c: [i64; 3]) -> Rational {
    let det3 = |a: [[i64; 3]; 3]| -> i64 {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let mut best: Option<Rational> = None;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            for k in j + 1..rows.len() {
                let a = [rows[i], rows[j], rows[k]];
                let d = det3(a);
                if d == 0 {
                    continue;
                }
                let x: Vec<Rational> = (0..3)
                    .map(|col| {
                        let mut m = a;
                        for r in 0..3 {
                            m[r][col] = 1;
                        }
                        Rational::new(det3(m).into(), d.into())
                    })
                    .collect();
                let feasible = rows.iter().all(|r| {
                    r.iter().zip(&x).map(|(a, b)| int(*a) * b).sum::<Rational>() >= int(1)
                });
                if feasible {
                    let v: Rational = c.iter().zip(&x).map(|(a, b)| int(*a) * b).sum();
                    if best.as_ref().is_none_or(|b| v < *b) {
                        best = Some(v);
                    }
                }
            }
        }
    }
    best.unwrap()
}

#[test]
fn family_lp_at_a_equal_one() {
    let rows = [[2, -1, 0], [2, 0, 1], [1, 1, 1], [1, 1, 0]];
    let region = HPolyhedron::new(
        3,
        rows.iter().map(|r| Halfspace::new(to_rational_vec(r), int(1))).collect(),
    )
    .unwrap();
    let out = lp_minimize(&to_rational_vec(&[5, 0, 2]), &region).unwrap();
    let oracle = vertex_enumeration_min(&rows, [5, 0, 2]);
    assert_eq!(oracle, int(3));
    match out {
        LpOutcome::Optimal { value, point, .. } => {
            assert_eq!(value, oracle);
            assert_eq!(point, to_rational_vec(&[1, 1, -1]));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn cube_anticanonical_sections_are_the_octahedron() {
    let d = ToricDivisor::anticanonical(Arc::new(gallery::cube_fan()));
    let s = global_sections(&d).unwrap();
    // P_D lies in [-1,1]^3: pair with the two corners ±(1,1,1) and their
    // sign changes.
    let oracle: Vec<Vec<i64>> = box_points(3, 1)
        .into_iter()
        .filter(|m| {
            gallery::cube_fan()
                .rays
                .iter()
                .all(|u| u.iter().zip(m).map(|(a, b)| a * b).sum::<i64>() >= -1)
        })
        .collect();
    assert_eq!(s, oracle);
    assert_eq!(s.len(), 7);
}
