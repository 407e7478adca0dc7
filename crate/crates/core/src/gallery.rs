//! Small named fans used throughout the examples and tests.

use crate::exact_linear::to_rational_vec;
use crate::fan::{face_fan, Fan};
use crate::polyhedra::VPolyhedron;

fn fan(dim: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
    Fan::new(
        dim,
        rays.iter().map(|r| r.to_vec()).collect(),
        cones.iter().map(|c| c.to_vec()).collect(),
    )
    .expect("gallery fan is well formed")
}

/// Rays `(1,0), (0,1), (-1,-1)`; divisor `D_2` is the hyperplane class.
pub fn projective_plane() -> Fan {
    fan(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]])
}

/// Face fan of the cube `[-1,1]^3`: eight rays `(±1,±1,±1)`, six square cones.
pub fn cube_fan() -> Fan {
    let mut corners = Vec::new();
    for x in [-1, 1] {
        for y in [-1, 1] {
            for z in [-1, 1] {
                corners.push(to_rational_vec(&[x, y, z]));
            }
        }
    }
    face_fan(&VPolyhedron::from_points(3, corners).expect("cube")).expect("cube fan")
}

/// The affine cone over a quadric: rays `e1, e2, e1+e3, e2+e3`.
pub fn quadric_cone() -> Fan {
    fan(3, &[&[1, 0, 0], &[0, 1, 0], &[1, 0, 1], &[0, 1, 1]], &[&[0, 1, 2, 3]])
}

/// A complete fan containing the quadric cone on rays `0..4`.
pub fn quadric_complete_fan() -> Fan {
    let pts: Vec<Vec<i64>> = vec![
        vec![1, 0, 0],
        vec![0, 1, 0],
        vec![1, 0, 1],
        vec![0, 1, 1],
        vec![-1, 0, 0],
        vec![0, -1, 0],
        vec![0, 0, -1],
        vec![-1, -1, 1],
    ];
    let f = face_fan(
        &VPolyhedron::from_points(3, pts.iter().map(|p| to_rational_vec(p)).collect())
            .expect("points"),
    )
    .expect("face fan");
    // Reorder so the quadric rays come first.
    let order: Vec<usize> = pts
        .iter()
        .map(|p| f.ray_index(p).expect("vertex is a ray"))
        .collect();
    let rays = pts.clone();
    let cones = f
        .max_cones()
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|r| order.iter().position(|&o| o == r).expect("ray"))
                .collect()
        })
        .collect();
    Fan::new(3, rays, cones).expect("reordered fan")
}

/// Single cone on `u1=(2,-1,0), u2=(2,0,1), u3=(1,1,1), u4=(a,1,0)`.
pub fn acc_family_fan(a: i64) -> Fan {
    fan(
        3,
        &[&[2, -1, 0], &[2, 0, 1], &[1, 1, 1], &[a, 1, 0]],
        &[&[0, 1, 2, 3]],
    )
}

/// The distinguished ray `u1 + u2 + u3` of the family.
pub const ACC_FAMILY_EXCEPTIONAL_RAY: [i64; 3] = [5, 0, 2];

/// Cone on `(1,0), (1,2)`.
pub fn a1_cone() -> Fan {
    fan(2, &[&[1, 0], &[1, 2]], &[&[0, 1]])
}

/// Cone on `e1, e2`.
pub fn smooth_cone() -> Fan {
    fan(2, &[&[1, 0], &[0, 1]], &[&[0, 1]])
}
