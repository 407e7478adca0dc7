//! Rational polyhedral fans given by primitive rays and maximal cones.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_linear::{
    dot_int, int, primitive_integer_direction, primitivize, rank, to_rational_vec, IntVec, QVec,
    Rational,
};
use crate::polyhedra::{self, dd, lp_minimize, HPolyhedron, Halfspace, LpOutcome, VPolyhedron};

/// Cached geometry of one maximal cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeGeometry {
    /// Sorted ray indices into the parent fan.
    pub rays: Vec<usize>,
    /// Primitive inward facet normals: `⟨f, x⟩ ≥ 0` on the cone.
    pub facets: Vec<IntVec>,
    /// Primitive normals of equations `⟨e, x⟩ = 0` cutting out the span.
    pub equations: Vec<IntVec>,
    /// Dimension of the linear span.
    pub dim: usize,
}

fn int_dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| i128::from(x) * i128::from(y)).sum()
}

impl ConeGeometry {
    fn new(ambient: usize, rays: Vec<usize>, vectors: &[IntVec]) -> Result<Self> {
        let gens: Vec<IntVec> = rays.iter().map(|&i| vectors[i].clone()).collect();
        let (facets, equations) = polyhedra::cone_facets_int(ambient, &gens)?;
        Ok(ConeGeometry {
            rays,
            facets,
            dim: ambient - equations.len(),
            equations,
        })
    }

    pub fn contains(&self, u: &[Rational]) -> bool {
        self.facets.iter().all(|f| !dot_int(u, f).is_negative())
            && self.equations.iter().all(|e| dot_int(u, e).is_zero())
    }

    pub fn contains_int(&self, u: &[i64]) -> bool {
        self.facets.iter().all(|f| int_dot(f, u) >= 0)
            && self.equations.iter().all(|e| int_dot(e, u) == 0)
    }

    /// Rays (as parent indices) lying on facet `f`.
    pub fn facet_rays(&self, f: &[i64], vectors: &[IntVec]) -> Vec<usize> {
        self.rays
            .iter()
            .copied()
            .filter(|&r| int_dot(f, &vectors[r]) == 0)
            .collect()
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.dim
    }

    /// Inequalities and equations of the cone as homogeneous rows.
    fn rows(&self) -> Vec<QVec> {
        let mut rows: Vec<QVec> = self.facets.iter().map(|f| to_rational_vec(f)).collect();
        for e in &self.equations {
            rows.push(to_rational_vec(e));
            rows.push(e.iter().map(|&x| int(-x)).collect());
        }
        rows
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FanData {
    dim: usize,
    rays: Vec<IntVec>,
    max_cones: Vec<Vec<usize>>,
}

/// A fan stored by its maximal cones; faces are computed on demand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FanData", into = "FanData")]
pub struct Fan {
    pub dim: usize,
    pub rays: Vec<IntVec>,
    pub cones: Vec<ConeGeometry>,
}

impl TryFrom<FanData> for Fan {
    type Error = Error;
    fn try_from(d: FanData) -> Result<Fan> {
        Fan::new(d.dim, d.rays, d.max_cones)
    }
}

impl From<Fan> for FanData {
    fn from(f: Fan) -> FanData {
        FanData {
            dim: f.dim,
            max_cones: f.max_cones(),
            rays: f.rays,
        }
    }
}

/// First violated fan condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FanDefect {
    ZeroRay { ray: usize },
    NonPrimitiveRay { ray: usize },
    DuplicateRays { first: usize, second: usize },
    /// The rays span a proper subspace (torus factor).
    NotSpanning { rank: usize },
    NotPointed { cone: usize },
    NonExtremeRay { cone: usize, ray: usize },
    UnusedRay { ray: usize },
    NestedCones { inner: usize, outer: usize },
    /// The intersection of the two cones is not a face of both.
    BadIntersection { first: usize, second: usize },
}

impl fmt::Display for FanDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FanDefect::ZeroRay { ray } => write!(f, "ray {ray} is zero"),
            FanDefect::NonPrimitiveRay { ray } => write!(f, "ray {ray} is not primitive"),
            FanDefect::DuplicateRays { first, second } => {
                write!(f, "rays {first} and {second} coincide")
            }
            FanDefect::NotSpanning { rank } => {
                write!(f, "rays span a subspace of rank {rank} (torus factors are not supported)")
            }
            FanDefect::NotPointed { cone } => write!(f, "cone {cone} contains a line"),
            FanDefect::NonExtremeRay { cone, ray } => {
                write!(f, "ray {ray} is not an extreme ray of cone {cone}")
            }
            FanDefect::UnusedRay { ray } => write!(f, "ray {ray} lies in no maximal cone"),
            FanDefect::NestedCones { inner, outer } => {
                write!(f, "cone {inner} is a face of cone {outer}")
            }
            FanDefect::BadIntersection { first, second } => write!(
                f,
                "cones {first} and {second} do not meet in a common face"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FanValidity {
    Valid,
    Invalid(FanDefect),
}

/// A codimension-one face shared by two full-dimensional maximal cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    pub cones: (usize, usize),
    /// Rays of the wall, sorted.
    pub rays: Vec<usize>,
    /// Normal of the wall, nonnegative on the first cone.
    pub normal: IntVec,
}

impl Fan {
    pub fn new(dim: usize, rays: Vec<IntVec>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        if dim == 0 {
            return Err(Error::dim("fan dimension must be positive"));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::dim(format!(
                    "ray {i} has {} coordinates, expected {dim}",
                    r.len()
                )));
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for (c, mut idx) in max_cones.into_iter().enumerate() {
            if idx.is_empty() {
                return Err(Error::usage(format!("maximal cone {c} has no rays")));
            }
            if let Some(bad) = idx.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::dim(format!(
                    "cone {c} refers to ray {bad}, but the fan has {} rays",
                    rays.len()
                )));
            }
            idx.sort_unstable();
            idx.dedup();
            cones.push(ConeGeometry::new(dim, idx, &rays)?);
        }
        Ok(Fan { dim, rays, cones })
    }

    pub fn max_cones(&self) -> Vec<Vec<usize>> {
        self.cones.iter().map(|c| c.rays.clone()).collect()
    }

    pub fn cone_vectors(&self, c: usize) -> Vec<IntVec> {
        self.cones[c].rays.iter().map(|&i| self.rays[i].clone()).collect()
    }

    pub fn validate(&self) -> FanValidity {
        match self.first_defect() {
            None => FanValidity::Valid,
            Some(d) => FanValidity::Invalid(d),
        }
    }

    /// `Ok(())` for a valid fan, a usage error naming the defect otherwise.
    pub fn ensure_valid(&self) -> Result<()> {
        match self.first_defect() {
            None => Ok(()),
            Some(d) => Err(Error::usage(format!("invalid fan: {d}"))),
        }
    }

    fn first_defect(&self) -> Option<FanDefect> {
        for (i, r) in self.rays.iter().enumerate() {
            if r.iter().all(|&x| x == 0) {
                return Some(FanDefect::ZeroRay { ray: i });
            }
            if primitivize(r).ok().as_ref() != Some(r) {
                return Some(FanDefect::NonPrimitiveRay { ray: i });
            }
            if let Some(j) = self.rays[..i].iter().position(|s| s == r) {
                return Some(FanDefect::DuplicateRays { first: j, second: i });
            }
        }
        let rk = rank(&self.rays.iter().map(|r| to_rational_vec(r)).collect::<Vec<_>>());
        if rk < self.dim {
            return Some(FanDefect::NotSpanning { rank: rk });
        }
        for (c, cone) in self.cones.iter().enumerate() {
            if !self.is_pointed(cone) {
                return Some(FanDefect::NotPointed { cone: c });
            }
            for &r in &cone.rays {
                let mut tight: Vec<QVec> = cone
                    .facets
                    .iter()
                    .filter(|f| int_dot(f, &self.rays[r]) == 0)
                    .map(|f| to_rational_vec(f))
                    .collect();
                tight.extend(cone.equations.iter().map(|e| to_rational_vec(e)));
                if rank(&tight) != self.dim - 1 {
                    return Some(FanDefect::NonExtremeRay { cone: c, ray: r });
                }
            }
        }
        for r in 0..self.rays.len() {
            if !self.cones.iter().any(|c| c.rays.contains(&r)) {
                return Some(FanDefect::UnusedRay { ray: r });
            }
        }
        for (a, ca) in self.cones.iter().enumerate() {
            for (b, cb) in self.cones.iter().enumerate() {
                if a != b && ca.rays.iter().all(|r| cb.rays.contains(r)) {
                    return Some(FanDefect::NestedCones { inner: a, outer: b });
                }
            }
        }
        for a in 0..self.cones.len() {
            for b in a + 1..self.cones.len() {
                if !self.meet_in_face(a, b) {
                    return Some(FanDefect::BadIntersection { first: a, second: b });
                }
            }
        }
        None
    }

    fn is_pointed(&self, cone: &ConeGeometry) -> bool {
        let region = HPolyhedron {
            dim: self.dim,
            constraints: cone
                .rays
                .iter()
                .map(|&r| Halfspace::new(to_rational_vec(&self.rays[r]), int(1)))
                .collect(),
        };
        matches!(
            lp_minimize(&vec![Rational::zero(); self.dim], &region),
            Ok(LpOutcome::Optimal { .. })
        )
    }

    /// Rays of the smallest face of `cone` containing `p`.
    fn carrier(&self, cone: &ConeGeometry, p: &[Rational]) -> Vec<usize> {
        let tight: Vec<&IntVec> = cone
            .facets
            .iter()
            .filter(|f| dot_int(p, f).is_zero())
            .collect();
        cone.rays
            .iter()
            .copied()
            .filter(|&r| tight.iter().all(|f| int_dot(f, &self.rays[r]) == 0))
            .collect()
    }

    fn meet_in_face(&self, a: usize, b: usize) -> bool {
        let (ca, cb) = (&self.cones[a], &self.cones[b]);
        let mut rows = ca.rows();
        rows.extend(cb.rows());
        let gens = dd::cone_from_inequalities(self.dim, &rows);
        let mut p = vec![Rational::zero(); self.dim];
        for g in &gens.rays {
            for (x, y) in p.iter_mut().zip(g) {
                *x += y;
            }
        }
        let fa = self.carrier(ca, &p);
        let fb = self.carrier(cb, &p);
        fa.iter().all(|r| cb.rays.contains(r)) && fb.iter().all(|r| ca.rays.contains(r))
    }

    /// Facets of full-dimensional cones, keyed by their sorted ray sets.
    fn facet_table(&self) -> BTreeMap<Vec<usize>, Vec<(usize, IntVec)>> {
        let mut table: BTreeMap<Vec<usize>, Vec<(usize, IntVec)>> = BTreeMap::new();
        for (c, cone) in self.cones.iter().enumerate() {
            for f in &cone.facets {
                table
                    .entry(cone.facet_rays(f, &self.rays))
                    .or_default()
                    .push((c, f.clone()));
            }
        }
        table
    }

    /// Whether the support is all of `R^n`: every cone full-dimensional,
    /// every facet shared by exactly two maximal cones, adjacency connected.
    pub fn is_complete(&self) -> bool {
        if self.cones.is_empty() || self.cones.iter().any(|c| c.dim != self.dim) {
            return false;
        }
        let table = self.facet_table();
        if table.values().any(|v| v.len() != 2) {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.cones.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for v in table.values() {
            let (a, b) = (find(&mut parent, v[0].0), find(&mut parent, v[1].0));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..self.cones.len()).all(|c| find(&mut parent, c) == root)
    }

    pub fn ensure_complete(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::pre("the fan is not complete"))
        }
    }

    /// Interior walls: facets shared by two maximal cones.
    pub fn walls(&self) -> Vec<Wall> {
        self.facet_table()
            .into_iter()
            .filter(|(_, v)| v.len() == 2)
            .map(|(rays, v)| Wall {
                cones: (v[0].0, v[1].0),
                rays,
                normal: v[0].1.clone(),
            })
            .collect()
    }

    /// Indices of maximal cones containing `u`.
    pub fn locate(&self, u: &[Rational]) -> Vec<usize> {
        (0..self.cones.len())
            .filter(|&c| self.cones[c].contains(u))
            .collect()
    }

    pub fn locate_int(&self, u: &[i64]) -> Vec<usize> {
        (0..self.cones.len())
            .filter(|&c| self.cones[c].contains_int(u))
            .collect()
    }

    pub fn ray_index(&self, u: &[i64]) -> Option<usize> {
        self.rays.iter().position(|r| r == u)
    }

    /// Common refinement with the face fan of `q`: each maximal cone is cut
    /// by the cones over the facets of `q`, keeping pieces of full dimension.
    pub fn refine_by_polytope(&self, q: &VPolyhedron) -> Result<Fan> {
        if q.dim != self.dim {
            return Err(Error::dim("polytope and fan live in different dimensions"));
        }
        if !q.is_bounded() {
            return Err(Error::pre("refining polytope must be bounded"));
        }
        q.check_origin_interior()?;
        let hull = q.to_h();
        let verts = q.canonical().vertices;
        let facet_cones: Vec<(Vec<IntVec>, Vec<IntVec>)> = hull
            .constraints
            .iter()
            .map(|h| {
                let on: Vec<IntVec> = verts
                    .iter()
                    .filter(|v| h.slack(v).is_zero())
                    .map(|v| primitive_integer_direction(v))
                    .collect::<Result<_>>()?;
                let (facets, _) = polyhedra::cone_facets_int(self.dim, &on)?;
                Ok((on, facets))
            })
            .collect::<Result<_>>()?;

        let mut rays = self.rays.clone();
        let mut new_rays: Vec<IntVec> = Vec::new();
        let mut pieces: Vec<Vec<IntVec>> = Vec::new();
        for cone in &self.cones {
            let base = cone.rows();
            for (_, facets) in &facet_cones {
                let mut rows = base.clone();
                rows.extend(facets.iter().map(|f| to_rational_vec(f)));
                let gens = dd::cone_from_inequalities(self.dim, &rows);
                let piece: Vec<IntVec> = gens
                    .rays
                    .iter()
                    .map(|g| primitive_integer_direction(g))
                    .collect::<Result<_>>()?;
                let r = rank(&piece.iter().map(|p| to_rational_vec(p)).collect::<Vec<_>>());
                if r < cone.dim {
                    continue;
                }
                for p in &piece {
                    if !rays.contains(p) && !new_rays.contains(p) {
                        new_rays.push(p.clone());
                    }
                }
                pieces.push(piece);
            }
        }
        new_rays.sort();
        rays.extend(new_rays);
        let mut cones: Vec<Vec<usize>> = pieces
            .iter()
            .map(|piece| {
                let mut idx: Vec<usize> = piece
                    .iter()
                    .map(|p| rays.iter().position(|r| r == p).expect("ray registered"))
                    .collect();
                idx.sort_unstable();
                idx
            })
            .collect();
        cones.sort();
        cones.dedup();
        let fan = Fan::new(self.dim, rays, cones)?;
        if let FanValidity::Invalid(d) = fan.validate() {
            return Err(Error::inconsistent(format!("refinement is not a fan: {d}")));
        }
        Ok(fan)
    }

    /// Whether every cone of `finer` sits inside a cone of `self`.
    pub fn is_refined_by(&self, finer: &Fan) -> bool {
        finer.dim == self.dim
            && finer.cones.iter().all(|c2| {
                self.cones.iter().any(|c| {
                    c2.rays.iter().all(|&r| c.contains_int(&finer.rays[r]))
                })
            })
    }

    /// True iff `finer` adds no rays. `finer` must refine `self`.
    pub fn is_refinement_small(&self, finer: &Fan) -> Result<bool> {
        if !self.is_refined_by(finer) {
            return Err(Error::usage("second fan does not refine the first"));
        }
        let mut a = self.rays.clone();
        let mut b = finer.rays.clone();
        a.sort();
        b.sort();
        Ok(a == b)
    }
}

pub fn validate_fan(f: &Fan) -> FanValidity {
    f.validate()
}

pub fn is_complete(f: &Fan) -> bool {
    f.is_complete()
}

pub fn locate(f: &Fan, u: &[Rational]) -> Vec<usize> {
    f.locate(u)
}

pub fn refine_by_polytope(f: &Fan, q: &VPolyhedron) -> Result<Fan> {
    f.refine_by_polytope(q)
}

pub fn is_refinement_small(f: &Fan, f2: &Fan) -> Result<bool> {
    f.is_refinement_small(f2)
}

/// Face fan of a polytope with the origin in its interior.
pub fn face_fan(q: &VPolyhedron) -> Result<Fan> {
    if !q.is_bounded() {
        return Err(Error::pre("face fan needs a bounded polytope"));
    }
    q.check_origin_interior()?;
    let canon = q.canonical();
    let rays: Vec<IntVec> = canon
        .vertices
        .iter()
        .map(|v| primitive_integer_direction(v))
        .collect::<Result<_>>()?;
    let cones = canon
        .to_h()
        .constraints
        .iter()
        .map(|h| {
            (0..canon.vertices.len())
                .filter(|&i| h.slack(&canon.vertices[i]).is_zero())
                .collect()
        })
        .collect();
    Fan::new(q.dim, rays, cones)
}
