//! Exact polyhedral engine: H/V conversion, polar duals, rational simplex,
//! lattice-point enumeration and Hilbert bases of pointed cones.

pub(crate) mod dd;
mod hilbert;
mod lattice_points;
mod lp;

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_linear::{
    dot, int, kernel_basis, primitive_integer_direction, rref, serde_rational, serde_rational_vec,
    serde_rational_vecs, to_rational_vec, QVec, Rational,
};

pub use hilbert::{cone_in_lattice_contains, hilbert_basis, triangulate_cone};
pub(crate) use hilbert::cone_facets_int;
pub use lattice_points::{count_lattice_points, lattice_points};
pub use lp::{lp_minimize, LpOutcome};

/// The closed half-space `{x : ⟨normal, x⟩ ≥ rhs}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Halfspace {
    #[serde(with = "serde_rational_vec")]
    pub normal: QVec,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
}

impl Halfspace {
    pub fn new(normal: QVec, rhs: Rational) -> Self {
        Halfspace { normal, rhs }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        dot(&self.normal, x) >= self.rhs
    }

    pub fn slack(&self, x: &[Rational]) -> Rational {
        dot(&self.normal, x) - &self.rhs
    }

    /// Positive rescaling to a primitive integer normal; the set is unchanged.
    fn normalized(&self) -> Halfspace {
        let mut all = self.normal.clone();
        all.push(self.rhs.clone());
        match primitive_integer_direction(&all) {
            Ok(p) => {
                let mut q: Vec<Rational> = to_rational_vec(&p);
                let rhs = q.pop().expect("nonempty");
                Halfspace::new(q, rhs)
            }
            Err(_) => self.clone(),
        }
    }
}

/// Intersection of finitely many closed half-spaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPolyhedron {
    pub dim: usize,
    #[serde(rename = "inequalities")]
    pub constraints: Vec<Halfspace>,
}

/// `conv(vertices) + cone(rays) + span(lines)`.
///
/// `lines` is empty for every pointed polyhedron, which is the only kind the
/// toric layers produce; it is omitted from JSON when empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VPolyhedron {
    pub dim: usize,
    #[serde(with = "serde_rational_vecs")]
    pub vertices: Vec<QVec>,
    #[serde(with = "serde_rational_vecs", default)]
    pub rays: Vec<QVec>,
    #[serde(
        with = "serde_rational_vecs",
        default,
        skip_serializing_if = "Vec::is_empty"
    )]
    pub lines: Vec<QVec>,
}

fn lex_cmp(a: &[Rational], b: &[Rational]) -> Ordering {
    a.cmp(b)
}

impl HPolyhedron {
    pub fn new(dim: usize, constraints: Vec<Halfspace>) -> Result<Self> {
        for (i, c) in constraints.iter().enumerate() {
            if c.normal.len() != dim {
                return Err(Error::dim(format!(
                    "constraint {i} has {} coefficients, expected {dim}",
                    c.normal.len()
                )));
            }
            if c.normal.iter().all(Zero::is_zero) {
                return Err(Error::domain(format!("constraint {i} has a zero normal")));
            }
        }
        Ok(HPolyhedron { dim, constraints })
    }

    /// `{x : ⟨normal_i, x⟩ ≥ rhs_i}` from integer normals.
    pub fn from_int_rows(rows: &[(Vec<i64>, Rational)]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.0.len());
        Self::new(
            dim,
            rows.iter()
                .map(|(n, r)| Halfspace::new(to_rational_vec(n), r.clone()))
                .collect(),
        )
    }

    /// The empty set in `dim` coordinates.
    pub fn empty(dim: usize) -> Self {
        let mut e = vec![Rational::zero(); dim.max(1)];
        e[0] = Rational::one();
        let neg: QVec = e.iter().map(|x| -x).collect();
        HPolyhedron {
            dim,
            constraints: vec![
                Halfspace::new(e, Rational::one()),
                Halfspace::new(neg, Rational::zero()),
            ],
        }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.constraints.iter().all(|c| c.contains(x))
    }

    pub fn intersect(&self, other: &HPolyhedron) -> Result<HPolyhedron> {
        if self.dim != other.dim {
            return Err(Error::dim("intersecting polyhedra of different dimension"));
        }
        let mut constraints = self.constraints.clone();
        constraints.extend(other.constraints.iter().cloned());
        Ok(HPolyhedron {
            dim: self.dim,
            constraints,
        })
    }

    /// Homogenized constraint rows `(-rhs, normal)` plus the row for `x0 ≥ 0`.
    fn homogenized_rows(&self) -> Vec<QVec> {
        let mut rows: Vec<QVec> = self
            .constraints
            .iter()
            .map(|c| {
                let mut r = Vec::with_capacity(self.dim + 1);
                r.push(-c.rhs.clone());
                r.extend(c.normal.iter().cloned());
                r
            })
            .collect();
        let mut x0 = vec![Rational::zero(); self.dim + 1];
        x0[0] = Rational::one();
        rows.push(x0);
        rows
    }

    /// Double description: vertices, extreme rays and lineality of this set.
    pub fn to_v(&self) -> VPolyhedron {
        let gens = dd::cone_from_inequalities(self.dim + 1, &self.homogenized_rows());
        let mut vertices = Vec::new();
        let mut rays = Vec::new();
        for g in gens.rays {
            if g[0].is_positive() {
                vertices.push(g[1..].iter().map(|x| x / &g[0]).collect());
            } else {
                rays.push(g[1..].to_vec());
            }
        }
        if vertices.is_empty() {
            return VPolyhedron::empty(self.dim);
        }
        let lines = gens.lines.into_iter().map(|l| l[1..].to_vec()).collect();
        VPolyhedron {
            dim: self.dim,
            vertices,
            rays,
            lines,
        }
        .canonicalized()
    }

    /// Irredundant description of the same set (facets, then equations as
    /// pairs of opposite inequalities).
    pub fn irredundant(&self) -> HPolyhedron {
        self.to_v().to_h()
    }

    pub fn is_empty(&self) -> bool {
        self.to_v().is_empty()
    }
}

impl VPolyhedron {
    pub fn empty(dim: usize) -> Self {
        VPolyhedron {
            dim,
            vertices: Vec::new(),
            rays: Vec::new(),
            lines: Vec::new(),
        }
    }

    pub fn from_points(dim: usize, points: Vec<QVec>) -> Result<Self> {
        Self::new(dim, points, Vec::new())
    }

    pub fn new(dim: usize, vertices: Vec<QVec>, rays: Vec<QVec>) -> Result<Self> {
        if let Some(bad) = vertices.iter().chain(&rays).find(|v| v.len() != dim) {
            return Err(Error::dim(format!(
                "point of length {} in a {dim}-dimensional polyhedron",
                bad.len()
            )));
        }
        Ok(VPolyhedron {
            dim,
            vertices,
            rays,
            lines: Vec::new(),
        })
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty() && self.lines.is_empty()
    }

    /// Facet description via the dual cone of the homogenized generators.
    pub fn to_h(&self) -> HPolyhedron {
        if self.vertices.is_empty() {
            return HPolyhedron::empty(self.dim);
        }
        let lift = |head: i64, v: &QVec| {
            let mut r = Vec::with_capacity(self.dim + 1);
            r.push(int(head));
            r.extend(v.iter().cloned());
            r
        };
        let mut gens: Vec<QVec> = self.vertices.iter().map(|v| lift(1, v)).collect();
        gens.extend(self.rays.iter().map(|r| lift(0, r)));
        for l in &self.lines {
            gens.push(lift(0, l));
            gens.push(lift(0, &l.iter().map(|x| -x).collect()));
        }
        let (facets, equations) = dd::cone_facets(self.dim + 1, &gens);
        let mut constraints = Vec::new();
        for f in facets {
            if f[1..].iter().all(Zero::is_zero) {
                continue;
            }
            constraints.push(Halfspace::new(f[1..].to_vec(), -f[0].clone()).normalized());
        }
        let mut eq_rows: Vec<Halfspace> = Vec::new();
        for e in equations {
            let h = Halfspace::new(e[1..].to_vec(), -e[0].clone()).normalized();
            let neg = Halfspace::new(h.normal.iter().map(|x| -x).collect(), -h.rhs.clone());
            eq_rows.push(h);
            eq_rows.push(neg);
        }
        constraints.sort();
        constraints.extend(eq_rows);
        HPolyhedron {
            dim: self.dim,
            constraints,
        }
    }

    /// Canonical form: generators reduced modulo the lineality space,
    /// vertices sorted, rays primitive and sorted, lines in reduced echelon form.
    pub fn canonicalized(&self) -> VPolyhedron {
        if self.vertices.is_empty() {
            return VPolyhedron::empty(self.dim);
        }
        let (line_basis, _) = rref(&self.lines);
        let project = |v: &QVec| -> QVec {
            if line_basis.is_empty() {
                return v.clone();
            }
            orthogonal_projection(v, &line_basis)
        };
        let mut vertices: Vec<QVec> = self.vertices.iter().map(project).collect();
        vertices.sort_by(|a, b| lex_cmp(a, b));
        vertices.dedup();
        let mut rays: Vec<QVec> = self
            .rays
            .iter()
            .map(project)
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .map(|r| to_rational_vec(&primitive_integer_direction(&r).expect("nonzero ray")))
            .collect();
        rays.sort();
        rays.dedup();
        let lines = line_basis
            .iter()
            .map(|l| to_rational_vec(&primitive_integer_direction(l).expect("nonzero line")))
            .collect();
        VPolyhedron {
            dim: self.dim,
            vertices,
            rays,
            lines,
        }
    }

    /// Irredundant canonical form (drops non-extreme input points).
    pub fn canonical(&self) -> VPolyhedron {
        self.to_h().to_v()
    }

    /// Polar `{u : ⟨m, u⟩ ≥ -1 for all m in self}`.
    ///
    /// Requires a bounded full-dimensional polytope with the origin in its
    /// interior; otherwise names the offending facet direction.
    pub fn polar_dual(&self) -> Result<VPolyhedron> {
        if !self.is_bounded() {
            return Err(Error::pre("polar dual needs a bounded polytope"));
        }
        if self.is_empty() {
            return Err(Error::pre("polar dual of the empty set"));
        }
        self.check_origin_interior()?;
        let constraints = self
            .vertices
            .iter()
            .map(|v| Halfspace::new(v.clone(), int(-1)))
            .collect();
        Ok(HPolyhedron {
            dim: self.dim,
            constraints,
        }
        .to_v())
    }

    /// Fails unless the polytope is full-dimensional with 0 strictly inside.
    pub fn check_origin_interior(&self) -> Result<()> {
        let h = self.to_h();
        for c in &h.constraints {
            if !c.rhs.is_negative() {
                let dir: Vec<String> = c.normal.iter().map(|x| x.to_string()).collect();
                return Err(Error::pre(format!(
                    "origin is not an interior point: facet direction ({}) has right-hand side {}",
                    dir.join(", "),
                    c.rhs
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.to_h().contains(x)
    }
}

fn orthogonal_projection(v: &QVec, basis: &[QVec]) -> QVec {
    // v - B (Bᵀ B)^{-1} Bᵀ v, computed by solving the normal equations.
    let k = basis.len();
    let gram: Vec<QVec> = (0..k)
        .map(|i| (0..k).map(|j| dot(&basis[i], &basis[j])).collect())
        .collect();
    let rhs: QVec = basis.iter().map(|b| dot(b, v)).collect();
    let coeffs = crate::exact_linear::solve_rational(&gram, &rhs)
        .ok()
        .and_then(|s| s.solution().map(<[Rational]>::to_vec))
        .expect("Gram matrix of a basis is invertible");
    let mut out = v.clone();
    for (c, b) in coeffs.iter().zip(basis) {
        for (o, x) in out.iter_mut().zip(b) {
            *o -= c * x;
        }
    }
    out
}

/// Dimension of the affine hull of a V-polyhedron.
pub fn affine_dimension(p: &VPolyhedron) -> usize {
    if p.vertices.is_empty() {
        return 0;
    }
    let base = &p.vertices[0];
    let mut dirs: Vec<QVec> = p.vertices[1..]
        .iter()
        .map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    dirs.extend(p.rays.iter().cloned());
    dirs.extend(p.lines.iter().cloned());
    if dirs.is_empty() {
        return 0;
    }
    p.dim - kernel_basis(&dirs, p.dim).len()
}
