//! Torus-invariant Weil divisors `D = Σ d_ρ D_ρ`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_linear::{
    dot_int, int, serde_rational_vec, smith_normal_form, solve_rational, to_rational_vec,
    IntVec, IntegerMatrix, LinearSolution, QVec, Rational,
};
use crate::fan::Fan;
use crate::polyhedra::{
    count_lattice_points, hilbert_basis, lattice_points, triangulate_cone, HPolyhedron, Halfspace,
    VPolyhedron,
};

/// On-disk form: one coefficient per ray, in ray order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorFile {
    #[serde(with = "serde_rational_vec")]
    pub coeffs: QVec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToricDivisor {
    pub fan: Arc<Fan>,
    pub coeffs: QVec,
}

impl ToricDivisor {
    pub fn new(fan: Arc<Fan>, coeffs: QVec) -> Result<Self> {
        if coeffs.len() != fan.rays.len() {
            return Err(Error::dim(format!(
                "divisor has {} coefficients but the fan has {} rays",
                coeffs.len(),
                fan.rays.len()
            )));
        }
        Ok(ToricDivisor { fan, coeffs })
    }

    pub fn from_ints(fan: Arc<Fan>, coeffs: &[i64]) -> Result<Self> {
        Self::new(fan, to_rational_vec(coeffs))
    }

    pub fn from_file(fan: Arc<Fan>, file: DivisorFile) -> Result<Self> {
        Self::new(fan, file.coeffs)
    }

    pub fn to_file(&self) -> DivisorFile {
        DivisorFile {
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn zero(fan: Arc<Fan>) -> Self {
        let n = fan.rays.len();
        ToricDivisor {
            fan,
            coeffs: vec![Rational::zero(); n],
        }
    }

    /// The prime divisor `D_ρ` of ray `ray`.
    pub fn prime(fan: Arc<Fan>, ray: usize) -> Self {
        let mut d = Self::zero(fan);
        d.coeffs[ray] = Rational::one();
        d
    }

    /// `K_X = -Σ D_ρ`.
    pub fn canonical(fan: Arc<Fan>) -> Self {
        let n = fan.rays.len();
        ToricDivisor {
            fan,
            coeffs: vec![int(-1); n],
        }
    }

    pub fn anticanonical(fan: Arc<Fan>) -> Self {
        Self::canonical(fan).scaled(&int(-1))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(Rational::is_integer)
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn integer_coeffs(&self) -> Result<IntVec> {
        self.coeffs
            .iter()
            .map(|c| {
                if !c.is_integer() {
                    return Err(Error::pre(format!(
                        "divisor coefficient {c} is not an integer; section computations need a Weil divisor with integer coefficients"
                    )));
                }
                c.to_integer()
                    .to_i64()
                    .ok_or_else(|| Error::domain("divisor coefficient exceeds 64 bits"))
            })
            .collect()
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        ToricDivisor {
            fan: self.fan.clone(),
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// `self + t·other` on the same fan.
    pub fn plus(&self, t: &Rational, other: &ToricDivisor) -> Result<Self> {
        if self.fan != other.fan {
            return Err(Error::usage("divisors live on different fans"));
        }
        Ok(ToricDivisor {
            fan: self.fan.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + t * b)
                .collect(),
        })
    }

    /// Same coefficients on another fan with the same rays.
    pub fn on_fan(&self, fan: Arc<Fan>) -> Result<Self> {
        let coeffs = fan
            .rays
            .iter()
            .map(|r| {
                self.fan
                    .ray_index(r)
                    .map(|i| self.coeffs[i].clone())
                    .ok_or_else(|| Error::usage("target fan has a ray the divisor does not know"))
            })
            .collect::<Result<_>>()?;
        Self::new(fan, coeffs)
    }

    /// Constraints `⟨m, u_ρ⟩ ≥ -d_ρ` for the given rays.
    fn constraints_for(&self, rays: impl Iterator<Item = usize>) -> HPolyhedron {
        HPolyhedron {
            dim: self.fan.dim,
            constraints: rays
                .map(|r| Halfspace::new(to_rational_vec(&self.fan.rays[r]), -self.coeffs[r].clone()))
                .collect(),
        }
    }

    /// `P_D = {m : ⟨m, u_ρ⟩ ≥ -d_ρ for every ray}`.
    pub fn polytope_pd(&self) -> HPolyhedron {
        self.constraints_for(0..self.fan.rays.len())
    }

    /// `P_σ = {m : ⟨m, u_ρ⟩ ≥ -d_ρ for ρ in σ(1)}`.
    pub fn local_polyhedron(&self, cone: usize) -> HPolyhedron {
        self.constraints_for(self.fan.cones[cone].rays.iter().copied())
    }

    pub fn in_pd(&self, m: &[Rational]) -> bool {
        self.fan
            .rays
            .iter()
            .zip(&self.coeffs)
            .all(|(u, d)| dot_int(m, u) >= -d.clone())
    }

    fn in_pd_int(&self, m: &[i64]) -> bool {
        self.in_pd(&to_rational_vec(m))
    }
}

pub fn polytope_pd(d: &ToricDivisor) -> HPolyhedron {
    d.polytope_pd()
}

/// Cartier behaviour of a divisor.
///
/// Data are integral characters `m_σ` with `⟨m_σ, u_ρ⟩ = -k·d_ρ` for every
/// ρ in σ(1), where `k` is 1 for `Cartier` and the index otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum CartierStatus {
    Cartier {
        data: Vec<IntVec>,
    },
    QCartier {
        index: u64,
        data: Vec<IntVec>,
    },
    NotQCartier {
        cone: usize,
        #[serde(with = "serde_rational_vec")]
        certificate: QVec,
    },
}

impl CartierStatus {
    pub fn index(&self) -> Option<u64> {
        match self {
            CartierStatus::Cartier { .. } => Some(1),
            CartierStatus::QCartier { index, .. } => Some(*index),
            CartierStatus::NotQCartier { .. } => None,
        }
    }

    /// Rational data `m_σ` of `D` itself (`data / index`).
    pub fn rational_data(&self) -> Option<Vec<QVec>> {
        let (k, data) = match self {
            CartierStatus::Cartier { data } => (1, data),
            CartierStatus::QCartier { index, data } => (*index, data),
            CartierStatus::NotQCartier { .. } => return None,
        };
        let k = Rational::from_integer(BigInt::from(k));
        Some(
            data.iter()
                .map(|m| to_rational_vec(m).into_iter().map(|x| x / &k).collect())
                .collect(),
        )
    }

    pub fn is_q_cartier(&self) -> bool {
        !matches!(self, CartierStatus::NotQCartier { .. })
    }
}

fn big_to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::domain("Cartier datum exceeds 64 bits"))
}

/// Smallest `k ≥ 1` with `kD|σ` principal, and an integral datum for `kD`.
fn local_cartier(d: &ToricDivisor, cone: usize) -> Result<std::result::Result<(BigInt, IntVec), QVec>> {
    let fan = &d.fan;
    let rays = &fan.cones[cone].rays;
    let a_rows: Vec<QVec> = rays.iter().map(|&r| to_rational_vec(&fan.rays[r])).collect();
    let b: QVec = rays.iter().map(|&r| -d.coeffs[r].clone()).collect();
    if let LinearSolution::Inconsistent { certificate } = solve_rational(&a_rows, &b)? {
        return Ok(Err(certificate));
    }
    // Integral solutions of A m = -k d via U A V = S: (U b)_i / s_i must be integral.
    let a = IntegerMatrix::from_rows(&rays.iter().map(|&r| fan.rays[r].clone()).collect::<Vec<_>>())?;
    let snf = smith_normal_form(&a);
    let s = snf.diagonal();
    let ub: QVec = (0..rays.len())
        .map(|i| {
            (0..rays.len()).fold(Rational::zero(), |acc, j| {
                acc + Rational::from_integer(snf.u[(i, j)].clone()) * &b[j]
            })
        })
        .collect();
    let mut y: QVec = vec![Rational::zero(); fan.dim];
    let mut k = BigInt::one();
    for (i, si) in s.iter().enumerate() {
        if si.is_zero() {
            break;
        }
        y[i] = &ub[i] / Rational::from_integer(si.clone());
        k = k.lcm(y[i].denom());
    }
    let kq = Rational::from_integer(k.clone());
    let m: IntVec = (0..fan.dim)
        .map(|r| {
            let v = (0..fan.dim).fold(Rational::zero(), |acc, c| {
                acc + Rational::from_integer(snf.v[(r, c)].clone()) * &y[c]
            }) * &kq;
            big_to_i64(&v.to_integer())
        })
        .collect::<Result<_>>()?;
    for (&r, bi) in rays.iter().zip(&b) {
        if dot_int(&to_rational_vec(&m), &fan.rays[r]) != bi * &kq {
            return Err(Error::inconsistent("Cartier datum failed substitution"));
        }
    }
    Ok(Ok((k, m)))
}

pub fn cartier_status(d: &ToricDivisor) -> Result<CartierStatus> {
    let mut local = Vec::with_capacity(d.fan.cones.len());
    for c in 0..d.fan.cones.len() {
        match local_cartier(d, c)? {
            Err(certificate) => return Ok(CartierStatus::NotQCartier { cone: c, certificate }),
            Ok(pair) => local.push(pair),
        }
    }
    let index = local.iter().fold(BigInt::one(), |acc, (k, _)| acc.lcm(k));
    let data = local
        .iter()
        .map(|(k, m)| {
            let f = big_to_i64(&(&index / k))?;
            m.iter()
                .map(|&x| x.checked_mul(f).ok_or_else(|| Error::domain("Cartier datum overflow")))
                .collect()
        })
        .collect::<Result<Vec<IntVec>>>()?;
    let index = index
        .to_u64()
        .ok_or_else(|| Error::domain("Q-Cartier index exceeds 64 bits"))?;
    Ok(if index == 1 {
        CartierStatus::Cartier { data }
    } else {
        CartierStatus::QCartier { index, data }
    })
}

/// Minimal generators of the module of sections of `O(D)` over one chart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalModule {
    pub cone: usize,
    pub generators: Vec<IntVec>,
}

fn int_dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| i128::from(x) * i128::from(y)).sum()
}

/// Minimal generating set of `{m ∈ M : ⟨m, u_ρ⟩ ≥ -d_ρ, ρ ∈ σ(1)}` over
/// `σ^∨ ∩ M`, sorted lexicographically.
///
/// Candidates are the lattice points of `conv(V) + Σ_{i∈τ} [0,1]·w_i` for
/// each simplex `τ` of a triangulation of `σ^∨` (`V` the vertices of the
/// local polyhedron, `w_i` the rays of `σ^∨`); every module element is a
/// candidate plus a nonnegative integer combination of the `w_i`. A
/// candidate survives unless subtracting a Hilbert basis element of `σ^∨`
/// stays in the module. Generation is re-verified on a slack-bounded region.
pub fn local_generators(d: &ToricDivisor, cone: usize) -> Result<LocalModule> {
    let fan = &d.fan;
    let geom = fan
        .cones
        .get(cone)
        .ok_or_else(|| Error::usage(format!("no cone {cone}")))?;
    if geom.dim != fan.dim {
        return Err(Error::pre(format!("cone {cone} is not full-dimensional")));
    }
    let coeffs = d.integer_coeffs()?;
    let rays: Vec<&IntVec> = geom.rays.iter().map(|&r| &fan.rays[r]).collect();
    let dvals: Vec<i64> = geom.rays.iter().map(|&r| coeffs[r]).collect();
    let in_module = |m: &[i64]| rays.iter().zip(&dvals).all(|(u, &dr)| int_dot(m, u) >= -i128::from(dr));
    let slack = |m: &[i64]| -> i128 {
        rays.iter()
            .zip(&dvals)
            .map(|(u, &dr)| int_dot(m, u) + i128::from(dr))
            .sum()
    };

    let dual_rays = geom.facets.clone();
    let hilbert = hilbert_basis(&dual_rays)?;
    let vertices = d.local_polyhedron(cone).to_v().vertices;

    let mut candidates: Vec<IntVec> = Vec::new();
    for simplex in triangulate_cone(&dual_rays)? {
        let mut pts: Vec<QVec> = Vec::new();
        for v in &vertices {
            for mask in 0u32..(1 << simplex.len()) {
                let mut p = v.clone();
                for (bit, &w) in simplex.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        for (x, &c) in p.iter_mut().zip(&dual_rays[w]) {
                            *x += int(c);
                        }
                    }
                }
                pts.push(p);
            }
        }
        let hull = VPolyhedron::from_points(fan.dim, pts)?.to_h();
        candidates.extend(lattice_points(&hull)?);
    }
    candidates.sort();
    candidates.dedup();
    candidates.retain(|g| in_module(g));

    let generators: Vec<IntVec> = candidates
        .iter()
        .filter(|g| {
            !hilbert.iter().any(|h| {
                let diff: IntVec = g.iter().zip(h).map(|(a, b)| a - b).collect();
                in_module(&diff)
            })
        })
        .cloned()
        .collect();

    // Verification: every module point of bounded total slack is a generator
    // plus an element of σ^∨.
    let bound = 2 * candidates.iter().map(|c| slack(c)).max().unwrap_or(0);
    let mut region = d.local_polyhedron(cone);
    let sum: QVec = (0..fan.dim)
        .map(|i| int(rays.iter().map(|u| u[i]).sum()))
        .collect();
    let dsum: i64 = dvals.iter().sum();
    region.constraints.push(Halfspace::new(
        sum.iter().map(|x| -x).collect(),
        Rational::from_integer(BigInt::from(dsum) - BigInt::from(bound)),
    ));
    for x in lattice_points(&region)? {
        let covered = generators.iter().any(|g| {
            let diff: IntVec = x.iter().zip(g).map(|(a, b)| a - b).collect();
            rays.iter().all(|u| int_dot(u, &diff) >= 0)
        });
        if !covered {
            return Err(Error::inconsistent(format!(
                "local generators of cone {cone} miss module element {x:?}"
            )));
        }
    }
    if geom.is_simplicial() {
        // In the coordinates ⟨m, u_ρ⟩ + d_ρ the module is one coset of the
        // ray lattice inside N^n, which contains e·Z^n for the largest Smith
        // invariant e; minimal generators thus sit in [0, e)^n, and that box
        // holds e^n / det points of the coset.
        let snf = smith_normal_form(&IntegerMatrix::from_rows(
            &rays.iter().map(|u| (*u).clone()).collect::<Vec<_>>(),
        )?);
        let diag = snf.diagonal();
        let det: BigInt = diag.iter().map(|s| s.abs()).product();
        let e = diag.iter().map(|s| s.abs()).max().unwrap_or_else(|| BigInt::from(1));
        let bound = num_traits::pow(e, fan.dim) / &det;
        if BigInt::from(generators.len()) > bound {
            return Err(Error::inconsistent(format!(
                "cone {cone} has {} local generators, more than the Smith bound {bound}",
                generators.len()
            )));
        }
    }
    Ok(LocalModule { cone, generators })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result")]
pub enum GlobalGeneration {
    Yes,
    No { cone: usize, generator: IntVec },
}

impl GlobalGeneration {
    pub fn is_yes(&self) -> bool {
        matches!(self, GlobalGeneration::Yes)
    }
}

/// Global generation: every local generator of every chart lies in `P_D`.
pub fn is_globally_generated(d: &ToricDivisor) -> Result<GlobalGeneration> {
    d.fan.ensure_complete()?;
    d.integer_coeffs()?;
    for c in 0..d.fan.cones.len() {
        for g in local_generators(d, c)?.generators {
            if !d.in_pd_int(&g) {
                return Ok(GlobalGeneration::No { cone: c, generator: g });
            }
        }
    }
    Ok(GlobalGeneration::Yes)
}

/// Lattice points of `P_D`, indexing a basis of global sections.
pub fn global_sections(d: &ToricDivisor) -> Result<Vec<IntVec>> {
    d.fan.ensure_complete()?;
    d.integer_coeffs()?;
    lattice_points(&d.polytope_pd())
}

/// `h⁰(mD)` for `m = 0..=m_max`.
pub fn section_hilbert_function(d: &ToricDivisor, m_max: u32) -> Result<Vec<u128>> {
    d.fan.ensure_complete()?;
    d.integer_coeffs()?;
    (0..=m_max)
        .map(|m| count_lattice_points(&d.scaled(&int(i64::from(m))).polytope_pd()))
        .collect()
}
