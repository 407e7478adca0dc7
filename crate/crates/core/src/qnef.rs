//! Quasi-nefness, Q-Cartierizing small refinements and quasi-nef thresholds.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::divisor::{cartier_status, is_globally_generated, CartierStatus, GlobalGeneration, ToricDivisor};
use crate::error::{Error, Result};
use crate::exact_linear::{
    dot_int, int, ratio, serde_rational, serde_rational_vec, IntVec, QVec, Rational,
};
use crate::fan::{Fan, FanValidity};
use crate::polyhedra::{affine_dimension, VPolyhedron};

/// `Q_D = conv{u_ρ / d_ρ}`; every coefficient must be positive.
pub fn qd_polytope(d: &ToricDivisor) -> Result<VPolyhedron> {
    let bad: Vec<String> = d
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_positive())
        .map(|(i, c)| format!("ray {i} (coefficient {c})"))
        .collect();
    if !bad.is_empty() {
        return Err(Error::pre(format!(
            "Q_D needs every coefficient positive; offending: {}",
            bad.join(", ")
        )));
    }
    let pts = d
        .fan
        .rays
        .iter()
        .zip(&d.coeffs)
        .map(|(u, c)| u.iter().map(|&x| int(x) / c).collect())
        .collect();
    let q = VPolyhedron::from_points(d.fan.dim, pts)?.canonical();
    if affine_dimension(&q) != d.fan.dim {
        return Err(Error::pre("Q_D is not full-dimensional"));
    }
    Ok(q)
}

/// The intersection number of `D` with the curve of a wall.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WallCrossing {
    pub cones: (usize, usize),
    pub wall_rays: Vec<usize>,
    #[serde(with = "serde_rational_vec")]
    pub m: QVec,
    #[serde(with = "serde_rational_vec")]
    pub m_prime: QVec,
    /// A ray of the second cone off the wall.
    pub test_ray: usize,
    /// `⟨m, u⟩ − ⟨m′, u⟩`.
    #[serde(with = "serde_rational")]
    pub value: Rational,
    /// Both cones lie in one maximal cone of the coarser fan.
    pub extracted: bool,
}

fn crossings(fan: &Fan, data: &[QVec], coarse: Option<&Fan>) -> Vec<WallCrossing> {
    fan.walls()
        .into_iter()
        .map(|w| {
            let (a, b) = w.cones;
            let u = *fan.cones[b]
                .rays
                .iter()
                .find(|r| !fan.cones[a].rays.contains(r))
                .expect("distinct maximal cones");
            let value = dot_int(&data[a], &fan.rays[u]) - dot_int(&data[b], &fan.rays[u]);
            let extracted = coarse.is_some_and(|c| {
                c.cones.iter().any(|big| {
                    [a, b].iter().all(|&k| {
                        fan.cones[k].rays.iter().all(|&r| big.contains_int(&fan.rays[r]))
                    })
                })
            });
            WallCrossing {
                cones: (a, b),
                wall_rays: w.rays,
                m: data[a].clone(),
                m_prime: data[b].clone(),
                test_ray: u,
                value,
                extracted,
            }
        })
        .collect()
}

fn rational_data(d: &ToricDivisor) -> Result<Vec<QVec>> {
    match cartier_status(d)? {
        CartierStatus::NotQCartier { cone, .. } => Err(Error::pre(format!(
            "divisor is not Q-Cartier (cone {cone} has no local datum)"
        ))),
        s => Ok(s.rational_data().expect("Q-Cartier")),
    }
}

/// Wall-crossing values of a Q-Cartier divisor on its own fan.
pub fn wall_crossings(d: &ToricDivisor) -> Result<Vec<WallCrossing>> {
    let data = rational_data(d)?;
    Ok(crossings(&d.fan, &data, None))
}

/// Nefness of a Q-Cartier divisor: every wall crossing is nonnegative.
pub fn is_nef_qcartier(d: &ToricDivisor) -> Result<bool> {
    Ok(wall_crossings(d)?.iter().all(|w| !w.value.is_negative()))
}

/// Whether the Q_D refinement reproduces the local construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "route")]
pub enum PolytopeRoute {
    Agrees,
    Differs { small: bool, cones: usize },
    Failed { reason: String },
}

#[derive(Debug, Clone)]
pub struct QCartierization {
    pub source: Arc<Fan>,
    pub fan_prime: Arc<Fan>,
    pub dbar: ToricDivisor,
    pub dbar_status: CartierStatus,
    /// Rays of the refinement equal rays of the source.
    pub small: bool,
    pub walls: Vec<WallCrossing>,
    /// Every extracted wall has positive crossing value.
    pub relatively_ample: bool,
    pub polytope_route: PolytopeRoute,
}

fn cone_vector_sets(f: &Fan) -> BTreeSet<Vec<IntVec>> {
    (0..f.cones.len())
        .map(|c| {
            let mut v = f.cone_vectors(c);
            v.sort();
            v
        })
        .collect()
}

/// Small refinement on which the strict transform of `D` is Q-Cartier and
/// relatively ample.
///
/// Each maximal cone σ is subdivided by the cones over the facets of
/// `conv(0, u_ρ/d_ρ : ρ ∈ σ(1))` that avoid the origin; the facet normal
/// scaled to `⟨m, x⟩ ≥ −1` is the datum of `D̄` there. The global route via
/// the face fan of `Q_D` is computed alongside and must agree whenever `D`
/// is quasi-nef.
pub fn qcartierize(d: &ToricDivisor) -> Result<QCartierization> {
    let fan = &d.fan;
    fan.ensure_complete()?;
    if let Some((i, c)) = d.coeffs.iter().enumerate().find(|(_, c)| !c.is_positive()) {
        return Err(Error::pre(format!(
            "Q-Cartierization needs every coefficient positive; ray {i} has {c}"
        )));
    }
    let mut cones: Vec<Vec<usize>> = Vec::new();
    let mut facet_data: Vec<(Vec<usize>, QVec)> = Vec::new();
    for cone in &fan.cones {
        let mut pts: Vec<QVec> = vec![vec![Rational::zero(); fan.dim]];
        let scaled: Vec<(usize, QVec)> = cone
            .rays
            .iter()
            .map(|&r| (r, fan.rays[r].iter().map(|&x| int(x) / &d.coeffs[r]).collect()))
            .collect();
        pts.extend(scaled.iter().map(|(_, p)| p.clone()));
        let hull = VPolyhedron::from_points(fan.dim, pts)?.to_h();
        for h in &hull.constraints {
            if !h.rhs.is_negative() {
                continue;
            }
            let on: Vec<usize> = scaled
                .iter()
                .filter(|(_, p)| h.slack(p).is_zero())
                .map(|(r, _)| *r)
                .collect();
            let m: QVec = h.normal.iter().map(|x| x / -h.rhs.clone()).collect();
            cones.push(on.clone());
            facet_data.push((on, m));
        }
    }
    cones.sort();
    cones.dedup();
    let fan_prime = Arc::new(Fan::new(fan.dim, fan.rays.clone(), cones)?);
    if let FanValidity::Invalid(defect) = fan_prime.validate() {
        return Err(Error::inconsistent(format!(
            "Q-Cartierizing refinement is not a fan: {defect}"
        )));
    }
    let small = fan.is_refinement_small(&fan_prime)?;
    if !small {
        return Err(Error::inconsistent("Q-Cartierizing refinement extracted a divisor"));
    }
    let dbar = d.on_fan(fan_prime.clone())?;
    let dbar_status = cartier_status(&dbar)?;
    let Some(data) = dbar_status.rational_data() else {
        return Err(Error::inconsistent(
            "strict transform is not Q-Cartier on the refinement",
        ));
    };
    for (c, cone) in fan_prime.cones.iter().enumerate() {
        let expected = facet_data
            .iter()
            .find(|(rays, _)| rays == &cone.rays)
            .map(|(_, m)| m);
        if expected != Some(&data[c]) {
            return Err(Error::inconsistent(format!(
                "Cartier datum of cone {c} disagrees with its facet normal"
            )));
        }
    }
    let walls = crossings(&fan_prime, &data, Some(fan));
    let relatively_ample = walls
        .iter()
        .filter(|w| w.extracted)
        .all(|w| w.value.is_positive());
    if !relatively_ample {
        return Err(Error::inconsistent(
            "an extracted wall has nonpositive crossing value",
        ));
    }

    let polytope_route = match qd_polytope(d).and_then(|q| fan.refine_by_polytope(&q)) {
        Err(e) => PolytopeRoute::Failed {
            reason: e.to_string(),
        },
        Ok(g) if cone_vector_sets(&g) == cone_vector_sets(&fan_prime) => PolytopeRoute::Agrees,
        Ok(g) => PolytopeRoute::Differs {
            small: fan.is_refinement_small(&g).unwrap_or(false),
            cones: g.cones.len(),
        },
    };
    if polytope_route != PolytopeRoute::Agrees && is_qnef(d)?.is_yes() {
        return Err(Error::inconsistent(format!(
            "Q_D refinement disagrees with the local construction for a quasi-nef divisor ({polytope_route:?})"
        )));
    }
    Ok(QCartierization {
        source: fan.clone(),
        fan_prime,
        dbar,
        dbar_status,
        small,
        walls,
        relatively_ample,
        polytope_route,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result")]
pub enum QnefVerdict {
    Yes,
    No {
        cone: usize,
        #[serde(with = "serde_rational_vec")]
        vertex: QVec,
    },
}

impl QnefVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, QnefVerdict::Yes)
    }
}

/// Vertex criterion: every vertex of every local polyhedron lies in `P_D`.
pub fn is_qnef(d: &ToricDivisor) -> Result<QnefVerdict> {
    d.fan.ensure_complete()?;
    for c in 0..d.fan.cones.len() {
        for v in d.local_polyhedron(c).to_v().vertices {
            if !d.in_pd(&v) {
                return Ok(QnefVerdict::No { cone: c, vertex: v });
            }
        }
    }
    Ok(QnefVerdict::Yes)
}

/// Ampleness on a complete fan: Q-Cartier with every wall crossing positive.
pub fn ensure_ample(a: &ToricDivisor) -> Result<Vec<QVec>> {
    a.fan.ensure_complete()?;
    let data = match cartier_status(a)? {
        CartierStatus::NotQCartier { cone, .. } => {
            return Err(Error::pre(format!(
                "ample divisor is not Q-Cartier (cone {cone})"
            )))
        }
        s => s.rational_data().expect("Q-Cartier"),
    };
    if let Some(w) = crossings(&a.fan, &data, None)
        .into_iter()
        .find(|w| !w.value.is_positive())
    {
        return Err(Error::pre(format!(
            "divisor is not ample: wall between cones {} and {} has crossing value {}",
            w.cones.0, w.cones.1, w.value
        )));
    }
    Ok(data)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Breakpoint {
    pub cone: usize,
    #[serde(with = "serde_rational_vec")]
    pub vertex: QVec,
    pub ray: usize,
    #[serde(with = "serde_rational")]
    pub t: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QnefThreshold {
    #[serde(with = "serde_rational")]
    pub value: Rational,
    pub breakpoints: Vec<Breakpoint>,
}

/// `inf{t : D + tA quasi-nef}` for an ample `A`.
///
/// On σ the local polyhedron of `D + tA` is that of `D` translated by
/// `t·m^A_σ`, so each vertex `v` and ray `ρ ∉ σ(1)` contribute the exact
/// critical value `−(⟨v,u_ρ⟩ + d_ρ) / (⟨m^A_σ,u_ρ⟩ + a_ρ)`.
pub fn qnt(d: &ToricDivisor, a: &ToricDivisor) -> Result<QnefThreshold> {
    if d.fan != a.fan {
        return Err(Error::usage("divisor and ample divisor live on different fans"));
    }
    let data = ensure_ample(a)?;
    let fan = &d.fan;
    let mut breakpoints = Vec::new();
    for (c, cone) in fan.cones.iter().enumerate() {
        let vertices = d.local_polyhedron(c).to_v().vertices;
        for r in (0..fan.rays.len()).filter(|r| !cone.rays.contains(r)) {
            let u = &fan.rays[r];
            let denom = dot_int(&data[c], u) + &a.coeffs[r];
            if !denom.is_positive() {
                return Err(Error::inconsistent(
                    "ample support function is not strictly convex off a cone",
                ));
            }
            for v in &vertices {
                let t = -(dot_int(v, u) + &d.coeffs[r]) / &denom;
                breakpoints.push(Breakpoint {
                    cone: c,
                    vertex: v.clone(),
                    ray: r,
                    t,
                });
            }
        }
    }
    let value = breakpoints
        .iter()
        .map(|b| b.t.clone())
        .max()
        .ok_or_else(|| Error::pre("threshold needs at least two maximal cones"))?;
    let eps = ratio(1, 1000);
    let above = is_qnef(&d.plus(&(&value + &eps), a)?)?.is_yes();
    let below = is_qnef(&d.plus(&(&value - &eps), a)?)?.is_yes();
    if !above || below {
        return Err(Error::inconsistent(format!(
            "threshold {value} failed its ±1/1000 check"
        )));
    }
    Ok(QnefThreshold { value, breakpoints })
}

/// Global generation of `m(D + A)` for `m = 1..=m_max`.
pub fn check_gg_conjecture(
    d: &ToricDivisor,
    a: &ToricDivisor,
    m_max: u32,
) -> Result<Vec<(u32, GlobalGeneration)>> {
    if d.fan != a.fan {
        return Err(Error::usage("divisor and ample divisor live on different fans"));
    }
    d.integer_coeffs()?;
    ensure_ample(a)?;
    if cartier_status(a)?.index() != Some(1) {
        return Err(Error::pre("the ample divisor must be Cartier"));
    }
    let sum = d.plus(&Rational::one(), a)?;
    (1..=m_max)
        .map(|m| Ok((m, is_globally_generated(&sum.scaled(&int(i64::from(m))))?)))
        .collect()
}

/// Structural claims about `P_D` and `Σ′` for a divisor with positive
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexClaims {
    #[serde(with = "crate::exact_linear::serde_rational_vecs")]
    pub pd_vertices: Vec<QVec>,
    #[serde(with = "crate::exact_linear::serde_rational_vecs")]
    pub cartier_data: Vec<QVec>,
    pub vertices_match: bool,
    #[serde(with = "crate::exact_linear::serde_rational_vecs")]
    pub qd_facet_data: Vec<QVec>,
    pub facet_data_in_pd: bool,
    pub extracted_walls_positive: bool,
    pub small: bool,
}

impl VertexClaims {
    pub fn all_hold(&self) -> bool {
        self.vertices_match && self.facet_data_in_pd && self.extracted_walls_positive && self.small
    }
}

/// Compares the vertices of `P_D` with the Cartier data of `D̄` on `Σ′`, and
/// checks that every facet datum of `Q_D` lies in `P_D`.
pub fn vertex_claims(d: &ToricDivisor) -> Result<VertexClaims> {
    let qc = qcartierize(d)?;
    let pd_vertices: BTreeSet<QVec> = d.polytope_pd().to_v().vertices.into_iter().collect();
    let cartier_data: BTreeSet<QVec> = qc
        .dbar_status
        .rational_data()
        .expect("Q-Cartier")
        .into_iter()
        .collect();
    let qd = qd_polytope(d)?;
    let qd_facet_data: Vec<QVec> = qd
        .to_h()
        .constraints
        .iter()
        .map(|h| h.normal.iter().map(|x| x / -h.rhs.clone()).collect())
        .collect();
    let facet_data_in_pd = qd_facet_data.iter().all(|m| d.in_pd(m));
    Ok(VertexClaims {
        vertices_match: pd_vertices == cartier_data,
        pd_vertices: pd_vertices.into_iter().collect(),
        cartier_data: cartier_data.into_iter().collect(),
        qd_facet_data,
        facet_data_in_pd,
        extracted_walls_positive: qc.walls.iter().filter(|w| w.extracted).all(|w| w.value.is_positive()),
        small: qc.small,
    })
}

/// [`vertex_claims`] for a globally generated divisor; any failed claim is
/// an internal-inconsistency error carrying the report.
pub fn enforce_vertex_claims(d: &ToricDivisor) -> Result<VertexClaims> {
    if !is_globally_generated(d)?.is_yes() {
        return Err(Error::pre("divisor is not globally generated"));
    }
    let claims = vertex_claims(d)?;
    if !claims.all_hold() {
        let extra: Vec<String> = claims
            .cartier_data
            .iter()
            .filter(|m| !claims.pd_vertices.contains(m))
            .map(|m| format!("{:?}", m.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
            .collect();
        return Err(Error::inconsistent(format!(
            "globally generated divisor violates the vertex claim: Cartier data not among the vertices of P_D: {}",
            extra.join(", ")
        )));
    }
    Ok(claims)
}
