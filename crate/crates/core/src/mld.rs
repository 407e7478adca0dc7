//! Pullbacks of Weil divisors along toric valuations, relative canonical
//! values, minimal log discrepancy searches and the accumulating family.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::divisor::{cartier_status, local_generators, CartierStatus, ToricDivisor};
use crate::error::{Error, Result};
use crate::exact_linear::{
    dot_int, int, serde_rational, serde_rational_vec, to_rational_vec, IntVec, QVec, Rational,
};
use crate::fan::Fan;
use crate::gallery;
use crate::polyhedra::{lp_minimize, Halfspace, HPolyhedron, LpOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PullbackEntry {
    pub query: IntVec,
    #[serde(with = "serde_rational")]
    pub coefficient: Rational,
    #[serde(with = "serde_rational_vec")]
    pub optimizer: QVec,
    pub cone: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PullbackResult {
    #[serde(with = "serde_rational_vec")]
    pub divisor: QVec,
    pub entries: Vec<PullbackEntry>,
}

fn containing_cones(fan: &Fan, u: &[i64]) -> Result<Vec<usize>> {
    if u.len() != fan.dim {
        return Err(Error::dim(format!(
            "query of length {} in dimension {}",
            u.len(),
            fan.dim
        )));
    }
    let cones = fan.locate_int(u);
    if cones.is_empty() {
        return Err(Error::domain(format!("{u:?} is outside the support of the fan")));
    }
    Ok(cones)
}

/// `min{⟨m,u⟩ : ⟨m,u_ρ⟩ ≥ rhs_ρ, ρ ∈ σ(1)}` with its optimizer.
fn cone_lp(fan: &Fan, cone: usize, rhs: &[Rational], u: &[i64]) -> Result<(Rational, QVec)> {
    let rows = fan.cones[cone]
        .rays
        .iter()
        .map(|&r| Halfspace::new(to_rational_vec(&fan.rays[r]), rhs[r].clone()))
        .collect();
    let region = HPolyhedron::new(fan.dim, rows)?;
    match lp_minimize(&to_rational_vec(u), &region)? {
        LpOutcome::Optimal { value, point, .. } => Ok((value, point)),
        other => Err(Error::inconsistent(format!(
            "pullback LP on cone {cone} for {u:?} is not optimal: {other:?}"
        ))),
    }
}

fn coefficient(fan: &Fan, rhs: &[Rational], u: &[i64]) -> Result<PullbackEntry> {
    let cones = containing_cones(fan, u)?;
    let (value, point) = cone_lp(fan, cones[0], rhs, u)?;
    for &c in &cones[1..] {
        let (other, _) = cone_lp(fan, c, rhs, u)?;
        if other != value {
            return Err(Error::inconsistent(format!(
                "pullback along {u:?} differs between cones {} and {c}: {value} vs {other}",
                cones[0]
            )));
        }
    }
    Ok(PullbackEntry {
        query: u.to_vec(),
        coefficient: value,
        optimizer: point,
        cone: cones[0],
    })
}

/// Coefficient of the pullback of `D` along each query ray: the exact limit
/// of the normalized valuations of `O(−kD)`, one LP per query.
pub fn dfh_pullback(d: &ToricDivisor, queries: &[IntVec]) -> Result<PullbackResult> {
    let entries = queries
        .iter()
        .map(|u| coefficient(&d.fan, &d.coeffs, u))
        .collect::<Result<_>>()?;
    Ok(PullbackResult {
        divisor: d.coeffs.clone(),
        entries,
    })
}

/// `(1/k)·min ⟨g,u⟩` over the minimal generators `g` of `O(−kD)` on a cone
/// containing `u`. At `k = 1` this is the coefficient of `div(O(−D)·O_Y)`.
pub fn finite_level_valuation(d: &ToricDivisor, u: &[i64], k: u32) -> Result<Rational> {
    if k == 0 {
        return Err(Error::usage("level must be positive"));
    }
    d.integer_coeffs()?;
    let cone = containing_cones(&d.fan, u)?[0];
    let module = local_generators(&d.scaled(&int(-i64::from(k))), cone)?;
    let min = module
        .generators
        .iter()
        .map(|g| {
            let p: i128 = g.iter().zip(u).map(|(&a, &b)| i128::from(a) * i128::from(b)).sum();
            p
        })
        .min()
        .ok_or_else(|| Error::inconsistent("local module has no generators"))?;
    let min = i64::try_from(min).map_err(|_| Error::domain("valuation exceeds 64 bits"))?;
    Ok(Rational::new(min.into(), i64::from(k).into()))
}

/// First `k ≤ k_max` at which the finite-level valuation reaches the LP
/// value, with the sequence computed so far.
pub fn finite_level_stabilization(
    d: &ToricDivisor,
    u: &[i64],
    k_max: u32,
) -> Result<(Option<u32>, Vec<Rational>)> {
    let target = coefficient(&d.fan, &d.coeffs, u)?.coefficient;
    let mut seq = Vec::new();
    for k in 1..=k_max {
        let v = finite_level_valuation(d, u, k)?;
        if v < target {
            return Err(Error::inconsistent(format!(
                "finite-level valuation {v} at k={k} is below the limit {target}"
            )));
        }
        let hit = v == target;
        seq.push(v);
        if hit {
            return Ok((Some(k), seq));
        }
    }
    Ok((None, seq))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelativeCanonicalValue {
    pub u: IntVec,
    #[serde(with = "serde_rational")]
    pub val_minus: Rational,
    #[serde(with = "serde_rational")]
    pub val_plus: Rational,
    /// `u` is not a ray of the fan.
    pub exceptional: bool,
}

/// Coefficients of `K⁻ = K_Y − f*(K_X)` and `K⁺ = K_Y + f*(−K_X)` along the
/// divisor of a primitive vector `u`, with `K_X = −Σ D_ρ`.
pub fn relative_canonical(fan: &Fan, u: &[i64]) -> Result<RelativeCanonicalValue> {
    let n = fan.rays.len();
    let plus = coefficient(fan, &vec![int(1); n], u)?.coefficient;
    let minus = coefficient(fan, &vec![int(-1); n], u)?.coefficient;
    let val_plus = plus - int(1);
    let val_minus = int(-1) - minus;
    if val_plus < val_minus {
        return Err(Error::inconsistent(format!(
            "val+ {val_plus} below val- {val_minus} along {u:?}"
        )));
    }
    Ok(RelativeCanonicalValue {
        u: u.to_vec(),
        val_minus,
        val_plus,
        exceptional: fan.ray_index(u).is_none(),
    })
}

/// Objective for the boundary LP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundaryObjective {
    /// `m ↦ ⟨m, u⟩`.
    Pairing,
    /// `⟨m, u⟩` with the sign of the last coordinate flipped (`5x − 2z` at
    /// `u = (5,0,2)`).
    SignFlipped,
    Custom(QVec),
}

impl BoundaryObjective {
    pub fn vector(&self, u: &[i64]) -> QVec {
        match self {
            BoundaryObjective::Pairing => to_rational_vec(u),
            BoundaryObjective::SignFlipped => {
                let mut c = to_rational_vec(u);
                if let Some(last) = c.last_mut() {
                    *last = -last.clone();
                }
                c
            }
            BoundaryObjective::Custom(c) => c.clone(),
        }
    }
}

fn boundary_region(fan: &Fan) -> Result<HPolyhedron> {
    let mut rows = Vec::new();
    for u in &fan.rays {
        let q = to_rational_vec(u);
        rows.push(Halfspace::new(q.clone(), int(1)));
        rows.push(Halfspace::new(q.iter().map(|x| -x).collect(), int(-2)));
    }
    HPolyhedron::new(fan.dim, rows)
}

/// Infimum of the objective over boundaries `Δ = Σ(⟨m,u_i⟩ − 1)D_i` with
/// coefficients in `[0,1]`, i.e. over `1 ≤ ⟨m,u_i⟩ ≤ 2`.
pub fn boundary_inf_valuation(
    fan: &Fan,
    u: &[i64],
    objective: &BoundaryObjective,
) -> Result<LpOutcome> {
    if fan.cones.len() != 1 {
        return Err(Error::pre("boundary LP needs a fan with a single maximal cone"));
    }
    containing_cones(fan, u)?;
    let c = objective.vector(u);
    if c.len() != fan.dim {
        return Err(Error::dim("objective length differs from the fan dimension"));
    }
    lp_minimize(&c, &boundary_region(fan)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MldEntry {
    pub u: IntVec,
    #[serde(with = "serde_rational")]
    pub value: Rational,
    pub exceptional: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MldMinimum {
    #[serde(with = "serde_rational")]
    pub value: Rational,
    pub argmin: IntVec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MldReport {
    pub bound: u32,
    pub which: Which,
    pub entries: Vec<MldEntry>,
    /// Minimum over vectors that are not rays of the fan.
    pub exceptional_minimum: Option<MldMinimum>,
    /// Minimum over every primitive vector in the box.
    pub overall_minimum: Option<MldMinimum>,
    pub distinguished: Option<IntVec>,
    /// Whether the distinguished vector attains the exceptional minimum.
    pub distinguished_is_argmin: Option<bool>,
}

fn gcd_all(u: &[i64]) -> i64 {
    u.iter().fold(0i64, |g, &x| g.gcd(&x))
}

fn minimum<'a>(entries: impl Iterator<Item = &'a MldEntry>) -> Option<MldMinimum> {
    // Entries arrive in lexicographic order, so the first strict minimum wins ties.
    let mut best: Option<&MldEntry> = None;
    for e in entries {
        if best.is_none_or(|b| e.value < b.value) {
            best = Some(e);
        }
    }
    best.map(|e| MldMinimum {
        value: e.value.clone(),
        argmin: e.u.clone(),
    })
}

/// Exhaustive search over primitive vectors of the support with entries in
/// `[−B, B]`; a certified minimum over the box only.
pub fn mld_search(
    fan: &Fan,
    bound: u32,
    which: Which,
    distinguished: Option<&[i64]>,
) -> Result<MldReport> {
    fan.ensure_valid()?;
    if bound == 0 {
        return Err(Error::usage("bound must be positive"));
    }
    let b = i64::from(bound);
    let n = fan.dim;
    let mut entries = Vec::new();
    let mut u = vec![-b; n];
    loop {
        if gcd_all(&u) == 1 && !fan.locate_int(&u).is_empty() {
            let r = relative_canonical(fan, &u)?;
            entries.push(MldEntry {
                value: match which {
                    Which::Plus => r.val_plus,
                    Which::Minus => r.val_minus,
                },
                exceptional: r.exceptional,
                u: u.clone(),
            });
        }
        let mut i = n;
        loop {
            if i == 0 {
                let exceptional_minimum = minimum(entries.iter().filter(|e| e.exceptional));
                let overall_minimum = minimum(entries.iter());
                let distinguished_is_argmin = distinguished.map(|d| {
                    let v = entries.iter().find(|e| e.u == d).map(|e| &e.value);
                    matches!((v, &exceptional_minimum), (Some(v), Some(m)) if *v == m.value)
                });
                return Ok(MldReport {
                    bound,
                    which,
                    entries,
                    exceptional_minimum,
                    overall_minimum,
                    distinguished: distinguished.map(<[i64]>::to_vec),
                    distinguished_is_argmin,
                });
            }
            i -= 1;
            if u[i] < b {
                u[i] += 1;
                break;
            }
            u[i] = -b;
        }
    }
}

/// `(4a + 5) / (a + 2)`.
pub fn acc_closed_form(a: i64) -> Rational {
    Rational::new((4 * a + 5).into(), (a + 2).into())
}

/// Member `a` of the family of cones on `(2,−1,0), (2,0,1), (1,1,1), (a,1,0)`.
#[derive(Debug, Clone)]
pub struct AccFamilyInstance {
    pub a: i64,
    pub fan: Arc<Fan>,
    pub u_e: IntVec,
}

impl AccFamilyInstance {
    pub fn new(a: i64) -> Result<Self> {
        if a < 1 {
            return Err(Error::usage(format!("family parameter must be ≥ 1, got {a}")));
        }
        let fan = Arc::new(gallery::acc_family_fan(a));
        fan.ensure_valid()?;
        if fan.cones[0].dim != 3 {
            return Err(Error::inconsistent("family cone is not full-dimensional"));
        }
        if !matches!(
            cartier_status(&ToricDivisor::canonical(fan.clone()))?,
            CartierStatus::NotQCartier { .. }
        ) {
            return Err(Error::inconsistent(format!(
                "K_X is Q-Cartier for a = {a}"
            )));
        }
        Ok(AccFamilyInstance {
            a,
            fan,
            u_e: gallery::ACC_FAMILY_EXCEPTIONAL_RAY.to_vec(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AccFamilyRow {
    pub a: i64,
    /// Boundary LP with the sign-flipped objective.
    #[serde(with = "serde_rational")]
    pub boundary_literal: Rational,
    /// Boundary LP with the pairing objective `⟨m, u_E⟩`.
    #[serde(with = "serde_rational")]
    pub boundary_pairing: Rational,
    /// `min{⟨m,u_E⟩ : ⟨m,u_i⟩ ≥ 1}`.
    #[serde(with = "serde_rational")]
    pub defn_lp: Rational,
    #[serde(with = "serde_rational")]
    pub defn_val_plus: Rational,
    #[serde(with = "serde_rational")]
    pub closed_form: Rational,
}

impl AccFamilyRow {
    /// Names of the computed columns equal to the closed form.
    pub fn agreeing_columns(&self) -> Vec<&'static str> {
        [
            ("boundary_literal", &self.boundary_literal),
            ("boundary_pairing", &self.boundary_pairing),
            ("defn_lp", &self.defn_lp),
            ("defn_val_plus", &self.defn_val_plus),
        ]
        .into_iter()
        .filter(|(_, v)| **v == self.closed_form)
        .map(|(n, _)| n)
        .collect()
    }
}

fn optimal(outcome: LpOutcome, what: &str) -> Result<Rational> {
    match outcome {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::inconsistent(format!("{what} is not optimal: {other:?}"))),
    }
}

pub fn acc_family_row(a: i64) -> Result<AccFamilyRow> {
    let inst = AccFamilyInstance::new(a)?;
    let u = &inst.u_e;
    let literal = boundary_inf_valuation(&inst.fan, u, &BoundaryObjective::SignFlipped)?;
    let pairing = boundary_inf_valuation(&inst.fan, u, &BoundaryObjective::Pairing)?;
    let rc = relative_canonical(&inst.fan, u)?;
    Ok(AccFamilyRow {
        a,
        boundary_literal: optimal(literal, "literal boundary LP")?,
        boundary_pairing: optimal(pairing, "pairing boundary LP")?,
        defn_lp: &rc.val_plus + int(1),
        defn_val_plus: rc.val_plus,
        closed_form: acc_closed_form(a),
    })
}

pub fn acc_family(a_values: &[i64]) -> Result<Vec<AccFamilyRow>> {
    a_values.iter().map(|&a| acc_family_row(a)).collect()
}

/// Values of the LP columns with the constraint of `(a,1,0)` replaced by
/// its `a → ∞` limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AccLimits {
    #[serde(with = "serde_rational")]
    pub boundary_literal: Rational,
    #[serde(with = "serde_rational")]
    pub boundary_pairing: Rational,
    #[serde(with = "serde_rational")]
    pub defn_lp: Rational,
    #[serde(with = "serde_rational")]
    pub defn_val_plus: Rational,
}

/// `⟨m,(a,1,0)⟩ ≥ 1` divided by `a` tends to `x ≥ 0`; `1 ≤ ⟨m,(a,1,0)⟩ ≤ 2`
/// tends to `x = 0`.
pub fn acc_limits() -> Result<AccLimits> {
    let base: [[i64; 3]; 3] = [[2, -1, 0], [2, 0, 1], [1, 1, 1]];
    let u = gallery::ACC_FAMILY_EXCEPTIONAL_RAY;
    let x = to_rational_vec(&[1, 0, 0]);
    let mut defn: Vec<Halfspace> = base
        .iter()
        .map(|r| Halfspace::new(to_rational_vec(r), int(1)))
        .collect();
    defn.push(Halfspace::new(x.clone(), int(0)));
    let defn_lp = optimal(
        lp_minimize(&to_rational_vec(&u), &HPolyhedron::new(3, defn)?)?,
        "limit definition LP",
    )?;
    let mut bnd = Vec::new();
    for r in &base {
        let q = to_rational_vec(r);
        bnd.push(Halfspace::new(q.clone(), int(1)));
        bnd.push(Halfspace::new(q.iter().map(|v| -v).collect(), int(-2)));
    }
    bnd.push(Halfspace::new(x.clone(), int(0)));
    bnd.push(Halfspace::new(x.iter().map(|v| -v).collect(), int(0)));
    let region = HPolyhedron::new(3, bnd)?;
    let lit = optimal(
        lp_minimize(&BoundaryObjective::SignFlipped.vector(&u), &region)?,
        "limit literal LP",
    )?;
    let pair = optimal(
        lp_minimize(&BoundaryObjective::Pairing.vector(&u), &region)?,
        "limit pairing LP",
    )?;
    Ok(AccLimits {
        boundary_literal: lit,
        boundary_pairing: pair,
        defn_val_plus: &defn_lp - int(1),
        defn_lp,
    })
}

/// Shape of a sampled column relative to its limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Accumulation {
    pub strictly_increasing: bool,
    pub nondecreasing: bool,
    pub nonincreasing: bool,
    pub below_limit: bool,
    /// The last gap to the limit is at most a tenth of the first.
    pub approaches_limit: bool,
    /// Strictly increasing, below and approaching a finite limit.
    pub violates_acc: bool,
}

pub fn accumulation(values: &[Rational], limit: &Rational) -> Accumulation {
    let pairs = || values.windows(2);
    let strictly_increasing = pairs().all(|w| w[0] < w[1]);
    let nondecreasing = pairs().all(|w| w[0] <= w[1]);
    let nonincreasing = pairs().all(|w| w[0] >= w[1]);
    let below_limit = values.iter().all(|v| v < limit);
    let approaches_limit = match (values.first(), values.last()) {
        (Some(f), Some(l)) => {
            let first = (limit - f).abs();
            let last = (limit - l).abs();
            !first.is_zero() && last * int(10) <= first
        }
        _ => false,
    };
    Accumulation {
        strictly_increasing,
        nondecreasing,
        nonincreasing,
        below_limit,
        approaches_limit,
        violates_acc: values.len() > 1 && strictly_increasing && below_limit && approaches_limit,
    }
}

/// Classical pullback `−⟨m_σ,u⟩` of a Q-Cartier divisor, for comparison.
pub fn classical_pullback(d: &ToricDivisor, u: &[i64]) -> Result<Rational> {
    let data = cartier_status(d)?
        .rational_data()
        .ok_or_else(|| Error::pre("divisor is not Q-Cartier"))?;
    let cone = containing_cones(&d.fan, u)?[0];
    Ok(-dot_int(&data[cone], u))
}
