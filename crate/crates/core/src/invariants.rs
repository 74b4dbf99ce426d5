//! Log discrepancies, log canonical thresholds and normalized volumes of
//! pairs `(A², λC)` for a unibranch curve `C`, together with the exact
//! minimization of the normalized volume over monomial valuations.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{primitive_ray, rat_to_f64, ExtRat, Poly, Rat};
use crate::branch::{BranchParam, PuiseuxChar, PLANE_VARS};
use crate::error::{Error, Result};
use crate::ideals::volume;
use crate::valuation::{plane_entries, MonomialValuation, Weight};

/// One boundary component `coeff · C` of a pair on the plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryComponent {
    pub curve: Poly,
    pub coeff: Rat,
    pub branch: Option<BranchParam>,
}

/// A pair `(A², Σ λ_i C_i)` near the origin.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PairA2 {
    components: Vec<BoundaryComponent>,
}

impl PairA2 {
    pub fn empty() -> PairA2 {
        PairA2::default()
    }

    /// Adds `coeff · {curve = 0}`; the curve must pass through the origin.
    pub fn with(mut self, curve: Poly, coeff: Rat, branch: Option<BranchParam>) -> Result<PairA2> {
        if curve.vars() != PLANE_VARS {
            return Err(Error::VarMismatch { left: curve.vars().to_vec(), right: PLANE_VARS.iter().map(|s| s.to_string()).collect() });
        }
        if curve.is_zero() || !curve.coeff(&[0, 0]).is_zero() {
            return Err(Error::InvalidBranch(format!("boundary curve {curve} does not pass through the origin")));
        }
        if coeff.is_negative() {
            return Err(Error::InvalidBranch(format!("negative boundary coefficient {coeff}")));
        }
        self.components.push(BoundaryComponent { curve, coeff, branch });
        Ok(self)
    }

    pub fn components(&self) -> &[BoundaryComponent] {
        &self.components
    }
}

/// `A_{(A², Δ)}(v_w) = μ + ν − Σ λ_i v_w(f_i)`.
pub fn log_discrepancy(pair: &PairA2, w: &Weight) -> Result<Rat> {
    let (mu, nu) = plane_entries(w)?;
    let v = MonomialValuation::new(&PLANE_VARS, w.clone())?;
    let mut a = mu + nu;
    for c in &pair.components {
        match v.eval(&c.curve)? {
            ExtRat::Finite(val) => a -= &c.coeff * val,
            ExtRat::Infinity => unreachable!("boundary curves are nonzero"),
        }
    }
    Ok(a)
}

/// `1/a + 1/b` for a singular branch, `1` for a smooth one.
pub fn lct_unibranch(ch: &PuiseuxChar) -> Rat {
    match ch.b() {
        Some(b) => Rat::new(BigInt::one(), ch.a().into()) + Rat::new(BigInt::one(), b.into()),
        None => Rat::one(),
    }
}

/// Upper bound on `lct₀` read off the Newton polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonBound {
    pub value: Rat,
    /// Weight direction attaining the bound; `(1, 0)` / `(0, 1)` stand for
    /// the coordinate-axis limits.
    pub direction: (BigInt, BigInt),
    /// The polygon is a single edge `(0, p)–(q, 0)` with `2 ≤ p < q`,
    /// `p ∤ q`: the shape of a branch in normal form. Otherwise the value is
    /// reported as a bound only.
    pub normal_form_shape: bool,
}

/// `min (w_x + w_y) / v_w(f)` over the primitive inner normals of the compact
/// Newton-polygon edges and the two coordinate-axis limits.
pub fn lct_newton_bound(f: &Poly) -> Result<NewtonBound> {
    if f.vars() != PLANE_VARS {
        return Err(Error::VarMismatch { left: f.vars().to_vec(), right: PLANE_VARS.iter().map(|s| s.to_string()).collect() });
    }
    if f.is_zero() || !f.coeff(&[0, 0]).is_zero() {
        return Err(Error::InvalidBranch("f must be nonzero and vanish at the origin".into()));
    }
    let edges = newton_edges(f);
    let mut candidates: Vec<(Rat, (BigInt, BigInt))> = Vec::new();
    for &((x1, y1), (x2, y2)) in &edges {
        let g = (y1 - y2).gcd(&(x2 - x1));
        let (mu, nu) = ((y1 - y2) / g, (x2 - x1) / g);
        let val = f.terms().map(|(e, _)| mu as u64 * e[0] as u64 + nu as u64 * e[1] as u64).min().expect("nonzero");
        candidates.push((Rat::new((mu + nu).into(), val.into()), (mu.into(), nu.into())));
    }
    let min_x = f.terms().map(|(e, _)| e[0]).min().expect("nonzero");
    let min_y = f.terms().map(|(e, _)| e[1]).min().expect("nonzero");
    if min_x > 0 {
        candidates.push((Rat::new(BigInt::one(), min_x.into()), (BigInt::one(), BigInt::zero())));
    }
    if min_y > 0 {
        candidates.push((Rat::new(BigInt::one(), min_y.into()), (BigInt::zero(), BigInt::one())));
    }
    let (value, direction) = candidates.into_iter().min_by(|a, b| a.0.cmp(&b.0)).expect("f vanishes at the origin");
    let normal_form_shape = match edges.as_slice() {
        [((0, p), (q, 0))] => *p >= 2 && p < q && q % p != 0,
        _ => false,
    };
    Ok(NewtonBound { value, direction, normal_form_shape })
}

/// Compact edges of the Newton polyhedron, from the `y`-side to the `x`-side.
fn newton_edges(f: &Poly) -> Vec<((u32, u32), (u32, u32))> {
    let mut best: std::collections::BTreeMap<u32, u32> = std::collections::BTreeMap::new();
    for (e, _) in f.terms() {
        let slot = best.entry(e[0]).or_insert(e[1]);
        *slot = (*slot).min(e[1]);
    }
    // Keep the staircase: strictly decreasing y as x increases.
    let mut pts: Vec<(u32, u32)> = Vec::new();
    for (x, y) in best {
        if pts.last().is_none_or(|p| y < p.1) {
            pts.push((x, y));
        }
    }
    let mut hull: Vec<(u32, u32)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let m = hull[hull.len() - 1];
            let cross = (m.0 as i64 - o.0 as i64) * (p.1 as i64 - o.1 as i64) - (m.1 as i64 - o.1 as i64) * (p.0 as i64 - o.0 as i64);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Which of the two degenerations (or the smooth one) realizes the minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    Cone,
    Toric,
    Smooth,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::Cone => "cone",
            CaseTag::Toric => "toric",
            CaseTag::Smooth => "smooth",
        })
    }
}

fn check_klt(ch: &PuiseuxChar, lambda: &Rat) -> Result<()> {
    let upper = lct_unibranch(ch);
    if lambda.is_negative() || *lambda >= upper {
        return Err(Error::KltRange { lambda: Box::new(lambda.clone()), upper: Box::new(upper) });
    }
    Ok(())
}

/// `v_w(f)` of the branch equation (the sheared line `y` when smooth).
fn branch_value(ch: &PuiseuxChar, mu: &Rat, nu: &Rat) -> Rat {
    let a = Rat::from_integer(ch.a().into());
    match ch.b() {
        Some(b) => std::cmp::min(&a * nu, Rat::from_integer(b.into()) * mu),
        None => nu.clone(),
    }
}

/// `(μ + ν − λ·v_w(f))² / (μν)`, or `+∞` where the log discrepancy is not
/// positive.
pub fn nvol_at(ch: &PuiseuxChar, lambda: &Rat, w: &Weight) -> Result<ExtRat> {
    check_klt(ch, lambda)?;
    let (mu, nu) = plane_entries(w)?;
    let ld = mu + nu - lambda * branch_value(ch, mu, nu);
    if !ld.is_positive() {
        return Ok(ExtRat::Infinity);
    }
    Ok(ExtRat::Finite(&ld * &ld / (mu * nu)))
}

/// Local volume with its minimizing ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NVolProfile {
    pub ch: PuiseuxChar,
    pub lambda: Rat,
    pub value: Rat,
    /// Primitive positive integer vector `(w_x, w_y)`.
    pub ray: (BigInt, BigInt),
    pub case: CaseTag,
}

impl NVolProfile {
    pub fn ray_weight(&self) -> Weight {
        Weight::new(vec![Rat::from_integer(self.ray.0.clone()), Rat::from_integer(self.ray.1.clone())]).expect("positive ray")
    }

    /// The point of the ray with log discrepancy 1.
    pub fn unit_log_discrepancy_weight(&self) -> Weight {
        let w = self.ray_weight();
        let (mu, nu) = plane_entries(&w).expect("plane");
        let ld = mu + nu - &self.lambda * branch_value(&self.ch, mu, nu);
        w.scaled(&ld.recip()).expect("positive log discrepancy on the minimizer")
    }

    /// `λ` at which the cone and toric regimes meet, `1/a − 1/b`.
    pub fn threshold(&self) -> Option<Rat> {
        case_threshold(&self.ch)
    }
}

pub fn case_threshold(ch: &PuiseuxChar) -> Option<Rat> {
    ch.b().map(|b| Rat::new(BigInt::one(), ch.a().into()) - Rat::new(BigInt::one(), b.into()))
}

fn ray2(entries: [Rat; 2]) -> (BigInt, BigInt) {
    let mut r = primitive_ray(&entries).into_iter();
    (r.next().unwrap(), r.next().unwrap())
}

/// Closed-form local volume: `ab(1/a + 1/b − λ)²` with ray `(a₀, b₀)` when
/// `λ ≥ 1/a − 1/b`, else `4(1 − λa)` with ray `(1 − λa, 1)`; smooth branches
/// use the second formula with `a = 1`.
pub fn local_volume_closed(ch: &PuiseuxChar, lambda: &Rat) -> Result<NVolProfile> {
    check_klt(ch, lambda)?;
    let a = Rat::from_integer(ch.a().into());
    let four = Rat::from_integer(4.into());
    let toric = |case| {
        let mu = Rat::one() - lambda * &a;
        NVolProfile { ch: ch.clone(), lambda: lambda.clone(), value: &four * &mu, ray: ray2([mu, Rat::one()]), case }
    };
    let Some(b) = ch.b() else {
        return Ok(toric(CaseTag::Smooth));
    };
    let threshold = case_threshold(ch).expect("singular");
    if *lambda >= threshold {
        let b = Rat::from_integer(b.into());
        let s = a.recip() + b.recip() - lambda;
        let value = &a * &b * &s * &s;
        let ray = (BigInt::from(ch.a0()), BigInt::from(ch.b0().expect("singular")));
        Ok(NVolProfile { ch: ch.clone(), lambda: lambda.clone(), value, ray, case: CaseTag::Cone })
    } else {
        Ok(toric(CaseTag::Toric))
    }
}

/// Result of [`minimize_nvol`].
#[derive(Clone, Debug, PartialEq)]
pub struct NVolMinimum {
    pub ray: (BigInt, BigInt),
    pub value: Rat,
    /// Minimum found by the floating-point golden-section guard.
    pub numeric_value: f64,
}

const GUARD_TOL: f64 = 1e-12;
const GUARD_AGREE: f64 = 1e-9;

/// Minimizes `w ↦ nvol_at(ch, λ, w)` over positive weights.
///
/// The function is invariant under scaling, so it is minimized over
/// `ρ = ν/μ` with `μ = 1`. On `ρ ≤ b/a` the branch value is `aρ` and the
/// objective is `(1 + cρ)²/ρ` with `c = 1 − λa`; on `ρ ≥ b/a` it is `b` and
/// the objective is `(ρ + e)²/ρ` with `e = 1 − λb`. Each piece has its only
/// critical point at `ρ = 1/|c|` resp. `ρ = |e|`; the minimum is among those
/// that fall in their piece and the breakpoint `ρ = b/a`.
pub fn minimize_nvol(ch: &PuiseuxChar, lambda: &Rat) -> Result<NVolMinimum> {
    check_klt(ch, lambda)?;
    let a = Rat::from_integer(ch.a().into());
    let c = Rat::one() - lambda * &a;
    let mut candidates: Vec<Rat> = Vec::new();
    let breakpoint = ch.b().map(|b| Rat::from_integer(b.into()) / &a);
    if !c.is_zero() {
        let rho = c.abs().recip();
        if breakpoint.as_ref().is_none_or(|bp| rho <= *bp) {
            candidates.push(rho);
        }
    }
    if let (Some(b), Some(bp)) = (ch.b(), &breakpoint) {
        candidates.push(bp.clone());
        let e = Rat::one() - lambda * Rat::from_integer(b.into());
        if !e.is_zero() && e.abs() >= *bp {
            candidates.push(e.abs());
        }
    }
    let mut best: Option<(Rat, Rat)> = None;
    for rho in candidates {
        let w = Weight::plane(Rat::one(), rho.clone())?;
        if let ExtRat::Finite(v) = nvol_at(ch, lambda, &w)? {
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, rho));
            }
        }
    }
    let (value, rho) = best.ok_or_else(|| Error::Consistency("no finite critical value".into()))?;
    let numeric_value = golden_section_guard(ch, lambda);
    let exact = rat_to_f64(&value);
    if (numeric_value - exact).abs() > GUARD_AGREE * exact.abs().max(1.0) {
        return Err(Error::Consistency(format!("numeric guard {numeric_value} disagrees with exact minimum {value}")));
    }
    Ok(NVolMinimum { ray: ray2([Rat::one(), rho]), value, numeric_value })
}

/// Golden-section search of the objective over `t = ln ρ ∈ [−40, 40]`.
fn golden_section_guard(ch: &PuiseuxChar, lambda: &Rat) -> f64 {
    let a = ch.a() as f64;
    let b = ch.b().map(|b| b as f64);
    let lam = rat_to_f64(lambda);
    let objective = |t: f64| {
        let rho = t.exp();
        let val = match b {
            Some(b) => (a * rho).min(b),
            None => rho,
        };
        let ld = 1.0 + rho - lam * val;
        if ld <= 0.0 {
            f64::INFINITY
        } else {
            ld * ld / rho
        }
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (objective(x1), objective(x2));
    while hi - lo > GUARD_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    objective((lo + hi) / 2.0).min(f1).min(f2)
}

/// `log_discrepancy² · volume` for a pair, the normalized volume computed
/// from its definition.
pub fn nvol_of_pair(pair: &PairA2, w: &Weight) -> Result<ExtRat> {
    let ld = log_discrepancy(pair, w)?;
    if !ld.is_positive() {
        return Ok(ExtRat::Infinity);
    }
    let v = MonomialValuation::new(&PLANE_VARS, w.clone())?;
    Ok(ExtRat::Finite(&ld * &ld * volume(&v)?))
}

/// Primitive integer ray as `f64` ratio `w_y / w_x`, for display.
pub fn ray_slope(ray: &(BigInt, BigInt)) -> f64 {
    ray.1.to_f64().unwrap_or(f64::NAN) / ray.0.to_f64().unwrap_or(f64::NAN)
}
