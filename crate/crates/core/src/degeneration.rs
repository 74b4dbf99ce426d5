//! Weighted initial forms, Rees one-parameter families, the K-semistable
//! central fiber of a unibranch pair and the valuative test for cones over
//! a marked `ℙ¹`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::{primitive_ray, ExtRat, Poly, Rat};
use crate::branch::{implicitize, puiseux_characteristic, shear_to_line, BranchParam, PuiseuxChar, PLANE_VARS};
use crate::error::{Error, Result};
use crate::invariants::{local_volume_closed, nvol_at, nvol_of_pair, CaseTag, PairA2};
use crate::valuation::Weight;

fn check_len(f: &Poly, xi: &Weight) -> Result<()> {
    if f.nvars() != xi.len() {
        return Err(Error::InvalidWeight(format!("{} variables but {} weights", f.nvars(), xi.len())));
    }
    Ok(())
}

/// Sum of the terms of `f` of least `ξ`-weight.
pub fn initial_form(f: &Poly, xi: &Weight) -> Result<Poly> {
    check_len(f, xi)?;
    let Some(low) = f.terms().map(|(e, _)| xi.dot(e)).min() else {
        return Ok(f.clone());
    };
    Ok(Poly::from_terms(f.vars(), f.terms().filter(|(e, _)| xi.dot(e) == low).map(|(e, c)| (e.clone(), c.clone()))))
}

/// Name of the family parameter added by [`rees_family`].
pub const REES_PARAM: &str = "s";

/// `F = s^{−v_ξ(f)} f(s^{ξ₁} x₁, …)` over the variables of `f` followed by `s`.
pub fn rees_family(f: &Poly, xi: &Weight) -> Result<Poly> {
    check_len(f, xi)?;
    if !xi.is_integral() {
        return Err(Error::InvalidWeight("Rees family needs an integral weight; clear denominators first".into()));
    }
    if f.var_index(REES_PARAM).is_some() {
        return Err(Error::VarMismatch { left: f.vars().to_vec(), right: vec![REES_PARAM.into()] });
    }
    let mut vars = f.vars().to_vec();
    vars.push(REES_PARAM.into());
    let Some(low) = f.terms().map(|(e, _)| xi.dot(e)).min() else {
        return Ok(Poly::zero(&vars));
    };
    let terms = f.terms().map(|(e, c)| {
        let shift = (xi.dot(e) - &low).to_integer();
        let mut e = e.clone();
        e.push(u32::try_from(shift).expect("weight shift fits in u32"));
        (e, c.clone())
    });
    Ok(Poly::from_terms(&vars, terms))
}

/// `ℙ¹` with orbifold orders `(a₀, b₀)` at `0, ∞` and a list of marked points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1ConePair {
    orders: (u32, u32),
    marks: Vec<(String, Rat)>,
}

impl P1ConePair {
    /// Orders must be coprime with `1 ≤ a₀ ≤ b₀`; `(1, 1)` is the bare line.
    /// Coefficients lie in `[0, 1)` and sum to less than 2.
    pub fn new(orders: (u32, u32), marks: Vec<(String, Rat)>) -> Result<P1ConePair> {
        let (a0, b0) = orders;
        if a0 == 0 || a0 > b0 || num_integer::gcd(a0, b0) != 1 {
            return Err(Error::InvalidPair(format!("orders ({a0}, {b0}) must be coprime with 1 <= a0 <= b0")));
        }
        if let Some((p, c)) = marks.iter().find(|(_, c)| c.is_negative() || *c >= Rat::one()) {
            return Err(Error::InvalidPair(format!("coefficient {c} at {p} outside [0, 1)")));
        }
        let total: Rat = marks.iter().map(|(_, c)| c).sum();
        if total >= Rat::from_integer(2.into()) {
            return Err(Error::NotLogFano(total));
        }
        Ok(P1ConePair { orders, marks })
    }

    /// `(1 − 1/a₀){0} + (1 − 1/b₀){∞} + c{1}`.
    pub fn cone(a0: u32, b0: u32, c: Rat) -> Result<P1ConePair> {
        let side = |k: u32| Rat::one() - Rat::new(BigInt::one(), k.into());
        P1ConePair::new((a0, b0), vec![("0".into(), side(a0)), ("inf".into(), side(b0)), ("1".into(), c)])
    }

    pub fn bare() -> P1ConePair {
        P1ConePair { orders: (1, 1), marks: Vec::new() }
    }

    pub fn orders(&self) -> (u32, u32) {
        self.orders
    }

    pub fn marks(&self) -> &[(String, Rat)] {
        &self.marks
    }
}

/// Valuative criterion on `ℙ¹`: `1 − c_p ≥ (2 − Σ c)/2` at every marked point
/// and at a generic point (`c = 0`).
pub fn kss_test(pair: &P1ConePair) -> bool {
    let total: Rat = pair.marks.iter().map(|(_, c)| c).sum();
    let bound = (Rat::from_integer(2.into()) - total) / Rat::from_integer(2.into());
    pair.marks.iter().map(|(_, c)| c).chain(std::iter::once(&Rat::zero())).all(|c| Rat::one() - c >= bound)
}

/// Exact argmin ray of `w ↦ (w_x + w_y − λa·w_y)² / (w_x w_y)`, which is
/// `(1 − λa, 1)`, and the verdict that the toric valuation is K-semistable.
pub fn toric_kss_check(lambda_a: &Rat) -> Result<((BigInt, BigInt), bool)> {
    if lambda_a.is_negative() || *lambda_a >= Rat::one() {
        return Err(Error::KltRange { lambda: Box::new(lambda_a.clone()), upper: Box::new(Rat::one()) });
    }
    let mut r = primitive_ray(&[Rat::one() - lambda_a, Rat::one()]).into_iter();
    Ok(((r.next().unwrap(), r.next().unwrap()), true))
}

/// The K-semistable log Fano cone degeneration of `(A², λC)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegenerationResult {
    pub branch: BranchParam,
    pub lambda: Rat,
    pub ch: PuiseuxChar,
    /// Primitive integer polarization.
    pub xi: (BigInt, BigInt),
    /// Equation of the branch in the coordinates used (sheared when smooth).
    pub equation: Poly,
    pub initial_form: Poly,
    /// Rees family of `equation` along `ξ`, in `x, y, s`.
    pub rees: Poly,
    /// Components with zero coefficient are omitted.
    pub boundary: Vec<(Poly, Rat)>,
    pub case: CaseTag,
    pub kss: bool,
    pub rank: u32,
    pub nvol: Rat,
}

impl DegenerationResult {
    pub fn xi_weight(&self) -> Weight {
        Weight::new(vec![Rat::from_integer(self.xi.0.clone()), Rat::from_integer(self.xi.1.clone())]).expect("positive ray")
    }

    pub fn central_pair(&self) -> PairA2 {
        self.boundary.iter().fold(PairA2::empty(), |p, (c, k)| p.with(c.clone(), k.clone(), None).expect("central boundary through the origin"))
    }
}

/// Builds the central fiber and checks it against the closed-form volume.
pub fn kss_degeneration(br: &BranchParam, lambda: &Rat) -> Result<DegenerationResult> {
    let ch = puiseux_characteristic(br)?;
    let profile = local_volume_closed(&ch, lambda)?;
    let equation = if br.is_smooth() { shear_to_line(&implicitize(br), br)? } else { implicitize(br) };
    let y = Poly::var(&PLANE_VARS, "y")?;
    let (xi, boundary, kss) = match profile.case {
        CaseTag::Cone => {
            let (a0, b0, d) = (ch.a0(), ch.b0().expect("singular"), ch.d());
            let coeff = lambda * Rat::from_integer(d.into());
            let curve = &y.pow(a0) - &Poly::var(&PLANE_VARS, "x")?.pow(b0);
            let kss = kss_test(&P1ConePair::cone(a0, b0, coeff.clone())?);
            ((BigInt::from(a0), BigInt::from(b0)), vec![(curve, coeff)], kss)
        }
        CaseTag::Toric | CaseTag::Smooth => {
            let coeff = lambda * Rat::from_integer(ch.a().into());
            let (ray, kss) = toric_kss_check(&coeff)?;
            if ray != profile.ray {
                return Err(Error::Consistency(format!("toric ray {ray:?} differs from minimizer {:?}", profile.ray)));
            }
            let boundary = if coeff.is_zero() { Vec::new() } else { vec![(y.clone(), coeff)] };
            (ray, boundary, kss)
        }
    };
    let xi_w = Weight::new(vec![Rat::from_integer(xi.0.clone()), Rat::from_integer(xi.1.clone())])?;
    let initial = initial_form(&equation, &xi_w)?;
    let rees = rees_family(&equation, &xi_w)?;
    let result = DegenerationResult {
        branch: br.clone(),
        lambda: lambda.clone(),
        ch: ch.clone(),
        xi,
        equation,
        initial_form: initial,
        rees,
        boundary,
        case: profile.case,
        kss,
        rank: 1,
        nvol: profile.value.clone(),
    };
    // The central pair's boundary is λ·f₀ rewritten with reduced support.
    let central = nvol_of_pair(&result.central_pair(), &xi_w)?;
    let original = nvol_at(&ch, lambda, &xi_w)?;
    let expected = ExtRat::Finite(profile.value);
    if central != expected || original != expected {
        return Err(Error::Consistency(format!("central fiber volume {central} and original {original} differ from {expected}")));
    }
    Ok(result)
}
