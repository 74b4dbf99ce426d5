//! Parametrized curve branches `x = t^a, y = φ(t)`, their Puiseux
//! characteristics, implicit equations, and the inverse Newton–Puiseux
//! expansion for implicit input.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value as Json};

use crate::algebra::{parse_rat, rational_root, resultant_in, Poly, Rat};
use crate::error::{Error, Result};

pub const PLANE_VARS: [&str; 2] = ["x", "y"];

/// A primitive polynomial parametrization `x = t^a`, `y = Σ c_i t^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BranchParam {
    a: u32,
    phi: Vec<(u32, Rat)>,
}

impl BranchParam {
    pub fn a(&self) -> u32 {
        self.a
    }

    /// `(exponent, coefficient)` pairs, exponents strictly increasing.
    pub fn phi(&self) -> &[(u32, Rat)] {
        &self.phi
    }

    pub fn is_smooth(&self) -> bool {
        self.a == 1
    }

    /// Lowest exponent of `φ`, if any.
    pub fn order(&self) -> Option<u32> {
        self.phi.first().map(|(e, _)| *e)
    }

    /// `φ` as a polynomial in the single variable `var`.
    pub fn phi_poly(&self, var: &str) -> Poly {
        Poly::from_terms(&[var], self.phi.iter().map(|(e, c)| (vec![*e], c.clone())))
    }

    /// Evaluates the parametrization at `t`.
    pub fn point_at(&self, t: &Rat) -> (Rat, Rat) {
        let x = num_traits::pow(t.clone(), self.a as usize);
        let y = self.phi.iter().fold(Rat::zero(), |acc, (e, c)| acc + c * num_traits::pow(t.clone(), *e as usize));
        (x, y)
    }

    pub fn to_json(&self) -> Json {
        let phi: Vec<Json> = self.phi.iter().map(|(e, c)| json!([e, c.to_string()])).collect();
        json!({ "a": self.a, "phi": phi })
    }

    /// Reads `{"a": 2, "phi": [[3, "1"], [4, "1/2"]]}` and normalizes it.
    pub fn from_json(v: &Json) -> Result<BranchParam> {
        let bad = |m: &str| Error::InvalidBranch(m.to_string());
        let a = v.get("a").and_then(Json::as_u64).ok_or_else(|| bad("missing integer field `a`"))?;
        let phi = v.get("phi").and_then(Json::as_array).ok_or_else(|| bad("missing array field `phi`"))?;
        let mut terms = Vec::with_capacity(phi.len());
        for item in phi {
            let pair = item.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("phi entries must be [exponent, coefficient]"))?;
            let e = pair[0].as_u64().ok_or_else(|| bad("exponent must be a non-negative integer"))?;
            let c = match &pair[1] {
                Json::String(s) => parse_rat(s)?,
                Json::Number(n) if n.is_i64() => Rat::from_integer(n.as_i64().unwrap().into()),
                _ => return Err(bad("coefficient must be a rational string")),
            };
            terms.push((u32::try_from(e).map_err(|_| bad("exponent too large"))?, c));
        }
        normalize_branch(u32::try_from(a).map_err(|_| bad("a too large"))?, terms)
    }
}

impl fmt::Display for BranchParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x = t^{}, y = {}", self.a, self.phi_poly("t"))
    }
}

/// Brings a raw parametrization into normal form.
///
/// Duplicate exponents are merged and zero terms dropped. For `a > 1` the
/// lowest exponent `b` must satisfy `b > a` and `a ∤ b`, and `φ` is divided
/// by its leading coefficient (the rescaling `y ↦ y / c`, which keeps all
/// arithmetic rational).
pub fn normalize_branch(a: u32, raw_phi: Vec<(u32, Rat)>) -> Result<BranchParam> {
    if a == 0 {
        return Err(Error::InvalidBranch("a must be at least 1".into()));
    }
    let mut merged = std::collections::BTreeMap::<u32, Rat>::new();
    for (e, c) in raw_phi {
        if e == 0 {
            return Err(Error::InvalidBranch("phi must vanish at t = 0 (exponent 0 given)".into()));
        }
        *merged.entry(e).or_insert_with(Rat::zero) += c;
    }
    let phi: Vec<(u32, Rat)> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    if a == 1 {
        return Ok(BranchParam { a, phi });
    }
    let Some((b, lead)) = phi.first().cloned() else {
        return Err(Error::InvalidBranch(format!("phi is zero with a = {a}: the curve is the line y = 0 counted {a} times")));
    };
    let g = phi.iter().fold(a as u64, |g, (e, _)| g.gcd(&(*e as u64)));
    if g > 1 {
        return Err(Error::NonPrimitive { gcd: g });
    }
    if b <= a {
        return Err(Error::UnsupportedFrame(format!("lowest exponent {b} of phi must exceed a = {a}")));
    }
    if b % a == 0 {
        return Err(Error::UnsupportedFrame(format!("lowest exponent {b} of phi is divisible by a = {a}")));
    }
    let phi = phi.into_iter().map(|(e, c)| (e, c / &lead)).collect();
    Ok(BranchParam { a, phi })
}

/// Characteristic exponents `(β₀; β₁, …, β_g)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PuiseuxChar {
    exponents: Vec<u32>,
}

impl PuiseuxChar {
    /// Validates the gcd chain.
    pub fn new(exponents: Vec<u32>) -> Result<PuiseuxChar> {
        let bad = |m: String| Error::InvalidBranch(m);
        let (&a, rest) = exponents.split_first().ok_or_else(|| bad("empty characteristic".into()))?;
        if a == 0 {
            return Err(bad("beta_0 must be positive".into()));
        }
        let mut d = a;
        let mut prev = 0;
        for &beta in rest {
            if beta <= prev {
                return Err(bad("characteristic exponents must increase".into()));
            }
            if beta % d == 0 {
                return Err(bad(format!("{beta} is divisible by the previous gcd {d}")));
            }
            d = d.gcd(&beta);
            prev = beta;
        }
        if d != 1 {
            return Err(bad(format!("gcd chain ends at {d}, not 1")));
        }
        Ok(PuiseuxChar { exponents })
    }

    pub fn smooth() -> PuiseuxChar {
        PuiseuxChar { exponents: vec![1] }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn a(&self) -> u32 {
        self.exponents[0]
    }

    /// `β₁`; absent for a smooth branch.
    pub fn b(&self) -> Option<u32> {
        self.exponents.get(1).copied()
    }

    pub fn is_smooth(&self) -> bool {
        self.exponents.len() == 1
    }

    pub fn d(&self) -> u32 {
        self.b().map_or(1, |b| self.a().gcd(&b))
    }

    pub fn a0(&self) -> u32 {
        self.a() / self.d()
    }

    pub fn b0(&self) -> Option<u32> {
        self.b().map(|b| b / self.d())
    }
}

impl fmt::Display for PuiseuxChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rest: Vec<String> = self.exponents[1..].iter().map(u32::to_string).collect();
        if rest.is_empty() {
            write!(f, "({})", self.exponents[0])
        } else {
            write!(f, "({}; {})", self.exponents[0], rest.join(", "))
        }
    }
}

pub fn puiseux_characteristic(br: &BranchParam) -> Result<PuiseuxChar> {
    let mut exps = vec![br.a];
    let mut d = br.a;
    for (i, _) in &br.phi {
        if d == 1 {
            break;
        }
        if i % d != 0 {
            exps.push(*i);
            d = d.gcd(i);
        }
    }
    if d != 1 {
        return Err(Error::Consistency(format!("gcd chain of a primitive branch stopped at {d}")));
    }
    Ok(PuiseuxChar { exponents: exps })
}

pub fn equisingular(b1: &BranchParam, b2: &BranchParam) -> Result<bool> {
    Ok(puiseux_characteristic(b1)? == puiseux_characteristic(b2)?)
}

/// Implicit equation `Res_t(x − t^a, y − φ(t))`, sign-normalized so the
/// monomial `y^a` has coefficient 1.
pub fn implicitize(br: &BranchParam) -> Poly {
    let vars = ["x", "y", "t"];
    if br.is_smooth() {
        let phi = br.phi_poly("x").embed(&PLANE_VARS).expect("x is a plane variable");
        return &Poly::var(&PLANE_VARS, "y").unwrap() - &phi;
    }
    let x = Poly::var(&vars, "x").unwrap();
    let y = Poly::var(&vars, "y").unwrap();
    let t = Poly::var(&vars, "t").unwrap();
    let p = &x - &t.pow(br.a);
    let q = &y - &br.phi_poly("t").embed(&vars).unwrap();
    let res = resultant_in(&p, &q, "t").expect("both have positive t-degree");
    let res = res.normalize_sign();
    debug_assert!(res.coeff(&[0, br.a]).is_one());
    res
}

/// Shear `y ↦ y − φ(x)` taking a smooth branch to the line `y = 0`.
pub fn shear_to_line(f: &Poly, br: &BranchParam) -> Result<Poly> {
    if !br.is_smooth() {
        return Err(Error::InvalidBranch("shear applies to smooth branches only".into()));
    }
    let y_idx = f.var_index("y").ok_or_else(|| Error::UnknownVariable { name: "y".into(), pos: 0 })?;
    let phi = br.phi_poly("x").embed(f.vars())?;
    let y = Poly::var(f.vars(), "y")?;
    Ok(f.substitute(y_idx, &(&y + &phi)))
}

/// Recovers a parametrization of the branch defined by `f ∈ ℚ[x, y]`.
///
/// Terms of `φ` are produced up to exponent `a · max_terms`; the expansion
/// stops early when it becomes an exact root. Only rational expansions are
/// supported.
pub fn newton_puiseux(f: &Poly, max_terms: u32) -> Result<BranchParam> {
    if f.nvars() != 2 {
        return Err(Error::VarMismatch { left: f.vars().to_vec(), right: PLANE_VARS.iter().map(|s| s.to_string()).collect() });
    }
    if f.is_zero() || !f.coeff(&[0, 0]).is_zero() {
        return Err(Error::NotUnibranch("curve does not pass through the origin".into()));
    }
    let on_axis = f.restrict_zero(0);
    let a = on_axis
        .terms()
        .map(|(e, _)| e[0])
        .min()
        .ok_or_else(|| Error::NotUnibranch("curve contains the line x = 0".into()))?;
    let bound = a.saturating_mul(max_terms.max(1));

    // g(t, y) = f(t^a, y)
    let tv = ["t", "y"];
    let mut g = Poly::from_terms(&tv, f.terms().map(|(e, c)| (vec![e[0] * a, e[1]], c.clone())));
    let mut phi: Vec<(u32, Rat)> = Vec::new();
    let mut last = 0u32;
    let mut d = a;
    let mut first = true;
    loop {
        if g.restrict_zero(1).is_zero() {
            break;
        }
        let edges = lower_edges(&g, a);
        let positive: Vec<&Edge> = edges.iter().filter(|e| e.order > Rat::from_integer(last.into())).collect();
        if first && positive.len() != 1 {
            return Err(Error::NotUnibranch(format!("{} Newton polygon edges at the origin", positive.len())));
        }
        let edge = positive
            .into_iter()
            .min_by(|x, y| x.order.cmp(&y.order))
            .ok_or_else(|| Error::NotUnibranch("no root continues the expansion".into()))?;
        if !edge.order.is_integer() {
            return Err(Error::NotUnibranch(format!("fractional exponent {} after x = t^{a}", edge.order)));
        }
        let e: u32 = edge.order.to_integer().try_into().map_err(|_| Error::Budget("exponent overflow".into()))?;
        if e > bound {
            break;
        }
        let c = edge_root(&g, edge)?;
        first = false;
        if !e.is_multiple_of(d) {
            d = d.gcd(&e);
        }
        let shift = &Poly::monomial(&tv, vec![e, 0], c.clone()) + &Poly::var(&tv, "y").unwrap();
        g = g.substitute(1, &shift);
        phi.push((e, c));
        last = e;
    }
    if d != 1 {
        if g.restrict_zero(1).is_zero() {
            return Err(Error::NotUnibranch(format!("parametrization factors through t ↦ t^{d}")));
        }
        return Err(Error::Budget(format!("characteristic not resolved below exponent {bound}")));
    }
    if a > 1 && phi.is_empty() {
        return Err(Error::NotUnibranch("no branch found".into()));
    }
    normalize_branch(a, phi)
}

struct Edge {
    /// Upper-left endpoint `(t-exponent, y-exponent)`.
    hi: (u32, u32),
    /// Lower-right endpoint.
    lo: (u32, u32),
    order: Rat,
}

/// Edges of the lower Newton polygon of `g(t, y)` between the `y`-axis
/// point `(0, j_max)` and the `t`-axis point, for roots vanishing at `t = 0`.
fn lower_edges(g: &Poly, a: u32) -> Vec<Edge> {
    // Minimal t-exponent for each y-exponent.
    let jmax = g.terms().filter(|(e, _)| e[0] == 0).map(|(e, _)| e[1]).min().unwrap_or(a);
    let mut pts: Vec<(u32, u32)> = Vec::new();
    for j in 0..=jmax {
        if let Some(i) = g.terms().filter(|(e, _)| e[1] == j).map(|(e, _)| e[0]).min() {
            pts.push((i, j));
        }
    }
    // Sort by y descending (t ascending along the hull).
    pts.sort_by_key(|p| std::cmp::Reverse(p.1));
    let mut hull: Vec<(u32, u32)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let m = hull[hull.len() - 1];
            // Keep m only if it lies strictly below segment o–p.
            let cross = (m.0 as i64 - o.0 as i64) * (p.1 as i64 - o.1 as i64) - (m.1 as i64 - o.1 as i64) * (p.0 as i64 - o.0 as i64);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull.windows(2)
        .map(|w| {
            let (hi, lo) = (w[0], w[1]);
            let order = Rat::new((lo.0 as i64 - hi.0 as i64).into(), (hi.1 as i64 - lo.1 as i64).into());
            Edge { hi, lo, order }
        })
        .collect()
}

/// Rational root `c` of the edge polynomial, which must be a power of a
/// binomial `lead · (u^m − r)^q`.
fn edge_root(g: &Poly, edge: &Edge) -> Result<Rat> {
    let n = (edge.hi.1 - edge.lo.1) as usize;
    let mut coeffs = vec![Rat::zero(); n + 1];
    for (k, slot) in coeffs.iter_mut().enumerate() {
        // y-exponent lo.1 + k sits at t-exponent lo.0 − k·order.
        let j = edge.lo.1 as usize + k;
        let i = Rat::from_integer(edge.lo.0.into()) - &edge.order * Rat::from_integer((k as u32).into());
        if i.is_integer() && !i.is_negative() {
            let i: u32 = i.to_integer().try_into().unwrap();
            *slot = g.coeff(&[i, j as u32]);
        }
    }
    let lead = coeffs[n].clone();
    let m = (1..=n).find(|&k| !coeffs[k].is_zero()).expect("edge endpoint is nonzero");
    if !n.is_multiple_of(m) {
        return Err(Error::NotUnibranch("edge polynomial is not a binomial power".into()));
    }
    let q = n / m;
    let r = -&coeffs[n - m] / (Rat::from_integer(q.into()) * &lead);
    // Compare with lead · (u^m − r)^q.
    let mut expected = vec![Rat::zero(); n + 1];
    let mut binom = Rat::one();
    for i in 0..=q {
        // term C(q, i) u^{m i} (−r)^{q − i}
        expected[m * i] = &lead * &binom * num_traits::pow(-r.clone(), q - i);
        binom = binom * Rat::from_integer(((q - i) as u64).into()) / Rat::from_integer(((i + 1) as u64).into());
    }
    if expected != coeffs {
        return Err(Error::NotUnibranch("edge polynomial has several distinct root orbits".into()));
    }
    rational_root(&r, m as u32)
        .ok_or_else(|| Error::AlgebraicExtension(format!("coefficient is a root of u^{m} = {r}")))
}
