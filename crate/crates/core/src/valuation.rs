//! Monomial valuations `v_α(f) = min { ⟨α, m⟩ : c_m ≠ 0 }` and their
//! behaviour when some coordinates are sent to a central fiber.

use num_traits::Signed;

use crate::algebra::{ExtRat, Poly, Rat};
use crate::branch::PuiseuxChar;
use crate::error::{Error, Result};

/// Strictly positive rational weight vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight(Vec<Rat>);

impl Weight {
    pub fn new(entries: Vec<Rat>) -> Result<Weight> {
        if entries.is_empty() {
            return Err(Error::InvalidWeight("empty weight".into()));
        }
        if let Some(bad) = entries.iter().find(|w| !w.is_positive()) {
            return Err(Error::InvalidWeight(format!("entry {bad} is not positive")));
        }
        Ok(Weight(entries))
    }

    pub fn from_ints(entries: &[i64]) -> Result<Weight> {
        Weight::new(entries.iter().map(|&k| Rat::from_integer(k.into())).collect())
    }

    /// The weight `(μ, ν)` on the plane variables `(x, y)`.
    pub fn plane(mu: Rat, nu: Rat) -> Result<Weight> {
        Weight::new(vec![mu, nu])
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, m: &[u32]) -> Rat {
        self.0.iter().zip(m).map(|(w, &k)| w * Rat::from_integer(k.into())).sum()
    }

    pub fn scaled(&self, c: &Rat) -> Result<Weight> {
        Weight::new(self.0.iter().map(|w| w * c).collect())
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(Rat::is_integer)
    }

    pub fn max_entry(&self) -> &Rat {
        self.0.iter().max().expect("non-empty")
    }

    pub fn min_entry(&self) -> &Rat {
        self.0.iter().min().expect("non-empty")
    }
}

/// A monomial valuation centred at the origin of affine space over `vars`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialValuation {
    vars: Vec<String>,
    weight: Weight,
}

impl MonomialValuation {
    pub fn new<S: AsRef<str>>(vars: &[S], weight: Weight) -> Result<MonomialValuation> {
        if vars.len() != weight.len() {
            return Err(Error::InvalidWeight(format!("{} variables but {} weights", vars.len(), weight.len())));
        }
        Ok(MonomialValuation { vars: vars.iter().map(|v| v.as_ref().to_string()).collect(), weight })
    }

    /// Weight `(μ, ν)` on `(x, y)`.
    pub fn plane(mu: Rat, nu: Rat) -> Result<MonomialValuation> {
        MonomialValuation::new(&crate::branch::PLANE_VARS, Weight::plane(mu, nu)?)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// `+∞` exactly for the zero polynomial.
    pub fn eval(&self, f: &Poly) -> Result<ExtRat> {
        if f.vars() != self.vars.as_slice() {
            return Err(Error::VarMismatch { left: self.vars.clone(), right: f.vars().to_vec() });
        }
        Ok(min_weight(&self.weight, f))
    }
}

fn min_weight(w: &Weight, f: &Poly) -> ExtRat {
    f.terms().map(|(e, _)| w.dot(e)).min().map_or(ExtRat::Infinity, ExtRat::Finite)
}

/// `v_{(μ,ν)}` of the implicit equation of any branch with characteristic
/// `char`: `min(aν, bμ)`. The initial form along `aν = bμ` is
/// `(y^{a₀} − x^{b₀})^d`, so the two extreme monomials never cancel.
pub fn eval_on_branch(ch: &PuiseuxChar, w: &Weight) -> Result<Rat> {
    let b = ch.b().ok_or_else(|| Error::SmoothBranch("eval_on_branch needs a singular branch; shear to the line first".into()))?;
    let (mu, nu) = plane_entries(w)?;
    let a = Rat::from_integer(ch.a().into());
    let b = Rat::from_integer(b.into());
    Ok(std::cmp::min(a * nu, b * mu))
}

pub(crate) fn plane_entries(w: &Weight) -> Result<(&Rat, &Rat)> {
    match w.entries() {
        [mu, nu] => Ok((mu, nu)),
        other => Err(Error::InvalidWeight(format!("plane weight needs 2 entries, got {}", other.len()))),
    }
}

/// Output of [`degeneration_chain`]: `low ≤ mid ≤ high`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    /// `v_α(f)`, zero weight on the central-fiber variables.
    pub low: ExtRat,
    /// `v_{α,β}(f)`.
    pub mid: ExtRat,
    /// `v̄_α(f̄)` on the central fiber; `+∞` when `f̄ = 0`.
    pub high: ExtRat,
}

/// Evaluates `f` over `E`-variables (weights `alpha`, first) followed by
/// `F`-variables (weights `beta`) at the three points of the chain.
pub fn degeneration_chain(alpha: &Weight, beta: &Weight, f: &Poly) -> Result<Chain> {
    let r = alpha.len();
    let s = beta.len();
    if r == 0 || s == 0 {
        return Err(Error::VariableSplit("both E and F variable groups must be non-empty".into()));
    }
    if f.nvars() != r + s {
        return Err(Error::VariableSplit(format!("{} variables, split {r} + {s}", f.nvars())));
    }
    if f.is_zero() {
        return Err(Error::VariableSplit("f must be nonzero".into()));
    }
    let low = f.terms().map(|(e, _)| alpha.dot(&e[..r])).min().map(ExtRat::Finite).expect("nonzero");
    let mid = f.terms().map(|(e, _)| alpha.dot(&e[..r]) + beta.dot(&e[r..])).min().map(ExtRat::Finite).expect("nonzero");
    let central = restrict_central(f, &(r..r + s).collect::<Vec<_>>());
    let high = min_weight(alpha, &central);
    Ok(Chain { low, mid, high })
}

/// A finite `β` threshold beyond which `mid = high`: every `β_j` above
/// `deg(f) · max(α)` works when `f̄ ≠ 0`. `None` when `f̄ = 0`, where
/// `mid` grows without bound.
pub fn stabilization_bound(alpha: &Weight, f: &Poly) -> Option<Rat> {
    let r = alpha.len();
    let central_nonzero = f.terms().any(|(e, _)| e[r..].iter().all(|&k| k == 0));
    if !central_nonzero {
        return None;
    }
    let deg = f.total_degree().unwrap_or(0);
    Some(Rat::from_integer(deg.into()) * alpha.max_entry())
}

/// Sets the listed variables to zero and drops them.
pub fn restrict_central(f: &Poly, central_vars: &[usize]) -> Poly {
    let mut idx: Vec<usize> = central_vars.to_vec();
    idx.sort_unstable();
    idx.dedup();
    idx.into_iter().rev().fold(f.clone(), |acc, i| acc.restrict_zero(i))
}

/// Name-based form of [`restrict_central`]; names not present are ignored.
pub fn restrict_central_named<S: AsRef<str>>(f: &Poly, names: &[S]) -> Poly {
    let idx: Vec<usize> = names.iter().filter_map(|n| f.var_index(n.as_ref())).collect();
    restrict_central(f, &idx)
}
