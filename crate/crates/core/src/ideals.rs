//! Ideal sequences of monomial valuations on the plane, counted on the
//! lattice `ℕ²`, and finite checks of the graded identities satisfied by
//! flat multi-indexed Rees families of monomial ideals.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::algebra::Rat;
use crate::error::{Error, Result};
use crate::valuation::{plane_entries, MonomialValuation, Weight};

/// `#{m ∈ ℕ² : ⟨w, m⟩ < λ}` = `length(O/a_λ)`.
pub fn colength(v: &MonomialValuation, lambda: &Rat) -> Result<u64> {
    let (mu, nu) = plane_entries(v.weight())?;
    if lambda.is_negative() {
        return Err(Error::InvalidWeight(format!("negative cutoff {lambda}")));
    }
    let mut total = 0u64;
    let mut rest = lambda.clone();
    while rest.is_positive() {
        // m2 ranges over 0..ceil(rest / nu)
        let q = rest.clone() / nu;
        let n = q.ceil().to_integer().to_u64().expect("count fits u64");
        total += n;
        rest -= mu;
    }
    Ok(total)
}

/// Closed form `vol(v) = 1/(μν)`.
pub fn volume(v: &MonomialValuation) -> Result<Rat> {
    let (mu, nu) = plane_entries(v.weight())?;
    Ok((mu * nu).recip())
}

/// Finite-`λ` estimate `2·colength(λ)/λ²` of the volume.
pub fn volume_estimate(v: &MonomialValuation, lambda: &Rat) -> Result<Rat> {
    if !lambda.is_positive() {
        return Err(Error::InvalidWeight("volume estimate needs a positive cutoff".into()));
    }
    let c = colength(v, lambda)?;
    Ok(Rat::from_integer(2u64.into()) * Rat::from_integer(c.into()) / (lambda * lambda))
}

/// Graded pieces `a_λ / a_{>λ}` of a monomial valuation up to a cutoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealSeqView {
    valuation: MonomialValuation,
    cutoff: Rat,
    dims: BTreeMap<Rat, u64>,
}

impl IdealSeqView {
    pub fn valuation(&self) -> &MonomialValuation {
        &self.valuation
    }

    pub fn cutoff(&self) -> &Rat {
        &self.cutoff
    }

    /// Jump value → `dim a_λ/a_{>λ}`, increasing in the jump.
    pub fn dims(&self) -> &BTreeMap<Rat, u64> {
        &self.dims
    }

    pub fn jumps(&self) -> impl Iterator<Item = &Rat> {
        self.dims.keys()
    }

    pub fn dim_at(&self, lambda: &Rat) -> u64 {
        self.dims.get(lambda).copied().unwrap_or(0)
    }

    /// `Σ_{jump < λ} dim`, which equals `colength(λ)` for `λ ≤ cutoff`.
    pub fn colength_below(&self, lambda: &Rat) -> u64 {
        self.dims.range(..lambda.clone()).map(|(_, d)| d).sum()
    }

    /// `v(a_λ)`: the least jump `≥ λ`, when it lies below the cutoff.
    pub fn ideal_value(&self, lambda: &Rat) -> Option<&Rat> {
        self.dims.range(lambda.clone()..).next().map(|(k, _)| k)
    }
}

pub fn graded_dims(v: &MonomialValuation, cutoff: &Rat) -> Result<IdealSeqView> {
    let (mu, nu) = plane_entries(v.weight())?;
    if cutoff.is_negative() {
        return Err(Error::InvalidWeight(format!("negative cutoff {cutoff}")));
    }
    let mut dims = BTreeMap::new();
    let mut x_part = Rat::zero();
    while &x_part <= cutoff {
        let mut val = x_part.clone();
        while &val <= cutoff {
            *dims.entry(val.clone()).or_insert(0u64) += 1;
            val += nu;
        }
        x_part += mu;
    }
    Ok(IdealSeqView { valuation: v.clone(), cutoff: cutoff.clone(), dims })
}

/// An upward-closed subset of `ℕ²` (a monomial ideal of `k[x, y]`), stored
/// by its minimal generators sorted by increasing `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Staircase {
    gens: Vec<(u32, u32)>,
}

impl Staircase {
    pub fn new<I: IntoIterator<Item = (u32, u32)>>(gens: I) -> Staircase {
        let mut pts: Vec<(u32, u32)> = gens.into_iter().collect();
        pts.sort_unstable();
        pts.dedup();
        let mut minimal: Vec<(u32, u32)> = Vec::new();
        for p in pts {
            // Sorted by x, so p is redundant iff some kept generator has y ≤ p.y.
            if minimal.iter().all(|g| g.1 > p.1) {
                minimal.push(p);
            }
        }
        Staircase { gens: minimal }
    }

    /// The unit ideal.
    pub fn whole() -> Staircase {
        Staircase { gens: vec![(0, 0)] }
    }

    pub fn zero() -> Staircase {
        Staircase { gens: Vec::new() }
    }

    /// Principal monomial ideal `⟨x^i y^j⟩`.
    pub fn principal(i: u32, j: u32) -> Staircase {
        Staircase { gens: vec![(i, j)] }
    }

    pub fn generators(&self) -> &[(u32, u32)] {
        &self.gens
    }

    pub fn contains(&self, p: (u32, u32)) -> bool {
        self.gens.iter().any(|g| g.0 <= p.0 && g.1 <= p.1)
    }

    pub fn intersect(&self, other: &Staircase) -> Staircase {
        Staircase::new(self.gens.iter().flat_map(|g| other.gens.iter().map(move |h| (g.0.max(h.0), g.1.max(h.1)))))
    }

    pub fn sum(&self, other: &Staircase) -> Staircase {
        Staircase::new(self.gens.iter().chain(&other.gens).copied())
    }

    pub fn is_subset(&self, other: &Staircase) -> bool {
        self.gens.iter().all(|&g| other.contains(g))
    }

    /// `{u : ⟨w_i, u⟩ ≥ m_i for all i}` for non-negative weights `w_i`,
    /// each nonzero.
    pub fn from_conditions(conds: &[((Rat, Rat), Rat)]) -> Result<Staircase> {
        for ((wx, wy), _) in conds {
            if wx.is_negative() || wy.is_negative() || (wx.is_zero() && wy.is_zero()) {
                return Err(Error::InvalidWeight(format!("condition weight ({wx}, {wy}) must be non-negative and nonzero")));
            }
        }
        // Minimal y for each x; stabilizes once every condition with wx > 0
        // is met by x alone.
        let x_stop = conds
            .iter()
            .filter(|((wx, _), _)| wx.is_positive())
            .map(|((wx, _), m)| (m / wx).ceil().to_integer().to_u32().unwrap_or(0))
            .max()
            .unwrap_or(0);
        let y_needed = |x: u32| -> Option<u32> {
            let mut need = 0;
            for ((wx, wy), m) in conds {
                let rest = m - wx * Rat::from_integer(x.into());
                if !rest.is_positive() {
                    continue;
                }
                if wy.is_zero() {
                    return None;
                }
                need = need.max((rest / wy).ceil().to_integer().to_u32().expect("finite"));
            }
            Some(need)
        };
        let gens: Vec<(u32, u32)> = (0..=x_stop).filter_map(|x| y_needed(x).map(|y| (x, y))).collect();
        Ok(Staircase::new(gens))
    }
}

/// Monomial ideals `I_m ⊆ k[x, y]` indexed by `m` in the box
/// `∏ [0, bounds_i] ⊂ ℕ^r`, with `I_0` the unit ideal and `I` antitone.
/// Quotient dimensions are counted inside the ambient square
/// `[0, ambient)²`.
#[derive(Clone, Debug)]
pub struct ReesFamilyTrunc {
    bounds: Vec<u32>,
    ambient: u32,
    ideals: BTreeMap<Vec<u32>, Staircase>,
}

fn box_indices(bounds: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        out = out.into_iter().flat_map(|p| (0..=b).map(move |k| {
            let mut q = p.clone();
            q.push(k);
            q
        })).collect();
    }
    out
}

impl ReesFamilyTrunc {
    pub fn from_fn<F>(bounds: Vec<u32>, ambient: u32, ideal: F) -> Result<ReesFamilyTrunc>
    where
        F: Fn(&[u32]) -> Staircase,
    {
        if bounds.is_empty() {
            return Err(Error::InvalidFamily("rank must be positive".into()));
        }
        let ideals: BTreeMap<_, _> = box_indices(&bounds).into_iter().map(|m| {
            let s = ideal(&m);
            (m, s)
        }).collect();
        let fam = ReesFamilyTrunc { bounds, ambient, ideals };
        fam.validate()?;
        Ok(fam)
    }

    /// `I_m = ⟨x^{m₁} y^{m₂}⟩`, the family of the two coordinate divisors.
    pub fn coordinate(bound: u32, ambient: u32) -> Result<ReesFamilyTrunc> {
        ReesFamilyTrunc::from_fn(vec![bound, bound], ambient, |m| Staircase::principal(m[0], m[1]))
    }

    /// `I_m = {u : v_i(u) ≥ m_i}` for monomial valuations `v_i` with
    /// non-negative weights.
    pub fn from_valuations(weights: &[(Rat, Rat)], bound: u32, ambient: u32) -> Result<ReesFamilyTrunc> {
        let zero: Vec<_> = weights.iter().cloned().map(|w| (w, Rat::zero())).collect();
        Staircase::from_conditions(&zero)?;
        ReesFamilyTrunc::from_fn(vec![bound; weights.len()], ambient, |m| {
            let conds: Vec<_> = weights.iter().cloned().zip(m.iter().map(|&k| Rat::from_integer(k.into()))).collect();
            Staircase::from_conditions(&conds).expect("weights validated")
        })
    }

    pub fn rank(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    pub fn ideal(&self, m: &[u32]) -> Option<&Staircase> {
        self.ideals.get(m)
    }

    fn validate(&self) -> Result<()> {
        let zero = vec![0; self.rank()];
        if self.ideals[&zero] != Staircase::whole() {
            return Err(Error::InvalidFamily("I_0 must be the unit ideal".into()));
        }
        for (m, s) in &self.ideals {
            for i in 0..self.rank() {
                let mut next = m.clone();
                next[i] += 1;
                if let Some(t) = self.ideals.get(&next) {
                    if !t.is_subset(s) {
                        return Err(Error::InvalidFamily(format!("not antitone: I_{next:?} is not contained in I_{m:?}")));
                    }
                }
            }
        }
        Ok(())
    }

    fn count(&self, member: impl Fn((u32, u32)) -> bool) -> u64 {
        let mut n = 0;
        for i in 0..self.ambient {
            for j in 0..self.ambient {
                if member((i, j)) {
                    n += 1;
                }
            }
        }
        n
    }
}

/// Outcome of [`flat_rees_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlatReesVerdict {
    Holds,
    /// `I_k ∩ I_ℓ ≠ I_{max(k, ℓ)}`.
    Intersection { k: Vec<u32>, l: Vec<u32> },
    /// The two sides of the graded identity differ at `lambda`.
    Graded { lambda: Rat, lhs: u64, rhs: u64 },
}

impl FlatReesVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, FlatReesVerdict::Holds)
    }
}

/// Checks, on the truncation, the intersection identity
/// `I_k ∩ I_ℓ = I_{max(k,ℓ)}` and for every `λ ≤ cutoff`
/// `dim (Σ_{⟨ξ,m⟩≥λ} I_m)/(Σ_{⟨ξ,m⟩>λ} I_m) = Σ_{⟨ξ,m⟩=λ} dim I_m/I_{>m}`.
pub fn flat_rees_check(fam: &ReesFamilyTrunc, xi: &Weight, cutoff: &Rat) -> Result<FlatReesVerdict> {
    let r = fam.rank();
    if xi.len() != r {
        return Err(Error::InvalidWeight(format!("xi has {} entries for rank {r}", xi.len())));
    }
    let required: Vec<u32> = xi
        .entries()
        .iter()
        .map(|w| (cutoff / w).floor().to_integer().to_u32().unwrap_or(u32::MAX).saturating_add(1))
        .collect();
    if required.iter().zip(&fam.bounds).any(|(need, have)| need > have) {
        return Err(Error::BoxTooSmall { required, have: fam.bounds.clone() });
    }

    let indices: Vec<&Vec<u32>> = fam.ideals.keys().collect();
    for (p, k) in indices.iter().enumerate() {
        for l in &indices[p + 1..] {
            let top: Vec<u32> = k.iter().zip(l.iter()).map(|(a, b)| *a.max(b)).collect();
            if fam.ideals[*k].intersect(&fam.ideals[*l]) != fam.ideals[&top] {
                return Ok(FlatReesVerdict::Intersection { k: (*k).clone(), l: (*l).clone() });
            }
        }
    }

    let values: BTreeMap<&Vec<u32>, Rat> = fam.ideals.keys().map(|m| (m, xi.dot(m))).collect();
    let mut lambdas: Vec<&Rat> = values.values().filter(|v| *v <= cutoff).collect();
    lambdas.sort();
    lambdas.dedup();
    for lambda in lambdas {
        let ge: Vec<&Staircase> = values.iter().filter(|(_, v)| *v >= lambda).map(|(m, _)| &fam.ideals[*m]).collect();
        let gt: Vec<&Staircase> = values.iter().filter(|(_, v)| *v > lambda).map(|(m, _)| &fam.ideals[*m]).collect();
        let lhs = fam.count(|u| ge.iter().any(|s| s.contains(u)) && !gt.iter().any(|s| s.contains(u)));
        let mut rhs = 0;
        for (m, _) in values.iter().filter(|(_, v)| *v == lambda) {
            let here = &fam.ideals[*m];
            let above: Vec<&Staircase> = (0..r)
                .map(|i| {
                    let mut n = (*m).clone();
                    n[i] += 1;
                    &fam.ideals[&n]
                })
                .collect();
            rhs += fam.count(|u| here.contains(u) && !above.iter().any(|s| s.contains(u)));
        }
        if lhs != rhs {
            return Ok(FlatReesVerdict::Graded { lambda: lambda.clone(), lhs, rhs });
        }
    }
    Ok(FlatReesVerdict::Holds)
}
