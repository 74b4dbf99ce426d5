//! One-parameter families of branches sampled at rational points: per-fiber
//! invariants, constancy verdicts and fiberwise graded dimensions.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Deserialize;

use crate::algebra::{parse_rat, poly_parse, Poly, Rat};
use crate::branch::{normalize_branch, puiseux_characteristic, BranchParam, PuiseuxChar};
use crate::degeneration::{kss_degeneration, DegenerationResult};
use crate::error::{Error, Result};
use crate::ideals::graded_dims;
use crate::invariants::{lct_unibranch, local_volume_closed, minimize_nvol, CaseTag};
use crate::valuation::MonomialValuation;

/// Branch template `x = t^a`, `y = Σ c_i(s) t^{e_i}` sampled at finitely
/// many values of the parameter `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub param: String,
    pub samples: Vec<Rat>,
    pub a: u32,
    /// Coefficients are polynomials in the single variable `param`.
    pub phi: Vec<(u32, Poly)>,
    pub lambda: Rat,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RatField {
    Int(i64),
    Str(String),
}

impl RatField {
    fn to_rat(&self, what: &str) -> Result<Rat> {
        match self {
            RatField::Int(k) => Ok(Rat::from_integer((*k).into())),
            RatField::Str(s) => parse_rat(s).map_err(|e| Error::FamilyFile(format!("{what} `{s}`: {e}"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    param: String,
    samples: Vec<RatField>,
    a: u32,
    phi: Vec<(u32, String)>,
    lambda: RatField,
}

impl FamilySpec {
    /// Parses the JSON family format.
    pub fn parse(text: &str) -> Result<FamilySpec> {
        let raw: RawFamily = serde_json::from_str(text).map_err(|e| Error::FamilyFile(e.to_string()))?;
        if raw.param.is_empty() || !raw.param.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::FamilyFile(format!("invalid parameter name `{}`", raw.param)));
        }
        if raw.samples.is_empty() {
            return Err(Error::FamilyFile("empty samples list".into()));
        }
        if raw.a == 0 {
            return Err(Error::FamilyFile("a must be positive".into()));
        }
        let samples = raw.samples.iter().map(|s| s.to_rat("sample")).collect::<Result<Vec<_>>>()?;
        let vars = [raw.param.as_str()];
        let phi = raw
            .phi
            .iter()
            .map(|(e, expr)| poly_parse(expr, &vars).map(|p| (*e, p)).map_err(|err| Error::FamilyFile(format!("coefficient of t^{e}: {err}"))))
            .collect::<Result<Vec<_>>>()?;
        let lambda = raw.lambda.to_rat("lambda")?;
        Ok(FamilySpec { param: raw.param, samples, a: raw.a, phi, lambda })
    }

    /// The fiber over `s`, or the reason it is not a valid branch.
    pub fn instantiate(&self, s: &Rat) -> Result<BranchParam> {
        let raw = self.phi.iter().map(|(e, c)| (*e, c.eval(std::slice::from_ref(s)))).collect();
        normalize_branch(self.a, raw).map_err(|e| Error::Fiber { sample: s.clone(), reason: e.to_string() })
    }

    /// Samples whose instantiation fails, with reasons, in input order.
    pub fn flagged(&self) -> Vec<(Rat, String)> {
        self.samples
            .iter()
            .filter_map(|s| match self.instantiate(s) {
                Err(Error::Fiber { reason, .. }) => Some((s.clone(), reason)),
                _ => None,
            })
            .collect()
    }
}

pub fn load_family(path: &Path) -> Result<FamilySpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::FamilyFile(format!("{}: {e}", path.display())))?;
    FamilySpec::parse(&text)
}

/// Invariants of one fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberRecord {
    pub sample: Rat,
    pub branch: BranchParam,
    pub ch: PuiseuxChar,
    pub lct: Rat,
    pub nvol: Rat,
    pub ray: (BigInt, BigInt),
    pub case: CaseTag,
    pub kss: bool,
    pub degeneration: DegenerationResult,
    /// Jump → `dim a_λ/a_{>λ}` for the minimizer's primitive integer ray.
    pub graded: BTreeMap<Rat, u64>,
}

/// What must agree between fibers for them to share a central fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegenerationDescriptor {
    pub case: CaseTag,
    pub xi: (BigInt, BigInt),
    pub boundary: Vec<(Poly, Rat)>,
    pub kss: bool,
}

impl From<&DegenerationResult> for DegenerationDescriptor {
    fn from(d: &DegenerationResult) -> Self {
        DegenerationDescriptor { case: d.case, xi: d.xi.clone(), boundary: d.boundary.clone(), kss: d.kss }
    }
}

/// One flag per per-fiber column: true iff the column is constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Constancy {
    pub characteristic: bool,
    pub lct: bool,
    pub nvol: bool,
    pub ray: bool,
    pub case: bool,
    pub kss: bool,
    pub graded: bool,
}

impl Constancy {
    pub fn all(&self) -> bool {
        self.characteristic && self.lct && self.nvol && self.ray && self.case && self.kss && self.graded
    }
}

/// First jump where two fibers' graded dimensions differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatWitness {
    pub jump: Rat,
    pub samples: (Rat, Rat),
    pub dims: (u64, u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatFamilyVerdict {
    pub holds: bool,
    pub witness: Option<FlatWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub lambda: Rat,
    pub cutoff: Rat,
    pub fibers: Vec<FiberRecord>,
    /// Samples left out of every verdict, with reasons.
    pub excluded: Vec<(Rat, String)>,
    pub constancy: Constancy,
    pub flat: FlatFamilyVerdict,
    pub common: Option<DegenerationDescriptor>,
}

fn fiber_error(s: &Rat, e: Error) -> Error {
    match e {
        Error::Fiber { .. } => e,
        other => Error::Fiber { sample: s.clone(), reason: other.to_string() },
    }
}

fn fiber_record(spec: &FamilySpec, s: &Rat, br: BranchParam, cutoff: &Rat) -> Result<FiberRecord> {
    let ch = puiseux_characteristic(&br)?;
    let profile = local_volume_closed(&ch, &spec.lambda)?;
    let min = minimize_nvol(&ch, &spec.lambda)?;
    if min.value != profile.value || min.ray != profile.ray {
        return Err(Error::Consistency(format!("minimizer {:?} disagrees with closed form {:?}", (min.value, min.ray), (&profile.value, &profile.ray))));
    }
    let degeneration = kss_degeneration(&br, &spec.lambda)?;
    let weight = profile.ray_weight();
    let v = MonomialValuation::plane(weight.entries()[0].clone(), weight.entries()[1].clone())?;
    let graded = graded_dims(&v, cutoff)?.dims().clone();
    Ok(FiberRecord {
        sample: s.clone(),
        lct: lct_unibranch(&ch),
        nvol: profile.value,
        ray: profile.ray,
        case: profile.case,
        kss: degeneration.kss,
        branch: br,
        ch,
        degeneration,
        graded,
    })
}

fn constant<T: PartialEq>(fibers: &[FiberRecord], f: impl Fn(&FiberRecord) -> T) -> bool {
    fibers.windows(2).all(|w| f(&w[0]) == f(&w[1]))
}

fn flat_verdict(fibers: &[FiberRecord]) -> FlatFamilyVerdict {
    let jumps: BTreeSet<&Rat> = fibers.iter().flat_map(|r| r.graded.keys()).collect();
    for jump in jumps {
        let dim = |r: &FiberRecord| r.graded.get(jump).copied().unwrap_or(0);
        let first = &fibers[0];
        if let Some(other) = fibers.iter().find(|r| dim(r) != dim(first)) {
            let witness = FlatWitness { jump: jump.clone(), samples: (first.sample.clone(), other.sample.clone()), dims: (dim(first), dim(other)) };
            return FlatFamilyVerdict { holds: false, witness: Some(witness) };
        }
    }
    FlatFamilyVerdict { holds: true, witness: None }
}

/// Per-fiber invariants, computed in parallel and assembled in sample order.
pub fn family_report(spec: &FamilySpec, cutoff: &Rat) -> Result<FamilyReport> {
    let instantiated: Vec<(Rat, Result<BranchParam>)> = spec.samples.iter().map(|s| (s.clone(), spec.instantiate(s))).collect();
    let mut excluded = Vec::new();
    let mut valid = Vec::new();
    for (s, br) in instantiated {
        match br {
            Ok(br) => valid.push((s, br)),
            Err(Error::Fiber { reason, .. }) => excluded.push((s, reason)),
            Err(e) => return Err(e),
        }
    }
    if valid.is_empty() {
        return Err(Error::FamilyFile("no sample instantiates to a valid branch".into()));
    }
    let fibers = valid
        .into_par_iter()
        .map(|(s, br)| fiber_record(spec, &s, br, cutoff).map_err(|e| fiber_error(&s, e)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let constancy = Constancy {
        characteristic: constant(&fibers, |r| r.ch.clone()),
        lct: constant(&fibers, |r| r.lct.clone()),
        nvol: constant(&fibers, |r| r.nvol.clone()),
        ray: constant(&fibers, |r| r.ray.clone()),
        case: constant(&fibers, |r| r.case),
        kss: constant(&fibers, |r| r.kss),
        graded: constant(&fibers, |r| r.graded.clone()),
    };
    let flat = flat_verdict(&fibers);
    let descriptors: Vec<DegenerationDescriptor> = fibers.iter().map(|r| (&r.degeneration).into()).collect();
    let common = (constancy.all() && descriptors.windows(2).all(|w| w[0] == w[1])).then(|| descriptors[0].clone());
    Ok(FamilyReport { lambda: spec.lambda.clone(), cutoff: cutoff.clone(), fibers, excluded, constancy, flat, common })
}

/// True iff every valid fiber has the same graded dimensions up to `cutoff`.
pub fn flat_ideal_family_check(spec: &FamilySpec, cutoff: &Rat) -> Result<FlatFamilyVerdict> {
    Ok(family_report(spec, cutoff)?.flat)
}
