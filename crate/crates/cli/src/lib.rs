//! Report builders behind the `valvol` command line.
//!
//! Each command produces a JSON document (keys sorted, rationals as `p/q`
//! strings) for standard output and a short human summary for standard error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use valvol_core::algebra::{parse_rat, Rat};
use valvol_core::branch::{implicitize, newton_puiseux, normalize_branch, puiseux_characteristic, BranchParam};
use valvol_core::degeneration::{kss_degeneration, kss_test, P1ConePair};
use valvol_core::families::{family_report, load_family};
use valvol_core::invariants::{lct_newton_bound, lct_unibranch, local_volume_closed, minimize_nvol};
use valvol_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "valvol", version, about = "Normalized volumes and K-semistable degenerations of plane curve branches")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Machine output format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(clap::Args, Debug, Clone)]
pub struct BranchArgs {
    /// Exponent of x = t^a.
    #[arg(long)]
    pub a: u32,
    /// Terms of y = φ(t) as "e1:c1,e2:c2".
    #[arg(long, allow_hyphen_values = true)]
    pub phi: String,
    /// Boundary coefficient, a rational "p/q".
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Characteristic, lct, local volume and minimizing ray.
    Analyze(BranchArgs),
    /// K-semistable log Fano cone degeneration.
    Degenerate(BranchArgs),
    /// Per-fiber invariants and constancy verdicts of a family file.
    Family {
        #[arg(long)]
        file: PathBuf,
        /// Largest jump in the graded-dimension table.
        #[arg(long, default_value = "20")]
        cutoff: String,
    },
    /// Valuative K-semistability test for the cone over a marked line.
    Kss {
        /// Orbifold orders "a0,b0".
        #[arg(long)]
        orders: String,
        #[arg(long, allow_hyphen_values = true)]
        coeff: String,
    },
    /// Randomized cross-checks of closed forms against the oracles.
    Selftest {
        #[arg(long, default_value_t = 50)]
        cases: u32,
    },
}

/// Machine document and human summary of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub report: Value,
    pub summary: String,
    /// False when an internal cross-check failed; the exit status is nonzero.
    pub ok: bool,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.report).expect("serializable") + "\n",
            Format::Text => {
                let mut lines = Vec::new();
                flatten("", &self.report, &mut lines);
                lines.join("\n") + "\n"
            }
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::String(s) => out.push(format!("{prefix} = {s}")),
        other => out.push(format!("{prefix} = {other}")),
    }
}

/// `error: code=KLT_RANGE message="..."`
pub fn error_line(e: &Error) -> String {
    format!("error: code={} message={}", e.code(), Value::String(e.to_string()))
}

/// Parses `"3:1,4:-1/2"`. An empty string is the empty series.
pub fn parse_phi(text: &str) -> Result<Vec<(u32, Rat)>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for item in text.split(',') {
        let pos = offset;
        offset += item.len() + 1;
        let item = item.trim();
        if item.is_empty() {
            if text.trim().is_empty() {
                break;
            }
            return Err(Error::Syntax { pos, msg: "empty phi term".into() });
        }
        let (e, c) = item.split_once(':').ok_or_else(|| Error::Syntax { pos, msg: format!("phi term `{item}` is not exponent:coefficient") })?;
        let e: u32 = e.trim().parse().map_err(|_| Error::Syntax { pos, msg: format!("bad exponent `{e}`") })?;
        out.push((e, parse_rat(c.trim())?));
    }
    Ok(out)
}

fn parse_branch(args: &BranchArgs) -> Result<(BranchParam, Rat)> {
    Ok((normalize_branch(args.a, parse_phi(&args.phi)?)?, parse_rat(&args.lambda)?))
}

fn s<T: ToString>(x: T) -> Value {
    Value::String(x.to_string())
}

fn ray_json(r: &(impl ToString, impl ToString)) -> Value {
    json!([r.0.to_string(), r.1.to_string()])
}

fn ch_json(ch: &valvol_core::branch::PuiseuxChar) -> Value {
    json!({ "text": ch.to_string(), "exponents": ch.exponents() })
}

fn report(command: &str, inputs: Value, outputs: Value, checks: Map<String, Value>) -> Value {
    json!({ "command": command, "inputs": inputs, "outputs": outputs, "checks": checks })
}

fn all_checks_pass(checks: &Map<String, Value>) -> bool {
    checks.values().all(|v| v.as_bool() == Some(true))
}

pub fn cmd_analyze(br: &BranchParam, lambda: &Rat) -> Result<Output> {
    let ch = puiseux_characteristic(br)?;
    let lct = lct_unibranch(&ch);
    let closed = local_volume_closed(&ch, lambda)?;
    let min = minimize_nvol(&ch, lambda)?;
    let equation = implicitize(br);
    let mut checks = Map::new();
    checks.insert("closed_form_matches_minimizer".into(), json!(closed.value == min.value && closed.ray == min.ray));
    // minimize_nvol errors out when its numeric guard disagrees
    checks.insert("numeric_guard_agrees".into(), json!(true));
    let mut outputs = json!({
        "characteristic": ch_json(&ch),
        "lct": s(&lct),
        "nvol": s(&closed.value),
        "ray": ray_json(&closed.ray),
        "case": s(closed.case),
        "equation": s(&equation),
    });
    if !ch.is_smooth() {
        let nb = lct_newton_bound(&equation)?;
        checks.insert("newton_bound_matches_lct".into(), json!(nb.value == lct));
        outputs["newton_bound"] = json!({ "value": s(&nb.value), "normal_form_shape": nb.normal_form_shape });
    }
    if let Some(t) = closed.threshold() {
        outputs["threshold"] = s(t);
    }
    let ok = all_checks_pass(&checks);
    if !ok {
        return Err(Error::Consistency(format!("analyze cross-checks failed: {}", Value::Object(checks))));
    }
    let summary = format!("{br}\n  characteristic {ch}, lct {lct}\n  nvol {} at ray ({}, {}) [{}]", closed.value, closed.ray.0, closed.ray.1, closed.case);
    let inputs = json!({ "branch": br.to_json(), "lambda": s(lambda) });
    Ok(Output { report: report("analyze", inputs, outputs, checks), summary, ok })
}

fn boundary_json(b: &[(valvol_core::algebra::Poly, Rat)]) -> Value {
    Value::Array(b.iter().map(|(c, k)| json!({ "curve": s(c), "coeff": s(k) })).collect())
}

pub fn cmd_degenerate(br: &BranchParam, lambda: &Rat) -> Result<Output> {
    let d = kss_degeneration(br, lambda)?;
    let mut checks = Map::new();
    // kss_degeneration fails outright when the central volume disagrees
    checks.insert("central_volume_matches_closed_form".into(), json!(true));
    checks.insert("kss".into(), json!(d.kss));
    let outputs = json!({
        "characteristic": ch_json(&d.ch),
        "xi": ray_json(&d.xi),
        "equation": s(&d.equation),
        "initial_form": s(&d.initial_form),
        "central_boundary": boundary_json(&d.boundary),
        "case": s(d.case),
        "kss": d.kss,
        "rank": d.rank,
        "nvol": s(&d.nvol),
        "rees_family": s(&d.rees),
    });
    let central: Vec<String> = d.boundary.iter().map(|(c, k)| format!("{k}·({c})")).collect();
    let central = if central.is_empty() { "0".to_string() } else { central.join(" + ") };
    let summary = format!("{br}\n  degenerates to (A², {central}; ξ = ({}, {})) [{}]\n  K-semistable: {}", d.xi.0, d.xi.1, d.case, d.kss);
    let inputs = json!({ "branch": br.to_json(), "lambda": s(lambda) });
    Ok(Output { report: report("degenerate", inputs, outputs, checks), summary, ok: d.kss })
}

pub fn cmd_family(path: &Path, cutoff: &Rat) -> Result<Output> {
    let spec = load_family(path)?;
    let r = family_report(&spec, cutoff)?;
    let fibers: Vec<Value> = r
        .fibers
        .iter()
        .map(|f| {
            json!({
                "sample": s(&f.sample),
                "branch": f.branch.to_json(),
                "characteristic": ch_json(&f.ch),
                "lct": s(&f.lct),
                "nvol": s(&f.nvol),
                "ray": ray_json(&f.ray),
                "case": s(f.case),
                "kss": f.kss,
            })
        })
        .collect();
    let excluded: Vec<Value> = r.excluded.iter().map(|(x, why)| json!({ "sample": s(x), "reason": why })).collect();
    let mut jumps: std::collections::BTreeSet<&Rat> = std::collections::BTreeSet::new();
    r.fibers.iter().for_each(|f| jumps.extend(f.graded.keys()));
    let table: Vec<Value> = jumps
        .into_iter()
        .map(|j| json!({ "jump": s(j), "dims": r.fibers.iter().map(|f| f.graded.get(j).copied().unwrap_or(0)).collect::<Vec<_>>() }))
        .collect();
    let c = &r.constancy;
    let constancy = json!({
        "characteristic": c.characteristic, "lct": c.lct, "nvol": c.nvol, "ray": c.ray,
        "case": c.case, "kss": c.kss, "graded": c.graded,
    });
    let witness = r.flat.witness.as_ref().map_or(Value::Null, |w| {
        json!({ "jump": s(&w.jump), "samples": [s(&w.samples.0), s(&w.samples.1)], "dims": [w.dims.0, w.dims.1] })
    });
    let common = r.common.as_ref().map_or(Value::Null, |d| {
        json!({ "case": s(d.case), "xi": ray_json(&d.xi), "central_boundary": boundary_json(&d.boundary), "kss": d.kss })
    });
    let outputs = json!({
        "fibers": fibers,
        "excluded": excluded,
        "graded_table": table,
        "constancy": constancy,
        "flat": { "holds": r.flat.holds, "witness": witness },
        "common_degeneration": common,
    });
    let mut checks = Map::new();
    checks.insert("fibers_kss".into(), json!(r.fibers.iter().all(|f| f.kss)));
    let ok = all_checks_pass(&checks);
    let mut summary = format!("family in {} over {} samples ({} excluded), lambda {}", spec.param, spec.samples.len(), r.excluded.len(), r.lambda);
    for (x, why) in &r.excluded {
        summary += &format!("\n  excluded {} = {x}: {why}", spec.param);
    }
    summary += &format!("\n  all invariants constant: {}", c.all());
    match &r.flat.witness {
        Some(w) => summary += &format!("\n  graded dimensions differ at jump {} ({} vs {})", w.jump, w.samples.0, w.samples.1),
        None => summary += "\n  graded dimensions constant",
    }
    if let Some(d) = &r.common {
        summary += &format!("\n  common degeneration: {} with ξ = ({}, {})", d.case, d.xi.0, d.xi.1);
    }
    let samples: Vec<Value> = spec.samples.iter().map(s).collect();
    let phi: Vec<Value> = spec.phi.iter().map(|(e, c)| json!([e, s(c)])).collect();
    let inputs = json!({
        "file": s(path.display()),
        "cutoff": s(cutoff),
        "family": { "param": spec.param, "samples": samples, "a": spec.a, "phi": phi, "lambda": s(&spec.lambda) },
    });
    Ok(Output { report: report("family", inputs, outputs, checks), summary, ok })
}

pub fn parse_orders(text: &str) -> Result<(u32, u32)> {
    let bad = || Error::Syntax { pos: 0, msg: format!("orders `{text}` must be two positive integers a0,b0") };
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

pub fn cmd_kss(orders: (u32, u32), coeff: &Rat) -> Result<Output> {
    let pair = P1ConePair::cone(orders.0, orders.1, coeff.clone())?;
    let verdict = kss_test(&pair);
    let threshold = Rat::new(1.into(), orders.0.into()) - Rat::new(1.into(), orders.1.into());
    let marks: Vec<Value> = pair.marks().iter().map(|(p, c)| json!({ "point": p, "coeff": s(c) })).collect();
    let outputs = json!({ "kss": verdict, "threshold": s(&threshold), "marks": marks });
    let summary = format!("cone over (P¹; orders {}, {}) with coefficient {coeff} at 1: K-semistable {verdict} (threshold {threshold})", orders.0, orders.1);
    let inputs = json!({ "orders": [orders.0, orders.1], "coeff": s(coeff) });
    Ok(Output { report: report("kss", inputs, outputs, Map::new()), summary, ok: true })
}

/// Randomized corpus driven by `seed`: closed forms against the minimizer,
/// the Newton-polygon bound against the lct, and implicit round trips.
pub fn cmd_selftest(seed: u64, cases: u32) -> Result<Output> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let mut run = 0;
    while run < cases {
        let a = rng.random_range(2..=4u32);
        let b = rng.random_range(a + 1..=11);
        let mut phi = vec![(b, Rat::from_integer(1.into()))];
        for e in b + 1..=b + 3 {
            if rng.random_bool(0.4) {
                phi.push((e, Rat::new(rng.random_range(-3i64..=3).into(), rng.random_range(1i64..=3).into())));
            }
        }
        let Ok(br) = normalize_branch(a, phi) else { continue };
        run += 1;
        let ch = puiseux_characteristic(&br)?;
        let lct = lct_unibranch(&ch);
        let lambda = &lct * Rat::new(rng.random_range(0..16).into(), 16.into());
        let f = implicitize(&br);
        let closed = local_volume_closed(&ch, &lambda)?;
        let min = minimize_nvol(&ch, &lambda)?;
        let back = newton_puiseux(&f, 20)?;
        let checks = [
            ("minimizer", closed.value == min.value && closed.ray == min.ray),
            ("newton_bound", lct_newton_bound(&f)?.value == lct),
            ("round_trip", implicitize(&back) == f),
            ("kss", kss_degeneration(&br, &lambda)?.kss),
        ];
        for (name, passed) in checks {
            if !passed {
                failures.push(json!({ "check": name, "branch": br.to_json(), "lambda": s(&lambda) }));
            }
        }
    }
    let ok = failures.is_empty();
    let summary = format!("selftest seed {seed}: {cases} cases, {} failures", failures.len());
    let outputs = json!({ "cases": cases, "failures": failures, "passed": ok });
    Ok(Output { report: report("selftest", json!({ "seed": seed, "cases": cases }), outputs, Map::new()), summary, ok })
}

/// Runs a parsed command line. `seed` is the self-test seed.
pub fn execute(cli: &Cli, seed: u64) -> Result<Output> {
    match &cli.command {
        Command::Analyze(args) => {
            let (br, lambda) = parse_branch(args)?;
            cmd_analyze(&br, &lambda)
        }
        Command::Degenerate(args) => {
            let (br, lambda) = parse_branch(args)?;
            cmd_degenerate(&br, &lambda)
        }
        Command::Family { file, cutoff } => cmd_family(file, &parse_rat(cutoff)?),
        Command::Kss { orders, coeff } => cmd_kss(parse_orders(orders)?, &parse_rat(coeff)?),
        Command::Selftest { cases } => cmd_selftest(seed, *cases),
    }
}

/// Reads `VALVOL_SEED`, defaulting to 0.
pub fn seed_from_env() -> Result<u64> {
    match std::env::var("VALVOL_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Error::Syntax { pos: 0, msg: format!("VALVOL_SEED `{v}` is not an unsigned integer") }),
        Err(_) => Ok(0),
    }
}
