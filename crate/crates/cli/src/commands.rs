//! Subcommand implementations. Each returns the process exit code on success;
//! errors are mapped to exit codes by [`exit_code_for`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use fareylab_core::contfrac::{signs_alternate, CFSide};
use fareylab_core::farey_graph::{is_geodesic_sequence, max_denominator, pivot_separation, Window};
use fareylab_core::limit_analysis::{
    endpoint_row, sample_at, simplex_ends, sweep_row, AlphaCheck, EndpointReport, EndpointRow, SweepRow,
};
use fareylab_core::numeric::{rat, rat_to_f64, rat_to_string};
use fareylab_core::pairing::{decay_ratios, default_family, kappa_of, laminations_of, sandwich_check, TestCurve};
use fareylab_core::schedule::{cap_digits_from_env, GrowthSchedule};
use fareylab_core::{Error, Rat};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{parity_name, resolve, ConfigFile, Overrides, Resolved};
use crate::formats::{
    parse_lengths, read_file, to_json, write_file, write_lengths, AlphaJson, EndpointJson, EndpointRowJson,
    FamilyFile, LengthRow, LimitsFile, PairJson, ParsedRow, ScheduleFile, SweepJson, SweepRowJson, Verdict,
};
use crate::render;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_BAD_INPUT: u8 = 2;
pub const EXIT_CAP: u8 = 3;

/// Verdict thresholds.
pub const DECREASE_FROM_K: usize = 4;
pub const DECAY_BY_K: usize = 8;
pub const LATE_FROM_K: usize = 10;
pub fn endpoint_tol() -> Rat {
    rat(1, 1000)
}
pub fn lemma_tol() -> Rat {
    rat(1, 100)
}
pub fn segment_tol() -> Rat {
    rat(1, 100)
}
pub fn separation_min() -> Rat {
    rat(1, 100)
}
pub fn alpha_share_max() -> Rat {
    rat(1, 1000)
}
pub fn decay_max() -> Rat {
    rat(1, 100)
}

#[derive(Parser, Debug, Clone)]
#[command(name = "fareylab", version, about = "Schedules, checks, ray simulation, limit analysis and Farey rendering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Opts {
    /// TOML configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output path
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Time step D as a rational, e.g. 1 or 3/2
    #[arg(long = "D", global = true)]
    pub d: Option<String>,
    /// Comma-separated sweep parameters in [0, 1)
    #[arg(long, global = true, value_delimiter = ',')]
    pub theta: Option<Vec<String>>,
    /// even or odd
    #[arg(long, global = true)]
    pub parity: Option<String>,
    /// Stern–Brocot depth for render
    #[arg(long, global = true)]
    pub depth: Option<u32>,
    /// Seed for the randomized oracle checks
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub schedule: Option<PathBuf>,
    #[arg(long, global = true)]
    pub family: Option<PathBuf>,
    #[arg(long, global = true)]
    pub lengths: Option<PathBuf>,
    /// limits.json for the simplex scatter in render
    #[arg(long, global = true)]
    pub limits: Option<PathBuf>,
    /// Pivot check range for check
    #[arg(long, global = true, default_value_t = 30)]
    pub upto: usize,
    /// Treat advisory checks as required
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Generate a coefficient schedule (schedule.json)
    Schedule,
    /// Check a schedule against its invariants
    Check,
    /// Sample model lengths along the ray (lengths.csv)
    Simulate,
    /// Projective limit analysis of sampled lengths (limits.json)
    Limits,
    /// Render the Farey tessellation with overlays (SVG)
    Render,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Schedule => "schedule",
            Command::Check => "check",
            Command::Simulate => "simulate",
            Command::Limits => "limits",
            Command::Render => "render",
        }
    }

    fn default_out(self) -> &'static str {
        match self {
            Command::Schedule => "schedule.json",
            Command::Check => "check.json",
            Command::Simulate => "lengths.csv",
            Command::Limits => "limits.json",
            Command::Render => "farey.svg",
        }
    }
}

/// Exit code for an error escaping a subcommand.
pub fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::CoefficientCap { .. }) => EXIT_CAP,
        _ => EXIT_BAD_INPUT,
    }
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    cap_digits: u64,
    config: ConfigFile,
    inputs: BTreeMap<&'static str, String>,
    outputs: Vec<String>,
    seed: Option<u64>,
    strict: bool,
    upto: usize,
    exit_code: u8,
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

struct Ctx {
    opts: Opts,
    cfg: Resolved,
    cap: u64,
    inputs: BTreeMap<&'static str, String>,
    outputs: Vec<String>,
}

impl Ctx {
    fn schedule(&mut self) -> anyhow::Result<GrowthSchedule> {
        match &self.opts.schedule {
            Some(p) => {
                self.inputs.insert("schedule", p.display().to_string());
                ScheduleFile::load(p, self.cap)
            }
            None => Ok(GrowthSchedule::generate(self.cfg.schedule.clone())?),
        }
    }

    fn family(&mut self) -> anyhow::Result<Vec<TestCurve>> {
        match &self.opts.family {
            Some(p) => {
                self.inputs.insert("family", p.display().to_string());
                FamilyFile::load(p)
            }
            None => Ok(default_family()),
        }
    }

    fn write(&mut self, path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
        write_file(path, bytes)?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<u8> {
    let cap = cap_digits_from_env()?;
    let file = match &cli.opts.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let over = Overrides {
        kmax: cli.opts.kmax,
        d: cli.opts.d.clone(),
        thetas: cli.opts.theta.clone(),
        parity: cli.opts.parity.clone(),
        depth: cli.opts.depth,
    };
    let cfg = resolve(&file, &over, cap)?;
    let mut ctx = Ctx { opts: cli.opts.clone(), cfg, cap, inputs: BTreeMap::new(), outputs: Vec::new() };
    if let Some(p) = &cli.opts.config {
        ctx.inputs.insert("config", p.display().to_string());
    }
    let out = cli.opts.out.clone().unwrap_or_else(|| PathBuf::from(cli.command.default_out()));
    let code = match cli.command {
        Command::Schedule => cmd_schedule(&mut ctx, &out)?,
        Command::Check => cmd_check(&mut ctx, &out)?,
        Command::Simulate => cmd_simulate(&mut ctx, &out)?,
        Command::Limits => cmd_limits(&mut ctx, &out)?,
        Command::Render => cmd_render(&mut ctx, &out)?,
    };
    let manifest = Manifest {
        tool: "fareylab",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        cap_digits: ctx.cap,
        config: ctx.cfg.echo(),
        inputs: ctx.inputs.clone(),
        outputs: ctx.outputs.clone(),
        seed: ctx.opts.seed,
        strict: ctx.opts.strict,
        upto: ctx.opts.upto,
        exit_code: code,
    };
    write_file(&manifest_path(&out), to_json(&manifest).as_bytes())?;
    Ok(code)
}

fn cmd_schedule(ctx: &mut Ctx, out: &Path) -> anyhow::Result<u8> {
    let s = GrowthSchedule::generate(ctx.cfg.schedule.clone())?;
    let text = to_json(&ScheduleFile::from_schedule(&s));
    ctx.write(out, text.as_bytes())?;
    println!("wrote {} (kmax = {}, {} coefficients)", out.display(), s.kmax(), s.coeffs().len());
    Ok(EXIT_PASS)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub required: bool,
    pub pass: bool,
    pub detail: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    pub first_failure: Option<String>,
}

/// Largest denominator the geodesic check feeds to the BFS.
pub const GEODESIC_QMAX: u64 = 30_000;
/// Longest convergent path the geodesic check inspects.
pub const GEODESIC_UPTO: usize = 7;

fn check_audit(s: &GrowthSchedule) -> anyhow::Result<CheckResult> {
    let rows = s.audit()?;
    let mut detail = Vec::new();
    let mut pass = true;
    for r in &rows {
        if let Some(f) = r.failure() {
            pass = false;
            detail.push(format!("k = {}: {f}", r.k));
        }
    }
    if pass {
        detail.push(format!("all invariants hold for k = 0..={}", rows.len().saturating_sub(1)));
    }
    Ok(CheckResult { name: "growth invariants".into(), required: true, pass, detail })
}

fn sides_or_fail(s: &GrowthSchedule, name: &str) -> Result<[CFSide; 2], CheckResult> {
    match (s.side(0), s.side(1)) {
        (Ok(a), Ok(b)) => Ok([a.clone(), b.clone()]),
        (Err(e), _) | (_, Err(e)) => {
            Err(CheckResult { name: name.into(), required: true, pass: false, detail: vec![format!("skipped: {e}")] })
        }
    }
}

fn check_twists(s: &GrowthSchedule) -> CheckResult {
    let name = "twist recursion";
    let sides = match sides_or_fail(s, name) {
        Ok(x) => x,
        Err(r) => return r,
    };
    let mut pass = true;
    let mut detail = Vec::new();
    for side in &sides {
        match side.twist_signs() {
            Ok(signs) if signs_alternate(&signs) => {
                detail.push(format!("side {}: {} alternating twists", side.side(), signs.len()))
            }
            Ok(_) => {
                pass = false;
                detail.push(format!("side {}: twist signs do not alternate", side.side()));
            }
            Err(e) => {
                pass = false;
                detail.push(format!("side {}: {e}", side.side()));
            }
        }
    }
    CheckResult { name: name.into(), required: true, pass, detail }
}

/// The side's curve sequence, padded with coefficients 4 when the schedule is
/// shorter than the requested range.
pub fn pivot_sequence(side: &CFSide, upto: usize) -> Vec<fareylab_core::curve_algebra::Slope> {
    side.extended(upto + 1).curves()
}

fn check_pivots(s: &GrowthSchedule, upto: usize) -> anyhow::Result<CheckResult> {
    let name = "pivot separation";
    let sides = match sides_or_fail(s, name) {
        Ok(x) => x,
        Err(r) => return Ok(r),
    };
    let mut pass = true;
    let mut detail = Vec::new();
    for side in &sides {
        let seq = pivot_sequence(side, upto);
        let pad = (upto + 1).saturating_sub(side.len());
        let mut bad = None;
        for i in 1..=upto {
            if !pivot_separation(&seq, i)? {
                bad = Some(i);
                break;
            }
        }
        match bad {
            None => detail.push(format!(
                "side {}: indices 1..={upto} pass ({} schedule coefficients, {pad} padding coefficients equal to 4)",
                side.side(),
                side.len()
            )),
            Some(i) => {
                pass = false;
                detail.push(format!("side {}: fails at index {i}", side.side()));
            }
        }
    }
    Ok(CheckResult { name: name.into(), required: true, pass, detail })
}

/// Geodesicity of one convergent path, truncated to entries with denominator
/// at most [`GEODESIC_QMAX`].
pub fn geodesic_on_path(label: &str, curves: &[fareylab_core::curve_algebra::Slope]) -> anyhow::Result<(bool, String)> {
    let limit = BigInt::from(GEODESIC_QMAX);
    let path: Vec<_> = curves.iter().take(GEODESIC_UPTO + 1).take_while(|c| c.q() <= &limit).cloned().collect();
    let qmax = max_denominator(&path).to_u64().unwrap_or(1).max(1);
    let window = Window::around(&path)?;
    let rep = is_geodesic_sequence(&path, qmax, &window)?;
    let restriction = format!(
        "{label}: entries 0..={} of {} requested, BFS restricted to denominators ≤ {qmax} inside {}",
        path.len() - 1,
        GEODESIC_UPTO + 1,
        window
    );
    Ok(match rep.failure {
        None => (rep.geodesic, restriction),
        Some(f) => (false, format!("{restriction}; {f}")),
    })
}

fn check_geodesic(s: &GrowthSchedule) -> anyhow::Result<CheckResult> {
    let name = "Farey geodesic";
    let sides = match sides_or_fail(s, name) {
        Ok(x) => x,
        Err(r) => return Ok(r),
    };
    let mut pass = true;
    let mut detail = Vec::new();
    let fours = CFSide::from_i64(&[4; GEODESIC_UPTO], 0)?;
    for (label, side) in [("side 0", &sides[0]), ("side 1", &sides[1]), ("(4,4,...) reference", &fours)] {
        let (ok, d) = geodesic_on_path(label, &side.curves())?;
        pass &= ok;
        detail.push(d);
    }
    Ok(CheckResult { name: name.into(), required: true, pass, detail })
}

fn check_sandwich(s: &GrowthSchedule, family: &[TestCurve]) -> anyhow::Result<CheckResult> {
    let name = "sandwich";
    if let Err(r) = sides_or_fail(s, name) {
        return Ok(r);
    }
    let lams = laminations_of(s)?;
    let mut pass = true;
    let mut detail = Vec::new();
    for d in family {
        let kappa = kappa_of(d, &lams)?;
        let failing: Vec<usize> = (4..=s.kmax())
            .map(|k| sandwich_check(d, k, s, &kappa))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|r| !r.holds)
            .map(|r| r.k)
            .collect();
        if failing.is_empty() {
            detail.push(format!("{}: holds for k = 4..={} with κ ∈ {}", d.id(), s.kmax(), kappa.round_outward(32)));
        } else {
            pass = false;
            detail.push(format!("{}: fails at k = {failing:?}", d.id()));
        }
    }
    Ok(CheckResult { name: name.into(), required: true, pass, detail })
}

/// Decay of `i(δ,γ_k)/e_k` and `i(δ,γ_{k+1})/e_k`: strict decrease from
/// `k = 4` and both below 10⁻² at `k = 8`.
pub fn decay_verdict(s: &GrowthSchedule, d: &TestCurve) -> anyhow::Result<(bool, String)> {
    let ratios: Vec<(usize, (Rat, Rat))> =
        (DECREASE_FROM_K..=s.kmax()).map(|k| Ok((k, decay_ratios(d, k, s)?))).collect::<anyhow::Result<_>>()?;
    let decreasing = ratios.windows(2).all(|w| w[1].1 .0 < w[0].1 .0 && w[1].1 .1 < w[0].1 .1);
    let at = ratios.iter().find(|(k, _)| *k == DECAY_BY_K);
    let small = at.map_or(false, |(_, (a, b))| a < &decay_max() && b < &decay_max());
    let shown = at
        .map(|(_, (a, b))| format!("{:.4}, {:.4}", rat_to_f64(a), rat_to_f64(b)))
        .unwrap_or_else(|| "n/a".into());
    Ok((
        decreasing && small,
        format!("{}: strictly decreasing = {decreasing}, ratios at k = {DECAY_BY_K} ≈ ({shown})", d.id()),
    ))
}

fn check_decay(s: &GrowthSchedule, family: &[TestCurve], strict: bool) -> anyhow::Result<CheckResult> {
    let mut pass = true;
    let mut detail = Vec::new();
    for d in family {
        let (ok, msg) = decay_verdict(s, d)?;
        pass &= ok;
        detail.push(msg);
    }
    Ok(CheckResult { name: "decay ratios".into(), required: strict, pass, detail })
}

fn check_random_oracle(seed: u64) -> anyhow::Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pass = true;
    let mut detail = Vec::new();
    for trial in 0..100 {
        let coeffs: Vec<i64> = (0..12).map(|_| rng.gen_range(4..=9)).collect();
        let cf = CFSide::from_i64(&coeffs, 0)?;
        for i in 0..=12 {
            if &cf.continuant_oracle(i)? != &cf.convergent(i)?.1 {
                pass = false;
                detail.push(format!("trial {trial}: {coeffs:?} disagrees at i = {i}"));
                break;
            }
        }
    }
    if pass {
        detail.push(format!("100 random tuples agree with the continuant enumeration (seed {seed})"));
    }
    Ok(CheckResult { name: "continuant oracle".into(), required: true, pass, detail })
}

pub fn check_schedule(
    s: &GrowthSchedule,
    family: &[TestCurve],
    upto: usize,
    strict: bool,
    seed: Option<u64>,
) -> anyhow::Result<CheckReport> {
    let mut checks = vec![
        check_audit(s)?,
        check_twists(s),
        check_pivots(s, upto)?,
        check_geodesic(s)?,
        check_sandwich(s, family)?,
        check_decay(s, family, strict)?,
    ];
    if let Some(seed) = seed {
        checks.push(check_random_oracle(seed)?);
    }
    let first_failure = checks.iter().find(|c| c.required && !c.pass).map(|c| {
        let why = c.detail.iter().find(|d| !d.is_empty()).cloned().unwrap_or_default();
        format!("{}: {why}", c.name)
    });
    Ok(CheckReport { pass: first_failure.is_none(), first_failure, checks })
}

fn cmd_check(ctx: &mut Ctx, out: &Path) -> anyhow::Result<u8> {
    let s = ctx.schedule()?;
    let family = ctx.family()?;
    let rep = check_schedule(&s, &family, ctx.opts.upto, ctx.opts.strict, ctx.opts.seed)?;
    for c in &rep.checks {
        let status = match (c.pass, c.required) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "WARN",
        };
        println!("{status} {}", c.name);
        for d in &c.detail {
            println!("    {d}");
        }
    }
    ctx.write(out, to_json(&rep).as_bytes())?;
    match &rep.first_failure {
        None => Ok(EXIT_PASS),
        Some(f) => {
            eprintln!("check failed: {f}");
            Ok(EXIT_CHECK_FAILED)
        }
    }
}

/// Sample times: `t'_k + θ·D/2` for every `k` of the chosen parity with
/// `2 ≤ k ≤ kmax`, for each θ (θ = 0 alone when none are given).
pub fn sample_times(s: &GrowthSchedule, thetas: &[Rat], parity: u8) -> Vec<Rat> {
    let zero = [Rat::zero()];
    let thetas = if thetas.is_empty() { &zero[..] } else { thetas };
    let half = s.d() / rat(2, 1);
    let mut out = Vec::new();
    for k in (2..=s.kmax()).filter(|k| k % 2 == parity as usize) {
        let mut ts: Vec<Rat> = thetas.iter().map(|t| s.nominal_midtime(k) + t * &half).collect();
        ts.sort();
        ts.dedup();
        out.extend(ts);
    }
    out
}

pub fn simulate_rows(
    s: &GrowthSchedule,
    family: &[TestCurve],
    cfg: &Resolved,
) -> anyhow::Result<Vec<LengthRow>> {
    let mut order: Vec<&TestCurve> = family.iter().collect();
    order.sort_by(|a, b| a.id().cmp(b.id()));
    let mut rows = Vec::new();
    for t in sample_times(s, &cfg.thetas, cfg.parity) {
        let sample = sample_at(&t, s, family, &cfg.model)?;
        let by_id: BTreeMap<&str, usize> = family.iter().enumerate().map(|(i, d)| (d.id(), i)).collect();
        for d in &order {
            let terms = &sample.terms[by_id[d.id()]];
            rows.push(LengthRow {
                k: sample.k,
                s: rat_to_string(&t),
                delta_id: d.id().into(),
                length: rat_to_string(&terms.total),
                x: rat_to_string(&terms.x),
                y: rat_to_string(&terms.y),
            });
        }
    }
    Ok(rows)
}

fn cmd_simulate(ctx: &mut Ctx, out: &Path) -> anyhow::Result<u8> {
    let s = ctx.schedule()?;
    let family = ctx.family()?;
    let rows = simulate_rows(&s, &family, &ctx.cfg)?;
    ctx.write(out, &write_lengths(&rows))?;
    println!("wrote {} ({} rows)", out.display(), rows.len());
    Ok(EXIT_PASS)
}

fn alpha_json(a: &[AlphaCheck]) -> AlphaJson {
    AlphaJson { shares: a.iter().map(|c| rat_to_string(&c.share)).collect(), within_budget: a.iter().all(|c| c.within) }
}

fn point_strings(p: &fareylab_core::limit_analysis::ProjectivePoint) -> Vec<String> {
    p.coords().iter().map(rat_to_string).collect()
}

/// Samples read back from `lengths.csv`, each re-evaluated in the model and
/// compared against the file.
fn samples_from_rows(
    rows: &[ParsedRow],
    s: &GrowthSchedule,
    family: &[TestCurve],
    cfg: &Resolved,
) -> anyhow::Result<Vec<fareylab_core::limit_analysis::Sample>> {
    let mut groups: Vec<(Rat, Vec<&ParsedRow>)> = Vec::new();
    for r in rows {
        match groups.last_mut() {
            Some((t, g)) if t == &r.s => g.push(r),
            _ => {
                if groups.iter().any(|(t, _)| t == &r.s) {
                    bail!(Error::Parse(format!("line {}: rows for s = {} are not contiguous", r.line, rat_to_string(&r.s))));
                }
                groups.push((r.s.clone(), vec![r]));
            }
        }
    }
    let index: BTreeMap<&str, usize> = family.iter().enumerate().map(|(i, d)| (d.id(), i)).collect();
    let mut out = Vec::new();
    for (t, g) in groups {
        let first = g[0].line;
        let sample = sample_at(&t, s, family, &cfg.model)
            .map_err(|e| Error::Parse(format!("line {first}: {e}")))?;
        if g.len() != family.len() {
            bail!(Error::Parse(format!(
                "line {first}: {} rows for s = {}, expected one per curve ({})",
                g.len(),
                rat_to_string(&t),
                family.len()
            )));
        }
        let mut seen = vec![false; family.len()];
        for r in g {
            let i = *index
                .get(r.delta_id.as_str())
                .ok_or_else(|| Error::Parse(format!("line {}: unknown curve id {:?}", r.line, r.delta_id)))?;
            if seen[i] {
                bail!(Error::Parse(format!("line {}: duplicate row for {:?}", r.line, r.delta_id)));
            }
            seen[i] = true;
            let terms = &sample.terms[i];
            if r.k != sample.k || r.length != terms.total || r.x != terms.x || r.y != terms.y {
                bail!(Error::Parse(format!(
                    "line {}: row disagrees with the model for this schedule, family and configuration",
                    r.line
                )));
            }
        }
        out.push(sample);
    }
    Ok(out)
}

pub fn limits_report(
    samples: &[fareylab_core::limit_analysis::Sample],
    s: &GrowthSchedule,
    family: &[TestCurve],
    precision: &Rat,
) -> anyhow::Result<LimitsFile> {
    let ends = simplex_ends(s, family)?;
    let mut endpoint: BTreeMap<u8, Vec<EndpointRow>> = BTreeMap::new();
    let mut sweep: BTreeMap<Rat, Vec<SweepRow>> = BTreeMap::new();
    let mut targets = BTreeMap::new();
    for p in [0u8, 1] {
        targets.insert(p, ends.point(&Rat::from_integer(BigInt::from(p)))?);
    }
    for sample in samples {
        if sample.theta.is_zero() {
            let p = (sample.k % 2) as u8;
            endpoint.entry(p).or_default().push(endpoint_row(sample, &targets[&p], s)?);
        } else {
            sweep.entry(sample.theta.clone()).or_default().push(sweep_row(sample, &ends, precision, s)?);
        }
    }

    let mut verdict = Verdict { alpha_within_budget: true, ..Default::default() };
    let mut late_shares: Vec<Rat> = Vec::new();
    let mut endpoint_json = Vec::new();
    let mut lemma_devs: Vec<Rat> = Vec::new();
    for (p, rows) in &endpoint {
        let rep = EndpointReport { parity: *p, target: targets[p].clone(), rows: rows.clone() };
        let converges = rep.strictly_decreasing_from(DECREASE_FROM_K)
            && rep.last().map_or(false, |r| r.distance.hi() < &endpoint_tol());
        if *p == 0 {
            verdict.converges_to_endpoint_0 = Some(converges);
        } else {
            verdict.converges_to_endpoint_1 = Some(converges);
        }
        for r in rows.iter().filter(|r| r.k >= LATE_FROM_K) {
            lemma_devs.extend(r.dominant_ratios.iter().map(|q| (q - Rat::from_integer(1.into())).abs()));
        }
        for r in rows {
            verdict.alpha_within_budget &= r.alpha.iter().all(|a| a.within);
            if r.k >= LATE_FROM_K {
                late_shares.extend(r.alpha.iter().map(|a| a.share.clone()));
            }
        }
        endpoint_json.push(EndpointJson {
            parity: parity_name(*p).into(),
            target: targets[p].iter().map(|c| c.to_string()).collect(),
            rows: rows
                .iter()
                .map(|r| EndpointRowJson {
                    k: r.k,
                    s: rat_to_string(&r.s),
                    point: point_strings(&r.point),
                    distance: r.distance.to_string(),
                    lemma_ratios: r.dominant_ratios.iter().map(rat_to_string).collect(),
                    active_ratios: r.active_ratios.iter().map(rat_to_string).collect(),
                    alpha: alpha_json(&r.alpha),
                })
                .collect(),
        });
    }
    if !lemma_devs.is_empty() {
        verdict.lemma_ratios_near_one = Some(lemma_devs.iter().all(|d| d <= &lemma_tol()));
    }

    let mut sweep_json = Vec::new();
    let mut limits: Vec<(Rat, fareylab_core::limit_analysis::ProjectivePoint)> = Vec::new();
    let mut on_segment = true;
    for (theta, rows) in &sweep {
        for r in rows {
            verdict.alpha_within_budget &= r.alpha.iter().all(|a| a.within);
            if r.k >= LATE_FROM_K {
                late_shares.extend(r.alpha.iter().map(|a| a.share.clone()));
            }
        }
        let last = rows.last().expect("groups are nonempty");
        on_segment &= last.fit.distance.hi() <= &segment_tol();
        limits.push((theta.clone(), last.point.clone()));
        sweep_json.push(SweepJson {
            theta: rat_to_string(theta),
            rows: rows
                .iter()
                .map(|r| SweepRowJson {
                    k: r.k,
                    s: rat_to_string(&r.s),
                    point: point_strings(&r.point),
                    t: rat_to_string(&r.fit.t),
                    distance: r.fit.distance.to_string(),
                    alpha: alpha_json(&r.alpha),
                })
                .collect(),
        });
    }
    let mut pairwise = Vec::new();
    for i in 0..limits.len() {
        for j in i + 1..limits.len() {
            let d = fareylab_core::limit_analysis::proj_distance(&limits[i].1, &limits[j].1)?;
            pairwise.push((i, j, d));
        }
    }
    if !sweep.is_empty() {
        verdict.on_segment = Some(on_segment);
        verdict.separated = Some(pairwise.iter().all(|(_, _, d)| d >= &separation_min()));
    }
    if !late_shares.is_empty() {
        verdict.alpha_share_small = Some(late_shares.iter().all(|q| q < &alpha_share_max()));
    }

    let thresholds = BTreeMap::from([
        ("endpoint_distance_at_kmax".to_string(), rat_to_string(&endpoint_tol())),
        ("lemma_ratio_deviation_from_k10".to_string(), rat_to_string(&lemma_tol())),
        ("segment_distance".to_string(), rat_to_string(&segment_tol())),
        ("sweep_separation".to_string(), rat_to_string(&separation_min())),
        ("alpha_share_from_k10".to_string(), rat_to_string(&alpha_share_max())),
        ("segment_precision".to_string(), rat_to_string(precision)),
    ]);
    Ok(LimitsFile {
        family: family.iter().map(|d| d.id().to_string()).collect(),
        thresholds,
        endpoint: endpoint_json,
        sweep: sweep_json,
        pairwise: pairwise
            .into_iter()
            .map(|(i, j, d)| PairJson {
                theta_a: rat_to_string(&limits[i].0),
                theta_b: rat_to_string(&limits[j].0),
                distance: rat_to_string(&d),
            })
            .collect(),
        verdict,
    })
}

fn cmd_limits(ctx: &mut Ctx, out: &Path) -> anyhow::Result<u8> {
    let lengths = ctx.opts.lengths.clone().unwrap_or_else(|| PathBuf::from("lengths.csv"));
    ctx.inputs.insert("lengths", lengths.display().to_string());
    let text = read_file(&lengths)?;
    let rows = parse_lengths(&text).map_err(|e| anyhow::Error::new(e).context(lengths.display().to_string()))?;
    let s = ctx.schedule()?;
    let family = ctx.family()?;
    let samples = samples_from_rows(&rows, &s, &family, &ctx.cfg)?;
    let rep = limits_report(&samples, &s, &family, &ctx.cfg.precision)?;
    ctx.write(out, to_json(&rep).as_bytes())?;
    let v = &rep.verdict;
    let show = |name: &str, x: Option<bool>| {
        if let Some(b) = x {
            println!("{name}: {b}");
        }
    };
    show("converges-to-endpoint-0", v.converges_to_endpoint_0);
    show("converges-to-endpoint-1", v.converges_to_endpoint_1);
    show("lemma-ratios-near-one", v.lemma_ratios_near_one);
    show("on-segment", v.on_segment);
    show("separated", v.separated);
    show("alpha-share-small", v.alpha_share_small);
    println!("alpha-within-budget: {}", v.alpha_within_budget);
    Ok(EXIT_PASS)
}

fn cmd_render(ctx: &mut Ctx, out: &Path) -> anyhow::Result<u8> {
    let opts = ctx.cfg.render.clone();
    let overlay = match ctx.opts.schedule.clone() {
        Some(p) => {
            ctx.inputs.insert("schedule", p.display().to_string());
            let s = ScheduleFile::load(&p, ctx.cap)?;
            let side = s.side(ctx.cfg.parity).with_context(|| format!("{}: side {}", p.display(), ctx.cfg.parity))?;
            Some(side.curves())
        }
        None => None,
    };
    let svg = render::tessellation_svg(&opts, overlay.as_deref())?;
    ctx.write(out, svg.as_bytes())?;
    if let Some(lp) = ctx.opts.limits.clone() {
        ctx.inputs.insert("limits", lp.display().to_string());
        let lim: LimitsFile = serde_json::from_str(&read_file(&lp)?)
            .map_err(|e| Error::Parse(format!("{}: {e}", lp.display())))?;
        let scatter = render::simplex_svg(&opts, &lim)?;
        let mut sp = out.as_os_str().to_owned();
        sp.push(".simplex.svg");
        ctx.write(Path::new(&sp), scatter.as_bytes())?;
    }
    println!("wrote {}", ctx.outputs.join(", "));
    Ok(EXIT_PASS)
}
