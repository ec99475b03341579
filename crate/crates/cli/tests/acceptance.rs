//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits nonzero when a criterion fails that is not listed in
//! `KNOWN_UNATTAINABLE`.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fareylab::commands::{decay_verdict, geodesic_on_path, pivot_sequence};
use fareylab_core::contfrac::CFSide;
use fareylab_core::curve_algebra::{dehn_twist, intersection_slopes, Slope};
use fareylab_core::farey_graph::pivot_separation;
use fareylab_core::limit_analysis::{endpoint_convergence_report, sweep_report, EndpointReport, SweepReport};
use fareylab_core::numeric::{rat, rat_to_f64};
use fareylab_core::pairing::{default_family, kappa_of, laminations_of, sandwich_check};
use fareylab_core::ray_model::ModelParams;
use fareylab_core::schedule::{GrowthSchedule, ScheduleParams};
use fareylab_core::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_UNATTAINABLE: &[u32] = &[8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Check = Box<dyn Fn() -> Result<Outcome, String>>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn default_schedule() -> GrowthSchedule {
    GrowthSchedule::generate(ScheduleParams::default()).expect("default schedule")
}

// Crossings of straight representatives on the flat torus, with the second
// curve shifted off the lattice by a generic offset.
fn crossing_count(u: (i64, i64), v: (i64, i64)) -> u64 {
    let cross = u.0 * v.1 - u.1 * v.0;
    if cross == 0 {
        return 0;
    }
    const Q: i64 = 1009;
    let (b1, b2) = (317, 541);
    let r1 = u.0.abs() + v.0.abs() + 2;
    let r2 = u.1.abs() + v.1.abs() + 2;
    let c = (Q * cross) as i128;
    let inside = |num: i128| if c > 0 { num >= 0 && num < c } else { num <= 0 && num > c };
    let mut count = 0;
    for m1 in -r1..=r1 {
        for m2 in -r2..=r2 {
            let d1 = (b1 + Q * m1) as i128;
            let d2 = (b2 + Q * m2) as i128;
            let nt = d1 * v.1 as i128 - d2 * v.0 as i128;
            let ns = d1 * u.1 as i128 - d2 * u.0 as i128;
            if inside(nt) && inside(ns) {
                count += 1;
            }
        }
    }
    count
}

fn c1_convergents() -> Result<Outcome, String> {
    let fours = CFSide::from_i64(&[4; 8], 0).map_err(err)?;
    let expect: Vec<Slope> =
        [(1, 0), (0, 1), (1, 4), (4, 17)].iter().map(|&(p, q)| Slope::from_i64(p, q).unwrap()).collect();
    let head = fours.curves()[..4].to_vec();
    if head != expect {
        return Ok(outcome(false, format!("(4,4,...) curves begin {head:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for trial in 0..100 {
        let coeffs: Vec<i64> = (0..12).map(|_| rng.gen_range(4..=9)).collect();
        let cf = CFSide::from_i64(&coeffs, 0).map_err(err)?;
        for i in 0..=12 {
            if cf.continuant_oracle(i).map_err(err)? != cf.convergent(i).map_err(err)?.1 {
                return Ok(outcome(false, format!("tuple {trial} {coeffs:?} disagrees at i = {i}")));
            }
        }
    }
    Ok(outcome(true, "1/0, 0/1, 1/4, 4/17; 100 random tuples agree for i ≤ 12"))
}

fn c2_intersections() -> Result<Outcome, String> {
    let mut slopes = Vec::new();
    for q in 0..=12i64 {
        for p in -12..=12i64 {
            if p.gcd(&q) == 1 && (q > 0 || p == 1) {
                slopes.push((p, q));
            }
        }
    }
    let mut pairs = 0;
    for &u in &slopes {
        for &v in &slopes {
            let got = intersection_slopes(&Slope::from_i64(u.0, u.1).unwrap(), &Slope::from_i64(v.0, v.1).unwrap());
            if got != BigInt::from(crossing_count(u, v)) {
                return Ok(outcome(false, format!("{u:?} vs {v:?}: formula {got}")));
            }
            pairs += 1;
        }
    }
    Ok(outcome(true, format!("{pairs} ordered pairs agree")))
}

// seq[j+2] = D_{seq[j+1]}^{σ_j·e_j}(seq[j]) with σ_j alternating in j.
fn twist_pattern_holds(side: &CFSide, first: i64) -> bool {
    let seq = side.curves();
    side.coeffs().iter().enumerate().all(|(j, e)| {
        let sign = if j % 2 == 0 { first } else { -first };
        dehn_twist(&seq[j + 1], &seq[j], &(e * BigInt::from(sign))) == seq[j + 2]
    })
}

fn c3_twists() -> Result<Outcome, String> {
    let s = GrowthSchedule::generate(ScheduleParams { kmax: 20, ..Default::default() }).map_err(err)?;
    let mut detail = Vec::new();
    for h in 0..2u8 {
        let side = s.side(h).map_err(err)?;
        for len in 1..=side.len() {
            let prefix = CFSide::new(side.coeffs()[..len].to_vec(), h).map_err(err)?;
            if !(twist_pattern_holds(&prefix, 1) || twist_pattern_holds(&prefix, -1)) {
                return Ok(outcome(false, format!("side {h}: prefix of length {len} has no alternating sign choice")));
            }
        }
        detail.push(format!("side {h}: {} prefixes", side.len()));
    }
    Ok(outcome(true, format!("kmax = 20, {}", detail.join(", "))))
}

fn c4_geodesic() -> Result<Outcome, String> {
    let s = default_schedule();
    let fours = CFSide::from_i64(&[4; 8], 0).map_err(err)?;
    let mut pass = true;
    let mut notes = Vec::new();
    for (label, side) in [("side 0", s.side(0).map_err(err)?), ("side 1", s.side(1).map_err(err)?), ("(4,4,...)", &fours)] {
        let (ok, note) = geodesic_on_path(label, &side.curves()).map_err(err)?;
        pass &= ok;
        notes.push(note);
    }
    Ok(outcome(pass, format!("restriction: {}", notes.join(" | "))))
}

fn c5_pivots() -> Result<Outcome, String> {
    let s = default_schedule();
    for h in 0..2u8 {
        let seq = pivot_sequence(s.side(h).map_err(err)?, 30);
        for i in 1..=30 {
            if !pivot_separation(&seq, i).map_err(err)? {
                return Ok(outcome(false, format!("side {h} fails at i = {i}")));
            }
        }
    }
    Ok(outcome(true, "both sides, 1 ≤ i ≤ 30"))
}

fn c6_audit() -> Result<Outcome, String> {
    let rows = default_schedule().audit().map_err(err)?;
    match rows.iter().find_map(|r| r.failure().map(|f| (r.k, f))) {
        Some((k, f)) => Ok(outcome(false, format!("k = {k}: {f}"))),
        None => Ok(outcome(true, format!("k = 0..={}", rows.len() - 1))),
    }
}

fn c7_sandwich() -> Result<Outcome, String> {
    let s = default_schedule();
    let lams = laminations_of(&s).map_err(err)?;
    for d in default_family() {
        let kappa = kappa_of(&d, &lams).map_err(err)?;
        for k in 4..=s.kmax() {
            if !sandwich_check(&d, k, &s, &kappa).map_err(err)?.holds {
                return Ok(outcome(false, format!("{} at k = {k}", d.id())));
            }
        }
    }
    Ok(outcome(true, format!("6 curves, 4 ≤ k ≤ {}", s.kmax())))
}

fn c8_decay() -> Result<Outcome, String> {
    let s = default_schedule();
    let mut pass = true;
    let mut notes = Vec::new();
    for d in default_family() {
        let (ok, note) = decay_verdict(&s, &d).map_err(err)?;
        pass &= ok;
        if !ok {
            notes.push(note);
        }
    }
    Ok(outcome(pass, if pass { "all curves".to_string() } else { notes.join("; ") }))
}

struct Reports {
    endpoints: [EndpointReport; 2],
    sweep: SweepReport,
}

fn reports(params: &ModelParams) -> Result<Reports, String> {
    let s = default_schedule();
    let family = default_family();
    let e0 = endpoint_convergence_report(&s, &family, params, 0).map_err(err)?;
    let e1 = endpoint_convergence_report(&s, &family, params, 1).map_err(err)?;
    let thetas = [rat(1, 4), rat(1, 2), rat(3, 4)];
    let sweep = sweep_report(&s, &family, params, &thetas, &rat(1, 1_000_000)).map_err(err)?;
    Ok(Reports { endpoints: [e0, e1], sweep })
}

fn lemma_verdict(r: &Reports) -> (bool, f64) {
    let dev = r.endpoints.iter().map(|e| e.max_ratio_deviation_from(10)).max().unwrap();
    (dev <= rat(1, 100), rat_to_f64(&dev))
}

fn endpoint_verdict(r: &Reports) -> (bool, String) {
    let mut pass = true;
    let mut notes = Vec::new();
    for e in &r.endpoints {
        let last = e.last().expect("rows");
        let ok = e.strictly_decreasing_from(4) && last.distance.hi() < &rat(1, 1000);
        pass &= ok;
        notes.push(format!("parity {}: k = {} distance ≤ {:.2e}", e.parity, last.k, rat_to_f64(last.distance.hi())));
    }
    (pass, notes.join(", "))
}

fn sweep_verdict(r: &Reports) -> Result<(bool, String), String> {
    let tol = rat(1, 100);
    let mut worst_fit = Rat::from_integer(0.into());
    let mut on_segment = true;
    for series in &r.sweep.series {
        let lim = series.limit().ok_or("empty series")?;
        on_segment &= lim.fit.distance.hi() <= &tol;
        worst_fit = worst_fit.max(lim.fit.distance.hi().clone());
    }
    let pairs = r.sweep.pairwise().map_err(err)?;
    let closest = pairs.iter().map(|p| p.2.clone()).min().ok_or("no pairs")?;
    let separated = closest >= tol;
    Ok((
        on_segment && separated,
        format!("segment distance ≤ {:.2e}, closest pair {:.3e}", rat_to_f64(&worst_fit), rat_to_f64(&closest)),
    ))
}

fn c9_lemma() -> Result<Outcome, String> {
    let (pass, dev) = lemma_verdict(&reports(&ModelParams::default())?);
    Ok(outcome(pass, format!("max |ratio − 1| for k ≥ 10 = {dev:.3e}")))
}

fn c10_endpoints() -> Result<Outcome, String> {
    let (pass, note) = endpoint_verdict(&reports(&ModelParams::default())?);
    Ok(outcome(pass, note))
}

fn c11_sweep() -> Result<Outcome, String> {
    let (pass, note) = sweep_verdict(&reports(&ModelParams::default())?)?;
    Ok(outcome(pass, note))
}

fn c12_alpha() -> Result<Outcome, String> {
    let r = reports(&ModelParams::default())?;
    let mut checks = Vec::new();
    for e in &r.endpoints {
        checks.extend(e.rows.iter().map(|row| (row.k, &row.alpha)));
    }
    for series in &r.sweep.series {
        checks.extend(series.rows.iter().map(|row| (row.k, &row.alpha)));
    }
    let within = checks.iter().all(|(_, a)| a.iter().all(|c| c.within));
    let worst = checks
        .iter()
        .filter(|(k, _)| *k >= 10)
        .flat_map(|(_, a)| a.iter().map(|c| c.share.clone()))
        .max()
        .ok_or("no samples with k ≥ 10")?;
    let pass = within && worst < rat(1, 1000);
    Ok(outcome(pass, format!("all within budget = {within}, max share for k ≥ 10 = {:.3e}", rat_to_f64(&worst))))
}

fn verdicts(params: &ModelParams) -> Result<[bool; 3], String> {
    let r = reports(params)?;
    Ok([lemma_verdict(&r).0, endpoint_verdict(&r).0, sweep_verdict(&r)?.0])
}

fn c13_robustness() -> Result<Outcome, String> {
    let base = verdicts(&ModelParams::default())?;
    let mut changed = Vec::new();
    for ell in [rat(1, 2), rat(2, 1)] {
        for offset in [-10, 10] {
            let params = ModelParams { ell_active: ell.clone(), twist_offset: offset, ..Default::default() };
            let v = verdicts(&params)?;
            if v != base {
                changed.push(format!("ell = {ell}, offset = {offset}: {v:?}"));
            }
        }
    }
    Ok(if changed.is_empty() {
        outcome(true, format!("4 variants agree with {base:?}"))
    } else {
        outcome(false, changed.join("; "))
    })
}

fn run_pipeline(bin: &Path, dir: &Path) -> Result<(), String> {
    let steps: &[&[&str]] = &[
        &["schedule"],
        &["check", "--seed", "7"],
        &["simulate", "--out", "even.csv"],
        &["simulate", "--parity", "odd", "--out", "odd.csv"],
        &["simulate", "--theta", "1/4,1/2,3/4", "--out", "sweep.csv"],
        &["limits", "--schedule", "schedule.json", "--lengths", "even.csv", "--out", "even.json"],
        &["limits", "--schedule", "schedule.json", "--lengths", "odd.csv", "--parity", "odd", "--out", "odd.json"],
        &["limits", "--schedule", "schedule.json", "--lengths", "sweep.csv", "--theta", "1/4,1/2,3/4", "--out", "sweep.json"],
        &["render", "--schedule", "schedule.json", "--limits", "sweep.json"],
    ];
    for args in steps {
        let out = Command::new(bin).args(*args).current_dir(dir).output().map_err(err)?;
        if !out.status.success() {
            return Err(format!("{args:?} exited with {}", out.status));
        }
    }
    Ok(())
}

fn c14_determinism() -> Result<Outcome, String> {
    let bin = Path::new(env!("CARGO_BIN_EXE_fareylab"));
    let a = tempfile::tempdir().map_err(err)?;
    let b = tempfile::tempdir().map_err(err)?;
    run_pipeline(bin, a.path())?;
    run_pipeline(bin, b.path())?;
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .map_err(err)?
        .map(|e| e.map(|e| e.file_name()).map_err(err))
        .collect::<Result<_, _>>()?;
    names.sort();
    for name in &names {
        let x = std::fs::read(a.path().join(name)).map_err(err)?;
        let y = std::fs::read(b.path().join(name)).map_err(|e| format!("{name:?}: {e}"))?;
        if x != y {
            return Ok(outcome(false, format!("{name:?} differs")));
        }
    }
    Ok(outcome(true, format!("{} files byte-identical", names.len())))
}

fn main() {
    let checks: Vec<(u32, &str, Duration, Check)> = vec![
        (1, "convergents", Duration::from_secs(5), Box::new(c1_convergents)),
        (2, "intersection oracle", Duration::from_secs(30), Box::new(c2_intersections)),
        (3, "twist recursion", Duration::from_secs(1), Box::new(c3_twists)),
        (4, "Farey geodesicity", Duration::from_secs(60), Box::new(c4_geodesic)),
        (5, "pivot separation", Duration::from_secs(1), Box::new(c5_pivots)),
        (6, "growth invariants", Duration::from_secs(1), Box::new(c6_audit)),
        (7, "sandwich", Duration::from_secs(1), Box::new(c7_sandwich)),
        (8, "decay ratios", Duration::from_secs(1), Box::new(c8_decay)),
        (9, "lemma ratios", Duration::from_secs(10), Box::new(c9_lemma)),
        (10, "endpoint convergence", Duration::from_secs(60), Box::new(c10_endpoints)),
        (11, "interior sweep", Duration::from_secs(120), Box::new(c11_sweep)),
        (12, "alpha share", Duration::from_secs(5), Box::new(c12_alpha)),
        (13, "robustness", Duration::from_secs(600), Box::new(c13_robustness)),
        (14, "determinism", Duration::from_secs(120), Box::new(c14_determinism)),
    ];
    let mut unexpected = Vec::new();
    for (n, name, budget, f) in checks {
        let start = Instant::now();
        let result = f();
        let took = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) if took > budget => (false, format!("{} (took {took:.2?}, budget {budget:?})", o.detail)),
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let status = if pass { "PASS" } else { "FAIL" };
        let known = if !pass && KNOWN_UNATTAINABLE.contains(&n) { " [known unattainable]" } else { "" };
        println!("{status} criterion {n} {name} ({took:.2?}){known}: {detail}");
        if !pass && known.is_empty() {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
