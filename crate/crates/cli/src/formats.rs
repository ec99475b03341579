//! On-disk formats. Rationals are always written as `num/den` strings and big
//! integers as decimal strings.

use std::io::{Read, Write};

use anyhow::Context;
use fareylab_core::curve_algebra::ArcClass;
use fareylab_core::numeric::{exceeds_digits, decimal_digits, parse_int, parse_rat, rat_to_string};
use fareylab_core::pairing::TestCurve;
use fareylab_core::schedule::{GrowthSchedule, ScheduleParams};
use fareylab_core::{Error, Rat};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::config::FnSpec;

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn write_file(path: &std::path::Path, contents: &[u8]) -> anyhow::Result<()> {
    let mut f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(contents).with_context(|| format!("writing {}", path.display()))
}

pub fn read_file(path: &std::path::Path) -> anyhow::Result<String> {
    let mut s = String::new();
    std::fs::File::open(path)
        .with_context(|| format!("opening {}", path.display()))?
        .read_to_string(&mut s)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sides {
    pub even: Vec<String>,
    pub odd: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    #[serde(rename = "D")]
    pub d: String,
    pub kmax: usize,
    pub floors: Vec<String>,
    pub eta: FnSpec,
    pub f1: FnSpec,
    pub f2: FnSpec,
    pub ell_alpha_z: String,
    pub sides: Sides,
    pub times: Vec<String>,
    pub midtimes: Vec<String>,
}

impl ScheduleFile {
    pub fn from_schedule(s: &GrowthSchedule) -> ScheduleFile {
        let p = s.params();
        let ints = |v: Vec<BigInt>| v.iter().map(|x| x.to_string()).collect();
        ScheduleFile {
            d: rat_to_string(&p.d),
            kmax: p.kmax,
            floors: p.floors.iter().map(|f| f.to_string()).collect(),
            eta: FnSpec::from_eta(&p.eta),
            f1: FnSpec::from_f1(&p.f1),
            f2: FnSpec::from_f2(&p.f2),
            ell_alpha_z: rat_to_string(&p.ell_alpha_z),
            sides: Sides { even: ints(s.side_coeffs(0)), odd: ints(s.side_coeffs(1)) },
            times: (0..=p.kmax + 1).map(|k| rat_to_string(&s.nominal_time(k))).collect(),
            midtimes: (0..=p.kmax).map(|k| rat_to_string(&s.nominal_midtime(k))).collect(),
        }
    }

    /// Rebuilds the schedule. Coefficients are taken as given (a corrupted
    /// file still loads so that `check` can name the violated invariant), but
    /// the stored times must agree with `D`.
    pub fn to_schedule(&self, cap_digits: u64) -> Result<GrowthSchedule, Error> {
        let params = ScheduleParams {
            d: parse_rat(&self.d)?,
            kmax: self.kmax,
            floors: self.floors.iter().map(|f| parse_int(f)).collect::<Result<_, _>>()?,
            eta: self.eta.to_eta()?,
            f1: self.f1.to_f1()?,
            f2: self.f2.to_f2()?,
            ell_alpha_z: parse_rat(&self.ell_alpha_z)?,
            cap_digits,
        };
        params.validate()?;
        let parse_side = |v: &[String]| v.iter().map(|x| parse_int(x)).collect::<Result<Vec<_>, _>>();
        let even = parse_side(&self.sides.even)?;
        let odd = parse_side(&self.sides.odd)?;
        for (k, e) in even.iter().enumerate().map(|(i, e)| (2 * i, e)).chain(odd.iter().enumerate().map(|(i, e)| (2 * i + 1, e))) {
            if exceeds_digits(e, cap_digits) {
                return Err(Error::CoefficientCap { k, digits: decimal_digits(e), cap: cap_digits });
            }
        }
        let sched = GrowthSchedule::from_sides(params, &even, &odd)?;
        if sched.kmax() != self.kmax {
            return Err(Error::Parse(format!(
                "kmax = {} but the sides hold {} coefficients",
                self.kmax,
                even.len() + odd.len()
            )));
        }
        let again = ScheduleFile::from_schedule(&sched);
        if again.times != self.times || again.midtimes != self.midtimes {
            return Err(Error::Parse("stored times disagree with D".into()));
        }
        Ok(sched)
    }

    pub fn load(path: &std::path::Path, cap_digits: u64) -> anyhow::Result<GrowthSchedule> {
        let text = read_file(path)?;
        let f: ScheduleFile =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Ok(f.to_schedule(cap_digits)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveJson {
    pub id: String,
    /// Arc classes `(a, b)` on side 0 and side 1.
    pub arcs: [Vec<(i64, i64)>; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub curves: Vec<CurveJson>,
}

fn arc_to_pair(a: &ArcClass) -> (i64, i64) {
    let c = |x: &BigInt| i64::try_from(x).expect("family arcs fit in i64");
    (c(a.a()), c(a.b()))
}

impl FamilyFile {
    pub fn from_family(family: &[TestCurve]) -> FamilyFile {
        FamilyFile {
            curves: family
                .iter()
                .map(|d| CurveJson {
                    id: d.id().into(),
                    arcs: [d.arcs(0).iter().map(arc_to_pair).collect(), d.arcs(1).iter().map(arc_to_pair).collect()],
                })
                .collect(),
        }
    }

    pub fn to_family(&self) -> Result<Vec<TestCurve>, Error> {
        if self.curves.is_empty() {
            return Err(Error::EmptyVector);
        }
        let mut ids: Vec<&str> = self.curves.iter().map(|c| c.id.as_str()).collect();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig(format!("duplicate curve id {:?}", w[0])));
        }
        self.curves
            .iter()
            .map(|c| {
                let side =
                    |v: &[(i64, i64)]| v.iter().map(|&(a, b)| ArcClass::from_i64(a, b)).collect::<Result<Vec<_>, _>>();
                TestCurve::new(c.id.clone(), side(&c.arcs[0])?, side(&c.arcs[1])?)
            })
            .collect()
    }

    pub fn load(path: &std::path::Path) -> anyhow::Result<Vec<TestCurve>> {
        let text = read_file(path)?;
        let f: FamilyFile =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Ok(f.to_family()?)
    }
}

/// One row of `lengths.csv`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthRow {
    pub k: usize,
    pub s: String,
    pub delta_id: String,
    pub length: String,
    pub x: String,
    pub y: String,
}

/// A parsed row with its 1-based line number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedRow {
    pub line: u64,
    pub k: usize,
    pub s: Rat,
    pub delta_id: String,
    pub length: Rat,
    pub x: Rat,
    pub y: Rat,
}

pub fn write_lengths(rows: &[LengthRow]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(["k", "s", "delta_id", "length", "x", "y"]).expect("in-memory write");
    }
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn parse_lengths(text: &str) -> Result<Vec<ParsedRow>, Error> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = rd.headers().map_err(|e| Error::Parse(format!("line 1: {e}")))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["k", "s", "delta_id", "length", "x", "y"] {
        return Err(Error::Parse("line 1: expected header k,s,delta_id,length,x,y".into()));
    }
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::Parse(format!("line {line}: {e}"))
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let rec: LengthRow = rec.deserialize(Some(&headers)).map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        let at = |e: Error| match e {
            Error::Parse(m) => Error::Parse(format!("line {line}: {m}")),
            e => Error::Parse(format!("line {line}: {e}")),
        };
        out.push(ParsedRow {
            line,
            k: rec.k,
            s: parse_rat(&rec.s).map_err(at)?,
            length: parse_rat(&rec.length).map_err(at)?,
            x: parse_rat(&rec.x).map_err(at)?,
            y: parse_rat(&rec.y).map_err(at)?,
            delta_id: rec.delta_id,
        });
    }
    if out.is_empty() {
        return Err(Error::Parse("line 2: no data rows".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaJson {
    pub shares: Vec<String>,
    pub within_budget: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointRowJson {
    pub k: usize,
    pub s: String,
    pub point: Vec<String>,
    pub distance: String,
    pub lemma_ratios: Vec<String>,
    pub active_ratios: Vec<String>,
    pub alpha: AlphaJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointJson {
    pub parity: String,
    pub target: Vec<String>,
    pub rows: Vec<EndpointRowJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRowJson {
    pub k: usize,
    pub s: String,
    pub point: Vec<String>,
    pub t: String,
    pub distance: String,
    pub alpha: AlphaJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepJson {
    pub theta: String,
    pub rows: Vec<SweepRowJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairJson {
    pub theta_a: String,
    pub theta_b: String,
    pub distance: String,
}

/// Verdicts; `None` where the input holds no relevant samples.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub converges_to_endpoint_0: Option<bool>,
    pub converges_to_endpoint_1: Option<bool>,
    pub lemma_ratios_near_one: Option<bool>,
    pub on_segment: Option<bool>,
    pub separated: Option<bool>,
    pub alpha_share_small: Option<bool>,
    pub alpha_within_budget: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitsFile {
    pub family: Vec<String>,
    pub thresholds: std::collections::BTreeMap<String, String>,
    pub endpoint: Vec<EndpointJson>,
    pub sweep: Vec<SweepJson>,
    pub pairwise: Vec<PairJson>,
    pub verdict: Verdict,
}

#[cfg(test)]
mod tests {
    use super::*;
    use fareylab_core::pairing::default_family;

    #[test]
    fn schedule_round_trip() {
        let s = GrowthSchedule::generate(ScheduleParams { kmax: 6, ..Default::default() }).unwrap();
        let f = ScheduleFile::from_schedule(&s);
        let text = to_json(&f);
        let back: ScheduleFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_schedule(s.params().cap_digits).unwrap(), s);
        assert_eq!(f.times[0], "1/2");
        assert_eq!(f.times[1], "1/1");
        assert_eq!(f.midtimes[0], "3/4");
    }

    #[test]
    fn tampered_schedules() {
        let s = GrowthSchedule::generate(ScheduleParams { kmax: 4, ..Default::default() }).unwrap();
        let mut f = ScheduleFile::from_schedule(&s);
        f.times[2] = "7/3".into();
        assert!(matches!(f.to_schedule(1000), Err(Error::Parse(_))));
        let mut f = ScheduleFile::from_schedule(&s);
        f.sides.even[1] = "3".into();
        assert!(f.to_schedule(1000).is_ok());
        assert!(matches!(ScheduleFile::from_schedule(&s).to_schedule(1), Err(Error::CoefficientCap { .. })));
    }

    #[test]
    fn family_round_trip() {
        let fam = default_family();
        let f = FamilyFile::from_family(&fam);
        let back: FamilyFile = serde_json::from_str(&to_json(&f)).unwrap();
        assert_eq!(back.to_family().unwrap(), fam);
        let mut dup = f.clone();
        dup.curves[1].id = dup.curves[0].id.clone();
        assert!(dup.to_family().is_err());
    }

    #[test]
    fn lengths_round_trip_and_errors() {
        let rows = vec![
            LengthRow { k: 2, s: "11/4".into(), delta_id: "a".into(), length: "7/3".into(), x: "1/1".into(), y: "2/1".into() },
            LengthRow { k: 2, s: "11/4".into(), delta_id: "b,c".into(), length: "5/1".into(), x: "1/1".into(), y: "2/1".into() },
        ];
        let text = String::from_utf8(write_lengths(&rows)).unwrap();
        assert!(text.starts_with("k,s,delta_id,length,x,y\n"));
        let parsed = parse_lengths(&text).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[1].delta_id, "b,c");
        assert_eq!(parsed[0].length, Rat::new(7.into(), 3.into()));
        let bad = text.replace("5/1", "five");
        match parse_lengths(&bad) {
            Err(Error::Parse(m)) => assert!(m.starts_with("line 3"), "{m}"),
            other => panic!("{other:?}"),
        }
        let short = "k,s,delta_id,length,x,y\n2,1/1,a\n";
        match parse_lengths(short) {
            Err(Error::Parse(m)) => assert!(m.starts_with("line 2"), "{m}"),
            other => panic!("{other:?}"),
        }
        assert!(parse_lengths("a,b\n1,2\n").is_err());
    }
}
