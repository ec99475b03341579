//! Run configuration: defaults, overridden by a TOML file, overridden by flags.

use std::collections::BTreeMap;

use anyhow::{bail, Context};
use fareylab_core::numeric::{parse_int, parse_rat, rat_to_string};
use fareylab_core::ray_model::{Interp, ModelParams};
use fareylab_core::schedule::{EtaSpec, F1Spec, F2Spec, ScheduleParams};
use fareylab_core::{Error, Rat};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// A parametrized function given by kind and named rational parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FnSpec {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

impl FnSpec {
    fn new(kind: &str, params: &[(&str, String)]) -> FnSpec {
        FnSpec { kind: kind.into(), params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect() }
    }

    fn rat(&self, key: &str) -> Result<Rat, Error> {
        let v = self
            .params
            .get(key)
            .ok_or_else(|| Error::InvalidConfig(format!("{} is missing parameter {key:?}", self.kind)))?;
        parse_rat(v)
    }

    fn uint(&self, key: &str) -> Result<u32, Error> {
        let v = self
            .params
            .get(key)
            .ok_or_else(|| Error::InvalidConfig(format!("{} is missing parameter {key:?}", self.kind)))?;
        v.trim().parse().map_err(|_| Error::InvalidConfig(format!("parameter {key} = {v:?} is not a small integer")))
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), Error> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidConfig(format!("{} does not take parameter {k:?}", self.kind))),
            None => Ok(()),
        }
    }

    pub fn from_eta(e: &EtaSpec) -> FnSpec {
        match e {
            EtaSpec::Harmonic { scale } => FnSpec::new("harmonic", &[("scale", rat_to_string(scale))]),
            EtaSpec::Power { scale, exponent } => {
                FnSpec::new("power", &[("scale", rat_to_string(scale)), ("exponent", exponent.to_string())])
            }
            EtaSpec::Geometric { scale, ratio } => {
                FnSpec::new("geometric", &[("scale", rat_to_string(scale)), ("ratio", rat_to_string(ratio))])
            }
        }
    }

    pub fn to_eta(&self) -> Result<EtaSpec, Error> {
        match self.kind.as_str() {
            "harmonic" => {
                self.check_keys(&["scale"])?;
                Ok(EtaSpec::Harmonic { scale: self.rat("scale")? })
            }
            "power" => {
                self.check_keys(&["scale", "exponent"])?;
                Ok(EtaSpec::Power { scale: self.rat("scale")?, exponent: self.uint("exponent")? })
            }
            "geometric" => {
                self.check_keys(&["scale", "ratio"])?;
                Ok(EtaSpec::Geometric { scale: self.rat("scale")?, ratio: self.rat("ratio")? })
            }
            k => Err(Error::InvalidConfig(format!("unknown eta kind {k:?}"))),
        }
    }

    pub fn from_f1(f: &F1Spec) -> FnSpec {
        match f {
            F1Spec::Exp { c } => FnSpec::new("exp", &[("c", rat_to_string(c))]),
            F1Spec::Power { c, n } => FnSpec::new("power", &[("c", rat_to_string(c)), ("n", n.to_string())]),
        }
    }

    pub fn to_f1(&self) -> Result<F1Spec, Error> {
        match self.kind.as_str() {
            "exp" => {
                self.check_keys(&["c"])?;
                Ok(F1Spec::Exp { c: self.rat("c")? })
            }
            "power" => {
                self.check_keys(&["c", "n"])?;
                Ok(F1Spec::Power { c: self.rat("c")?, n: self.uint("n")? })
            }
            k => Err(Error::InvalidConfig(format!("unknown f1 kind {k:?}"))),
        }
    }

    pub fn from_f2(f: &F2Spec) -> FnSpec {
        match f {
            F2Spec::Linear { c } => FnSpec::new("linear", &[("c", rat_to_string(c))]),
            F2Spec::Power { c, n } => FnSpec::new("power", &[("c", rat_to_string(c)), ("n", n.to_string())]),
        }
    }

    pub fn to_f2(&self) -> Result<F2Spec, Error> {
        match self.kind.as_str() {
            "linear" => {
                self.check_keys(&["c"])?;
                Ok(F2Spec::Linear { c: self.rat("c")? })
            }
            "power" => {
                self.check_keys(&["c", "n"])?;
                Ok(F2Spec::Power { c: self.rat("c")?, n: self.uint("n")? })
            }
            k => Err(Error::InvalidConfig(format!("unknown f2 kind {k:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    #[serde(rename = "D")]
    pub d: Option<String>,
    pub kmax: Option<usize>,
    pub floors: Option<Vec<String>>,
    pub eta: Option<FnSpec>,
    pub f1: Option<FnSpec>,
    pub f2: Option<FnSpec>,
    pub ell_alpha_z: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub ell_active: Option<String>,
    pub c_o: Option<String>,
    pub twist_offset: Option<i64>,
    pub interp: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub thetas: Option<Vec<String>>,
    pub parity: Option<String>,
    pub precision: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderSection {
    pub depth: Option<u32>,
    pub x_min: Option<i64>,
    pub x_max: Option<i64>,
    pub unit_px: Option<u32>,
    pub stroke: Option<String>,
    pub path_stroke: Option<String>,
    pub horoballs: Option<bool>,
    pub simplex_axes: Option<[usize; 3]>,
}

/// Contents of a `--config` TOML file. Every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub render: RenderSection,
}

impl ConfigFile {
    pub fn parse(text: &str) -> anyhow::Result<ConfigFile> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("config: {e}")).into())
    }

    pub fn load(path: &std::path::Path) -> anyhow::Result<ConfigFile> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        ConfigFile::parse(&text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderOptions {
    pub depth: u32,
    pub x_min: i64,
    pub x_max: i64,
    pub unit_px: u32,
    pub stroke: Rat,
    pub path_stroke: Rat,
    pub horoballs: bool,
    pub simplex_axes: [usize; 3],
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            depth: 5,
            x_min: 0,
            x_max: 1,
            unit_px: 800,
            stroke: Rat::new(1.into(), 2.into()),
            path_stroke: Rat::new(3.into(), 1.into()),
            horoballs: true,
            simplex_axes: [0, 1, 2],
        }
    }
}

impl RenderOptions {
    pub fn validate(&self) -> Result<(), Error> {
        if self.x_min >= self.x_max {
            return Err(Error::InvalidConfig(format!("empty viewport [{}, {}]", self.x_min, self.x_max)));
        }
        if self.x_max - self.x_min > 64 {
            return Err(Error::InvalidConfig("viewport wider than 64 units".into()));
        }
        if self.depth > 16 {
            return Err(Error::InvalidConfig("render depth above 16".into()));
        }
        if self.unit_px == 0 {
            return Err(Error::InvalidConfig("unit_px must be positive".into()));
        }
        Ok(())
    }
}

/// Fully resolved settings for one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolved {
    pub schedule: ScheduleParams,
    pub model: ModelParams,
    pub thetas: Vec<Rat>,
    pub parity: u8,
    pub precision: Rat,
    pub render: RenderOptions,
}

/// Command-line overrides; `None` leaves the file or default value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub kmax: Option<usize>,
    pub d: Option<String>,
    pub thetas: Option<Vec<String>>,
    pub parity: Option<String>,
    pub depth: Option<u32>,
}

pub fn parse_parity(s: &str) -> Result<u8, Error> {
    match s {
        "even" | "0" => Ok(0),
        "odd" | "1" => Ok(1),
        _ => Err(Error::InvalidConfig(format!("parity must be even or odd, got {s:?}"))),
    }
}

pub fn parity_name(p: u8) -> &'static str {
    if p == 0 {
        "even"
    } else {
        "odd"
    }
}

pub fn resolve(file: &ConfigFile, over: &Overrides, cap_digits: u64) -> anyhow::Result<Resolved> {
    let mut sp = ScheduleParams { cap_digits, ..Default::default() };
    let s = &file.schedule;
    if let Some(d) = over.d.as_ref().or(s.d.as_ref()) {
        sp.d = parse_rat(d)?;
    }
    if let Some(k) = over.kmax.or(s.kmax) {
        sp.kmax = k;
    }
    if let Some(f) = &s.floors {
        sp.floors = f.iter().map(|x| parse_int(x)).collect::<Result<Vec<BigInt>, _>>()?;
    }
    if let Some(e) = &s.eta {
        sp.eta = e.to_eta()?;
    }
    if let Some(f) = &s.f1 {
        sp.f1 = f.to_f1()?;
    }
    if let Some(f) = &s.f2 {
        sp.f2 = f.to_f2()?;
    }
    if let Some(z) = &s.ell_alpha_z {
        sp.ell_alpha_z = parse_rat(z)?;
    }
    sp.validate()?;

    let mut mp = ModelParams::default();
    let m = &file.model;
    if let Some(v) = &m.ell_active {
        mp.ell_active = parse_rat(v)?;
    }
    if let Some(v) = &m.c_o {
        mp.c_o = parse_rat(v)?;
    }
    if let Some(v) = m.twist_offset {
        mp.twist_offset = v;
    }
    if let Some(v) = &m.interp {
        mp.interp = Interp::parse(v)?;
    }
    mp.validate()?;

    let a = &file.analysis;
    let thetas = match over.thetas.as_ref().or(a.thetas.as_ref()) {
        Some(list) => list.iter().map(|t| parse_rat(t)).collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    for t in &thetas {
        if t < &Rat::from_integer(0.into()) || t >= &Rat::from_integer(1.into()) {
            bail!(Error::InvalidConfig(format!("theta {} outside [0, 1)", rat_to_string(t))));
        }
    }
    let parity = match over.parity.as_ref().or(a.parity.as_ref()) {
        Some(p) => parse_parity(p)?,
        None => 0,
    };
    let precision = match &a.precision {
        Some(p) => parse_rat(p)?,
        None => Rat::new(1.into(), 1_000_000.into()),
    };
    if precision <= Rat::from_integer(0.into()) {
        bail!(Error::InvalidConfig("precision must be positive".into()));
    }

    let mut render = RenderOptions::default();
    let r = &file.render;
    if let Some(d) = over.depth.or(r.depth) {
        render.depth = d;
    }
    if let Some(v) = r.x_min {
        render.x_min = v;
    }
    if let Some(v) = r.x_max {
        render.x_max = v;
    }
    if let Some(v) = r.unit_px {
        render.unit_px = v;
    }
    if let Some(v) = &r.stroke {
        render.stroke = parse_rat(v)?;
    }
    if let Some(v) = &r.path_stroke {
        render.path_stroke = parse_rat(v)?;
    }
    if let Some(v) = r.horoballs {
        render.horoballs = v;
    }
    if let Some(v) = r.simplex_axes {
        render.simplex_axes = v;
    }
    render.validate()?;

    Ok(Resolved { schedule: sp, model: mp, thetas, parity, precision, render })
}

impl Resolved {
    /// The resolved configuration in the same shape as a config file.
    pub fn echo(&self) -> ConfigFile {
        let sp = &self.schedule;
        let mp = &self.model;
        let r = &self.render;
        ConfigFile {
            schedule: ScheduleSection {
                d: Some(rat_to_string(&sp.d)),
                kmax: Some(sp.kmax),
                floors: Some(sp.floors.iter().map(|f| f.to_string()).collect()),
                eta: Some(FnSpec::from_eta(&sp.eta)),
                f1: Some(FnSpec::from_f1(&sp.f1)),
                f2: Some(FnSpec::from_f2(&sp.f2)),
                ell_alpha_z: Some(rat_to_string(&sp.ell_alpha_z)),
            },
            model: ModelSection {
                ell_active: Some(rat_to_string(&mp.ell_active)),
                c_o: Some(rat_to_string(&mp.c_o)),
                twist_offset: Some(mp.twist_offset),
                interp: Some(mp.interp.name().into()),
            },
            analysis: AnalysisSection {
                thetas: Some(self.thetas.iter().map(rat_to_string).collect()),
                parity: Some(parity_name(self.parity).into()),
                precision: Some(rat_to_string(&self.precision)),
            },
            render: RenderSection {
                depth: Some(r.depth),
                x_min: Some(r.x_min),
                x_max: Some(r.x_max),
                unit_px: Some(r.unit_px),
                stroke: Some(rat_to_string(&r.stroke)),
                path_stroke: Some(rat_to_string(&r.path_stroke)),
                horoballs: Some(r.horoballs),
                simplex_axes: Some(r.simplex_axes),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let r = resolve(&ConfigFile::default(), &Overrides::default(), 1000).unwrap();
        assert_eq!(r.schedule, ScheduleParams { cap_digits: 1000, ..Default::default() });
        assert_eq!(r.model, ModelParams::default());
        assert_eq!(r.parity, 0);
    }

    #[test]
    fn echo_round_trips() {
        let text = r#"
            [schedule]
            D = "3/2"
            kmax = 6
            eta = { kind = "power", params = { scale = "2", exponent = "2" } }
            f1 = { kind = "power", params = { c = "1/2", n = "3" } }
            [model]
            twist_offset = -3
            interp = "geometric"
            [analysis]
            thetas = ["1/4", "1/2"]
            parity = "odd"
        "#;
        let f = ConfigFile::parse(text).unwrap();
        let r = resolve(&f, &Overrides::default(), 1000).unwrap();
        assert_eq!(r.schedule.kmax, 6);
        assert_eq!(r.model.twist_offset, -3);
        assert_eq!(r.parity, 1);
        let again = resolve(&r.echo(), &Overrides::default(), 1000).unwrap();
        assert_eq!(again, r);
        let back: ConfigFile = toml::from_str(&toml::to_string(&r.echo()).unwrap()).unwrap();
        assert_eq!(back, r.echo());
    }

    #[test]
    fn flags_override_file() {
        let f = ConfigFile::parse("[schedule]\nkmax = 6\nD = \"2\"").unwrap();
        let o = Overrides { kmax: Some(4), d: Some("1/3".into()), ..Default::default() };
        let r = resolve(&f, &o, 1000).unwrap();
        assert_eq!(r.schedule.kmax, 4);
        assert_eq!(r.schedule.d, Rat::new(1.into(), 3.into()));
    }

    #[test]
    fn bad_configs_are_rejected() {
        assert!(ConfigFile::parse("[schedule]\nbogus = 1").is_err());
        let bad = |t: &str| resolve(&ConfigFile::parse(t).unwrap(), &Overrides::default(), 1000).is_err();
        assert!(bad("[schedule]\nD = \"-1\""));
        assert!(bad("[schedule]\nfloors = [\"3\"]"));
        assert!(bad("[schedule]\neta = { kind = \"geometric\", params = { scale = \"1\", ratio = \"2\" } }"));
        assert!(bad("[model]\nell_active = \"0\""));
        assert!(bad("[model]\ninterp = \"cubic\""));
        assert!(bad("[analysis]\nthetas = [\"1\"]"));
        assert!(bad("[render]\nx_min = 2\nx_max = 1"));
    }
}
