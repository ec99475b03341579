//! Coefficient schedules: greedy generation under the growth conditions,
//! interleaved indexing `e_{2i+h} = e_i^h`, nominal times and the model
//! functions f₁, f₂.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::contfrac::CFSide;
use crate::curve_algebra::Slope;
use crate::error::{Error, Result};
use crate::numeric::{
    ceil_rat, decimal_digits, exceeds_digits, exp_enclosure, ln_enclosure, rat, round_to_grid, Rat, RatInterval,
    MODEL_GRID_BITS,
};

/// Default cap on the decimal digits of any coefficient.
pub const DEFAULT_CAP_DIGITS: u64 = 1_000_000;

/// Environment variable overriding [`DEFAULT_CAP_DIGITS`].
pub const CAP_ENV: &str = "FAREYLAB_CAP_DIGITS";

/// Reads the digit cap from the environment, falling back to the default.
pub fn cap_digits_from_env() -> Result<u64> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| Error::InvalidConfig(format!("{CAP_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_CAP_DIGITS),
    }
}

const ENCLOSURE_BITS: u32 = 128;

/// Target ratio sequence η_k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EtaSpec {
    /// `scale/(k+1)`
    Harmonic { scale: Rat },
    /// `scale/(k+1)^exponent`
    Power { scale: Rat, exponent: u32 },
    /// `scale·ratio^k`
    Geometric { scale: Rat, ratio: Rat },
}

impl Default for EtaSpec {
    fn default() -> Self {
        EtaSpec::Harmonic { scale: Rat::one() }
    }
}

impl EtaSpec {
    pub fn validate(&self) -> Result<()> {
        let scale = match self {
            EtaSpec::Harmonic { scale } => scale,
            EtaSpec::Power { scale, exponent } => {
                if *exponent == 0 {
                    return Err(Error::EtaNotDecreasing("power exponent must be ≥ 1".into()));
                }
                scale
            }
            EtaSpec::Geometric { scale, ratio } => {
                if !ratio.is_positive() || ratio >= &Rat::one() {
                    return Err(Error::EtaNotDecreasing("geometric ratio must lie in (0, 1)".into()));
                }
                scale
            }
        };
        if !scale.is_positive() {
            return Err(Error::EtaNotDecreasing("scale must be positive".into()));
        }
        Ok(())
    }

    pub fn at(&self, k: usize) -> Rat {
        let k1 = Rat::from_integer(BigInt::from(k + 1));
        match self {
            EtaSpec::Harmonic { scale } => scale / k1,
            EtaSpec::Power { scale, exponent } => scale / num_traits::pow(k1, *exponent as usize),
            EtaSpec::Geometric { scale, ratio } => scale * num_traits::pow(ratio.clone(), k),
        }
    }
}

/// Decreasing model function f₁.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum F1Spec {
    /// `c·e^{−s}`
    Exp { c: Rat },
    /// `c/(1+s)^n`
    Power { c: Rat, n: u32 },
}

impl Default for F1Spec {
    fn default() -> Self {
        F1Spec::Exp { c: Rat::one() }
    }
}

impl F1Spec {
    pub fn c(&self) -> &Rat {
        match self {
            F1Spec::Exp { c } | F1Spec::Power { c, .. } => c,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.c().is_positive() {
            return Err(Error::InvalidConfig("f1 coefficient must be positive".into()));
        }
        if let F1Spec::Power { n: 0, .. } = self {
            return Err(Error::InvalidConfig("f1 power must be ≥ 1 (f1 must decrease)".into()));
        }
        Ok(())
    }

    /// `−2·ln f₁(s)` as a certified interval.
    fn neg_two_ln(&self, s: &Rat) -> Result<RatInterval> {
        let two = rat(2, 1);
        let ln_c = if self.c().is_one() {
            RatInterval::point(Rat::zero())
        } else {
            ln_enclosure(self.c(), ENCLOSURE_BITS)?
        };
        let base = match self {
            F1Spec::Exp { .. } => RatInterval::point(s * &two),
            F1Spec::Power { n, .. } => {
                let l = ln_enclosure(&(s + Rat::one()), ENCLOSURE_BITS)?;
                l.scale(&(&two * Rat::from_integer(BigInt::from(*n))))
            }
        };
        Ok(base.sub(&ln_c.scale(&two)))
    }
}

/// Increasing model function f₂.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum F2Spec {
    /// `c·(1+s)`
    Linear { c: Rat },
    /// `c·(1+s)^n`
    Power { c: Rat, n: u32 },
}

impl Default for F2Spec {
    fn default() -> Self {
        F2Spec::Linear { c: Rat::one() }
    }
}

impl F2Spec {
    pub fn c(&self) -> &Rat {
        match self {
            F2Spec::Linear { c } | F2Spec::Power { c, .. } => c,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.c().is_positive() {
            return Err(Error::InvalidConfig("f2 coefficient must be positive".into()));
        }
        if let F2Spec::Power { n: 0, .. } = self {
            return Err(Error::InvalidConfig("f2 power must be ≥ 1 (f2 must increase)".into()));
        }
        Ok(())
    }

    pub fn at(&self, s: &Rat) -> Rat {
        let base = s + Rat::one();
        match self {
            F2Spec::Linear { c } => c * base,
            F2Spec::Power { c, n } => c * num_traits::pow(base, *n as usize),
        }
    }
}

/// Inputs to [`GrowthSchedule::generate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleParams {
    pub d: Rat,
    pub kmax: usize,
    /// Floors `K_k`; index `k` past the end reuses the last entry (4 if empty).
    pub floors: Vec<BigInt>,
    pub eta: EtaSpec,
    pub f1: F1Spec,
    pub f2: F2Spec,
    /// Upper bound the length of α must respect at time 0.
    pub ell_alpha_z: Rat,
    pub cap_digits: u64,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        ScheduleParams {
            d: Rat::one(),
            kmax: 12,
            floors: vec![BigInt::from(4)],
            eta: EtaSpec::default(),
            f1: F1Spec::default(),
            f2: F2Spec::default(),
            ell_alpha_z: Rat::one(),
            cap_digits: DEFAULT_CAP_DIGITS,
        }
    }
}

impl ScheduleParams {
    pub fn validate(&self) -> Result<()> {
        if !self.d.is_positive() {
            return Err(Error::InvalidConfig("D must be positive".into()));
        }
        if self.floors.iter().any(|k| k < &BigInt::from(4)) {
            return Err(Error::InvalidConfig("floors K_k must be ≥ 4".into()));
        }
        self.eta.validate()?;
        self.f1.validate()?;
        self.f2.validate()?;
        if self.f1.c() > &self.ell_alpha_z {
            return Err(Error::InvalidConfig(format!(
                "f1(0) = {} exceeds the ℓ_α(Z) bound {}",
                self.f1.c(),
                self.ell_alpha_z
            )));
        }
        if self.cap_digits == 0 {
            return Err(Error::InvalidConfig("digit cap must be positive".into()));
        }
        Ok(())
    }

    pub fn floor(&self, k: usize) -> BigInt {
        self.floors.get(k).or(self.floors.last()).cloned().unwrap_or_else(|| BigInt::from(4))
    }

    pub fn nominal_time(&self, k: usize) -> Rat {
        Rat::from_integer(BigInt::from(k + 1)) * &self.d / Rat::from_integer(BigInt::from(2))
    }

    pub fn nominal_midtime(&self, k: usize) -> Rat {
        Rat::from_integer(BigInt::from(2 * k + 3)) * &self.d / Rat::from_integer(BigInt::from(4))
    }

    /// `F_{1,k} = f₁(t_{k+2})` (exact for power laws, rounded to the model grid
    /// for the exponential).
    pub fn big_f1(&self, k: usize) -> Result<Rat> {
        self.f1_at(&self.nominal_time(k + 2))
    }

    /// `F_{2,k} = f₂(t_{k+2})`.
    pub fn big_f2(&self, k: usize) -> Rat {
        self.f2.at(&self.nominal_time(k + 2))
    }

    /// `F_{2,k} − 2·ln F_{1,k}` as a certified interval.
    pub fn f_term(&self, k: usize) -> Result<RatInterval> {
        let t = self.nominal_time(k + 2);
        Ok(self.f1.neg_two_ln(&t)?.add_rat(&self.f2.at(&t)))
    }

    /// Model value of f₁ at `s ≥ 0`.
    pub fn f1_at(&self, s: &Rat) -> Result<Rat> {
        if s.is_negative() {
            return Err(Error::InvalidParameter("f1 evaluated at negative time".into()));
        }
        match &self.f1 {
            F1Spec::Exp { c } => {
                let e = exp_enclosure(&-s, ENCLOSURE_BITS + 64).scale(c);
                let ulp = Rat::new(BigInt::one(), BigInt::one() << MODEL_GRID_BITS as usize);
                Ok(round_to_grid(&e, MODEL_GRID_BITS).max(ulp))
            }
            F1Spec::Power { c, n } => Ok(c / num_traits::pow(s + Rat::one(), *n as usize)),
        }
    }

    pub fn f2_at(&self, s: &Rat) -> Result<Rat> {
        if s.is_negative() {
            return Err(Error::InvalidParameter("f2 evaluated at negative time".into()));
        }
        Ok(self.f2.at(s))
    }
}

/// One coefficient's growth audit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditRow {
    pub k: usize,
    pub e: BigInt,
    pub floor_ok: bool,
    pub i_k_ok: bool,
    pub i_k1_ok: bool,
    pub f_ok: bool,
}

impl AuditRow {
    pub fn ok(&self) -> bool {
        self.floor_ok && self.i_k_ok && self.i_k1_ok && self.f_ok
    }

    /// Name of the first violated invariant.
    pub fn failure(&self) -> Option<&'static str> {
        if !self.floor_ok {
            Some("coefficient floor e_k >= max(4, K_k)")
        } else if !self.i_k_ok {
            Some("growth I(k)/e_k <= eta_k")
        } else if !self.i_k1_ok {
            Some("growth I(k+1)/e_k <= eta_k")
        } else if !self.f_ok {
            Some("growth (F2 - 2 ln F1)/e_k <= eta_k")
        } else {
            None
        }
    }
}

/// Interleaved coefficients `e_0, …, e_{kmax+1}` together with the parameters
/// that produced them. The extra coefficient `e_{kmax+1}` makes every interval
/// `[t'_k, t'_{k+1}]` with `k ≤ kmax` fully modeled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthSchedule {
    params: ScheduleParams,
    coeffs: Vec<BigInt>,
    sides: Option<[CFSide; 2]>,
}

fn interleaved_side(coeffs: &[BigInt], h: usize) -> Vec<BigInt> {
    coeffs.iter().skip(h).step_by(2).cloned().collect()
}

/// `I_h(i) = Π_{j<i}(1 + e_j^h)` on the interleaved prefix.
fn big_i(coeffs: &[BigInt], k: usize) -> BigInt {
    let h = k % 2;
    let i = k / 2;
    coeffs.iter().skip(h).step_by(2).take(i).fold(BigInt::one(), |acc, e| acc * (e + 1))
}

impl GrowthSchedule {
    /// Greedy construction: `e_k = max(4, K_k, ⌈max(I(k), I(k+1), F₂ − 2 ln F₁, 1)/η_k⌉)`.
    pub fn generate(params: ScheduleParams) -> Result<GrowthSchedule> {
        params.validate()?;
        let mut coeffs: Vec<BigInt> = Vec::with_capacity(params.kmax + 2);
        for k in 0..=params.kmax + 1 {
            let eta = params.eta.at(k);
            let ik = Rat::from_integer(big_i(&coeffs, k));
            let ik1 = Rat::from_integer(big_i(&coeffs, k + 1));
            let f = params.f_term(k)?.hi().clone();
            let m = ik.max(ik1).max(f).max(Rat::one());
            let need = ceil_rat(&(m / eta));
            let e = need.max(params.floor(k)).max(BigInt::from(4));
            if exceeds_digits(&e, params.cap_digits) {
                return Err(Error::CoefficientCap { k, digits: decimal_digits(&e), cap: params.cap_digits });
            }
            coeffs.push(e);
        }
        GrowthSchedule::from_coeffs(params, coeffs)
    }

    /// Wraps explicit coefficients without checking the growth conditions
    /// (see [`GrowthSchedule::audit`]). Needs exactly `kmax + 2` entries.
    pub fn from_coeffs(params: ScheduleParams, coeffs: Vec<BigInt>) -> Result<GrowthSchedule> {
        if coeffs.len() != params.kmax + 2 {
            return Err(Error::InvalidConfig(format!(
                "expected {} coefficients for kmax = {}, got {}",
                params.kmax + 2,
                params.kmax,
                coeffs.len()
            )));
        }
        let sides = match (
            CFSide::new(interleaved_side(&coeffs, 0), 0),
            CFSide::new(interleaved_side(&coeffs, 1), 1),
        ) {
            (Ok(a), Ok(b)) => Some([a, b]),
            _ => None,
        };
        Ok(GrowthSchedule { params, coeffs, sides })
    }

    /// Builds a schedule from explicit per-side coefficients with
    /// `kmax = len(even) + len(odd) − 2`. The side lengths must interleave.
    pub fn from_sides(params: ScheduleParams, even: &[BigInt], odd: &[BigInt]) -> Result<GrowthSchedule> {
        if even.len() != odd.len() && even.len() != odd.len() + 1 {
            return Err(Error::InvalidConfig("side lengths do not interleave".into()));
        }
        let total = even.len() + odd.len();
        if total < 2 {
            return Err(Error::InvalidConfig("need at least two coefficients".into()));
        }
        let mut coeffs = Vec::with_capacity(total);
        for k in 0..total {
            coeffs.push(if k % 2 == 0 { even[k / 2].clone() } else { odd[k / 2].clone() });
        }
        let params = ScheduleParams { kmax: total - 2, ..params };
        GrowthSchedule::from_coeffs(params, coeffs)
    }

    pub fn params(&self) -> &ScheduleParams {
        &self.params
    }

    pub fn kmax(&self) -> usize {
        self.params.kmax
    }

    pub fn d(&self) -> &Rat {
        &self.params.d
    }

    /// All stored coefficients `e_0..=e_{kmax+1}`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn e(&self, k: usize) -> Result<&BigInt> {
        self.coeffs.get(k).ok_or(Error::BeyondSchedule { k, kmax: self.params.kmax })
    }

    pub fn side_coeffs(&self, h: u8) -> Vec<BigInt> {
        interleaved_side(&self.coeffs, h as usize)
    }

    /// Continued fraction of side `h`; fails when a coefficient is below 4.
    pub fn side(&self, h: u8) -> Result<&CFSide> {
        match &self.sides {
            Some(s) => s.get(h as usize).ok_or_else(|| Error::InvalidParameter(format!("side {h}"))),
            None => Err(Error::InvalidConfig("schedule has a coefficient below 4".into())),
        }
    }

    /// `γ_k = γ_{⌊k/2⌋}^{k mod 2}` with its side.
    pub fn gamma(&self, k: usize) -> Result<(u8, Slope)> {
        let h = (k % 2) as u8;
        let side = self.side(h)?;
        let i = k / 2;
        if i > side.len() {
            return Err(Error::BeyondSchedule { k, kmax: self.params.kmax });
        }
        Ok((h, side.gamma(i)?))
    }

    /// `I(k) = I_{k mod 2}(⌊k/2⌋)`.
    pub fn big_i(&self, k: usize) -> Result<BigInt> {
        let avail = self.coeffs.len().saturating_sub(k % 2).div_ceil(2);
        if k / 2 > avail {
            return Err(Error::BeyondSchedule { k, kmax: self.params.kmax });
        }
        Ok(big_i(&self.coeffs, k))
    }

    pub fn eta(&self, k: usize) -> Rat {
        self.params.eta.at(k)
    }

    pub fn nominal_time(&self, k: usize) -> Rat {
        self.params.nominal_time(k)
    }

    pub fn nominal_midtime(&self, k: usize) -> Rat {
        self.params.nominal_midtime(k)
    }

    pub fn f1(&self, s: &Rat) -> Result<Rat> {
        self.params.f1_at(s)
    }

    pub fn f2(&self, s: &Rat) -> Result<Rat> {
        self.params.f2_at(s)
    }

    /// Checks every invariant at every `k ≤ kmax` with interval-safe
    /// comparisons.
    pub fn audit(&self) -> Result<Vec<AuditRow>> {
        let four = BigInt::from(4);
        let mut rows = Vec::new();
        for k in 0..=self.params.kmax {
            let e = self.coeffs[k].clone();
            let bound = Rat::from_integer(e.clone()) * self.eta(k);
            let ik = Rat::from_integer(big_i(&self.coeffs, k));
            let ik1 = Rat::from_integer(big_i(&self.coeffs, k + 1));
            let f = self.params.f_term(k)?;
            rows.push(AuditRow {
                k,
                floor_ok: e >= four && e >= self.params.floor(k),
                i_k_ok: ik <= bound,
                i_k1_ok: ik1 <= bound,
                f_ok: f.hi() <= &bound,
                e,
            });
        }
        Ok(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat_to_f64;
    use proptest::prelude::*;
    use std::str::FromStr;

    fn ints(v: &[&str]) -> Vec<BigInt> {
        v.iter().map(|s| BigInt::from_str(s).unwrap()).collect()
    }

    #[test]
    fn default_schedule_prefix() {
        // Independent recomputation of the greedy rule with exact integers:
        // with the defaults F₂ − 2 ln F₁ = 1 + 3(k+3)/2 exactly.
        let mut want: Vec<BigInt> = Vec::new();
        for k in 0..8usize {
            let prod = |h: usize, i: usize| -> BigInt {
                want.iter().skip(h).step_by(2).take(i).fold(BigInt::one(), |a, e| a * (e + 1))
            };
            let ik = prod(k % 2, k / 2);
            let ik1 = prod((k + 1) % 2, (k + 1) / 2);
            let f = Rat::new(BigInt::from(3 * (k as i64 + 3) + 2), BigInt::from(2));
            let m = Rat::from_integer(ik.max(ik1)).max(f);
            let e = ceil_rat(&(m * Rat::from_integer(BigInt::from(k + 1)))).max(BigInt::from(4));
            want.push(e);
        }
        let s = GrowthSchedule::generate(ScheduleParams { kmax: 6, ..Default::default() }).unwrap();
        assert_eq!(s.coeffs(), &want[..]);
        assert_eq!(
            s.coeffs(),
            &ints(&["6", "14", "45", "1288", "96675", "186778032", "25279472876385", "6295533591798341803136"])[..]
        );
    }

    #[test]
    fn trivial_kmax_zero() {
        let p = ScheduleParams {
            kmax: 0,
            f1: F1Spec::Power { c: rat(1, 1), n: 1 },
            f2: F2Spec::Linear { c: rat(1, 100) },
            ..Default::default()
        };
        let s = GrowthSchedule::generate(p.clone()).unwrap();
        // F-term at t_2 = 3/2: 1/100·5/2 + 2 ln(5/2) ≈ 1.858
        let f = p.f_term(0).unwrap();
        assert!(rat_to_f64(f.lo()) > 1.85 && rat_to_f64(f.hi()) < 1.86);
        assert_eq!(s.coeffs()[0], BigInt::from(4));
        assert_eq!(s.coeffs().len(), 2);
    }

    #[test]
    fn times_and_model_functions() {
        let p = ScheduleParams::default();
        assert_eq!(p.nominal_time(0), rat(1, 2));
        assert_eq!(p.nominal_time(1), rat(1, 1));
        assert_eq!(p.nominal_midtime(0), rat(3, 4));
        for k in 0..30 {
            assert_eq!(p.nominal_time(k + 1) - p.nominal_time(k), rat(1, 2));
            assert_eq!(p.nominal_midtime(k) - p.nominal_time(k), rat(1, 4));
            assert_eq!(p.nominal_midtime(k), (p.nominal_time(k) + p.nominal_time(k + 1)) / rat(2, 1));
        }
        assert_eq!(p.f1_at(&Rat::zero()).unwrap(), rat(1, 1));
        assert_eq!(p.f2_at(&Rat::zero()).unwrap(), rat(1, 1));
        assert_eq!(p.big_f2(4), rat(9, 2));
        let f1 = rat_to_f64(&p.big_f1(4).unwrap());
        assert!((f1 - 0.030197383422318500740).abs() < 1e-18);
        assert_eq!(p.f_term(4).unwrap(), RatInterval::point(rat(9, 2) + rat(7, 1)));
    }

    #[test]
    fn validation_errors() {
        let bad_eta = ScheduleParams { eta: EtaSpec::Geometric { scale: rat(1, 1), ratio: rat(1, 1) }, ..Default::default() };
        assert!(matches!(GrowthSchedule::generate(bad_eta), Err(Error::EtaNotDecreasing(_))));
        let bad_f1 = ScheduleParams { f1: F1Spec::Exp { c: rat(2, 1) }, ..Default::default() };
        assert!(matches!(GrowthSchedule::generate(bad_f1), Err(Error::InvalidConfig(_))));
        let bad_floor = ScheduleParams { floors: vec![BigInt::from(3)], ..Default::default() };
        assert!(GrowthSchedule::generate(bad_floor).is_err());
        let capped = ScheduleParams { kmax: 12, cap_digits: 50, ..Default::default() };
        assert!(matches!(GrowthSchedule::generate(capped), Err(Error::CoefficientCap { .. })));
    }

    #[test]
    fn interleaving_and_big_i() {
        let even = ints(&["4", "4", "4"]);
        let odd = ints(&["5", "6"]);
        let s = GrowthSchedule::from_sides(ScheduleParams::default(), &even, &odd).unwrap();
        assert_eq!(s.kmax(), 3);
        assert_eq!(s.coeffs(), &ints(&["4", "5", "4", "6", "4"])[..]);
        assert_eq!(s.gamma(4).unwrap(), (0, Slope::from_i64(4, 17).unwrap()));
        assert_eq!(s.gamma(2).unwrap(), (0, Slope::from_i64(1, 4).unwrap()));
        assert_eq!(s.gamma(3).unwrap(), (1, Slope::from_i64(1, 5).unwrap()));
        assert_eq!(s.big_i(4).unwrap(), BigInt::from(25));
        assert_eq!(s.big_i(5).unwrap(), BigInt::from(42));
        assert_eq!(s.big_i(0).unwrap(), BigInt::one());
    }

    #[test]
    fn corrupted_coefficients_fail_the_audit() {
        let p = ScheduleParams { kmax: 2, ..Default::default() };
        let s = GrowthSchedule::from_coeffs(p, ints(&["6", "14", "3", "1288"])).unwrap();
        assert!(s.side(0).is_err());
        let rows = s.audit().unwrap();
        assert!(rows[0].ok() && rows[1].ok());
        assert_eq!(rows[2].failure(), Some("coefficient floor e_k >= max(4, K_k)"));
    }

    #[test]
    fn default_schedule_passes_audit() {
        let s = GrowthSchedule::generate(ScheduleParams::default()).unwrap();
        assert_eq!(s.coeffs().len(), 14);
        assert!(s.audit().unwrap().iter().all(|r| r.ok()));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = GrowthSchedule::generate(ScheduleParams::default()).unwrap();
        let b = GrowthSchedule::generate(ScheduleParams::default()).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn model_functions_are_monotone(a in 0u32..4000, b in 0u32..4000, c1 in 1i64..=4, n in 1u32..4) {
            let (s, t) = (rat(a.min(b) as i64, 100), rat(a.max(b) as i64, 100));
            for f1 in [F1Spec::Exp { c: rat(c1, 4) }, F1Spec::Power { c: rat(c1, 4), n }] {
                let p = ScheduleParams { f1, f2: F2Spec::Power { c: rat(c1, 3), n }, ..Default::default() };
                prop_assert!(p.f1_at(&s).unwrap() >= p.f1_at(&t).unwrap());
                prop_assert!(p.f2_at(&s).unwrap() <= p.f2_at(&t).unwrap());
                prop_assert!(p.f1_at(&t).unwrap().is_positive());
            }
        }

        #[test]
        fn generated_schedules_meet_all_bounds(kmax in 0usize..8, floor in 4i64..40, scale in 1i64..4, kind in 0u8..3) {
            let eta = match kind {
                0 => EtaSpec::Harmonic { scale: rat(scale, 1) },
                1 => EtaSpec::Power { scale: rat(scale, 1), exponent: 2 },
                _ => EtaSpec::Geometric { scale: rat(scale, 1), ratio: rat(1, 2) },
            };
            let p = ScheduleParams { kmax, floors: vec![BigInt::from(floor)], eta, ..Default::default() };
            let s = GrowthSchedule::generate(p).unwrap();
            prop_assert!(s.audit().unwrap().iter().all(|r| r.ok()));
        }
    }
}
