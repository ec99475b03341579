//! Coarse length model along the ray.
//!
//! On the interval `[t'_k, t'_{k+1})` the curves `γ_k`, `γ_{k+1}` and α form
//! the short pants. A test curve δ then has model length
//!
//! ```text
//! i_k·(w_a + ℓ_a·tw_k) + i_{k+1}·(w_a + ℓ_a·tw_{k+1})
//!     + i_α·(w(f₁(s)) + f₁(s)·f₂(s)) + c_O·(i_k + i_{k+1} + i_α)
//! ```
//!
//! with `i_• = i(δ, •)`, `w` the collar width, `tw_k = e_k + offset` and
//! `tw_{k+1}` running from 1 up to `e_{k+1}` across the interval.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{collar_width_enclosure, pow_enclosure, rat_to_string, round_to_grid, Rat, MODEL_GRID_BITS};
use crate::pairing::{pair_delta_gamma, TestCurve};
use crate::schedule::GrowthSchedule;

/// Interpolation law for `tw_{γ_{k+1}}` across an interval, as a function of
/// `θ = (s − t'_k)/(t'_{k+1} − t'_k) ∈ [0, 1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Interp {
    /// `min(e_{k+1}, 1 + B_k·θ/(1−θ))` with `B_k = e_k·q(γ_k)/q(γ_{k+1})`.
    /// The two dominant terms then stand in ratio `(1−θ) : θ`.
    #[default]
    Balanced,
    /// `e_{k+1}^θ`, rounded to the model grid.
    Geometric,
}

impl Interp {
    pub fn name(&self) -> &'static str {
        match self {
            Interp::Balanced => "balanced",
            Interp::Geometric => "geometric",
        }
    }

    pub fn parse(s: &str) -> Result<Interp> {
        match s {
            "balanced" => Ok(Interp::Balanced),
            "geometric" => Ok(Interp::Geometric),
            _ => Err(Error::InvalidConfig(format!("unknown interpolation law {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelParams {
    pub ell_active: Rat,
    pub c_o: Rat,
    pub twist_offset: i64,
    pub interp: Interp,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { ell_active: Rat::one(), c_o: Rat::one(), twist_offset: 0, interp: Interp::default() }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !self.ell_active.is_positive() {
            return Err(Error::InvalidConfig("ell_active must be positive".into()));
        }
        if self.c_o.is_negative() {
            return Err(Error::InvalidConfig("c_O must be nonnegative".into()));
        }
        Ok(())
    }
}

/// The unique `k` with `t'_k ≤ s < t'_{k+1}`; the model starts at `t'_2`.
pub fn active_index(s: &Rat, sched: &GrowthSchedule) -> Result<usize> {
    if s < &sched.nominal_midtime(2) {
        return Err(Error::BeforeFirstInterval(rat_to_string(s)));
    }
    // t'_k = D(2k+3)/4  ⇒  k = ⌊(4s/D − 3)/2⌋
    let v = (s * Rat::from_integer(BigInt::from(4)) / sched.d() - Rat::from_integer(BigInt::from(3)))
        / Rat::from_integer(BigInt::from(2));
    let k = v.floor().to_integer();
    let k: usize = k.try_into().map_err(|_| Error::BeforeFirstInterval(rat_to_string(s)))?;
    if k > sched.kmax() {
        return Err(Error::BeyondSchedule { k, kmax: sched.kmax() });
    }
    Ok(k)
}

/// Collar width `2·asinh(1/sinh(ℓ/2))` rounded to the 2^-64 grid.
pub fn width_of(length: &Rat) -> Result<Rat> {
    let iv = collar_width_enclosure(length, 128)?;
    Ok(round_to_grid(&iv, MODEL_GRID_BITS))
}

/// Position of `s` inside its interval.
pub fn theta_of(s: &Rat, sched: &GrowthSchedule) -> Result<(usize, Rat)> {
    let k = active_index(s, sched)?;
    let half = sched.d() / Rat::from_integer(BigInt::from(2));
    Ok((k, (s - sched.nominal_midtime(k)) / half))
}

/// `tw_{γ_k} = e_k + twist_offset`, constant across the interval.
pub fn twist_gamma_k(s: &Rat, sched: &GrowthSchedule, params: &ModelParams) -> Result<BigInt> {
    let k = active_index(s, sched)?;
    Ok(sched.e(k)? + BigInt::from(params.twist_offset))
}

fn twist_k1_at(k: usize, theta: &Rat, sched: &GrowthSchedule, params: &ModelParams) -> Result<Rat> {
    if theta.is_zero() {
        return Ok(Rat::one());
    }
    let top = Rat::from_integer(sched.e(k + 1)?.clone());
    let raw = match params.interp {
        Interp::Geometric => {
            let e = sched.e(k + 1)?;
            let iv = pow_enclosure(e, theta, MODEL_GRID_BITS + 32);
            round_to_grid(&iv, MODEL_GRID_BITS)
        }
        Interp::Balanced => {
            let (_, gk) = sched.gamma(k)?;
            let (_, gk1) = sched.gamma(k + 1)?;
            let b = Rat::new(sched.e(k)? * gk.q(), gk1.q().clone());
            Rat::one() + b * theta / (Rat::one() - theta)
        }
    };
    Ok(raw.max(Rat::one()).min(top))
}

/// Model twist of δ about `γ_{k+1}`: 1 at `t'_k`, increasing towards `e_{k+1}`.
pub fn twist_gamma_k1(s: &Rat, sched: &GrowthSchedule, params: &ModelParams) -> Result<Rat> {
    let (k, theta) = theta_of(s, sched)?;
    twist_k1_at(k, &theta, sched, params)
}

/// Per-term breakdown of one model length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthTerms {
    pub k: usize,
    pub i_k: BigInt,
    pub i_k1: BigInt,
    pub i_alpha: BigInt,
    /// `i_k·x`
    pub gamma_k: Rat,
    /// `i_{k+1}·y`
    pub gamma_k1: Rat,
    /// `i_α·(w(f₁) + f₁·f₂)`
    pub alpha: Rat,
    /// `c_O·(i_k + i_{k+1} + i_α)`
    pub error: Rat,
    pub total: Rat,
    pub x: Rat,
    pub y: Rat,
}

/// Quantities shared by every test curve at one time `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleContext {
    pub s: Rat,
    pub k: usize,
    pub theta: Rat,
    pub x: Rat,
    pub y: Rat,
    /// `w(f₁(s)) + f₁(s)·f₂(s)`
    pub alpha_unit: Rat,
}

impl SampleContext {
    pub fn new(s: &Rat, sched: &GrowthSchedule, params: &ModelParams) -> Result<SampleContext> {
        params.validate()?;
        let (k, theta) = theta_of(s, sched)?;
        let w_a = width_of(&params.ell_active)?;
        let tw_k = Rat::from_integer(sched.e(k)? + BigInt::from(params.twist_offset));
        let x = &w_a + &params.ell_active * tw_k;
        let y = &w_a + &params.ell_active * twist_k1_at(k, &theta, sched, params)?;
        let f1 = sched.f1(s)?;
        let f2 = sched.f2(s)?;
        let alpha_unit = width_of(&f1)? + f1 * f2;
        Ok(SampleContext { s: s.clone(), k, theta, x, y, alpha_unit })
    }

    pub fn terms(&self, delta: &TestCurve, sched: &GrowthSchedule, params: &ModelParams) -> Result<LengthTerms> {
        let i_k = pair_delta_gamma(delta, self.k, sched)?;
        let i_k1 = pair_delta_gamma(delta, self.k + 1, sched)?;
        let i_alpha = delta.i_alpha();
        let r = |n: &BigInt| Rat::from_integer(n.clone());
        let gamma_k = r(&i_k) * &self.x;
        let gamma_k1 = r(&i_k1) * &self.y;
        let alpha = r(&i_alpha) * &self.alpha_unit;
        let error = &params.c_o * r(&(&i_k + &i_k1 + &i_alpha));
        let total = &gamma_k + &gamma_k1 + &alpha + &error;
        Ok(LengthTerms {
            k: self.k,
            i_k,
            i_k1,
            i_alpha,
            gamma_k,
            gamma_k1,
            alpha,
            error,
            total,
            x: self.x.clone(),
            y: self.y.clone(),
        })
    }
}

pub fn length_terms(delta: &TestCurve, s: &Rat, sched: &GrowthSchedule, params: &ModelParams) -> Result<LengthTerms> {
    SampleContext::new(s, sched, params)?.terms(delta, sched, params)
}

/// Model value of `ℓ_δ(r(s))`.
pub fn length_of(delta: &TestCurve, s: &Rat, sched: &GrowthSchedule, params: &ModelParams) -> Result<Rat> {
    Ok(length_terms(delta, s, sched, params)?.total)
}

/// `(x(s), y(s)) = (w_a + ℓ_a·tw_{γ_k}, w_a + ℓ_a·tw_{γ_{k+1}})`.
pub fn xy_of(s: &Rat, sched: &GrowthSchedule, params: &ModelParams) -> Result<(Rat, Rat)> {
    let c = SampleContext::new(s, sched, params)?;
    Ok((c.x, c.y))
}
