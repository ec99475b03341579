//! Exact rationals, rational interval arithmetic and certified enclosures of
//! the handful of transcendental functions the length model needs.
//!
//! Transcendentals are evaluated in binary fixed point with outward rounding
//! at every step, so each result is an interval guaranteed to contain the true
//! value. Model constants are then snapped once to the 2^-64 grid with
//! [`round_to_grid`] and treated as exact rationals from there on.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Grid used for model constants (widths, interpolated twists, f₁ values).
pub const MODEL_GRID_BITS: u32 = 64;

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_from_int(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

/// Formats a rational as `num/den`, always including the denominator.
pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

pub fn parse_int(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

pub fn ceil_rat(r: &Rat) -> BigInt {
    r.ceil().to_integer()
}

pub fn floor_rat(r: &Rat) -> BigInt {
    r.floor().to_integer()
}

/// Approximate conversion for diagnostics and drawing only.
pub fn rat_to_f64(r: &Rat) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to scaling by bit lengths for very large operands.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb.max(db) - 60;
    let n = (r.numer() >> shift.max(0) as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift.max(0) as usize).to_f64().unwrap_or(1.0);
    if d == 0.0 {
        return if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    n / d
}

/// Number of decimal digits of |n| (0 has one digit).
pub fn decimal_digits(n: &BigInt) -> u64 {
    if n.is_zero() {
        return 1;
    }
    let bits = n.bits();
    // floor(log10 |n|) is one of two candidates given the bit length.
    let guess = ((bits - 1) as f64 * std::f64::consts::LOG10_2).floor() as u64;
    let p = BigInt::from(10u32).pow((guess + 1) as u32);
    if n.abs() >= p {
        guess + 2
    } else {
        guess + 1
    }
}

/// True iff |n| has more than `cap` decimal digits, without formatting `n`.
pub fn exceeds_digits(n: &BigInt, cap: u64) -> bool {
    let bits = n.bits();
    if (bits as f64) < cap as f64 * std::f64::consts::LOG2_10 - 2.0 {
        return false;
    }
    decimal_digits(n) > cap
}

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatInterval {
    lo: Rat,
    hi: Rat,
}

impl RatInterval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    /// Interval spanned by two points in either order.
    pub fn spanning(a: Rat, b: Rat) -> Self {
        if a <= b {
            RatInterval { lo: a, hi: b }
        } else {
            RatInterval { lo: b, hi: a }
        }
    }

    pub fn point(x: Rat) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// `Some(ordering)` when every point of `self` compares the same way with
    /// every point of `other`.
    pub fn certified_cmp(&self, other: &RatInterval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn sub(&self, other: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo }
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn scale(&self, c: &Rat) -> RatInterval {
        RatInterval::spanning(&self.lo * c, &self.hi * c)
    }

    pub fn add_rat(&self, c: &Rat) -> RatInterval {
        RatInterval { lo: &self.lo + c, hi: &self.hi + c }
    }

    pub fn mul(&self, other: &RatInterval) -> RatInterval {
        if !self.lo.is_negative() && !other.lo.is_negative() {
            return RatInterval { lo: &self.lo * &other.lo, hi: &self.hi * &other.hi };
        }
        let p = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = p.iter().min().unwrap().clone();
        let hi = p.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }

    pub fn recip(&self) -> Result<RatInterval> {
        if self.contains_zero() {
            return Err(Error::NeedsMorePrecision("reciprocal of an interval containing 0".into()));
        }
        Ok(RatInterval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, other: &RatInterval) -> Result<RatInterval> {
        Ok(self.mul(&other.recip()?))
    }

    /// `{|x| : x ∈ self}`.
    pub fn abs(&self) -> RatInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            RatInterval { lo: Rat::zero(), hi: self.hi.clone().max(-&self.lo) }
        }
    }

    /// `{max(x, y)}` over the product of the two intervals.
    pub fn max(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn min(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
        }
    }

    pub fn hull(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Distance from a point to the interval (0 when inside).
    pub fn distance_to(&self, x: &Rat) -> Rat {
        if x < &self.lo {
            &self.lo - x
        } else if x > &self.hi {
            x - &self.hi
        } else {
            Rat::zero()
        }
    }

    /// Widens both endpoints outward onto the 2^-bits grid, bounding the size
    /// of the endpoint representations.
    pub fn round_outward(&self, bits: u32) -> RatInterval {
        let scale = BigInt::one() << bits as usize;
        let lo = Rat::new(floor_rat(&(&self.lo * Rat::from_integer(scale.clone()))), scale.clone());
        let hi = Rat::new(ceil_rat(&(&self.hi * Rat::from_integer(scale.clone()))), scale);
        RatInterval { lo, hi }
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", rat_to_string(&self.lo), rat_to_string(&self.hi))
    }
}

/// Snaps the midpoint of an enclosure to the nearest multiple of 2^-bits
/// (ties round up).
pub fn round_to_grid(iv: &RatInterval, bits: u32) -> Rat {
    let scale = Rat::from_integer(BigInt::one() << bits as usize);
    let scaled = iv.midpoint() * &scale;
    let half = rat(1, 2);
    Rat::from_integer(floor_rat(&(scaled + half))) / scale
}

// Fixed-point interval [lo, hi] · 2^-prec.
#[derive(Clone, Debug)]
struct Fx {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn shr_floor(n: &BigInt, k: u32) -> BigInt {
    n.div_floor(&(BigInt::one() << k as usize))
}

fn shr_ceil(n: &BigInt, k: u32) -> BigInt {
    -((-n).div_floor(&(BigInt::one() << k as usize)))
}

fn ceil_sqrt(n: &BigInt) -> BigInt {
    let r = n.sqrt();
    if &(&r * &r) == n {
        r
    } else {
        r + 1
    }
}

impl Fx {
    fn from_rat(r: &Rat, prec: u32) -> Fx {
        let scaled = r.numer() << prec as usize;
        Fx {
            lo: scaled.div_floor(r.denom()),
            hi: -((-&scaled).div_floor(r.denom())),
            prec,
        }
    }

    fn from_int(n: i64, prec: u32) -> Fx {
        let v = BigInt::from(n) << prec as usize;
        Fx { lo: v.clone(), hi: v, prec }
    }

    fn endpoint(v: &BigInt, prec: u32) -> Fx {
        Fx { lo: v.clone(), hi: v.clone(), prec }
    }

    fn to_interval(&self) -> RatInterval {
        let d = BigInt::one() << self.prec as usize;
        RatInterval::new(Rat::new(self.lo.clone(), d.clone()), Rat::new(self.hi.clone(), d))
    }

    fn add(&self, o: &Fx) -> Fx {
        Fx { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi, prec: self.prec }
    }

    fn sub(&self, o: &Fx) -> Fx {
        Fx { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo, prec: self.prec }
    }

    fn neg(&self) -> Fx {
        Fx { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    fn mul(&self, o: &Fx) -> Fx {
        let p = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mn = p.iter().min().unwrap();
        let mx = p.iter().max().unwrap();
        Fx { lo: shr_floor(mn, self.prec), hi: shr_ceil(mx, self.prec), prec: self.prec }
    }

    fn div_int(&self, d: u64) -> Fx {
        let d = BigInt::from(d);
        Fx { lo: self.lo.div_floor(&d), hi: -((-&self.hi).div_floor(&d)), prec: self.prec }
    }

    fn div(&self, o: &Fx) -> Fx {
        assert!(o.lo.is_positive() || o.hi.is_negative(), "division by interval containing 0");
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&o.lo, &o.hi] {
                let num = a << self.prec as usize;
                let f = num.div_floor(b);
                let c = -((-&num).div_floor(b));
                lo = Some(match lo {
                    Some(x) if x <= f => x,
                    _ => f,
                });
                hi = Some(match hi {
                    Some(x) if x >= c => x,
                    _ => c,
                });
            }
        }
        Fx { lo: lo.unwrap(), hi: hi.unwrap(), prec: self.prec }
    }

    fn sqrt(&self) -> Fx {
        assert!(!self.lo.is_negative(), "sqrt of negative interval");
        Fx {
            lo: (&self.lo << self.prec as usize).sqrt(),
            hi: ceil_sqrt(&(&self.hi << self.prec as usize)),
            prec: self.prec,
        }
    }

    fn mul_pow2(&self, n: i64) -> Fx {
        if n >= 0 {
            Fx { lo: &self.lo << n as usize, hi: &self.hi << n as usize, prec: self.prec }
        } else {
            let k = (-n) as u32;
            Fx { lo: shr_floor(&self.lo, k), hi: shr_ceil(&self.hi, k), prec: self.prec }
        }
    }

    fn widen(&self, r: &BigInt) -> Fx {
        Fx { lo: &self.lo - r, hi: &self.hi + r, prec: self.prec }
    }

    fn hull(&self, o: &Fx) -> Fx {
        Fx { lo: self.lo.clone().min(o.lo.clone()), hi: self.hi.clone().max(o.hi.clone()), prec: self.prec }
    }

    fn abs_hi(&self) -> BigInt {
        self.lo.abs().max(self.hi.abs())
    }

    /// Reduces precision with outward rounding.
    fn coarsen(&self, prec: u32) -> Fx {
        let k = self.prec - prec;
        Fx { lo: shr_floor(&self.lo, k), hi: shr_ceil(&self.hi, k), prec }
    }
}

// atanh(z) for |z| ≤ 1/2 as a certified interval.
fn atanh_small(z: &Fx) -> Fx {
    let prec = z.prec;
    let z2 = z.mul(z);
    let mut power = z.clone();
    let mut sum = z.clone();
    let tiny = BigInt::one();
    let mut j: u64 = 1;
    loop {
        power = power.mul(&z2);
        let term = power.div_int(2 * j + 1);
        sum = sum.add(&term);
        j += 1;
        if power.abs_hi() <= tiny {
            break;
        }
        assert!(j < 100_000, "atanh series failed to converge");
    }
    // Tail Σ_{m≥j} |z|^{2m+1}/(2m+1) ≤ |power·z²|/(1-z²) ≤ 2·|power|·z².
    let tail = &power.abs_hi() * 2 + BigInt::from(2);
    let _ = prec;
    sum.widen(&tail)
}

fn ln2(prec: u32) -> Fx {
    let third = Fx::from_rat(&rat(1, 3), prec);
    let a = atanh_small(&third);
    a.add(&a)
}

// ln of a single positive fixed-point value m·2^-prec.
fn ln_point(m: &BigInt, prec: u32) -> Fx {
    assert!(m.is_positive(), "ln of nonpositive value");
    let n = m.bits() as i64 - 1 - prec as i64; // m·2^-prec / 2^n ∈ [1, 2)
    let y = Fx::endpoint(m, prec).mul_pow2(-n);
    let one = Fx::from_int(1, prec);
    let z = y.sub(&one).div(&y.add(&one));
    let at = atanh_small(&z);
    let ln_y = at.add(&at);
    let l2 = ln2(prec);
    let nl2 = if n >= 0 {
        Fx { lo: &l2.lo * n, hi: &l2.hi * n, prec }
    } else {
        Fx { lo: &l2.hi * n, hi: &l2.lo * n, prec }
    };
    ln_y.add(&nl2)
}

fn ln_fx(x: &Fx) -> Fx {
    ln_point(&x.lo, x.prec).hull(&ln_point(&x.hi, x.prec))
}

// exp of a single fixed-point value m·2^-prec.
fn exp_point(m: &BigInt, prec: u32) -> Fx {
    let approx = rat_to_f64(&Rat::new(m.clone(), BigInt::one() << prec as usize));
    let n = (approx / std::f64::consts::LN_2).floor() as i64;
    let l2 = ln2(prec);
    let nl2 = if n >= 0 {
        Fx { lo: &l2.lo * n, hi: &l2.hi * n, prec }
    } else {
        Fx { lo: &l2.hi * n, hi: &l2.lo * n, prec }
    };
    let r = Fx::endpoint(m, prec).sub(&nl2);
    // |r| < 1 here; Taylor series with a Lagrange remainder bound.
    let mut term = Fx::from_int(1, prec);
    let mut sum = term.clone();
    let tiny = BigInt::one();
    let mut j: u64 = 1;
    loop {
        term = term.mul(&r).div_int(j);
        sum = sum.add(&term);
        j += 1;
        if term.abs_hi() <= tiny {
            break;
        }
        assert!(j < 100_000, "exp series failed to converge");
    }
    // remainder ≤ 3·|term| (e^|r| < 3, successive terms shrink)
    let tail = term.abs_hi() * 3 + BigInt::from(3);
    sum.widen(&tail).mul_pow2(n)
}

fn exp_fx(x: &Fx) -> Fx {
    let a = exp_point(&x.lo, x.prec);
    let b = exp_point(&x.hi, x.prec);
    a.hull(&b)
}

const GUARD_BITS: u32 = 48;

/// Certified enclosure of `e^x`.
pub fn exp_enclosure(x: &Rat, prec: u32) -> RatInterval {
    let work = prec + GUARD_BITS + (rat_to_f64(x).abs().log2().max(0.0) as u32);
    exp_fx(&Fx::from_rat(x, work)).coarsen(prec).to_interval()
}

/// Certified enclosure of `ln x`, `x > 0`.
pub fn ln_enclosure(x: &Rat, prec: u32) -> Result<RatInterval> {
    if !x.is_positive() {
        return Err(Error::InvalidParameter(format!("ln of nonpositive value {}", rat_to_string(x))));
    }
    let extra = x.denom().bits() as u32;
    let work = prec + GUARD_BITS + extra;
    Ok(ln_fx(&Fx::from_rat(x, work)).coarsen(prec).to_interval())
}

/// Certified enclosure of `base^theta` for an integer `base ≥ 1` and rational
/// exponent.
pub fn pow_enclosure(base: &BigInt, theta: &Rat, prec: u32) -> RatInterval {
    assert!(base.is_positive());
    let work = prec + GUARD_BITS + 2 * base.bits() as u32 + 8;
    let lb = ln_point(&(base << work as usize), work);
    let th = Fx::from_rat(theta, work);
    exp_fx(&lb.mul(&th)).coarsen(prec).to_interval()
}

/// Certified enclosure of the collar width `2·asinh(1/sinh(ℓ/2))`, `ℓ > 0`.
pub fn collar_width_enclosure(len: &Rat, prec: u32) -> Result<RatInterval> {
    if !len.is_positive() {
        return Err(Error::InvalidParameter(format!("collar width of nonpositive length {}", rat_to_string(len))));
    }
    // Small lengths lose relative precision in sinh; scale the working
    // precision with the magnitude of 1/ℓ.
    let extra = (len.denom().bits() as i64 - len.numer().bits() as i64).max(0) as u32;
    let work = prec + GUARD_BITS + 2 * extra + 8;
    let half = Fx::from_rat(&(len / Rat::from_integer(BigInt::from(2))), work);
    let ep = exp_fx(&half);
    let em = exp_fx(&half.neg());
    let sinh = ep.sub(&em).div_int(2);
    let inv = Fx::from_int(1, work).div(&sinh);
    let root = inv.mul(&inv).add(&Fx::from_int(1, work)).sqrt();
    let asinh = ln_fx(&inv.add(&root));
    Ok(asinh.add(&asinh).coarsen(prec).to_interval())
}

/// Sign of an integer as -1, 0, 1.
pub fn sign_of(n: &BigInt) -> i8 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
