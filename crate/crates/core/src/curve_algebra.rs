//! Slopes and arc classes on the once-punctured torus.
//!
//! A curve is named by a primitive integer vector `(p, q)` read as the
//! fraction `p/q`; `1/0` is the curve at infinity. Intersections are absolute
//! values of the determinant pairing and Dehn twists act by the
//! Picard–Lefschetz formula.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::Rat;

/// Reduced fraction `p/q` with `q ≥ 0`; `1/0` is the unique slope with `q = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Slope {
    p: BigInt,
    q: BigInt,
}

impl Slope {
    /// Reduces `(p, q)` and normalizes the sign onto `p`.
    pub fn new(p: BigInt, q: BigInt) -> Result<Slope> {
        if p.is_zero() && q.is_zero() {
            return Err(Error::Degenerate("slope (0, 0)".into()));
        }
        if q.is_zero() {
            return Ok(Slope::infinity());
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / &g, q / &g);
        if q.is_negative() {
            p = -p;
            q = -q;
        }
        Ok(Slope { p, q })
    }

    pub fn from_i64(p: i64, q: i64) -> Result<Slope> {
        Slope::new(BigInt::from(p), BigInt::from(q))
    }

    pub fn infinity() -> Slope {
        Slope { p: BigInt::one(), q: BigInt::zero() }
    }

    pub fn zero() -> Slope {
        Slope { p: BigInt::zero(), q: BigInt::one() }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn is_infinity(&self) -> bool {
        self.q.is_zero()
    }

    /// The rational value, `None` for `1/0`.
    pub fn value(&self) -> Option<Rat> {
        if self.is_infinity() {
            None
        } else {
            Some(Rat::new(self.p.clone(), self.q.clone()))
        }
    }
}

/// Value order on ℝ ∪ {∞} with `1/0` greatest.
impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinity(), other.is_infinity()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (&self.p * &other.q).cmp(&(&other.p * &self.q)),
        }
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Slope> {
        let bad = || Error::Parse(format!("not a slope: {s:?}"));
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        Slope::new(p, q)
    }
}

/// Relative homology class `(a, b)` of an arc on one side of the separating
/// curve. Not required to be primitive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcClass {
    a: BigInt,
    b: BigInt,
}

impl ArcClass {
    pub fn new(a: BigInt, b: BigInt) -> Result<ArcClass> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::Degenerate("arc class (0, 0)".into()));
        }
        Ok(ArcClass { a, b })
    }

    pub fn from_i64(a: i64, b: i64) -> Result<ArcClass> {
        ArcClass::new(BigInt::from(a), BigInt::from(b))
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    /// `|a − x·b|` for a rational `x`.
    pub fn deviation(&self, x: &Rat) -> Rat {
        (Rat::from_integer(self.a.clone()) - x * Rat::from_integer(self.b.clone())).abs()
    }
}

impl fmt::Display for ArcClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// `⟨(x, y), (p, q)⟩ = x·q − y·p`.
pub fn algebraic_intersection(x: &BigInt, y: &BigInt, p: &BigInt, q: &BigInt) -> BigInt {
    x * q - y * p
}

pub fn farey_adjacent(u: &Slope, v: &Slope) -> bool {
    intersection_slopes(u, v).is_one()
}

pub fn intersection_slopes(u: &Slope, v: &Slope) -> BigInt {
    algebraic_intersection(&u.p, &u.q, &v.p, &v.q).abs()
}

pub fn intersection_arc_curve(arc: &ArcClass, v: &Slope) -> BigInt {
    algebraic_intersection(&arc.a, &arc.b, &v.p, &v.q).abs()
}

/// Objects the Dehn twist about a slope acts on.
pub trait Twistable: Sized {
    fn twisted(&self, about: &Slope, power: &BigInt) -> Self;
}

fn twist_vector(x: &BigInt, y: &BigInt, about: &Slope, power: &BigInt) -> (BigInt, BigInt) {
    let c = power * algebraic_intersection(x, y, &about.p, &about.q);
    (x + &c * &about.p, y + &c * &about.q)
}

impl Twistable for Slope {
    fn twisted(&self, about: &Slope, power: &BigInt) -> Slope {
        let (x, y) = twist_vector(&self.p, &self.q, about, power);
        Slope::new(x, y).expect("twist of a primitive vector is primitive")
    }
}

impl Twistable for ArcClass {
    fn twisted(&self, about: &Slope, power: &BigInt) -> ArcClass {
        let (a, b) = twist_vector(&self.a, &self.b, about, power);
        ArcClass { a, b }
    }
}

/// `v ↦ v + power·⟨v, γ⟩·γ` with `γ = about`.
pub fn dehn_twist<T: Twistable>(about: &Slope, target: &T, power: &BigInt) -> T {
    target.twisted(about, power)
}
