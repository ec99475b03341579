//! Genus-2 test curves as two-sided arc systems and their pairings with the
//! curves `γ_k`, with α, and with the limiting laminations `λ̄₀`, `λ̄₁`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::contfrac::CFSide;
use crate::curve_algebra::{intersection_arc_curve, ArcClass, Slope};
use crate::error::{Error, Result};
use crate::limit_analysis::ProjectivePoint;
use crate::numeric::{Rat, RatInterval};
use crate::schedule::GrowthSchedule;

/// A curve δ given by `n` arcs on each side of α, so `i(δ, α) = 2n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestCurve {
    id: String,
    arcs: [Vec<ArcClass>; 2],
}

impl TestCurve {
    pub fn new(id: impl Into<String>, arcs0: Vec<ArcClass>, arcs1: Vec<ArcClass>) -> Result<TestCurve> {
        let id = id.into();
        if arcs0.is_empty() || arcs1.is_empty() {
            return Err(Error::InvalidCurve { id, reason: "each side needs at least one arc (i(δ, α) = 0)".into() });
        }
        if arcs0.len() != arcs1.len() {
            return Err(Error::InvalidCurve {
                id,
                reason: format!("sides carry {} and {} arcs", arcs0.len(), arcs1.len()),
            });
        }
        Ok(TestCurve { id, arcs: [arcs0, arcs1] })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn arcs(&self, h: u8) -> &[ArcClass] {
        &self.arcs[h as usize]
    }

    /// Arcs per side.
    pub fn n(&self) -> usize {
        self.arcs[0].len()
    }

    pub fn i_alpha(&self) -> BigInt {
        BigInt::from(2 * self.n())
    }

    /// Disjoint union with another arc system.
    pub fn union(&self, other: &TestCurve, id: impl Into<String>) -> TestCurve {
        let mut a0 = self.arcs[0].clone();
        let mut a1 = self.arcs[1].clone();
        a0.extend(other.arcs[0].iter().cloned());
        a1.extend(other.arcs[1].iter().cloned());
        TestCurve { id: id.into(), arcs: [a0, a1] }
    }
}

/// Default family: for each side, single arcs (1,0), (0,1), (1,1) paired with
/// the arc (1,0) on the opposite side.
pub fn default_family() -> Vec<TestCurve> {
    let arc = |a, b| ArcClass::from_i64(a, b).expect("nonzero");
    let mut out = Vec::new();
    for h in 0..2u8 {
        for (a, b) in [(1, 0), (0, 1), (1, 1)] {
            let here = vec![arc(a, b)];
            let there = vec![arc(1, 0)];
            let id = format!("s{h}_a{a}b{b}");
            let c = if h == 0 { TestCurve::new(id, here, there) } else { TestCurve::new(id, there, here) };
            out.push(c.expect("valid default curve"));
        }
    }
    out
}

/// Weighted irrational lamination on one side; the slope is the limit of the
/// side's continued fraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasuredLamination {
    weight: Rat,
    cf: CFSide,
}

impl MeasuredLamination {
    pub fn new(cf: CFSide, weight: Rat) -> Result<MeasuredLamination> {
        if !weight.is_positive() {
            return Err(Error::InvalidParameter("lamination weight must be positive".into()));
        }
        if cf.len() < 2 {
            return Err(Error::InsufficientCoefficients { needed: 2, have: cf.len() });
        }
        Ok(MeasuredLamination { weight, cf })
    }

    pub fn side(&self) -> u8 {
        self.cf.side()
    }

    pub fn weight(&self) -> &Rat {
        &self.weight
    }

    pub fn cf(&self) -> &CFSide {
        &self.cf
    }

    pub fn with_weight(&self, weight: Rat) -> Result<MeasuredLamination> {
        MeasuredLamination::new(self.cf.clone(), weight)
    }

    /// Deepest usable precision index.
    pub fn max_precision(&self) -> usize {
        self.cf.len()
    }
}

/// Unit-weight laminations `[λ̄₀, λ̄₁]` of a schedule.
pub fn laminations_of(sched: &GrowthSchedule) -> Result<[MeasuredLamination; 2]> {
    Ok([
        MeasuredLamination::new(sched.side(0)?.clone(), Rat::one())?,
        MeasuredLamination::new(sched.side(1)?.clone(), Rat::one())?,
    ])
}

/// `Σ_{side-h arcs} |a·q − b·p|` for `γ = p/q` on side `h`.
pub fn pair_delta_slope(delta: &TestCurve, h: u8, gamma: &Slope) -> BigInt {
    delta.arcs(h).iter().map(|a| intersection_arc_curve(a, gamma)).sum()
}

/// `i(δ, γ_k)`; arcs on the side not containing `γ_k` contribute nothing.
pub fn pair_delta_gamma(delta: &TestCurve, k: usize, sched: &GrowthSchedule) -> Result<BigInt> {
    let (h, g) = sched.gamma(k)?;
    Ok(pair_delta_slope(delta, h, &g))
}

fn arc_deviation(arc: &ArcClass, x: &RatInterval) -> Result<RatInterval> {
    if arc.b().is_zero() {
        return Ok(RatInterval::point(Rat::from_integer(arc.a().abs())));
    }
    let v = x.scale(&Rat::from_integer(-arc.b().clone())).add_rat(&Rat::from_integer(arc.a().clone()));
    if v.contains_zero() {
        return Err(Error::NeedsMorePrecision(format!("sign of a − x·b undetermined for arc {arc}")));
    }
    Ok(v.abs())
}

fn unweighted(delta: &TestCurve, lam: &MeasuredLamination, precision_index: usize) -> Result<RatInterval> {
    let x = lam.cf.value_interval(precision_index)?;
    let mut sum = RatInterval::point(Rat::zero());
    for arc in delta.arcs(lam.side()) {
        sum = sum.add(&arc_deviation(arc, &x)?);
    }
    Ok(sum)
}

/// `weight·Σ_{side-h arcs} |a − x_h·b|` at the given precision index.
pub fn pair_delta_lamination(delta: &TestCurve, lam: &MeasuredLamination, precision_index: usize) -> Result<RatInterval> {
    Ok(unweighted(delta, lam, precision_index)?.scale(&lam.weight))
}

/// As [`pair_delta_lamination`], raising the precision index until the
/// unweighted sum has width at most `tol` (or the coefficients run out). The
/// index choice does not depend on the weight.
pub fn pair_delta_lamination_to(delta: &TestCurve, lam: &MeasuredLamination, tol: &Rat) -> Result<RatInterval> {
    let max = lam.max_precision();
    let mut i = 2;
    loop {
        match unweighted(delta, lam, i) {
            Ok(iv) if &iv.width() <= tol => return Ok(iv.scale(&lam.weight)),
            Ok(_) | Err(Error::NeedsMorePrecision(_)) if i < max => {}
            Ok(_) => {
                return Err(Error::NeedsMorePrecision(format!(
                    "width above tolerance at the deepest index {max}"
                )))
            }
            Err(e) => return Err(e),
        }
        i = (2 * i).min(max);
    }
}

/// `κ(δ) = max_h max{2 n_h c_h, 2/c_h}` where `c_h` is the largest
/// `|a − x_h b|` over side-h arcs.
pub fn kappa_of(delta: &TestCurve, lams: &[MeasuredLamination; 2]) -> Result<RatInterval> {
    let mut kappa: Option<RatInterval> = None;
    for lam in lams {
        let x = lam.cf.value_interval(lam.max_precision())?;
        let mut c: Option<RatInterval> = None;
        for arc in delta.arcs(lam.side()) {
            let d = arc_deviation(arc, &x)?;
            c = Some(match c {
                Some(prev) => prev.max(&d),
                None => d,
            });
        }
        let c = c.expect("nonempty side");
        let n2 = Rat::from_integer(BigInt::from(2 * delta.arcs(lam.side()).len()));
        let two = RatInterval::point(Rat::from_integer(BigInt::from(2)));
        let k = c.scale(&n2).max(&two.div(&c)?);
        kappa = Some(match kappa {
            Some(prev) => prev.max(&k),
            None => k,
        });
    }
    Ok(kappa.expect("two sides"))
}

/// One evaluation of the sandwich `e_{k−2}/κ ≤ i(δ, γ_k) ≤ κ·I(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichRow {
    pub k: usize,
    pub lower_e: BigInt,
    pub pairing: BigInt,
    pub upper_i: BigInt,
    pub holds: bool,
}

/// Both comparisons use the lower end of the κ enclosure, so a `true` result
/// holds for every κ in the interval.
pub fn sandwich_check(delta: &TestCurve, k: usize, sched: &GrowthSchedule, kappa: &RatInterval) -> Result<SandwichRow> {
    if k < 2 {
        return Err(Error::InvalidParameter("sandwich check needs k ≥ 2".into()));
    }
    let pairing = pair_delta_gamma(delta, k, sched)?;
    let lower_e = sched.e(k - 2)?.clone();
    let upper_i = sched.big_i(k)?;
    let kl = kappa.lo();
    let p = Rat::from_integer(pairing.clone());
    let holds = Rat::from_integer(lower_e.clone()) <= kl * &p && p <= kl * Rat::from_integer(upper_i.clone());
    Ok(SandwichRow { k, lower_e, pairing, upper_i, holds })
}

/// `i(δ, γ_k)/e_k` and `i(δ, γ_{k+1})/e_k`.
pub fn decay_ratios(delta: &TestCurve, k: usize, sched: &GrowthSchedule) -> Result<(Rat, Rat)> {
    let e = Rat::from_integer(sched.e(k)?.clone());
    let a = Rat::from_integer(pair_delta_gamma(delta, k, sched)?) / &e;
    let b = Rat::from_integer(pair_delta_gamma(delta, k + 1, sched)?) / &e;
    Ok((a, b))
}

/// The vectors `(i(δ_j, λ̄₀))_j` and `(i(δ_j, λ̄₁))_j` spanning the simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexEnds {
    pub a: Vec<RatInterval>,
    pub b: Vec<RatInterval>,
}

impl SimplexEnds {
    pub fn new(lam0: &MeasuredLamination, lam1: &MeasuredLamination, family: &[TestCurve], tol: &Rat) -> Result<SimplexEnds> {
        if family.is_empty() {
            return Err(Error::EmptyVector);
        }
        let a = family.iter().map(|d| pair_delta_lamination_to(d, lam0, tol)).collect::<Result<Vec<_>>>()?;
        let b = family.iter().map(|d| pair_delta_lamination_to(d, lam1, tol)).collect::<Result<Vec<_>>>()?;
        Ok(SimplexEnds { a, b })
    }

    /// At the deepest precision each lamination allows.
    pub fn full(lam0: &MeasuredLamination, lam1: &MeasuredLamination, family: &[TestCurve]) -> Result<SimplexEnds> {
        if family.is_empty() {
            return Err(Error::EmptyVector);
        }
        let a = family.iter().map(|d| pair_delta_lamination(d, lam0, lam0.max_precision())).collect::<Result<Vec<_>>>()?;
        let b = family.iter().map(|d| pair_delta_lamination(d, lam1, lam1.max_precision())).collect::<Result<Vec<_>>>()?;
        Ok(SimplexEnds { a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Enclosures of the normalized coordinates of `(1−t)·a + t·b`.
    pub fn point(&self, t: &Rat) -> Result<Vec<RatInterval>> {
        if t.is_negative() || t > &Rat::one() {
            return Err(Error::InvalidParameter("simplex parameter outside [0, 1]".into()));
        }
        let s = Rat::one() - t;
        let v: Vec<RatInterval> = self.a.iter().zip(&self.b).map(|(a, b)| a.scale(&s).add(&b.scale(t))).collect();
        normalize_enclosures(&v)
    }
}

/// Coordinates of `v/Σv` for a vector known up to nonnegative intervals.
pub fn normalize_enclosures(v: &[RatInterval]) -> Result<Vec<RatInterval>> {
    let lo_sum: Rat = v.iter().map(|x| x.lo().clone()).sum();
    let hi_sum: Rat = v.iter().map(|x| x.hi().clone()).sum();
    if !lo_sum.is_positive() {
        return Err(Error::NeedsMorePrecision("simplex vector not certified positive".into()));
    }
    Ok(v.iter()
        .map(|x| {
            let others_hi = &hi_sum - x.hi();
            let others_lo = &lo_sum - x.lo();
            let lo = x.lo() / (x.lo() + others_hi);
            let hi = x.hi() / (x.hi() + others_lo);
            RatInterval::new(lo, hi)
        })
        .collect())
}

/// A point of the simplex chart with certified coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexPoint {
    pub t: Rat,
    pub coords: Vec<RatInterval>,
    /// Projectivized midpoints of the unnormalized coordinates.
    pub mid: ProjectivePoint,
}

/// Projectivization of `((1−t)·i(δ_j, λ̄₀) + t·i(δ_j, λ̄₁))_j`, with every
/// coordinate enclosed to width at most `tol`.
pub fn simplex_point(
    t: &Rat,
    lam0: &MeasuredLamination,
    lam1: &MeasuredLamination,
    family: &[TestCurve],
    tol: &Rat,
) -> Result<SimplexPoint> {
    let ends = SimplexEnds::new(lam0, lam1, family, &(tol / Rat::from_integer(BigInt::from(4 * family.len().max(1)))))?;
    let coords = ends.point(t)?;
    if coords.iter().any(|c| &c.width() > tol) {
        return Err(Error::NeedsMorePrecision("simplex coordinates wider than the tolerance".into()));
    }
    let s = Rat::one() - t;
    let mids: Vec<Rat> = ends.a.iter().zip(&ends.b).map(|(a, b)| a.midpoint() * &s + b.midpoint() * t).collect();
    let mid = crate::limit_analysis::projectivize(&mids)?;
    Ok(SimplexPoint { t: t.clone(), coords, mid })
}
