//! Projectivized length vectors and their distance to the simplex spanned by
//! the two limiting laminations.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{ln_enclosure, rat, Rat, RatInterval};
use crate::pairing::{laminations_of, MeasuredLamination, SimplexEnds, TestCurve};
use crate::ray_model::{LengthTerms, ModelParams, SampleContext};
use crate::schedule::GrowthSchedule;

/// Nonnegative coordinates summing to exactly 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    coords: Vec<Rat>,
}

impl ProjectivePoint {
    /// Accepts coordinates that are already normalized.
    pub fn from_normalized(coords: Vec<Rat>) -> Result<ProjectivePoint> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        if coords.iter().any(|c| c.is_negative()) {
            return Err(Error::InvalidParameter("negative projective coordinate".into()));
        }
        let sum: Rat = coords.iter().sum();
        if !sum.is_one() {
            return Err(Error::InvalidParameter("projective coordinates do not sum to 1".into()));
        }
        Ok(ProjectivePoint { coords })
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `v / Σv`.
pub fn projectivize(v: &[Rat]) -> Result<ProjectivePoint> {
    if v.is_empty() {
        return Err(Error::EmptyVector);
    }
    if v.iter().any(|x| x.is_negative()) {
        return Err(Error::InvalidParameter("negative entry in length vector".into()));
    }
    let sum: Rat = v.iter().sum();
    if sum.is_zero() {
        return Err(Error::Degenerate("zero length vector".into()));
    }
    Ok(ProjectivePoint { coords: v.iter().map(|x| x / &sum).collect() })
}

/// Sup-norm distance on the sum-1 chart.
pub fn proj_distance(u: &ProjectivePoint, v: &ProjectivePoint) -> Result<Rat> {
    if u.len() != v.len() {
        return Err(Error::IndexMismatch(u.len(), v.len()));
    }
    Ok(u.coords.iter().zip(&v.coords).map(|(a, b)| (a - b).abs()).max().unwrap_or_else(Rat::zero))
}

/// Encloses `max_j |v_j − c_j|` over all choices `c_j ∈ coords[j]`.
pub fn distance_to_enclosure(v: &ProjectivePoint, coords: &[RatInterval]) -> Result<RatInterval> {
    if v.len() != coords.len() {
        return Err(Error::IndexMismatch(v.len(), coords.len()));
    }
    let mut lo = Rat::zero();
    let mut hi = Rat::zero();
    for (x, c) in v.coords.iter().zip(coords) {
        lo = lo.max(c.distance_to(x));
        hi = hi.max((x - c.lo()).abs().max((x - c.hi()).abs()));
    }
    Ok(RatInterval::new(lo, hi))
}

/// Best parameter found on the segment and a certified enclosure of the
/// minimum distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentFit {
    pub t: Rat,
    pub distance: RatInterval,
}

const GRID_STEPS: i64 = 32;
const MAX_SPLITS: usize = 20_000;

fn bits_for(precision: &Rat) -> u32 {
    // ⌈log2(1/precision)⌉ plus guard bits
    let mut bits = 0u32;
    let mut p = precision.clone();
    while p < Rat::one() {
        p *= rat(2, 1);
        bits += 1;
    }
    bits + 40
}

struct Cell {
    t0: Rat,
    t1: Rat,
    p0: Vec<RatInterval>,
    p1: Vec<RatInterval>,
    lb: Rat,
}

/// Minimizes the distance from `v` to the segment spanned by `ends`.
///
/// Each normalized coordinate is a linear-fractional, hence monotone, function
/// of `t`, so over a cell `[t0, t1]` it stays within the hull of its endpoint
/// enclosures. Cells are refined best-first until the certified lower bound is
/// within `precision` of the best value found.
pub fn distance_to_ends(v: &ProjectivePoint, ends: &SimplexEnds, precision: &Rat) -> Result<SegmentFit> {
    if !precision.is_positive() {
        return Err(Error::InvalidParameter("precision must be positive".into()));
    }
    if v.len() != ends.len() {
        return Err(Error::IndexMismatch(v.len(), ends.len()));
    }
    let bits = bits_for(precision);
    let ends = SimplexEnds {
        a: ends.a.iter().map(|x| x.round_outward(bits)).collect(),
        b: ends.b.iter().map(|x| x.round_outward(bits)).collect(),
    };
    let eval = |t: &Rat| -> Result<Vec<RatInterval>> {
        Ok(ends.point(t)?.into_iter().map(|c| c.round_outward(bits)).collect())
    };
    let cell_lb = |p0: &[RatInterval], p1: &[RatInterval]| -> Rat {
        v.coords
            .iter()
            .zip(p0.iter().zip(p1))
            .map(|(x, (a, b))| a.hull(b).distance_to(x))
            .max()
            .unwrap_or_else(Rat::zero)
    };

    let mut best_t = Rat::zero();
    let mut best_hi: Option<Rat> = None;
    let consider = |t: &Rat, p: &[RatInterval], best_t: &mut Rat, best_hi: &mut Option<Rat>| -> Result<()> {
        let d = distance_to_enclosure(v, p)?;
        if best_hi.as_ref().map_or(true, |b| d.hi() < b) {
            *best_hi = Some(d.hi().clone());
            *best_t = t.clone();
        }
        Ok(())
    };

    let grid: Vec<Rat> = (0..=GRID_STEPS).map(|i| rat(i, GRID_STEPS)).collect();
    let points = grid.iter().map(&eval).collect::<Result<Vec<_>>>()?;
    for (t, p) in grid.iter().zip(&points) {
        consider(t, p, &mut best_t, &mut best_hi)?;
    }
    let mut cells: Vec<Cell> = grid
        .windows(2)
        .zip(points.windows(2))
        .map(|(t, p)| Cell { t0: t[0].clone(), t1: t[1].clone(), lb: cell_lb(&p[0], &p[1]), p0: p[0].clone(), p1: p[1].clone() })
        .collect();

    for _ in 0..MAX_SPLITS {
        let upper = best_hi.clone().expect("grid is nonempty");
        cells.retain(|c| c.lb <= upper);
        let (idx, lower) = cells
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.lb.cmp(&b.1.lb))
            .map(|(i, c)| (i, c.lb.clone()))
            .expect("the cell holding the best point survives pruning");
        if &upper - &lower <= *precision {
            return Ok(SegmentFit { t: best_t, distance: RatInterval::new(lower, upper) });
        }
        let cell = cells.swap_remove(idx);
        let tm = (&cell.t0 + &cell.t1) / rat(2, 1);
        let pm = eval(&tm)?;
        consider(&tm, &pm, &mut best_t, &mut best_hi)?;
        let left = Cell { lb: cell_lb(&cell.p0, &pm), t0: cell.t0, t1: tm.clone(), p0: cell.p0, p1: pm.clone() };
        let right = Cell { lb: cell_lb(&pm, &cell.p1), t0: tm, t1: cell.t1, p0: pm, p1: cell.p1 };
        cells.push(left);
        cells.push(right);
    }
    Err(Error::NeedsMorePrecision(format!("segment distance not resolved to {precision} after {MAX_SPLITS} splits")))
}

/// Certified distance from `v` to the segment between the projective classes
/// of `lam0` and `lam1`, as seen through `family`.
pub fn distance_to_segment(
    v: &ProjectivePoint,
    lam0: &MeasuredLamination,
    lam1: &MeasuredLamination,
    family: &[TestCurve],
    precision: &Rat,
) -> Result<SegmentFit> {
    let mut tol = precision / Rat::from_integer(BigInt::from(64 * family.len().max(1)));
    for _ in 0..8 {
        let ends = SimplexEnds::new(lam0, lam1, family, &tol)?;
        match distance_to_ends(v, &ends, precision) {
            Err(Error::NeedsMorePrecision(_)) => tol /= rat(16, 1),
            r => return r,
        }
    }
    distance_to_ends(v, &SimplexEnds::full(lam0, lam1, family)?, precision)
}

/// Model lengths of the whole family at one time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub s: Rat,
    pub k: usize,
    pub theta: Rat,
    pub terms: Vec<LengthTerms>,
    pub point: ProjectivePoint,
}

impl Sample {
    pub fn lengths(&self) -> Vec<Rat> {
        self.terms.iter().map(|t| t.total.clone()).collect()
    }

    /// `x·i(δ,γ_k) / (ℓ_δ(γ_k) + ℓ_δ(γ_{k+1}))` per curve.
    pub fn dominant_ratios(&self) -> Vec<Rat> {
        self.terms.iter().map(|t| &t.gamma_k / (&t.gamma_k + &t.gamma_k1)).collect()
    }

    /// `(x·i(δ,γ_k) + y·i(δ,γ_{k+1})) / (ℓ_δ(γ_k) + ℓ_δ(γ_{k+1}))` per curve.
    pub fn active_ratios(&self) -> Vec<Rat> {
        self.terms
            .iter()
            .map(|t| {
                let num = Rat::from_integer(t.i_k.clone()) * &t.x + Rat::from_integer(t.i_k1.clone()) * &t.y;
                num / (&t.gamma_k + &t.gamma_k1)
            })
            .collect()
    }

    /// Share of the α-term in each length.
    pub fn alpha_shares(&self) -> Vec<Rat> {
        self.terms.iter().map(|t| &t.alpha / &t.total).collect()
    }
}

pub fn sample_at(s: &Rat, sched: &GrowthSchedule, family: &[TestCurve], params: &ModelParams) -> Result<Sample> {
    if family.is_empty() {
        return Err(Error::EmptyVector);
    }
    let ctx = SampleContext::new(s, sched, params)?;
    let terms = family.iter().map(|d| ctx.terms(d, sched, params)).collect::<Result<Vec<_>>>()?;
    let point = projectivize(&terms.iter().map(|t| t.total.clone()).collect::<Vec<_>>())?;
    Ok(Sample { s: s.clone(), k: ctx.k, theta: ctx.theta, terms, point })
}

/// Upper bound for the α-term of a curve over `[t_k, t_{k+2}]`:
/// `i(δ,α)·(c₁·F₂ + 2·ln((4 + c₁)/F₁))`, as an enclosure.
///
/// Uses `f₁ ≤ c₁`, `f₂ ≤ F₂` and `w(ℓ) ≤ 2·ln((4 + ℓ)/ℓ)`.
pub fn alpha_budget(i_alpha: &BigInt, k: usize, sched: &GrowthSchedule) -> Result<RatInterval> {
    let p = sched.params();
    let c1 = p.f1.c().clone();
    let f2 = p.big_f2(k);
    let minus_two_ln_f1 = p.f_term(k)?.add_rat(&-&f2);
    let ln4c = ln_enclosure(&(rat(4, 1) + &c1), 128)?.scale(&rat(2, 1));
    Ok(ln4c.add(&minus_two_ln_f1).add_rat(&(c1 * f2)).scale(&Rat::from_integer(i_alpha.clone())))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaCheck {
    pub share: Rat,
    pub budget: RatInterval,
    /// α-term ≤ the lower end of the budget.
    pub within: bool,
}

pub fn alpha_checks(sample: &Sample, sched: &GrowthSchedule) -> Result<Vec<AlphaCheck>> {
    sample
        .terms
        .iter()
        .map(|t| {
            let budget = alpha_budget(&t.i_alpha, sample.k, sched)?;
            Ok(AlphaCheck { share: &t.alpha / &t.total, within: &t.alpha <= budget.lo(), budget })
        })
        .collect()
}

/// Full-precision ends of the simplex for the schedule's unit-weight laminations.
pub fn simplex_ends(sched: &GrowthSchedule, family: &[TestCurve]) -> Result<SimplexEnds> {
    let [l0, l1] = laminations_of(sched)?;
    SimplexEnds::full(&l0, &l1, family)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndpointRow {
    pub k: usize,
    pub s: Rat,
    pub point: ProjectivePoint,
    pub distance: RatInterval,
    pub dominant_ratios: Vec<Rat>,
    pub active_ratios: Vec<Rat>,
    pub alpha: Vec<AlphaCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndpointReport {
    pub parity: u8,
    pub target: Vec<RatInterval>,
    pub rows: Vec<EndpointRow>,
}

impl EndpointReport {
    /// Certified strict decrease of the distance over rows with `k ≥ from`.
    pub fn strictly_decreasing_from(&self, from: usize) -> bool {
        let rows: Vec<&EndpointRow> = self.rows.iter().filter(|r| r.k >= from).collect();
        rows.windows(2).all(|w| w[1].distance.hi() < w[0].distance.lo())
    }

    pub fn last(&self) -> Option<&EndpointRow> {
        self.rows.last()
    }

    /// Largest `|ratio − 1|` over curves and rows with `k ≥ from`.
    pub fn max_ratio_deviation_from(&self, from: usize) -> Rat {
        self.rows
            .iter()
            .filter(|r| r.k >= from)
            .flat_map(|r| r.dominant_ratios.iter())
            .map(|q| (q - Rat::one()).abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }
}

pub fn endpoint_row(sample: &Sample, target: &[RatInterval], sched: &GrowthSchedule) -> Result<EndpointRow> {
    Ok(EndpointRow {
        k: sample.k,
        s: sample.s.clone(),
        point: sample.point.clone(),
        distance: distance_to_enclosure(&sample.point, target)?,
        dominant_ratios: sample.dominant_ratios(),
        active_ratios: sample.active_ratios(),
        alpha: alpha_checks(sample, sched)?,
    })
}

/// Distances at the mid-times `t'_k` of one parity to `simplex_point(parity)`.
pub fn endpoint_convergence_report(
    sched: &GrowthSchedule,
    family: &[TestCurve],
    params: &ModelParams,
    parity: u8,
) -> Result<EndpointReport> {
    if parity > 1 {
        return Err(Error::InvalidParameter(format!("parity {parity}")));
    }
    let ends = simplex_ends(sched, family)?;
    let target = ends.point(&Rat::from_integer(BigInt::from(parity)))?;
    let rows = (2..=sched.kmax())
        .filter(|k| k % 2 == parity as usize)
        .map(|k| endpoint_row(&sample_at(&sched.nominal_midtime(k), sched, family, params)?, &target, sched))
        .collect::<Result<Vec<_>>>()?;
    Ok(EndpointReport { parity, target, rows })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub k: usize,
    pub s: Rat,
    pub point: ProjectivePoint,
    pub fit: SegmentFit,
    pub alpha: Vec<AlphaCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepSeries {
    pub theta: Rat,
    pub rows: Vec<SweepRow>,
}

impl SweepSeries {
    /// The sample at the largest even `k`, standing in for the limit.
    pub fn limit(&self) -> Option<&SweepRow> {
        self.rows.last()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    pub series: Vec<SweepSeries>,
}

impl SweepReport {
    /// `proj_distance` between the limits of every pair of series.
    pub fn pairwise(&self) -> Result<Vec<(usize, usize, Rat)>> {
        let mut out = Vec::new();
        for i in 0..self.series.len() {
            for j in i + 1..self.series.len() {
                let (a, b) = match (self.series[i].limit(), self.series[j].limit()) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(Error::EmptyVector),
                };
                out.push((i, j, proj_distance(&a.point, &b.point)?));
            }
        }
        Ok(out)
    }
}

pub fn sweep_row(sample: &Sample, ends: &SimplexEnds, precision: &Rat, sched: &GrowthSchedule) -> Result<SweepRow> {
    Ok(SweepRow {
        k: sample.k,
        s: sample.s.clone(),
        point: sample.point.clone(),
        fit: distance_to_ends(&sample.point, ends, precision)?,
        alpha: alpha_checks(sample, sched)?,
    })
}

/// Samples `s_k = t'_k + θ·(t'_{k+1} − t'_k)` along even `k` for each `θ`.
pub fn sweep_report(
    sched: &GrowthSchedule,
    family: &[TestCurve],
    params: &ModelParams,
    thetas: &[Rat],
    precision: &Rat,
) -> Result<SweepReport> {
    let ends = simplex_ends(sched, family)?;
    let half = sched.d() / rat(2, 1);
    let series = thetas
        .iter()
        .map(|theta| {
            if theta.is_negative() || theta >= &Rat::one() {
                return Err(Error::InvalidParameter(format!("theta {theta} outside [0, 1)")));
            }
            let rows = (2..=sched.kmax())
                .filter(|k| k % 2 == 0)
                .map(|k| {
                    let s = sched.nominal_midtime(k) + theta * &half;
                    sweep_row(&sample_at(&s, sched, family, params)?, &ends, precision, sched)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepSeries { theta: theta.clone(), rows })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { series })
}
