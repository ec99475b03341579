//! Bounded pieces of the Farey graph: neighbor enumeration, restricted BFS
//! distances, geodesicity of curve sequences and the pivot separation test.
//!
//! Searches run on machine integers; slopes whose numerator or denominator
//! does not fit in an `i64` are rejected by the search entry points.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::curve_algebra::{farey_adjacent, Slope};
use crate::error::{Error, Result};
use crate::numeric::Rat;

/// Closed value window `[lo, hi]` with `lo = lo_n/lo_d`, `hi = hi_n/hi_d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    lo: (i64, i64),
    hi: (i64, i64),
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}/{}, {}/{}] ∪ {{1/0}}", self.lo.0, self.lo.1, self.hi.0, self.hi.1)
    }
}

impl Window {
    pub fn new(lo_n: i64, lo_d: i64, hi_n: i64, hi_d: i64) -> Result<Window> {
        if lo_d <= 0 || hi_d <= 0 {
            return Err(Error::InvalidParameter("window denominators must be positive".into()));
        }
        if (lo_n as i128) * (hi_d as i128) > (hi_n as i128) * (lo_d as i128) {
            return Err(Error::InvalidParameter("window endpoints out of order".into()));
        }
        Ok(Window { lo: (lo_n, lo_d), hi: (hi_n, hi_d) })
    }

    pub fn integers(lo: i64, hi: i64) -> Result<Window> {
        Window::new(lo, 1, hi, 1)
    }

    /// Hull of the finite values of `seq`, widened by 1 on each side.
    pub fn around(seq: &[Slope]) -> Result<Window> {
        let finite: Vec<Rat> = seq.iter().filter_map(|s| s.value()).collect();
        if finite.is_empty() {
            return Window::integers(-1, 1);
        }
        let lo: BigInt = finite.iter().min().unwrap().floor().to_integer() - 1;
        let hi: BigInt = finite.iter().max().unwrap().ceil().to_integer() + 1;
        let lo = lo.to_i64().ok_or_else(|| Error::InvalidParameter("window too large".into()))?;
        let hi = hi.to_i64().ok_or_else(|| Error::InvalidParameter("window too large".into()))?;
        Window::integers(lo, hi)
    }

    fn contains(&self, p: i64, q: i64) -> bool {
        if q == 0 {
            return true;
        }
        let (p, q) = (p as i128, q as i128);
        self.lo.0 as i128 * q <= p * self.lo.1 as i128 && p * self.hi.1 as i128 <= self.hi.0 as i128 * q
    }

    fn integer_range(&self) -> (i64, i64) {
        (self.lo.0.div_euclid(self.lo.1) + (self.lo.0.rem_euclid(self.lo.1) != 0) as i64, self.hi.0.div_euclid(self.hi.1))
    }
}

type V = (i64, i64);

fn to_small(s: &Slope) -> Result<V> {
    match (s.p().to_i64(), s.q().to_i64()) {
        (Some(p), Some(q)) => Ok((p, q)),
        _ => Err(Error::InvalidParameter(format!("slope {s} too large for graph search"))),
    }
}

fn from_small(v: V) -> Slope {
    Slope::from_i64(v.0, v.1).expect("search vertices are reduced")
}

// Solves p·s − q·r = 1; returns (s, r).
fn bezout(p: i64, q: i64) -> (i64, i64) {
    let (mut old_r, mut r) = (p as i128, q as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let k = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - k * r);
        (old_s, s) = (s, old_s - k * s);
        (old_t, t) = (t, old_t - k * t);
    }
    // old_s·p + old_t·q = old_r = ±1
    let sign = old_r.signum();
    ((old_s * sign) as i64, (-(old_t * sign)) as i64)
}

fn neighbors_small(v: V, qmax: i64, window: Option<&Window>) -> Result<Vec<V>> {
    let (p, q) = v;
    let mut out = Vec::new();
    if q == 0 {
        let w = window.ok_or(Error::UnboundedNeighbors)?;
        let (lo, hi) = w.integer_range();
        out.extend((lo..=hi).map(|n| (n, 1)));
        return Ok(out);
    }
    let (s0, r0) = bezout(p, q);
    for eps in [1i64, -1] {
        // s = eps·s0 + q·t, r = eps·r0 + p·t, with 0 ≤ s ≤ qmax.
        let base = eps * s0;
        let t_lo = (-base).div_euclid(q) + ((-base).rem_euclid(q) != 0) as i64;
        let t_hi = (qmax - base).div_euclid(q);
        for t in t_lo..=t_hi {
            let s = base + q * t;
            let r = eps * r0 + p * t;
            let w = if s == 0 { (1, 0) } else { (r, s) };
            if window.map_or(true, |win| win.contains(w.0, w.1)) {
                out.push(w);
            }
        }
    }
    out.sort_by(|a, b| from_small(*a).cmp(&from_small(*b)));
    out.dedup();
    Ok(out)
}

/// Farey neighbors of `v` with denominator ≤ `qmax`, sorted by value with
/// `1/0` last. Neighbors of `1/0` are the integers, so a window is required
/// there; for other vertices the window only filters.
pub fn neighbors_bounded(v: &Slope, qmax: u64, window: Option<&Window>) -> Result<Vec<Slope>> {
    let qmax = i64::try_from(qmax).map_err(|_| Error::InvalidParameter("qmax too large".into()))?;
    if qmax < 1 {
        return Err(Error::InvalidParameter("qmax must be ≥ 1".into()));
    }
    Ok(neighbors_small(to_small(v)?, qmax, window)?.into_iter().map(from_small).collect())
}

/// Result of a restricted shortest-path query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distance {
    Finite(u32),
    Unreachable,
}

fn admitted(v: V, qmax: i64, window: &Window) -> bool {
    v.1 == 0 || (v.1 <= qmax && window.contains(v.0, v.1))
}

/// Shortest path length between `u` and `v` in the Farey graph restricted to
/// vertices with denominator ≤ `qmax` and value in `window` (`1/0` is always
/// admitted). Bidirectional search, expanding the smaller frontier.
pub fn bfs_distance(u: &Slope, v: &Slope, qmax: u64, window: &Window) -> Result<Distance> {
    let qmax = i64::try_from(qmax).map_err(|_| Error::InvalidParameter("qmax too large".into()))?;
    let (a, b) = (to_small(u)?, to_small(v)?);
    if !admitted(a, qmax, window) || !admitted(b, qmax, window) {
        return Ok(Distance::Unreachable);
    }
    if a == b {
        return Ok(Distance::Finite(0));
    }
    let mut seen: [HashMap<V, u32>; 2] = [HashMap::from([(a, 0)]), HashMap::from([(b, 0)])];
    let mut frontier: [Vec<V>; 2] = [vec![a], vec![b]];
    let mut depth = [0u32; 2];
    loop {
        if frontier[0].is_empty() || frontier[1].is_empty() {
            return Ok(Distance::Unreachable);
        }
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        let other = 1 - side;
        let mut next = Vec::new();
        for &x in &frontier[side] {
            for y in neighbors_small(x, qmax, Some(window))? {
                if seen[side].contains_key(&y) {
                    continue;
                }
                // No meeting happened at earlier levels, so the first one found
                // closes a shortest path.
                if let Some(&d) = seen[other].get(&y) {
                    return Ok(Distance::Finite(depth[side] + 1 + d));
                }
                seen[side].insert(y, depth[side] + 1);
                next.push(y);
            }
        }
        depth[side] += 1;
        frontier[side] = next;
    }
}

/// Plain one-sided BFS, kept as an oracle for [`bfs_distance`].
pub fn bfs_distance_simple(u: &Slope, v: &Slope, qmax: u64, window: &Window) -> Result<Distance> {
    let qmax = qmax as i64;
    let (a, b) = (to_small(u)?, to_small(v)?);
    if !admitted(a, qmax, window) || !admitted(b, qmax, window) {
        return Ok(Distance::Unreachable);
    }
    let mut dist = HashMap::from([(a, 0u32)]);
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        if x == b {
            return Ok(Distance::Finite(d));
        }
        for y in neighbors_small(x, qmax, Some(window))? {
            dist.entry(y).or_insert_with(|| {
                queue.push_back(y);
                d + 1
            });
        }
    }
    Ok(Distance::Unreachable)
}

/// Outcome of [`is_geodesic_sequence`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicReport {
    pub geodesic: bool,
    /// `(i, distance from seq[0] to seq[i])` for every checked index.
    pub distances: Vec<(usize, Distance)>,
    pub qmax: u64,
    pub window: Window,
    pub failure: Option<String>,
}

/// Checks `bfs_distance(seq[0], seq[i]) = i` for every `i`.
pub fn is_geodesic_sequence(seq: &[Slope], qmax: u64, window: &Window) -> Result<GeodesicReport> {
    let mut report = GeodesicReport { geodesic: true, distances: Vec::new(), qmax, window: *window, failure: None };
    for (i, w) in seq.windows(2).enumerate() {
        if !farey_adjacent(&w[0], &w[1]) {
            report.geodesic = false;
            report.failure = Some(format!("entries {i} and {} are not adjacent", i + 1));
            return Ok(report);
        }
    }
    for i in 0..seq.len() {
        let d = bfs_distance(&seq[0], &seq[i], qmax, window)?;
        report.distances.push((i, d));
        if d != Distance::Finite(i as u32) {
            report.geodesic = false;
            report.failure = Some(match d {
                Distance::Unreachable => format!("{} unreachable from {} within the restriction", seq[i], seq[0]),
                Distance::Finite(k) => format!("distance to entry {i} is {k}"),
            });
            return Ok(report);
        }
    }
    Ok(report)
}

/// Whether `c` lies in the open arc of ℝ ∪ {∞} running upward from `a` to `b`.
pub fn in_open_arc(a: &Slope, b: &Slope, c: &Slope) -> bool {
    if a < b {
        a < c && c < b
    } else {
        c > a || c < b
    }
}

/// Pivot test on a curve sequence `seq = [γ_{−1}, γ_0, γ_1, …]`: with
/// `x = seq[i] = γ_{i−1}` and `y = seq[i+1] = γ_i`, true iff `seq[i+2]` lies in
/// the open arc between `x` and `y` that does not contain `seq[0]`.
pub fn pivot_separation(seq: &[Slope], i: usize) -> Result<bool> {
    if i < 1 || i + 2 >= seq.len() {
        return Err(Error::IndexOutOfRange { index: i, available: seq.len() });
    }
    let (o, x, y, z) = (&seq[0], &seq[i], &seq[i + 1], &seq[i + 2]);
    if x == y || o == x || o == y || z == x || z == y {
        return Err(Error::Degenerate(format!("repeated endpoints around index {i}")));
    }
    let arc = if in_open_arc(x, y, o) { (y, x) } else { (x, y) };
    Ok(in_open_arc(arc.0, arc.1, z))
}

/// Largest denominator among the slopes (for default BFS restrictions).
pub fn max_denominator(seq: &[Slope]) -> BigInt {
    seq.iter().map(|s| s.q().abs()).max().unwrap_or_default()
}
