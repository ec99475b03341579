//! Deterministic SVG output. Coordinates are written with six decimals.

use std::fmt::Write as _;

use fareylab_core::curve_algebra::Slope;
use fareylab_core::numeric::{parse_rat, rat_to_f64, rat_to_string};
use fareylab_core::{Error, Rat};
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::config::RenderOptions;
use crate::formats::LimitsFile;

const MARGIN: f64 = 20.0;

/// A Farey edge between two finite fractions `p/q < r/s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub left: (BigInt, BigInt),
    pub right: (BigInt, BigInt),
}

fn mediant(a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    (&a.0 + &b.0, &a.1 + &b.1)
}

fn push_edges(l: (BigInt, BigInt), r: (BigInt, BigInt), depth: u32, out: &mut Vec<Edge>) {
    out.push(Edge { left: l.clone(), right: r.clone() });
    if depth > 0 {
        let m = mediant(&l, &r);
        push_edges(l, m.clone(), depth - 1, out);
        push_edges(m, r, depth - 1, out);
    }
}

/// Stern–Brocot edges of depth at most `depth` over each unit interval in
/// `[x_min, x_max]`, in depth-first order.
pub fn stern_brocot_edges(x_min: i64, x_max: i64, depth: u32) -> Vec<Edge> {
    let mut out = Vec::new();
    for n in x_min..x_max {
        push_edges((BigInt::from(n), BigInt::one()), (BigInt::from(n + 1), BigInt::one()), depth, &mut out);
    }
    out
}

struct Frame {
    x_min: f64,
    unit: f64,
    width: f64,
    height: f64,
    base: f64,
}

impl Frame {
    fn new(o: &RenderOptions) -> Frame {
        let unit = o.unit_px as f64;
        let width = (o.x_max - o.x_min) as f64 * unit + 2.0 * MARGIN;
        let height = 0.5 * unit + 2.0 * MARGIN + 0.25 * unit;
        Frame { x_min: o.x_min as f64, unit, width, height, base: height - MARGIN }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x_min) * self.unit
    }

    fn y(&self, v: f64) -> f64 {
        self.base - v * self.unit
    }
}

fn frac_f64(p: &BigInt, q: &BigInt) -> f64 {
    rat_to_f64(&Rat::new(p.clone(), q.clone()))
}

fn in_view(o: &RenderOptions, s: &Slope) -> bool {
    match s.value() {
        Some(v) => v >= Rat::from_integer(o.x_min.into()) && v <= Rat::from_integer(o.x_max.into()),
        None => true,
    }
}

fn arc_path(f: &Frame, a: f64, b: f64) -> String {
    let (x1, x2) = (f.x(a), f.x(b));
    let r = (x2 - x1) / 2.0;
    format!("M {x1:.6} {:.6} A {r:.6} {r:.6} 0 0 1 {x2:.6} {:.6}", f.base, f.base)
}

fn fmt_stroke(r: &Rat) -> String {
    format!("{:.6}", rat_to_f64(r))
}

/// The tessellation, with the convergent path and horoballs when `overlay`
/// is given.
pub fn tessellation_svg(o: &RenderOptions, overlay: Option<&[Slope]>) -> Result<String, Error> {
    o.validate()?;
    let f = Frame::new(o);
    let mut s = String::new();
    let w = |s: &mut String, line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    w(&mut s, format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.6}\" height=\"{:.6}\" viewBox=\"0 0 {:.6} {:.6}\">",
        f.width, f.height, f.width, f.height
    ));
    w(&mut s, format!("<g class=\"tessellation\" fill=\"none\" stroke=\"#555\" stroke-width=\"{}\">", fmt_stroke(&o.stroke)));
    w(&mut s, format!("<line class=\"axis\" x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\"/>", f.x(o.x_min as f64), f.base, f.x(o.x_max as f64), f.base));
    for n in o.x_min..=o.x_max {
        let x = f.x(n as f64);
        w(&mut s, format!("<line class=\"vertical\" data-x=\"{n}/1\" x1=\"{x:.6}\" y1=\"{:.6}\" x2=\"{x:.6}\" y2=\"{:.6}\"/>", f.base, MARGIN));
    }
    for e in stern_brocot_edges(o.x_min, o.x_max, o.depth) {
        let a = frac_f64(&e.left.0, &e.left.1);
        let b = frac_f64(&e.right.0, &e.right.1);
        w(&mut s, format!(
            "<path class=\"arc\" data-from=\"{}/{}\" data-to=\"{}/{}\" d=\"{}\"/>",
            e.left.0, e.left.1, e.right.0, e.right.1, arc_path(&f, a, b)
        ));
    }
    w(&mut s, "</g>".into());
    if let Some(path) = overlay {
        if o.horoballs {
            w(&mut s, "<g class=\"horoballs\" fill=\"#9cf\" fill-opacity=\"0.35\" stroke=\"#369\" stroke-width=\"0.5\">".into());
            for c in path.iter().filter(|c| !c.is_infinity() && in_view(o, c)) {
                let q = rat_to_f64(&Rat::from_integer(c.q().clone()));
                let r = 1.0 / (2.0 * q * q);
                let x = frac_f64(c.p(), c.q());
                w(&mut s, format!(
                    "<circle class=\"horoball\" data-x=\"{}\" cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\"/>",
                    c, f.x(x), f.y(r), r * f.unit
                ));
            }
            w(&mut s, "</g>".into());
        }
        w(&mut s, format!("<g class=\"geodesic\" fill=\"none\" stroke=\"#c22\" stroke-width=\"{}\">", fmt_stroke(&o.path_stroke)));
        for pair in path.windows(2) {
            let (u, v) = (&pair[0], &pair[1]);
            if !in_view(o, u) || !in_view(o, v) {
                continue;
            }
            match (u.value(), v.value()) {
                (Some(a), Some(b)) => {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    w(&mut s, format!(
                        "<path class=\"step\" data-from=\"{u}\" data-to=\"{v}\" d=\"{}\"/>",
                        arc_path(&f, rat_to_f64(&lo), rat_to_f64(&hi))
                    ));
                }
                (Some(a), None) | (None, Some(a)) => {
                    let x = f.x(rat_to_f64(&a));
                    w(&mut s, format!(
                        "<line class=\"step\" data-from=\"{u}\" data-to=\"{v}\" x1=\"{x:.6}\" y1=\"{:.6}\" x2=\"{x:.6}\" y2=\"{:.6}\"/>",
                        f.base, MARGIN
                    ));
                }
                (None, None) => {}
            }
        }
        w(&mut s, "</g>".into());
        w(&mut s, "<g class=\"vertices\" fill=\"#c22\">".into());
        for c in path.iter().filter(|c| !c.is_infinity() && in_view(o, c)) {
            let x = frac_f64(c.p(), c.q());
            w(&mut s, format!("<circle class=\"vertex\" data-x=\"{c}\" cx=\"{:.6}\" cy=\"{:.6}\" r=\"3.000000\"/>", f.x(x), f.base));
        }
        w(&mut s, "</g>".into());
    }
    w(&mut s, "</svg>".into());
    Ok(s)
}

fn parse_interval_mid(s: &str) -> Result<Rat, Error> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    let (a, b) = t.split_once(',').ok_or_else(|| Error::Parse(format!("not an interval: {s:?}")))?;
    Ok((parse_rat(a)? + parse_rat(b)?) / Rat::from_integer(2.into()))
}

/// Scatter of the limit points in the triangle of three family coordinates,
/// renormalized to sum 1.
pub fn simplex_svg(o: &RenderOptions, lim: &LimitsFile) -> Result<String, Error> {
    let n = lim.family.len();
    let [i, j, k] = o.simplex_axes;
    if i >= n || j >= n || k >= n || i == j || j == k || i == k {
        return Err(Error::InvalidConfig(format!("simplex axes {:?} invalid for {n} curves", o.simplex_axes)));
    }
    let size = 400.0;
    let h = size * 3f64.sqrt() / 2.0;
    let corners = [(MARGIN, MARGIN + h), (MARGIN + size, MARGIN + h), (MARGIN + size / 2.0, MARGIN)];
    let place = |c: &[Rat]| -> Result<(f64, f64), Error> {
        let sel = [&c[i], &c[j], &c[k]];
        let sum: Rat = sel.iter().map(|x| (*x).clone()).sum();
        if sum.is_zero() {
            return Err(Error::Degenerate("point has no mass on the chosen axes".into()));
        }
        let b: Vec<f64> = sel.iter().map(|x| rat_to_f64(&(*x / &sum))).collect();
        Ok((
            b[0] * corners[0].0 + b[1] * corners[1].0 + b[2] * corners[2].0,
            b[0] * corners[0].1 + b[1] * corners[1].1 + b[2] * corners[2].1,
        ))
    };
    let parse_point = |p: &[String]| -> Result<Vec<Rat>, Error> {
        if p.len() != n {
            return Err(Error::IndexMismatch(p.len(), n));
        }
        p.iter().map(|x| parse_rat(x)).collect()
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.6}\" height=\"{:.6}\" viewBox=\"0 0 {:.6} {:.6}\">",
        size + 2.0 * MARGIN,
        h + 2.0 * MARGIN,
        size + 2.0 * MARGIN,
        h + 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        "<polygon class=\"simplex\" fill=\"none\" stroke=\"#555\" points=\"{:.6},{:.6} {:.6},{:.6} {:.6},{:.6}\"/>",
        corners[0].0, corners[0].1, corners[1].0, corners[1].1, corners[2].0, corners[2].1
    );
    for (c, idx) in corners.iter().zip([i, j, k]) {
        let _ = writeln!(s, "<text x=\"{:.6}\" y=\"{:.6}\" font-size=\"10\">{}</text>", c.0, c.1, lim.family[idx]);
    }
    for ep in &lim.endpoint {
        let t = ep.target.iter().map(|x| parse_interval_mid(x)).collect::<Result<Vec<_>, _>>()?;
        let (x, y) = place(&t)?;
        let _ = writeln!(s, "<rect class=\"target\" data-parity=\"{}\" x=\"{:.6}\" y=\"{:.6}\" width=\"6.000000\" height=\"6.000000\"/>", ep.parity, x - 3.0, y - 3.0);
        for r in &ep.rows {
            let (x, y) = place(&parse_point(&r.point)?)?;
            let _ = writeln!(s, "<circle class=\"endpoint\" data-parity=\"{}\" data-k=\"{}\" cx=\"{x:.6}\" cy=\"{y:.6}\" r=\"2.000000\" fill=\"#36c\"/>", ep.parity, r.k);
        }
    }
    for sw in &lim.sweep {
        for r in &sw.rows {
            let (x, y) = place(&parse_point(&r.point)?)?;
            let _ = writeln!(s, "<circle class=\"sweep\" data-theta=\"{}\" data-k=\"{}\" cx=\"{x:.6}\" cy=\"{y:.6}\" r=\"2.000000\" fill=\"#c22\"/>", sw.theta, r.k);
        }
    }
    s.push_str("</svg>\n");
    let _ = rat_to_string;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fareylab_core::contfrac::CFSide;

    /// Independent count: fractions in `[0, 1]` whose partial quotients sum to
    /// at most `depth + 1`, and the Farey-adjacent pairs among them.
    fn oracle_edge_count(depth: u32) -> usize {
        fn sb_depth(mut p: u64, mut q: u64) -> u64 {
            if p == 0 {
                return 0;
            }
            let mut sum = 0;
            while p != 0 {
                sum += q / p;
                let r = q % p;
                q = p;
                p = r;
            }
            sum - 1
        }
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 { a } else { gcd(b, a % b) }
        }
        let qmax = 1u64 << (depth + 1);
        let mut fr = vec![(0u64, 1u64)];
        for q in 1..=qmax {
            for p in 1..=q {
                if gcd(p, q) == 1 && sb_depth(p, q) <= depth as u64 {
                    fr.push((p, q));
                }
            }
        }
        let mut count = 0;
        for a in 0..fr.len() {
            for b in a + 1..fr.len() {
                let (p, q) = fr[a];
                let (r, s) = fr[b];
                if (p * s).abs_diff(q * r) == 1 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn edge_counts_match_enumeration() {
        for d in 0..=6 {
            let e = stern_brocot_edges(0, 1, d);
            assert_eq!(e.len(), (1usize << (d + 1)) - 1);
            assert_eq!(e.len(), oracle_edge_count(d), "depth {d}");
        }
        assert_eq!(stern_brocot_edges(-2, 1, 3).len(), 3 * 15);
    }

    #[test]
    fn depth_three_contains_the_first_arcs() {
        let o = RenderOptions { depth: 3, ..Default::default() };
        let svg = tessellation_svg(&o, None).unwrap();
        for (a, b) in [("0/1", "1/1"), ("0/1", "1/2"), ("1/2", "1/1"), ("1/3", "1/2"), ("2/3", "1/1")] {
            assert!(svg.contains(&format!("data-from=\"{a}\" data-to=\"{b}\"")), "{a} {b}");
        }
        assert_eq!(svg.matches("class=\"arc\"").count(), 15);
        assert!(!svg.contains("geodesic"));
    }

    #[test]
    fn overlay_visits_the_convergents() {
        let o = RenderOptions { depth: 2, ..Default::default() };
        let cf = CFSide::from_i64(&[4, 4, 4], 0).unwrap();
        let svg = tessellation_svg(&o, Some(&cf.curves())).unwrap();
        for x in ["0/1", "1/4", "4/17", "17/72"] {
            assert!(svg.contains(&format!("class=\"vertex\" data-x=\"{x}\"")), "{x}");
        }
        // 1/0 → 0/1 is the vertical step.
        assert!(svg.contains("<line class=\"step\" data-from=\"1/0\" data-to=\"0/1\""));
        let f = Frame::new(&o);
        let x = format!("cx=\"{:.6}\"", f.x(4.0 / 17.0));
        assert!(svg.contains(&x));
        assert_eq!(svg, tessellation_svg(&o, Some(&cf.curves())).unwrap());
    }

    #[test]
    fn invalid_viewport_is_rejected() {
        let o = RenderOptions { x_min: 1, x_max: 1, ..Default::default() };
        assert!(tessellation_svg(&o, None).is_err());
    }
}
