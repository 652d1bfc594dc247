//! Interval enclosures of the closed-form moments.
//!
//! Mirrors `closed_form` branch by branch. When an input interval straddles a
//! branch boundary, every branch that may apply is evaluated on its part of
//! the input and the results are hulled; each branch formula is continuous,
//! so boundary points are covered from either side.

use serde::{Deserialize, Serialize};

use super::{Interval, IntervalError};
use crate::closed_form::{DepotPoint, Integrand};

/// Leg lengths below this use the monotone bound instead of `b / |a|`.
const SMALL_LEG: f64 = 1e-100;

fn sector_weight(i: Integrand) -> Interval {
    match i {
        Integrand::One => Interval::ONE,
        Integrand::Distance => Interval::ratio(2.0, 3.0),
    }
}

fn hull_opt(acc: Option<Interval>, v: Interval) -> Option<Interval> {
    Some(match acc {
        Some(a) => a.hull(v),
        None => v,
    })
}

const UNIT: Interval = Interval { lo: -1.0, hi: 1.0 };

/// Enclosure of the signed right-triangle integral.
pub fn iv_a(i: Integrand, a: Interval, b: Interval) -> Result<Interval, IntervalError> {
    let sixth = Interval::ratio(1.0, 6.0);
    match i {
        Integrand::One => Ok(a * b * 0.5),
        Integrand::Distance => {
            let radial = a * b * sixth * (a.square() + b.square()).sqrt()?;
            let abs_a = a.abs();
            let log_term = if abs_a.lo() < SMALL_LEG {
                // |a³ asinh(b/|a|)| grows with |a| and |b|, and vanishes at
                // a = 0, so it lies within ±f(max|a|, max|b|).
                let big_a = Interval::point(abs_a.hi().max(SMALL_LEG));
                let big_b = Interval::point(b.abs().hi());
                let m = big_a.cube() * sixth * big_b.checked_div(big_a)?.asinh()?;
                Interval::new(-m.hi(), m.hi())?
            } else {
                a.cube() * sixth * b.checked_div(abs_a)?.asinh()?
            };
            Ok(log_term + radial)
        }
    }
}

/// Enclosure of the unit-disk segment integral `{x <= h}`.
pub fn iv_b(i: Integrand, h: Interval) -> Result<Interval, IntervalError> {
    let w = sector_weight(i);
    let mut acc = None;
    if h.lo() < -1.0 {
        acc = hull_opt(acc, Interval::ZERO);
    }
    if h.hi() >= 1.0 {
        acc = hull_opt(acc, w * Interval::pi());
    }
    if h.lo() < 1.0 && h.hi() >= -1.0 {
        let hm = h.intersect(UNIT).expect("overlaps [-1, 1]");
        let chord = (Interval::ONE - hm.square()).sqrt()?;
        let v = w * (Interval::pi() - hm.acos()?) + iv_a(i, hm, chord)? * 2.0;
        acc = hull_opt(acc, v);
    }
    Ok(acc.expect("some branch applies"))
}

fn nonpositive_part(h: Interval) -> Option<Interval> {
    (h.lo() <= 0.0).then(|| Interval::new(h.lo(), h.hi().min(0.0)).expect("ordered"))
}

fn positive_part(h: Interval) -> Option<Interval> {
    (h.hi() > 0.0).then(|| Interval::new(h.lo().max(0.0), h.hi()).expect("ordered"))
}

/// Enclosure of the integral over `{x <= h1, y <= h2}` within the unit disk.
pub fn iv_c(i: Integrand, h1: Interval, h2: Interval) -> Result<Interval, IntervalError> {
    let w = sector_weight(i);
    let s = h1.square() + h2.square();
    let mut acc = None;

    if s.hi() > 1.0 {
        let (n1, p1) = (nonpositive_part(h1), positive_part(h1));
        let (n2, p2) = (nonpositive_part(h2), positive_part(h2));
        if n1.is_some() && n2.is_some() {
            acc = hull_opt(acc, Interval::ZERO);
        }
        if let (Some(_), Some(n2)) = (p1, n2) {
            acc = hull_opt(acc, iv_b(i, n2)?);
        }
        if let (Some(n1), Some(_)) = (n1, p2) {
            acc = hull_opt(acc, iv_b(i, n1)?);
        }
        if let (Some(p1), Some(p2)) = (p1, p2) {
            acc = hull_opt(acc, iv_b(i, p1)? + iv_b(i, p2)? - w * Interval::pi());
        }
    }
    if s.lo() <= 1.0 {
        if let (Some(c1), Some(c2)) = (h1.intersect(UNIT), h2.intersect(UNIT)) {
            let r1 = (Interval::ONE - c1.square()).sqrt()?;
            let r2 = (Interval::ONE - c2.square()).sqrt()?;
            let half_pi = Interval::pi() * 0.5;
            let sector = w * 0.5 * (half_pi + c1.asin()? + c2.asin()?);
            let v = sector + iv_a(i, c1, r1)? + iv_a(i, c2, r2)? + iv_a(i, c1, c2)? + iv_a(i, c2, c1)?;
            acc = hull_opt(acc, v);
        }
    }
    Ok(acc.unwrap_or(Interval::ZERO))
}

/// Enclosure of the scaled square-disk integral with an interval radius.
pub fn iv_d(i: Integrand, a: Interval, b: Interval, r: Interval) -> Result<Interval, IntervalError> {
    if r.lo() <= 0.0 {
        return Err(IntervalError::Domain { op: "radius", lo: r.lo(), hi: r.hi() });
    }
    let x1 = (Interval::ONE - a).checked_div(r)?;
    let x0 = (-a).checked_div(r)?;
    let y1 = (Interval::ONE - b).checked_div(r)?;
    let y0 = (-b).checked_div(r)?;
    Ok(iv_c(i, x1, y1)? - iv_c(i, x1, y0)? - iv_c(i, x0, y1)? + iv_c(i, x0, y0)?)
}

/// Enclosures of `g1`, `g2`, `g3` and of the radius `(3/4) g1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GEnclosure {
    pub g1: Interval,
    pub g2: Interval,
    pub g3: Interval,
    pub r: Interval,
}

pub fn iv_g_all(o: DepotPoint) -> Result<GEnclosure, IntervalError> {
    let a = Interval::point(o.a);
    let b = Interval::point(o.b);
    let ca = Interval::ONE - a;
    let cb = Interval::ONE - b;
    let d = Integrand::Distance;
    let g1 = iv_a(d, a, b)?
        + iv_a(d, b, a)?
        + iv_a(d, b, ca)?
        + iv_a(d, ca, b)?
        + iv_a(d, ca, cb)?
        + iv_a(d, cb, ca)?
        + iv_a(d, cb, a)?
        + iv_a(d, a, cb)?;
    let r = g1 * 0.75;
    let d0 = iv_d(Integrand::One, a, b, r)?;
    let d1 = iv_d(Integrand::Distance, a, b, r)?;
    let r2 = r.square();
    let r3 = r2 * r;
    Ok(GEnclosure { g1, g2: r - r3 * d0 + r3 * d1, g3: Interval::ONE - r2 * d0, r })
}

/// Enclosure of `g_j(o)` for `j` in 1..=3.
pub fn iv_g(j: u8, o: DepotPoint) -> Result<Interval, IntervalError> {
    let e = iv_g_all(o)?;
    match j {
        1 => Ok(e.g1),
        2 => Ok(e.g2),
        3 => Ok(e.g3),
        _ => Err(IntervalError::Domain { op: "g index", lo: j as f64, hi: j as f64 }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{eval_g, fn_a, fn_b, fn_c, fn_d};

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn p(x: f64) -> Interval {
        Interval::point(x)
    }

    #[test]
    fn g1_at_centre_encloses_constant() {
        let g = iv_g(1, DepotPoint::new(0.5, 0.5)).unwrap();
        let c = (SQRT2 + (1.0 + SQRT2).ln()) / 6.0;
        assert!(g.contains(c), "{g:?}");
        assert!(g.width() <= 1e-10);
    }

    #[test]
    fn far_field_g3_contains_one() {
        for o in [DepotPoint::new(10.0, 10.0), DepotPoint::new(0.5, 1.0 + 3.0 * SQRT2)] {
            let e = iv_g_all(o).unwrap();
            assert!(e.g3.contains(1.0));
            assert!((e.g2 - e.r).contains(0.0));
        }
    }

    #[test]
    fn matches_real_evaluator() {
        let mut s = 12345u64;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let o = DepotPoint::new(-1.0 + 3.0 * next(), -1.0 + 3.0 * next());
            let e = iv_g_all(o).unwrap();
            let g = eval_g(o);
            for (iv, x) in [(e.g1, g.g1), (e.g2, g.g2), (e.g3, g.g3)] {
                assert!(iv.width() <= 1e-8);
                assert!((iv.mid() - x).abs() <= iv.width().max(4e-15), "{o:?}: {iv:?} vs {x}");
            }
        }
    }

    #[test]
    fn point_enclosures_of_building_blocks() {
        for i in Integrand::BOTH {
            for (a, b) in [(0.0, 2.0), (1.0, 1.0), (-0.3, 0.7), (0.6, -0.8), (1e-120, 0.4)] {
                assert!(iv_a(i, p(a), p(b)).unwrap().contains(fn_a(i, a, b)), "{i:?} {a} {b}");
            }
            for h in [-2.0, -1.0, -0.4, 0.0, 0.5, 1.0, 3.0] {
                assert!(
                    iv_b(i, p(h)).unwrap().contains(fn_b(i, h))
                        || (fn_b(i, h) - iv_b(i, p(h)).unwrap().mid()).abs() < 1e-15
                );
            }
            for (h1, h2) in [(2.0, 2.0), (0.0, 0.0), (-2.0, -2.0), (0.3, -0.5), (1.2, 0.4), (-0.2, 1.5), (0.9, 0.9)] {
                let v = iv_c(i, p(h1), p(h2)).unwrap();
                assert!((v.mid() - fn_c(i, h1, h2)).abs() <= v.width() + 4e-16, "{i:?} {h1} {h2}: {v:?}");
            }
            let d = iv_d(i, p(0.5), p(0.5), p(0.5)).unwrap();
            assert!((d.mid() - fn_d(i, 0.5, 0.5, 0.5).unwrap()).abs() <= d.width() + 1e-15);
        }
        assert!(iv_d(Integrand::One, p(0.5), p(0.5), Interval::new(-1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn branch_hull_at_segment_edges() {
        for i in Integrand::BOTH {
            for edge in [-1.0, 1.0] {
                let h = Interval::new(edge - 1e-9, edge + 1e-9).unwrap();
                let v = iv_b(i, h).unwrap();
                assert!(v.contains(fn_b(i, edge - 1e-9)));
                assert!(v.contains(fn_b(i, edge + 1e-9)));
                assert!(v.contains(fn_b(i, edge)));
            }
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let box_ = Interval::new(h - 1e-9, h + 1e-9).unwrap();
            let v = iv_c(i, box_, box_).unwrap();
            for (x, y) in [(h - 1e-9, h - 1e-9), (h + 1e-9, h + 1e-9), (h - 1e-9, h + 1e-9)] {
                assert!(v.contains(fn_c(i, x, y)));
            }
        }
    }

    #[test]
    fn zero_straddling_leg() {
        let a = Interval::new(-1e-6, 1e-6).unwrap();
        for b in [0.5, -2.0] {
            let v = iv_a(Integrand::Distance, a, p(b)).unwrap();
            for x in [-1e-6, -3e-7, 0.0, 5e-7, 1e-6] {
                assert!(v.contains(fn_a(Integrand::Distance, x, b)));
            }
        }
    }

    #[test]
    fn rejects_bad_index() {
        assert!(iv_g(4, DepotPoint::new(0.5, 0.5)).is_err());
    }
}
