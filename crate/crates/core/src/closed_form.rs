//! Closed-form moments of the distance from a fixed depot to a uniform point
//! of the unit square, evaluated in plain binary64.
//!
//! * `g1(O) = E d(O, v)`
//! * `g2(O) = E min{d(O, v), R}`
//! * `g3(O) = P(d(O, v) > R)`
//!
//! with `R = (3/4) g1(O)`. The building blocks integrate `1` or
//! `sqrt(x² + y²)` over right triangles (`fn_a`), disk segments (`fn_b`),
//! disk parts cut by two half-planes (`fn_c`) and the square seen from the
//! depot at radius `R` (`fn_d`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this magnitude the first argument of `fn_a` is treated as zero.
pub const TINY_LEG: f64 = 1e-300;

/// Which integrand a moment function integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Integrand {
    /// Area: integrates `1`.
    One,
    /// Integrates the distance to the origin.
    Distance,
}

impl Integrand {
    pub const BOTH: [Integrand; 2] = [Integrand::One, Integrand::Distance];

    /// `(3 - i) / 3`: the sector weight, 1 for area and 2/3 for distance.
    fn sector_weight(self) -> f64 {
        match self {
            Integrand::One => 1.0,
            Integrand::Distance => 2.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepotPoint {
    pub a: f64,
    pub b: f64,
}

impl DepotPoint {
    pub const fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// Euclidean distance to the unit square, by coordinate clamping.
    pub fn distance_to_square(&self) -> f64 {
        let dx = self.a - self.a.clamp(0.0, 1.0);
        let dy = self.b - self.b.clamp(0.0, 1.0);
        dx.hypot(dy)
    }
}

/// Integral of the integrand over the right triangle with legs `a` (along x)
/// and `b` (along y), signed by the orientation of the legs.
pub fn fn_a(i: Integrand, a: f64, b: f64) -> f64 {
    match i {
        Integrand::One => a * b / 2.0,
        Integrand::Distance => {
            if a.abs() < TINY_LEG {
                return 0.0;
            }
            let ratio = b / a.abs();
            a * a * a / 6.0 * ratio.asinh() + a * b / 6.0 * a.hypot(b)
        }
    }
}

/// Integral over the unit-disk segment `{x <= h}`.
pub fn fn_b(i: Integrand, h: f64) -> f64 {
    let w = i.sector_weight();
    if h < -1.0 {
        0.0
    } else if h < 1.0 {
        w * (PI - h.acos()) + 2.0 * fn_a(i, h, (1.0 - h * h).max(0.0).sqrt())
    } else {
        w * PI
    }
}

/// Integral over `{x <= h1, y <= h2}` intersected with the unit disk.
pub fn fn_c(i: Integrand, h1: f64, h2: f64) -> f64 {
    let w = i.sector_weight();
    if h1 * h1 + h2 * h2 > 1.0 {
        match (h1 > 0.0, h2 > 0.0) {
            (false, false) => 0.0,
            (true, false) => fn_b(i, h2),
            (false, true) => fn_b(i, h1),
            (true, true) => fn_b(i, h1) + fn_b(i, h2) - w * PI,
        }
    } else {
        let r1 = (1.0 - h1 * h1).max(0.0).sqrt();
        let r2 = (1.0 - h2 * h2).max(0.0).sqrt();
        w / 2.0 * (PI / 2.0 + h1.asin() + h2.asin())
            + fn_a(i, h1, r1)
            + fn_a(i, h2, r2)
            + fn_a(i, h1, h2)
            + fn_a(i, h2, h1)
    }
}

/// Integral over the unit square of the integrand centred at `(a, b)` and
/// restricted to the disk of radius `radius`, scaled by `radius^-2` (area) or
/// `radius^-3` (distance).
pub fn fn_d(i: Integrand, a: f64, b: f64, radius: f64) -> Result<f64> {
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::NonPositiveRadius(radius));
    }
    let (x1, x0) = ((1.0 - a) / radius, -a / radius);
    let (y1, y0) = ((1.0 - b) / radius, -b / radius);
    let gap_x = x0.max(0.0) - x1.min(0.0);
    let gap_y = y0.max(0.0) - y1.min(0.0);
    if gap_x.max(0.0).hypot(gap_y.max(0.0)) >= 1.0 {
        return Ok(0.0);
    }
    Ok(fn_c(i, x1, y1) - fn_c(i, x1, y0) - fn_c(i, x0, y1) + fn_c(i, x0, y0))
}

/// Mean distance from `o` to a uniform point of the unit square: eight
/// right triangles meeting at `o`.
pub fn g1(o: DepotPoint) -> f64 {
    let (a, b) = (o.a, o.b);
    let d = Integrand::Distance;
    fn_a(d, a, b)
        + fn_a(d, b, a)
        + fn_a(d, b, 1.0 - a)
        + fn_a(d, 1.0 - a, b)
        + fn_a(d, 1.0 - a, 1.0 - b)
        + fn_a(d, 1.0 - b, 1.0 - a)
        + fn_a(d, 1.0 - b, a)
        + fn_a(d, a, 1.0 - b)
}

/// The clipping radius `(3/4) g1(o)`.
pub fn radius(o: DepotPoint) -> f64 {
    0.75 * g1(o)
}

/// The three moments at a depot, together with the radius used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GValues {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub r: f64,
}

pub fn eval_g(o: DepotPoint) -> GValues {
    let g1v = g1(o);
    let r = 0.75 * g1v;
    // g1 > 0 for every finite depot, so the radius is positive.
    let d0 = fn_d(Integrand::One, o.a, o.b, r).expect("positive radius");
    let d1 = fn_d(Integrand::Distance, o.a, o.b, r).expect("positive radius");
    let r2 = r * r;
    let r3 = r2 * r;
    GValues { g1: g1v, g2: r - r3 * d0 + r3 * d1, g3: 1.0 - r2 * d0, r }
}

pub fn g2(o: DepotPoint) -> f64 {
    eval_g(o).g2
}

pub fn g3(o: DepotPoint) -> f64 {
    eval_g(o).g3
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn centre_mean() -> f64 {
        (SQRT2 + (1.0 + SQRT2).ln()) / 6.0
    }

    /// Composite Gauss-Legendre over the triangle 0 <= y <= x <= 1.
    fn triangle_quadrature() -> f64 {
        let nodes = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
        let weights = [
            0.236_926_885_056_189,
            0.478_628_670_499_366,
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
        ];
        let panels = 50;
        let mut total = 0.0;
        for p in 0..panels {
            let (x0, x1) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
            for (xn, xw) in nodes.iter().zip(weights) {
                let x = 0.5 * (x1 - x0) * xn + 0.5 * (x1 + x0);
                let wx = 0.5 * (x1 - x0) * xw;
                let mut inner = 0.0;
                for q in 0..20 {
                    let (y0, y1) = (x * q as f64 / 20.0, x * (q + 1) as f64 / 20.0);
                    for (yn, yw) in nodes.iter().zip(weights) {
                        let y = 0.5 * (y1 - y0) * yn + 0.5 * (y1 + y0);
                        inner += 0.5 * (y1 - y0) * yw * (x * x + y * y).sqrt();
                    }
                }
                total += wx * inner;
            }
        }
        total
    }

    #[test]
    fn fn_a_examples() {
        assert_eq!(fn_a(Integrand::Distance, 0.0, 5.0), 0.0);
        assert_eq!(fn_a(Integrand::One, 2.0, 3.0), 3.0);
        let a11 = fn_a(Integrand::Distance, 1.0, 1.0);
        assert!((a11 - centre_mean()).abs() < 1e-15);
        let q = triangle_quadrature();
        assert!((a11 - q).abs() < 1e-10, "{a11} vs {q}");
        assert!((a11 - 0.382_597_8).abs() < 1e-7);
        // Odd in each leg.
        assert!((fn_a(Integrand::Distance, -1.0, 1.0) + a11).abs() < 1e-15);
        assert!((fn_a(Integrand::Distance, 1.0, -1.0) + a11).abs() < 1e-15);
    }

    #[test]
    fn fn_b_examples() {
        assert!((fn_b(Integrand::One, 0.0) - PI / 2.0).abs() < 1e-15);
        assert!((fn_b(Integrand::Distance, 1.0) - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!(fn_b(Integrand::One, -1.0).abs() < 1e-15);
        assert_eq!(fn_b(Integrand::One, -1.5), 0.0);
        // Continuity at h = 1 from below.
        let below = fn_b(Integrand::Distance, 1.0 - 1e-12);
        assert!((below - 2.0 * PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn fn_c_examples() {
        assert!((fn_c(Integrand::One, 2.0, 2.0) - PI).abs() < 1e-15);
        assert!((fn_c(Integrand::One, 0.0, 0.0) - PI / 4.0).abs() < 1e-15);
        assert_eq!(fn_c(Integrand::One, -2.0, -2.0), 0.0);
        assert!((fn_c(Integrand::Distance, 0.0, 0.0) - PI / 6.0).abs() < 1e-15);
        // Continuity across the unit circle.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in Integrand::BOTH {
            let inside = fn_c(i, h - 1e-13, h - 1e-13);
            let outside = fn_c(i, h + 1e-13, h + 1e-13);
            assert!((inside - outside).abs() < 1e-9);
        }
    }

    #[test]
    fn fn_d_examples() {
        assert!((fn_d(Integrand::One, 0.5, 0.5, 0.5).unwrap() - PI).abs() < 1e-14);
        assert!((fn_d(Integrand::Distance, 0.5, 0.5, 0.5).unwrap() - 2.0 * PI / 3.0).abs() < 1e-14);
        assert_eq!(fn_d(Integrand::One, 5.0, 5.0, 1.0).unwrap(), 0.0);
        assert!(fn_d(Integrand::Distance, -3.0, 0.5, 1.0).unwrap().abs() < 1e-15);
        assert!(matches!(fn_d(Integrand::One, 0.5, 0.5, 0.0), Err(Error::NonPositiveRadius(_))));
        assert!(fn_d(Integrand::One, 0.5, 0.5, -1.0).is_err());
    }

    #[test]
    fn g_values_at_centre_and_corner() {
        let c = eval_g(DepotPoint::new(0.5, 0.5));
        assert!((c.g1 - centre_mean()).abs() < 1e-15);
        let r = 0.75 * centre_mean();
        assert!((c.r - r).abs() < 1e-15);
        assert!((c.g3 - (1.0 - PI * r * r)).abs() < 1e-14);
        assert!((c.g3 - 0.741_323).abs() < 1e-6);
        assert!((c.g2 - (r - PI * r * r * r / 3.0)).abs() < 1e-14);
        assert!((c.g2 - 0.262_206).abs() < 1e-6);

        let corner = g1(DepotPoint::new(0.0, 0.0));
        assert!((corner - 2.0 * centre_mean()).abs() < 1e-15);
        assert!((radius(DepotPoint::new(0.0, 0.0)) - 0.573_9).abs() < 1e-4);
    }

    #[test]
    fn far_field_identities() {
        for o in
            [DepotPoint::new(10.0, 10.0), DepotPoint::new(1.0 + 3.0 * SQRT2 + 1e-9, 0.5), DepotPoint::new(-6.0, 0.2)]
        {
            let g = eval_g(o);
            assert!((g.g2 - 0.75 * g.g1).abs() < 1e-12);
            assert_eq!(g.g3, 1.0);
        }
    }

    #[test]
    fn square_symmetries() {
        type Map = fn(f64, f64) -> (f64, f64);
        let maps: [Map; 8] = [
            |a, b| (a, b),
            |a, b| (b, a),
            |a, b| (1.0 - a, b),
            |a, b| (a, 1.0 - b),
            |a, b| (1.0 - a, 1.0 - b),
            |a, b| (b, 1.0 - a),
            |a, b| (1.0 - b, a),
            |a, b| (1.0 - b, 1.0 - a),
        ];
        for (a, b) in [(0.13, 0.77), (-0.6, 1.4), (1.9, 0.5), (0.5, 0.5), (2.5, -0.25)] {
            let base = eval_g(DepotPoint::new(a, b));
            for m in maps {
                let (x, y) = m(a, b);
                let g = eval_g(DepotPoint::new(x, y));
                assert!((g.g1 - base.g1).abs() < 1e-12);
                assert!((g.g2 - base.g2).abs() < 1e-12);
                assert!((g.g3 - base.g3).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn disk_measure_matches_direct_geometry() {
        // A disk touching only the left edge: area = disk minus a segment.
        let (a, b, r) = (0.1, 0.5, 0.3);
        let d0 = fn_d(Integrand::One, a, b, r).unwrap();
        let cut = (a / r).acos();
        let segment = r * r * (cut - cut.sin() * cut.cos());
        assert!((d0 * r * r - (PI * r * r - segment)).abs() < 1e-14);
    }
}
