//! Outward-rounded interval arithmetic over binary64.
//!
//! Every operation returns an interval containing the exact real result for
//! all real inputs drawn from the operand intervals. Results are computed with
//! round-to-nearest and then widened: one ulp per side for `+ - * /` (which
//! IEEE 754 rounds correctly), four ulps per side for `sqrt`, `ln`, `acos`
//! and `asin`. The transcendental widening assumes the platform libm is
//! faithfully rounded (error below one ulp).

mod gfun;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gfun::{iv_a, iv_b, iv_c, iv_d, iv_g, iv_g_all, GEnclosure};

/// Ulps of widening applied to transcendental results.
pub const TRANSCENDENTAL_ULPS: u32 = 4;

/// Largest overshoot of `[-1, 1]` that `acos`/`asin` clamp instead of
/// rejecting.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("division by an interval containing zero: [{lo}, {hi}]")]
    DivisionByZero { lo: f64, hi: f64 },
    #[error("{op} domain violated by [{lo}, {hi}]")]
    Domain { op: &'static str, lo: f64, hi: f64 },
    #[error("invalid interval bounds [{lo}, {hi}]")]
    InvalidBounds { lo: f64, hi: f64 },
}

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

fn down(mut x: f64, ulps: u32) -> f64 {
    for _ in 0..ulps {
        x = x.next_down();
    }
    x
}

fn up(mut x: f64, ulps: u32) -> f64 {
    for _ in 0..ulps {
        x = x.next_up();
    }
    x
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(IntervalError::InvalidBounds { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate interval holding exactly `x`.
    pub fn point(x: f64) -> Self {
        debug_assert!(!x.is_nan());
        Self { lo: x, hi: x }
    }

    /// Both binary64 neighbours of π.
    pub fn pi() -> Self {
        // f64::consts::PI is the nearest double below π.
        Self { lo: std::f64::consts::PI, hi: std::f64::consts::PI.next_up() }
    }

    /// Enclosure of the rational `num / den`.
    pub fn ratio(num: f64, den: f64) -> Self {
        Self::point(num).checked_div(Self::point(den)).expect("nonzero denominator")
    }

    fn widened(lo: f64, hi: f64, ulps: u32) -> Self {
        Self { lo: down(lo, ulps), hi: up(hi, ulps) }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn hull(&self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// Intersection, or `None` when disjoint.
    pub fn intersect(&self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn min(&self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.min(other.hi) }
    }

    pub fn max(&self, other: Interval) -> Interval {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn abs(&self) -> Interval {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            -*self
        } else {
            Interval { lo: 0.0, hi: (-self.lo).max(self.hi) }
        }
    }

    pub fn square(&self) -> Interval {
        let a = self.abs();
        Interval::widened(a.lo * a.lo, a.hi * a.hi, 1).max(Interval::ZERO)
    }

    pub fn cube(&self) -> Interval {
        // x³ is monotone.
        let lo = self.lo * self.lo * self.lo;
        let hi = self.hi * self.hi * self.hi;
        // Two roundings per endpoint; the relative error 2u + u² can exceed
        // two ulps by a hair.
        Interval::widened(lo, hi, 3)
    }

    pub fn checked_div(self, rhs: Interval) -> Result<Interval, IntervalError> {
        if rhs.lo <= 0.0 && rhs.hi >= 0.0 {
            return Err(IntervalError::DivisionByZero { lo: rhs.lo, hi: rhs.hi });
        }
        let c = [self.lo / rhs.lo, self.lo / rhs.hi, self.hi / rhs.lo, self.hi / rhs.hi];
        Ok(Interval::widened(min4(c), max4(c), 1))
    }

    /// Square root; a negative lower bound is clamped to zero.
    pub fn sqrt(&self) -> Result<Interval, IntervalError> {
        if self.hi < 0.0 {
            return Err(IntervalError::Domain { op: "sqrt", lo: self.lo, hi: self.hi });
        }
        let lo = self.lo.max(0.0).sqrt();
        let hi = self.hi.sqrt();
        Ok(Interval::widened(lo, hi, TRANSCENDENTAL_ULPS).max(Interval::ZERO))
    }

    pub fn ln(&self) -> Result<Interval, IntervalError> {
        if self.lo <= 0.0 {
            return Err(IntervalError::Domain { op: "ln", lo: self.lo, hi: self.hi });
        }
        Ok(Interval::widened(self.lo.ln(), self.hi.ln(), TRANSCENDENTAL_ULPS))
    }

    fn clamp_unit(&self, op: &'static str) -> Result<Interval, IntervalError> {
        if self.lo < -1.0 - CLAMP_TOLERANCE || self.hi > 1.0 + CLAMP_TOLERANCE {
            return Err(IntervalError::Domain { op, lo: self.lo, hi: self.hi });
        }
        Ok(Interval { lo: self.lo.max(-1.0), hi: self.hi.min(1.0) })
    }

    pub fn acos(&self) -> Result<Interval, IntervalError> {
        let x = self.clamp_unit("acos")?;
        // Decreasing on [-1, 1], range [0, π].
        let r = Interval::widened(x.hi.acos(), x.lo.acos(), TRANSCENDENTAL_ULPS);
        Ok(Interval { lo: r.lo.max(0.0), hi: r.hi.min(Interval::pi().hi) })
    }

    pub fn asin(&self) -> Result<Interval, IntervalError> {
        let x = self.clamp_unit("asin")?;
        let half_pi = Interval::pi().hi / 2.0;
        let r = Interval::widened(x.lo.asin(), x.hi.asin(), TRANSCENDENTAL_ULPS);
        Ok(Interval { lo: r.lo.max(-half_pi), hi: r.hi.min(half_pi) })
    }

    /// `asinh(x) = ln(x + sqrt(1 + x²))`, evaluated on the nonnegative half
    /// and extended by oddness so the sum never cancels.
    pub fn asinh(&self) -> Result<Interval, IntervalError> {
        let pos = |x: f64| -> Result<Interval, IntervalError> {
            if x == 0.0 {
                return Ok(Interval::ZERO);
            }
            let x = Interval::point(x);
            (x + (Interval::ONE + x.square()).sqrt()?).ln()
        };
        let at = |x: f64| -> Result<Interval, IntervalError> {
            if x >= 0.0 {
                pos(x)
            } else {
                pos(-x).map(|v| -v)
            }
        };
        // Monotone increasing: enclose each endpoint.
        let lo = at(self.lo)?;
        let hi = at(self.hi)?;
        Ok(Interval { lo: lo.lo, hi: hi.hi })
    }
}

fn min4(c: [f64; 4]) -> f64 {
    c[0].min(c[1]).min(c[2]).min(c[3])
}

fn max4(c: [f64; 4]) -> f64 {
    c[0].max(c[1]).max(c[2]).max(c[3])
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval::widened(self.lo + rhs.lo, self.hi + rhs.hi, 1)
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Interval) -> Interval {
        Interval::widened(self.lo - rhs.hi, self.hi - rhs.lo, 1)
    }
}

impl Mul for Interval {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        let c = [self.lo * rhs.lo, self.lo * rhs.hi, self.hi * rhs.lo, self.hi * rhs.hi];
        Interval::widened(min4(c), max4(c), 1)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;

    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn encloses(outer: Interval, lo: f64, hi: f64) -> bool {
        outer.lo() <= lo && hi <= outer.hi()
    }

    #[test]
    fn arithmetic_examples() {
        assert!(encloses(iv(1.0, 2.0) + iv(3.0, 4.0), 4.0, 6.0));
        assert!(encloses(iv(-1.0, 2.0) * iv(3.0, 3.0), -3.0, 6.0));
        assert!(encloses(iv(1.0, 2.0) - iv(3.0, 4.0), -3.0, -1.0));
        assert!(encloses(iv(1.0, 2.0).checked_div(iv(4.0, 8.0)).unwrap(), 0.125, 0.5));
        assert!(matches!(iv(1.0, 1.0).checked_div(iv(0.0, 1.0)), Err(IntervalError::DivisionByZero { .. })));
        assert!(iv(1.0, 1.0).checked_div(iv(-1.0, 1.0)).is_err());
        assert_eq!(-iv(1.0, 2.0), iv(-2.0, -1.0));
        assert_eq!(iv(-3.0, 1.0).abs(), iv(0.0, 3.0));
        assert_eq!(iv(-3.0, -1.0).abs(), iv(1.0, 3.0));
        assert_eq!(iv(0.0, 5.0).min(iv(1.0, 2.0)), iv(0.0, 2.0));
        assert_eq!(iv(0.0, 5.0).max(iv(1.0, 2.0)), iv(1.0, 5.0));
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        let tenth = Interval::ratio(1.0, 10.0);
        assert!(tenth.lo() < 0.1 || tenth.hi() > 0.1);
        assert!(tenth.width() > 0.0);
    }

    #[test]
    fn transcendental_examples() {
        let s = iv(4.0, 4.0).sqrt().unwrap();
        assert!(s.contains(2.0));
        assert!(s.width() <= 8.0 * f64::EPSILON * 2.0);
        assert!(iv(0.0, 0.0).acos().unwrap().contains(std::f64::consts::FRAC_PI_2));
        assert!(iv(1.0, 1.0).ln().unwrap().contains(0.0));
        assert!(iv(-1e-13, 4.0).sqrt().unwrap().contains(0.0));
        assert!(iv(-2.0, -1.0).sqrt().is_err());
        assert!(iv(0.0, 1.0).ln().is_err());
        assert!(iv(1.0 + 1e-13, 1.0 + 1e-13).acos().unwrap().contains(0.0));
        assert!(iv(1.0 + 1e-9, 1.0 + 1e-9).acos().is_err());
        assert!(iv(-1.1, 0.0).asin().is_err());
        let pi = Interval::pi();
        assert!(pi.lo() < pi.hi());
        assert_eq!(pi.lo().next_up(), pi.hi());
    }

    #[test]
    fn asinh_is_odd_and_tight() {
        for x in [0.0, 1e-8, 0.3, 1.0, 7.5, 1e6] {
            let p = iv(x, x).asinh().unwrap();
            let n = iv(-x, -x).asinh().unwrap();
            assert!(p.contains(x.asinh()), "{x}: {p:?}");
            assert_eq!(n, -p);
            assert!(p.width() < 1e-14 * (1.0 + x.asinh()));
        }
        let straddle = iv(-0.5, 2.0).asinh().unwrap();
        assert!(straddle.contains((-0.5f64).asinh()) && straddle.contains(2f64.asinh()));
    }
}
