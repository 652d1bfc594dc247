//! Grid verification of the two depot-position inequalities
//!
//! * `g2(O) - (31/48) g1(O) >= 0.0025`
//! * `g3(O) - 31/48 >= 0.0096`
//!
//! over every depot `O` with `a >= 1/2`, `b >= a` and `d(O, [0,1]²) < 3√2`.
//! The remaining depots follow from the symmetries of the square. Far-field
//! depots satisfy `g2 = (3/4) g1` and `g3 = 1` exactly.
//!
//! The grid has spacing `0.002` from `(0.5, 0.5)` with indices `0..=2371`.
//! Each grid point is checked with interval enclosures. The margins are
//! Lipschitz with constants `79/48` and `3 + √2`, so a grid point clearing a
//! threshold by that constant times `√2/1000` (half the cell diagonal) covers
//! its whole cell. Grid coordinates are rounded binary64 values within `2⁻⁴⁰`
//! of the exact grid. That offset is added to the covering radius.

use std::f64::consts::SQRT_2;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::DepotPoint;
use crate::error::{Error, Result};
use crate::interval::{iv_g_all, Interval, IntervalError};

/// Largest grid index along either axis.
pub const GRID_MAX: u32 = 2371;
pub const GRID_SPACING: f64 = 0.002;
pub const GRID_ORIGIN: f64 = 0.5;
/// Points per progress report and per failure check.
pub const CHUNK: usize = 100_000;
/// Failures kept in a certificate.
pub const MAX_FAILURES: usize = 100;
/// Bound on the distance between a computed grid coordinate and the exact one.
pub const COORDINATE_ERROR: f64 = 1.0 / (1u64 << 40) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub g2: f64,
    pub g3: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { g2: 0.0025, g3: 0.0096 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetPoint {
    pub i: u32,
    pub j: u32,
    pub o: DepotPoint,
}

pub fn grid_coordinate(index: u32) -> f64 {
    GRID_ORIGIN + GRID_SPACING * index as f64
}

/// Grid points `(i, j)` with `i <= j`, both multiples of `stride`, row by row.
pub fn enumerate_net(stride: u32) -> Result<impl Iterator<Item = NetPoint>> {
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be at least 1".into()));
    }
    let step = stride as usize;
    Ok((0..=GRID_MAX).step_by(step).flat_map(move |i| {
        (i..=GRID_MAX).step_by(step).map(move |j| NetPoint {
            i,
            j,
            o: DepotPoint::new(grid_coordinate(i), grid_coordinate(j)),
        })
    }))
}

pub fn net_size(stride: u32) -> usize {
    if stride == 0 {
        return 0;
    }
    let m = (GRID_MAX / stride) as usize + 1;
    m * (m + 1) / 2
}

/// Grid point covering `o`, or `None` outside the reduced region.
pub fn covering_point(o: DepotPoint) -> Option<NetPoint> {
    if !(o.a >= GRID_ORIGIN && o.b >= o.a) || verify_far_field(o) {
        return None;
    }
    let snap = |x: f64| (((x - GRID_ORIGIN) / GRID_SPACING).round() as u32).min(GRID_MAX);
    let (i, j) = (snap(o.a), snap(o.b));
    Some(NetPoint { i, j, o: DepotPoint::new(grid_coordinate(i), grid_coordinate(j)) })
}

/// Distance from the square at least `3√2`.
pub fn verify_far_field(o: DepotPoint) -> bool {
    o.distance_to_square() >= 3.0 * SQRT_2
}

/// Rigorous far-field test used by the verifier.
fn far_field_certain(o: DepotPoint) -> bool {
    let excess = |x: f64| {
        let x = Interval::point(x);
        let below = Interval::ZERO - x;
        let above = x - Interval::ONE;
        below.max(above).max(Interval::ZERO)
    };
    let d2 = excess(o.a).square() + excess(o.b).square();
    d2.lo() >= 18.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCheck {
    pub margin2: Interval,
    pub margin3: Interval,
    pub pass: bool,
}

pub fn verify_point(o: DepotPoint, thresholds: Thresholds) -> std::result::Result<PointCheck, IntervalError> {
    let g = iv_g_all(o)?;
    let c = Interval::ratio(31.0, 48.0);
    let margin2 = g.g2 - c * g.g1;
    let margin3 = g.g3 - c;
    let pass = margin2.lo() >= thresholds.g2 && margin3.lo() >= thresholds.g3;
    Ok(PointCheck { margin2, margin3, pass })
}

/// Enclosures of `t2 - (79/48) ρ` and `t3 - (3 + √2) ρ` with
/// `ρ = √2/1000 + 2⁻⁴⁰`.
pub fn lipschitz_slacks(thresholds: Thresholds) -> std::result::Result<(Interval, Interval), IntervalError> {
    let sqrt2 = Interval::point(2.0).sqrt()?;
    let rho = sqrt2.checked_div(Interval::point(1000.0))? + Interval::point(COORDINATE_ERROR);
    let s2 = Interval::point(thresholds.g2) - Interval::ratio(79.0, 48.0) * rho;
    let s3 = Interval::point(thresholds.g3) - (Interval::point(3.0) + sqrt2) * rho;
    Ok((s2, s3))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetFailure {
    pub i: u32,
    pub j: u32,
    pub a: f64,
    pub b: f64,
    pub margin2_lo: f64,
    pub margin3_lo: f64,
    pub cause: Option<String>,
}

/// Smallest margin lower bound and the grid indices where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: f64,
    pub i: u32,
    pub j: u32,
}

impl Extremum {
    const NONE: Extremum = Extremum { value: f64::INFINITY, i: u32::MAX, j: u32::MAX };

    fn lesser(self, other: Extremum) -> Extremum {
        let key = |e: &Extremum| (e.value, e.i, e.j);
        match key(&self).partial_cmp(&key(&other)) {
            Some(std::cmp::Ordering::Greater) => other,
            _ => self,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetCertificate {
    pub stride: u32,
    pub points_checked: usize,
    pub far_field_points: usize,
    pub min_margin_g2: Extremum,
    pub min_margin_g3: Extremum,
    pub max_width: f64,
    pub thresholds: Thresholds,
    pub lipschitz_slack_g2: f64,
    pub lipschitz_slack_g3: f64,
    /// Every grid point was visited, so the cells cover the whole region.
    pub complete: bool,
    pub pass: bool,
    pub failures: Vec<NetFailure>,
    pub runtime_seconds: f64,
}

impl NetCertificate {
    /// Header line of `key=value` fields followed by one line per failure.
    pub fn to_report(&self) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "stride={} points_checked={} far_field_points={} min_margin_g2={:?} min_margin_g2_at={},{} \
             min_margin_g3={:?} min_margin_g3_at={},{} max_width={:?} threshold_g2={:?} threshold_g3={:?} \
             lipschitz_slack_g2={:?} lipschitz_slack_g3={:?} coordinate_error={:?} complete={} pass={} \
             failures={} runtime_seconds={:.3}",
            self.stride,
            self.points_checked,
            self.far_field_points,
            self.min_margin_g2.value,
            self.min_margin_g2.i,
            self.min_margin_g2.j,
            self.min_margin_g3.value,
            self.min_margin_g3.i,
            self.min_margin_g3.j,
            self.max_width,
            self.thresholds.g2,
            self.thresholds.g3,
            self.lipschitz_slack_g2,
            self.lipschitz_slack_g3,
            COORDINATE_ERROR,
            self.complete,
            self.pass,
            self.failures.len(),
            self.runtime_seconds,
        );
        out.push('\n');
        for f in &self.failures {
            let _ = write!(out, "{} {} {:?} {:?} {:?} {:?}", f.i, f.j, f.a, f.b, f.margin2_lo, f.margin3_lo);
            if let Some(cause) = &f.cause {
                let _ = write!(out, " # {cause}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_report(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_report()).map_err(|e| Error::io(path, e))
    }
}

impl fmt::Display for NetCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} points (stride {}, {} far field): min g2 margin {:.6}, min g3 margin {:.6}, slacks {:.6} / {:.6}: {}",
            self.points_checked,
            self.stride,
            self.far_field_points,
            self.min_margin_g2.value,
            self.min_margin_g3.value,
            self.lipschitz_slack_g2,
            self.lipschitz_slack_g3,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone)]
struct Tally {
    checked: usize,
    far: usize,
    min2: Extremum,
    min3: Extremum,
    max_width: f64,
    failures: Vec<NetFailure>,
}

impl Tally {
    fn empty() -> Self {
        Self { checked: 0, far: 0, min2: Extremum::NONE, min3: Extremum::NONE, max_width: 0.0, failures: Vec::new() }
    }

    fn of(p: &NetPoint, thresholds: Thresholds) -> Self {
        let mut t = Tally { checked: 1, ..Tally::empty() };
        if far_field_certain(p.o) {
            t.far = 1;
            return t;
        }
        match verify_point(p.o, thresholds) {
            Ok(c) => {
                t.min2 = Extremum { value: c.margin2.lo(), i: p.i, j: p.j };
                t.min3 = Extremum { value: c.margin3.lo(), i: p.i, j: p.j };
                t.max_width = c.margin2.width().max(c.margin3.width());
                if !c.pass {
                    t.failures.push(NetFailure {
                        i: p.i,
                        j: p.j,
                        a: p.o.a,
                        b: p.o.b,
                        margin2_lo: c.margin2.lo(),
                        margin3_lo: c.margin3.lo(),
                        cause: None,
                    });
                }
            }
            Err(e) => t.failures.push(NetFailure {
                i: p.i,
                j: p.j,
                a: p.o.a,
                b: p.o.b,
                margin2_lo: f64::NAN,
                margin3_lo: f64::NAN,
                cause: Some(e.to_string()),
            }),
        }
        t
    }

    fn merge(mut self, mut other: Tally) -> Tally {
        self.checked += other.checked;
        self.far += other.far;
        self.min2 = self.min2.lesser(other.min2);
        self.min3 = self.min3.lesser(other.min3);
        self.max_width = self.max_width.max(other.max_width);
        self.failures.append(&mut other.failures);
        self
    }
}

/// Checks every grid point at the given stride on the current rayon pool.
/// Stops after the first chunk that contains a failure.
pub fn verify_all(stride: u32, thresholds: Thresholds) -> Result<NetCertificate> {
    let start = Instant::now();
    let total = net_size(stride);
    let mut points = enumerate_net(stride)?;
    let (s2, s3) = lipschitz_slacks(thresholds)?;
    let mut tally = Tally::empty();
    loop {
        let chunk: Vec<NetPoint> = points.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let part = chunk.par_iter().map(|p| Tally::of(p, thresholds)).reduce(Tally::empty, Tally::merge);
        tally = tally.merge(part);
        log::info!("net verification: {}/{} points", tally.checked, total);
        if !tally.failures.is_empty() {
            log::warn!("net verification stopped at first failing chunk");
            break;
        }
    }
    tally.failures.sort_by_key(|f| (f.i, f.j));
    tally.failures.truncate(MAX_FAILURES);
    let pass = tally.failures.is_empty() && tally.checked == total && s2.lo() > 0.0 && s3.lo() > 0.0;
    Ok(NetCertificate {
        stride,
        points_checked: tally.checked,
        far_field_points: tally.far,
        min_margin_g2: tally.min2,
        min_margin_g3: tally.min3,
        max_width: tally.max_width,
        thresholds,
        lipschitz_slack_g2: s2.lo(),
        lipschitz_slack_g3: s3.lo(),
        complete: stride == 1 && tally.checked == total,
        pass,
        failures: tally.failures,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}
