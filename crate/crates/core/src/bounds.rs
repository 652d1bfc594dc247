//! Radial and local costs, and the lower and upper bounds built from them.
//!
//! For a radius `R` and depot `O`:
//!
//! * `rad_R = (2/k) Σ_v min{d(O, v), R}`
//! * `T*_R` = optimal TSP length over `{v : d(O, v) >= R}` (no depot)
//! * `opt >= T*_R + rad_R - (3π/2) D`, with `D` the diameter of `V ∪ {O}`
//! * `sweep(M) <= f · (T*_0 + rad_∞ + (3π/2) D ⌈n / (Mk)⌉)`, with `f = 1`
//!   for exactly solved groups and `1 + 1/M` for `(1 + 1/M)`-approximate ones.
//!
//! A lower bound is only valid when `T*_R` was solved exactly; heuristic
//! tours overestimate it.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closed_form::{radius, DepotPoint};
use crate::error::{Error, Result};
use crate::geometry::{diameter, Instance, Point};
use crate::tsp::{tsp_dispatch, TspMode};

/// Clipping radius: a finite nonnegative value or +∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Radius {
    Finite(f64),
    Infinite,
}

impl Radius {
    pub fn finite(r: f64) -> Result<Self> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::InvalidArgument(format!("radius must be >= 0, got {r}")));
        }
        if r.is_infinite() {
            return Ok(Radius::Infinite);
        }
        Ok(Radius::Finite(r))
    }

    pub fn clip(&self, d: f64) -> f64 {
        match *self {
            Radius::Finite(r) => d.min(r),
            Radius::Infinite => d,
        }
    }

    /// `d >= R`; nothing reaches an infinite radius.
    pub fn reached_by(&self, d: f64) -> bool {
        match *self {
            Radius::Finite(r) => d >= r,
            Radius::Infinite => false,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Radius::Finite(r) => r,
            Radius::Infinite => f64::INFINITY,
        }
    }
}

impl FromStr for Radius {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Radius::Infinite),
            _ => s
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad radius {s:?}")))
                .and_then(Radius::finite),
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(r) => write!(f, "{r}"),
            Radius::Infinite => f.write_str("inf"),
        }
    }
}

/// A bound value with a flag saying whether every TSP behind it was exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certified {
    pub value: f64,
    pub certified: bool,
}

pub fn radial_cost(instance: &Instance, r: Radius) -> f64 {
    let sum: f64 = (0..instance.len()).map(|i| r.clip(instance.depot_distance(i))).sum();
    2.0 * sum / instance.capacity as f64
}

/// TSP length over the terminals at distance at least `r` from the depot.
pub fn local_cost(instance: &Instance, r: Radius, tsp_mode: TspMode) -> Result<Certified> {
    let far: Vec<Point> = (0..instance.len())
        .filter(|&i| r.reached_by(instance.depot_distance(i)))
        .map(|i| instance.terminals[i])
        .collect();
    if far.len() <= 1 {
        return Ok(Certified { value: 0.0, certified: true });
    }
    let tsp = tsp_dispatch(&far, tsp_mode, 0)?;
    Ok(Certified { value: tsp.length, certified: tsp.certified_optimal })
}

/// Diameter of the terminals together with the depot.
pub fn instance_diameter(instance: &Instance) -> f64 {
    diameter(&instance.points_with_depot())
}

/// `T*_R + rad_R - (3π/2) D`; `certified` doubles as the validity flag.
pub fn lower_bound(instance: &Instance, r: Radius, tsp_mode: TspMode) -> Result<Certified> {
    let local = local_cost(instance, r, tsp_mode)?;
    Ok(lower_bound_with_local(instance, r, local))
}

/// Lower bound from an already computed `T*_R`.
pub fn lower_bound_with_local(instance: &Instance, r: Radius, local: Certified) -> Certified {
    let value = local.value + radial_cost(instance, r) - 1.5 * PI * instance_diameter(instance);
    Certified { value, certified: local.certified }
}

/// `factor · (T*_0 + rad_∞ + (3π/2) D ⌈n / (Mk)⌉)`.
pub fn upper_bound_formula(instance: &Instance, m: usize, approx_factor: f64, tsp_mode: TspMode) -> Result<Certified> {
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    if approx_factor.is_nan() || approx_factor < 1.0 {
        return Err(Error::InvalidArgument(format!("approximation factor must be >= 1, got {approx_factor}")));
    }
    let local = local_cost(instance, Radius::Finite(0.0), tsp_mode)?;
    Ok(upper_bound_with_local(instance, local, m, approx_factor))
}

/// Upper bound from an already computed `T*_0`.
pub fn upper_bound_with_local(instance: &Instance, local0: Certified, m: usize, approx_factor: f64) -> Certified {
    let groups = instance.len().div_ceil(m.max(1) * instance.capacity);
    let detour = 1.5 * PI * instance_diameter(instance) * groups as f64;
    let value = approx_factor * (local0.value + radial_cost(instance, Radius::Infinite) + detour);
    Certified { value, certified: local0.certified }
}

/// `(3/4) E d(O, v)` for `v` uniform on the unit square.
pub fn choose_r(depot: Point) -> f64 {
    radius(DepotPoint::new(depot.x, depot.y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub r: Radius,
    pub rad_r: f64,
    pub local_r: f64,
    pub local_certified: bool,
    pub diameter: f64,
    pub lower: f64,
    pub lower_valid: bool,
    pub upper: f64,
    pub upper_certified: bool,
    pub m: usize,
}

impl BoundsReport {
    pub const CSV_HEADER: &'static str =
        "r,rad_r,local_r,local_certified,diameter,lower,lower_valid,upper,upper_certified,m";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{:?},{:?},{},{:?},{:?},{},{:?},{},{}",
            self.r,
            self.rad_r,
            self.local_r,
            self.local_certified,
            self.diameter,
            self.lower,
            self.lower_valid,
            self.upper,
            self.upper_certified,
            self.m
        )
    }
}

/// All bound quantities for one instance; the upper bound uses factor 1.
pub fn bounds_report(instance: &Instance, r: Radius, m: usize, tsp_mode: TspMode) -> Result<BoundsReport> {
    let local = local_cost(instance, r, tsp_mode)?;
    let rad_r = radial_cost(instance, r);
    let d = instance_diameter(instance);
    let upper = upper_bound_formula(instance, m, 1.0, tsp_mode)?;
    Ok(BoundsReport {
        r,
        rad_r,
        local_r: local.value,
        local_certified: local.certified,
        diameter: d,
        lower: local.value + rad_r - 1.5 * PI * d,
        lower_valid: local.certified,
        upper: upper.value,
        upper_certified: upper.certified,
        m,
    })
}
