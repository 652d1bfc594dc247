//! Points, instances, tours and the geometric helpers shared by every solver.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for length comparisons on unit-square-scale data.
pub const LENGTH_TOLERANCE: f64 = 1e-9;

/// Above this many points [`diameter`] switches from the quadratic scan to
/// convex hull plus rotating calipers.
pub const DIAMETER_SCAN_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// A unit-demand CVRP instance: terminals, one depot, vehicle capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub terminals: Vec<Point>,
    pub depot: Point,
    pub capacity: usize,
}

impl Instance {
    pub fn new(terminals: Vec<Point>, depot: Point, capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidInstance("capacity must be at least 1".into()));
        }
        if !depot.is_finite() {
            return Err(Error::InvalidInstance("depot coordinates must be finite".into()));
        }
        if let Some(i) = terminals.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInstance(format!("terminal {i} has non-finite coordinates")));
        }
        Ok(Self { terminals, depot, capacity })
    }

    pub fn len(&self) -> usize {
        self.terminals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terminals.is_empty()
    }

    pub fn depot_distance(&self, i: usize) -> f64 {
        self.depot.dist(&self.terminals[i])
    }

    /// All terminals followed by the depot.
    pub fn points_with_depot(&self) -> Vec<Point> {
        let mut pts = self.terminals.clone();
        pts.push(self.depot);
        pts
    }

    /// Parses the line-oriented text format: `n k depot_x depot_y` followed by
    /// `n` lines of `x y`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).enumerate().filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Parse { line: 1, msg: "missing header".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected `n k depot_x depot_y`, got {} fields", fields.len()),
            });
        }
        let n: usize = parse_field(fields[0], 1, "n")?;
        let k: usize = parse_field(fields[1], 1, "k")?;
        let depot = Point::new(parse_field(fields[2], 1, "depot_x")?, parse_field(fields[3], 1, "depot_y")?);
        let mut terminals = Vec::with_capacity(n);
        for (no, line) in lines.by_ref().take(n) {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 2 {
                return Err(Error::Parse { line: no + 1, msg: format!("expected `x y`, got {} fields", f.len()) });
            }
            terminals.push(Point::new(parse_field(f[0], no + 1, "x")?, parse_field(f[1], no + 1, "y")?));
        }
        if terminals.len() != n {
            return Err(Error::Parse {
                line: terminals.len() + 2,
                msg: format!("header announces {n} terminals, found {}", terminals.len()),
            });
        }
        if let Some((no, _)) = lines.next() {
            return Err(Error::Parse { line: no + 1, msg: "trailing data after terminals".into() });
        }
        Instance::new(terminals, depot, k)
    }

    /// Renders the instance in the text format read by [`Instance::parse`].
    /// Coordinates use Rust's shortest round-trip formatting.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {:?} {:?}\n", self.len(), self.capacity, self.depot.x, self.depot.y);
        for p in &self.terminals {
            out.push_str(&format!("{:?} {:?}\n", p.x, p.y));
        }
        out
    }
}

impl FromStr for Instance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Instance::parse(s)
    }
}

fn parse_field<T: FromStr>(s: &str, line: usize, name: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse { line, msg: format!("cannot parse {name} from {s:?}") })
}

/// A depot-rooted tour over terminal indices of some point list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub visit_order: Vec<usize>,
    pub length: f64,
}

impl Tour {
    /// Builds a tour and caches its closed length through `depot`.
    pub fn new(visit_order: Vec<usize>, terminals: &[Point], depot: Point) -> Self {
        let length = rooted_length(&visit_order, terminals, depot);
        Self { visit_order, length }
    }

    pub fn len(&self) -> usize {
        self.visit_order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visit_order.is_empty()
    }

    /// Re-indexes the tour through `map` (local index -> global index). The
    /// cached length is kept.
    pub fn remap(&self, map: &[usize]) -> Tour {
        Tour { visit_order: self.visit_order.iter().map(|&i| map[i]).collect(), length: self.length }
    }
}

/// Length of depot -> order[0] -> ... -> order[last] -> depot.
pub fn rooted_length(order: &[usize], terminals: &[Point], depot: Point) -> f64 {
    let (Some(&first), Some(&last)) = (order.first(), order.last()) else {
        return 0.0;
    };
    let inner: f64 = order.windows(2).map(|w| terminals[w[0]].dist(&terminals[w[1]])).sum();
    depot.dist(&terminals[first]) + inner + terminals[last].dist(&depot)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Solution {
    pub tours: Vec<Tour>,
    pub total_cost: f64,
}

impl Solution {
    pub fn from_tours(tours: Vec<Tour>) -> Self {
        let total_cost = tours.iter().map(|t| t.length).sum();
        Self { tours, total_cost }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Merges several solutions, keeping tour order.
    pub fn concat(parts: impl IntoIterator<Item = Solution>) -> Self {
        Self::from_tours(parts.into_iter().flat_map(|s| s.tours).collect())
    }

    /// Checks coverage, capacity and cached lengths against `instance`.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let n = instance.len();
        let mut seen = vec![false; n];
        for (t, tour) in self.tours.iter().enumerate() {
            if tour.is_empty() {
                return Err(Error::InvalidSolution(format!("tour {t} is empty")));
            }
            if tour.len() > instance.capacity {
                return Err(Error::InvalidSolution(format!(
                    "tour {t} visits {} terminals, capacity is {}",
                    tour.len(),
                    instance.capacity
                )));
            }
            for &v in &tour.visit_order {
                if v >= n {
                    return Err(Error::InvalidSolution(format!("tour {t} visits unknown terminal {v}")));
                }
                if seen[v] {
                    return Err(Error::InvalidSolution(format!("terminal {v} visited twice")));
                }
                seen[v] = true;
            }
            let len = rooted_length(&tour.visit_order, &instance.terminals, instance.depot);
            if !close(len, tour.length) {
                return Err(Error::InvalidSolution(format!(
                    "tour {t} caches length {} but measures {len}",
                    tour.length
                )));
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidSolution(format!("terminal {v} is not visited")));
        }
        let sum: f64 = self.tours.iter().map(|t| t.length).sum();
        if !close(sum, self.total_cost) {
            return Err(Error::InvalidSolution(format!("total cost {} differs from tour sum {sum}", self.total_cost)));
        }
        Ok(())
    }

    /// Text form: a `tours <count> cost <total>` header, then one line of
    /// space-separated terminal indices per tour.
    pub fn to_text(&self) -> String {
        let mut out = format!("tours {} cost {:?}\n", self.tours.len(), self.total_cost);
        for t in &self.tours {
            let idx: Vec<String> = t.visit_order.iter().map(usize::to_string).collect();
            out.push_str(&idx.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} tours, cost {:.6}", self.tours.len(), self.total_cost)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Polar angle of a point around the depot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarAngle {
    /// Angle in `[0, 2π)`.
    pub radians: f64,
    /// Set when the point coincides with the depot; `radians` is then 0.
    pub at_depot: bool,
}

pub fn polar_angle(p: Point, depot: Point) -> PolarAngle {
    let dx = p.x - depot.x;
    let dy = p.y - depot.y;
    if dx == 0.0 && dy == 0.0 {
        return PolarAngle { radians: 0.0, at_depot: true };
    }
    let mut a = dy.atan2(dx);
    if a < 0.0 {
        a += 2.0 * PI;
    }
    // atan2 of a tiny negative dy can round up to exactly 2π after the shift.
    if a >= 2.0 * PI {
        a = 0.0;
    }
    PolarAngle { radians: a, at_depot: false }
}

/// Terminal indices in sweep order: by polar angle, then distance to the
/// depot, then original index.
pub fn sweep_sort(instance: &Instance) -> Vec<usize> {
    let keys: Vec<(f64, f64)> =
        instance.terminals.iter().map(|&p| (polar_angle(p, instance.depot).radians, p.dist(&instance.depot))).collect();
    let mut order: Vec<usize> = (0..instance.len()).collect();
    order.sort_by(|&i, &j| keys[i].0.total_cmp(&keys[j].0).then(keys[i].1.total_cmp(&keys[j].1)).then(i.cmp(&j)));
    order
}

/// Largest pairwise distance; 0 for fewer than two points.
pub fn diameter(points: &[Point]) -> f64 {
    if points.len() <= DIAMETER_SCAN_LIMIT {
        diameter_scan(points)
    } else {
        diameter_calipers(&convex_hull(points))
    }
}

fn diameter_scan(points: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max(p.dist_sq(q));
        }
    }
    best.sqrt()
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Convex hull in counter-clockwise order (Andrew's monotone chain), without
/// collinear boundary points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Diameter of a convex polygon given in counter-clockwise order.
fn diameter_calipers(hull: &[Point]) -> f64 {
    let h = hull.len();
    if h <= 3 {
        return diameter_scan(hull);
    }
    let mut best = 0.0f64;
    let mut j = 1;
    for i in 0..h {
        let a = hull[i];
        let b = hull[(i + 1) % h];
        // Advance the antipodal pointer while the triangle area grows.
        while cross(a, b, hull[(j + 1) % h]).abs() > cross(a, b, hull[j]).abs() {
            j = (j + 1) % h;
        }
        best = best.max(a.dist_sq(&hull[j])).max(b.dist_sq(&hull[j]));
    }
    best.sqrt()
}
