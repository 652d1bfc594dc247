//! Travelling-salesman cycles over small and medium point sets.
//!
//! [`tsp_exact`] is a Held-Karp bitmask DP and is the only solver whose
//! results are marked `certified_optimal`. [`tsp_heuristic`] builds a
//! nearest-neighbour tour and drives it to a 2-opt local optimum.
//!
//! No depot is added implicitly; callers that need one include it in the
//! point list.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Largest point set [`tsp_exact`] accepts.
pub const EXACT_TSP_THRESHOLD: usize = 14;

const IMPROVEMENT_EPS: f64 = 1e-12;
const NEIGHBOURS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspResult {
    /// Cyclic visit order over input indices.
    pub order: Vec<usize>,
    pub length: f64,
    pub certified_optimal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TspMode {
    Exact,
    Heuristic,
    /// Exact up to [`EXACT_TSP_THRESHOLD`] points, heuristic above.
    #[default]
    Auto,
}

impl FromStr for TspMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(TspMode::Exact),
            "heuristic" => Ok(TspMode::Heuristic),
            "auto" => Ok(TspMode::Auto),
            other => Err(Error::InvalidArgument(format!("unknown tsp mode {other:?}"))),
        }
    }
}

impl fmt::Display for TspMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TspMode::Exact => "exact",
            TspMode::Heuristic => "heuristic",
            TspMode::Auto => "auto",
        })
    }
}

/// Length of the closed cycle visiting `order`.
pub fn cycle_length(points: &[Point], order: &[usize]) -> f64 {
    match order.len() {
        0 | 1 => 0.0,
        n => (0..n).map(|i| points[order[i]].dist(&points[order[(i + 1) % n]])).sum(),
    }
}

pub fn tsp_dispatch(points: &[Point], mode: TspMode, seed: u64) -> Result<TspResult> {
    match mode {
        TspMode::Exact => tsp_exact(points),
        TspMode::Heuristic => Ok(tsp_heuristic(points, seed)),
        TspMode::Auto if points.len() <= EXACT_TSP_THRESHOLD => tsp_exact(points),
        TspMode::Auto => Ok(tsp_heuristic(points, seed)),
    }
}

/// Optimal cycle by Held-Karp. Cycles on 0, 1 or 2 points have length 0, 0
/// and twice the distance respectively.
pub fn tsp_exact(points: &[Point]) -> Result<TspResult> {
    let n = points.len();
    if n > EXACT_TSP_THRESHOLD {
        return Err(Error::ExceedsExactThreshold { size: n, limit: EXACT_TSP_THRESHOLD });
    }
    if n <= 3 {
        let order: Vec<usize> = (0..n).collect();
        let length = cycle_length(points, &order);
        return Ok(TspResult { order, length, certified_optimal: true });
    }

    // Point 0 is the fixed start; masks range over points 1..n.
    let m = n - 1;
    let full = (1usize << m) - 1;
    let d = |a: usize, b: usize| points[a].dist(&points[b]);
    let mut cost = vec![f64::INFINITY; (1 << m) * m];
    let mut parent = vec![u8::MAX; (1 << m) * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = d(0, j + 1);
    }
    for mask in 1..=full {
        for last in 0..m {
            if mask & (1 << last) == 0 {
                continue;
            }
            let here = cost[mask * m + last];
            if !here.is_finite() {
                continue;
            }
            let mut rest = full & !mask;
            while rest != 0 {
                let next = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let to = mask | (1 << next);
                let c = here + d(last + 1, next + 1);
                if c < cost[to * m + next] {
                    cost[to * m + next] = c;
                    parent[to * m + next] = last as u8;
                }
            }
        }
    }
    let (mut last, length) =
        (0..m).map(|j| (j, cost[full * m + j] + d(j + 1, 0))).min_by(|a, b| a.1.total_cmp(&b.1)).expect("m >= 3");

    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    loop {
        order.push(last + 1);
        let p = parent[mask * m + last];
        mask &= !(1 << last);
        if p == u8::MAX {
            break;
        }
        last = p as usize;
    }
    order.push(0);
    order.reverse();
    Ok(TspResult { order, length, certified_optimal: true })
}

/// Nearest-neighbour construction from point `seed % n`, then 2-opt until no
/// single move improves the tour.
pub fn tsp_heuristic(points: &[Point], seed: u64) -> TspResult {
    let n = points.len();
    if n <= 3 {
        let order: Vec<usize> = (0..n).collect();
        let length = cycle_length(points, &order);
        return TspResult { order, length, certified_optimal: false };
    }
    let start = (seed % n as u64) as usize;
    let mut tour = TwoOpt::new(points, nearest_neighbour(points, start));
    if n > 2 * NEIGHBOURS {
        tour.neighbour_descent();
    }
    while tour.full_scan_pass() {
        if n > 2 * NEIGHBOURS {
            tour.neighbour_descent();
        }
    }
    let order = tour.into_order();
    let length = cycle_length(points, &order);
    TspResult { order, length, certified_optimal: false }
}

fn nearest_neighbour(points: &[Point], start: usize) -> Vec<usize> {
    let n = points.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = start;
    visited[cur] = true;
    order.push(cur);
    for _ in 1..n {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, q) in points.iter().enumerate() {
            if !visited[j] {
                let dj = points[cur].dist_sq(q);
                if dj < best_d {
                    best_d = dj;
                    best = j;
                }
            }
        }
        visited[best] = true;
        order.push(best);
        cur = best;
    }
    order
}

/// Array-based tour supporting cyclic segment reversal.
struct TwoOpt<'a> {
    points: &'a [Point],
    tour: Vec<usize>,
    pos: Vec<usize>,
    neigh: Option<Vec<usize>>,
}

impl<'a> TwoOpt<'a> {
    fn new(points: &'a [Point], tour: Vec<usize>) -> Self {
        let mut pos = vec![0; tour.len()];
        for (i, &c) in tour.iter().enumerate() {
            pos[c] = i;
        }
        Self { points, tour, pos, neigh: None }
    }

    fn d(&self, a: usize, b: usize) -> f64 {
        let (p, q) = (self.points[a], self.points[b]);
        let (dx, dy) = (p.x - q.x, p.y - q.y);
        (dx * dx + dy * dy).sqrt()
    }

    fn succ(&self, c: usize) -> usize {
        self.tour[(self.pos[c] + 1) % self.tour.len()]
    }

    fn pred(&self, c: usize) -> usize {
        let n = self.tour.len();
        self.tour[(self.pos[c] + n - 1) % n]
    }

    /// Reverses the cyclic run of positions `from..=to`, or its complement
    /// when that is shorter; both give the same cycle.
    fn reverse(&mut self, from: usize, to: usize) {
        let n = self.tour.len();
        let len = (to + n - from) % n + 1;
        let (mut i, mut j, mut steps) =
            if 2 * len > n { ((to + 1) % n, (from + n - 1) % n, (n - len) / 2) } else { (from, to, len / 2) };
        while steps > 0 {
            self.tour.swap(i, j);
            self.pos[self.tour[i]] = i;
            self.pos[self.tour[j]] = j;
            i = (i + 1) % n;
            j = (j + n - 1) % n;
            steps -= 1;
        }
    }

    /// 2-opt restricted to near-neighbour candidate edges, with don't-look
    /// bits.
    fn neighbour_descent(&mut self) {
        let n = self.tour.len();
        let neigh = self.neigh.take().unwrap_or_else(|| neighbour_lists(self.points, NEIGHBOURS));
        let mut queue: std::collections::VecDeque<usize> = self.tour.iter().copied().collect();
        let mut queued = vec![true; n];
        while let Some(a) = queue.pop_front() {
            queued[a] = false;
            let mut improved = None;
            'dirs: for forward in [true, false] {
                let b = if forward { self.succ(a) } else { self.pred(a) };
                let dab = self.d(a, b);
                for &c in &neigh[a * NEIGHBOURS..(a + 1) * NEIGHBOURS] {
                    let dac = self.d(a, c);
                    if dac >= dab {
                        break;
                    }
                    let e = if forward { self.succ(c) } else { self.pred(c) };
                    if c == b || e == a {
                        continue;
                    }
                    let delta = dac + self.d(b, e) - dab - self.d(c, e);
                    if delta < -IMPROVEMENT_EPS {
                        if forward {
                            self.reverse(self.pos[b], self.pos[c]);
                        } else {
                            self.reverse(self.pos[c], self.pos[b]);
                        }
                        improved = Some([a, b, c, e]);
                        break 'dirs;
                    }
                }
            }
            if let Some(touched) = improved {
                for t in touched {
                    if !queued[t] {
                        queued[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        self.neigh = Some(neigh);
    }

    /// One first-improvement sweep over every pair of non-adjacent edges.
    /// Returns whether any move was applied.
    fn full_scan_pass(&mut self) -> bool {
        let n = self.tour.len();
        // edge[p] is the length of the edge leaving position p.
        let mut edge: Vec<f64> = (0..n).map(|p| self.d(self.tour[p], self.tour[(p + 1) % n])).collect();
        let mut any = false;
        for i in 0..n - 2 {
            let mut j = i + 2;
            while j < n {
                if i == 0 && j == n - 1 {
                    break;
                }
                let (a, b) = (self.tour[i], self.tour[i + 1]);
                let (c, e) = (self.tour[j], self.tour[(j + 1) % n]);
                let dac = self.d(a, c);
                let dbe = self.d(b, e);
                let delta = dac + dbe - edge[i] - edge[j];
                if delta < -IMPROVEMENT_EPS {
                    self.tour[i + 1..=j].reverse();
                    for p in i + 1..=j {
                        self.pos[self.tour[p]] = p;
                    }
                    edge[i + 1..j].reverse();
                    edge[i] = dac;
                    edge[j] = dbe;
                    any = true;
                }
                j += 1;
            }
        }
        any
    }

    fn into_order(self) -> Vec<usize> {
        self.tour
    }
}

/// Flattened `k` nearest neighbours per point, nearest first.
fn neighbour_lists(points: &[Point], k: usize) -> Vec<usize> {
    let n = points.len();
    let k = k.min(n - 1);
    let mut out = Vec::with_capacity(n * NEIGHBOURS);
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(n);
    for (i, p) in points.iter().enumerate() {
        cand.clear();
        cand.extend(points.iter().enumerate().filter(|&(j, _)| j != i).map(|(j, q)| (p.dist_sq(q), j)));
        cand.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let head = &mut cand[..k];
        head.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        out.extend(head.iter().map(|&(_, j)| j));
        // Pad so every row has NEIGHBOURS entries; the padding repeats the
        // farthest candidate and the early exit in the descent skips it.
        for _ in k..NEIGHBOURS {
            out.push(head[k - 1].1);
        }
    }
    out
}
