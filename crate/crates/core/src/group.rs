//! CVRP on a single sweep group.
//!
//! Small groups are solved to optimality by a subset DP. Larger groups get a
//! TSP tour through the depot that is cut into capacity-sized segments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{rooted_length, Point, Solution, Tour};
use crate::tsp::{tsp_dispatch, TspMode};

/// Largest group [`cvrp_exact_small`] accepts.
pub const EXACT_GROUP_THRESHOLD: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tsp_mode: TspMode,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupPath {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupResult {
    /// Tours indexed into the group's own terminal list.
    pub solution: Solution,
    pub path: GroupPath,
    /// Whether the TSP underlying a heuristic split was solved exactly.
    pub tsp_certified: bool,
}

/// Exact CVRP for at most [`EXACT_GROUP_THRESHOLD`] terminals.
///
/// A Held-Karp pass rooted at the depot gives the best closed tour for every
/// subset of at most `k` terminals; a set-partition DP then picks the cheapest
/// cover.
pub fn cvrp_exact_small(terminals: &[Point], depot: Point, k: usize) -> Result<Solution> {
    let n = terminals.len();
    if n > EXACT_GROUP_THRESHOLD {
        return Err(Error::ExceedsExactGroupThreshold { size: n, limit: EXACT_GROUP_THRESHOLD });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("capacity must be at least 1".into()));
    }
    if n == 0 {
        return Ok(Solution::empty());
    }
    let k = k.min(n);
    let full = (1usize << n) - 1;
    let to_depot: Vec<f64> = terminals.iter().map(|t| t.dist(&depot)).collect();
    let d = |a: usize, b: usize| terminals[a].dist(&terminals[b]);

    // path[mask][last]: depot -> all of mask -> last.
    let mut path = vec![f64::INFINITY; (1 << n) * n];
    let mut parent = vec![u8::MAX; (1 << n) * n];
    for j in 0..n {
        path[(1 << j) * n + j] = to_depot[j];
    }
    for mask in 1..=full {
        let size = mask.count_ones() as usize;
        if size >= k {
            continue;
        }
        for last in 0..n {
            let here = path[mask * n + last];
            if mask & (1 << last) == 0 || !here.is_finite() {
                continue;
            }
            let mut rest = full & !mask;
            while rest != 0 {
                let next = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let to = mask | (1 << next);
                let c = here + d(last, next);
                if c < path[to * n + next] {
                    path[to * n + next] = c;
                    parent[to * n + next] = last as u8;
                }
            }
        }
    }
    let mut tour_cost = vec![f64::INFINITY; 1 << n];
    let mut tour_last = vec![0u8; 1 << n];
    for mask in 1..=full {
        if mask.count_ones() as usize > k {
            continue;
        }
        for last in 0..n {
            if mask & (1 << last) != 0 {
                let c = path[mask * n + last] + to_depot[last];
                if c < tour_cost[mask] {
                    tour_cost[mask] = c;
                    tour_last[mask] = last as u8;
                }
            }
        }
    }

    // best[mask]: cheapest cover of mask; the block holding the lowest set
    // bit is enumerated so each partition is seen once.
    let mut best = vec![f64::INFINITY; 1 << n];
    let mut choice = vec![0usize; 1 << n];
    best[0] = 0.0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask & !low;
        let mut sub = rest;
        loop {
            let block = sub | low;
            if tour_cost[block].is_finite() {
                let c = tour_cost[block] + best[mask & !block];
                if c < best[mask] {
                    best[mask] = c;
                    choice[mask] = block;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }

    let mut tours = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let block = choice[mask];
        let mut order = Vec::with_capacity(block.count_ones() as usize);
        let mut m = block;
        let mut last = tour_last[block] as usize;
        loop {
            order.push(last);
            let p = parent[m * n + last];
            m &= !(1 << last);
            if p == u8::MAX {
                break;
            }
            last = p as usize;
        }
        order.reverse();
        tours.push(Tour::new(order, terminals, depot));
        mask &= !block;
    }
    Ok(Solution::from_tours(tours))
}

/// Cuts a depot-free terminal sequence into consecutive segments of at most
/// `k`, trying every cut offset in `0..k` and keeping the cheapest. Each
/// segment is served in sequence order by its own depot-rooted tour.
pub fn split_sequence(sequence: &[usize], terminals: &[Point], depot: Point, k: usize) -> Solution {
    let m = sequence.len();
    if m == 0 {
        return Solution::empty();
    }
    let offsets = if m <= k { 1 } else { k };
    let segments_for = |offset: usize| -> Vec<&[usize]> {
        let mut segs = Vec::with_capacity(m / k + 2);
        if offset > 0 {
            segs.push(&sequence[..offset]);
        }
        segs.extend(sequence[offset..].chunks(k));
        segs
    };
    let cost_of = |segs: &[&[usize]]| -> f64 { segs.iter().map(|s| rooted_length(s, terminals, depot)).sum() };
    let mut best_offset = 0;
    let mut best_cost = f64::INFINITY;
    for offset in 0..offsets {
        let c = cost_of(&segments_for(offset));
        if c < best_cost {
            best_cost = c;
            best_offset = offset;
        }
    }
    let tours = segments_for(best_offset).into_iter().map(|s| Tour::new(s.to_vec(), terminals, depot)).collect();
    Solution::from_tours(tours)
}

/// TSP tour through the depot and the terminals, split into segments of at
/// most `k` terminals. Returns the split solution and whether the TSP was
/// solved exactly.
pub fn tour_partition(terminals: &[Point], depot: Point, k: usize, config: SolverConfig) -> Result<(Solution, bool)> {
    if terminals.is_empty() {
        return Ok((Solution::empty(), true));
    }
    let mut pts = Vec::with_capacity(terminals.len() + 1);
    pts.push(depot);
    pts.extend_from_slice(terminals);
    let tsp = tsp_dispatch(&pts, config.tsp_mode, config.seed)?;
    let at = tsp.order.iter().position(|&i| i == 0).expect("depot is on the tour");
    let sequence: Vec<usize> = tsp.order[at + 1..].iter().chain(&tsp.order[..at]).map(|&i| i - 1).collect();
    Ok((split_sequence(&sequence, terminals, depot, k), tsp.certified_optimal))
}

pub fn cvrp_group_heuristic(terminals: &[Point], depot: Point, k: usize, tsp_mode: TspMode) -> Result<Solution> {
    if k == 0 {
        return Err(Error::InvalidArgument("capacity must be at least 1".into()));
    }
    tour_partition(terminals, depot, k, SolverConfig { tsp_mode, seed: 0 }).map(|(s, _)| s)
}

/// Exact for groups up to [`EXACT_GROUP_THRESHOLD`], tour partitioning above.
pub fn solve_group(terminals: &[Point], depot: Point, k: usize, config: SolverConfig) -> Result<GroupResult> {
    if terminals.len() <= EXACT_GROUP_THRESHOLD {
        Ok(GroupResult {
            solution: cvrp_exact_small(terminals, depot, k)?,
            path: GroupPath::Exact,
            tsp_certified: true,
        })
    } else {
        if k == 0 {
            return Err(Error::InvalidArgument("capacity must be at least 1".into()));
        }
        let (solution, tsp_certified) = tour_partition(terminals, depot, k, config)?;
        Ok(GroupResult { solution, path: GroupPath::Heuristic, tsp_certified })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Instance;
    use crate::tsp::tsp_exact;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn lcg_points(n: usize, seed: u64) -> Vec<Point> {
        let mut s = seed ^ 0x5851_F42D_4C95_7F2D;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        (0..n).map(|_| p(next(), next())).collect()
    }

    fn check(sol: &Solution, terminals: &[Point], depot: Point, k: usize) {
        let inst = Instance::new(terminals.to_vec(), depot, k).unwrap();
        sol.validate(&inst).unwrap();
    }

    /// Cheapest cover by brute force: every set partition into blocks of at
    /// most `k`, each block costed by exact TSP through the depot.
    fn partition_oracle(terminals: &[Point], depot: Point, k: usize) -> f64 {
        fn rec(left: &[usize], terminals: &[Point], depot: Point, k: usize) -> f64 {
            let Some((&first, rest)) = left.split_first() else {
                return 0.0;
            };
            let mut best = f64::INFINITY;
            for pick in 0u32..(1 << rest.len()) {
                if pick.count_ones() as usize + 1 > k {
                    continue;
                }
                let mut block = vec![depot, terminals[first]];
                let mut remaining = Vec::new();
                for (b, &v) in rest.iter().enumerate() {
                    if pick & (1 << b) != 0 {
                        block.push(terminals[v]);
                    } else {
                        remaining.push(v);
                    }
                }
                let c = tsp_exact(&block).unwrap().length + rec(&remaining, terminals, depot, k);
                best = best.min(c);
            }
            best
        }
        let idx: Vec<usize> = (0..terminals.len()).collect();
        rec(&idx, terminals, depot, k)
    }

    #[test]
    fn exact_small_examples() {
        let o = p(0.0, 0.0);
        let u = [p(0.6, 0.8)];
        for k in 1..4 {
            let s = cvrp_exact_small(&u, o, k).unwrap();
            assert_eq!(s.tours.len(), 1);
            assert!((s.total_cost - 2.0).abs() < 1e-15);
        }
        let u = [p(1.0, 0.0), p(0.0, 1.0)];
        let s = cvrp_exact_small(&u, o, 1).unwrap();
        assert_eq!(s.tours.len(), 2);
        assert!((s.total_cost - 4.0).abs() < 1e-12);
        let s = cvrp_exact_small(&u, o, 2).unwrap();
        assert_eq!(s.tours.len(), 1);
        assert!((s.total_cost - (2.0 + SQRT2)).abs() < 1e-12);
        assert!((partition_oracle(&u, o, 2) - (2.0 + SQRT2)).abs() < 1e-12);
        check(&s, &u, o, 2);
    }

    #[test]
    fn exact_small_rejects_oversize() {
        let u = lcg_points(EXACT_GROUP_THRESHOLD + 1, 1);
        assert!(matches!(cvrp_exact_small(&u, p(0.5, 0.5), 3), Err(Error::ExceedsExactGroupThreshold { .. })));
        let s = cvrp_exact_small(&u[..EXACT_GROUP_THRESHOLD], p(0.5, 0.5), 12).unwrap();
        check(&s, &u[..EXACT_GROUP_THRESHOLD], p(0.5, 0.5), 12);
    }

    #[test]
    fn exact_small_matches_partition_oracle() {
        for seed in 0..40 {
            let n = 1 + (seed as usize % 7);
            let k = 1 + (seed as usize / 7) % 4;
            let u = lcg_points(n, seed);
            let depot = p(-0.5 + 2.0 * (seed as f64 / 40.0), 0.3);
            let s = cvrp_exact_small(&u, depot, k).unwrap();
            check(&s, &u, depot, k);
            let oracle = partition_oracle(&u, depot, k);
            assert!((s.total_cost - oracle).abs() < 1e-9, "seed {seed}: {} vs {oracle}", s.total_cost);
        }
    }

    #[test]
    fn heuristic_examples_and_split_bound() {
        let o = p(0.0, 0.0);
        let u = [p(0.3, 0.4)];
        let s = cvrp_group_heuristic(&u, o, 1, TspMode::Exact).unwrap();
        assert!((s.total_cost - 1.0).abs() < 1e-15);

        // |U| <= k: the split is the TSP tour itself.
        let u = lcg_points(6, 3);
        let s = cvrp_group_heuristic(&u, o, 6, TspMode::Exact).unwrap();
        let mut with_depot = vec![o];
        with_depot.extend_from_slice(&u);
        let tsp = tsp_exact(&with_depot).unwrap().length;
        assert_eq!(s.tours.len(), 1);
        assert!((s.total_cost - tsp).abs() < 1e-12);

        let cross = [p(1.0, 0.0), p(0.0, 1.0), p(-1.0, 0.0), p(0.0, -1.0)];
        let s = cvrp_group_heuristic(&cross, o, 2, TspMode::Exact).unwrap();
        check(&s, &cross, o, 2);
        let mut pts = vec![o];
        pts.extend_from_slice(&cross);
        let bound = tsp_exact(&pts).unwrap().length + 4.0;
        assert!(s.total_cost <= bound + 1e-9);
    }

    #[test]
    fn heuristic_respects_split_bound_and_exact_optimum() {
        for seed in 0..60 {
            let n = 1 + seed as usize % 12;
            let k = 1 + seed as usize % 5;
            let u = lcg_points(n, 1000 + seed);
            let depot = if seed % 2 == 0 { p(0.5, 0.5) } else { p(1.7, -0.4) };
            let h = cvrp_group_heuristic(&u, depot, k, TspMode::Exact).unwrap();
            check(&h, &u, depot, k);
            let mut pts = vec![depot];
            pts.extend_from_slice(&u);
            let tsp = tsp_exact(&pts).unwrap().length;
            let radial: f64 = u.iter().map(|v| v.dist(&depot)).sum::<f64>() * 2.0 / k as f64;
            assert!(h.total_cost <= tsp + radial + 1e-9, "seed {seed}");
            let e = cvrp_exact_small(&u, depot, k).unwrap();
            assert!(h.total_cost >= e.total_cost - 1e-9);
        }
    }

    #[test]
    fn solve_group_routes_by_size() {
        let o = p(0.5, 0.5);
        let cfg = SolverConfig::default();
        assert_eq!(solve_group(&lcg_points(3, 1), o, 2, cfg).unwrap().path, GroupPath::Exact);
        let big = lcg_points(40, 2);
        let r = solve_group(&big, o, 4, cfg).unwrap();
        assert_eq!(r.path, GroupPath::Heuristic);
        check(&r.solution, &big, o, 4);
        let empty = solve_group(&[], o, 2, cfg).unwrap();
        assert!(empty.solution.tours.is_empty());
        assert_eq!(empty.solution.total_cost, 0.0);
    }
}
