//! Iterated tour partitioning: one TSP tour over all terminals and the depot,
//! cut into capacity-sized segments.

use crate::error::Result;
use crate::geometry::{Instance, Solution};
use crate::group::{tour_partition, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct ItpResult {
    pub solution: Solution,
    pub tsp_certified: bool,
}

pub fn itp_solve(instance: &Instance, config: SolverConfig) -> Result<ItpResult> {
    let (solution, tsp_certified) = tour_partition(&instance.terminals, instance.depot, instance.capacity, config)?;
    Ok(ItpResult { solution, tsp_certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::tsp::{tsp_exact, TspMode};

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn single_terminal_is_out_and_back() {
        let inst = Instance::new(vec![p(3.0, 4.0)], p(0.0, 0.0), 1).unwrap();
        let r = itp_solve(&inst, SolverConfig::default()).unwrap();
        assert_eq!(r.solution.total_cost, 10.0);
    }

    #[test]
    fn small_capacity_cover_is_global_tour() {
        let pts = vec![p(0.1, 0.9), p(0.8, 0.2), p(0.4, 0.4), p(0.9, 0.9)];
        let inst = Instance::new(pts, p(0.5, 0.0), 4).unwrap();
        let r = itp_solve(&inst, SolverConfig::default()).unwrap();
        let tsp = tsp_exact(&inst.points_with_depot()).unwrap().length;
        assert_eq!(r.solution.tours.len(), 1);
        assert!((r.solution.total_cost - tsp).abs() < 1e-12);
        assert!(r.tsp_certified);
    }

    #[test]
    fn cross_respects_partition_bound() {
        let inst = Instance::new(vec![p(1.0, 0.0), p(0.0, 1.0), p(-1.0, 0.0), p(0.0, -1.0)], p(0.0, 0.0), 2).unwrap();
        let cfg = SolverConfig { tsp_mode: TspMode::Exact, seed: 0 };
        let r = itp_solve(&inst, cfg).unwrap();
        r.solution.validate(&inst).unwrap();
        let tsp = tsp_exact(&inst.points_with_depot()).unwrap().length;
        assert!(r.solution.total_cost <= tsp + 4.0 + 1e-9);
    }

    #[test]
    fn large_instance_uses_heuristic() {
        let pts: Vec<Point> =
            (0..300).map(|i| p(((i * 7919) % 1000) as f64 / 1000.0, ((i * 104729) % 997) as f64 / 997.0)).collect();
        let inst = Instance::new(pts, p(0.5, 0.5), 7).unwrap();
        let r = itp_solve(&inst, SolverConfig::default()).unwrap();
        r.solution.validate(&inst).unwrap();
        assert!(!r.tsp_certified);
    }
}
