//! The sweep-partition solver: sort terminals by polar angle around the
//! depot, cut the order into consecutive blocks of `M·k`, and solve each block
//! as an independent CVRP.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{sweep_sort, Instance, Point, Solution};
use crate::group::{solve_group, GroupPath, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct GroupReport {
    /// Instance indices of the block, in sweep order.
    pub members: Vec<usize>,
    pub path: GroupPath,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub solution: Solution,
    pub groups: Vec<GroupReport>,
}

impl SweepResult {
    /// True when every block was solved to optimality.
    pub fn all_exact(&self) -> bool {
        self.groups.iter().all(|g| g.path == GroupPath::Exact)
    }
}

pub fn sweep_solve(instance: &Instance, m: usize, config: SolverConfig) -> Result<SweepResult> {
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    let order = sweep_sort(instance);
    let block = m.saturating_mul(instance.capacity);
    let solved: Vec<(Vec<usize>, Result<crate::group::GroupResult>)> = order
        .par_chunks(block)
        .map(|members| {
            let pts: Vec<Point> = members.iter().map(|&i| instance.terminals[i]).collect();
            (members.to_vec(), solve_group(&pts, instance.depot, instance.capacity, config))
        })
        .collect();

    let mut parts = Vec::with_capacity(solved.len());
    let mut groups = Vec::with_capacity(solved.len());
    for (members, res) in solved {
        let res = res?;
        let tours = res.solution.tours.iter().map(|t| t.remap(&members)).collect();
        groups.push(GroupReport { members, path: res.path, cost: res.solution.total_cost });
        parts.push(Solution::from_tours(tours));
    }
    Ok(SweepResult { solution: Solution::concat(parts), groups })
}
