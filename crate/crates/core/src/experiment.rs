//! Random instances and ratio experiments.
//!
//! Instances draw terminals i.i.d. uniform in `[0,1)²` from
//! `Xoshiro256PlusPlus::seed_from_u64(seed)` (the generator state is filled
//! by SplitMix64). Each coordinate is `(next_u64 >> 11) · 2⁻⁵³`, x before y.

use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{choose_r, local_cost, lower_bound, lower_bound_with_local, upper_bound_with_local, Radius};
use crate::error::{Error, Result};
use crate::geometry::{Instance, Point};
use crate::group::SolverConfig;
use crate::itp::itp_solve;
use crate::sweep::sweep_solve;
use crate::tsp::TspMode;

/// First line of every experiment CSV.
pub const CSV_CAVEAT: &str =
    "# observational desk-scale run: ratios are against lower bounds, rows with certified=false are indicative";

pub fn unit_coordinate(rng: &mut Xoshiro256PlusPlus) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn gen_instance(n: usize, k: usize, depot: Point, seed: u64) -> Result<Instance> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let terminals = (0..n)
        .map(|_| {
            let x = unit_coordinate(&mut rng);
            let y = unit_coordinate(&mut rng);
            Point::new(x, y)
        })
        .collect();
    Instance::new(terminals, depot, k)
}

/// Capacity rule: a fixed `k`, or `k = ⌈n^α⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KRule {
    Fixed(usize),
    Power(f64),
}

impl KRule {
    /// Capacity for `n` terminals, clamped to `1..=max(n, 1)`.
    pub fn capacity(&self, n: usize) -> usize {
        let k = match *self {
            KRule::Fixed(k) => k,
            KRule::Power(alpha) => (n as f64).powf(alpha).ceil() as usize,
        };
        k.clamp(1, n.max(1))
    }
}

impl FromStr for KRule {
    type Err = Error;

    /// `7` for a fixed capacity, `n^0.5` or `sqrt` for a power rule.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad k rule {s:?}; expected an integer, `sqrt` or `n^ALPHA`"));
        if s == "sqrt" {
            return Ok(KRule::Power(0.5));
        }
        if let Some(alpha) = s.strip_prefix("n^") {
            let alpha: f64 = alpha.parse().map_err(|_| bad())?;
            if !(0.0..=1.0).contains(&alpha) {
                return Err(bad());
            }
            return Ok(KRule::Power(alpha));
        }
        let k: usize = s.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        Ok(KRule::Fixed(k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Sweep,
    Itp,
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sweep" => Ok(Algo::Sweep),
            "itp" => Ok(Algo::Itp),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm {s:?}"))),
        }
    }
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algo::Sweep => "sweep",
            Algo::Itp => "itp",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k_rule: KRule,
    pub depot: Point,
    pub m: usize,
    pub seeds: Vec<u64>,
    pub algos: Vec<Algo>,
    pub tsp_mode: TspMode,
}

impl ExperimentConfig {
    pub fn new(n: usize, k_rule: KRule, depot: Point, m: usize, seeds: Vec<u64>) -> Self {
        Self { n, k_rule, depot, m, seeds, algos: vec![Algo::Sweep, Algo::Itp], tsp_mode: TspMode::Auto }
    }
}

/// One CSV row. ITP rows report `M = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub algo: Algo,
    pub cost: f64,
    pub lb_r0: f64,
    pub lb_rstar: f64,
    pub lb_rinf: f64,
    pub best_lb: f64,
    pub ub: f64,
    pub ratio: f64,
    pub certified: bool,
}

impl ExperimentRow {
    /// Largest lower bound whose TSP part was solved exactly. `lb_rinf`
    /// never needs a TSP.
    pub fn best_certified_lb(&self) -> f64 {
        if self.certified {
            self.best_lb
        } else {
            self.lb_rinf
        }
    }

    pub fn certified_ratio(&self) -> f64 {
        ratio(self.cost, self.best_certified_lb())
    }
}

/// `cost / lb`, `+∞` for a vacuous bound and `1` for an empty instance.
pub fn ratio(cost: f64, lb: f64) -> f64 {
    if cost == 0.0 {
        1.0
    } else if lb <= 0.0 {
        f64::INFINITY
    } else {
        cost / lb
    }
}

/// Rows for one seed, in the order of `config.algos`.
pub fn run_seed(config: &ExperimentConfig, seed: u64) -> Result<Vec<ExperimentRow>> {
    if config.m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    let k = config.k_rule.capacity(config.n);
    let instance = gen_instance(config.n, k, config.depot, seed)?;
    let mode = config.tsp_mode;
    let solver = SolverConfig { tsp_mode: mode, seed };

    let local0 = local_cost(&instance, Radius::Finite(0.0), mode)?;
    let lb0 = lower_bound_with_local(&instance, Radius::Finite(0.0), local0);
    let lbs = lower_bound(&instance, Radius::Finite(choose_r(config.depot)), mode)?;
    let lbi = lower_bound(&instance, Radius::Infinite, mode)?;
    let best_lb = lb0.value.max(lbs.value).max(lbi.value);
    let certified = lb0.certified && lbs.certified && lbi.certified;

    config
        .algos
        .iter()
        .map(|&algo| {
            let (m, cost, ub) = match algo {
                Algo::Sweep => {
                    let res = sweep_solve(&instance, config.m, solver)?;
                    let factor = if res.all_exact() { 1.0 } else { 1.0 + 1.0 / config.m as f64 };
                    let ub = upper_bound_with_local(&instance, local0, config.m, factor);
                    (config.m, res.solution.total_cost, ub.value)
                }
                Algo::Itp => {
                    let res = itp_solve(&instance, solver)?;
                    let ub = upper_bound_with_local(&instance, local0, 1, 1.0);
                    (1, res.solution.total_cost, ub.value)
                }
            };
            Ok(ExperimentRow {
                seed,
                n: config.n,
                k,
                m,
                algo,
                cost,
                lb_r0: lb0.value,
                lb_rstar: lbs.value,
                lb_rinf: lbi.value,
                best_lb,
                ub,
                ratio: ratio(cost, best_lb),
                certified,
            })
        })
        .collect()
}

/// All rows, seeds in the order given, each seed's algorithms in config order.
pub fn run_ratio_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    let per_seed: Vec<Vec<ExperimentRow>> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let rows = run_seed(config, seed);
            log::info!("experiment seed {seed} done");
            rows
        })
        .collect::<Result<_>>()?;
    Ok(per_seed.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(mut out: W, rows: &[ExperimentRow]) -> Result<()> {
    writeln!(out, "{CSV_CAVEAT}").map_err(|e| Error::io("<csv output>", e))?;
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "seed",
            "n",
            "k",
            "M",
            "algo",
            "cost",
            "lb_r0",
            "lb_rstar",
            "lb_rinf",
            "best_lb",
            "ub",
            "ratio",
            "certified",
        ])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ExperimentRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_csv_file(path: &Path, rows: &[ExperimentRow]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(std::io::BufWriter::new(file), rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgoSummary {
    pub algo: Algo,
    pub runs: usize,
    pub mean_cost: f64,
    pub mean_ratio: f64,
    pub mean_certified_ratio: f64,
    pub all_certified: bool,
}

pub fn summarize(rows: &[ExperimentRow]) -> Vec<AlgoSummary> {
    let mut algos: Vec<Algo> = rows.iter().map(|r| r.algo).collect();
    algos.sort();
    algos.dedup();
    algos
        .into_iter()
        .map(|algo| {
            let sel: Vec<&ExperimentRow> = rows.iter().filter(|r| r.algo == algo).collect();
            let mean = |f: &dyn Fn(&ExperimentRow) -> f64| sel.iter().map(|r| f(r)).sum::<f64>() / sel.len() as f64;
            AlgoSummary {
                algo,
                runs: sel.len(),
                mean_cost: mean(&|r| r.cost),
                mean_ratio: mean(&|r| r.ratio),
                mean_certified_ratio: mean(&|r| r.certified_ratio()),
                all_certified: sel.iter().all(|r| r.certified),
            }
        })
        .collect()
}
