//! Sweep-partition routing for unit-demand Euclidean CVRP.
//!
//! Terminals are ordered by polar angle around the depot and cut into blocks
//! of `M·k` consecutive terminals. Each block is routed on its own. The crate
//! also provides
//!
//! * radial and local cost lower bounds and the matching upper bound,
//! * closed forms for depot-distance expectations over the unit square,
//! * an interval-arithmetic grid verifier for the two depot inequalities
//!   behind the ratio analysis,
//! * a random-instance experiment runner with CSV output.

pub mod bounds;
pub mod closed_form;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod group;
pub mod interval;
pub mod itp;
pub mod net;
pub mod sweep;
pub mod tsp;

pub use bounds::{BoundsReport, Certified, Radius};
pub use closed_form::{DepotPoint, GValues};
pub use error::{Error, Result};
pub use experiment::{Algo, ExperimentConfig, ExperimentRow, KRule};
pub use geometry::{Instance, Point, Solution, Tour};
pub use group::SolverConfig;
pub use interval::{Interval, IntervalError};
pub use net::{NetCertificate, Thresholds};
pub use sweep::SweepResult;
pub use tsp::{TspMode, TspResult};
