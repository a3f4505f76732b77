//! Classification of heterogeneous cryo-EM projections by alternating
//! rotation synchronization and max-K-cut over a common-line consistency
//! graph.
//!
//! Modules, bottom-up:
//! - [`geometry`]: SO(3), common lines, sampling and distances.
//! - [`graph`]: weight graph, partitions, cut weight and joint objective.
//! - [`solvers`]: Goemans–Williamson max-cut, multi-start local search and
//!   an exhaustive oracle.
//! - [`sync`]: least-unsquared-deviation rotation estimation and gauge
//!   alignment.
//! - [`pipeline`]: the alternating scheme with descent guards, and precision.
//! - [`sim`]: synthetic datasets and noise sweeps.
//! - [`stats`]: Monte Carlo checks of the distance and Gaussian-maximum laws.

pub mod error;
pub mod geometry;
pub mod graph;
pub mod pipeline;
pub mod rng;
pub mod sim;
pub mod solvers;
pub mod stats;
pub mod sync;

pub use error::{Error, Result};
