//! Max-cut and max-K-cut solvers.
//!
//! [`maxcut_gw`] solves the unit-diagonal semidefinite relaxation and rounds
//! with random hyperplanes; it is exact on bipartite graphs. [`maxkcut_local`]
//! is the multi-start single-vertex local search used for large graphs and
//! for `K > 2`. [`brute_force_maxkcut`] enumerates every labeling and serves
//! as a test oracle.

mod brute;
mod local;
mod sdp;

pub use brute::{brute_force_maxkcut, BRUTE_FORCE_LIMIT};
pub use local::{maxkcut_local, maxkcut_local_detailed, refine_partition, LocalSearchResult, RefineOutcome};
pub use sdp::{maxcut_gw, maxcut_gw_with, GwOptions, SdpSolution, GW_MAX_VERTICES};
