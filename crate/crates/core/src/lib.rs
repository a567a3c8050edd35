//! Simulation and verification toolkit for Hammersley-type interacting
//! particle processes.
//!
//! * [`lineproc`]: the k-line cascade process, whose particle count after `n`
//!   steps has the law of the longest `k...21`-avoiding subsequence of a
//!   uniform random permutation (`k = 2`: the longest increasing subsequence).
//! * [`planeproc`]: three planar variants (half-plane, outside-circle and
//!   dominance-rectangle deletion).
//! * [`oracle`]: exact combinatorics (pattern containment, patience sorting,
//!   RSK shape, Greene's statistic, brute force) for verification.
//! * [`stats`], [`fitkit`]: streaming moments and scaling-law fits.
//! * [`cli`]: experiment runner, results files and reports.

pub mod cli;
pub mod fitkit;
pub mod lineproc;
pub mod oracle;
pub mod planeproc;
pub mod randstream;
pub mod stats;

pub use lineproc::{run_permutation, run_trace, LineSystem, ProcessError};
pub use oracle::{Permutation, Shape};
pub use planeproc::{Metric, PlaneModel, PlanarState, Point, Region};
pub use randstream::{StreamRng, StreamSpec};
pub use stats::MomentAccumulator;
