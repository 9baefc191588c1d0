//! Generation and analysis of high-girth regular graphs.
//!
//! The centerpiece is a random greedy process: starting from a Hamilton
//! cycle (or any supplied graph of bounded degree), repeatedly connect a
//! uniformly random pair of minimum-degree vertices whose distance is at
//! least `g - 1`, until the graph is `k`-regular (saturation) or no such
//! pair exists (freezing). Around it sit measurement tools: path and
//! safety diagnostics, a two-stage matching simulator with trajectory
//! bands, an enumeration/counting pipeline, and spectral geometry
//! reports.

pub mod census;
pub mod diagnostics;
pub mod graph;
pub mod nibble;
pub mod process;
pub mod rng;
pub mod schedule;
pub mod spectral;

pub use graph::{BfsScratch, Distance, Girth, Graph, GraphError};
pub use process::{ProcessConfig, ProcessError, ProcessState, RunRecord, StepOutcome};
pub use rng::Rng;
