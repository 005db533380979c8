//! Decentralized prediction-correction tracking of time-varying convex programs.
//!
//! A network of `n` nodes cooperatively minimizes
//!
//! ```text
//!   F(y; t) = sum_i f^i(y^i; t) + g(y; t),
//!   g(y; t) = sum_i g^{i,i}(y^i; t) + sum_{(i,j) in E} g^{i,j}(y^i, y^j; t)
//! ```
//!
//! where `y^i` is node `i`'s p-dimensional block of the stacked variable `y`.
//! As `t` advances, the minimizer `y*(t)` drifts; the methods here sample the
//! objective every `h` time units and track `y*(t_k)` with two phases per
//! sample: a prediction step that extrapolates the optimality condition
//! forward in time through a truncated Neumann-series Hessian inverse (only
//! neighbor communication), and a correction step (gradient or truncated
//! Newton) on the newly sampled objective.
//!
//! Module map:
//! - [`graph`]: network topology, random geometric generation, incidence.
//! - [`objective`]: derivative oracles and the benchmark problem families.
//! - [`splitting`]: the D - B Hessian decomposition and K-truncated solves.
//! - [`algorithms`]: prediction, correction, and the per-step method drivers.
//! - [`netsim`]: synchronous message-passing execution with exact
//!   communication accounting.
//! - [`bounds`]: closed-form error-bound predictions for the trackers.
//! - [`bench`]: reference trajectories, sweeps, budget allocation, benchmark.
//! - [`verify`]: self-check suites bridging the modules above.

pub mod algorithms;
pub mod bench;
pub mod block;
pub mod bounds;
pub mod error;
pub mod graph;
pub mod netsim;
pub mod objective;
pub mod rng;
pub mod splitting;
pub mod timefn;
pub mod verify;

pub use block::BlockVector;
pub use error::{Error, Result};
pub use graph::NetworkGraph;
