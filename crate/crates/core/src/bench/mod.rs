//! Experiment harness: reference trajectories, run records, sampling-interval
//! sweeps, communication budgeting, and the standard benchmark instance.

pub mod budget;
pub mod paper;
pub mod record;
pub mod reference;
pub mod sweep;

pub use budget::{budget_allocation, BudgetAllocation};
pub use paper::{
    analytic_constants, paper_benchmark, paper_benchmark_with_omega, Benchmark, BenchmarkScale,
    BENCHMARK_OMEGA,
};
pub use record::{asymptotic_error, default_k_bar, RunRecord};
pub use reference::{optimal_trajectory, reference_tolerance, solve_instant};
pub use sweep::{fit_loglog_slope, sweep_h, sweep_to_csv, SweepCell};
