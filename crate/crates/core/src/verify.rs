//! Self-check suites: each one independently recomputes a property the
//! solver stack relies on and compares it against the production code path
//! at desk scale. Fault injection deliberately corrupts one recomputation so
//! callers can confirm the suites are able to fail.

use crate::algorithms::{correct_gradient, predict, MethodConfig, MethodState, TimeDerivativeMode, Variant};
use crate::bench::{paper_benchmark, reference_tolerance, solve_instant, Benchmark, BenchmarkScale};
use crate::block::BlockVector;
use crate::bounds::compute_constants;
use crate::error::{Error, Result};
use crate::netsim::{comm_requirements, run_decentralized};
use crate::objective::{dense_hessian, global_gradient, global_value, mixed_time_gradient};
use crate::rng;
use crate::splitting::assemble_split;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::fmt;
use std::str::FromStr;

/// Outcome of one suite.
#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub fn all_passed(results: &[SuiteResult]) -> bool {
    results.iter().all(|r| r.passed)
}

/// Deliberate corruption of one suite's independent recomputation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    None,
    /// Drops the minus sign on the time derivative inside the equivalence
    /// suite's reference recursion.
    PredictionSignFlip,
    /// Adds one round to the accounting suite's expected per-step total.
    LedgerOffByOne,
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fault::None => "none",
            Fault::PredictionSignFlip => "sign-flip",
            Fault::LedgerOffByOne => "ledger-off-by-one",
        })
    }
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Fault::None),
            "sign-flip" => Ok(Fault::PredictionSignFlip),
            "ledger-off-by-one" => Ok(Fault::LedgerOffByOne),
            other => Err(Error::Config(format!(
                "unknown fault {other:?}; expected none, sign-flip, or ledger-off-by-one"
            ))),
        }
    }
}

/// Runs every suite on the desk-scale benchmark instance derived from `seed`.
pub fn run_suites(seed: u64, fault: Fault) -> Result<Vec<SuiteResult>> {
    let bench = paper_benchmark(seed, BenchmarkScale::Desk)?;
    Ok(vec![
        suite_derivatives(&bench, seed),
        suite_hessian_truncation(&bench, seed)?,
        suite_prediction_bound(&bench)?,
        suite_network_equivalence(&bench, fault)?,
        suite_communication_accounting(&bench, fault)?,
    ])
}

fn probe_point(rng: &mut impl Rng, n: usize, p: usize, halfwidth: f64) -> BlockVector {
    BlockVector::from_block_fn(n, p, |_| {
        DVector::from_fn(p, |_, _| rng.random_range(-halfwidth..halfwidth))
    })
}

/// Analytic gradients, Hessians, and time derivatives against central finite
/// differences of the values one order below them.
fn suite_derivatives(bench: &Benchmark, seed: u64) -> SuiteResult {
    let (oracle, graph) = (&bench.oracle, &bench.graph);
    let (n, p) = (graph.n(), graph.p());
    let mut r = rng::stream(seed, "verify-derivatives");
    let (dy, dt) = (1e-5, 1e-5);
    let tol = 1e-6;
    let mut worst = 0.0f64;
    for probe in 0..3 {
        let y = probe_point(&mut r, n, p, 5.0);
        let t = 0.3 + probe as f64 * 2.7;
        let g = global_gradient(oracle, graph, &y, t);
        let h = dense_hessian(oracle, graph, &y, t);
        for idx in 0..n * p {
            let mut shift = BlockVector::zeros(n, p);
            shift.block_mut(idx / p)[idx % p] = dy;
            let y_plus = &y + &shift;
            let y_minus = &y - &shift;
            let fd = (global_value(oracle, graph, &y_plus, t)
                - global_value(oracle, graph, &y_minus, t))
                / (2.0 * dy);
            worst = worst.max((g.as_vector()[idx] - fd).abs() / (1.0 + fd.abs()));
            let col = (global_gradient(oracle, graph, &y_plus, t).into_vector()
                - global_gradient(oracle, graph, &y_minus, t).into_vector())
                / (2.0 * dy);
            let dev = (h.column(idx) - col).amax();
            worst = worst.max(dev / (1.0 + h.column(idx).amax()));
        }
        let td = mixed_time_gradient(oracle, graph, &y, t);
        let fd_t = (global_gradient(oracle, graph, &y, t + dt).into_vector()
            - global_gradient(oracle, graph, &y, t - dt).into_vector())
            / (2.0 * dt);
        worst = worst.max((td.into_vector() - fd_t).amax());
    }
    SuiteResult {
        name: "derivatives",
        passed: worst <= tol,
        detail: format!("max deviation from finite differences {worst:.3e} (tolerance {tol:.0e})"),
    }
}

/// Truncated-inverse quality: measured residual spectral radius against the
/// contraction power, and the approximate inverse's spectrum against its
/// closed-form cap, using the instance's analytic constants.
fn suite_hessian_truncation(bench: &Benchmark, seed: u64) -> Result<SuiteResult> {
    let (oracle, graph, c) = (&bench.oracle, &bench.graph, &bench.constants);
    let (n, p) = (graph.n(), graph.p());
    let mut r = rng::stream(seed, "verify-truncation");
    let y = probe_point(&mut r, n, p, 5.0);
    let t = 1.1;
    let split = assemble_split(oracle, graph, &y, t)?;
    let varrho = split.splitting_contraction();
    let varrho_cap = (c.big_l / 2.0) / (c.m + c.big_l / 2.0);
    let inverse_cap = (c.m + c.big_l / 2.0) / (c.m * (c.m + c.ell / 2.0));
    let dense = dense_hessian(oracle, graph, &y, t);
    let mut worst_residual_gap = f64::NEG_INFINITY;
    let mut worst_norm_gap = f64::NEG_INFINITY;
    for k in [0usize, 1, 4] {
        let mut cols = Vec::with_capacity(n * p);
        for j in 0..n * p {
            let mut basis = BlockVector::zeros(n, p);
            basis.block_mut(j / p)[j % p] = 1.0;
            cols.push(split.truncated_solve(&basis, k).into_vector());
        }
        let approx_inv = DMatrix::from_columns(&cols);
        let residual = DMatrix::identity(n * p, n * p) - &dense * &approx_inv;
        let measured = residual.complex_eigenvalues().iter().fold(0.0f64, |a, z| a.max(z.norm()));
        worst_residual_gap = worst_residual_gap.max(measured - varrho.powi(k as i32 + 1));
        let spectrum = approx_inv.symmetric_eigenvalues().abs().max();
        worst_norm_gap = worst_norm_gap.max(spectrum - inverse_cap);
    }
    let passed = varrho <= varrho_cap + 1e-12
        && worst_residual_gap <= 1e-9
        && worst_norm_gap <= 1e-9;
    Ok(SuiteResult {
        name: "hessian-truncation",
        passed,
        detail: format!(
            "contraction {varrho:.6} <= cap {varrho_cap:.6}; residual excess {worst_residual_gap:.3e}; inverse-norm excess {worst_norm_gap:.3e}"
        ),
    })
}

/// Prediction accuracy from the exact optimum: one predicted step must land
/// within the discretization bound h*Gamma + h^2*Delta of the next optimum.
fn suite_prediction_bound(bench: &Benchmark) -> Result<SuiteResult> {
    let (oracle, graph) = (&bench.oracle, &bench.graph);
    let (h, k) = (0.1, 8);
    let report = compute_constants(&bench.constants, h, k, 0, 0.5)?;
    let bound = report.phi;
    let tol = reference_tolerance(graph.n(), graph.p());
    let config = MethodConfig::new(Variant::DpcG, h, k, 0, 0.5);
    let mut worst = 0.0f64;
    let mut start = BlockVector::zeros(graph.n(), graph.p());
    for t in [0.0, 3.4, 11.0] {
        let opt = solve_instant(oracle, graph, &start, t, tol)?;
        let state = MethodState::initial(opt.clone(), t);
        let predicted = predict(&state, oracle, graph, &config, TimeDerivativeMode::Exact)?;
        let opt_next = solve_instant(oracle, graph, &opt, t + h, tol)?;
        worst = worst.max((&predicted - &opt_next).norm());
        start = opt;
    }
    Ok(SuiteResult {
        name: "prediction-bound",
        passed: worst <= bound + 1e-9,
        detail: format!("worst one-step prediction error {worst:.3e} <= bound {bound:.3e}"),
    })
}

/// Message-passing simulation against an independent recomposition of the
/// same recursion from the primitive operations. The two must agree to
/// floating-point identity; the injectable sign flip corrupts the reference
/// side's time derivative.
fn suite_network_equivalence(bench: &Benchmark, fault: Fault) -> Result<SuiteResult> {
    let (oracle, graph) = (&bench.oracle, &bench.graph);
    let config = MethodConfig::new(Variant::DpcG, 0.2, 3, 0, 0.3);
    let steps = 8;
    let y0 = BlockVector::zeros(graph.n(), graph.p());
    let sim = run_decentralized(&config, oracle, graph, &y0, steps)?;

    let flip = fault == Fault::PredictionSignFlip;
    let mut y = y0;
    let mut t = 0.0f64;
    let mut max_dev = 0.0f64;
    for step in 0..steps {
        let t_next = t + config.h;
        let td = mixed_time_gradient(oracle, graph, &y, t);
        let dir = if flip { &td * 1.0 } else { &td * -1.0 };
        let split = assemble_split(oracle, graph, &y, t)?;
        let p = split.truncated_solve(&dir, config.k);
        let mut z = &y + &(&p * config.h);
        z = correct_gradient(&z, oracle, graph, t_next, config.gamma);
        y = z;
        t = t_next;
        max_dev = max_dev.max((&y - &sim.trajectory[step + 1]).norm());
    }
    Ok(SuiteResult {
        name: "network-equivalence",
        passed: max_dev <= 1e-12,
        detail: format!("max trajectory deviation {max_dev:.3e} over {steps} steps"),
    })
}

/// Ledger totals from the simulation against the closed-form per-step round
/// and scalar counts.
fn suite_communication_accounting(bench: &Benchmark, fault: Fault) -> Result<SuiteResult> {
    let (oracle, graph) = (&bench.oracle, &bench.graph);
    let steps = 3;
    let y0 = BlockVector::zeros(graph.n(), graph.p());
    let mut configs = vec![
        MethodConfig::new(Variant::DpcG, 0.5, 2, 0, 0.3),
        MethodConfig::new(Variant::DapcG, 0.5, 0, 0, 0.3),
        MethodConfig::new(Variant::DpcN, 0.5, 1, 3, 1.0),
        MethodConfig::new(Variant::DapcN, 0.5, 2, 1, 1.0),
        MethodConfig::new(Variant::RunningGradient, 0.5, 0, 0, 0.3),
        MethodConfig::new(Variant::RunningNewton, 0.5, 0, 2, 1.0),
    ];
    configs[4].n_c = 2;
    configs[4].n_ec = 3;
    configs[5].n_ec = 1;
    let extra = u64::from(fault == Fault::LedgerOffByOne);
    let mut failures = Vec::new();
    for config in &configs {
        let sim = run_decentralized(config, oracle, graph, &y0, steps)?;
        let want = comm_requirements(config, graph.p());
        let want_rounds =
            (want.prediction_rounds + want.correction_rounds) as u64 * steps as u64 + extra;
        let want_scalars = want.scalars_per_node as u64 * steps as u64;
        if sim.ledger.total_rounds() != want_rounds
            || sim.ledger.scalars_per_node != want_scalars
        {
            failures.push(format!(
                "{}: rounds {} vs {}, scalars {} vs {}",
                config.variant,
                sim.ledger.total_rounds(),
                want_rounds,
                sim.ledger.scalars_per_node,
                want_scalars
            ));
        }
    }
    Ok(SuiteResult {
        name: "communication-accounting",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} variant configurations match the closed forms", configs.len())
        } else {
            failures.join("; ")
        },
    })
}
