//! The experiment plumbing end to end: reference residuals, run records,
//! drift of the optimal trajectory against its closed-form rate, and the
//! regression fit used by step-size sweeps.

use dpc_core::algorithms::{run, GammaSchedule, MethodConfig, MethodState, Variant};
use dpc_core::bench::{
    fit_loglog_slope, optimal_trajectory, paper_benchmark, paper_benchmark_with_omega,
    reference_tolerance, solve_instant, BenchmarkScale, RunRecord,
};
use dpc_core::block::BlockVector;
use dpc_core::bounds::solution_drift_bound;
use dpc_core::netsim::{comm_requirements, run_decentralized};
use dpc_core::objective::global_gradient;
use nalgebra::DVector;
use proptest::prelude::*;

#[test]
fn reference_trajectory_meets_its_tolerance_at_every_sample() {
    let bench = paper_benchmark(11, BenchmarkScale::Desk).unwrap();
    let tol = reference_tolerance(10, 3);
    let times: Vec<f64> = (0..=120).map(|k| 0.1 * k as f64).collect();
    let reference = optimal_trajectory(&bench.oracle, &bench.graph, &times, tol).unwrap();
    assert_eq!(reference.len(), times.len());
    for (y, &t) in reference.iter().zip(&times) {
        let g = global_gradient(&bench.oracle, &bench.graph, y, t).norm();
        assert!(g <= tol, "residual {g} at t = {t}");
    }
}

#[test]
fn optimal_trajectory_drifts_no_faster_than_its_bound() {
    let bench = paper_benchmark(13, BenchmarkScale::Desk).unwrap();
    let h = 0.1;
    let tol = reference_tolerance(10, 3);
    let times: Vec<f64> = (0..=200).map(|k| h * k as f64).collect();
    let reference = optimal_trajectory(&bench.oracle, &bench.graph, &times, tol).unwrap();
    let cap = solution_drift_bound(&bench.constants, h);
    for w in reference.windows(2) {
        let moved = (&w[1] - &w[0]).norm();
        assert!(moved <= cap + 1e-9, "drift {moved} over cap {cap}");
    }
}

#[test]
fn run_records_carry_the_closed_form_communication_columns() {
    let bench = paper_benchmark(4, BenchmarkScale::Desk).unwrap();
    let tol = reference_tolerance(10, 3);
    let gamma = 1.0 / (bench.constants.big_l + bench.constants.big_m);
    let configs = [
        MethodConfig::new(Variant::DpcG, 0.1, 3, 0, gamma),
        MethodConfig::new(Variant::DpcN, 0.1, 2, 2, 1.0),
    ];
    for config in configs {
        let steps = 6;
        let y0 = BlockVector::zeros(10, 3);
        let sim = run_decentralized(&config, &bench.oracle, &bench.graph, &y0, steps).unwrap();
        let times: Vec<f64> = (0..=steps).map(|k| config.h * k as f64).collect();
        let reference = optimal_trajectory(&bench.oracle, &bench.graph, &times, tol).unwrap();
        let record = RunRecord::from_sim(&config, 4, 0.0, &sim, &reference, false).unwrap();
        let want = comm_requirements(&config, 3);
        let per_step = (want.prediction_rounds + want.correction_rounds) as u64;
        assert_eq!(record.rounds_cum[0], 0);
        assert_eq!(record.scalars_cum[0], 0);
        for k in 1..=steps {
            assert_eq!(record.rounds_cum[k] - record.rounds_cum[k - 1], per_step);
            assert_eq!(
                record.scalars_cum[k] - record.scalars_cum[k - 1],
                want.scalars_per_node as u64
            );
        }
        // Times advance by exactly h, and errors shrink along the run.
        for k in 1..=steps {
            assert_eq!(record.t[k], config.h * k as f64);
        }
        assert!(record.err[steps] < record.err[0]);
    }
}

/// With the drift frequency forced to zero the objective is time-invariant,
/// so every variant is a plain fixed-point iteration and must settle onto the
/// stationary optimum to within the reference solver's own accuracy.
#[test]
fn frozen_drift_sends_every_variant_to_the_fixed_point() {
    let bench = paper_benchmark_with_omega(11, BenchmarkScale::Desk, 0.0).unwrap();
    let tol = reference_tolerance(10, 3);
    let fixed =
        solve_instant(&bench.oracle, &bench.graph, &BlockVector::zeros(10, 3), 0.0, tol).unwrap();
    let gamma = 1.0 / (bench.constants.big_l + bench.constants.big_m);
    let steps = 500;
    for variant in Variant::ALL {
        let g = if variant.newton_correction() { 1.0 } else { gamma };
        let config = MethodConfig::new(variant, 0.1, 3, 3, g);
        let start = MethodState::initial(BlockVector::zeros(10, 3), 0.0);
        let (traj, _) = run(start, &bench.oracle, &bench.graph, &config, steps).unwrap();
        let settled = traj[steps - 50..=steps]
            .iter()
            .map(|y| (y - &fixed).norm())
            .fold(0.0f64, f64::max);
        assert!(
            settled <= tol * 10.0,
            "{} stalled {settled:e} away from the fixed point",
            variant.name()
        );
    }
}

/// A step size climbing as 1 - 0.9/k starts with heavily damped corrections,
/// so the iterate homes in from starts far beyond where full Newton steps
/// carry any guarantee, yet the tail plateau matches constant gamma = 1.
#[test]
fn climbing_step_size_tracks_like_full_newton_from_far_starts() {
    let bench = paper_benchmark(7, BenchmarkScale::Desk).unwrap();
    let h = 0.1;
    let steps = 300;
    let config = MethodConfig::new(Variant::DpcN, h, 5, 1, 1.0);
    let times: Vec<f64> = (0..=steps).map(|k| h * k as f64).collect();
    let reference =
        optimal_trajectory(&bench.oracle, &bench.graph, &times, reference_tolerance(10, 3))
            .unwrap();
    let plateau = |traj: &[BlockVector]| {
        traj[steps - 50..=steps]
            .iter()
            .zip(&reference[steps - 50..=steps])
            .map(|(y, star)| (y - star).norm())
            .fold(0.0f64, f64::max)
    };

    let zeros = MethodState::initial(BlockVector::zeros(10, 3), 0.0);
    let (baseline, _) = run(zeros, &bench.oracle, &bench.graph, &config, steps).unwrap();
    let full_newton = plateau(&baseline);
    assert!(full_newton > 0.0 && full_newton < 1e-3);

    // Three orders of magnitude out, well past any certified Newton region.
    let far = BlockVector::from_vector(
        10,
        3,
        DVector::from_fn(30, |r, _| ((r * 7 + 2) % 23) as f64 * 30.0 - 300.0),
    );
    let err0 = (&far - &reference[0]).norm();
    assert!(err0 > 1e3 * full_newton);
    let mut scheduled = config.clone();
    scheduled.gamma_schedule = Some(GammaSchedule::DecayToOne { coef: 0.9 });
    let start = MethodState::initial(far, 0.0);
    let (traj, _) = run(start, &bench.oracle, &bench.graph, &scheduled, steps).unwrap();
    let damped = plateau(&traj);
    assert!(
        damped <= 2.0 * full_newton,
        "scheduled plateau {damped:e} vs full Newton {full_newton:e}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slope_fit_recovers_random_power_laws(
        scale in 0.01f64..100.0,
        order in -3.0f64..3.0,
        h0 in 0.02f64..0.2,
    ) {
        let points: Vec<(f64, f64)> =
            (0..5).map(|i| { let h = h0 * 2f64.powi(i); (h, scale * h.powf(order)) }).collect();
        let fit = fit_loglog_slope(&points).unwrap();
        prop_assert!((fit - order).abs() < 1e-10, "fit {fit} vs {order}");
    }
}
