//! Derivative oracles of every built-in objective family checked against
//! central finite differences, plus the structural facts the solver relies
//! on (symmetry, curvature floor, penalty shape).

use dpc_core::bench::{paper_benchmark, BenchmarkScale};
use dpc_core::block::BlockVector;
use dpc_core::graph::{augmented_incidence, NetworkGraph};
use dpc_core::objective::{
    dense_hessian, global_gradient, global_value, mixed_time_gradient, Estimation,
    ObjectiveOracle, SyntheticQuadratic,
};
use dpc_core::timefn::TimePath;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn probe(n: usize, p: usize, salt: u64) -> BlockVector {
    BlockVector::from_vector(
        n,
        p,
        DVector::from_fn(n * p, |r, _| (((salt + r as u64 * 7) % 23) as f64) * 0.3 - 3.0),
    )
}

fn estimation_instance(seed: u64) -> (NetworkGraph, Estimation) {
    let graph = NetworkGraph::random_geometric(4, 2, 1.5, seed).unwrap();
    let regressors = (0..4)
        .map(|i| DVector::from_fn(2, |r, _| 0.5 + ((seed + (i * 2 + r) as u64) % 5) as f64 * 0.3))
        .collect();
    let sigma = (0..4).map(|i| 0.5 + 0.1 * i as f64).collect();
    let weights = (0..graph.edge_count()).map(|e| 0.4 + 0.05 * e as f64).collect();
    let z = TimePath::Cosine {
        amp: DVector::from_fn(4, |r, _| 1.0 + r as f64),
        phase: DVector::from_fn(4, |r, _| 0.3 * r as f64),
        omega: 0.25,
    };
    let est = Estimation::new(graph.clone(), regressors, sigma, weights, 0.8, z).unwrap();
    (graph, est)
}

fn check_derivatives<O: ObjectiveOracle>(oracle: &O, graph: &NetworkGraph, y: &BlockVector, t: f64) {
    let (n, p) = (graph.n(), graph.p());
    let dy = 1e-5;
    let g = global_gradient(oracle, graph, y, t);
    let h = dense_hessian(oracle, graph, y, t);
    assert!((&h - h.transpose()).amax() < 1e-12, "Hessian must be symmetric");
    for idx in 0..n * p {
        let mut shift = BlockVector::zeros(n, p);
        shift.block_mut(idx / p)[idx % p] = dy;
        let plus = y + &shift;
        let minus = y - &shift;
        let fd = (global_value(oracle, graph, &plus, t) - global_value(oracle, graph, &minus, t))
            / (2.0 * dy);
        let dev = (g.as_vector()[idx] - fd).abs() / (1.0 + fd.abs());
        assert!(dev < 1e-6, "gradient[{idx}] dev {dev}");
        let col = (global_gradient(oracle, graph, &plus, t).into_vector()
            - global_gradient(oracle, graph, &minus, t).into_vector())
            / (2.0 * dy);
        let hdev = (h.column(idx) - &col).amax() / (1.0 + col.amax());
        assert!(hdev < 1e-5, "hessian col {idx} dev {hdev}");
    }
    let dt = 1e-5;
    let fd_t = (global_gradient(oracle, graph, y, t + dt).into_vector()
        - global_gradient(oracle, graph, y, t - dt).into_vector())
        / (2.0 * dt);
    let tdev = (mixed_time_gradient(oracle, graph, y, t).into_vector() - fd_t).amax();
    assert!(tdev < 1e-6, "time gradient dev {tdev}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quadratic_family_matches_finite_differences(seed in 0u64..300, t in 0.0f64..6.0) {
        let graph = NetworkGraph::random_geometric(4, 2, 1.5, seed).unwrap();
        let q = SyntheticQuadratic::random(graph.clone(), seed, 0.6, 0.3);
        check_derivatives(&q, &graph, &probe(4, 2, seed), t);
    }

    #[test]
    fn estimation_family_matches_finite_differences(seed in 0u64..300, t in 0.0f64..6.0) {
        let (graph, est) = estimation_instance(seed);
        check_derivatives(&est, &graph, &probe(4, 2, seed + 1), t);
    }
}

#[test]
fn benchmark_family_matches_finite_differences() {
    for seed in [1u64, 8, 21] {
        let bench = paper_benchmark(seed, BenchmarkScale::Desk).unwrap();
        check_derivatives(&bench.oracle, &bench.graph, &probe(10, 3, seed), 1.9);
    }
}

#[test]
fn benchmark_curvature_never_drops_below_its_floor() {
    let bench = paper_benchmark(4, BenchmarkScale::Desk).unwrap();
    for salt in 0..6 {
        let y = probe(10, 3, 100 + salt);
        let h = dense_hessian(&bench.oracle, &bench.graph, &y, 0.7 * salt as f64);
        let min_eig = h.symmetric_eigenvalues().min();
        assert!(
            min_eig >= bench.constants.m - 1e-9,
            "eig {min_eig} below floor {}",
            bench.constants.m
        );
    }
}

#[test]
fn resource_penalty_hessian_is_the_scaled_incidence_gram() {
    // With identity-quadratic utilities the dense Hessian minus I equals
    // (2/beta^2) A'A at any point and time, because the penalty is quadratic
    // and time-invariant.
    use dpc_core::objective::{QuadraticLogisticUtility, ResourceAllocation};
    for seed in [3u64, 12] {
        let graph = NetworkGraph::random_geometric(5, 2, 1.5, seed).unwrap();
        let beta = 20f64.sqrt();
        let utilities = (0..5)
            .map(|_| {
                QuadraticLogisticUtility::new(
                    DMatrix::identity(2, 2),
                    DVector::zeros(2),
                    TimePath::Constant(DVector::zeros(2)),
                    TimePath::Constant(DVector::zeros(2)),
                )
                .unwrap()
            })
            .collect();
        let target = ResourceAllocation::<QuadraticLogisticUtility>::zero_target(&graph);
        let ra = ResourceAllocation::new(graph.clone(), utilities, beta, target).unwrap();
        let a = augmented_incidence(&graph);
        let gram = a.transpose() * &a * (2.0 / (beta * beta));
        for salt in 0..3 {
            let y = probe(5, 2, salt);
            let t = salt as f64 * 1.7;
            let h = dense_hessian(&ra, &graph, &y, t);
            let penalty = &h - DMatrix::identity(10, 10);
            assert!((penalty - &gram).amax() < 1e-13);
        }
    }
}
