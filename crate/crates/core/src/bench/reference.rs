//! Centralized ground-truth solver for the optimal trajectory y*(t_k).

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::graph::NetworkGraph;
use crate::objective::{dense_hessian, global_gradient, global_value, ObjectiveOracle};

const MAX_NEWTON_ITERS: usize = 200;
const ARMIJO_SLOPE: f64 = 1e-4;
const MIN_STEP: f64 = 1e-10;

/// Gradient-norm tolerance scaled to the problem size.
pub fn reference_tolerance(n: usize, p: usize) -> f64 {
    1e-11 * ((n * p) as f64).sqrt()
}

/// Solves min_y F(y;t) by damped Newton with backtracking, from `start`.
pub fn solve_instant<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    graph: &NetworkGraph,
    start: &BlockVector,
    t: f64,
    tol: f64,
) -> Result<BlockVector> {
    let (n, p) = (graph.n(), graph.p());
    let mut y = start.clone();
    for _ in 0..MAX_NEWTON_ITERS {
        let g = global_gradient(oracle, graph, &y, t);
        if g.norm() <= tol {
            return Ok(y);
        }
        let h = dense_hessian(oracle, graph, &y, t);
        let chol = h
            .cholesky()
            .ok_or_else(|| Error::SolverStall(format!("indefinite Hessian at t = {t}")))?;
        let d = chol.solve(g.as_vector());
        let slope = g.as_vector().dot(&d);
        let value = global_value(oracle, graph, &y, t);
        // Once the Newton decrement drops below the value's floating-point
        // granularity, backtracking can only see rounding noise; the iterate
        // is already in the quadratic-convergence basin, so take full steps.
        if slope <= 64.0 * f64::EPSILON * (1.0 + value.abs()) {
            y = BlockVector::from_vector(n, p, y.as_vector() - &d);
            continue;
        }
        let mut step = 1.0;
        loop {
            let cand =
                BlockVector::from_vector(n, p, y.as_vector() - &d * step);
            if global_value(oracle, graph, &cand, t) <= value - ARMIJO_SLOPE * step * slope {
                y = cand;
                break;
            }
            step *= 0.5;
            if step < MIN_STEP {
                return Err(Error::SolverStall(format!(
                    "line search stalled at t = {t}; gradient norm {}",
                    g.norm()
                )));
            }
        }
    }
    Err(Error::SolverStall(format!("Newton did not reach tolerance {tol} at t = {t}")))
}

/// Minimizers at each sample time, each solve warm-started from the previous
/// one (the first from zero). Every returned point has gradient norm <= tol.
pub fn optimal_trajectory<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    graph: &NetworkGraph,
    times: &[f64],
    tol: f64,
) -> Result<Vec<BlockVector>> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let mut out = Vec::with_capacity(times.len());
    let mut warm = BlockVector::zeros(graph.n(), graph.p());
    for &t in times {
        warm = solve_instant(oracle, graph, &warm, t, tol)?;
        out.push(warm.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::SyntheticQuadratic;
    use crate::timefn::TimePath;
    use nalgebra::{DMatrix, DVector};

    fn moving_quadratic() -> (NetworkGraph, SyntheticQuadratic) {
        let graph = NetworkGraph::random_geometric(4, 2, 1.4, 5).unwrap();
        let q = SyntheticQuadratic::random(graph.clone(), 17, 0.8, 0.4);
        (graph, q)
    }

    #[test]
    fn matches_closed_form_minimizer() {
        let (graph, q) = moving_quadratic();
        let times: Vec<f64> = (0..20).map(|k| k as f64 * 0.3).collect();
        let tol = reference_tolerance(4, 2);
        let traj = optimal_trajectory(&q, &graph, &times, tol).unwrap();
        for (y, &t) in traj.iter().zip(&times) {
            let exact = q.exact_minimizer(t);
            assert!((y.as_vector() - exact.as_vector()).norm() < 1e-10);
        }
    }

    #[test]
    fn stationary_objective_freezes_the_trajectory() {
        let graph = NetworkGraph::new(2, 1, vec![(0, 1)]).unwrap();
        let q = SyntheticQuadratic::new(
            graph.clone(),
            vec![DMatrix::identity(1, 1) * 2.0, DMatrix::identity(1, 1)],
            vec![
                TimePath::Constant(DVector::from_element(1, 3.0)),
                TimePath::Constant(DVector::from_element(1, -1.0)),
            ],
            vec![0.5],
        )
        .unwrap();
        let times = [0.0, 1.0, 2.0, 17.5];
        let traj = optimal_trajectory(&q, &graph, &times, 1e-12).unwrap();
        for y in &traj[1..] {
            assert_eq!(y.as_vector(), traj[0].as_vector());
        }
    }

    #[test]
    fn every_point_meets_the_gradient_contract() {
        let (graph, q) = moving_quadratic();
        let times: Vec<f64> = (0..10).map(|k| k as f64 * 0.5).collect();
        let tol = 1e-9;
        let traj = optimal_trajectory(&q, &graph, &times, tol).unwrap();
        for (y, &t) in traj.iter().zip(&times) {
            assert!(global_gradient(&q, &graph, y, t).norm() <= tol);
        }
    }

    #[test]
    fn nonpositive_tolerance_rejected() {
        let (graph, q) = moving_quadratic();
        assert!(optimal_trajectory(&q, &graph, &[0.0], 0.0).is_err());
    }
}
