//! Synthetic quadratic family: moving-target node costs with optional
//! Laplacian-style edge coupling. Its minimizer and all derivative bounds
//! have closed forms, so it serves as the exactly solvable test problem.

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::graph::NetworkGraph;
use crate::objective::ObjectiveOracle;
use crate::rng;
use crate::timefn::TimePath;
use nalgebra::{DMatrix, DVector, DVectorView};
use rand::Rng;
use rand_distr::StandardNormal;

/// F(y;t) = sum_i (1/2)(y^i - c_i(t))' A_i (y^i - c_i(t))
///        + sum_e (w_e/2) ||y^i - y^j||^2.
///
/// Each `A_i` is symmetric positive definite and each `c_i` a smooth path;
/// `weights[e]` pairs with `graph.edges()[e]`.
#[derive(Debug)]
pub struct SyntheticQuadratic {
    graph: NetworkGraph,
    a: Vec<DMatrix<f64>>,
    targets: Vec<TimePath>,
    weights: Vec<f64>,
}

impl SyntheticQuadratic {
    pub fn new(
        graph: NetworkGraph,
        a: Vec<DMatrix<f64>>,
        targets: Vec<TimePath>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let (n, p) = (graph.n(), graph.p());
        if a.len() != n || targets.len() != n {
            return Err(Error::Dimension(format!(
                "need {n} node matrices and targets, got {} and {}",
                a.len(),
                targets.len()
            )));
        }
        if weights.len() != graph.edge_count() {
            return Err(Error::Dimension(format!(
                "need {} edge weights, got {}",
                graph.edge_count(),
                weights.len()
            )));
        }
        for (i, m) in a.iter().enumerate() {
            if m.shape() != (p, p) {
                return Err(Error::Dimension(format!("matrix {i} is not {p}x{p}")));
            }
            if (m - m.transpose()).amax() > 1e-12 * (1.0 + m.amax()) {
                return Err(Error::NotPositiveDefinite { node: i });
            }
            if m.clone().cholesky().is_none() {
                return Err(Error::NotPositiveDefinite { node: i });
            }
        }
        for path in &targets {
            if path.dim() != p {
                return Err(Error::Dimension(format!(
                    "target path dimension {} does not match p={p}",
                    path.dim()
                )));
            }
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::Config("edge weights must be nonnegative".into()));
        }
        Ok(Self { graph, a, targets, weights })
    }

    /// Random instance: A_i = S'S/p + I (eigenvalues in [1, ~4]), cosine
    /// targets with unit-scale amplitudes, uniform edge weights in
    /// [0, coupling]. Deterministic in `seed`.
    pub fn random(graph: NetworkGraph, seed: u64, coupling: f64, omega: f64) -> Self {
        let (n, p) = (graph.n(), graph.p());
        let mut r = rng::stream(seed, "synthetic-quadratic");
        let mut a = Vec::with_capacity(n);
        let mut targets = Vec::with_capacity(n);
        for _ in 0..n {
            let s = DMatrix::from_fn(p, p, |_, _| r.sample::<f64, _>(StandardNormal));
            a.push(s.transpose() * &s / p as f64 + DMatrix::identity(p, p));
            let amp = DVector::from_fn(p, |_, _| r.random_range(-2.0..2.0));
            let phase = DVector::from_fn(p, |_, _| r.random_range(0.0..std::f64::consts::TAU));
            targets.push(TimePath::Cosine { amp, phase, omega });
        }
        let weights = (0..graph.edge_count()).map(|_| r.random_range(0.0..coupling.max(1e-12))).collect();
        Self::new(graph, a, targets, weights).expect("construction from valid draws")
    }

    /// Closed-form minimizer: solves (blockdiag A + W_lap) y = blockdiag A c(t)
    /// where W_lap is the weighted block Laplacian of the coupling term.
    pub fn exact_minimizer(&self, t: f64) -> BlockVector {
        let (n, p) = (self.graph.n(), self.graph.p());
        let mut h = DMatrix::zeros(n * p, n * p);
        let mut rhs = DVector::zeros(n * p);
        for i in 0..n {
            h.view_mut((i * p, i * p), (p, p)).copy_from(&self.a[i]);
            rhs.rows_mut(i * p, p).copy_from(&(&self.a[i] * self.targets[i].value(t)));
        }
        for (e, &(i, j)) in self.graph.edges().iter().enumerate() {
            let w = self.weights[e];
            for d in 0..p {
                h[(i * p + d, i * p + d)] += w;
                h[(j * p + d, j * p + d)] += w;
                h[(i * p + d, j * p + d)] -= w;
                h[(j * p + d, i * p + d)] -= w;
            }
        }
        let sol = h.cholesky().expect("SPD system").solve(&rhs);
        BlockVector::from_vector(n, p, sol)
    }

    fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[self.graph.edge_index(i, j).expect("edge exists")]
    }
}

impl ObjectiveOracle for SyntheticQuadratic {
    fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    fn f_value(&self, i: usize, yi: DVectorView<f64>, t: f64) -> f64 {
        let r = yi - self.targets[i].value(t);
        0.5 * (&self.a[i] * &r).dot(&r)
    }

    fn f_gradient(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DVector<f64> {
        &self.a[i] * (yi - self.targets[i].value(t))
    }

    fn f_hessian(&self, i: usize, _yi: DVectorView<f64>, _t: f64) -> DMatrix<f64> {
        self.a[i].clone()
    }

    fn f_time_gradient(&self, i: usize, _yi: DVectorView<f64>, t: f64) -> DVector<f64> {
        -(&self.a[i] * self.targets[i].deriv(t))
    }

    fn edge_value(&self, i: usize, j: usize, yi: DVectorView<f64>, yj: DVectorView<f64>, _t: f64) -> f64 {
        0.5 * self.weight(i, j) * (yi - yj).norm_squared()
    }

    fn edge_gradient(
        &self,
        i: usize,
        j: usize,
        yi: DVectorView<f64>,
        yj: DVectorView<f64>,
        _t: f64,
    ) -> DVector<f64> {
        self.weight(i, j) * (yi - yj)
    }

    fn edge_hessian_own(
        &self,
        i: usize,
        j: usize,
        yi: DVectorView<f64>,
        _yj: DVectorView<f64>,
        _t: f64,
    ) -> DMatrix<f64> {
        DMatrix::identity(yi.len(), yi.len()) * self.weight(i, j)
    }

    fn edge_hessian_cross(
        &self,
        i: usize,
        j: usize,
        yi: DVectorView<f64>,
        _yj: DVectorView<f64>,
        _t: f64,
    ) -> DMatrix<f64> {
        DMatrix::identity(yi.len(), yi.len()) * -self.weight(i, j)
    }
}
