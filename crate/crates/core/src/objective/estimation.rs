//! Spatially regularized least-squares estimation: each node fits a scalar
//! measurement stream through its regressor while edge penalties pull
//! neighboring estimates together.

use crate::error::{Error, Result};
use crate::graph::NetworkGraph;
use crate::objective::ObjectiveOracle;
use crate::timefn::TimePath;
use nalgebra::{DMatrix, DVector, DVectorView};

/// F(u;t) = sum_i (1/(2 sigma_i)) (h_i' u^i - z_i(t))^2
///        + sum_e (beta/2) w_e ||u^i - u^j||^2,
/// one smoothing term per unordered edge.
#[derive(Debug)]
pub struct Estimation {
    graph: NetworkGraph,
    regressors: Vec<DVector<f64>>,
    sigma: Vec<f64>,
    weights: Vec<f64>,
    beta: f64,
    /// Stacked measurements: dimension n, entry i is node i's z_i(t).
    z_path: TimePath,
}

impl Estimation {
    pub fn new(
        graph: NetworkGraph,
        regressors: Vec<DVector<f64>>,
        sigma: Vec<f64>,
        weights: Vec<f64>,
        beta: f64,
        z_path: TimePath,
    ) -> Result<Self> {
        let n = graph.n();
        if regressors.len() != n || sigma.len() != n {
            return Err(Error::Dimension(format!(
                "need {n} regressors and noise variances, got {} and {}",
                regressors.len(),
                sigma.len()
            )));
        }
        if regressors.iter().any(|h| h.len() != graph.p()) {
            return Err(Error::Dimension("regressor dimension must equal p".into()));
        }
        if weights.len() != graph.edge_count() {
            return Err(Error::Dimension(format!(
                "need {} edge weights, got {}",
                graph.edge_count(),
                weights.len()
            )));
        }
        if sigma.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Config("noise variances must be positive".into()));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::Config("edge weights must be nonnegative".into()));
        }
        if !(beta > 0.0) {
            return Err(Error::Config("beta must be positive".into()));
        }
        if z_path.dim() != n {
            return Err(Error::Dimension(format!(
                "measurement path dimension {} does not match n={n}",
                z_path.dim()
            )));
        }
        Ok(Self { graph, regressors, sigma, weights, beta, z_path })
    }

    fn edge_coef(&self, i: usize, j: usize) -> f64 {
        let e = self.graph.edge_index(i, j).expect("edge exists");
        self.beta * self.weights[e]
    }
}

impl ObjectiveOracle for Estimation {
    fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    fn f_value(&self, i: usize, yi: DVectorView<f64>, t: f64) -> f64 {
        let r = self.regressors[i].dot(&yi) - self.z_path.value(t)[i];
        r * r / (2.0 * self.sigma[i])
    }

    fn f_gradient(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DVector<f64> {
        let r = self.regressors[i].dot(&yi) - self.z_path.value(t)[i];
        &self.regressors[i] * (r / self.sigma[i])
    }

    fn f_hessian(&self, i: usize, _yi: DVectorView<f64>, _t: f64) -> DMatrix<f64> {
        let h = &self.regressors[i];
        h * h.transpose() / self.sigma[i]
    }

    fn f_time_gradient(&self, i: usize, _yi: DVectorView<f64>, t: f64) -> DVector<f64> {
        &self.regressors[i] * (-self.z_path.deriv(t)[i] / self.sigma[i])
    }

    fn edge_value(&self, i: usize, j: usize, yi: DVectorView<f64>, yj: DVectorView<f64>, _t: f64) -> f64 {
        0.5 * self.edge_coef(i, j) * (yi - yj).norm_squared()
    }

    fn edge_gradient(
        &self,
        i: usize,
        j: usize,
        yi: DVectorView<f64>,
        yj: DVectorView<f64>,
        _t: f64,
    ) -> DVector<f64> {
        (yi - yj) * self.edge_coef(i, j)
    }

    fn edge_hessian_own(
        &self,
        i: usize,
        j: usize,
        yi: DVectorView<f64>,
        _yj: DVectorView<f64>,
        _t: f64,
    ) -> DMatrix<f64> {
        DMatrix::identity(yi.len(), yi.len()) * self.edge_coef(i, j)
    }

    fn edge_hessian_cross(
        &self,
        i: usize,
        j: usize,
        yi: DVectorView<f64>,
        _yj: DVectorView<f64>,
        _t: f64,
    ) -> DMatrix<f64> {
        DMatrix::identity(yi.len(), yi.len()) * -self.edge_coef(i, j)
    }
}
