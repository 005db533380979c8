//! Per-node utility functions for the resource-allocation family, including
//! the quadratic-plus-logistic form used by the benchmark problem.

use crate::error::{Error, Result};
use crate::timefn::TimePath;
use nalgebra::{DMatrix, DVector, DVectorView};

/// A strongly convex local utility f^i(y^i;t).
pub trait NodeUtility: Send + Sync {
    fn p(&self) -> usize;
    fn value(&self, y: DVectorView<f64>, t: f64) -> f64;
    fn gradient(&self, y: DVectorView<f64>, t: f64) -> DVector<f64>;
    fn hessian(&self, y: DVectorView<f64>, t: f64) -> DMatrix<f64>;
    /// d/dt of `gradient` at fixed y.
    fn time_gradient(&self, y: DVectorView<f64>, t: f64) -> DVector<f64>;
}

/// ln(1 + e^x) without overflow for large |x|.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Logistic sigmoid, saturating cleanly at the tails.
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// f(y;t) = (1/2)(y - c(t))' Q (y - c(t)) + sum_l softplus(b_l (y_l - d_l(t))).
///
/// Q symmetric positive definite; the logistic terms add curvature at most
/// b_l^2/4 per coordinate, so the Hessian spectrum stays inside
/// [lambda_min(Q), lambda_max(Q) + max_l b_l^2/4].
#[derive(Debug)]
pub struct QuadraticLogisticUtility {
    q: DMatrix<f64>,
    b: DVector<f64>,
    c: TimePath,
    d: TimePath,
}

impl QuadraticLogisticUtility {
    pub fn new(q: DMatrix<f64>, b: DVector<f64>, c: TimePath, d: TimePath) -> Result<Self> {
        let p = q.nrows();
        if q.ncols() != p {
            return Err(Error::Dimension("Q must be square".into()));
        }
        if (&q - q.transpose()).amax() > 1e-12 * (1.0 + q.amax()) {
            return Err(Error::Config("Q must be symmetric".into()));
        }
        if q.clone().cholesky().is_none() {
            return Err(Error::Config("Q must be positive definite".into()));
        }
        if b.len() != p || c.dim() != p || d.dim() != p {
            return Err(Error::Dimension(format!(
                "b, c, d must all have dimension {p}, got {}, {}, {}",
                b.len(),
                c.dim(),
                d.dim()
            )));
        }
        Ok(Self { q, b, c, d })
    }

    pub fn q_matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn b_coefs(&self) -> &DVector<f64> {
        &self.b
    }
}

impl NodeUtility for QuadraticLogisticUtility {
    fn p(&self) -> usize {
        self.q.nrows()
    }

    fn value(&self, y: DVectorView<f64>, t: f64) -> f64 {
        let r = y - self.c.value(t);
        let d = self.d.value(t);
        let mut v = 0.5 * (&self.q * &r).dot(&r);
        for l in 0..self.b.len() {
            v += softplus(self.b[l] * (y[l] - d[l]));
        }
        v
    }

    fn gradient(&self, y: DVectorView<f64>, t: f64) -> DVector<f64> {
        let d = self.d.value(t);
        let mut g = &self.q * (y - self.c.value(t));
        for l in 0..self.b.len() {
            g[l] += self.b[l] * sigmoid(self.b[l] * (y[l] - d[l]));
        }
        g
    }

    fn hessian(&self, y: DVectorView<f64>, t: f64) -> DMatrix<f64> {
        let d = self.d.value(t);
        let mut h = self.q.clone();
        for l in 0..self.b.len() {
            let s = sigmoid(self.b[l] * (y[l] - d[l]));
            h[(l, l)] += self.b[l] * self.b[l] * s * (1.0 - s);
        }
        h
    }

    fn time_gradient(&self, y: DVectorView<f64>, t: f64) -> DVector<f64> {
        let d = self.d.value(t);
        let dd = self.d.deriv(t);
        let mut g = -(&self.q * self.c.deriv(t));
        for l in 0..self.b.len() {
            let s = sigmoid(self.b[l] * (y[l] - d[l]));
            g[l] -= self.b[l] * self.b[l] * s * (1.0 - s) * dd[l];
        }
        g
    }
}
