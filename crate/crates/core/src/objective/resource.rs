//! Resource-allocation family: node utilities plus the quadratic penalty
//! (1/beta^2)||Ay - b(t)||^2, where A is the augmented edge-incidence matrix.
//! The penalty splits into one term per edge, so it fits the oracle's edge
//! structure exactly and the graph stays the communication pattern.

use crate::error::{Error, Result};
use crate::graph::NetworkGraph;
use crate::objective::{NodeUtility, ObjectiveOracle};
use crate::timefn::TimePath;
use nalgebra::{DMatrix, DVector, DVectorView};

/// F(y;t) = sum_i u_i(y^i;t) + (1/beta^2) sum_e ||y^a - y^b - b_e(t)||^2
/// with (a, b) the stored orientation (a < b) of edge e.
#[derive(Debug)]
pub struct ResourceAllocation<U: NodeUtility> {
    graph: NetworkGraph,
    utilities: Vec<U>,
    beta: f64,
    /// Edge-stacked target: dimension (edge count) * p, sliced per edge.
    b_path: TimePath,
}

impl<U: NodeUtility> ResourceAllocation<U> {
    pub fn new(graph: NetworkGraph, utilities: Vec<U>, beta: f64, b_path: TimePath) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Config("beta must be positive".into()));
        }
        if utilities.len() != graph.n() {
            return Err(Error::Dimension(format!(
                "need {} utilities, got {}",
                graph.n(),
                utilities.len()
            )));
        }
        for (i, u) in utilities.iter().enumerate() {
            if u.p() != graph.p() {
                return Err(Error::Dimension(format!(
                    "utility {i} has dimension {}, graph blocks are {}",
                    u.p(),
                    graph.p()
                )));
            }
        }
        let expect = graph.edge_count() * graph.p();
        if b_path.dim() != expect {
            return Err(Error::Dimension(format!(
                "edge target dimension {} does not match edges*p = {expect}",
                b_path.dim()
            )));
        }
        Ok(Self { graph, utilities, beta, b_path })
    }

    /// Zero edge target of the right stacked dimension.
    pub fn zero_target(graph: &NetworkGraph) -> TimePath {
        TimePath::Constant(DVector::zeros(graph.edge_count() * graph.p()))
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn utility(&self, i: usize) -> &U {
        &self.utilities[i]
    }

    /// Residual y^a - y^b - b_e(t) for the edge {i,j}, together with the sign
    /// (+1 if i is the stored tail a, else -1) of d(residual)/d(y^i).
    fn residual(
        &self,
        i: usize,
        j: usize,
        yi: DVectorView<f64>,
        yj: DVectorView<f64>,
        t: f64,
    ) -> (DVector<f64>, f64, usize) {
        let e = self.graph.edge_index(i, j).expect("edge exists");
        let p = self.graph.p();
        let be = self.b_path.value(t).rows(e * p, p).into_owned();
        if i < j {
            (yi - yj - be, 1.0, e)
        } else {
            (yj - yi - be, -1.0, e)
        }
    }
}

impl<U: NodeUtility> ObjectiveOracle for ResourceAllocation<U> {
    fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    fn f_value(&self, i: usize, yi: DVectorView<f64>, t: f64) -> f64 {
        self.utilities[i].value(yi, t)
    }

    fn f_gradient(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DVector<f64> {
        self.utilities[i].gradient(yi, t)
    }

    fn f_hessian(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DMatrix<f64> {
        self.utilities[i].hessian(yi, t)
    }

    fn f_time_gradient(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DVector<f64> {
        self.utilities[i].time_gradient(yi, t)
    }

    fn edge_value(&self, i: usize, j: usize, yi: DVectorView<f64>, yj: DVectorView<f64>, t: f64) -> f64 {
        let (r, _, _) = self.residual(i, j, yi, yj, t);
        r.norm_squared() / (self.beta * self.beta)
    }

    fn edge_gradient(
        &self,
        i: usize,
        j: usize,
        yi: DVectorView<f64>,
        yj: DVectorView<f64>,
        t: f64,
    ) -> DVector<f64> {
        let (r, sign, _) = self.residual(i, j, yi, yj, t);
        r * (sign * 2.0 / (self.beta * self.beta))
    }

    fn edge_hessian_own(
        &self,
        _i: usize,
        _j: usize,
        yi: DVectorView<f64>,
        _yj: DVectorView<f64>,
        _t: f64,
    ) -> DMatrix<f64> {
        DMatrix::identity(yi.len(), yi.len()) * (2.0 / (self.beta * self.beta))
    }

    fn edge_hessian_cross(
        &self,
        _i: usize,
        _j: usize,
        yi: DVectorView<f64>,
        _yj: DVectorView<f64>,
        _t: f64,
    ) -> DMatrix<f64> {
        DMatrix::identity(yi.len(), yi.len()) * (-2.0 / (self.beta * self.beta))
    }

    fn edge_time_gradient(
        &self,
        i: usize,
        j: usize,
        _yi: DVectorView<f64>,
        _yj: DVectorView<f64>,
        t: f64,
    ) -> DVector<f64> {
        let e = self.graph.edge_index(i, j).expect("edge exists");
        let p = self.graph.p();
        let db = self.b_path.deriv(t).rows(e * p, p).into_owned();
        let sign = if i < j { 1.0 } else { -1.0 };
        db * (-sign * 2.0 / (self.beta * self.beta))
    }
}
