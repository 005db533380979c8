//! Time-varying objective model F(y;t) = sum_i f^i(y^i;t) + g(y;t).
//!
//! The coupling g decomposes into node terms g^{i,i}(y^i;t) and one term per
//! unordered edge g^{i,j}(y^i,y^j;t). An [`ObjectiveOracle`] answers local
//! derivative queries for all three kinds of term; the free functions below
//! assemble global quantities by iterating the graph, touching only neighbor
//! blocks per node.

mod constants;
mod estimation;
mod logistic;
mod quadratic;
mod resource;

pub use constants::{estimate_constants, ConstantsBundle, ConstantsProvenance, SampleRegion};
pub use estimation::Estimation;
pub use logistic::{NodeUtility, QuadraticLogisticUtility};
pub use quadratic::SyntheticQuadratic;
pub use resource::ResourceAllocation;

use crate::block::BlockVector;
use crate::graph::NetworkGraph;
use nalgebra::{DMatrix, DVector, DVectorView};

/// Central-difference step for gradient checks.
pub const FD_GRADIENT_STEP: f64 = 1e-5;
/// Central-difference step for Hessian and third-derivative probes.
pub const FD_HESSIAN_STEP: f64 = 1e-4;

/// Derivative oracle for one objective instance.
///
/// Edge queries use the perspective convention: `edge_*(i, j, yi, yj, t)`
/// differentiates the unordered edge term {i,j} with respect to `y^i`, with
/// `yi`, `yj` the blocks at `i` and `j`. Implementations must answer both
/// orientations consistently, so `edge_hessian_cross(i,j,..)` is the
/// transpose of `edge_hessian_cross(j,i,..)` with swapped arguments.
///
/// All queries are pure; oracles are immutable after construction.
pub trait ObjectiveOracle: Send + Sync {
    fn graph(&self) -> &NetworkGraph;

    fn f_value(&self, i: usize, yi: DVectorView<f64>, t: f64) -> f64;
    fn f_gradient(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DVector<f64>;
    fn f_hessian(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DMatrix<f64>;
    /// d/dt of the local gradient of f^i at fixed y^i.
    fn f_time_gradient(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DVector<f64>;

    fn g_node_value(&self, _i: usize, _yi: DVectorView<f64>, _t: f64) -> f64 {
        0.0
    }
    fn g_node_gradient(&self, _i: usize, yi: DVectorView<f64>, _t: f64) -> DVector<f64> {
        DVector::zeros(yi.len())
    }
    fn g_node_hessian(&self, _i: usize, yi: DVectorView<f64>, _t: f64) -> DMatrix<f64> {
        DMatrix::zeros(yi.len(), yi.len())
    }
    fn g_node_time_gradient(&self, _i: usize, yi: DVectorView<f64>, _t: f64) -> DVector<f64> {
        DVector::zeros(yi.len())
    }

    /// Value of the unordered edge term {i,j}; counted once per edge.
    fn edge_value(
        &self,
        _i: usize,
        _j: usize,
        _yi: DVectorView<f64>,
        _yj: DVectorView<f64>,
        _t: f64,
    ) -> f64 {
        0.0
    }
    /// Gradient of the edge term with respect to `y^i`.
    fn edge_gradient(
        &self,
        _i: usize,
        _j: usize,
        yi: DVectorView<f64>,
        _yj: DVectorView<f64>,
        _t: f64,
    ) -> DVector<f64> {
        DVector::zeros(yi.len())
    }
    /// Second derivative of the edge term in `y^i` twice.
    fn edge_hessian_own(
        &self,
        _i: usize,
        _j: usize,
        yi: DVectorView<f64>,
        _yj: DVectorView<f64>,
        _t: f64,
    ) -> DMatrix<f64> {
        DMatrix::zeros(yi.len(), yi.len())
    }
    /// Mixed second derivative of the edge term: rows in `y^i`, columns in `y^j`.
    fn edge_hessian_cross(
        &self,
        _i: usize,
        _j: usize,
        yi: DVectorView<f64>,
        yj: DVectorView<f64>,
        _t: f64,
    ) -> DMatrix<f64> {
        DMatrix::zeros(yi.len(), yj.len())
    }
    /// d/dt of `edge_gradient` at fixed blocks.
    fn edge_time_gradient(
        &self,
        _i: usize,
        _j: usize,
        yi: DVectorView<f64>,
        _yj: DVectorView<f64>,
        _t: f64,
    ) -> DVector<f64> {
        DVector::zeros(yi.len())
    }
}

impl<T: ObjectiveOracle + ?Sized> ObjectiveOracle for &T {
    fn graph(&self) -> &NetworkGraph {
        (**self).graph()
    }
    fn f_value(&self, i: usize, yi: DVectorView<f64>, t: f64) -> f64 {
        (**self).f_value(i, yi, t)
    }
    fn f_gradient(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DVector<f64> {
        (**self).f_gradient(i, yi, t)
    }
    fn f_hessian(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DMatrix<f64> {
        (**self).f_hessian(i, yi, t)
    }
    fn f_time_gradient(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DVector<f64> {
        (**self).f_time_gradient(i, yi, t)
    }
    fn g_node_value(&self, i: usize, yi: DVectorView<f64>, t: f64) -> f64 {
        (**self).g_node_value(i, yi, t)
    }
    fn g_node_gradient(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DVector<f64> {
        (**self).g_node_gradient(i, yi, t)
    }
    fn g_node_hessian(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DMatrix<f64> {
        (**self).g_node_hessian(i, yi, t)
    }
    fn g_node_time_gradient(&self, i: usize, yi: DVectorView<f64>, t: f64) -> DVector<f64> {
        (**self).g_node_time_gradient(i, yi, t)
    }
    fn edge_value(&self, i: usize, j: usize, yi: DVectorView<f64>, yj: DVectorView<f64>, t: f64) -> f64 {
        (**self).edge_value(i, j, yi, yj, t)
    }
    fn edge_gradient(
        &self,
        i: usize,
        j: usize,
        yi: DVectorView<f64>,
        yj: DVectorView<f64>,
        t: f64,
    ) -> DVector<f64> {
        (**self).edge_gradient(i, j, yi, yj, t)
    }
    fn edge_hessian_own(
        &self,
        i: usize,
        j: usize,
        yi: DVectorView<f64>,
        yj: DVectorView<f64>,
        t: f64,
    ) -> DMatrix<f64> {
        (**self).edge_hessian_own(i, j, yi, yj, t)
    }
    fn edge_hessian_cross(
        &self,
        i: usize,
        j: usize,
        yi: DVectorView<f64>,
        yj: DVectorView<f64>,
        t: f64,
    ) -> DMatrix<f64> {
        (**self).edge_hessian_cross(i, j, yi, yj, t)
    }
    fn edge_time_gradient(
        &self,
        i: usize,
        j: usize,
        yi: DVectorView<f64>,
        yj: DVectorView<f64>,
        t: f64,
    ) -> DVector<f64> {
        (**self).edge_time_gradient(i, j, yi, yj, t)
    }
}

/// F(y;t): node values plus each unordered edge term once.
pub fn global_value<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    graph: &NetworkGraph,
    y: &BlockVector,
    t: f64,
) -> f64 {
    let mut v = 0.0;
    for i in 0..graph.n() {
        v += oracle.f_value(i, y.block(i), t) + oracle.g_node_value(i, y.block(i), t);
    }
    for &(i, j) in graph.edges() {
        v += oracle.edge_value(i, j, y.block(i), y.block(j), t);
    }
    v
}

/// Gradient of F: block i reads only y^i and neighbor blocks.
pub fn global_gradient<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    graph: &NetworkGraph,
    y: &BlockVector,
    t: f64,
) -> BlockVector {
    BlockVector::from_block_fn(graph.n(), graph.p(), |i| {
        let yi = y.block(i);
        let mut gi = oracle.f_gradient(i, yi, t) + oracle.g_node_gradient(i, yi, t);
        for &j in graph.neighbors(i) {
            gi += oracle.edge_gradient(i, j, yi, y.block(j), t);
        }
        gi
    })
}

/// d/dt of the gradient of F at fixed y, assembled block-locally.
pub fn mixed_time_gradient<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    graph: &NetworkGraph,
    y: &BlockVector,
    t: f64,
) -> BlockVector {
    BlockVector::from_block_fn(graph.n(), graph.p(), |i| {
        let yi = y.block(i);
        let mut gi = oracle.f_time_gradient(i, yi, t) + oracle.g_node_time_gradient(i, yi, t);
        for &j in graph.neighbors(i) {
            gi += oracle.edge_time_gradient(i, j, yi, y.block(j), t);
        }
        gi
    })
}

/// Full np-by-np Hessian of F assembled from node and edge blocks. Used by
/// centralized reference computations; the decentralized path never forms it.
pub fn dense_hessian<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    graph: &NetworkGraph,
    y: &BlockVector,
    t: f64,
) -> DMatrix<f64> {
    let (n, p) = (graph.n(), graph.p());
    let mut h = DMatrix::zeros(n * p, n * p);
    for i in 0..n {
        let yi = y.block(i);
        let mut hii = oracle.f_hessian(i, yi, t) + oracle.g_node_hessian(i, yi, t);
        for &j in graph.neighbors(i) {
            hii += oracle.edge_hessian_own(i, j, yi, y.block(j), t);
        }
        h.view_mut((i * p, i * p), (p, p)).copy_from(&hii);
    }
    for &(i, j) in graph.edges() {
        let hij = oracle.edge_hessian_cross(i, j, y.block(i), y.block(j), t);
        h.view_mut((i * p, j * p), (p, p)).copy_from(&hij);
        h.view_mut((j * p, i * p), (p, p)).copy_from(&hij.transpose());
    }
    h
}
