//! Empirical estimation of the regularity constants an objective satisfies:
//! curvature bounds of the node costs, eigenvalue bounds of the coupling,
//! and norms of the time-mixed third derivatives.

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::graph::NetworkGraph;
use crate::objective::{dense_hessian, mixed_time_gradient, ObjectiveOracle, FD_HESSIAN_STEP};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Whether a bundle was measured by sampling or derived in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstantsProvenance {
    /// Max/min envelopes over random probes; not certified bounds.
    Sampled,
    /// Computed from the problem family's structure.
    Analytic,
}

/// Regularity constants of F(y;t) = f(y;t) + g(y;t):
/// - `m`, `big_m`: extreme eigenvalues of the node-cost Hessian blocks;
/// - `ell`, `big_l`: twice the extreme eigenvalues of g's diagonal Hessian
///   blocks (and `big_l` also covers g's full spectrum);
/// - `c0`: max norm of the time-mixed gradient d/dt grad F;
/// - `c1`: max norm of the third y-derivative (directional probes);
/// - `c2`: max norm of the y-derivative of the time-mixed gradient;
/// - `c3`: max norm of the second time derivative of the gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantsBundle {
    pub m: f64,
    pub big_m: f64,
    pub ell: f64,
    pub big_l: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub provenance: ConstantsProvenance,
}

impl ConstantsBundle {
    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m <= self.big_m) {
            return Err(Error::Config(format!(
                "need 0 < m <= M, got m={}, M={}",
                self.m, self.big_m
            )));
        }
        if !(self.ell >= 0.0 && self.ell <= self.big_l) || !self.big_l.is_finite() {
            return Err(Error::Config(format!(
                "need 0 <= ell <= L, got ell={}, L={}",
                self.ell, self.big_l
            )));
        }
        for (name, c) in [("C0", self.c0), ("C1", self.c1), ("C2", self.c2), ("C3", self.c3)] {
            if !(c >= 0.0) || !c.is_finite() {
                return Err(Error::Config(format!("{name} must be finite and nonnegative, got {c}")));
            }
        }
        Ok(())
    }
}

/// Sampling box for constant estimation: y coordinates uniform in
/// [-y_halfwidth, y_halfwidth], t uniform in [t_min, t_max].
#[derive(Clone, Copy, Debug)]
pub struct SampleRegion {
    pub y_halfwidth: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Default for SampleRegion {
    fn default() -> Self {
        Self { y_halfwidth: 15.0, t_min: 0.0, t_max: 70.0 }
    }
}

/// Measures envelope estimates of the bundle over `samples` random probes.
///
/// Draws are consumed in a fixed order from one seeded stream, so a larger
/// sample count extends (never replaces) a smaller one: reported maxima are
/// monotone in `samples`. Third derivatives use central differences with
/// step [`FD_HESSIAN_STEP`]. The result is an empirical estimate, not a
/// certified bound.
pub fn estimate_constants<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    graph: &NetworkGraph,
    region: SampleRegion,
    samples: usize,
    seed: u64,
) -> Result<ConstantsBundle> {
    if samples == 0 {
        return Err(Error::Config("sample count must be at least 1".into()));
    }
    let (n, p) = (graph.n(), graph.p());
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let delta = FD_HESSIAN_STEP;

    let mut m = f64::INFINITY;
    let mut big_m = f64::NEG_INFINITY;
    let mut ell = f64::INFINITY;
    let mut big_l = f64::NEG_INFINITY;
    let (mut c0, mut c1, mut c2, mut c3) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);

    for _ in 0..samples {
        let y = BlockVector::from_vector(
            n,
            p,
            DVector::from_fn(n * p, |_, _| {
                rng.random_range(-region.y_halfwidth..=region.y_halfwidth)
            }),
        );
        let t = rng.random_range(region.t_min..=region.t_max);
        let mut dir = DVector::from_fn(n * p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let dn = dir.norm();
        // Keep the draw count fixed even for the measure-zero degenerate draw.
        if dn > 0.0 {
            dir /= dn;
        }

        let mut f_blockdiag = DMatrix::zeros(n * p, n * p);
        for i in 0..n {
            let hf = oracle.f_hessian(i, y.block(i), t);
            let eigs = hf.symmetric_eigenvalues();
            m = m.min(eigs.min());
            big_m = big_m.max(eigs.max());
            f_blockdiag.view_mut((i * p, i * p), (p, p)).copy_from(&hf);

            let mut hg = oracle.g_node_hessian(i, y.block(i), t);
            for &j in graph.neighbors(i) {
                hg += oracle.edge_hessian_own(i, j, y.block(i), y.block(j), t);
            }
            let geigs = hg.symmetric_eigenvalues();
            ell = ell.min(2.0 * geigs.min());
            big_l = big_l.max(2.0 * geigs.max());
        }
        let g_full = dense_hessian(oracle, graph, &y, t) - &f_blockdiag;
        big_l = big_l.max(g_full.symmetric_eigenvalues().max());

        c0 = c0.max(mixed_time_gradient(oracle, graph, &y, t).norm());

        let shift = BlockVector::from_vector(n, p, &dir * delta);
        let y_plus = &y + &shift;
        let y_minus = &y - &shift;
        let h_diff =
            (dense_hessian(oracle, graph, &y_plus, t) - dense_hessian(oracle, graph, &y_minus, t))
                / (2.0 * delta);
        c1 = c1.max(h_diff.symmetric_eigenvalues().abs().max());

        let tg_plus = mixed_time_gradient(oracle, graph, &y_plus, t);
        let tg_minus = mixed_time_gradient(oracle, graph, &y_minus, t);
        c2 = c2.max((&tg_plus - &tg_minus).norm() / (2.0 * delta));

        let tg_fwd = mixed_time_gradient(oracle, graph, &y, t + delta);
        let tg_bwd = mixed_time_gradient(oracle, graph, &y, t - delta);
        c3 = c3.max((&tg_fwd - &tg_bwd).norm() / (2.0 * delta));
    }

    Ok(ConstantsBundle {
        m,
        big_m,
        ell,
        big_l,
        c0,
        c1,
        c2,
        c3,
        provenance: ConstantsProvenance::Sampled,
    })
}
