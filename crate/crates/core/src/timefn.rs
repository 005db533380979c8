//! Smooth vector-valued paths of time used as moving targets inside
//! objectives: value plus first and second derivatives.

use nalgebra::DVector;
use std::fmt;
use std::sync::Arc;

type DynPath = Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>;

/// A twice-differentiable curve `t -> R^d`.
#[derive(Clone)]
pub enum TimePath {
    /// Fixed point; both derivatives vanish.
    Constant(DVector<f64>),
    /// Componentwise `amp_l * cos(phase_l + omega * t)`.
    Cosine { amp: DVector<f64>, phase: DVector<f64>, omega: f64 },
    /// `base + slope * t`.
    Affine { base: DVector<f64>, slope: DVector<f64> },
    /// Caller-supplied closures for value and derivatives.
    Custom { dim: usize, value: DynPath, d1: DynPath, d2: DynPath },
}

impl TimePath {
    pub fn dim(&self) -> usize {
        match self {
            TimePath::Constant(v) => v.len(),
            TimePath::Cosine { amp, .. } => amp.len(),
            TimePath::Affine { base, .. } => base.len(),
            TimePath::Custom { dim, .. } => *dim,
        }
    }

    pub fn value(&self, t: f64) -> DVector<f64> {
        match self {
            TimePath::Constant(v) => v.clone(),
            TimePath::Cosine { amp, phase, omega } => {
                amp.zip_map(phase, |a, th| a * (th + omega * t).cos())
            }
            TimePath::Affine { base, slope } => base + slope * t,
            TimePath::Custom { value, .. } => value(t),
        }
    }

    pub fn deriv(&self, t: f64) -> DVector<f64> {
        match self {
            TimePath::Constant(v) => DVector::zeros(v.len()),
            TimePath::Cosine { amp, phase, omega } => {
                amp.zip_map(phase, |a, th| -a * omega * (th + omega * t).sin())
            }
            TimePath::Affine { slope, .. } => slope.clone(),
            TimePath::Custom { d1, .. } => d1(t),
        }
    }

    pub fn deriv2(&self, t: f64) -> DVector<f64> {
        match self {
            TimePath::Constant(v) => DVector::zeros(v.len()),
            TimePath::Cosine { amp, phase, omega } => {
                amp.zip_map(phase, |a, th| -a * omega * omega * (th + omega * t).cos())
            }
            TimePath::Affine { base, .. } => DVector::zeros(base.len()),
            TimePath::Custom { d2, .. } => d2(t),
        }
    }
}

impl fmt::Debug for TimePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimePath::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            TimePath::Cosine { amp, phase, omega } => f
                .debug_struct("Cosine")
                .field("amp", amp)
                .field("phase", phase)
                .field("omega", omega)
                .finish(),
            TimePath::Affine { base, slope } => {
                f.debug_struct("Affine").field("base", base).field("slope", slope).finish()
            }
            TimePath::Custom { dim, .. } => f.debug_struct("Custom").field("dim", dim).finish(),
        }
    }
}
