//! Per-sample tracking methods: prediction (exact or backward-differenced
//! time derivative), correction (gradient or truncated Newton), and the
//! composed step drivers, plus the running baselines that only correct.

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::graph::NetworkGraph;
use crate::objective::{global_gradient, mixed_time_gradient, ObjectiveOracle};
use crate::splitting::assemble_split;
use std::fmt;
use std::str::FromStr;

/// Which tracking method a configuration drives.
///
/// The four predictive variants pair a prediction mode (exact mixed time
/// derivative, or its backward-difference approximation) with a correction
/// type (gradient, or truncated Newton). The running baselines skip
/// prediction entirely.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    DpcG,
    DapcG,
    DpcN,
    DapcN,
    RunningGradient,
    RunningNewton,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::DpcG,
        Variant::DapcG,
        Variant::DpcN,
        Variant::DapcN,
        Variant::RunningGradient,
        Variant::RunningNewton,
    ];

    /// True for the four prediction-correction variants.
    pub fn predicts(self) -> bool {
        !self.is_running()
    }

    /// True when prediction uses the backward-differenced time derivative.
    pub fn backward_difference(self) -> bool {
        matches!(self, Variant::DapcG | Variant::DapcN)
    }

    /// True when corrections are truncated Newton steps.
    pub fn newton_correction(self) -> bool {
        matches!(self, Variant::DpcN | Variant::DapcN | Variant::RunningNewton)
    }

    pub fn is_running(self) -> bool {
        matches!(self, Variant::RunningGradient | Variant::RunningNewton)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::DpcG => "DPC-G",
            Variant::DapcG => "DAPC-G",
            Variant::DpcN => "DPC-N",
            Variant::DapcN => "DAPC-N",
            Variant::RunningGradient => "RG",
            Variant::RunningNewton => "RN",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "DPC-G" => Ok(Variant::DpcG),
            "DAPC-G" => Ok(Variant::DapcG),
            "DPC-N" => Ok(Variant::DpcN),
            "DAPC-N" => Ok(Variant::DapcN),
            "RG" => Ok(Variant::RunningGradient),
            "RN" => Ok(Variant::RunningNewton),
            other => Err(Error::Config(format!(
                "unknown variant {other:?}; expected one of DPC-G, DAPC-G, DPC-N, DAPC-N, RG, RN"
            ))),
        }
    }
}

/// Step-size schedule overriding the constant gamma.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GammaSchedule {
    /// gamma_j = 1 - coef/j at sampling instant j >= 1.
    DecayToOne { coef: f64 },
}

impl GammaSchedule {
    pub fn value(self, j: usize) -> f64 {
        match self {
            GammaSchedule::DecayToOne { coef } => 1.0 - coef / j.max(1) as f64,
        }
    }
}

/// Full parameterization of one tracking run.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodConfig {
    pub variant: Variant,
    /// Sampling period (time units between objective samples).
    pub h: f64,
    /// Prediction truncation level.
    pub k: usize,
    /// Correction truncation level (Newton corrections).
    pub k_prime: usize,
    /// Correction step size.
    pub gamma: f64,
    /// Corrections per sample.
    pub n_c: usize,
    /// Extra corrections per sample; running baselines only.
    pub n_ec: usize,
    pub gamma_schedule: Option<GammaSchedule>,
}

impl MethodConfig {
    pub fn new(variant: Variant, h: f64, k: usize, k_prime: usize, gamma: f64) -> Self {
        Self { variant, h, k, k_prime, gamma, n_c: 1, n_ec: 0, gamma_schedule: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) {
            return Err(Error::Config(format!("sampling period must be positive, got {}", self.h)));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::Config(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.variant.newton_correction() && self.gamma > 1.0 {
            return Err(Error::Config(format!(
                "Newton corrections require gamma in (0, 1], got {}",
                self.gamma
            )));
        }
        if self.n_c < 1 {
            return Err(Error::Config("need at least one correction per sample".into()));
        }
        if self.n_ec > 0 && !self.variant.is_running() {
            return Err(Error::Config(
                "extra corrections apply only to the running baselines".into(),
            ));
        }
        Ok(())
    }

    /// Step size used when correcting at sampling instant j.
    pub fn gamma_at(&self, j: usize) -> f64 {
        self.gamma_schedule.map_or(self.gamma, |s| s.value(j))
    }

    /// Corrections applied per sample, counting the running baselines' extra ones.
    pub fn corrections_per_sample(&self) -> usize {
        self.n_c + if self.variant.is_running() { self.n_ec } else { 0 }
    }
}

/// Iterate, step index, sample time, and the cached gradient of the previous
/// objective at the current iterate (backward-difference variants, k >= 1).
#[derive(Clone, Debug)]
pub struct MethodState {
    pub y: BlockVector,
    pub previous_gradient: Option<BlockVector>,
    pub k: usize,
    pub t: f64,
}

impl MethodState {
    pub fn initial(y0: BlockVector, t0: f64) -> Self {
        Self { y: y0, previous_gradient: None, k: 0, t: t0 }
    }

    /// Zero initial iterate, the default start.
    pub fn zero_start(graph: &NetworkGraph, t0: f64) -> Self {
        Self::initial(BlockVector::zeros(graph.n(), graph.p()), t0)
    }
}

/// How the prediction obtains d/dt grad F.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeDerivativeMode {
    /// Query the oracle's analytic mixed time derivative.
    Exact,
    /// Backward-difference two gradients h apart (needs k >= 1; the first
    /// step predicts in place).
    Backward,
}

/// (grad F(y;t_k) - grad F(y;t_{k-1})) / h, both gradients at the same y.
pub fn backward_time_derivative(
    current_gradient: &BlockVector,
    previous_gradient: &BlockVector,
    h: f64,
) -> BlockVector {
    let mut d = current_gradient - previous_gradient;
    d.scale_mut(1.0 / h);
    d
}

/// One prediction: y + h p with p = -(truncated Hessian inverse) applied to
/// the (exact or approximated) time derivative of the gradient, truncated at
/// level `config.k`. With no usable time derivative (backward mode at k=0),
/// p = 0 and the iterate is returned unchanged.
pub fn predict<O: ObjectiveOracle + ?Sized>(
    state: &MethodState,
    oracle: &O,
    graph: &NetworkGraph,
    config: &MethodConfig,
    mode: TimeDerivativeMode,
) -> Result<BlockVector> {
    let td = match mode {
        TimeDerivativeMode::Exact => mixed_time_gradient(oracle, graph, &state.y, state.t),
        TimeDerivativeMode::Backward => match &state.previous_gradient {
            Some(prev) if state.k >= 1 => {
                let cur = global_gradient(oracle, graph, &state.y, state.t);
                backward_time_derivative(&cur, prev, config.h)
            }
            _ => return Ok(state.y.clone()),
        },
    };
    let split = assemble_split(oracle, graph, &state.y, state.t)?;
    let p = split.truncated_solve(&(&td * -1.0), config.k);
    Ok(&state.y + &(&p * config.h))
}

/// One gradient correction at the newly sampled time.
pub fn correct_gradient<O: ObjectiveOracle + ?Sized>(
    predicted: &BlockVector,
    oracle: &O,
    graph: &NetworkGraph,
    t_next: f64,
    gamma: f64,
) -> BlockVector {
    let g = global_gradient(oracle, graph, predicted, t_next);
    predicted - &(&g * gamma)
}

/// One truncated Newton correction: the split is re-assembled at the
/// predicted point and the new time, and the gradient is pushed through the
/// K'-truncated inverse.
pub fn correct_newton<O: ObjectiveOracle + ?Sized>(
    predicted: &BlockVector,
    oracle: &O,
    graph: &NetworkGraph,
    t_next: f64,
    gamma: f64,
    k_prime: usize,
) -> Result<BlockVector> {
    let g = global_gradient(oracle, graph, predicted, t_next);
    let split = assemble_split(oracle, graph, predicted, t_next)?;
    let d = split.truncated_solve(&g, k_prime);
    Ok(predicted - &(&d * gamma))
}

/// Advances one sampling interval: predict (if the variant predicts), then
/// apply every correction at the new sample time, then refresh the cached
/// previous-objective gradient for backward-difference variants.
pub fn step<O: ObjectiveOracle + ?Sized>(
    state: &MethodState,
    oracle: &O,
    graph: &NetworkGraph,
    config: &MethodConfig,
) -> Result<MethodState> {
    let t_next = state.t + config.h;
    let gamma = config.gamma_at(state.k + 1);
    let mut y = if config.variant.predicts() {
        let mode = if config.variant.backward_difference() {
            TimeDerivativeMode::Backward
        } else {
            TimeDerivativeMode::Exact
        };
        predict(state, oracle, graph, config, mode)?
    } else {
        state.y.clone()
    };
    for _ in 0..config.corrections_per_sample() {
        y = if config.variant.newton_correction() {
            correct_newton(&y, oracle, graph, t_next, gamma, config.k_prime)?
        } else {
            correct_gradient(&y, oracle, graph, t_next, gamma)
        };
    }
    let previous_gradient = if config.variant.backward_difference() {
        Some(global_gradient(oracle, graph, &y, state.t))
    } else {
        None
    };
    Ok(MethodState { y, previous_gradient, k: state.k + 1, t: t_next })
}

/// Runs `steps` intervals from `state`, returning all iterates including the
/// start (length steps + 1) and the post-prediction points (length steps;
/// equal to the pre-correction iterate for non-predicting variants).
pub fn run<O: ObjectiveOracle + ?Sized>(
    mut state: MethodState,
    oracle: &O,
    graph: &NetworkGraph,
    config: &MethodConfig,
    steps: usize,
) -> Result<(Vec<BlockVector>, Vec<BlockVector>)> {
    config.validate()?;
    let mut trajectory = Vec::with_capacity(steps + 1);
    let mut predicted = Vec::with_capacity(steps);
    trajectory.push(state.y.clone());
    for _ in 0..steps {
        let pred = if config.variant.predicts() {
            let mode = if config.variant.backward_difference() {
                TimeDerivativeMode::Backward
            } else {
                TimeDerivativeMode::Exact
            };
            predict(&state, oracle, graph, config, mode)?
        } else {
            state.y.clone()
        };
        predicted.push(pred);
        state = step(&state, oracle, graph, config)?;
        trajectory.push(state.y.clone());
    }
    Ok((trajectory, predicted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::SyntheticQuadratic;
    use crate::timefn::TimePath;
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};

    fn single_node_cosine(omega: f64) -> (NetworkGraph, SyntheticQuadratic) {
        let graph = NetworkGraph::new(1, 1, vec![]).unwrap();
        let q = SyntheticQuadratic::new(
            graph.clone(),
            vec![DMatrix::identity(1, 1)],
            vec![TimePath::Cosine {
                amp: DVector::from_element(1, 1.0),
                phase: DVector::zeros(1),
                omega,
            }],
            vec![],
        )
        .unwrap();
        (graph, q)
    }

    #[test]
    fn time_invariant_prediction_is_identity() {
        let graph = NetworkGraph::new(2, 1, vec![(0, 1)]).unwrap();
        let q = SyntheticQuadratic::new(
            graph.clone(),
            vec![DMatrix::identity(1, 1) * 2.0, DMatrix::identity(1, 1) * 3.0],
            vec![
                TimePath::Constant(DVector::from_element(1, 1.0)),
                TimePath::Constant(DVector::from_element(1, -2.0)),
            ],
            vec![0.3],
        )
        .unwrap();
        let state = MethodState::initial(
            BlockVector::from_vector(2, 1, DVector::from_vec(vec![0.5, 0.7])),
            0.0,
        );
        let config = MethodConfig::new(Variant::DpcG, 0.1, 3, 0, 0.2);
        let pred = predict(&state, &q, &graph, &config, TimeDerivativeMode::Exact).unwrap();
        assert_eq!(pred.as_vector(), state.y.as_vector());
    }

    #[test]
    fn scalar_cosine_prediction_matches_hand_formula() {
        // f = (1/2)(y - cos t)^2: d/dt grad = sin t, so p = -sin t.
        let (graph, q) = single_node_cosine(1.0);
        let t = 0.8;
        let y0 = 0.3;
        let state =
            MethodState::initial(BlockVector::from_vector(1, 1, DVector::from_element(1, y0)), t);
        for k in [0usize, 4] {
            let config = MethodConfig::new(Variant::DpcG, 0.05, k, 0, 0.5);
            let pred = predict(&state, &q, &graph, &config, TimeDerivativeMode::Exact).unwrap();
            assert_relative_eq!(pred.block(0)[0], y0 - 0.05 * t.sin(), epsilon = 1e-14);
        }
    }

    #[test]
    fn backward_difference_is_exact_for_affine_drift() {
        let graph = NetworkGraph::new(1, 1, vec![]).unwrap();
        let q = SyntheticQuadratic::new(
            graph.clone(),
            vec![DMatrix::identity(1, 1)],
            vec![TimePath::Affine {
                base: DVector::from_element(1, 1.0),
                slope: DVector::from_element(1, -0.7),
            }],
            vec![],
        )
        .unwrap();
        let y = BlockVector::from_vector(1, 1, DVector::from_element(1, 0.2));
        let (t, h) = (2.0, 0.25);
        let cur = global_gradient(&q, &graph, &y, t);
        let prev = global_gradient(&q, &graph, &y, t - h);
        let td = backward_time_derivative(&cur, &prev, h);
        let exact = crate::objective::mixed_time_gradient(&q, &graph, &y, t);
        assert_relative_eq!(td.block(0)[0], exact.block(0)[0], epsilon = 1e-12);
        assert_relative_eq!(td.block(0)[0], 0.7, epsilon = 1e-12);
    }

    #[test]
    fn backward_mode_first_step_predicts_in_place() {
        let (graph, q) = single_node_cosine(0.5);
        let state = MethodState::zero_start(&graph, 0.0);
        let config = MethodConfig::new(Variant::DapcG, 0.1, 2, 0, 0.5);
        let pred = predict(&state, &q, &graph, &config, TimeDerivativeMode::Backward).unwrap();
        assert_eq!(pred.as_vector(), state.y.as_vector());
    }

    #[test]
    fn gradient_correction_contracts_by_exact_affine_factor() {
        // (1/2) m0 (y - a)^2: distance to a scales by |1 - gamma m0| per step.
        let graph = NetworkGraph::new(1, 1, vec![]).unwrap();
        let m0 = 2.5;
        let a = 1.0;
        let q = SyntheticQuadratic::new(
            graph.clone(),
            vec![DMatrix::from_element(1, 1, m0)],
            vec![TimePath::Constant(DVector::from_element(1, a))],
            vec![],
        )
        .unwrap();
        let gamma = 0.3;
        let y = BlockVector::from_vector(1, 1, DVector::from_element(1, 4.0));
        let corrected = correct_gradient(&y, &q, &graph, 0.0, gamma);
        let expect = a + (1.0 - gamma * m0) * (4.0 - a);
        assert_relative_eq!(corrected.block(0)[0], expect, epsilon = 1e-14);
    }

    #[test]
    fn newton_correction_is_exact_on_decoupled_quadratic() {
        let graph = NetworkGraph::new(2, 2, vec![(0, 1)]).unwrap();
        let q = SyntheticQuadratic::new(
            graph.clone(),
            vec![
                DMatrix::from_row_slice(2, 2, &[2.0, 0.4, 0.4, 1.5]),
                DMatrix::from_row_slice(2, 2, &[3.0, -0.2, -0.2, 2.5]),
            ],
            vec![
                TimePath::Constant(DVector::from_vec(vec![1.0, -1.0])),
                TimePath::Constant(DVector::from_vec(vec![0.5, 2.0])),
            ],
            vec![0.0],
        )
        .unwrap();
        let y = BlockVector::from_vector(2, 2, DVector::from_vec(vec![5.0, -3.0, 2.0, 7.0]));
        // B = 0 and K' = 0 is a full Newton step on a quadratic.
        let corrected = correct_newton(&y, &q, &graph, 0.0, 1.0, 0).unwrap();
        let minimizer = q.exact_minimizer(0.0);
        assert_relative_eq!(corrected.as_vector(), minimizer.as_vector(), epsilon = 1e-12);
    }

    #[test]
    fn deep_truncation_newton_reaches_coupled_minimizer() {
        let graph = NetworkGraph::new(3, 1, vec![(0, 1), (1, 2)]).unwrap();
        let q = SyntheticQuadratic::new(
            graph.clone(),
            (0..3).map(|_| DMatrix::identity(1, 1) * 2.0).collect(),
            vec![
                TimePath::Constant(DVector::from_element(1, 1.0)),
                TimePath::Constant(DVector::from_element(1, -2.0)),
                TimePath::Constant(DVector::from_element(1, 0.5)),
            ],
            vec![0.8, 0.8],
        )
        .unwrap();
        let y = BlockVector::zeros(3, 1);
        let corrected = correct_newton(&y, &q, &graph, 0.0, 1.0, 60).unwrap();
        let minimizer = q.exact_minimizer(0.0);
        assert!((corrected.as_vector() - minimizer.as_vector()).norm() < 1e-10);
    }

    #[test]
    fn tiny_gamma_barely_moves_the_iterate() {
        let (graph, q) = single_node_cosine(0.3);
        let state = MethodState::zero_start(&graph, 0.0);
        let gamma = 1e-6;
        let config = MethodConfig::new(Variant::DpcG, 0.1, 0, 0, gamma);
        config.validate().unwrap();
        let next = step(&state, &q, &graph, &config).unwrap();
        let pred = predict(&state, &q, &graph, &config, TimeDerivativeMode::Exact).unwrap();
        let g = global_gradient(&q, &graph, &pred, 0.1);
        assert!((&next.y - &pred).norm() <= gamma * g.norm() + 1e-18);
    }

    #[test]
    fn validation_rules() {
        let mut c = MethodConfig::new(Variant::DpcN, 0.1, 2, 2, 1.5);
        assert!(c.validate().is_err(), "Newton gamma above 1 must be rejected");
        c.gamma = 1.0;
        assert!(c.validate().is_ok());
        c.n_ec = 2;
        assert!(c.validate().is_err(), "extra corrections are for running baselines");
        c.variant = Variant::RunningNewton;
        assert!(c.validate().is_ok());
        c.h = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn gamma_schedule_climbs_toward_one() {
        let s = GammaSchedule::DecayToOne { coef: 0.9 };
        assert_relative_eq!(s.value(1), 0.1);
        assert_relative_eq!(s.value(9), 0.9);
        assert!(s.value(1000) > 0.999);
        let mut c = MethodConfig::new(Variant::DpcG, 0.1, 1, 0, 1.0);
        c.gamma_schedule = Some(s);
        assert_relative_eq!(c.gamma_at(2), 0.55);
    }

    #[test]
    fn running_baseline_applies_extra_corrections() {
        let (graph, q) = single_node_cosine(0.2);
        let mut with_extra = MethodConfig::new(Variant::RunningGradient, 0.1, 0, 0, 0.4);
        with_extra.n_c = 1;
        with_extra.n_ec = 3;
        let mut manual = MethodConfig::new(Variant::RunningGradient, 0.1, 0, 0, 0.4);
        manual.n_c = 4;
        let state = MethodState::zero_start(&graph, 0.0);
        let a = step(&state, &q, &graph, &with_extra).unwrap();
        let b = step(&state, &q, &graph, &manual).unwrap();
        assert_eq!(a.y.as_vector(), b.y.as_vector());
    }

    #[test]
    fn dapc_state_carries_previous_gradient() {
        let (graph, q) = single_node_cosine(0.4);
        let config = MethodConfig::new(Variant::DapcN, 0.1, 2, 2, 1.0);
        let (trajectory, _) =
            run(MethodState::zero_start(&graph, 0.0), &q, &graph, &config, 3).unwrap();
        assert_eq!(trajectory.len(), 4);
        let mut state = MethodState::zero_start(&graph, 0.0);
        state = step(&state, &q, &graph, &config).unwrap();
        let prev = state.previous_gradient.as_ref().expect("cached after first step");
        let expect = global_gradient(&q, &graph, &state.y, 0.0);
        assert_eq!(prev.as_vector(), expect.as_vector());
    }
}
