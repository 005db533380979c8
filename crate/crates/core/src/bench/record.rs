//! Per-run tracking metrics and their CSV rendering.

use crate::algorithms::MethodConfig;
use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::netsim::SimResult;

/// Step-by-step record of one tracking run: sample times, tracking error
/// after correction, error of the point the correction started from (the
/// prediction for predictive variants), and cumulative communication. Row k
/// describes the iterate at t_k; row 0 is the start, so its pre-correction
/// error equals its error and its communication counts are zero.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub config: MethodConfig,
    pub seed: u64,
    pub t: Vec<f64>,
    pub err: Vec<f64>,
    pub err_pred: Vec<f64>,
    pub rounds_cum: Vec<u64>,
    pub scalars_cum: Vec<u64>,
    pub iterates: Option<Vec<BlockVector>>,
}

impl RunRecord {
    /// Assembles a record from a simulation and the reference trajectory at
    /// the same sample times (lengths steps + 1).
    pub fn from_sim(
        config: &MethodConfig,
        seed: u64,
        t0: f64,
        sim: &SimResult,
        reference: &[BlockVector],
        keep_iterates: bool,
    ) -> Result<Self> {
        let steps = sim.predicted.len();
        if sim.trajectory.len() != steps + 1 || reference.len() != steps + 1 {
            return Err(Error::Dimension(format!(
                "trajectory has {} points, reference {}, expected {}",
                sim.trajectory.len(),
                reference.len(),
                steps + 1
            )));
        }
        let mut t = Vec::with_capacity(steps + 1);
        let mut err = Vec::with_capacity(steps + 1);
        let mut err_pred = Vec::with_capacity(steps + 1);
        let mut rounds_cum = Vec::with_capacity(steps + 1);
        let mut scalars_cum = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            t.push(t0 + k as f64 * config.h);
            err.push((&sim.trajectory[k] - &reference[k]).norm());
            err_pred.push(if k == 0 {
                err[0]
            } else {
                (&sim.predicted[k - 1] - &reference[k]).norm()
            });
            if k == 0 {
                rounds_cum.push(0);
                scalars_cum.push(0);
            } else {
                let l = &sim.ledger_steps[k - 1];
                rounds_cum.push(l.total_rounds());
                scalars_cum.push(l.scalars_per_node);
            }
        }
        Ok(Self {
            config: config.clone(),
            seed,
            t,
            err,
            err_pred,
            rounds_cum,
            scalars_cum,
            iterates: keep_iterates.then(|| sim.trajectory.clone()),
        })
    }

    pub fn steps(&self) -> usize {
        self.err.len().saturating_sub(1)
    }

    /// CSV with one row per sample, deterministic byte-for-byte.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,t,err,err_pred,rounds_cum,scalars_cum\n");
        for k in 0..self.t.len() {
            s.push_str(&format!(
                "{},{},{:e},{:e},{},{}\n",
                k, self.t[k], self.err[k], self.err_pred[k], self.rounds_cum[k], self.scalars_cum[k]
            ));
        }
        s
    }
}

/// Cutoff for plateau measurement: a fixed warm-up of hundreds of samples
/// would swallow short runs entirely, so scale it as the later of half the
/// run and all but 200 steps.
pub fn default_k_bar(steps: usize) -> usize {
    (steps / 2).max(steps.saturating_sub(200))
}

/// Plateau metric: the worst tracking error after the warm-up cutoff,
/// max_{k > k_bar} err_k.
pub fn asymptotic_error(record: &RunRecord, k_bar: usize) -> Result<f64> {
    if record.err.len() <= k_bar + 1 {
        return Err(Error::Config(format!(
            "record has {} rows; need more than k_bar + 1 = {}",
            record.err.len(),
            k_bar + 1
        )));
    }
    Ok(record.err[k_bar + 1..].iter().fold(0.0f64, |a, &b| a.max(b)))
}
