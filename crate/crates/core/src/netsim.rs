//! Synchronous message-passing execution of the tracking methods.
//!
//! Every quantity a node uses is either local state or the content of a
//! neighbor message from the current round, so a run here certifies the
//! methods are implementable on the network: no node ever touches the global
//! iterate. Trajectories match the direct drivers in [`crate::algorithms`]
//! bit for bit because each node applies the same formulas in the same
//! neighbor order.

use crate::algorithms::{backward_time_derivative, MethodConfig};
use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::graph::NetworkGraph;
use crate::objective::ObjectiveOracle;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;

/// Per-node inbox, keyed by sender so delivery order cannot matter.
#[derive(Clone, Debug, Default)]
pub struct NodeMailbox {
    slots: BTreeMap<usize, DVector<f64>>,
}

impl NodeMailbox {
    pub fn deposit(&mut self, from: usize, payload: DVector<f64>) {
        self.slots.insert(from, payload);
    }

    pub fn get(&self, from: usize) -> Option<&DVector<f64>> {
        self.slots.get(&from)
    }

    pub fn clear(&mut self) {
        self.slots.clear();
    }
}

/// Cumulative communication counts. Rounds are synchronous network rounds;
/// scalars are per node, counting each node's broadcast payload once per
/// round (p scalars), not per-edge copies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CommLedger {
    pub prediction_rounds: u64,
    pub correction_rounds: u64,
    pub scalars_per_node: u64,
    pub messages: u64,
}

impl CommLedger {
    pub fn total_rounds(&self) -> u64 {
        self.prediction_rounds + self.correction_rounds
    }
}

/// Static per-step communication cost of a configuration on blocks of
/// dimension p. Prediction spends K+1 rounds (the first exchanges the
/// corrected variable, the rest run the truncated-series sweeps); each
/// gradient correction spends 1 round and each Newton correction K'+1.
/// Running baselines have no prediction phase and fold their extra
/// corrections into the correction count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CommRequirements {
    pub prediction_rounds: usize,
    pub correction_rounds: usize,
    pub scalars_per_node: usize,
}

pub fn comm_requirements(config: &MethodConfig, p: usize) -> CommRequirements {
    let prediction_rounds = if config.variant.predicts() { config.k + 1 } else { 0 };
    let per_correction =
        if config.variant.newton_correction() { config.k_prime + 1 } else { 1 };
    let correction_rounds = config.corrections_per_sample() * per_correction;
    CommRequirements {
        prediction_rounds,
        correction_rounds,
        scalars_per_node: (prediction_rounds + correction_rounds) * p,
    }
}

/// Adds `delta` to the first payload entry of the message matching
/// (step, round, from, to); rounds index all rounds within a step from 0,
/// prediction before correction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tamper {
    pub step: usize,
    pub round: usize,
    pub from: usize,
    pub to: usize,
    pub delta: f64,
}

#[derive(Clone, Debug)]
pub struct SimOptions {
    pub t0: f64,
    /// Record one line per delivered message.
    pub trace: bool,
    /// Shuffle message delivery order per round with this seed.
    pub shuffle_seed: Option<u64>,
    pub tamper: Option<Tamper>,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { t0: 0.0, trace: false, shuffle_seed: None, tamper: None }
    }
}

/// Outcome of a decentralized run: iterates after each correction (length
/// steps + 1 including the start), post-prediction points (length steps),
/// cumulative ledger snapshots after each step, and the full ledger.
#[derive(Clone, Debug)]
pub struct SimResult {
    pub trajectory: Vec<BlockVector>,
    pub predicted: Vec<BlockVector>,
    pub ledger: CommLedger,
    pub ledger_steps: Vec<CommLedger>,
    pub trace: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    Prediction,
    Correction,
}

impl Phase {
    fn name(self) -> &'static str {
        match self {
            Phase::Prediction => "prediction",
            Phase::Correction => "correction",
        }
    }
}

/// One node's private memory between rounds.
struct NodeState {
    y: DVector<f64>,
    /// Working iterate during correction.
    z: DVector<f64>,
    /// Sweep buffer.
    x: DVector<f64>,
    /// Right-hand side of the active truncated solve.
    v: DVector<f64>,
    chol: Option<Cholesky<f64, Dyn>>,
    /// Coupling blocks toward each neighbor, rebuilt whenever the split is.
    b_rows: BTreeMap<usize, DMatrix<f64>>,
    neighbor_y: BTreeMap<usize, DVector<f64>>,
}

struct Network<'a, O: ObjectiveOracle + ?Sized> {
    oracle: &'a O,
    graph: &'a NetworkGraph,
    nodes: Vec<NodeState>,
    mailboxes: Vec<NodeMailbox>,
    ledger: CommLedger,
    trace: Vec<String>,
    options: SimOptions,
    rng: Option<ChaCha12Rng>,
    step: usize,
    round_in_step: usize,
}

impl<'a, O: ObjectiveOracle + ?Sized> Network<'a, O> {
    fn new(oracle: &'a O, graph: &'a NetworkGraph, y0: &BlockVector, options: SimOptions) -> Self {
        let nodes = (0..graph.n())
            .map(|i| NodeState {
                y: y0.block_owned(i),
                z: DVector::zeros(graph.p()),
                x: DVector::zeros(graph.p()),
                v: DVector::zeros(graph.p()),
                chol: None,
                b_rows: BTreeMap::new(),
                neighbor_y: BTreeMap::new(),
            })
            .collect();
        let rng = options.shuffle_seed.map(ChaCha12Rng::seed_from_u64);
        Self {
            oracle,
            graph,
            nodes,
            mailboxes: vec![NodeMailbox::default(); graph.n()],
            ledger: CommLedger::default(),
            trace: Vec::new(),
            options,
            rng,
            step: 0,
            round_in_step: 0,
        }
    }

    /// Synchronous round: every node broadcasts `payload(i)` to its
    /// neighbors, then all mailboxes are swapped in. Counts one round and p
    /// scalars per node on the ledger.
    fn exchange(&mut self, phase: Phase, payload: impl Fn(&NodeState) -> DVector<f64>) {
        let mut deliveries: Vec<(usize, usize, DVector<f64>)> = Vec::new();
        for i in 0..self.graph.n() {
            let msg = payload(&self.nodes[i]);
            for &j in self.graph.neighbors(i) {
                deliveries.push((i, j, msg.clone()));
            }
        }
        if let Some(rng) = &mut self.rng {
            deliveries.shuffle(rng);
        }
        for m in &mut self.mailboxes {
            m.clear();
        }
        for (from, to, mut payload) in deliveries {
            if let Some(t) = self.options.tamper {
                if t.step == self.step
                    && t.round == self.round_in_step
                    && t.from == from
                    && t.to == to
                    && !payload.is_empty()
                {
                    payload[0] += t.delta;
                }
            }
            if self.options.trace {
                self.trace.push(format!(
                    "step={} phase={} round={} from={} to={} norm={:.9e}",
                    self.step,
                    phase.name(),
                    self.round_in_step,
                    from,
                    to,
                    payload.norm()
                ));
            }
            self.ledger.messages += 1;
            self.mailboxes[to].deposit(from, payload);
        }
        match phase {
            Phase::Prediction => self.ledger.prediction_rounds += 1,
            Phase::Correction => self.ledger.correction_rounds += 1,
        }
        self.ledger.scalars_per_node += self.graph.p() as u64;
        self.round_in_step += 1;
    }

    /// Copies each node's inbox into its neighbor-value map.
    fn absorb_neighbor_values(&mut self) {
        for i in 0..self.graph.n() {
            let node = &mut self.nodes[i];
            node.neighbor_y.clear();
            for &j in self.graph.neighbors(i) {
                let payload = self.mailboxes[i]
                    .get(j)
                    .expect("synchronous round delivers every neighbor message");
                node.neighbor_y.insert(j, payload.clone());
            }
        }
    }

    /// Assembles each node's diagonal block, its Cholesky factor, and the
    /// coupling blocks toward its neighbors at (point held in neighbor_y and
    /// `own(i)`, t). Neighbor order and orientation handling match the
    /// centralized split exactly.
    fn assemble_local_split(
        &mut self,
        own: impl Fn(&NodeState) -> DVector<f64>,
        t: f64,
    ) -> Result<()> {
        for i in 0..self.graph.n() {
            let yi = own(&self.nodes[i]);
            let yiv = yi.as_view();
            let mut d = self.oracle.f_hessian(i, yiv, t) + self.oracle.g_node_hessian(i, yiv, t);
            let mut b_rows = BTreeMap::new();
            for &j in self.graph.neighbors(i) {
                let yj = &self.nodes[i].neighbor_y[&j];
                d += self.oracle.edge_hessian_own(i, j, yiv, yj.as_view(), t);
                let b = if i < j {
                    -self.oracle.edge_hessian_cross(i, j, yiv, yj.as_view(), t)
                } else {
                    (-self.oracle.edge_hessian_cross(j, i, yj.as_view(), yiv, t)).transpose()
                };
                b_rows.insert(j, b);
            }
            let chol = d.cholesky().ok_or(Error::NotPositiveDefinite { node: i })?;
            let node = &mut self.nodes[i];
            node.chol = Some(chol);
            node.b_rows = b_rows;
        }
        Ok(())
    }

    /// Gradient block of the global objective at node i, evaluated from the
    /// node's own block and its neighbor-value map.
    fn local_gradient(&self, i: usize, yi: &DVector<f64>, t: f64) -> DVector<f64> {
        let yiv = yi.as_view();
        let mut g = self.oracle.f_gradient(i, yiv, t) + self.oracle.g_node_gradient(i, yiv, t);
        for &j in self.graph.neighbors(i) {
            g += self.oracle.edge_gradient(i, j, yiv, self.nodes[i].neighbor_y[&j].as_view(), t);
        }
        g
    }

    fn local_time_gradient(&self, i: usize, yi: &DVector<f64>, t: f64) -> DVector<f64> {
        let yiv = yi.as_view();
        let mut g =
            self.oracle.f_time_gradient(i, yiv, t) + self.oracle.g_node_time_gradient(i, yiv, t);
        for &j in self.graph.neighbors(i) {
            g += self
                .oracle
                .edge_time_gradient(i, j, yiv, self.nodes[i].neighbor_y[&j].as_view(), t);
        }
        g
    }

    /// One truncated-series sweep after an x-exchange round: node i reads its
    /// neighbors' previous sweep values from its mailbox.
    fn sweep(&mut self) {
        let mut next: Vec<DVector<f64>> = Vec::with_capacity(self.graph.n());
        for i in 0..self.graph.n() {
            let node = &self.nodes[i];
            let mut acc = DVector::zeros(self.graph.p());
            for &j in self.graph.neighbors(i) {
                let xj = self.mailboxes[i].get(j).expect("neighbor sweep value");
                acc += &node.b_rows[&j] * xj;
            }
            let rhs = acc + &node.v;
            next.push(node.chol.as_ref().expect("split assembled").solve(&rhs));
        }
        for (node, x) in self.nodes.iter_mut().zip(next) {
            node.x = x;
        }
    }

    fn snapshot(&self, which: impl Fn(&NodeState) -> DVector<f64>) -> BlockVector {
        BlockVector::from_block_fn(self.graph.n(), self.graph.p(), |i| which(&self.nodes[i]))
    }
}

/// Runs `steps` sampling intervals of `config` with every inter-node data
/// movement passing through mailboxes. Behaviorally identical to driving
/// [`crate::algorithms::step`] directly.
pub fn run_decentralized<O: ObjectiveOracle + ?Sized>(
    config: &MethodConfig,
    oracle: &O,
    graph: &NetworkGraph,
    y0: &BlockVector,
    steps: usize,
) -> Result<SimResult> {
    run_decentralized_with(config, oracle, graph, y0, steps, SimOptions::default())
}

pub fn run_decentralized_with<O: ObjectiveOracle + ?Sized>(
    config: &MethodConfig,
    oracle: &O,
    graph: &NetworkGraph,
    y0: &BlockVector,
    steps: usize,
    options: SimOptions,
) -> Result<SimResult> {
    config.validate()?;
    if y0.n() != graph.n() || y0.p() != graph.p() {
        return Err(Error::Dimension(format!(
            "start iterate is {}x{} blocks but the graph is {}x{}",
            y0.n(),
            y0.p(),
            graph.n(),
            graph.p()
        )));
    }
    let t0 = options.t0;
    let mut net = Network::new(oracle, graph, y0, options);
    let mut trajectory = Vec::with_capacity(steps + 1);
    let mut predicted = Vec::with_capacity(steps);
    let mut ledger_steps = Vec::with_capacity(steps);
    trajectory.push(net.snapshot(|n| n.y.clone()));

    // Each node remembers the previous sample time as a value rather than
    // recomputing t - h, which need not reproduce the same float.
    let mut t = t0;
    let mut t_prev = t0;
    for k in 0..steps {
        net.step = k;
        net.round_in_step = 0;
        let t_next = t + config.h;
        let gamma = config.gamma_at(k + 1);

        if config.variant.predicts() {
            // Round 0 ships the corrected variable; it funds split assembly
            // and the time-derivative evaluations.
            net.exchange(Phase::Prediction, |n| n.y.clone());
            net.absorb_neighbor_values();
            net.assemble_local_split(|n| n.y.clone(), t)?;
            for i in 0..graph.n() {
                let yi = net.nodes[i].y.clone();
                let v = if config.variant.backward_difference() {
                    if k == 0 {
                        DVector::zeros(graph.p())
                    } else {
                        let cur = net.local_gradient(i, &yi, t);
                        let prev = net.local_gradient(i, &yi, t_prev);
                        let cur_b = BlockVector::from_vector(1, graph.p(), cur);
                        let prev_b = BlockVector::from_vector(1, graph.p(), prev);
                        let td = backward_time_derivative(&cur_b, &prev_b, config.h);
                        (&td * -1.0).into_vector()
                    }
                } else {
                    self_negate(net.local_time_gradient(i, &yi, t))
                };
                let node = &mut net.nodes[i];
                node.x = node.chol.as_ref().expect("split assembled").solve(&v);
                node.v = v;
            }
            for _ in 0..config.k {
                net.exchange(Phase::Prediction, |n| n.x.clone());
                net.sweep();
            }
            for node in &mut net.nodes {
                node.z = &node.y + &node.x * config.h;
            }
        } else {
            for node in &mut net.nodes {
                node.z = node.y.clone();
            }
        }
        predicted.push(net.snapshot(|n| n.z.clone()));

        for _ in 0..config.corrections_per_sample() {
            net.exchange(Phase::Correction, |n| n.z.clone());
            net.absorb_neighbor_values();
            if config.variant.newton_correction() {
                net.assemble_local_split(|n| n.z.clone(), t_next)?;
                for i in 0..graph.n() {
                    let zi = net.nodes[i].z.clone();
                    let g = net.local_gradient(i, &zi, t_next);
                    let node = &mut net.nodes[i];
                    node.x = node.chol.as_ref().expect("split assembled").solve(&g);
                    node.v = g;
                }
                for _ in 0..config.k_prime {
                    net.exchange(Phase::Correction, |n| n.x.clone());
                    net.sweep();
                }
                for node in &mut net.nodes {
                    node.z = &node.z - &(&node.x * gamma);
                }
            } else {
                for i in 0..graph.n() {
                    let zi = net.nodes[i].z.clone();
                    let g = net.local_gradient(i, &zi, t_next);
                    net.nodes[i].z = zi - g * gamma;
                }
            }
        }

        for node in &mut net.nodes {
            node.y = node.z.clone();
        }
        trajectory.push(net.snapshot(|n| n.y.clone()));
        ledger_steps.push(net.ledger);
        t_prev = t;
        t = t_next;
    }

    Ok(SimResult {
        trajectory,
        predicted,
        ledger: net.ledger,
        ledger_steps,
        trace: net.trace,
    })
}

fn self_negate(mut v: DVector<f64>) -> DVector<f64> {
    v.neg_mut();
    v
}
