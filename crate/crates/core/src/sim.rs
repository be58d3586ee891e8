//! Round-based network engine.
//!
//! Every round runs four phases in a fixed order: estimate the network mean
//! energy, elect heads, attach every other alive node to its nearest head,
//! then charge each node for what it sent, received and fused. Deaths take
//! effect only after all charges of the round have been applied.
//!
//! Randomness comes from a single [`SimRng`] seeded from the config: first
//! two draws per node for placement, then exactly one uniform draw per alive
//! node per round in ascending id order, whether or not the node is eligible.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::election::{
    average_energy_estimate, ch_threshold, class_counts, election_probability, epoch_length,
    initial_energy, lifetime_estimate, total_energy, HeterogeneityParams, NodeClass, Strategy,
};
use crate::energy::{
    aggregation_energy, avg_dist_to_bs, optimal_cluster_count, round_energy, rx_energy, tx_energy,
    RadioParams,
};
use crate::error::{ConfigError, DomainError, SimError};
use crate::metrics::{summarize, SimSummary};

/// Generator driving every random decision in a run.
pub type SimRng = ChaCha8Rng;

/// Identity of [`SimRng`] and the variate mapping, written to run metadata.
pub const RNG_ALGORITHM: &str =
    "ChaCha8Rng (rand_chacha 0.9, seed_from_u64); uniform f64 in [0,1) via rand 0.9 StandardUniform";

pub fn seeded_rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_nodes: u64,
    pub field_side: f64,
    pub bs_x: f64,
    pub bs_y: f64,
    pub radio: RadioParams,
    pub het: HeterogeneityParams,
    pub strategy: Strategy,
    pub seed: u64,
    /// Hard stop; a run that reaches it with nodes alive is truncated.
    pub max_rounds: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_nodes: 100,
            field_side: 100.0,
            bs_x: 50.0,
            bs_y: 50.0,
            radio: RadioParams::default(),
            het: HeterogeneityParams::default(),
            strategy: Strategy::Beenish,
            seed: 1,
            max_rounds: 20_000,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_nodes == 0 {
            return Err(ConfigError::invalid("sim.n_nodes", "must be at least 1"));
        }
        if !(self.field_side.is_finite() && self.field_side > 0.0) {
            return Err(ConfigError::invalid(
                "sim.field_side",
                "must be finite and > 0",
            ));
        }
        if !self.bs_x.is_finite() {
            return Err(ConfigError::invalid("sim.bs_x", "must be finite"));
        }
        if !self.bs_y.is_finite() {
            return Err(ConfigError::invalid("sim.bs_y", "must be finite"));
        }
        if self.max_rounds == 0 {
            return Err(ConfigError::invalid("sim.max_rounds", "must be at least 1"));
        }
        self.radio.validate()?;
        self.het.validate()?;
        class_counts(self.n_nodes, &self.het)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub class: NodeClass,
    pub initial_energy: f64,
    pub residual_energy: f64,
    pub alive: bool,
    /// First round in which the node may stand for election again.
    pub ch_blocked_until: u64,
}

impl NodeState {
    fn dist_sq(&self, x: f64, y: f64) -> f64 {
        let dx = self.x - x;
        let dy = self.y - y;
        dx * dx + dy * dy
    }
}

/// Where a non-head node sends its packet this round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uplink {
    Head(usize),
    BaseStation,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClusterAssignment {
    /// Elected heads, ascending.
    pub ch_ids: Vec<usize>,
    /// Every alive non-head node.
    pub member_of: BTreeMap<usize, Uplink>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub round: u64,
    /// Alive at the end of the round.
    pub alive_count: u64,
    pub ch_count: u64,
    pub packets_to_ch: u64,
    pub packets_to_bs: u64,
    pub energy_consumed: f64,
    pub total_residual: f64,
}

/// Places nodes uniformly over the field. Classes are assigned in id blocks:
/// normal, advanced, super, then ultra-super.
pub fn deploy(config: &SimConfig, rng: &mut SimRng) -> Result<Vec<NodeState>, ConfigError> {
    let counts = class_counts(config.n_nodes, &config.het)?;
    let classes = NodeClass::ALL
        .into_iter()
        .flat_map(|c| std::iter::repeat_n(c, counts.get(c) as usize));
    Ok(classes
        .enumerate()
        .map(|(id, class)| {
            let x = rng.random::<f64>() * config.field_side;
            let y = rng.random::<f64>() * config.field_side;
            let energy = initial_energy(class, &config.het);
            NodeState {
                id,
                x,
                y,
                class,
                initial_energy: energy,
                residual_energy: energy,
                alive: true,
                ch_blocked_until: 0,
            }
        })
        .collect())
}

/// Runs the election for one round and returns the new heads in ascending id order.
pub fn elect_chs(
    nodes: &mut [NodeState],
    round: u64,
    avg_energy: f64,
    config: &SimConfig,
    rng: &mut SimRng,
) -> Result<Vec<usize>, DomainError> {
    let mut heads = Vec::new();
    for node in nodes.iter_mut().filter(|n| n.alive) {
        let p = election_probability(
            config.strategy,
            node.class,
            node.residual_energy,
            avg_energy,
            &config.het,
        )?;
        let eligible = round >= node.ch_blocked_until;
        let threshold = ch_threshold(p, round, eligible);
        let draw: f64 = rng.random();
        if draw < threshold {
            node.ch_blocked_until = round + epoch_length(p)?;
            heads.push(node.id);
        }
    }
    Ok(heads)
}

/// Attaches each alive non-head node to its nearest head (lowest id on ties),
/// or to the base station when no head was elected.
pub fn form_clusters(nodes: &[NodeState], ch_ids: &[usize]) -> ClusterAssignment {
    let mut ch_ids = ch_ids.to_vec();
    ch_ids.sort_unstable();
    let mut member_of = BTreeMap::new();
    for node in nodes.iter().filter(|n| n.alive) {
        if ch_ids.binary_search(&node.id).is_ok() {
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for &h in &ch_ids {
            let d = node.dist_sq(nodes[h].x, nodes[h].y);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, h));
            }
        }
        let uplink = best.map_or(Uplink::BaseStation, |(_, h)| Uplink::Head(h));
        member_of.insert(node.id, uplink);
    }
    ClusterAssignment { ch_ids, member_of }
}

/// Charges every node for its traffic this round, then retires nodes that
/// ran dry. A node whose bill exceeds its residual still sends its packet.
pub fn apply_round_energy(
    nodes: &mut [NodeState],
    assignment: &ClusterAssignment,
    round: u64,
    config: &SimConfig,
) -> Result<RoundOutcome, DomainError> {
    let radio = &config.radio;
    let bits = radio.packet_bits;
    let mut cost = vec![0.0f64; nodes.len()];
    let mut members_per_head: BTreeMap<usize, u64> =
        assignment.ch_ids.iter().map(|&h| (h, 0)).collect();
    let mut packets_to_ch = 0;
    let mut packets_to_bs = 0;

    for (&id, uplink) in &assignment.member_of {
        match *uplink {
            Uplink::Head(h) => {
                let d = nodes[id].dist_sq(nodes[h].x, nodes[h].y).sqrt();
                cost[id] += tx_energy(radio, bits, d)?;
                cost[h] += rx_energy(radio, bits);
                *members_per_head.entry(h).or_default() += 1;
                packets_to_ch += 1;
            }
            Uplink::BaseStation => {
                let d = nodes[id].dist_sq(config.bs_x, config.bs_y).sqrt();
                cost[id] += tx_energy(radio, bits, d)?;
                packets_to_bs += 1;
            }
        }
    }
    for (&h, &members) in &members_per_head {
        let d = nodes[h].dist_sq(config.bs_x, config.bs_y).sqrt();
        cost[h] += aggregation_energy(radio, bits, members + 1) + tx_energy(radio, bits, d)?;
        packets_to_bs += 1;
    }

    let mut consumed = 0.0;
    for (node, &c) in nodes.iter_mut().zip(&cost) {
        if !node.alive || c == 0.0 {
            continue;
        }
        let before = node.residual_energy;
        node.residual_energy = if c >= before { 0.0 } else { before - c };
        consumed += before - node.residual_energy;
    }
    for node in nodes.iter_mut() {
        if node.alive && node.residual_energy <= 0.0 {
            node.residual_energy = 0.0;
            node.alive = false;
        }
    }

    Ok(RoundOutcome {
        round,
        alive_count: nodes.iter().filter(|n| n.alive).count() as u64,
        ch_count: assignment.ch_ids.len() as u64,
        packets_to_ch,
        packets_to_bs,
        energy_consumed: consumed,
        total_residual: nodes.iter().map(|n| n.residual_energy).sum(),
    })
}

/// A single run in progress. Advance it with [`Simulation::step`].
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    nodes: Vec<NodeState>,
    rng: SimRng,
    round: u64,
    e_total: f64,
    lifetime_rounds: u64,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let mut rng = seeded_rng(config.seed);
        let nodes = deploy(&config, &mut rng)?;
        let e_total = total_energy(config.n_nodes, &config.het);
        let lifetime_rounds = expected_lifetime(&config)?;
        Ok(Self {
            config,
            nodes,
            rng,
            round: 0,
            e_total,
            lifetime_rounds,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    /// Index of the next round to be played.
    pub fn round(&self) -> u64 {
        self.round
    }

    /// Lifetime estimate used by the mean-energy estimator.
    pub fn lifetime_rounds(&self) -> u64 {
        self.lifetime_rounds
    }

    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    pub fn is_finished(&self) -> bool {
        self.round >= self.config.max_rounds || self.alive_count() == 0
    }

    /// Mean-energy normaliser for the current round. Falls back to the
    /// measured mean of alive nodes once the linear estimate is exhausted.
    pub fn average_energy(&self) -> Result<f64, DomainError> {
        let estimate = average_energy_estimate(
            self.round,
            self.lifetime_rounds,
            self.e_total,
            self.config.n_nodes,
        )?;
        if estimate > 0.0 {
            return Ok(estimate);
        }
        let (sum, alive) = self
            .nodes
            .iter()
            .filter(|n| n.alive)
            .fold((0.0, 0u64), |(s, c), n| (s + n.residual_energy, c + 1));
        if alive == 0 {
            return Err(DomainError::NoNodes);
        }
        Ok(sum / alive as f64)
    }

    pub fn step(&mut self) -> Result<RoundOutcome, DomainError> {
        let avg = self.average_energy()?;
        let heads = elect_chs(
            &mut self.nodes,
            self.round,
            avg,
            &self.config,
            &mut self.rng,
        )?;
        let assignment = form_clusters(&self.nodes, &heads);
        let outcome = apply_round_energy(&mut self.nodes, &assignment, self.round, &self.config)?;
        self.round += 1;
        Ok(outcome)
    }
}

/// Rounds until exhaustion predicted by the analytic model at the optimal cluster count.
pub fn expected_lifetime(config: &SimConfig) -> Result<u64, DomainError> {
    let k = optimal_cluster_count(
        &config.radio,
        config.n_nodes,
        config.field_side,
        avg_dist_to_bs(config.field_side),
    )?;
    let e_round = round_energy(&config.radio, config.n_nodes, k, config.field_side)?;
    lifetime_estimate(total_energy(config.n_nodes, &config.het), e_round)
}

/// Plays rounds until every node is dead or `max_rounds` is reached.
pub fn run(config: &SimConfig) -> Result<(Vec<RoundOutcome>, SimSummary), SimError> {
    let mut sim = Simulation::new(config.clone())?;
    let mut series = Vec::new();
    while !sim.is_finished() {
        series.push(sim.step()?);
    }
    let summary = summarize(config.n_nodes, &series)?;
    Ok((series, summary))
}
