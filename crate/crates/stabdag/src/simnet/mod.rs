//! The simulated asynchronous network: FIFO channels with adversarial initial
//! contents, fair schedulers, step semantics, round accounting and trial
//! execution. One trial is single-threaded and deterministic per seed.

mod rounds;

pub use rounds::{RoundStart, RoundTracker, StepObservation};

use crate::composer::{node_step, NodeRuntime};
use crate::dag::Outbox;
use crate::message::{Envelope, Layer};
use crate::monitors::{self, MonitorCtx};
use crate::topology::Topology;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelMode {
    /// One FIFO queue per directed link carrying layer-tagged envelopes.
    Shared,
    /// Two logical FIFO queues per directed link, one per layer.
    Split,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdversaryMode {
    /// Injected payload fields stay within the declared message domains.
    Domain,
    /// Arbitrary machine integers, including malformed layer tags.
    Wild,
}

/// A directed FIFO queue. Entries carry a simulation-unique id used only for
/// round accounting; protocol code never sees it.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Channel {
    queue: VecDeque<(u64, Envelope)>,
    pub delivered: u64,
    pub max_occupancy: usize,
    /// Receiver steps the current head has waited; fairness certificate input.
    head_steps: u64,
}

impl Channel {
    fn push(&mut self, id: u64, env: Envelope) {
        self.queue.push_back((id, env));
        self.max_occupancy = self.max_occupancy.max(self.queue.len());
    }

    fn pop(&mut self) -> Option<(u64, Envelope)> {
        let out = self.queue.pop_front();
        if out.is_some() {
            self.delivered += 1;
            self.head_steps = 0;
        }
        out
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn envelopes(&self) -> impl Iterator<Item = &Envelope> {
        self.queue.iter().map(|(_, e)| e)
    }

    fn head(&self) -> Option<&Envelope> {
        self.queue.front().map(|(_, e)| e)
    }

    fn has_layer(&self, layer: Layer) -> bool {
        self.queue.iter().any(|(_, e)| e.layer() == Some(layer))
    }
}

/// Global snapshot: every node runtime plus every channel's FIFO content.
/// Equality is structural.
#[derive(Clone, PartialEq, Debug)]
pub struct Configuration {
    pub nodes: Vec<NodeRuntime>,
    /// lanes[v][p]: incoming queues at node v, port p. One lane in shared
    /// mode; two in split mode (index 0 = DAG, 1 = COLOR).
    lanes: Vec<Vec<Vec<Channel>>>,
    pub mode: ChannelMode,
    next_envelope_id: u64,
}

fn lane_count(mode: ChannelMode) -> usize {
    match mode {
        ChannelMode::Shared => 1,
        ChannelMode::Split => 2,
    }
}

fn lane_for(mode: ChannelMode, layer: Layer) -> usize {
    match (mode, layer) {
        (ChannelMode::Shared, _) => 0,
        (ChannelMode::Split, Layer::Dag) => 0,
        (ChannelMode::Split, Layer::Color) => 1,
    }
}

impl Configuration {
    /// Clean states, empty channels.
    pub fn clean(topo: &Topology, mode: ChannelMode) -> Self {
        Configuration {
            nodes: (0..topo.n())
                .map(|v| NodeRuntime::clean(topo.id(v), topo.degree(v)))
                .collect(),
            lanes: (0..topo.n())
                .map(|v| {
                    (0..topo.degree(v))
                        .map(|_| vec![Channel::default(); lane_count(mode)])
                        .collect()
                })
                .collect(),
            mode,
            next_envelope_id: 0,
        }
    }

    /// All envelopes in transit toward node `v` through port `p`.
    pub fn queued(&self, v: usize, p: usize) -> impl Iterator<Item = &Envelope> {
        self.lanes[v][p].iter().flat_map(Channel::envelopes)
    }

    pub fn channel(&self, v: usize, p: usize, lane: usize) -> &Channel {
        &self.lanes[v][p][lane]
    }

    pub fn lane_count(&self) -> usize {
        lane_count(self.mode)
    }

    fn occupancy(&self, v: usize, p: usize) -> usize {
        self.lanes[v][p].iter().map(Channel::len).sum()
    }

    /// True when node `v` has no envelope at all in any input channel.
    pub fn all_inputs_empty(&self, v: usize) -> bool {
        (0..self.lanes[v].len()).all(|p| self.occupancy(v, p) == 0)
    }

    /// Ports of `v` whose input carries no envelope of `layer`.
    fn layer_empty_ports(&self, v: usize, layer: Layer) -> Vec<usize> {
        let lane = lane_for(self.mode, layer);
        (0..self.lanes[v].len())
            .filter(|&p| match self.mode {
                ChannelMode::Shared => !self.lanes[v][p][0].has_layer(layer),
                ChannelMode::Split => !self.lanes[v][p][lane].has_layer(layer),
            })
            .collect()
    }

    /// Push an envelope into `v`'s input channel on port `p`, as if the
    /// neighbor behind that port had just sent it.
    pub fn inject(&mut self, v: usize, p: usize, env: Envelope) {
        self.enqueue(v, p, env);
    }

    /// Is an identical envelope already queued in `v`'s port-`p` channel?
    pub fn pending(&self, v: usize, p: usize, env: &Envelope) -> bool {
        let lane = env.layer().map_or(0, |l| lane_for(self.mode, l));
        self.lanes[v][p][lane].queue.iter().any(|(_, e)| e == env)
    }

    fn enqueue(&mut self, v: usize, p: usize, env: Envelope) {
        let lane = env.layer().map_or(0, |l| lane_for(self.mode, l));
        let id = self.next_envelope_id;
        self.next_envelope_id += 1;
        self.lanes[v][p][lane].push(id, env);
    }

    /// Every envelope id currently in transit.
    pub fn in_transit_ids(&self) -> Vec<u64> {
        self.lanes
            .iter()
            .flatten()
            .flatten()
            .flat_map(|c| c.queue.iter().map(|(id, _)| *id))
            .collect()
    }

    /// FNV-1a over a canonical encoding of protocol state and queue contents.
    pub fn digest(&self) -> u64 {
        let mut h = Fnv::new();
        for rt in &self.nodes {
            h.word(rt.id.get());
            h.word(rt.degree as u64);
            h.word(rt.dag.cnt as u64);
            for p in 0..rt.degree {
                h.word(rt.dag.wait.contains(&p) as u64);
                h.word(match rt.dag.tmp[p] {
                    None => 2,
                    Some(b) => b as u64,
                });
                h.word(rt.dag.ord[p] as u64);
                h.word(match rt.color.cache[p] {
                    None => u64::MAX,
                    Some(c) => c as u64,
                });
            }
            h.word(rt.color.color as u64);
            h.word(matches!(rt.next_layer, Layer::Color) as u64);
        }
        for node in &self.lanes {
            for port in node {
                for chan in port {
                    h.word(0xc4a2);
                    for env in chan.envelopes() {
                        match *env {
                            Envelope::Query { level } => {
                                h.word(1);
                                h.word(level as u64);
                            }
                            Envelope::Reply { level, bit } => {
                                h.word(2);
                                h.word(level as u64);
                                h.word(bit as u64);
                            }
                            Envelope::Color { color } => {
                                h.word(3);
                                h.word(color as u64);
                            }
                            Envelope::Junk { tag, a, b } => {
                                h.word(4);
                                h.word(tag as u64);
                                h.word(a as u64);
                                h.word(b as u64);
                            }
                        }
                    }
                }
            }
        }
        h.finish()
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
    fn word(&mut self, w: u64) {
        for byte in w.to_le_bytes() {
            self.0 ^= byte as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    fn finish(&self) -> u64 {
        self.0
    }
}

/// Build an adversarially corrupted initial configuration: every node state
/// drawn arbitrarily from its domain, every directed channel preloaded with
/// 0..=k garbage envelopes. Deterministic per seed.
pub fn seed_adversary(
    topo: &Topology,
    k: usize,
    mode: AdversaryMode,
    chan_mode: ChannelMode,
    seed: u64,
) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta = topo.max_degree();
    let level_cap = (usize::BITS - (topo.n() - 1).leading_zeros()) as i64; // ⌈log₂ n⌉
    let mut config = Configuration::clean(topo, chan_mode);
    for v in 0..topo.n() {
        config.nodes[v] = NodeRuntime::random(topo.id(v), topo.degree(v), delta, &mut rng);
    }
    for v in 0..topo.n() {
        for p in 0..topo.degree(v) {
            let count = rng.gen_range(0..=k);
            for _ in 0..count {
                let env = match mode {
                    AdversaryMode::Domain => match rng.gen_range(0..3) {
                        0 => Envelope::Query {
                            level: rng.gen_range(1..=level_cap.max(1)),
                        },
                        1 => Envelope::Reply {
                            level: rng.gen_range(1..=level_cap.max(1)),
                            bit: rng.gen_range(-1..=level_cap.max(1)),
                        },
                        _ => Envelope::Color {
                            color: rng.gen_range(1..=delta as i64 + 1),
                        },
                    },
                    AdversaryMode::Wild => match rng.gen_range(0..4) {
                        0 => Envelope::Query { level: rng.gen() },
                        1 => Envelope::Reply {
                            level: rng.gen(),
                            bit: rng.gen(),
                        },
                        2 => Envelope::Color { color: rng.gen() },
                        _ => Envelope::Junk {
                            tag: rng.gen(),
                            a: rng.gen(),
                            b: rng.gen(),
                        },
                    },
                };
                // wild garbage may land in either lane of a split link
                let lane = match (chan_mode, mode, env.layer()) {
                    (ChannelMode::Shared, ..) => 0,
                    (ChannelMode::Split, AdversaryMode::Wild, _) => rng.gen_range(0..2),
                    (ChannelMode::Split, _, layer) => {
                        lane_for(chan_mode, layer.unwrap_or(Layer::Dag))
                    }
                };
                let id = config.next_envelope_id;
                config.next_envelope_id += 1;
                config.lanes[v][p][lane].push(id, env);
            }
        }
    }
    // initial occupancy is the adversary's budget, not steady-state behavior
    for node in config.lanes.iter_mut() {
        for port in node.iter_mut() {
            for chan in port.iter_mut() {
                chan.max_occupancy = 0;
            }
        }
    }
    config
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum SchedulePolicy {
    /// Every node steps once per tick, in index order.
    Synchronous,
    /// Random node order per sweep; every node steps once per sweep.
    Random { fairness_bound: u64 },
    /// Replays a recorded acting-node sequence, then stops.
    Scripted { nodes: Vec<usize> },
}

struct Scheduler {
    policy: SchedulePolicy,
    rng: ChaCha8Rng,
    n: usize,
    sweep: Vec<usize>,
    pos: usize,
}

impl Scheduler {
    fn new(policy: SchedulePolicy, n: usize, seed: u64) -> Self {
        Scheduler {
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0x5c3d_9e37_79b9_7f4a),
            n,
            sweep: Vec::new(),
            pos: 0,
        }
    }

    fn next_node(&mut self) -> Option<usize> {
        match &self.policy {
            SchedulePolicy::Synchronous => {
                let v = self.pos % self.n;
                self.pos += 1;
                Some(v)
            }
            SchedulePolicy::Random { .. } => {
                if self.pos % self.n == 0 {
                    use rand::seq::SliceRandom;
                    self.sweep = (0..self.n).collect();
                    self.sweep.shuffle(&mut self.rng);
                }
                let v = self.sweep[self.pos % self.n];
                self.pos += 1;
                Some(v)
            }
            SchedulePolicy::Scripted { nodes } => {
                let v = nodes.get(self.pos).copied();
                self.pos += 1;
                v
            }
        }
    }
}

/// One line of the exported trace; schema is frozen (golden-trace tests rely
/// on bit-exact serialization).
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub node: usize,
    pub layer: Layer,
    pub consumed: Vec<(usize, Envelope)>,
    pub emitted: Vec<(usize, Envelope)>,
    pub timeout: bool,
    pub lambda: u64,
    pub phi: u64,
    pub a: u64,
}

/// Aggregate per-trial instrumentation counters.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SimStats {
    pub delivered_dag: u64,
    pub delivered_color: u64,
    pub dropped: u64,
    /// Duplicate same-port emissions discarded by the one-send-per-channel cap.
    pub suppressed_sends: u64,
    pub dag_steps: Vec<u64>,
    pub color_steps: Vec<u64>,
    /// Correct-node emissions outside the message vocabulary.
    pub vocab_violations: u64,
    /// Coloring steps checked against the every-step broadcast lemma.
    pub broadcast_checks: u64,
    pub broadcast_violations: u64,
    /// Fairness certificate: receiver steps any envelope spent at a queue head.
    pub max_head_age: u64,
    /// Post-initialization channel occupancy high-water mark.
    pub max_occupancy: usize,
}

/// Per-step potential sample; index 0 is the initial configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub lambda: u64,
    pub phi: u64,
    pub a: u64,
}

impl PotentialSample {
    pub fn gamma_b(&self) -> bool {
        self.lambda == 0
    }
    pub fn gamma_dag(&self) -> bool {
        self.lambda == 0 && self.phi == 0
    }
    pub fn gamma_alpha(&self) -> bool {
        self.a == 0
    }
}

/// The live simulation of one trial.
pub struct Sim<'a> {
    pub topo: &'a Topology,
    ctx: MonitorCtx,
    pub config: Configuration,
    pub steps: u64,
    pub stats: SimStats,
    pub rounds: RoundTracker,
    /// Λ/Φ/A per configuration (index 0 = initial).
    pub potentials: Vec<PotentialSample>,
    pub trace: Option<Vec<StepRecord>>,
    /// Raw observations for the round-accounting oracle; test use only.
    pub observations: Option<Vec<(StepObservation, Option<RoundStart>)>>,
    /// Largest valid query/reply level a correct node may emit.
    level_cap: i64,
    color_cap: i64,
}

impl<'a> Sim<'a> {
    pub fn new(topo: &'a Topology, config: Configuration, record_trace: bool) -> Self {
        let ctx = MonitorCtx::new(topo);
        let start = RoundStart {
            in_transit: config.in_transit_ids(),
            all_empty_nodes: (0..topo.n())
                .filter(|&v| config.all_inputs_empty(v))
                .collect(),
        };
        let first = monitors::potentials(&ctx, &config);
        let level_cap = (1..=topo.n())
            .map(|v| topo.id(v - 1).bit_length() as i64)
            .max()
            .unwrap();
        let color_cap = topo.max_degree() as i64 + 1;
        Sim {
            topo,
            ctx,
            config,
            steps: 0,
            stats: SimStats {
                dag_steps: vec![0; topo.n()],
                color_steps: vec![0; topo.n()],
                ..SimStats::default()
            },
            rounds: RoundTracker::new(start),
            potentials: vec![PotentialSample {
                lambda: first.lambda_total,
                phi: first.phi_total,
                a: first.a_total,
            }],
            trace: if record_trace { Some(Vec::new()) } else { None },
            observations: None,
            level_cap,
            color_cap,
        }
    }

    pub fn monitor_ctx(&self) -> &MonitorCtx {
        &self.ctx
    }

    fn within_vocabulary(&self, env: &Envelope) -> bool {
        match *env {
            Envelope::Query { level } => level >= 1 && level <= self.level_cap,
            Envelope::Reply { level, bit } => {
                // A reply echoes the queried level verbatim; a level outside
                // the vocabulary can only be the echo of an adversarial query,
                // and its truthful answer is always the sentinel.
                let bit_ok = bit >= -1 && bit <= self.level_cap;
                let level_ok = (level >= 1 && level <= self.level_cap) || bit == -1;
                level_ok && bit_ok
            }
            Envelope::Color { color } => color >= 1 && color <= self.color_cap,
            Envelope::Junk { .. } => false,
        }
    }

    /// Execute one atomic step of node `v`: receive at most one envelope per
    /// incoming channel of the active layer, compute, send.
    pub fn step_node(&mut self, v: usize) {
        self.steps += 1;
        let degree = self.topo.degree(v);
        let layer = self.config.nodes[v].next_layer;
        let empty_ports = self.config.layer_empty_ports(v, layer);
        let lane = lane_for(self.config.mode, layer);

        let mut inputs: Vec<Option<Envelope>> = vec![None; degree];
        let mut consumed_ids = Vec::new();
        let mut consumed_envs = Vec::new();
        for p in 0..degree {
            let chan = &mut self.config.lanes[v][p][lane];
            // Shared mode skips the other layer's head; it will be consumed
            // by that layer's own turn. A split lane has no other consumer,
            // so its head is always taken — adversarially misplaced
            // envelopes then get dropped at dispatch rather than wedging
            // the lane forever.
            let take = match self.config.mode {
                ChannelMode::Shared => matches!(
                    chan.head(),
                    Some(head) if head.layer() == Some(layer) || head.layer().is_none()
                ),
                ChannelMode::Split => !chan.is_empty(),
            };
            if take {
                let (id, env) = chan.pop().expect("head checked above");
                self.stats.max_head_age = self.stats.max_head_age.max(chan.head_steps.max(0) + 1);
                consumed_ids.push(id);
                consumed_envs.push((p, env));
                inputs[p] = Some(env);
            }
            // age every remaining head across all lanes of this port
            for l in 0..self.config.lane_count() {
                let c = &mut self.config.lanes[v][p][l];
                if !c.is_empty() {
                    c.head_steps += 1;
                }
            }
        }

        let outcome = node_step(&mut self.config.nodes[v], &inputs, &empty_ports);

        match layer {
            Layer::Dag => {
                self.stats.dag_steps[v] += 1;
                self.stats.delivered_dag += outcome.consumed as u64;
            }
            Layer::Color => {
                self.stats.color_steps[v] += 1;
                self.stats.delivered_color += outcome.consumed as u64;
            }
        }
        self.stats.dropped += outcome.dropped as u64;

        if layer == Layer::Color && (outcome.consumed > 0 || outcome.timeout_fired) {
            self.stats.broadcast_checks += 1;
            let answered = outcome.triggering_ports.iter().all(|&t| {
                outcome
                    .outbox
                    .iter()
                    .any(|&(p, env)| p == t && matches!(env, Envelope::Color { .. }))
            });
            if !answered {
                self.stats.broadcast_violations += 1;
            }
        }

        // Retransmission coalescing: an emission identical to an envelope
        // already pending in the same channel is not enqueued again. Every
        // protocol message is an idempotent retransmission (Step's queries,
        // replies keyed by level, color echoes), so a duplicate carries no
        // information, and without coalescing the reply-plus-query pattern
        // nets more emissions than consumptions and in-transit counts grow
        // without bound. Honest traffic has only O(log id + Δ) distinct
        // values per channel, which keeps occupancy near the adversary's k.
        let mut sent: Outbox = Vec::with_capacity(outcome.outbox.len());
        for &(port, env) in &outcome.outbox {
            if !self.within_vocabulary(&env) {
                self.stats.vocab_violations += 1;
            }
            let u = self.topo.peer(v, port);
            let q = self.topo.port(u, v);
            if self.config.pending(u, q, &env) {
                self.stats.suppressed_sends += 1;
                continue;
            }
            sent.push((port, env));
            self.config.enqueue(u, q, env);
            self.stats.max_occupancy = self.stats.max_occupancy.max(self.config.occupancy(u, q));
        }

        let obs = StepObservation {
            node: v,
            consumed_ids,
            timeout_fired: outcome.timeout_fired,
        };
        let mut new_start = None;
        if self.rounds.observe(self.steps, &obs) {
            let start = RoundStart {
                in_transit: self.config.in_transit_ids(),
                all_empty_nodes: (0..self.topo.n())
                    .filter(|&w| self.config.all_inputs_empty(w))
                    .collect(),
            };
            new_start = Some(start.clone());
            self.rounds.begin_round(start);
        }
        if let Some(log) = &mut self.observations {
            log.push((obs, new_start));
        }

        let read = monitors::potentials(&self.ctx, &self.config);
        let sample = PotentialSample {
            lambda: read.lambda_total,
            phi: read.phi_total,
            a: read.a_total,
        };
        self.potentials.push(sample);

        if let Some(trace) = &mut self.trace {
            trace.push(StepRecord {
                step: self.steps,
                node: v,
                layer,
                consumed: consumed_envs,
                emitted: sent,
                timeout: outcome.timeout_fired,
                lambda: sample.lambda,
                phi: sample.phi,
                a: sample.a,
            });
        }
    }

    pub fn latest(&self) -> PotentialSample {
        *self.potentials.last().unwrap()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopCondition {
    GammaB,
    GammaDag,
    GammaAlpha,
    /// All three predicates hold simultaneously.
    All,
    Steps(u64),
}

impl StopCondition {
    fn hit(&self, s: &PotentialSample) -> bool {
        match self {
            StopCondition::GammaB => s.gamma_b(),
            StopCondition::GammaDag => s.gamma_dag(),
            StopCondition::GammaAlpha => s.gamma_alpha(),
            StopCondition::All => s.gamma_dag() && s.gamma_alpha(),
            StopCondition::Steps(_) => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSettings {
    pub k: usize,
    pub adversary: AdversaryMode,
    pub channel_mode: ChannelMode,
    pub schedule: SchedulePolicy,
    pub stop: StopCondition,
    pub max_steps: u64,
    /// Keep running this many completed rounds after the stop predicate first
    /// holds, to witness closure on the trace.
    pub closure_window_rounds: u64,
    pub seed: u64,
    pub record_trace: bool,
}

/// Metrics of one simulation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub seed: u64,
    pub converged: bool,
    pub steps: u64,
    pub rounds: u64,
    pub rounds_to_gb: Option<u64>,
    pub rounds_to_gdag: Option<u64>,
    pub rounds_to_galpha: Option<u64>,
    pub steps_to_gb: Option<u64>,
    pub steps_to_gdag: Option<u64>,
    pub steps_to_galpha: Option<u64>,
    pub messages_dag: u64,
    pub messages_color: u64,
    pub dropped: u64,
    pub suppressed_sends: u64,
    pub max_occupancy: usize,
    pub vocab_violations: u64,
    pub broadcast_checks: u64,
    pub broadcast_violations: u64,
    pub max_head_age: u64,
    /// Per node, |dag steps - color steps| <= 1.
    pub step_balance_ok: bool,
    /// Config indices (post first hit) where each predicate failed again.
    pub closure_gb: Vec<u64>,
    pub closure_gdag: Vec<u64>,
    pub closure_galpha: Vec<u64>,
    pub dag_oracle_at_gdag: Option<bool>,
    pub coloring_oracle_at_galpha: Option<bool>,
    pub final_digest: String,
}

pub struct TrialOutput {
    pub report: TrialReport,
    pub trace: Option<Vec<StepRecord>>,
    pub final_config: Configuration,
}

/// Run one trial to its stop condition plus the closure window, evaluating the
/// monitors at every configuration. Deterministic per (topology, settings).
pub fn run_trial(topo: &Topology, settings: &TrialSettings) -> TrialOutput {
    let config = seed_adversary(
        topo,
        settings.k,
        settings.adversary,
        settings.channel_mode,
        settings.seed,
    );
    run_trial_from(topo, config, settings)
}

/// Same as [`run_trial`] but from an explicit initial configuration.
pub fn run_trial_from(
    topo: &Topology,
    config: Configuration,
    settings: &TrialSettings,
) -> TrialOutput {
    let mut sim = Sim::new(topo, config, settings.record_trace);
    let mut scheduler = Scheduler::new(settings.schedule.clone(), topo.n(), settings.seed);

    let mut hit_rounds: Option<u64> = None;
    let mut converged = matches!(settings.stop, StopCondition::Steps(0));
    if settings.stop.hit(&sim.latest()) {
        hit_rounds = Some(0);
    }
    while sim.steps < settings.max_steps {
        let Some(v) = scheduler.next_node() else {
            // scripted schedule exhausted: the run is complete by construction
            converged = true;
            break;
        };
        sim.step_node(v);
        if hit_rounds.is_none() && settings.stop.hit(&sim.latest()) {
            hit_rounds = Some(sim.rounds.completed());
        }
        match settings.stop {
            StopCondition::Steps(s) => {
                if sim.steps >= s {
                    converged = true;
                    break;
                }
            }
            _ => {
                if let Some(r) = hit_rounds {
                    if sim.rounds.completed() >= r + settings.closure_window_rounds {
                        converged = true;
                        break;
                    }
                }
            }
        }
    }

    let first_index = |pred: fn(&PotentialSample) -> bool| -> Option<u64> {
        sim.potentials.iter().position(|s| pred(s)).map(|i| i as u64)
    };
    let hit_gb = first_index(PotentialSample::gamma_b);
    let hit_gdag = first_index(PotentialSample::gamma_dag);
    let hit_galpha = first_index(PotentialSample::gamma_alpha);

    let rounds_at = |idx: Option<u64>| idx.map(|i| sim.rounds.completed_before(i));

    let violations = |pred: fn(&PotentialSample) -> bool| -> Vec<u64> {
        match sim.potentials.iter().position(|s| pred(s)) {
            None => Vec::new(),
            Some(first) => sim.potentials[first..]
                .iter()
                .enumerate()
                .filter(|(_, s)| !pred(s))
                .map(|(i, _)| (first + i) as u64)
                .collect(),
        }
    };

    let dag_oracle_at_gdag = hit_gdag.map(|_| monitors::dag_oracle(topo, &sim.config));
    let coloring_oracle_at_galpha =
        hit_galpha.map(|_| monitors::coloring_oracle(topo, &sim.config));

    let step_balance_ok = (0..topo.n()).all(|v| {
        let d = sim.stats.dag_steps[v] as i64;
        let c = sim.stats.color_steps[v] as i64;
        (d - c).abs() <= 1
    });

    let report = TrialReport {
        seed: settings.seed,
        converged,
        steps: sim.steps,
        rounds: sim.rounds.completed(),
        rounds_to_gb: rounds_at(hit_gb),
        rounds_to_gdag: rounds_at(hit_gdag),
        rounds_to_galpha: rounds_at(hit_galpha),
        steps_to_gb: hit_gb,
        steps_to_gdag: hit_gdag,
        steps_to_galpha: hit_galpha,
        messages_dag: sim.stats.delivered_dag,
        messages_color: sim.stats.delivered_color,
        dropped: sim.stats.dropped,
        suppressed_sends: sim.stats.suppressed_sends,
        max_occupancy: sim.stats.max_occupancy,
        vocab_violations: sim.stats.vocab_violations,
        broadcast_checks: sim.stats.broadcast_checks,
        broadcast_violations: sim.stats.broadcast_violations,
        max_head_age: sim.stats.max_head_age,
        step_balance_ok,
        closure_gb: violations(PotentialSample::gamma_b),
        closure_gdag: violations(PotentialSample::gamma_dag),
        closure_galpha: violations(PotentialSample::gamma_alpha),
        dag_oracle_at_gdag,
        coloring_oracle_at_galpha,
        final_digest: format!("{:016x}", sim.config.digest()),
    };
    TrialOutput {
        report,
        trace: sim.trace,
        final_config: sim.config,
    }
}
