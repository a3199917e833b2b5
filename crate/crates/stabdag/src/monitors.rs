//! Executable potential functions and legitimacy predicates, plus independent
//! oracles. All functions are read-only on configuration snapshots.
//!
//! - `Λ` counts forged DAG replies in transit; `Γ_B = {Λ = 0}`.
//! - `Φ` counts adjacent pairs whose committed orientation or comparison
//!   progress is wrong; `Γ_DAG = {Λ = 0 ∧ Φ = 0}`.
//! - `A = Σ(α₁ + α₂ + α₃)` counts color conflicts, stale caches and untruthful
//!   in-flight colors; `Γ_α = {A = 0}`.

use crate::ident::{bit_index, dif, Identifier};
use crate::message::Envelope;
use crate::simnet::Configuration;
use crate::topology::Topology;

/// Precomputed per-pair data so per-step evaluation stays cheap.
#[derive(Clone, Debug)]
pub struct MonitorCtx {
    ids: Vec<Identifier>,
    /// pairs[v][p] = (neighbor index, dif level, neighbor id greater).
    pairs: Vec<Vec<(usize, i64, bool)>>,
}

impl MonitorCtx {
    pub fn new(topo: &Topology) -> Self {
        let ids: Vec<Identifier> = (0..topo.n()).map(|v| topo.id(v)).collect();
        let pairs = (0..topo.n())
            .map(|v| {
                (0..topo.degree(v))
                    .map(|p| {
                        let u = topo.peer(v, p);
                        (u, dif(ids[v], ids[u]), ids[u] > ids[v])
                    })
                    .collect()
            })
            .collect();
        MonitorCtx { ids, pairs }
    }

    pub fn id(&self, v: usize) -> Identifier {
        self.ids[v]
    }
}

/// 1 iff `m` is a DAG reply whose carried bit position is not what its sender
/// would truthfully answer for that level.
pub fn lambda_m(m: &Envelope, sender_id: Identifier) -> u64 {
    match *m {
        Envelope::Reply { level, bit } => (bit != bit_index(sender_id, level)) as u64,
        _ => 0,
    }
}

/// Full potential readout of one configuration, with per-node breakdowns.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialReadout {
    pub lambda_total: u64,
    pub phi_total: u64,
    pub alpha1_total: u64,
    pub alpha2_total: u64,
    pub alpha3_total: u64,
    pub a_total: u64,
    pub lambda_per_node: Vec<u64>,
    pub phi_per_node: Vec<u64>,
    pub alpha_per_node: Vec<(u64, u64, u64)>,
}

pub fn potentials(ctx: &MonitorCtx, config: &Configuration) -> PotentialReadout {
    let n = ctx.ids.len();
    let mut lambda_per_node = vec![0u64; n];
    let mut phi_per_node = vec![0u64; n];
    let mut alpha_per_node = vec![(0u64, 0u64, 0u64); n];

    for v in 0..n {
        let rt = &config.nodes[v];
        for (p, &(u, dif_level, greater)) in ctx.pairs[v].iter().enumerate() {
            let sender_id = ctx.ids[u];
            // λ and α₃ scan the channel u → v (attributed to receiver v)
            for env in config.queued(v, p) {
                lambda_per_node[v] += lambda_m(env, sender_id);
                if let Envelope::Color { color } = env {
                    if *color != config.nodes[u].color.color {
                        alpha_per_node[v].2 += 1;
                    }
                }
            }
            // φ over the ordered pair (v, u)
            let ord_ok = rt.dag.ord[p] == greater;
            if !(ord_ok && good_for(rt, p, dif_level, greater)) {
                phi_per_node[v] += 1;
            }
            // α₁ and α₂
            if config.nodes[u].color.color == rt.color.color {
                alpha_per_node[v].0 += 1;
            }
            if rt.color.cache[p] != Some(config.nodes[u].color.color) {
                alpha_per_node[v].1 += 1;
            }
        }
    }

    let alpha1_total = alpha_per_node.iter().map(|a| a.0).sum();
    let alpha2_total = alpha_per_node.iter().map(|a| a.1).sum();
    let alpha3_total = alpha_per_node.iter().map(|a| a.2).sum();
    PotentialReadout {
        lambda_total: lambda_per_node.iter().sum(),
        phi_total: phi_per_node.iter().sum(),
        alpha1_total,
        alpha2_total,
        alpha3_total,
        a_total: alpha1_total + alpha2_total + alpha3_total,
        lambda_per_node,
        phi_per_node,
        alpha_per_node,
    }
}

fn good_for(
    rt: &crate::composer::NodeRuntime,
    port: usize,
    dif_level: i64,
    neighbor_greater: bool,
) -> bool {
    let cnt = rt.dag.cnt;
    let tmp = rt.dag.tmp[port];
    let waiting = rt.dag.wait.contains(&port);
    (cnt <= dif_level && tmp.is_none())
        || (cnt >= dif_level && tmp == Some(neighbor_greater) && !waiting)
}

/// Sum of `lambda_m` over every envelope in every channel.
pub fn lambda_total(ctx: &MonitorCtx, config: &Configuration) -> u64 {
    potentials(ctx, config).lambda_total
}

/// The two-disjunct progress predicate for the ordered adjacent pair (v, u):
/// either the comparison has not yet passed the deciding level and the pair is
/// still undecided, or it is committed to the correct bit and not waited on.
pub fn good_predicate(topo: &Topology, config: &Configuration, v: usize, u: usize) -> bool {
    let p = topo.port(v, u);
    let dif_level = dif(topo.id(v), topo.id(u));
    good_for(&config.nodes[v], p, dif_level, topo.id(u) > topo.id(v))
}

/// Count of ordered adjacent pairs with a wrong orientation or failed `Good`.
pub fn phi_total(ctx: &MonitorCtx, config: &Configuration) -> u64 {
    potentials(ctx, config).phi_total
}

/// (α₁, α₂, α₃, A) totals.
pub fn color_potentials(ctx: &MonitorCtx, config: &Configuration) -> (u64, u64, u64, u64) {
    let r = potentials(ctx, config);
    (r.alpha1_total, r.alpha2_total, r.alpha3_total, r.a_total)
}

/// Independent orientation check: every committed bit agrees with direct
/// identifier comparison, and the induced orientation is acyclic.
pub fn dag_oracle(topo: &Topology, config: &Configuration) -> bool {
    for v in 0..topo.n() {
        for &u in topo.neighbors(v) {
            let p = topo.port(v, u);
            if config.nodes[v].dag.ord[p] != (topo.id(u) > topo.id(v)) {
                return false;
            }
        }
    }
    // orient each edge by the lower endpoint's committed bit and Kahn-sort
    let n = topo.n();
    let mut indegree = vec![0usize; n];
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, b) in topo.edges() {
        let a_points_up = config.nodes[a].dag.ord[topo.port(a, b)];
        let (from, to) = if a_points_up { (a, b) } else { (b, a) };
        out_edges[from].push(to);
        indegree[to] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop() {
        seen += 1;
        for &u in &out_edges[v] {
            indegree[u] -= 1;
            if indegree[u] == 0 {
                queue.push(u);
            }
        }
    }
    seen == n
}

/// True iff adjacent colors differ everywhere and every color is within its
/// node's palette `[1, δ(v)+1]`.
pub fn coloring_oracle(topo: &Topology, config: &Configuration) -> bool {
    for v in 0..topo.n() {
        let c = config.nodes[v].color.color;
        if c < 1 || c > topo.degree(v) as i64 + 1 {
            return false;
        }
        for &u in topo.neighbors(v) {
            if config.nodes[u].color.color == c {
                return false;
            }
        }
    }
    true
}

/// Closure check over a per-configuration predicate trace: find the first index
/// where the predicate holds and report every later index where it fails.
/// Empty result = closure verified on this trace.
pub fn closure_watch(held: &[bool]) -> Vec<usize> {
    match held.iter().position(|&b| b) {
        None => Vec::new(),
        Some(first) => held[first..]
            .iter()
            .enumerate()
            .filter(|(_, &b)| !b)
            .map(|(i, _)| first + i)
            .collect(),
    }
}
