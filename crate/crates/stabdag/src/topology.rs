//! Connected simple graphs with distinct identifiers and per-node port
//! permutations.
//!
//! Port numbers are only locally meaningful: the two endpoints of an edge
//! generally disagree on the port number of that edge, and the generators
//! deliberately shuffle the neighbor→port assignment per node so that the
//! asymmetry is always exercised.

use crate::ident::Identifier;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

/// Locally unique, 0-based consecutive port number.
pub type PortId = usize;

/// Identifiers are constrained to `[1, n^ID_RANGE_EXP]`.
pub const ID_RANGE_EXP: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TopologyKind {
    Path { n: usize },
    Ring { n: usize },
    Star { n: usize },
    Complete { n: usize },
    Gnp { n: usize, p: f64 },
}

impl TopologyKind {
    pub fn node_count(&self) -> usize {
        match *self {
            TopologyKind::Path { n }
            | TopologyKind::Ring { n }
            | TopologyKind::Star { n }
            | TopologyKind::Complete { n }
            | TopologyKind::Gnp { n, .. } => n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdPolicy {
    /// Node i gets identifier i + 1.
    Sequential,
    /// Distinct identifiers drawn uniformly from [1, n^c].
    RandomDistinct,
    /// A seeded permutation of 1..=n.
    AdversarialPermutation,
}

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("topology needs at least 2 nodes, got {0}")]
    TooSmall(usize),
    #[error("gnp({n}, {p}) failed to produce a connected graph in {attempts} attempts")]
    Disconnected { n: usize, p: f64, attempts: usize },
    #[error("edge probability {0} outside [0, 1]")]
    BadProbability(f64),
}

/// A connected simple graph with identifiers and port assignments.
#[derive(Clone, Debug)]
pub struct Topology {
    ids: Vec<Identifier>,
    /// peers[v][p] = node index of the neighbor reached through port p of v.
    peers: Vec<Vec<usize>>,
}

impl Topology {
    /// Build from an explicit edge list; identifiers and port permutations are
    /// drawn from `seed`. Edges must describe a connected simple graph.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize)],
        policy: IdPolicy,
        seed: u64,
    ) -> Result<Self, TopologyError> {
        if n < 2 {
            return Err(TopologyError::TooSmall(n));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for &(a, b) in edges {
            assert!(a != b && a < n && b < n, "simple graph over 0..n required");
            let key = (a.min(b), a.max(b));
            assert!(seen.insert(key), "duplicate edge ({a},{b})");
            adj[a].push(b);
            adj[b].push(a);
        }
        assert!(connected(n, &adj), "edge list must be connected");

        // Seeded random neighbor→port permutation, independent per node.
        let mut peers = adj;
        for ports in peers.iter_mut() {
            ports.shuffle(&mut rng);
        }

        let ids = assign_ids(n, policy, &mut rng);
        Ok(Topology { ids, peers })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn id(&self, v: usize) -> Identifier {
        self.ids[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.peers[v].len()
    }

    /// Maximum degree Δ.
    pub fn max_degree(&self) -> usize {
        self.peers.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Neighbor reached through port `p` of node `v`.
    pub fn peer(&self, v: usize, p: PortId) -> usize {
        self.peers[v][p]
    }

    /// Port of `v` leading to neighbor `u`; panics if not adjacent.
    pub fn port(&self, v: usize, u: usize) -> PortId {
        self.peers[v]
            .iter()
            .position(|&w| w == u)
            .expect("port() requires adjacent nodes")
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.peers[v]
    }

    /// Undirected edges as (min, max) pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for v in 0..self.n() {
            for &u in &self.peers[v] {
                if v < u {
                    out.push((v, u));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Directed channels (from, to), one per ordered adjacent pair.
    pub fn channels(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for v in 0..self.n() {
            for &u in &self.peers[v] {
                out.push((v, u));
            }
        }
        out.sort_unstable();
        out
    }
}

fn assign_ids(n: usize, policy: IdPolicy, rng: &mut ChaCha8Rng) -> Vec<Identifier> {
    match policy {
        IdPolicy::Sequential => (1..=n as u64).map(Identifier::new).collect(),
        IdPolicy::AdversarialPermutation => {
            let mut ids: Vec<u64> = (1..=n as u64).collect();
            ids.shuffle(rng);
            ids.into_iter().map(Identifier::new).collect()
        }
        IdPolicy::RandomDistinct => {
            let cap = (n as u64).saturating_pow(ID_RANGE_EXP);
            let mut taken = HashSet::new();
            let mut ids = Vec::with_capacity(n);
            while ids.len() < n {
                let candidate = rng.gen_range(1..=cap);
                if taken.insert(candidate) {
                    ids.push(Identifier::new(candidate));
                }
            }
            ids
        }
    }
}

fn connected(n: usize, adj: &[Vec<usize>]) -> bool {
    let mut visited = vec![false; n];
    let mut stack = vec![0usize];
    visited[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !visited[u] {
                visited[u] = true;
                count += 1;
                stack.push(u);
            }
        }
    }
    count == n
}

const GNP_RETRIES: usize = 200;

/// Build a topology from a descriptor. `gnp` resamples until connected, up to
/// a retry budget.
pub fn build_topology(
    kind: TopologyKind,
    policy: IdPolicy,
    seed: u64,
) -> Result<Topology, TopologyError> {
    let n = kind.node_count();
    if n < 2 {
        return Err(TopologyError::TooSmall(n));
    }
    let edges: Vec<(usize, usize)> = match kind {
        TopologyKind::Path { .. } => (0..n - 1).map(|i| (i, i + 1)).collect(),
        TopologyKind::Ring { .. } => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        TopologyKind::Star { .. } => (1..n).map(|i| (0, i)).collect(),
        TopologyKind::Complete { .. } => {
            let mut e = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    e.push((a, b));
                }
            }
            e
        }
        TopologyKind::Gnp { n, p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(TopologyError::BadProbability(p));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut found = None;
            for _ in 0..GNP_RETRIES {
                let mut e = Vec::new();
                let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
                for a in 0..n {
                    for b in a + 1..n {
                        if rng.gen_bool(p) {
                            e.push((a, b));
                            adj[a].push(b);
                            adj[b].push(a);
                        }
                    }
                }
                if connected(n, &adj) {
                    found = Some(e);
                    break;
                }
            }
            match found {
                Some(e) => e,
                None => {
                    return Err(TopologyError::Disconnected {
                        n,
                        p,
                        attempts: GNP_RETRIES,
                    })
                }
            }
        }
    };
    Topology::from_edges(n, &edges, policy, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_of_two_sequential() {
        let t = build_topology(TopologyKind::Path { n: 2 }, IdPolicy::Sequential, 0).unwrap();
        assert_eq!(t.n(), 2);
        assert_eq!(t.id(0).get(), 1);
        assert_eq!(t.id(1).get(), 2);
        assert_eq!(t.edges(), vec![(0, 1)]);
    }

    #[test]
    fn complete_four() {
        let t = build_topology(TopologyKind::Complete { n: 4 }, IdPolicy::Sequential, 1).unwrap();
        assert_eq!(t.edges().len(), 6);
        assert_eq!(t.max_degree(), 3);
    }

    #[test]
    fn gnp_is_connected() {
        let t = build_topology(
            TopologyKind::Gnp { n: 20, p: 0.3 },
            IdPolicy::RandomDistinct,
            7,
        )
        .unwrap();
        assert_eq!(t.n(), 20);
        // from_edges asserts connectivity; re-check through the public surface
        let mut visited = vec![false; t.n()];
        let mut stack = vec![0usize];
        visited[0] = true;
        while let Some(v) = stack.pop() {
            for &u in t.neighbors(v) {
                if !visited[u] {
                    visited[u] = true;
                    stack.push(u);
                }
            }
        }
        assert!(visited.iter().all(|&b| b));
    }

    #[test]
    fn gnp_too_sparse_fails() {
        let err = build_topology(
            TopologyKind::Gnp { n: 30, p: 0.001 },
            IdPolicy::Sequential,
            3,
        );
        assert!(matches!(err, Err(TopologyError::Disconnected { .. })));
    }

    #[test]
    fn port_map_is_a_bijection() {
        for seed in 0..20 {
            let t = build_topology(
                TopologyKind::Gnp { n: 12, p: 0.4 },
                IdPolicy::RandomDistinct,
                seed,
            )
            .unwrap();
            for v in 0..t.n() {
                let mut seen = HashSet::new();
                for &u in t.neighbors(v) {
                    let p = t.port(v, u);
                    assert!(p < t.degree(v));
                    assert!(seen.insert(p));
                    assert_eq!(t.peer(v, p), u);
                }
                assert_eq!(seen.len(), t.degree(v));
            }
        }
    }

    #[test]
    fn port_assignment_is_asymmetric_somewhere() {
        // With shuffled permutations, at least one edge of a ring should get
        // different port numbers at its two endpoints.
        let t = build_topology(TopologyKind::Ring { n: 8 }, IdPolicy::Sequential, 11).unwrap();
        let asym = t
            .edges()
            .iter()
            .any(|&(a, b)| t.port(a, b) != t.port(b, a));
        assert!(asym);
    }

    #[test]
    fn id_policies_yield_distinct_in_range_ids() {
        for policy in [
            IdPolicy::Sequential,
            IdPolicy::RandomDistinct,
            IdPolicy::AdversarialPermutation,
        ] {
            let t = build_topology(TopologyKind::Ring { n: 16 }, policy, 5).unwrap();
            let mut set = HashSet::new();
            for v in 0..t.n() {
                let id = t.id(v).get();
                assert!(id >= 1 && id <= 16u64.pow(ID_RANGE_EXP));
                assert!(set.insert(id));
            }
        }
    }
}
