//! Self-stabilization in action: the adversary loads every channel with k
//! arbitrary machine words and scrambles all node state, then the system is
//! left alone. The potentials Λ (forged replies), Φ (pairs not yet committed
//! correctly) and A (coloring debt) must drain to zero and stay there.

use stabdag::simnet::{seed_adversary, AdversaryMode, ChannelMode, Sim};
use stabdag::topology::{build_topology, IdPolicy, TopologyKind};

fn main() {
    let topo =
        build_topology(TopologyKind::Gnp { n: 16, p: 0.3 }, IdPolicy::RandomDistinct, 3).unwrap();
    let config = seed_adversary(&topo, 8, AdversaryMode::Wild, ChannelMode::Shared, 3);
    let mut sim = Sim::new(&topo, config, false);

    let start = sim.latest();
    println!("initial   Λ={:<3} Φ={:<3} A={}", start.lambda, start.phi, start.a);

    let mut sweeps = 0u64;
    loop {
        for v in 0..topo.n() {
            sim.step_node(v);
        }
        sweeps += 1;
        let s = sim.latest();
        if sweeps % 10 == 0 || (s.gamma_dag() && s.gamma_alpha()) {
            println!("sweep {sweeps:<4} Λ={:<3} Φ={:<3} A={}", s.lambda, s.phi, s.a);
        }
        if s.gamma_dag() && s.gamma_alpha() {
            break;
        }
        assert!(sweeps < 10_000, "no convergence");
    }

    // closure: keep running, the predicates must not flip back
    for _ in 0..20 {
        for v in 0..topo.n() {
            sim.step_node(v);
        }
        let s = sim.latest();
        assert!(s.gamma_dag() && s.gamma_alpha(), "legitimacy is closed");
    }
    println!("stable for 20 further sweeps — closure holds");
}
