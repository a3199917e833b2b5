//! Every topology family the simulator supports, with the three identifier
//! policies. Gnp graphs are resampled per seed until connected, so the same
//! (kind, policy, seed) triple always yields the same graph.

use stabdag::topology::{build_topology, IdPolicy, TopologyKind};

fn main() {
    let kinds = [
        TopologyKind::Path { n: 6 },
        TopologyKind::Ring { n: 6 },
        TopologyKind::Star { n: 6 },
        TopologyKind::Complete { n: 5 },
        TopologyKind::Gnp { n: 12, p: 0.3 },
    ];
    for kind in kinds {
        let topo = build_topology(kind, IdPolicy::RandomDistinct, 42).unwrap();
        println!(
            "{kind:?}: {} nodes, {} edges, max degree {}",
            topo.n(),
            topo.edges().len(),
            topo.max_degree()
        );
    }

    println!();
    for policy in [
        IdPolicy::Sequential,
        IdPolicy::RandomDistinct,
        IdPolicy::AdversarialPermutation,
    ] {
        let topo = build_topology(TopologyKind::Ring { n: 6 }, policy, 42).unwrap();
        let ids: Vec<u64> = (0..topo.n()).map(|v| topo.id(v).get()).collect();
        println!("{policy:?}: ids {ids:?}");
    }
}
