//! The executable potential functions, broken down per node: Λ counts forged
//! replies in transit, Φ counts ordered pairs whose comparison has gone wrong,
//! and A = α₁ + α₂ + α₃ measures coloring debt (conflicts, stale caches,
//! stale color messages). Γ_B ⇔ Λ=0, Γ_DAG ⇔ Λ=Φ=0, Γ_α ⇔ A=0.

use stabdag::monitors::{self, MonitorCtx};
use stabdag::simnet::{seed_adversary, AdversaryMode, ChannelMode, Sim};
use stabdag::topology::{build_topology, IdPolicy, TopologyKind};

fn dump(ctx: &MonitorCtx, config: &stabdag::simnet::Configuration, label: &str) {
    let r = monitors::potentials(ctx, config);
    println!(
        "{label}: Λ={} Φ={} A={} (α₁={} α₂={} α₃={})",
        r.lambda_total, r.phi_total, r.a_total, r.alpha1_total, r.alpha2_total, r.alpha3_total
    );
    for (v, ((l, f), a)) in r
        .lambda_per_node
        .iter()
        .zip(&r.phi_per_node)
        .zip(&r.alpha_per_node)
        .enumerate()
    {
        println!("  node {v}: λ={l} φ={f} α={a:?}");
    }
}

fn main() {
    let topo = build_topology(TopologyKind::Star { n: 5 }, IdPolicy::Sequential, 1).unwrap();
    let config = seed_adversary(&topo, 3, AdversaryMode::Wild, ChannelMode::Shared, 99);
    let mut sim = Sim::new(&topo, config, false);

    dump(sim.monitor_ctx(), &sim.config, "adversarial start");
    while !(sim.latest().gamma_dag() && sim.latest().gamma_alpha()) {
        for v in 0..topo.n() {
            sim.step_node(v);
        }
    }
    println!();
    dump(sim.monitor_ctx(), &sim.config, "after convergence");
}
