//! (Δ+1) vertex coloring on a complete graph — the hardest palette case,
//! since all Δ+1 colors are needed. Runs from an adversarial start to Γ_α and
//! prints the final assignment.

use stabdag::monitors;
use stabdag::simnet::{
    run_trial, AdversaryMode, ChannelMode, SchedulePolicy, StopCondition, TrialSettings,
};
use stabdag::topology::{build_topology, IdPolicy, TopologyKind};

fn main() {
    let topo =
        build_topology(TopologyKind::Complete { n: 6 }, IdPolicy::RandomDistinct, 11).unwrap();
    let settings = TrialSettings {
        k: 4,
        adversary: AdversaryMode::Domain,
        channel_mode: ChannelMode::Shared,
        schedule: SchedulePolicy::Random { fairness_bound: 32 },
        stop: StopCondition::GammaAlpha,
        max_steps: 200_000,
        closure_window_rounds: 3,
        seed: 11,
        record_trace: false,
    };
    let output = run_trial(&topo, &settings);
    let r = &output.report;
    println!(
        "converged {} in {} steps, Γ_α at round {:?}",
        r.converged, r.steps, r.rounds_to_galpha
    );
    for v in 0..topo.n() {
        println!(
            "node {v} (id {:3}): color {} of palette [1, {}]",
            topo.id(v).get(),
            output.final_config.nodes[v].color.color,
            topo.degree(v) + 1
        );
    }
    assert!(monitors::coloring_oracle(&topo, &output.final_config));
    println!("coloring oracle: adjacent colors differ, all within palette");
}
