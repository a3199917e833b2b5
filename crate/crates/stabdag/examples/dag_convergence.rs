//! One trial of the DAG-orientation layer on a clean-start ring: run until
//! Γ_DAG (every ordered pair committed to the id comparison), then print the
//! round/step accounting and the oriented graph in DOT form.

use stabdag::harness::export_dot;
use stabdag::simnet::{
    run_trial, AdversaryMode, ChannelMode, SchedulePolicy, StopCondition, TrialSettings,
};
use stabdag::topology::{build_topology, IdPolicy, TopologyKind};

fn main() {
    let topo = build_topology(TopologyKind::Ring { n: 8 }, IdPolicy::RandomDistinct, 7).unwrap();
    let settings = TrialSettings {
        k: 0,
        adversary: AdversaryMode::Domain,
        channel_mode: ChannelMode::Shared,
        schedule: SchedulePolicy::Synchronous,
        stop: StopCondition::GammaDag,
        max_steps: 100_000,
        closure_window_rounds: 3,
        seed: 7,
        record_trace: false,
    };
    let output = run_trial(&topo, &settings);
    let r = &output.report;
    println!(
        "converged {} after {} steps / {} rounds (Γ_B at round {:?}, Γ_DAG at round {:?})",
        r.converged, r.steps, r.rounds, r.rounds_to_gb, r.rounds_to_gdag
    );
    println!(
        "dag messages {}  max channel occupancy {}  closure violations {:?}",
        r.messages_dag, r.max_occupancy, r.closure_gdag
    );
    println!("\n{}", export_dot(&topo, &output.final_config));
}
