//! Record a trial to a JSONL trace, then replay it under a scripted schedule
//! that re-executes the exact node order. The replay must land on the same
//! configuration digest — the whole pipeline is deterministic.

use stabdag::harness::{read_trace, replay_trace, write_trace, TraceHeader};
use stabdag::simnet::{
    run_trial, AdversaryMode, ChannelMode, SchedulePolicy, StopCondition, TrialSettings,
};
use stabdag::topology::{build_topology, IdPolicy, TopologyKind};

fn main() {
    let kind = TopologyKind::Ring { n: 10 };
    let policy = IdPolicy::RandomDistinct;
    let seed = 21;
    let topo = build_topology(kind, policy, seed).unwrap();
    let settings = TrialSettings {
        k: 5,
        adversary: AdversaryMode::Wild,
        channel_mode: ChannelMode::Split,
        schedule: SchedulePolicy::Random { fairness_bound: 16 },
        stop: StopCondition::GammaAlpha,
        max_steps: 200_000,
        closure_window_rounds: 3,
        seed,
        record_trace: true,
    };
    let output = run_trial(&topo, &settings);
    let records = output.trace.expect("trace was recorded");

    let dir = std::env::temp_dir().join("stabdag-trace-example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trial.jsonl");
    let header = TraceHeader {
        topology: kind,
        id_policy: policy,
        seed,
        settings: settings.clone(),
        final_digest: output.report.final_digest.clone(),
        steps: output.report.steps,
    };
    write_trace(&path, &header, &records).unwrap();
    println!("wrote {} ({} step records)", path.display(), records.len());

    let (header_back, records_back) = read_trace(&path).unwrap();
    assert_eq!(records_back.len(), records.len());
    println!("header round-trips: digest {}", header_back.final_digest);

    let outcome = replay_trace(&path).unwrap();
    println!(
        "replayed {} steps: recorded {} vs replayed {} — {}",
        outcome.steps,
        outcome.recorded_digest,
        outcome.replayed_digest,
        if outcome.matches { "bit-exact" } else { "MISMATCH" }
    );
    assert!(outcome.matches);
}
