//! Empirical cost of adversarial channel load: sweep k (junk messages seeded
//! per channel) on a ring and fit the extra steps-to-Γ_DAG over the k=0
//! baseline. The excess grows roughly linearly in k; the round count does
//! not, because every message in transit at a round's start is consumed
//! within that round, so all the initial junk drains inside round one.

use stabdag::harness::{run_experiment, ExperimentConfig, ScheduleChoice};
use stabdag::simnet::{AdversaryMode, ChannelMode, StopCondition};
use stabdag::topology::{IdPolicy, TopologyKind};

fn main() {
    let base = ExperimentConfig {
        topology: TopologyKind::Ring { n: 16 },
        id_policy: IdPolicy::RandomDistinct,
        k: 0,
        adversary: AdversaryMode::Domain,
        channel_mode: ChannelMode::Shared,
        schedule: ScheduleChoice::Random,
        fairness: None,
        seeds: (1..=25).collect(),
        stop: StopCondition::GammaDag,
        max_steps: 1_000_000,
        closure_window_rounds: 3,
        workers: 4,
        trace: None,
        out: None,
    };

    let mut baseline = 0i64;
    let mut points = Vec::new();
    for k in [0usize, 2, 4, 8, 16] {
        let mut cfg = base.clone();
        cfg.k = k;
        let agg = run_experiment(&cfg).unwrap().aggregate;
        let steps = agg.median_steps_to_gdag.unwrap() as i64;
        let rounds = agg.median_rounds_to_gdag.unwrap();
        if k == 0 {
            baseline = steps;
            println!("k={k:2}: median {steps} steps, {rounds} rounds (baseline)");
        } else {
            let excess = steps - baseline;
            println!("k={k:2}: median {steps} steps ({excess:+} over baseline), {rounds} rounds");
            points.push(((k as f64).ln(), (excess.max(1) as f64).ln()));
        }
    }

    let n = points.len() as f64;
    let (sx, sy): (f64, f64) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (sxx, sxy): (f64, f64) = points
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + p.0 * p.0, a.1 + p.0 * p.1));
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    println!("log-log slope of excess steps vs k: {slope:.2} (≈1 → linear)");
}
