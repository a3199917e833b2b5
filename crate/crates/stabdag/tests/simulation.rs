use stabdag::monitors;
use stabdag::simnet::*;
use stabdag::message::Envelope;
use stabdag::topology::*;

fn settings(k: usize, adversary: AdversaryMode, schedule: SchedulePolicy, seed: u64) -> TrialSettings {
    TrialSettings {
        k,
        adversary,
        channel_mode: ChannelMode::Shared,
        schedule,
        stop: StopCondition::GammaAlpha,
        max_steps: 100_000,
        closure_window_rounds: 10,
        seed,
        record_trace: false,
    }
}

#[test]
fn wild_adversary_ring_converges_through_all_predicates() {
    let topo = build_topology(TopologyKind::Ring { n: 8 }, IdPolicy::RandomDistinct, 3).unwrap();
    let s = settings(3, AdversaryMode::Wild, SchedulePolicy::Random { fairness_bound: 8 }, 42);
    let out = run_trial(&topo, &s);
    let r = &out.report;
    assert!(r.converged);
    assert!(r.rounds_to_gb.is_some());
    assert!(r.rounds_to_gdag.is_some());
    assert!(r.rounds_to_galpha.is_some());
    assert!(r.closure_gb.is_empty());
    assert!(r.closure_gdag.is_empty());
    assert!(r.closure_galpha.is_empty());
    assert_eq!(r.dag_oracle_at_gdag, Some(true));
    assert_eq!(r.coloring_oracle_at_galpha, Some(true));
    assert_eq!(r.vocab_violations, 0);
    assert_eq!(r.broadcast_violations, 0);
    assert!(r.step_balance_ok);
}

#[test]
fn seed_budget_respected_and_seeding_deterministic() {
    let topo = build_topology(TopologyKind::Complete { n: 5 }, IdPolicy::RandomDistinct, 9).unwrap();
    for k in [0usize, 1, 4, 9] {
        for mode in [AdversaryMode::Domain, AdversaryMode::Wild] {
            let a = seed_adversary(&topo, k, mode, ChannelMode::Shared, 11);
            for v in 0..topo.n() {
                for p in 0..topo.degree(v) {
                    assert!(a.queued(v, p).count() <= k, "budget exceeded");
                }
            }
            let b = seed_adversary(&topo, k, mode, ChannelMode::Shared, 11);
            assert_eq!(a.digest(), b.digest(), "seeding must be reproducible");
        }
    }
}

#[test]
fn identical_settings_identical_reports() {
    let topo = build_topology(TopologyKind::Gnp { n: 12, p: 0.4 }, IdPolicy::RandomDistinct, 5).unwrap();
    let s = settings(2, AdversaryMode::Domain, SchedulePolicy::Random { fairness_bound: 6 }, 7);
    let a = run_trial(&topo, &s);
    let b = run_trial(&topo, &s);
    assert_eq!(a.report, b.report);
    assert_eq!(a.report.final_digest, b.report.final_digest);
}

#[test]
fn different_seed_different_run() {
    let topo = build_topology(TopologyKind::Ring { n: 6 }, IdPolicy::RandomDistinct, 5).unwrap();
    let a = run_trial(&topo, &settings(3, AdversaryMode::Wild, SchedulePolicy::Random { fairness_bound: 4 }, 1));
    let b = run_trial(&topo, &settings(3, AdversaryMode::Wild, SchedulePolicy::Random { fairness_bound: 4 }, 2));
    assert_ne!(a.report.final_digest, b.report.final_digest);
}

#[test]
fn fifo_order_preserved_in_consumption() {
    // Inject a recognizable color sequence and watch one node drain it in order.
    let topo = build_topology(TopologyKind::Path { n: 2 }, IdPolicy::Sequential, 1).unwrap();
    let mut config = Configuration::clean(&topo, ChannelMode::Shared);
    for c in [5, 6, 7] {
        config.inject(0, 0, Envelope::Color { color: c });
    }
    let mut sim = Sim::new(&topo, config, true);
    let mut seen = Vec::new();
    for _ in 0..6 {
        sim.step_node(0);
    }
    for rec in sim.trace.as_ref().unwrap() {
        for &(_, env) in &rec.consumed {
            if let Envelope::Color { color } = env {
                seen.push(color);
            }
        }
    }
    let colors: Vec<i64> = seen.into_iter().filter(|c| *c >= 5).collect();
    assert_eq!(colors, vec![5, 6, 7]);
}

#[test]
fn scripted_replay_is_bit_exact() {
    let topo = build_topology(TopologyKind::Ring { n: 6 }, IdPolicy::RandomDistinct, 4).unwrap();
    let mut s = settings(2, AdversaryMode::Wild, SchedulePolicy::Random { fairness_bound: 6 }, 13);
    s.record_trace = true;
    let original = run_trial(&topo, &s);
    let script: Vec<usize> = original.trace.as_ref().unwrap().iter().map(|r| r.node).collect();

    let mut replay_settings = s.clone();
    replay_settings.schedule = SchedulePolicy::Scripted { nodes: script };
    let replay = run_trial(&topo, &replay_settings);
    assert_eq!(replay.report.final_digest, original.report.final_digest);
    assert_eq!(replay.report.steps, original.report.steps);
    assert_eq!(
        replay.trace.as_ref().unwrap().last().unwrap().a,
        original.trace.as_ref().unwrap().last().unwrap().a
    );
}

#[test]
fn occupancy_stays_near_adversary_budget() {
    for (seed, k) in [(1u64, 0usize), (2, 2), (3, 6)] {
        let topo = build_topology(TopologyKind::Ring { n: 8 }, IdPolicy::RandomDistinct, seed).unwrap();
        let s = settings(k, AdversaryMode::Domain, SchedulePolicy::Synchronous, seed);
        let r = run_trial(&topo, &s).report;
        assert!(r.converged);
        assert!(
            r.max_occupancy <= k + 6,
            "occupancy {} for k={} exceeds budget + constant",
            r.max_occupancy,
            k
        );
    }
}

#[test]
fn random_scheduler_head_age_within_fairness_bound() {
    for f in [2usize, 4, 8] {
        let topo = build_topology(TopologyKind::Complete { n: 6 }, IdPolicy::RandomDistinct, 21).unwrap();
        let s = settings(2, AdversaryMode::Wild, SchedulePolicy::Random { fairness_bound: f as u64 }, 99);
        let r = run_trial(&topo, &s).report;
        assert!(r.converged);
        assert!(
            (r.max_head_age as usize) <= 2 * f.max(2),
            "head age {} not within fairness bound {}",
            r.max_head_age,
            f
        );
    }
}

#[test]
fn wild_mode_never_panics_and_always_converges() {
    for seed in 0..20u64 {
        let topo = build_topology(TopologyKind::Gnp { n: 10, p: 0.35 }, IdPolicy::RandomDistinct, seed).unwrap();
        let s = settings(4, AdversaryMode::Wild, SchedulePolicy::Random { fairness_bound: 5 }, seed);
        let r = run_trial(&topo, &s).report;
        assert!(r.converged, "seed {seed} did not converge");
        assert_eq!(r.vocab_violations, 0, "seed {seed} emitted out-of-domain fields");
    }
}

#[test]
fn split_channels_behave_like_shared_on_clean_start() {
    let topo = build_topology(TopologyKind::Ring { n: 6 }, IdPolicy::Sequential, 2).unwrap();
    for mode in [ChannelMode::Shared, ChannelMode::Split] {
        let mut s = settings(0, AdversaryMode::Domain, SchedulePolicy::Synchronous, 3);
        s.channel_mode = mode;
        let r = run_trial(&topo, &s).report;
        assert!(r.converged, "{mode:?} failed to converge");
        assert!(r.closure_galpha.is_empty());
    }
}

#[test]
fn clean_start_lambda_stays_zero() {
    // k=0 start: no forged replies can ever appear (Γ_B closed from step 0).
    let topo = build_topology(TopologyKind::Path { n: 4 }, IdPolicy::Sequential, 1).unwrap();
    let mut s = settings(0, AdversaryMode::Domain, SchedulePolicy::Synchronous, 1);
    s.record_trace = true;
    let out = run_trial(&topo, &s);
    assert!(out.trace.unwrap().iter().all(|r| r.lambda == 0));
}

#[test]
fn rounds_advance_and_bound_steps() {
    let topo = build_topology(TopologyKind::Ring { n: 8 }, IdPolicy::RandomDistinct, 6).unwrap();
    let s = settings(3, AdversaryMode::Domain, SchedulePolicy::Random { fairness_bound: 6 }, 8);
    let r = run_trial(&topo, &s).report;
    assert!(r.converged);
    assert!(r.rounds >= 1);
    assert!(r.rounds_to_galpha.unwrap() <= r.rounds);
    assert!(r.steps_to_galpha.unwrap() <= r.steps);
}

#[test]
fn dag_oracle_matches_phi_on_converged_runs() {
    for seed in [3u64, 14, 25] {
        let topo = build_topology(TopologyKind::Gnp { n: 9, p: 0.5 }, IdPolicy::RandomDistinct, seed).unwrap();
        let mut s = settings(2, AdversaryMode::Domain, SchedulePolicy::Random { fairness_bound: 4 }, seed);
        s.stop = StopCondition::GammaDag;
        let out = run_trial(&topo, &s);
        assert!(out.report.converged);
        assert_eq!(out.report.dag_oracle_at_gdag, Some(true));
        let _ = monitors::closure_watch(&[true]);
    }
}
