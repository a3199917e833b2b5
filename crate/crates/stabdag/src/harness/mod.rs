//! Batch front end: experiment configuration, multi-seed sweeps, metrics
//! aggregation, graph export, trace files and the acceptance battery.
//!
//! No interactive UI — configure a run, execute it, read the report.

mod dot;
mod trace;
pub mod verify;

pub use dot::export_dot;
pub use trace::{read_trace, replay_trace, write_trace, ReplayOutcome, TraceHeader};

use crate::simnet::{
    run_trial, AdversaryMode, ChannelMode, SchedulePolicy, StopCondition, TrialReport,
    TrialSettings,
};
use crate::topology::{build_topology, IdPolicy, Topology, TopologyError, TopologyKind};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Exit codes mirrored by the CLI: 0 all converged and closed, 1 convergence
/// failure, 2 closure violation, 3 configuration error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 1;
pub const EXIT_CLOSURE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleChoice {
    Sync,
    Random,
}

/// One experiment: a topology, an adversary, a schedule and a seed list.
/// Parsed from TOML (unknown keys rejected) with CLI flags overriding fields.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub topology: TopologyKind,
    #[serde(default = "defaults::id_policy")]
    pub id_policy: IdPolicy,
    #[serde(default)]
    pub k: usize,
    #[serde(default = "defaults::adversary")]
    pub adversary: AdversaryMode,
    #[serde(default = "defaults::channel_mode")]
    pub channel_mode: ChannelMode,
    #[serde(default = "defaults::schedule")]
    pub schedule: ScheduleChoice,
    /// Fairness bound F for the random schedule; `None` means 4·Δ.
    #[serde(default)]
    pub fairness: Option<u64>,
    #[serde(default = "defaults::seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "defaults::stop")]
    pub stop: StopCondition,
    #[serde(default = "defaults::max_steps")]
    pub max_steps: u64,
    #[serde(default = "defaults::closure_window")]
    pub closure_window_rounds: u64,
    #[serde(default = "defaults::workers")]
    pub workers: usize,
    /// Directory for per-seed trace files; traces are opt-in (they are large).
    #[serde(default)]
    pub trace: Option<PathBuf>,
    /// Path for the aggregate report; reports are always produced, and are
    /// printed to stdout when no path is given.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

mod defaults {
    use super::*;
    pub fn id_policy() -> IdPolicy {
        IdPolicy::RandomDistinct
    }
    pub fn adversary() -> AdversaryMode {
        AdversaryMode::Domain
    }
    pub fn channel_mode() -> ChannelMode {
        ChannelMode::Shared
    }
    pub fn schedule() -> ScheduleChoice {
        ScheduleChoice::Random
    }
    pub fn seeds() -> Vec<u64> {
        vec![1]
    }
    pub fn stop() -> StopCondition {
        StopCondition::GammaAlpha
    }
    pub fn max_steps() -> u64 {
        1_000_000
    }
    pub fn closure_window() -> u64 {
        10
    }
    pub fn workers() -> usize {
        1
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.seeds.is_empty() {
            return Err(ConfigError::Invalid("seed list is empty".into()));
        }
        if self.max_steps == 0 {
            return Err(ConfigError::Invalid("max_steps must be positive".into()));
        }
        if self.workers == 0 {
            return Err(ConfigError::Invalid("workers must be positive".into()));
        }
        if let Some(0) = self.fairness {
            return Err(ConfigError::Invalid("fairness bound must be positive".into()));
        }
        if let TopologyKind::Gnp { p, .. } = self.topology {
            if !(0.0..=1.0).contains(&p) {
                return Err(ConfigError::Invalid(format!("gnp p={p} outside [0,1]")));
            }
        }
        Ok(())
    }

    /// The per-trial settings for one seed of this experiment.
    pub fn trial_settings(&self, topo: &Topology, seed: u64, record_trace: bool) -> TrialSettings {
        let max_degree = (0..topo.n()).map(|v| topo.degree(v)).max().unwrap_or(1);
        let schedule = match self.schedule {
            ScheduleChoice::Sync => SchedulePolicy::Synchronous,
            ScheduleChoice::Random => SchedulePolicy::Random {
                fairness_bound: self.fairness.unwrap_or(4 * max_degree as u64),
            },
        };
        TrialSettings {
            k: self.k,
            adversary: self.adversary,
            channel_mode: self.channel_mode,
            schedule,
            stop: self.stop,
            max_steps: self.max_steps,
            closure_window_rounds: self.closure_window_rounds,
            seed,
            record_trace,
        }
    }
}

/// One row of the aggregate: a seed and its report.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct TrialRow {
    pub seed: u64,
    pub report: TrialReport,
}

#[derive(Clone, PartialEq, Debug, Default, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub converged: usize,
    pub failed_seeds: Vec<u64>,
    pub closure_violation_seeds: Vec<u64>,
    pub median_rounds_to_gb: Option<u64>,
    pub median_rounds_to_gdag: Option<u64>,
    pub median_rounds_to_galpha: Option<u64>,
    pub median_steps_to_gdag: Option<u64>,
    pub max_rounds_to_galpha: Option<u64>,
    pub median_steps: u64,
    pub total_messages_dag: u64,
    pub total_messages_color: u64,
    pub max_occupancy: usize,
    pub max_head_age: u64,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub rows: Vec<TrialRow>,
    pub aggregate: Aggregate,
}

impl ExperimentOutcome {
    pub fn exit_code(&self) -> i32 {
        if !self.aggregate.failed_seeds.is_empty() {
            EXIT_NOT_CONVERGED
        } else if !self.aggregate.closure_violation_seeds.is_empty() {
            EXIT_CLOSURE
        } else {
            EXIT_OK
        }
    }
}

pub fn median(sorted: &mut [u64]) -> Option<u64> {
    if sorted.is_empty() {
        return None;
    }
    sorted.sort_unstable();
    Some(sorted[sorted.len() / 2])
}

fn aggregate(rows: &[TrialRow]) -> Aggregate {
    let mut agg = Aggregate {
        trials: rows.len(),
        ..Aggregate::default()
    };
    let mut gb = Vec::new();
    let mut gdag = Vec::new();
    let mut galpha = Vec::new();
    let mut sdag = Vec::new();
    let mut steps = Vec::new();
    for row in rows {
        let r = &row.report;
        if r.converged {
            agg.converged += 1;
        } else {
            agg.failed_seeds.push(row.seed);
        }
        if !(r.closure_gb.is_empty() && r.closure_gdag.is_empty() && r.closure_galpha.is_empty()) {
            agg.closure_violation_seeds.push(row.seed);
        }
        gb.extend(r.rounds_to_gb);
        gdag.extend(r.rounds_to_gdag);
        galpha.extend(r.rounds_to_galpha);
        sdag.extend(r.steps_to_gdag);
        steps.push(r.steps);
        agg.total_messages_dag += r.messages_dag;
        agg.total_messages_color += r.messages_color;
        agg.max_occupancy = agg.max_occupancy.max(r.max_occupancy);
        agg.max_head_age = agg.max_head_age.max(r.max_head_age);
    }
    agg.median_rounds_to_gb = median(&mut gb);
    agg.median_rounds_to_gdag = median(&mut gdag);
    agg.median_rounds_to_galpha = median(&mut galpha);
    agg.median_steps_to_gdag = median(&mut sdag);
    agg.max_rounds_to_galpha = galpha.iter().max().copied();
    agg.median_steps = median(&mut steps).unwrap_or(0);
    agg
}

/// Run every seed of the experiment, optionally across a worker pool.
/// Aggregation folds rows sorted by seed, so parallelism cannot change the
/// outcome. Per-seed trace files are written when `config.trace` is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, ConfigError> {
    config.validate()?;
    if let Some(dir) = &config.trace {
        std::fs::create_dir_all(dir)?;
    }

    let mut rows = run_seeds(config)?;
    rows.sort_by_key(|r| r.seed);
    let aggregate = aggregate(&rows);

    let outcome = ExperimentOutcome {
        config: config.clone(),
        rows,
        aggregate,
    };
    if let Some(path) = &config.out {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        std::fs::write(path, serde_json::to_string_pretty(&outcome).unwrap())?;
    }
    Ok(outcome)
}

fn run_one(config: &ExperimentConfig, seed: u64) -> Result<TrialRow, ConfigError> {
    let topo = build_topology(config.topology, config.id_policy, seed)?;
    let record = config.trace.is_some();
    let settings = config.trial_settings(&topo, seed, record);
    let out = run_trial(&topo, &settings);
    if let Some(dir) = &config.trace {
        let header = TraceHeader::new(config, seed, &out.report);
        let path = dir.join(format!("trace-{seed}.jsonl"));
        write_trace(&path, &header, out.trace.as_deref().unwrap_or(&[]))?;
    }
    Ok(TrialRow {
        seed,
        report: out.report,
    })
}

fn run_seeds(config: &ExperimentConfig) -> Result<Vec<TrialRow>, ConfigError> {
    let workers = config.workers.min(config.seeds.len()).max(1);
    if workers == 1 {
        return config.seeds.iter().map(|&s| run_one(config, s)).collect();
    }
    let chunks: Vec<Vec<u64>> = (0..workers)
        .map(|w| {
            config
                .seeds
                .iter()
                .copied()
                .skip(w)
                .step_by(workers)
                .collect()
        })
        .collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|chunk| {
                scope.spawn(move || {
                    chunk
                        .iter()
                        .map(|&s| run_one(config, s))
                        .collect::<Result<Vec<_>, _>>()
                })
            })
            .collect();
        let mut rows = Vec::new();
        for h in handles {
            rows.extend(h.join().expect("worker panicked")?);
        }
        Ok(rows)
    })
}

/// Plain-text rendering of the aggregate for terminal output.
pub fn render_summary(outcome: &ExperimentOutcome) -> String {
    let a = &outcome.aggregate;
    let mut s = String::new();
    s.push_str(&format!(
        "trials {}  converged {}  failed {:?}  closure-violations {:?}\n",
        a.trials, a.converged, a.failed_seeds, a.closure_violation_seeds
    ));
    let opt = |v: Option<u64>| v.map_or("-".into(), |x| x.to_string());
    s.push_str(&format!(
        "median rounds: gb {}  gdag {}  galpha {} (max {})\n",
        opt(a.median_rounds_to_gb),
        opt(a.median_rounds_to_gdag),
        opt(a.median_rounds_to_galpha),
        opt(a.max_rounds_to_galpha)
    ));
    s.push_str(&format!(
        "median steps {}  messages dag {}  color {}  max occupancy {}  max head age {}\n",
        a.median_steps, a.total_messages_dag, a.total_messages_color, a.max_occupancy,
        a.max_head_age
    ));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> ExperimentConfig {
        ExperimentConfig {
            topology: TopologyKind::Path { n: 4 },
            id_policy: IdPolicy::Sequential,
            k: 1,
            adversary: AdversaryMode::Domain,
            channel_mode: ChannelMode::Shared,
            schedule: ScheduleChoice::Sync,
            fairness: None,
            seeds: vec![1, 2, 3],
            stop: StopCondition::GammaAlpha,
            max_steps: 200_000,
            closure_window_rounds: 5,
            workers: 1,
            trace: None,
            out: None,
        }
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = base_config();
        let text = cfg.to_toml();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut text = String::from("bogus_knob = 7\n");
        text.push_str(&base_config().to_toml());
        assert!(ExperimentConfig::from_toml(&text).is_err());
    }

    #[test]
    fn minimal_toml_uses_defaults() {
        let cfg = ExperimentConfig::from_toml("[topology]\nkind = \"ring\"\nn = 5\n").unwrap();
        assert_eq!(cfg.topology, TopologyKind::Ring { n: 5 });
        assert_eq!(cfg.k, 0);
        assert_eq!(cfg.seeds, vec![1]);
        assert_eq!(cfg.max_steps, 1_000_000);
    }

    #[test]
    fn invalid_configs_are_refused() {
        let mut cfg = base_config();
        cfg.seeds.clear();
        assert!(cfg.validate().is_err());
        let mut cfg = base_config();
        cfg.max_steps = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = base_config();
        cfg.topology = TopologyKind::Gnp { n: 10, p: 1.5 };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn single_seed_experiment_converges_with_one_row() {
        let mut cfg = base_config();
        cfg.topology = TopologyKind::Path { n: 2 };
        cfg.k = 0;
        cfg.seeds = vec![1];
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.rows.len(), 1);
        assert_eq!(out.aggregate.converged, 1);
        assert_eq!(out.exit_code(), EXIT_OK);
    }

    #[test]
    fn parallel_and_serial_agree() {
        let mut cfg = base_config();
        cfg.seeds = (1..=6).collect();
        let serial = run_experiment(&cfg).unwrap();
        cfg.workers = 3;
        let parallel = run_experiment(&cfg).unwrap();
        assert_eq!(serial.rows, parallel.rows);
        assert_eq!(serial.aggregate, parallel.aggregate);
    }

    #[test]
    fn summary_is_reproducible() {
        let cfg = base_config();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
