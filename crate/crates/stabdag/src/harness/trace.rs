//! Trace files: line-delimited JSON, one header record followed by one
//! record per step. A trace carries everything needed to reproduce its run
//! (topology descriptor, trial settings, schedule script), so `replay`
//! can re-execute it and compare final digests bit for bit.

use super::{ConfigError, ExperimentConfig};
use crate::simnet::{run_trial_from, seed_adversary, SchedulePolicy, StepRecord, TrialReport};
use crate::topology::{build_topology, IdPolicy, TopologyKind};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct TraceHeader {
    pub topology: TopologyKind,
    pub id_policy: IdPolicy,
    pub seed: u64,
    pub settings: crate::simnet::TrialSettings,
    /// Digest of the final configuration of the recorded run.
    pub final_digest: String,
    pub steps: u64,
}

impl TraceHeader {
    pub fn new(config: &ExperimentConfig, seed: u64, report: &TrialReport) -> Self {
        let topo = build_topology(config.topology, config.id_policy, seed)
            .expect("topology was already built for the recorded run");
        TraceHeader {
            topology: config.topology,
            id_policy: config.id_policy,
            seed,
            settings: config.trial_settings(&topo, seed, true),
            final_digest: report.final_digest.clone(),
            steps: report.steps,
        }
    }
}

pub fn write_trace(
    path: &Path,
    header: &TraceHeader,
    records: &[StepRecord],
) -> Result<(), ConfigError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(&mut w, header).map_err(io_err)?;
    w.write_all(b"\n")?;
    for rec in records {
        serde_json::to_writer(&mut w, rec).map_err(io_err)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<(TraceHeader, Vec<StepRecord>), ConfigError> {
    let mut lines = BufReader::new(std::fs::File::open(path)?).lines();
    let head_line = lines
        .next()
        .ok_or_else(|| ConfigError::Invalid("empty trace file".into()))??;
    let header: TraceHeader = serde_json::from_str(&head_line).map_err(io_err)?;
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line).map_err(io_err)?);
    }
    Ok((header, records))
}

fn io_err(e: serde_json::Error) -> ConfigError {
    ConfigError::Invalid(format!("trace encoding: {e}"))
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub steps: u64,
    pub recorded_digest: String,
    pub replayed_digest: String,
    pub matches: bool,
}

/// Re-execute a recorded trace under the scripted schedule and compare the
/// final configuration digest with the recorded one.
pub fn replay_trace(path: &Path) -> Result<ReplayOutcome, ConfigError> {
    let (header, records) = read_trace(path)?;
    let topo = build_topology(header.topology, header.id_policy, header.seed)?;
    let config = seed_adversary(
        &topo,
        header.settings.k,
        header.settings.adversary,
        header.settings.channel_mode,
        header.settings.seed,
    );
    let mut settings = header.settings.clone();
    settings.schedule = SchedulePolicy::Scripted {
        nodes: records.iter().map(|r| r.node).collect(),
    };
    settings.record_trace = false;
    let out = run_trial_from(&topo, config, &settings);
    Ok(ReplayOutcome {
        steps: out.report.steps,
        recorded_digest: header.final_digest.clone(),
        replayed_digest: out.report.final_digest.clone(),
        matches: out.report.final_digest == header.final_digest,
    })
}
