//! Batch front end: experiment sweeps, the acceptance battery, DOT export of
//! the converged orientation, and bit-exact trace replay.
//!
//! Every flag can also be set through an environment variable with the
//! `STABDAG_` prefix (e.g. `STABDAG_TOPOLOGY=ring`). Precedence: flags beat
//! environment variables beat the `--config` file beat built-in defaults.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stabdag::harness::{
    self, verify, ExperimentConfig, ScheduleChoice, EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_OK,
};
use stabdag::simnet::{run_trial, AdversaryMode, ChannelMode, StopCondition};
use stabdag::topology::{build_topology, IdPolicy, TopologyKind};

#[derive(Parser)]
#[command(
    name = "stabdag",
    version,
    about = "Self-stabilizing DAG orientation + (Δ+1) coloring simulator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a multi-seed experiment and print the aggregate report.
    Run(RunArgs),
    /// Run the acceptance-criteria battery.
    Verify(VerifyArgs),
    /// Run one trial and emit the final orientation as a DOT graph.
    ExportDot(ExportDotArgs),
    /// Re-execute a recorded trace under a scripted schedule and compare digests.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TopologyArg {
    Path,
    Ring,
    Star,
    Complete,
    Gnp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AdversaryArg {
    Domain,
    Wild,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScheduleArg {
    Sync,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChannelModeArg {
    Shared,
    Split,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IdPolicyArg {
    Sequential,
    RandomDistinct,
    AdversarialPermutation,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML experiment file; flags below override its fields.
    #[arg(long, env = "STABDAG_CONFIG")]
    config: Option<PathBuf>,

    /// Topology family.
    #[arg(long, value_enum, env = "STABDAG_TOPOLOGY")]
    topology: Option<TopologyArg>,

    /// Node count for the topology.
    #[arg(long, env = "STABDAG_N")]
    n: Option<usize>,

    /// Edge probability (gnp only).
    #[arg(long, env = "STABDAG_P")]
    p: Option<f64>,

    /// Identifier assignment policy.
    #[arg(long, value_enum, env = "STABDAG_ID_POLICY")]
    id_policy: Option<IdPolicyArg>,

    /// Adversarial messages seeded per directed channel.
    #[arg(short, long, env = "STABDAG_K")]
    k: Option<usize>,

    #[arg(long, value_enum, env = "STABDAG_ADVERSARY")]
    adversary: Option<AdversaryArg>,

    #[arg(long, value_enum, env = "STABDAG_SCHEDULE")]
    schedule: Option<ScheduleArg>,

    /// Fairness bound F for the random schedule (default 4·Δ).
    #[arg(long, env = "STABDAG_FAIRNESS")]
    fairness: Option<u64>,

    /// Either a count ("50" → seeds 1..=50) or an explicit list ("3,7,19").
    #[arg(long, env = "STABDAG_SEEDS")]
    seeds: Option<String>,

    #[arg(long, env = "STABDAG_MAX_STEPS")]
    max_steps: Option<u64>,

    /// Stop condition: gb, gdag, galpha, all, or steps=N.
    #[arg(long, env = "STABDAG_STOP")]
    stop: Option<String>,

    /// Directory for per-seed JSONL trace files.
    #[arg(long, env = "STABDAG_TRACE")]
    trace: Option<PathBuf>,

    /// Path for the JSON report (run) or the DOT file (export-dot).
    #[arg(long, env = "STABDAG_OUT")]
    out: Option<PathBuf>,

    #[arg(long, value_enum, env = "STABDAG_CHANNEL_MODE")]
    channel_mode: Option<ChannelModeArg>,

    #[arg(long, env = "STABDAG_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// quick finishes in under a minute; full runs the whole matrix.
    #[arg(long, value_enum, default_value_t = LevelArg::Quick, env = "STABDAG_LEVEL")]
    level: LevelArg,

    #[arg(long, default_value_t = 4, env = "STABDAG_WORKERS")]
    workers: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Args)]
struct ExportDotArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
}

#[derive(Args)]
struct ReplayArgs {
    /// JSONL trace file produced by `run --trace`.
    #[arg(env = "STABDAG_TRACE")]
    trace: PathBuf,
}

fn parse_seeds(text: &str) -> Result<Vec<u64>, String> {
    if text.contains(',') {
        text.split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|e| format!("seed `{s}`: {e}")))
            .collect()
    } else {
        let count: u64 = text.trim().parse().map_err(|e| format!("seeds `{text}`: {e}"))?;
        if count == 0 {
            return Err("seed count must be positive".into());
        }
        Ok((1..=count).collect())
    }
}

fn parse_stop(text: &str) -> Result<StopCondition, String> {
    match text {
        "gb" => Ok(StopCondition::GammaB),
        "gdag" => Ok(StopCondition::GammaDag),
        "galpha" => Ok(StopCondition::GammaAlpha),
        "all" => Ok(StopCondition::All),
        other => match other.strip_prefix("steps=") {
            Some(n) => n
                .parse()
                .map(StopCondition::Steps)
                .map_err(|e| format!("stop `{other}`: {e}")),
            None => Err(format!(
                "stop `{other}` is not one of gb, gdag, galpha, all, steps=N"
            )),
        },
    }
}

impl ExperimentArgs {
    fn build(&self) -> Result<ExperimentConfig, String> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                ExperimentConfig::from_toml(&text).map_err(|e| e.to_string())?
            }
            None => {
                if self.topology.is_none() {
                    return Err("either --config or --topology is required".into());
                }
                ExperimentConfig::from_toml("[topology]\nkind = \"ring\"\nn = 2\n")
                    .expect("baseline config parses")
            }
        };

        if self.topology.is_some() || self.n.is_some() || self.p.is_some() {
            let n = self.n.unwrap_or(cfg.topology.node_count());
            let family = self.topology.unwrap_or(match cfg.topology {
                TopologyKind::Path { .. } => TopologyArg::Path,
                TopologyKind::Ring { .. } => TopologyArg::Ring,
                TopologyKind::Star { .. } => TopologyArg::Star,
                TopologyKind::Complete { .. } => TopologyArg::Complete,
                TopologyKind::Gnp { .. } => TopologyArg::Gnp,
            });
            cfg.topology = match family {
                TopologyArg::Path => TopologyKind::Path { n },
                TopologyArg::Ring => TopologyKind::Ring { n },
                TopologyArg::Star => TopologyKind::Star { n },
                TopologyArg::Complete => TopologyKind::Complete { n },
                TopologyArg::Gnp => {
                    let p = self.p.or(match cfg.topology {
                        TopologyKind::Gnp { p, .. } => Some(p),
                        _ => None,
                    });
                    TopologyKind::Gnp {
                        n,
                        p: p.ok_or("--p is required for gnp")?,
                    }
                }
            };
        }
        if let Some(policy) = self.id_policy {
            cfg.id_policy = match policy {
                IdPolicyArg::Sequential => IdPolicy::Sequential,
                IdPolicyArg::RandomDistinct => IdPolicy::RandomDistinct,
                IdPolicyArg::AdversarialPermutation => IdPolicy::AdversarialPermutation,
            };
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(a) = self.adversary {
            cfg.adversary = match a {
                AdversaryArg::Domain => AdversaryMode::Domain,
                AdversaryArg::Wild => AdversaryMode::Wild,
            };
        }
        if let Some(s) = self.schedule {
            cfg.schedule = match s {
                ScheduleArg::Sync => ScheduleChoice::Sync,
                ScheduleArg::Random => ScheduleChoice::Random,
            };
        }
        if self.fairness.is_some() {
            cfg.fairness = self.fairness;
        }
        if let Some(seeds) = &self.seeds {
            cfg.seeds = parse_seeds(seeds)?;
        }
        if let Some(max_steps) = self.max_steps {
            cfg.max_steps = max_steps;
        }
        if let Some(stop) = &self.stop {
            cfg.stop = parse_stop(stop)?;
        }
        if self.trace.is_some() {
            cfg.trace = self.trace.clone();
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if let Some(m) = self.channel_mode {
            cfg.channel_mode = match m {
                ChannelModeArg::Shared => ChannelMode::Shared,
                ChannelModeArg::Split => ChannelMode::Split,
            };
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

fn cmd_run(args: &RunArgs) -> i32 {
    let cfg = match args.experiment.build() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    match harness::run_experiment(&cfg) {
        Ok(outcome) => {
            print!("{}", harness::render_summary(&outcome));
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> i32 {
    let level = match args.level {
        LevelArg::Quick => verify::Level::Quick,
        LevelArg::Full => verify::Level::Full,
    };
    let summary = verify::verify_suite(level, args.workers.max(1));
    print!("{}", summary.render());
    if summary.all_passed() {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}

fn cmd_export_dot(args: &ExportDotArgs) -> i32 {
    let cfg = match args.experiment.build() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let seed = cfg.seeds[0];
    let topo = match build_topology(cfg.topology, cfg.id_policy, seed) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let settings = cfg.trial_settings(&topo, seed, false);
    let output = run_trial(&topo, &settings);
    let dot = harness::export_dot(&topo, &output.final_config);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &dot) {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_CONFIG;
            }
            eprintln!(
                "wrote {} (seed {seed}, converged: {})",
                path.display(),
                output.report.converged
            );
        }
        None => print!("{dot}"),
    }
    EXIT_OK
}

fn cmd_replay(args: &ReplayArgs) -> i32 {
    match harness::replay_trace(&args.trace) {
        Ok(outcome) => {
            println!(
                "steps {}  recorded {}  replayed {}  {}",
                outcome.steps,
                outcome.recorded_digest,
                outcome.replayed_digest,
                if outcome.matches { "match" } else { "MISMATCH" }
            );
            if outcome.matches {
                EXIT_OK
            } else {
                EXIT_NOT_CONVERGED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::ExportDot(args) => cmd_export_dot(args),
        Cmd::Replay(args) => cmd_replay(args),
    };
    ExitCode::from(code as u8)
}
