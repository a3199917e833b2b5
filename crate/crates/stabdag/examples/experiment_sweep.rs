//! A multi-seed experiment from a TOML config string — the same path the CLI
//! takes. Seeds run on a worker pool; aggregation folds rows sorted by seed,
//! so the summary is identical however many workers run.

use stabdag::harness::{render_summary, run_experiment, ExperimentConfig};

const CONFIG: &str = r#"
k = 6
adversary = "wild"
channel_mode = "split"
schedule = "random"
seeds = [1, 2, 3, 4, 5, 6, 7, 8]
stop = "gammaalpha"
workers = 4

[topology]
kind = "gnp"
n = 24
p = 0.2
"#;

fn main() {
    let cfg = ExperimentConfig::from_toml(CONFIG).unwrap();
    let outcome = run_experiment(&cfg).unwrap();
    print!("{}", render_summary(&outcome));
    for row in &outcome.rows {
        println!(
            "seed {:2}: {:5} steps, Γ_α at round {:?}, digest {}",
            row.seed, row.report.steps, row.report.rounds_to_galpha, row.report.final_digest
        );
    }
    std::process::exit(outcome.exit_code());
}
