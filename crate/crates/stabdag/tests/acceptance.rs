//! The acceptance battery, one line of output per criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the table.

use stabdag::harness::verify::{verify_suite, Level};

#[test]
fn acceptance_criteria() {
    let workers = std::thread::available_parallelism().map_or(4, |p| p.get());
    let summary = verify_suite(Level::Full, workers);
    print!("{}", summary.render());
    let failed: Vec<_> = summary
        .results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("criterion {}: {} ({})", r.id, r.name, r.detail))
        .collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
