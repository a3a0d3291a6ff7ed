// A complete deconvolution run through the experiment runner, which writes
// samples, summaries and a manifest to disk.

use std::path::PathBuf;

use besov_rto::runner::{read_csv, run_experiment, Problem, RunConfig};
use besov_rto::Result;

pub fn run_example() -> Result<()> {
    run(std::env::temp_dir().join("besov-rto-deconvolution"))
}

fn run(output_dir: PathBuf) -> Result<()> {
    let config = RunConfig {
        problem: Problem::Deconvolution,
        n: 64,
        s: 1.0,
        p: 1.5,
        lambda: 1.0,
        n_samples: 500,
        seed: 7,
        output_dir,
        ..RunConfig::default()
    };
    let outcome = run_experiment(&config)?;
    let m = &outcome.manifest;
    println!(
        "κ = {:.4}, σ = {:.3e}, acceptance {:.3}, mean error {:.4}",
        m.derived.kappa, m.derived.sigma, m.acceptance_rate, m.mean_relative_error
    );
    for probe in &m.probes {
        let (_, rows) = read_csv(&config.output_dir.join(&probe.file))?;
        println!("x = {} (index {}): lag-1 autocorrelation {:.3}", probe.position, probe.index, rows[1][1]);
    }
    println!("files in {}", config.output_dir.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    match std::env::args().nth(1) {
        Some(dir) => run(dir.into()),
        None => run_example(),
    }
}
