// Sparse-angle tomography of the Shepp-Logan phantom, with per-level
// wavelet coefficient dumps of the posterior mean.

use std::path::PathBuf;

use besov_rto::runner::{read_csv, run_experiment, Problem, RunConfig};
use besov_rto::Result;

pub fn run_example() -> Result<()> {
    run(std::env::temp_dir().join("besov-rto-ct"))
}

fn run(output_dir: PathBuf) -> Result<()> {
    let config = RunConfig {
        problem: Problem::Ct,
        n: 16,
        s: 1.0,
        p: 1.5,
        lambda: 0.025,
        ct_angles: 10,
        ct_detectors: 25,
        n_samples: 200,
        seed: 1,
        output_dir,
        ..RunConfig::default()
    };
    let outcome = run_experiment(&config)?;
    println!(
        "m = {}, acceptance {:.3}, mean error {:.3}",
        outcome.manifest.derived.m, outcome.manifest.acceptance_rate, outcome.manifest.mean_relative_error
    );
    let (_, rows) = read_csv(&config.output_dir.join("coeff_sparsity.csv"))?;
    for row in rows {
        println!(
            "level {} orientation {}: {:.0} coefficients, near-zero fraction {:.3}",
            row[0], row[1], row[2], row[3]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    match std::env::args().nth(1) {
        Some(dir) => run(dir.into()),
        None => run_example(),
    }
}
