// Posterior means of the same deconvolution problem at several resolutions,
// compared on the coarsest grid.

use besov_rto::runner::{discretization_sweep, Problem, RunConfig};
use besov_rto::Result;

pub fn run_example() -> Result<()> {
    run(&[32, 64])
}

fn run(sizes: &[usize]) -> Result<()> {
    let base = RunConfig {
        problem: Problem::Deconvolution,
        s: 1.0,
        p: 1.5,
        lambda: 1.0,
        n_samples: 300,
        seed: 5,
        output_dir: std::env::temp_dir().join("besov-rto-sweep"),
        ..RunConfig::default()
    };
    let report = discretization_sweep(&base, sizes)?;
    println!("relative L2 differences on {} points:", report.common_n);
    for (n, row) in report.sizes.iter().zip(&report.differences) {
        let cells: Vec<String> = row.iter().map(|d| format!("{d:.4}")).collect();
        println!("  n = {n:<5} {}", cells.join("  "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    match std::env::args().nth(1) {
        Some(list) => run(&list.split(',').map(|s| s.parse().expect("size")).collect::<Vec<_>>()),
        None => run_example(),
    }
}
