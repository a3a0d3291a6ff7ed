use serde::{Deserialize, Serialize};

use super::output::OutputGuard;
use super::{run_experiment, RunConfig};
use crate::error::{Error, Result};

/// Posterior means of one problem at several resolutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub sizes: Vec<usize>,
    /// Size of the common grid (the smallest `n`).
    pub common_n: usize,
    /// `means[k]` is the mean at `sizes[k]` averaged onto the common grid.
    pub means: Vec<Vec<f64>>,
    /// `‖m_a - m_b‖ / ‖m_finer‖` for every pair.
    pub differences: Vec<Vec<f64>>,
    pub acceptance_rates: Vec<f64>,
    /// Whether the two finest sizes are the closest pair, as expected from
    /// convergence under refinement.
    pub finest_pair_is_minimum: bool,
}

/// Averages consecutive blocks of `values` down to `n` entries.
fn block_average(values: &[f64], n: usize) -> Vec<f64> {
    let k = values.len() / n;
    values.chunks(k).map(|c| c.iter().sum::<f64>() / k as f64).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Runs `base` at every size in `sizes` and compares the posterior means.
///
/// Each run writes to `<output_dir>/n<size>`. All runs draw their noise on
/// the finest grid so that they see the same underlying realization. The
/// comparison goes to `sweep_means.csv`, `sweep_differences.csv` and
/// `sweep.json` in `output_dir`.
pub fn discretization_sweep(base: &RunConfig, sizes: &[usize]) -> Result<SweepReport> {
    if !base.problem.is_1d() {
        return Err(Error::Parameter("the discretization sweep needs a 1D problem".into()));
    }
    if sizes.is_empty() {
        return Err(Error::Parameter("no sizes given".into()));
    }
    if let Some(&bad) = sizes.iter().find(|s| !s.is_power_of_two() || **s < 2) {
        return Err(Error::Parameter(format!("sweep size {bad} is not a power of two >= 2")));
    }
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let finest = *sizes.last().expect("nonempty");
    let common_n = sizes[0];
    let configs: Vec<RunConfig> = sizes
        .iter()
        .map(|&n| {
            let config = RunConfig {
                n,
                noise_grid: Some(base.noise_grid.unwrap_or(finest).max(finest)),
                output_dir: base.output_dir.join(format!("n{n}")),
                ..base.clone()
            };
            config.validate().map(|_| config)
        })
        .collect::<Result<_>>()?;

    let mut means = Vec::new();
    let mut acceptance_rates = Vec::new();
    for config in &configs {
        log::info!("sweep: running n = {}", config.n);
        let outcome = run_experiment(config)?;
        means.push(block_average(&outcome.mean, common_n));
        acceptance_rates.push(outcome.manifest.acceptance_rate);
    }

    let k = sizes.len();
    let differences: Vec<Vec<f64>> = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    let diff: Vec<f64> = means[a].iter().zip(&means[b]).map(|(x, y)| x - y).collect();
                    norm(&diff) / norm(&means[a.max(b)])
                })
                .collect()
        })
        .collect();
    let finest_pair_is_minimum = k < 3 || {
        let last = differences[k - 2][k - 1];
        (0..k).all(|a| (0..k).all(|b| a == b || differences[a][b] >= last))
    };
    if !finest_pair_is_minimum {
        log::warn!("the two finest resolutions are not the closest pair of posterior means");
    }

    let report = SweepReport {
        sizes,
        common_n,
        means,
        differences,
        acceptance_rates,
        finest_pair_is_minimum,
    };
    let mut out = OutputGuard::create(&base.output_dir)?;
    let labels: Vec<String> = report.sizes.iter().map(|n| format!("n{n}")).collect();
    let mut header = vec!["index", "x"];
    header.extend(labels.iter().map(String::as_str));
    let rows: Vec<Vec<f64>> = (0..common_n)
        .map(|i| {
            let mut row = vec![i as f64, i as f64 / common_n as f64];
            row.extend(report.means.iter().map(|m| m[i]));
            row
        })
        .collect();
    out.write_csv("sweep_means.csv", &header, &rows)?;
    let mut header = vec!["n"];
    header.extend(labels.iter().map(String::as_str));
    let rows: Vec<Vec<f64>> = report
        .sizes
        .iter()
        .zip(&report.differences)
        .map(|(&n, d)| std::iter::once(n as f64).chain(d.iter().copied()).collect())
        .collect();
    out.write_csv("sweep_differences.csv", &header, &rows)?;
    out.write_json("sweep.json", &report)?;
    out.commit();
    Ok(report)
}
