// Posterior sampling for 1D inpainting with the library API: MAP point,
// RTO proposals, Metropolis-Hastings, summaries.
//
// `cargo run --release --example inpainting_rto -- 512` runs the full-size
// problem; the default is a quick 128-point version.

use std::sync::Arc;

use besov_rto::diagnostics::{summarize, SampleSet};
use besov_rto::forward::{make_data, phantom_1d, Inpainting};
use besov_rto::prior::{BesovPrior, Posterior};
use besov_rto::rto::{run_chain, RtoConfig};
use besov_rto::wavelet::{WaveletFamily, WaveletSystem};
use besov_rto::Result;

pub fn run_example() -> Result<()> {
    run(128)
}

fn run(n: usize) -> Result<()> {
    let f_true = phantom_1d(n)?;
    let op = Arc::new(Inpainting::new(n, &[[0.1, 0.15], [0.425, 0.475]])?);
    let data = make_data(op.as_ref(), &f_true, 0.02, 11)?;

    for family in [WaveletFamily::Haar, WaveletFamily::Daubechies(8)] {
        let prior = BesovPrior::new(1.2, 1.5, 0.025, WaveletSystem::for_signal(family, n)?)?;
        let posterior = Posterior::new(prior, op.clone(), data.y.clone(), data.noise.sigma)?;
        let config = RtoConfig {
            n_samples: 400,
            seed: 3,
            ..RtoConfig::default()
        };
        let chain = run_chain(&posterior, &config)?;
        let samples = SampleSet::from_rows(chain.f_samples())?;
        let stats = summarize(&samples, 0.95, Some(chain.acceptance_rate()), Some(chain.total_seconds))?;
        let err = stats
            .mean
            .iter()
            .zip(&f_true)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
            / f_true.iter().map(|v| v * v).sum::<f64>().sqrt();
        let width = stats.ci_upper.iter().zip(&stats.ci_lower).map(|(u, l)| u - l).sum::<f64>() / n as f64;
        println!(
            "{family}: acceptance {:.3}, mean error {err:.4}, mean 95% CI width {width:.4}, median ESS {:.1}",
            chain.acceptance_rate(),
            stats.ess_median.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    match std::env::args().nth(1) {
        Some(n) => run(n.parse().expect("signal length")),
        None => run_example(),
    }
}
