//! Posterior summaries and MCMC quality metrics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MIN_CHAIN: usize = 10;
const MIN_SUMMARY: usize = 100;

/// Samples stored row by row (sample-major) in one flat buffer.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    dim: usize,
    data: Vec<f64>,
}

impl SampleSet {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::Dimension(format!(
                "{} values do not form rows of length {dim}",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<'a>(rows: impl IntoIterator<Item = &'a [f64]>) -> Result<Self> {
        let mut data = Vec::new();
        let mut dim = None;
        for row in rows {
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(Error::Dimension(format!("ragged samples: {d} vs {}", row.len())))
                }
                _ => {}
            }
            data.extend_from_slice(row);
        }
        Self::new(dim.unwrap_or(1), data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Trace of coordinate `j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.iter().skip(j).step_by(self.dim).copied().collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

fn centered(chain: &[f64]) -> Result<(Vec<f64>, f64)> {
    if chain.len() < MIN_CHAIN {
        return Err(Error::InsufficientSamples {
            needed: MIN_CHAIN,
            got: chain.len(),
        });
    }
    let n = chain.len() as f64;
    let mean = chain.iter().sum::<f64>() / n;
    let c: Vec<f64> = chain.iter().map(|x| x - mean).collect();
    let c0: f64 = c.iter().map(|x| x * x).sum();
    let scale = chain.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if !(c0 > (f64::EPSILON * scale).powi(2) * n) {
        return Err(Error::DegenerateChain("chain has zero variance".into()));
    }
    Ok((c, c0))
}

fn lag_product(c: &[f64], t: usize) -> f64 {
    c.iter().zip(&c[t..]).map(|(a, b)| a * b).sum()
}

/// Biased sample autocorrelation `ρ̂_0 … ρ̂_{max_lag}` with `ρ̂_0 = 1`.
pub fn acf(chain: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let (c, c0) = centered(chain)?;
    let max_lag = max_lag.min(chain.len() - 1);
    Ok((0..=max_lag)
        .map(|t| if t == 0 { 1.0 } else { lag_product(&c, t) / c0 })
        .collect())
}

/// Effective sample size of `M` chains of equal length `N`.
///
/// `ESS = M N / (-1 + 2 Σ_{t=0}^{K} (ρ̄_{2t} + ρ̄_{2t+1}))`, where `ρ̄` is the
/// autocorrelation averaged across chains and `K` is the last index for
/// which the pair sum is positive.
pub fn ess(chains: &[&[f64]]) -> Result<f64> {
    let Some(first) = chains.first() else {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    };
    let n = first.len();
    if chains.iter().any(|c| c.len() != n) {
        return Err(Error::Dimension("chains must have equal length".into()));
    }
    let centered: Vec<(Vec<f64>, f64)> = chains.iter().map(|c| centered(c)).collect::<Result<_>>()?;
    let m = chains.len() as f64;
    let rho = |t: usize| -> f64 {
        if t == 0 {
            return 1.0;
        }
        centered.iter().map(|(c, c0)| lag_product(c, t) / c0).sum::<f64>() / m
    };
    let mut sum = 0.0;
    let mut t = 0;
    while 2 * t + 1 < n {
        let pair = rho(2 * t) + rho(2 * t + 1);
        if pair <= 0.0 {
            break;
        }
        sum += pair;
        t += 1;
    }
    Ok(m * n as f64 / (-1.0 + 2.0 * sum))
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-coordinate posterior summary and chain quality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainStats {
    pub n_samples: usize,
    pub mean: Vec<f64>,
    pub ci_level: f64,
    pub ci_lower: Vec<f64>,
    pub ci_upper: Vec<f64>,
    /// `None` where the trace is constant.
    pub ess: Vec<Option<f64>>,
    pub ess_min: Option<f64>,
    pub ess_median: Option<f64>,
    pub ess_max: Option<f64>,
    pub degenerate_coordinates: usize,
    pub acceptance_rate: Option<f64>,
    pub wall_seconds: Option<f64>,
    /// Median ESS per second of wall-clock time.
    pub ess_per_second: Option<f64>,
}

impl ChainStats {
    /// Whether no coordinate produced an ESS.
    pub fn is_degenerate(&self) -> bool {
        self.ess_median.is_none()
    }
}

/// Summarizes a chain of (possibly repeated) post-MH samples.
///
/// The credible interval is the empirical `[(1-level)/2, (1+level)/2]`
/// quantile interval.
pub fn summarize(
    samples: &SampleSet,
    ci_level: f64,
    acceptance_rate: Option<f64>,
    wall_seconds: Option<f64>,
) -> Result<ChainStats> {
    if samples.len() < MIN_SUMMARY {
        return Err(Error::InsufficientSamples {
            needed: MIN_SUMMARY,
            got: samples.len(),
        });
    }
    if !(ci_level > 0.0 && ci_level < 1.0) {
        return Err(Error::Parameter(format!("credible level must lie in (0, 1), got {ci_level}")));
    }
    let lo_q = 0.5 * (1.0 - ci_level);
    let hi_q = 0.5 * (1.0 + ci_level);
    let per_coord: Vec<(f64, f64, f64, Option<f64>)> = (0..samples.dim())
        .into_par_iter()
        .map(|j| {
            let trace = samples.column(j);
            let mean = trace.iter().sum::<f64>() / trace.len() as f64;
            let e = match ess(&[&trace]) {
                Ok(v) => Some(v),
                Err(Error::DegenerateChain(_)) => None,
                Err(e) => return Err(e),
            };
            let mut sorted = trace;
            sorted.sort_by(f64::total_cmp);
            Ok((mean, quantile_sorted(&sorted, lo_q), quantile_sorted(&sorted, hi_q), e))
        })
        .collect::<Result<_>>()?;

    let mut finite: Vec<f64> = per_coord.iter().filter_map(|c| c.3).collect();
    finite.sort_by(f64::total_cmp);
    let degenerate_coordinates = samples.dim() - finite.len();
    let (ess_min, ess_median, ess_max) = if finite.is_empty() {
        (None, None, None)
    } else {
        (
            Some(finite[0]),
            Some(quantile_sorted(&finite, 0.5)),
            Some(finite[finite.len() - 1]),
        )
    };
    let ess_per_second = match (ess_median, wall_seconds) {
        (Some(e), Some(w)) if w > 0.0 => Some(e / w),
        _ => None,
    };
    Ok(ChainStats {
        n_samples: samples.len(),
        mean: per_coord.iter().map(|c| c.0).collect(),
        ci_level,
        ci_lower: per_coord.iter().map(|c| c.1).collect(),
        ci_upper: per_coord.iter().map(|c| c.2).collect(),
        ess: per_coord.iter().map(|c| c.3).collect(),
        ess_min,
        ess_median,
        ess_max,
        degenerate_coordinates,
        acceptance_rate,
        wall_seconds,
        ess_per_second,
    })
}
