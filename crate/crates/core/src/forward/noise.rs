use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::LinearForward;

/// Additive white Gaussian noise scaled to a target relative level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma: f64,
    pub relative_level: f64,
}

impl NoiseModel {
    /// `σ = level ‖f_true‖₂ / √m`, so that `E‖ε‖₂ ≈ level ‖f_true‖₂`.
    pub fn for_signal(relative_level: f64, f_true: &[f64], m: usize) -> Result<Self> {
        if !(relative_level >= 0.0) || !relative_level.is_finite() {
            return Err(Error::Parameter(format!(
                "relative noise level must be nonnegative, got {relative_level}"
            )));
        }
        if m == 0 {
            return Err(Error::Dimension("no observations".into()));
        }
        let norm = f_true.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(Self {
            sigma: relative_level * norm / (m as f64).sqrt(),
            relative_level,
        })
    }
}

/// Noisy observations of a known signal.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticData {
    pub y: Vec<f64>,
    pub noise: NoiseModel,
    /// `‖ε‖₂ / ‖f_true‖₂` for the drawn noise.
    pub realized_level: f64,
}

/// `y = A f_true + ε` with `ε ~ N(0, σ² I)` drawn from a seeded generator.
pub fn make_data(
    forward: &dyn LinearForward,
    f_true: &[f64],
    relative_level: f64,
    seed: u64,
) -> Result<SyntheticData> {
    let (m, _) = forward.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
    make_data_with(forward, f_true, relative_level, &z)
}

/// `y = A f_true + σ z` for a given standard normal vector `z`.
pub fn make_data_with(
    forward: &dyn LinearForward,
    f_true: &[f64],
    relative_level: f64,
    z: &[f64],
) -> Result<SyntheticData> {
    let clean = forward.apply(f_true)?;
    if z.len() != clean.len() {
        return Err(Error::Dimension(format!(
            "noise has {} entries, expected {}",
            z.len(),
            clean.len()
        )));
    }
    let noise = NoiseModel::for_signal(relative_level, f_true, clean.len())?;
    let mut eps_sq = 0.0;
    let y = clean
        .into_iter()
        .zip(z)
        .map(|(v, z)| {
            let e = noise.sigma * z;
            eps_sq += e * e;
            v + e
        })
        .collect();
    let norm = f_true.iter().map(|v| v * v).sum::<f64>().sqrt();
    let realized_level = if norm > 0.0 { eps_sq.sqrt() / norm } else { 0.0 };
    log::info!(
        "noise sigma = {:.6e}, realized relative level = {:.5}",
        noise.sigma,
        realized_level
    );
    Ok(SyntheticData {
        y,
        noise,
        realized_level,
    })
}

/// Standard normal field on an `n`-point grid, made by summing blocks of a
/// field drawn on an `n_fine`-point grid and dividing by `√(n_fine / n)`.
///
/// Fields built from the same seed and `n_fine` at different `n` are
/// averages of one white noise realization, which keeps noise comparable
/// across resolutions.
pub fn nested_white_noise(seed: u64, n_fine: usize, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n_fine < n || !n_fine.is_multiple_of(n) {
        return Err(Error::Parameter(format!(
            "fine grid of {n_fine} points does not refine {n} points"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fine: Vec<f64> = (0..n_fine).map(|_| StandardNormal.sample(&mut rng)).collect();
    let k = n_fine / n;
    let scale = (k as f64).sqrt().recip();
    Ok(fine.chunks(k).map(|c| c.iter().sum::<f64>() * scale).collect())
}
