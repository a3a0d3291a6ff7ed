//! The Besov prior and the posterior it induces with a linear forward model
//! and Gaussian noise.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::LinearForward;
use crate::gen_gaussian::{GenGaussParams, PriorTransform, TailRegime};
use crate::wavelet::{BesovOperator, BesovWeights, WaveletSystem};

/// Besov `B^s_{p,p}` prior on a dyadic grid.
///
/// Coefficients of `B f = S W f` are i.i.d. generalized Gaussian with
/// density proportional to `exp(-τ |x|^p)`, with `τ` derived from `λ` as
/// in [`GenGaussParams`].
#[derive(Clone, Debug)]
pub struct BesovPrior {
    s: f64,
    transform: PriorTransform,
}

impl BesovPrior {
    pub fn new(s: f64, p: f64, lambda: f64, wavelet: WaveletSystem) -> Result<Self> {
        let weights = BesovWeights::new(s, p, wavelet.dim(), wavelet.levels())?;
        let besov = BesovOperator::new(wavelet, weights)?;
        let gg = GenGaussParams::new(p, lambda)?;
        Ok(Self {
            s,
            transform: PriorTransform::new(gg, besov),
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> f64 {
        self.transform.params().shape()
    }

    pub fn lambda(&self) -> f64 {
        self.transform.params().lambda()
    }

    pub fn kappa(&self) -> f64 {
        self.weights().kappa()
    }

    pub fn tau(&self) -> f64 {
        self.transform.params().tau()
    }

    pub fn alpha(&self) -> f64 {
        self.transform.params().alpha()
    }

    pub fn gg(&self) -> &GenGaussParams {
        self.transform.params()
    }

    pub fn wavelet(&self) -> &WaveletSystem {
        self.transform.besov().wavelet()
    }

    pub fn weights(&self) -> &BesovWeights {
        self.transform.besov().weights()
    }

    pub fn besov(&self) -> &BesovOperator {
        self.transform.besov()
    }

    pub fn transform(&self) -> &PriorTransform {
        &self.transform
    }

    /// Number of unknowns `n`.
    pub fn len(&self) -> usize {
        self.transform.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Standard normal vector of length `n` from a seeded stream.
    pub fn standard_normal(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..self.len()).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    /// A prior draw `f = B⁻¹ g(h)` with `h ~ N(0, I)`.
    ///
    /// The normal vector is drawn coarse-to-fine, so draws at `n` and `2n`
    /// from the same seed share their coarse coefficients.
    pub fn sample_prior(&self, seed: u64) -> Result<Vec<f64>> {
        self.transform.apply(&self.standard_normal(seed))
    }

    /// `‖B f‖_p`.
    pub fn besov_norm(&self, f: &[f64]) -> Result<f64> {
        Ok(self.besov_norm_pow(f)?.powf(1.0 / self.p()))
    }

    /// `‖B f‖_p^p`.
    pub fn besov_norm_pow(&self, f: &[f64]) -> Result<f64> {
        let p = self.p();
        Ok(self.besov().apply(f)?.iter().map(|c| c.abs().powf(p)).sum())
    }

    /// Unnormalized `ln π_prior(f) = -τ ‖B f‖_p^p`.
    pub fn log_prior(&self, f: &[f64]) -> Result<f64> {
        Ok(-self.tau() * self.besov_norm_pow(f)?)
    }
}

/// Posterior for `y = A f + ε`, `ε ~ N(0, σ² I)`, under a Besov prior.
#[derive(Clone, Debug)]
pub struct Posterior {
    prior: BesovPrior,
    forward: Arc<dyn LinearForward>,
    y: Vec<f64>,
    sigma: f64,
}

/// `F(h)` split into its prior and data blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    /// `h`.
    pub prior: Vec<f64>,
    /// `σ⁻¹ (A B⁻¹ g(h) - y)`.
    pub data: Vec<f64>,
    /// `g'(h)`.
    pub g_deriv: Vec<f64>,
    pub regime: TailRegime,
}

impl Residual {
    pub fn norm_sq(&self) -> f64 {
        self.prior.iter().chain(&self.data).map(|v| v * v).sum()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.prior.iter().chain(&self.data).copied().collect()
    }
}

impl Posterior {
    pub fn new(
        prior: BesovPrior,
        forward: Arc<dyn LinearForward>,
        y: Vec<f64>,
        sigma: f64,
    ) -> Result<Self> {
        let (m, n) = forward.shape();
        if n != prior.len() {
            return Err(Error::Dimension(format!(
                "forward operator acts on {n} unknowns but the prior has {}",
                prior.len()
            )));
        }
        if y.len() != m {
            return Err(Error::Dimension(format!(
                "forward operator produces {m} values but the data has {}",
                y.len()
            )));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Parameter(format!("noise level must be positive, got {sigma}")));
        }
        Ok(Self {
            prior,
            forward,
            y,
            sigma,
        })
    }

    pub fn prior(&self) -> &BesovPrior {
        &self.prior
    }

    pub fn forward(&self) -> &dyn LinearForward {
        self.forward.as_ref()
    }

    pub fn data(&self) -> &[f64] {
        &self.y
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `(m, n)`.
    pub fn shape(&self) -> (usize, usize) {
        self.forward.shape()
    }

    fn misfit_sq(&self, f: &[f64]) -> Result<f64> {
        let af = self.forward.apply(f)?;
        Ok(af
            .iter()
            .zip(&self.y)
            .map(|(a, y)| (a - y).powi(2))
            .sum::<f64>()
            / (self.sigma * self.sigma))
    }

    /// `-‖A f - y‖² / (2σ²) - τ ‖B f‖_p^p`.
    pub fn log_posterior_f(&self, f: &[f64]) -> Result<f64> {
        Ok(-0.5 * self.misfit_sq(f)? + self.prior.log_prior(f)?)
    }

    /// `-‖A B⁻¹ g(h) - y‖² / (2σ²) - ‖h‖² / 2`, i.e. `-½ ‖F(h)‖²`.
    pub fn log_posterior_h(&self, h: &[f64]) -> Result<f64> {
        let f = self.prior.transform().apply(h)?;
        let hh: f64 = h.iter().map(|v| v * v).sum();
        Ok(-0.5 * (self.misfit_sq(&f)? + hh))
    }

    /// `F(h) = [h; σ⁻¹ (A B⁻¹ g(h) - y)]`.
    pub fn residual(&self, h: &[f64]) -> Result<Residual> {
        let (g, g_deriv, regime) = self.prior.transform().evaluate(h)?;
        let f = self.prior.besov().apply_inverse(&g)?;
        let data = self
            .forward
            .apply(&f)?
            .iter()
            .zip(&self.y)
            .map(|(a, y)| (a - y) / self.sigma)
            .collect();
        Ok(Residual {
            prior: h.to_vec(),
            data,
            g_deriv,
            regime,
        })
    }

    /// `J(h) v = [v; σ⁻¹ A B⁻¹ (g'(h) ⊙ v)]`.
    pub fn jacobian_apply(&self, h: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != h.len() {
            return Err(Error::Dimension(format!(
                "Jacobian direction has {} entries, expected {}",
                v.len(),
                h.len()
            )));
        }
        let d = self.prior.transform().jacobian_diag(h)?;
        let scaled: Vec<f64> = d.iter().zip(v).map(|(a, b)| a * b).collect();
        let f = self.prior.besov().apply_inverse(&scaled)?;
        let mut out = v.to_vec();
        out.extend(self.forward.apply(&f)?.into_iter().map(|a| a / self.sigma));
        Ok(out)
    }

    /// `K = σ⁻¹ A B⁻¹` as a column-major `m × n` array.
    pub fn scaled_forward_matrix(&self) -> Result<Vec<f64>> {
        let (m, n) = self.shape();
        let columns: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                let f = self.prior.besov().apply_inverse(&e)?;
                let mut col = self.forward.apply(&f)?;
                for v in &mut col {
                    *v /= self.sigma;
                }
                Ok(col)
            })
            .collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(m * n);
        for col in columns {
            out.extend(col);
        }
        Ok(out)
    }
}
