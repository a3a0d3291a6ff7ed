use crate::error::{Error, Result};

use super::WaveletSystem;

/// Diagonal Besov weight operator `S`.
///
/// `S[0] = 1` and every level-`j` wavelet coefficient is weighted by
/// `2^{j κ}` with `κ = s + d/2 - d/p`.
#[derive(Clone, Debug, PartialEq)]
pub struct BesovWeights {
    kappa: f64,
    diag: Vec<f64>,
}

impl BesovWeights {
    pub fn new(s: f64, p: f64, dim: usize, levels: usize) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::Parameter(format!("smoothness s must be finite, got {s}")));
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Parameter(format!("integrability p must lie in [1, inf), got {p}")));
        }
        if dim != 1 && dim != 2 {
            return Err(Error::Parameter(format!("dimension must be 1 or 2, got {dim}")));
        }
        let d = dim as f64;
        let kappa = s + d / 2.0 - d / p;
        let mut diag = vec![1.0; 1 << (levels * dim)];
        for j in 0..levels {
            let w = (j as f64 * kappa).exp2();
            for v in &mut diag[1 << (j * dim)..1 << ((j + 1) * dim)] {
                *v = w;
            }
        }
        Ok(Self { kappa, diag })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }
}

/// The combined operator `B = S W` and its inverse `Wᵀ S⁻¹`.
#[derive(Clone, Debug)]
pub struct BesovOperator {
    wavelet: WaveletSystem,
    weights: BesovWeights,
}

impl BesovOperator {
    pub fn new(wavelet: WaveletSystem, weights: BesovWeights) -> Result<Self> {
        if wavelet.len() != weights.len() {
            return Err(Error::Dimension(format!(
                "wavelet system has {} coefficients but weights have {}",
                wavelet.len(),
                weights.len()
            )));
        }
        Ok(Self { wavelet, weights })
    }

    pub fn wavelet(&self) -> &WaveletSystem {
        &self.wavelet
    }

    pub fn weights(&self) -> &BesovWeights {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.wavelet.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `B f = S (W f)`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        let mut c = self.wavelet.analyze(f)?;
        for (v, w) in c.iter_mut().zip(self.weights.diagonal()) {
            *v *= w;
        }
        Ok(c)
    }

    /// `B⁻¹ z = Wᵀ (S⁻¹ z)`.
    pub fn apply_inverse(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.len() {
            return Err(Error::Dimension(format!(
                "B⁻¹ expects {} values, got {}",
                self.len(),
                z.len()
            )));
        }
        let scaled: Vec<f64> = z
            .iter()
            .zip(self.weights.diagonal())
            .map(|(v, w)| v / w)
            .collect();
        self.wavelet.synthesize(&scaled)
    }
}
