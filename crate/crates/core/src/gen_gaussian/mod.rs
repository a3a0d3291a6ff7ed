//! Zero-mean generalized Gaussian distributions and the componentwise map
//! from standard normal variables onto them.
//!
//! With shape `p` and scaled regularization parameter `λ` the scale is
//! `α = (Γ(1/p)/Γ(3/p))^{1/2} λ^{-1/p}` and the rate is `τ = α^{-p}`, so the
//! density is proportional to `exp(-τ |x|^p)` and has variance
//! `λ^{-2/p}`. The map `g(h) = Φ_{α,p}^{-1}(Φ_N(h))` is evaluated through
//! regularized incomplete gamma functions entirely in log space.

pub mod special;

use serde::{Deserialize, Serialize};
use libm::lgamma as ln_gamma;

use crate::error::{Error, Result};
use crate::wavelet::BesovOperator;

use special::{
    inv_gamma_p_ln, inv_gamma_q_ln, inv_gamma_q_ln_asymptotic, ln_gamma_p, ln_gamma_q,
    ln_normal_pdf, normal_two_sided,
};

/// Beyond this |h| the normal tail is computed in log space.
pub const LOG_TAIL_THRESHOLD: f64 = 8.0;
/// Beyond this |h| the tail inverse switches to the asymptotic expansion.
pub const ASYMPTOTIC_THRESHOLD: f64 = 38.0;

/// Which numerical route produced a value of `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TailRegime {
    Central,
    LogTail,
    Asymptotic,
}

/// Parameters of a zero-mean generalized Gaussian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenGaussParams {
    p: f64,
    lambda: f64,
    alpha: f64,
    tau: f64,
    ln_norm: f64,
}

impl GenGaussParams {
    pub fn new(p: f64, lambda: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Parameter(format!("shape p must lie in [1, inf), got {p}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Parameter(format!("λ must be positive, got {lambda}")));
        }
        let ratio = ln_gamma(1.0 / p) - ln_gamma(3.0 / p);
        let ln_alpha = 0.5 * ratio - lambda.ln() / p;
        let alpha = ln_alpha.exp();
        let tau = (-p * ln_alpha).exp();
        let ln_norm = p.ln() - std::f64::consts::LN_2 - ln_alpha - ln_gamma(1.0 / p);
        Ok(Self {
            p,
            lambda,
            alpha,
            tau,
            ln_norm,
        })
    }

    pub fn shape(&self) -> f64 {
        self.p
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Scale `α`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Rate `τ` in `exp(-τ|x|^p)`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn variance(&self) -> f64 {
        (2.0 * self.alpha.ln() + ln_gamma(3.0 / self.p) - ln_gamma(1.0 / self.p)).exp()
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        self.ln_norm - (x.abs() / self.alpha).powf(self.p)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.5;
        }
        let t = (x.abs() / self.alpha).powf(self.p);
        let a = 1.0 / self.p;
        if x > 0.0 {
            0.5 + 0.5 * ln_gamma_p(a, t).exp()
        } else {
            0.5 * ln_gamma_q(a, t).exp()
        }
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0, 1), got {u}")));
        }
        if u == 0.5 {
            return Ok(0.0);
        }
        // Two-sided tail mass beyond |x|, computed without cancellation.
        let tail = if u < 0.5 { 2.0 * u } else { 2.0 * (1.0 - u) };
        let a = 1.0 / self.p;
        let t = if tail > 0.5 {
            inv_gamma_p_ln(a, (1.0 - tail).ln())
        } else {
            inv_gamma_q_ln(a, tail.ln())
        };
        let x = self.alpha * t.powf(a);
        Ok(if u < 0.5 { -x } else { x })
    }

    /// `g(h) = Φ_{α,p}^{-1}(Φ_N(h))`.
    pub fn g1d(&self, h: f64) -> f64 {
        self.map_with_derivative(h).value
    }

    /// `g'(h) = φ_N(h) / π_{α,p}(g(h))`, always positive.
    pub fn g1d_deriv(&self, h: f64) -> f64 {
        self.map_with_derivative(h).derivative
    }

    /// Evaluates `g`, `g'` and the numerical regime in one pass.
    pub fn map_with_derivative(&self, h: f64) -> MappedValue {
        if h == 0.0 {
            return MappedValue {
                value: 0.0,
                derivative: (ln_normal_pdf(0.0) - self.ln_norm).exp(),
                regime: TailRegime::Central,
            };
        }
        let ah = h.abs();
        let a = 1.0 / self.p;
        let (inner, ln_outer) = normal_two_sided(ah);
        let regime = if ah > ASYMPTOTIC_THRESHOLD {
            TailRegime::Asymptotic
        } else if ah > LOG_TAIL_THRESHOLD {
            TailRegime::LogTail
        } else {
            TailRegime::Central
        };
        // t = |g(h)/α|^p solves P(a, t) = P(|Z| <= |h|).
        let t = match regime {
            TailRegime::Asymptotic => inv_gamma_q_ln_asymptotic(a, ln_outer),
            _ if inner < 0.5 => inv_gamma_p_ln(a, inner.ln()),
            _ => inv_gamma_q_ln(a, ln_outer),
        };
        let magnitude = self.alpha * t.powf(a);
        let ln_deriv = ln_normal_pdf(h) - (self.ln_norm - t);
        MappedValue {
            value: magnitude.copysign(h),
            derivative: ln_deriv.exp(),
            regime,
        }
    }
}

/// Result of [`GenGaussParams::map_with_derivative`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MappedValue {
    pub value: f64,
    pub derivative: f64,
    pub regime: TailRegime,
}

/// The prior map `T(h) = B⁻¹ g(h)` from a standard normal vector to a
/// Besov-distributed signal.
#[derive(Clone, Debug)]
pub struct PriorTransform {
    gg: GenGaussParams,
    besov: BesovOperator,
}

impl PriorTransform {
    pub fn new(gg: GenGaussParams, besov: BesovOperator) -> Self {
        Self { gg, besov }
    }

    pub fn params(&self) -> &GenGaussParams {
        &self.gg
    }

    pub fn besov(&self) -> &BesovOperator {
        &self.besov
    }

    pub fn len(&self) -> usize {
        self.besov.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Componentwise `g(h)`.
    pub fn g(&self, h: &[f64]) -> Result<Vec<f64>> {
        self.check(h)?;
        Ok(h.iter().map(|&v| self.gg.g1d(v)).collect())
    }

    /// `T(h) = B⁻¹ g(h)`.
    pub fn apply(&self, h: &[f64]) -> Result<Vec<f64>> {
        let z = self.g(h)?;
        self.besov.apply_inverse(&z)
    }

    /// Diagonal of the Jacobian of `g`; `T'(h) = B⁻¹ diag(g'(h))`.
    pub fn jacobian_diag(&self, h: &[f64]) -> Result<Vec<f64>> {
        self.check(h)?;
        Ok(h.iter().map(|&v| self.gg.g1d_deriv(v)).collect())
    }

    /// `g(h)`, `g'(h)` and the most extreme regime touched.
    pub fn evaluate(&self, h: &[f64]) -> Result<(Vec<f64>, Vec<f64>, TailRegime)> {
        self.check(h)?;
        let mut values = Vec::with_capacity(h.len());
        let mut derivs = Vec::with_capacity(h.len());
        let mut worst = TailRegime::Central;
        for &v in h {
            let m = self.gg.map_with_derivative(v);
            values.push(m.value);
            derivs.push(m.derivative);
            worst = worst.max(m.regime);
        }
        Ok((values, derivs, worst))
    }

    fn check(&self, h: &[f64]) -> Result<()> {
        if h.len() != self.len() {
            return Err(Error::Dimension(format!(
                "prior transform expects {} values, got {}",
                self.len(),
                h.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::{BesovWeights, WaveletFamily, WaveletSystem};
    use std::f64::consts::{LN_2, PI, SQRT_2};

    #[test]
    fn parametrisations_agree() {
        for &(p, lambda) in &[(1.0, 1.0), (1.5, 0.025), (2.0, 1.0), (3.0, 4.0)] {
            let gg = GenGaussParams::new(p, lambda).unwrap();
            assert!((gg.tau() * gg.alpha().powf(p) - 1.0).abs() < 1e-13);
            assert!((gg.variance() - lambda.powf(-2.0 / p)).abs() < 1e-12 * gg.variance());
        }
        assert!(GenGaussParams::new(0.9, 1.0).is_err());
        assert!(GenGaussParams::new(1.5, 0.0).is_err());
    }

    #[test]
    fn log_pdf_reference_values() {
        let gauss = GenGaussParams::new(2.0, 1.0).unwrap();
        assert!((gauss.alpha() - SQRT_2).abs() < 1e-14);
        assert!((gauss.log_pdf(0.0) + 0.5 * (2.0 * PI).ln()).abs() < 1e-14);
        let laplace = GenGaussParams::new(1.0, 1.0).unwrap();
        assert!((laplace.alpha() - 1.0 / SQRT_2).abs() < 1e-14);
        assert!((laplace.log_pdf(0.0).exp() - SQRT_2 / 2.0).abs() < 1e-14);
        for x in [0.1, 0.7, 2.3] {
            assert_eq!(laplace.log_pdf(x), laplace.log_pdf(-x));
        }
    }

    #[test]
    fn pdf_integrates_to_one() {
        for &(p, lambda) in &[(1.0, 1.0), (1.5, 0.025), (3.0, 2.0)] {
            let gg = GenGaussParams::new(p, lambda).unwrap();
            let half = 40.0 * gg.alpha();
            let steps = 200_000;
            let dx = 2.0 * half / steps as f64;
            let total: f64 = (0..=steps)
                .map(|i| {
                    let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
                    w * gg.log_pdf(-half + i as f64 * dx).exp()
                })
                .sum::<f64>()
                * dx;
            assert!((total - 1.0).abs() < 1e-6, "p={p}: {total}");
        }
    }

    #[test]
    fn rate_matches_density_kernel() {
        let gg = GenGaussParams::new(1.5, 0.025).unwrap();
        let reference = gg.log_pdf(0.0);
        for i in 0..50 {
            let x = -10.0 + 0.4 * i as f64;
            let kernel = -gg.tau() * x.abs().powf(1.5);
            assert!(((gg.log_pdf(x) - kernel) - reference).abs() < 1e-12);
        }
    }

    #[test]
    fn cdf_and_quantile_reference_values() {
        for p in [1.0, 1.5, 2.0] {
            let gg = GenGaussParams::new(p, 1.0).unwrap();
            assert_eq!(gg.cdf(0.0), 0.5);
            assert_eq!(gg.quantile(0.5).unwrap(), 0.0);
        }
        let laplace = GenGaussParams::new(1.0, 1.0).unwrap();
        let expect = -(1.0 / SQRT_2) * (2.0 * (1.0 - 0.75_f64)).ln();
        assert!((laplace.quantile(0.75).unwrap() - expect).abs() < 1e-12);
        assert!((expect - LN_2 / SQRT_2).abs() < 1e-15);
        assert!(laplace.quantile(0.0).is_err());
        assert!(laplace.quantile(1.0).is_err());
    }

    #[test]
    fn quantile_inverts_cdf() {
        for p in [1.0, 1.3, 1.5, 2.0, 3.0] {
            let gg = GenGaussParams::new(p, 0.7).unwrap();
            // Positive arguments stop where 1 - cdf still carries enough
            // digits in double precision; the lower tail is exact.
            for i in 0..=38 {
                let x = gg.alpha() * (-8.0 + 0.25 * i as f64);
                if x == 0.0 {
                    continue;
                }
                let back = gg.quantile(gg.cdf(x)).unwrap();
                assert!((back - x).abs() < 1e-9 * x.abs(), "p={p} x={x} back={back}");
            }
        }
    }

    #[test]
    fn g_is_odd_and_increasing() {
        let gg = GenGaussParams::new(1.5, 0.025).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let h = -50.0 + 0.25 * i as f64;
            let v = gg.g1d(h);
            assert!(v > prev, "h = {h}");
            assert_eq!(v, -gg.g1d(-h));
            prev = v;
        }
    }

    #[test]
    fn regimes_are_reported() {
        let gg = GenGaussParams::new(1.5, 1.0).unwrap();
        assert_eq!(gg.map_with_derivative(1.0).regime, TailRegime::Central);
        assert_eq!(gg.map_with_derivative(-12.0).regime, TailRegime::LogTail);
        let far = gg.map_with_derivative(45.0);
        assert_eq!(far.regime, TailRegime::Asymptotic);
        assert!(far.value.is_finite() && far.derivative.is_finite() && far.derivative > 0.0);
    }

    #[test]
    fn transform_of_zero_is_zero() {
        let wavelet = WaveletSystem::for_signal(WaveletFamily::Daubechies(4), 16).unwrap();
        let besov = BesovOperator::new(wavelet, BesovWeights::new(1.2, 1.5, 1, 4).unwrap()).unwrap();
        let t = PriorTransform::new(GenGaussParams::new(1.5, 0.3).unwrap(), besov);
        assert!(t.apply(&[0.0; 16]).unwrap().iter().all(|&v| v == 0.0));
        assert!(t.apply(&[0.0; 8]).is_err());
    }
}
