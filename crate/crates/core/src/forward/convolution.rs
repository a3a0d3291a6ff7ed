use crate::error::{Error, Result};

use super::{check_len, LinearForward, OperatorDescriptor};

/// Circular convolution on the `n`-point periodic grid with a Gaussian
/// kernel truncated at `±3 σ_ker` and renormalized to unit sum.
#[derive(Clone, Debug, PartialEq)]
pub struct Convolution {
    n: usize,
    sigma_ker: f64,
    /// Weights for offsets `-r..=r`.
    kernel: Vec<f64>,
}

impl Convolution {
    pub fn new(n: usize, sigma_ker: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("convolution needs n >= 2, got {n}")));
        }
        if !(sigma_ker > 0.0) || 3.0 * sigma_ker >= 0.5 {
            return Err(Error::Parameter(format!(
                "kernel width must satisfy 0 < 3 sigma_ker < 1/2, got sigma_ker = {sigma_ker}"
            )));
        }
        let r = (3.0 * sigma_ker * n as f64 + 1e-9).floor() as isize;
        let mut kernel: Vec<f64> = (-r..=r)
            .map(|j| {
                let x = j as f64 / n as f64;
                (-0.5 * (x / sigma_ker).powi(2)).exp()
            })
            .collect();
        let total: f64 = kernel.iter().sum();
        for k in &mut kernel {
            *k /= total;
        }
        Ok(Self {
            n,
            sigma_ker,
            kernel,
        })
    }

    pub fn half_width(&self) -> usize {
        self.kernel.len() / 2
    }

    /// Kernel weights for offsets `-r..=r`.
    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    pub fn sigma_ker(&self) -> f64 {
        self.sigma_ker
    }
}

impl LinearForward for Convolution {
    fn shape(&self) -> (usize, usize) {
        (self.n, self.n)
    }

    fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len("convolution", self.n, f.len())?;
        let n = self.n as isize;
        let r = self.half_width() as isize;
        Ok((0..n)
            .map(|i| {
                self.kernel
                    .iter()
                    .enumerate()
                    .map(|(k, w)| w * f[(i - (k as isize - r)).rem_euclid(n) as usize])
                    .sum()
            })
            .collect())
    }

    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        // The kernel is symmetric.
        self.apply(y)
    }

    fn descriptor(&self) -> OperatorDescriptor {
        OperatorDescriptor::Convolution {
            n: self.n,
            sigma_ker: self.sigma_ker,
            half_width: self.half_width(),
            renormalized: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::testing::{assert_adjoint, pseudo_random};
    use super::*;

    #[test]
    fn reference_half_width() {
        let op = Convolution::new(512, 0.02).unwrap();
        assert_eq!(op.half_width(), 30);
        assert!((op.kernel().iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constants_are_preserved() {
        let op = Convolution::new(64, 0.05).unwrap();
        let out = op.apply(&[2.5; 64]).unwrap();
        assert!(out.iter().all(|v| (v - 2.5).abs() < 1e-14));
    }

    #[test]
    fn impulse_response_is_the_kernel() {
        let op = Convolution::new(32, 0.05).unwrap();
        let r = op.half_width();
        let mut e0 = vec![0.0; 32];
        e0[0] = 1.0;
        let out = op.apply(&e0).unwrap();
        for (k, w) in op.kernel().iter().enumerate() {
            let idx = (k as isize - r as isize).rem_euclid(32) as usize;
            assert_eq!(out[idx], *w);
        }
    }

    #[test]
    fn commutes_with_shift_and_is_self_adjoint() {
        let op = Convolution::new(64, 0.03).unwrap();
        let f = pseudo_random(4, 64);
        let mut shifted = f.clone();
        shifted.rotate_right(5);
        let mut a_then_shift = op.apply(&f).unwrap();
        a_then_shift.rotate_right(5);
        let shift_then_a = op.apply(&shifted).unwrap();
        for (a, b) in a_then_shift.iter().zip(&shift_then_a) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_adjoint(&op, 20, 1e-10);
    }

    #[test]
    fn wide_kernel_is_rejected() {
        assert!(Convolution::new(64, 0.2).is_err());
        assert!(Convolution::new(64, 0.0).is_err());
        assert!(Convolution::new(1, 0.01).is_err());
    }
}
