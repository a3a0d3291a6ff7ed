//! Linear forward operators `A`, ground-truth phantoms and the additive
//! Gaussian noise model.

mod convolution;
mod inpainting;
mod noise;
mod phantom;
mod radon;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use convolution::Convolution;
pub use inpainting::Inpainting;
pub use noise::{make_data, make_data_with, nested_white_noise, NoiseModel, SyntheticData};
pub use phantom::{phantom_1d, shepp_logan};
pub use radon::Radon;

/// Kind and parameters of a forward operator, as recorded in run manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorDescriptor {
    Inpainting {
        n: usize,
        m: usize,
        removed_intervals: Vec<[f64; 2]>,
    },
    Convolution {
        n: usize,
        sigma_ker: f64,
        half_width: usize,
        renormalized: bool,
    },
    Radon {
        side: usize,
        n_angles: usize,
        n_detectors: usize,
        step: f64,
    },
    Matrix {
        m: usize,
        n: usize,
    },
}

/// A linear map `A: R^n -> R^m` with its adjoint.
pub trait LinearForward: Send + Sync + fmt::Debug {
    /// `(m, n)`.
    fn shape(&self) -> (usize, usize);

    fn apply(&self, f: &[f64]) -> Result<Vec<f64>>;

    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>>;

    fn descriptor(&self) -> OperatorDescriptor;

    /// Row-major dense matrix, assembled from unit vectors unless the
    /// operator knows better.
    fn to_dense(&self) -> Result<Vec<f64>> {
        let (m, n) = self.shape();
        let mut dense = vec![0.0; m * n];
        let mut unit = vec![0.0; n];
        for col in 0..n {
            unit[col] = 1.0;
            let column = self.apply(&unit)?;
            unit[col] = 0.0;
            for (row, v) in column.into_iter().enumerate() {
                dense[row * n + col] = v;
            }
        }
        Ok(dense)
    }
}

pub(crate) fn check_len(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension(format!("{what} expects {expected} values, got {got}")));
    }
    Ok(())
}

/// An explicit row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixOperator {
    m: usize,
    n: usize,
    data: Vec<f64>,
}

impl MatrixOperator {
    pub fn new(m: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != m * n || m == 0 || n == 0 {
            return Err(Error::Dimension(format!(
                "{m}x{n} matrix needs {} entries, got {}",
                m * n,
                data.len()
            )));
        }
        Ok(Self { m, n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { m: n, n, data }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

impl LinearForward for MatrixOperator {
    fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len("matrix operator", self.n, f.len())?;
        Ok(self
            .data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(f).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("matrix adjoint", self.m, y.len())?;
        let mut out = vec![0.0; self.n];
        for (row, &yi) in self.data.chunks_exact(self.n).zip(y) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * yi;
            }
        }
        Ok(out)
    }

    fn descriptor(&self) -> OperatorDescriptor {
        OperatorDescriptor::Matrix {
            m: self.m,
            n: self.n,
        }
    }

    fn to_dense(&self) -> Result<Vec<f64>> {
        Ok(self.data.clone())
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::LinearForward;

    pub fn pseudo_random(seed: u64, n: usize) -> Vec<f64> {
        let mut s = seed.wrapping_add(0x9E3779B97F4A7C15);
        (0..n)
            .map(|_| {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect()
    }

    pub fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    /// Dot-product test `<A f, g> = <f, Aᵀ g>` on `pairs` random pairs.
    pub fn assert_adjoint(op: &dyn LinearForward, pairs: u64, tol: f64) {
        let (m, n) = op.shape();
        for k in 0..pairs {
            let f = pseudo_random(2 * k + 1, n);
            let g = pseudo_random(2 * k + 2, m);
            let lhs = dot(&op.apply(&f).unwrap(), &g);
            let rhs = dot(&f, &op.adjoint(&g).unwrap());
            let scale = lhs.abs().max(rhs.abs()).max(1e-300);
            assert!((lhs - rhs).abs() <= tol * scale, "pair {k}: {lhs} vs {rhs}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;

    #[test]
    fn matrix_operator_adjoint() {
        let op = MatrixOperator::new(3, 4, pseudo_random(9, 12)).unwrap();
        assert_adjoint(&op, 20, 1e-12);
        assert_eq!(op.to_dense().unwrap(), op.data());
    }

    #[test]
    fn matrix_shape_is_checked() {
        assert!(MatrixOperator::new(2, 2, vec![1.0; 3]).is_err());
        let op = MatrixOperator::identity(2);
        assert!(op.apply(&[1.0]).is_err());
    }
}
