use crate::error::{Error, Result};

use super::{check_len, LinearForward, OperatorDescriptor};

/// Restriction of a signal on the grid `x_i = i / n` to the points outside
/// a set of removed half-open intervals `[a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inpainting {
    n: usize,
    intervals: Vec<[f64; 2]>,
    kept: Vec<usize>,
}

impl Inpainting {
    pub fn new(n: usize, removed: &[[f64; 2]]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("inpainting needs n > 0".into()));
        }
        for &[a, b] in removed {
            if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b && b <= 1.0) {
                return Err(Error::Parameter(format!("invalid removed interval [{a}, {b})")));
            }
        }
        let mut sorted = removed.to_vec();
        sorted.sort_by(|x, y| x[0].total_cmp(&y[0]));
        if let Some(w) = sorted.windows(2).find(|w| w[1][0] < w[0][1]) {
            return Err(Error::Parameter(format!(
                "removed intervals [{}, {}) and [{}, {}) overlap",
                w[0][0], w[0][1], w[1][0], w[1][1]
            )));
        }
        let kept: Vec<usize> = (0..n)
            .filter(|&i| {
                let x = i as f64 / n as f64;
                !removed.iter().any(|&[a, b]| a <= x && x < b)
            })
            .collect();
        if kept.is_empty() {
            return Err(Error::Parameter("removed intervals cover every grid point".into()));
        }
        Ok(Self {
            n,
            intervals: removed.to_vec(),
            kept,
        })
    }

    /// Indices of the observed grid points, in increasing order.
    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn removed_intervals(&self) -> &[[f64; 2]] {
        &self.intervals
    }
}

impl LinearForward for Inpainting {
    fn shape(&self) -> (usize, usize) {
        (self.kept.len(), self.n)
    }

    fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len("inpainting", self.n, f.len())?;
        Ok(self.kept.iter().map(|&i| f[i]).collect())
    }

    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("inpainting adjoint", self.kept.len(), y.len())?;
        let mut out = vec![0.0; self.n];
        for (&i, &v) in self.kept.iter().zip(y) {
            out[i] = v;
        }
        Ok(out)
    }

    fn descriptor(&self) -> OperatorDescriptor {
        OperatorDescriptor::Inpainting {
            n: self.n,
            m: self.kept.len(),
            removed_intervals: self.intervals.clone(),
        }
    }
}
