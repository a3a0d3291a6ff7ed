use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::{check_len, LinearForward, OperatorDescriptor};

/// Parallel-beam Radon transform of a `side × side` image on `[-1, 1]²`.
///
/// Pixel `(r, c)` (row-major, row 0 at the top) has its center at
/// `x = -1 + (c + ½) h`, `y = 1 - (r + ½) h` with `h = 2 / side`. Angles are
/// `θ_i = i π / n_angles` and detector offsets `η_k` are uniform on `[-1, 1]`.
/// The ray `L(θ, η)` is the set of points `(t sin θ + η cos θ, -t cos θ + η sin θ)`.
/// Line integrals use midpoint sampling with step `h / 2` and bilinear
/// interpolation, with zero outside the image. Sinogram entries are ordered
/// angle-major: index `i * n_detectors + k`.
///
/// The operator is stored as a sparse matrix, so the adjoint is its exact
/// transpose.
#[derive(Clone, Debug)]
pub struct Radon {
    side: usize,
    n_angles: usize,
    n_detectors: usize,
    step: f64,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Radon {
    pub fn new(side: usize, n_angles: usize, n_detectors: usize) -> Result<Self> {
        if side == 0 || n_angles == 0 || n_detectors == 0 {
            return Err(Error::Parameter(format!(
                "radon needs positive sizes, got side={side}, angles={n_angles}, detectors={n_detectors}"
            )));
        }
        let h = 2.0 / side as f64;
        let step = 0.5 * h;
        // Whole number of steps, so sample cells align with pixel centers.
        let half_steps = ((SQRT_2 + h) / step).ceil() as usize;
        let reach = half_steps as f64 * step;
        let n_steps = 2 * half_steps;
        let n_pixels = side * side;

        let rays: Vec<(f64, f64)> = (0..n_angles)
            .flat_map(|i| {
                let theta = i as f64 * PI / n_angles as f64;
                (0..n_detectors).map(move |k| (theta, detector_offset(k, n_detectors)))
            })
            .collect();

        let rows: Vec<Vec<(u32, f64)>> = rays
            .par_iter()
            .map_init(
                || (vec![0.0; n_pixels], Vec::new()),
                |(scratch, touched), &(theta, eta)| {
                    let (sin, cos) = theta.sin_cos();
                    for s in 0..n_steps {
                        let t = -reach + (s as f64 + 0.5) * step;
                        let x = t * sin + eta * cos;
                        let y = -t * cos + eta * sin;
                        let fc = (x + 1.0) / h - 0.5;
                        let fr = (1.0 - y) / h - 0.5;
                        let c0 = fc.floor();
                        let r0 = fr.floor();
                        let wc = fc - c0;
                        let wr = fr - r0;
                        for (dr, wy) in [(0, 1.0 - wr), (1, wr)] {
                            let r = r0 as isize + dr;
                            if r < 0 || r >= side as isize {
                                continue;
                            }
                            for (dc, wx) in [(0, 1.0 - wc), (1, wc)] {
                                let c = c0 as isize + dc;
                                if c < 0 || c >= side as isize {
                                    continue;
                                }
                                let w = wy * wx * step;
                                if w == 0.0 {
                                    continue;
                                }
                                let idx = r as usize * side + c as usize;
                                if scratch[idx] == 0.0 {
                                    touched.push(idx);
                                }
                                scratch[idx] += w;
                            }
                        }
                    }
                    touched.sort_unstable();
                    let row = touched
                        .drain(..)
                        .map(|idx| (idx as u32, std::mem::take(&mut scratch[idx])))
                        .collect();
                    row
                },
            )
            .collect();

        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0);
        let nnz: usize = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Ok(Self {
            side,
            n_angles,
            n_detectors,
            step,
            row_ptr,
            cols,
            vals,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn n_angles(&self) -> usize {
        self.n_angles
    }

    pub fn n_detectors(&self) -> usize {
        self.n_detectors
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n_angles)
            .map(|i| i as f64 * PI / self.n_angles as f64)
            .collect()
    }

    pub fn detectors(&self) -> Vec<f64> {
        (0..self.n_detectors)
            .map(|k| detector_offset(k, self.n_detectors))
            .collect()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .zip(&self.vals[span])
            .map(|(&c, &v)| (c as usize, v))
    }
}

fn detector_offset(k: usize, n_detectors: usize) -> f64 {
    if n_detectors == 1 {
        0.0
    } else {
        -1.0 + 2.0 * k as f64 / (n_detectors - 1) as f64
    }
}

impl LinearForward for Radon {
    fn shape(&self) -> (usize, usize) {
        (self.n_angles * self.n_detectors, self.side * self.side)
    }

    fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len("radon", self.side * self.side, f.len())?;
        let m = self.n_angles * self.n_detectors;
        Ok((0..m)
            .into_par_iter()
            .map(|i| self.row(i).map(|(c, v)| v * f[c]).sum())
            .collect())
    }

    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        let m = self.n_angles * self.n_detectors;
        check_len("radon adjoint", m, y.len())?;
        let mut out = vec![0.0; self.side * self.side];
        for (i, &yi) in y.iter().enumerate() {
            for (c, v) in self.row(i) {
                out[c] += v * yi;
            }
        }
        Ok(out)
    }

    fn descriptor(&self) -> OperatorDescriptor {
        OperatorDescriptor::Radon {
            side: self.side,
            n_angles: self.n_angles,
            n_detectors: self.n_detectors,
            step: self.step,
        }
    }

    fn to_dense(&self) -> Result<Vec<f64>> {
        let (m, n) = self.shape();
        let mut dense = vec![0.0; m * n];
        for i in 0..m {
            for (c, v) in self.row(i) {
                dense[i * n + c] += v;
            }
        }
        Ok(dense)
    }
}

#[cfg(test)]
mod tests {
    use super::super::testing::{assert_adjoint, pseudo_random};
    use super::*;

    fn disk(side: usize) -> Vec<f64> {
        let h = 2.0 / side as f64;
        let mut img = vec![0.0; side * side];
        for r in 0..side {
            for c in 0..side {
                let x = -1.0 + (c as f64 + 0.5) * h;
                let y = 1.0 - (r as f64 + 0.5) * h;
                if x * x + y * y <= 1.0 {
                    img[r * side + c] = 1.0;
                }
            }
        }
        img
    }

    #[test]
    fn zero_image_gives_zero_sinogram() {
        let op = Radon::new(16, 6, 11).unwrap();
        assert!(op.apply(&[0.0; 256]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn central_chord_through_unit_disk() {
        let op = Radon::new(64, 1, 3).unwrap();
        let sino = op.apply(&disk(64)).unwrap();
        // θ = 0, η = 0 is the middle detector.
        assert!((sino[1] - 2.0).abs() < 0.06, "got {}", sino[1]);
    }

    #[test]
    fn constant_square_central_ray() {
        let op = Radon::new(32, 4, 5).unwrap();
        let sino = op.apply(&[1.0; 1024]).unwrap();
        // θ = 0 and θ = π/2 central rays cross the square along a side.
        assert!((sino[2] - 2.0).abs() < 1e-12, "got {}", sino[2]);
        assert!((sino[2 * 5 + 2] - 2.0).abs() < 1e-12, "got {}", sino[12]);
    }

    #[test]
    fn point_mass_is_preserved_across_angles() {
        let side = 16;
        let op = Radon::new(side, 12, 41).unwrap();
        let dense = op.to_dense().unwrap();
        let n = side * side;
        let pixel = 5 * side + 9;
        let sums: Vec<f64> = (0..12)
            .map(|a| (0..41).map(|k| dense[(a * 41 + k) * n + pixel]).sum())
            .collect();
        let first = sums[0];
        for s in &sums {
            assert!((s - first).abs() < 0.02 * first, "{sums:?}");
        }
    }

    #[test]
    fn adjoint_and_dense_agree() {
        let op = Radon::new(12, 7, 9).unwrap();
        assert_adjoint(&op, 20, 1e-10);
        let dense = op.to_dense().unwrap();
        let f = pseudo_random(3, 144);
        let direct = op.apply(&f).unwrap();
        for (i, d) in direct.iter().enumerate() {
            let via: f64 = dense[i * 144..(i + 1) * 144].iter().zip(&f).map(|(a, b)| a * b).sum();
            assert!((via - d).abs() < 1e-12);
        }
    }

    #[test]
    fn nonnegative_images_give_nonnegative_sinograms() {
        let op = Radon::new(16, 5, 13).unwrap();
        let f: Vec<f64> = pseudo_random(8, 256).iter().map(|v| v.abs()).collect();
        assert!(op.apply(&f).unwrap().iter().all(|&v| v >= 0.0));
    }
}
