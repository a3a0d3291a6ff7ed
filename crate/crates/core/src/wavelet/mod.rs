//! Periodic orthonormal wavelet transforms on dyadic grids.
//!
//! Signals of length `2^J` (1D) or images of side `2^J` stored row-major
//! (2D) are decomposed all the way down to a single scaling coefficient
//! with circular boundary handling. The analysis matrix `W` is orthogonal,
//! so synthesis is its transpose.

mod besov;
mod filters;
mod layout;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use besov::{BesovOperator, BesovWeights};
pub use layout::{CoefficientIndex, CoefficientLayout, WaveletCoefficients};

/// Wavelet families with embedded filter tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum WaveletFamily {
    Haar,
    /// Daubechies wavelet identified by its number of vanishing moments
    /// (`db8` has 8 vanishing moments and 16 taps).
    Daubechies(usize),
}

impl WaveletFamily {
    pub fn filter_len(&self) -> usize {
        match self {
            WaveletFamily::Haar => 2,
            WaveletFamily::Daubechies(vm) => 2 * vm,
        }
    }
}

impl fmt::Display for WaveletFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WaveletFamily::Haar => write!(f, "haar"),
            WaveletFamily::Daubechies(vm) => write!(f, "db{vm}"),
        }
    }
}

impl FromStr for WaveletFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "haar" {
            return Ok(WaveletFamily::Haar);
        }
        let order = lower
            .strip_prefix("db")
            .and_then(|rest| rest.parse::<usize>().ok())
            .ok_or_else(|| Error::Parameter(format!("unknown wavelet '{s}'")))?;
        let family = if order == 1 {
            WaveletFamily::Haar
        } else {
            WaveletFamily::Daubechies(order)
        };
        filters::daubechies_lowpass(order)?;
        Ok(family)
    }
}

impl From<WaveletFamily> for String {
    fn from(w: WaveletFamily) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for WaveletFamily {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// A periodic orthonormal wavelet basis of fixed depth.
#[derive(Clone, Debug)]
pub struct WaveletSystem {
    family: WaveletFamily,
    layout: CoefficientLayout,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl WaveletSystem {
    /// `levels` is the decomposition depth `J_max`; the per-axis length is
    /// `2^levels`. Depth 0 is the trivial one-point basis.
    pub fn new(family: WaveletFamily, dim: usize, levels: usize) -> Result<Self> {
        let layout = CoefficientLayout::new(dim, levels)?;
        let order = match family {
            WaveletFamily::Haar => 1,
            WaveletFamily::Daubechies(vm) => vm,
        };
        let lowpass = filters::daubechies_lowpass(order)?;
        let highpass = filters::quadrature_mirror(&lowpass);
        Ok(Self {
            family,
            layout,
            lowpass,
            highpass,
        })
    }

    /// 1D system for signals of length `n` (a power of two).
    pub fn for_signal(family: WaveletFamily, n: usize) -> Result<Self> {
        Self::new(family, 1, dyadic_levels(n)?)
    }

    /// 2D system for square images of side `side` (a power of two).
    pub fn for_image(family: WaveletFamily, side: usize) -> Result<Self> {
        Self::new(family, 2, dyadic_levels(side)?)
    }

    pub fn family(&self) -> WaveletFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn levels(&self) -> usize {
        self.layout.levels()
    }

    pub fn layout(&self) -> CoefficientLayout {
        self.layout
    }

    /// Total number of samples / coefficients.
    pub fn len(&self) -> usize {
        self.layout.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Samples per axis.
    pub fn side(&self) -> usize {
        1 << self.levels()
    }

    pub fn forward_transform(&self, signal: &[f64]) -> Result<WaveletCoefficients> {
        let values = self.analyze(signal)?;
        WaveletCoefficients::new(values, self.layout)
    }

    pub fn inverse_transform(&self, coeffs: &WaveletCoefficients) -> Result<Vec<f64>> {
        if coeffs.layout() != self.layout {
            return Err(Error::Layout(format!(
                "coefficients have layout {:?}, transform expects {:?}",
                coeffs.layout(),
                self.layout
            )));
        }
        self.synthesize(coeffs.values())
    }

    /// `W f` in canonical ordering.
    pub fn analyze(&self, signal: &[f64]) -> Result<Vec<f64>> {
        self.check_len(signal.len())?;
        Ok(match self.dim() {
            1 => self.analyze_1d(signal),
            _ => self.analyze_2d(signal),
        })
    }

    /// `Wᵀ c` for a canonical coefficient vector.
    pub fn synthesize(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.check_len(coeffs.len())?;
        Ok(match self.dim() {
            1 => self.synthesize_1d(coeffs),
            _ => self.synthesize_2d(coeffs),
        })
    }

    /// Dense analysis matrix built column by column from unit vectors.
    /// Only intended for small systems (n <= 64).
    pub fn dense_matrix(&self) -> Result<Vec<Vec<f64>>> {
        let n = self.len();
        if n > 64 {
            return Err(Error::Parameter(format!(
                "dense wavelet matrix is limited to n <= 64, got {n}"
            )));
        }
        let mut rows = vec![vec![0.0; n]; n];
        let mut unit = vec![0.0; n];
        for col in 0..n {
            unit[col] = 1.0;
            let c = self.analyze(&unit)?;
            unit[col] = 0.0;
            for (row, v) in c.into_iter().enumerate() {
                rows[row][col] = v;
            }
        }
        Ok(rows)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::Dimension(format!(
                "wavelet system of {}D depth {} expects {} values, got {len}",
                self.dim(),
                self.levels(),
                self.len()
            )));
        }
        Ok(())
    }

    /// One periodic analysis step on `input` (even length).
    fn analysis_step(&self, input: &[f64], approx: &mut [f64], detail: &mut [f64]) {
        let mask = input.len() - 1;
        for i in 0..input.len() / 2 {
            let (mut a, mut d) = (0.0, 0.0);
            for (k, (&h, &g)) in self.lowpass.iter().zip(&self.highpass).enumerate() {
                let x = input[(2 * i + k) & mask];
                a += h * x;
                d += g * x;
            }
            approx[i] = a;
            detail[i] = d;
        }
    }

    /// Transpose of [`analysis_step`]; `out.len() == 2 * approx.len()`.
    fn synthesis_step(&self, approx: &[f64], detail: &[f64], out: &mut [f64]) {
        let mask = out.len() - 1;
        out.fill(0.0);
        for i in 0..approx.len() {
            let (a, d) = (approx[i], detail[i]);
            for (k, (&h, &g)) in self.lowpass.iter().zip(&self.highpass).enumerate() {
                out[(2 * i + k) & mask] += h * a + g * d;
            }
        }
    }

    fn analyze_1d(&self, signal: &[f64]) -> Vec<f64> {
        let n = signal.len();
        let mut out = vec![0.0; n];
        let mut work = signal.to_vec();
        let mut approx = vec![0.0; n / 2 + 1];
        let mut len = n;
        while len > 1 {
            let half = len / 2;
            self.analysis_step(&work[..len], &mut approx[..half], &mut out[half..len]);
            work[..half].copy_from_slice(&approx[..half]);
            len = half;
        }
        out[0] = work[0];
        out
    }

    fn synthesize_1d(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = coeffs.len();
        let mut work = vec![0.0; n];
        let mut next = vec![0.0; n];
        work[0] = coeffs[0];
        let mut len = 1;
        while len < n {
            self.synthesis_step(&work[..len], &coeffs[len..2 * len], &mut next[..2 * len]);
            work[..2 * len].copy_from_slice(&next[..2 * len]);
            len *= 2;
        }
        work
    }

    fn analyze_2d(&self, image: &[f64]) -> Vec<f64> {
        let side = self.side();
        let mut grid = image.to_vec();
        let mut line = vec![0.0; side];
        let mut approx = vec![0.0; side / 2 + 1];
        let mut detail = vec![0.0; side / 2 + 1];
        let mut size = side;
        while size > 1 {
            let half = size / 2;
            for r in 0..size {
                let row = &mut grid[r * side..r * side + size];
                line[..size].copy_from_slice(row);
                self.analysis_step(&line[..size], &mut approx[..half], &mut detail[..half]);
                row[..half].copy_from_slice(&approx[..half]);
                row[half..].copy_from_slice(&detail[..half]);
            }
            for c in 0..size {
                for r in 0..size {
                    line[r] = grid[r * side + c];
                }
                self.analysis_step(&line[..size], &mut approx[..half], &mut detail[..half]);
                for r in 0..half {
                    grid[r * side + c] = approx[r];
                    grid[(r + half) * side + c] = detail[r];
                }
            }
            size = half;
        }
        self.pack_mallat(&grid)
    }

    fn synthesize_2d(&self, coeffs: &[f64]) -> Vec<f64> {
        let side = self.side();
        let mut grid = self.unpack_mallat(coeffs);
        let mut line = vec![0.0; side];
        let mut approx = vec![0.0; side / 2 + 1];
        let mut detail = vec![0.0; side / 2 + 1];
        let mut size = 2;
        while size <= side {
            let half = size / 2;
            for c in 0..size {
                for r in 0..half {
                    approx[r] = grid[r * side + c];
                    detail[r] = grid[(r + half) * side + c];
                }
                self.synthesis_step(&approx[..half], &detail[..half], &mut line[..size]);
                for r in 0..size {
                    grid[r * side + c] = line[r];
                }
            }
            for r in 0..size {
                let row = &mut grid[r * side..r * side + size];
                approx[..half].copy_from_slice(&row[..half]);
                detail[..half].copy_from_slice(&row[half..]);
                self.synthesis_step(&approx[..half], &detail[..half], &mut line[..size]);
                row.copy_from_slice(&line[..size]);
            }
            size *= 2;
        }
        grid
    }

    /// Top-left corner offsets (row, col) of orientation `l` at a level
    /// whose bands have side `b` in the in-place Mallat grid.
    fn band_origin(orientation: usize, b: usize) -> (usize, usize) {
        match orientation {
            // high-pass along rows (vertical direction), low-pass along columns
            1 => (b, 0),
            2 => (0, b),
            _ => (b, b),
        }
    }

    fn pack_mallat(&self, grid: &[f64]) -> Vec<f64> {
        let side = self.side();
        let mut out = vec![0.0; grid.len()];
        out[0] = grid[0];
        for level in 0..self.levels() {
            let b = 1 << level;
            for orientation in 1..=3 {
                let (r0, c0) = Self::band_origin(orientation, b);
                let start = self.layout.band_range(level, orientation).start;
                for kr in 0..b {
                    for kc in 0..b {
                        out[start + kr * b + kc] = grid[(r0 + kr) * side + c0 + kc];
                    }
                }
            }
        }
        out
    }

    fn unpack_mallat(&self, coeffs: &[f64]) -> Vec<f64> {
        let side = self.side();
        let mut grid = vec![0.0; coeffs.len()];
        grid[0] = coeffs[0];
        for level in 0..self.levels() {
            let b = 1 << level;
            for orientation in 1..=3 {
                let (r0, c0) = Self::band_origin(orientation, b);
                let start = self.layout.band_range(level, orientation).start;
                for kr in 0..b {
                    for kc in 0..b {
                        grid[(r0 + kr) * side + c0 + kc] = coeffs[start + kr * b + kc];
                    }
                }
            }
        }
        grid
    }
}

/// `log2(n)` for a power of two `n >= 1`.
pub fn dyadic_levels(n: usize) -> Result<usize> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Dimension(format!("length {n} is not a power of two")));
    }
    Ok(n.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn lcg(seed: u64, n: usize) -> Vec<f64> {
        let mut s = seed;
        (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
            })
            .collect()
    }

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn haar_two_point_examples() {
        let w = WaveletSystem::for_signal(WaveletFamily::Haar, 2).unwrap();
        let c = w.analyze(&[1.0, 1.0]).unwrap();
        assert!((c[0] - SQRT_2).abs() < 1e-15 && c[1].abs() < 1e-15);
        let c = w.analyze(&[1.0, -1.0]).unwrap();
        assert!(c[0].abs() < 1e-15 && (c[1] - SQRT_2).abs() < 1e-15);
        let f = w.synthesize(&[SQRT_2, 0.0]).unwrap();
        assert!((f[0] - 1.0).abs() < 1e-15 && (f[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn haar_2x2_constant_image() {
        let w = WaveletSystem::for_image(WaveletFamily::Haar, 2).unwrap();
        let c = w.analyze(&[1.0; 4]).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-15);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-15));
        let f = w.synthesize(&c).unwrap();
        assert!(f.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn db8_preserves_energy_at_512() {
        let w = WaveletSystem::for_signal(WaveletFamily::Daubechies(8), 512).unwrap();
        let f = lcg(3, 512);
        let c = w.analyze(&f).unwrap();
        assert!((norm(&c) - norm(&f)).abs() < 1e-12);
    }

    #[test]
    fn round_trip_1d_and_2d() {
        for family in [WaveletFamily::Haar, WaveletFamily::Daubechies(8)] {
            for n in [8, 64] {
                let w = WaveletSystem::for_signal(family, n).unwrap();
                let f = lcg(n as u64, n);
                let back = w.inverse_transform(&w.forward_transform(&f).unwrap()).unwrap();
                for (a, b) in f.iter().zip(&back) {
                    assert!((a - b).abs() < 1e-10);
                }
            }
            for side in [2, 8, 16] {
                let w = WaveletSystem::for_image(family, side).unwrap();
                let f = lcg(side as u64 + 7, side * side);
                let back = w.synthesize(&w.analyze(&f).unwrap()).unwrap();
                for (a, b) in f.iter().zip(&back) {
                    assert!((a - b).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn separable_2d_bands_pick_up_edges() {
        // Horizontal stripes (vary along rows only) live in orientation 1.
        let side = 8;
        let w = WaveletSystem::for_image(WaveletFamily::Haar, side).unwrap();
        let image: Vec<f64> = (0..side * side)
            .map(|i| if (i / side) % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let c = w.forward_transform(&image).unwrap();
        let finest = w.levels() - 1;
        assert!(norm(c.band(finest, 1)) > 1.0);
        assert!(norm(c.band(finest, 2)) < 1e-12);
        assert!(norm(c.band(finest, 3)) < 1e-12);
    }

    #[test]
    fn rejects_non_dyadic_lengths() {
        let w = WaveletSystem::for_signal(WaveletFamily::Haar, 8).unwrap();
        assert!(matches!(w.analyze(&[0.0; 6]), Err(Error::Dimension(_))));
        assert!(WaveletSystem::for_signal(WaveletFamily::Haar, 12).is_err());
    }

    #[test]
    fn inverse_rejects_foreign_layout() {
        let w = WaveletSystem::for_signal(WaveletFamily::Haar, 16).unwrap();
        let other = CoefficientLayout::new(2, 2).unwrap();
        let c = WaveletCoefficients::new(vec![0.0; 16], other).unwrap();
        assert!(matches!(w.inverse_transform(&c), Err(Error::Layout(_))));
    }

    #[test]
    fn family_names_parse() {
        assert_eq!("haar".parse::<WaveletFamily>().unwrap(), WaveletFamily::Haar);
        assert_eq!("db1".parse::<WaveletFamily>().unwrap(), WaveletFamily::Haar);
        assert_eq!("DB8".parse::<WaveletFamily>().unwrap(), WaveletFamily::Daubechies(8));
        assert_eq!(WaveletFamily::Daubechies(8).to_string(), "db8");
        assert!("db5".parse::<WaveletFamily>().is_err());
        assert!("coif2".parse::<WaveletFamily>().is_err());
    }

    #[test]
    fn trivial_depth_is_identity() {
        let w = WaveletSystem::new(WaveletFamily::Haar, 1, 0).unwrap();
        assert_eq!(w.analyze(&[3.5]).unwrap(), vec![3.5]);
        assert_eq!(w.synthesize(&[3.5]).unwrap(), vec![3.5]);
    }
}
