use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a flat coefficient index lives in the multiresolution pyramid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientIndex {
    /// The single scaling coefficient at index 0.
    Scaling,
    /// A wavelet coefficient at `level` (0 = coarsest), `orientation`
    /// (1-based; always 1 in 1D) and raster `position` inside the band.
    Detail {
        level: usize,
        orientation: usize,
        position: usize,
    },
}

/// Canonical ordering of a fully decomposed periodic wavelet transform.
///
/// Index 0 holds the scaling coefficient. Level `j` occupies
/// `2^{jd} .. 2^{(j+1)d}`; in 2D that range is split into three equal
/// bands ordered horizontal, vertical, diagonal, each raster ordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientLayout {
    dim: usize,
    levels: usize,
}

impl CoefficientLayout {
    pub fn new(dim: usize, levels: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Parameter(format!("dimension must be 1 or 2, got {dim}")));
        }
        if levels * dim >= usize::BITS as usize - 1 {
            return Err(Error::Parameter(format!("{levels} levels is too deep")));
        }
        Ok(Self { dim, levels })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Total number of coefficients, `2^{levels * dim}`.
    pub fn len(&self) -> usize {
        1 << (self.levels * self.dim)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of orientations per level, `2^d - 1`.
    pub fn orientations(&self) -> usize {
        (1 << self.dim) - 1
    }

    pub fn level_range(&self, level: usize) -> Range<usize> {
        assert!(level < self.levels, "level {level} out of range");
        (1 << (level * self.dim))..(1 << ((level + 1) * self.dim))
    }

    /// Number of translates per orientation at `level`, `2^{jd}`.
    pub fn band_len(&self, level: usize) -> usize {
        1 << (level * self.dim)
    }

    pub fn band_range(&self, level: usize, orientation: usize) -> Range<usize> {
        assert!(
            (1..=self.orientations()).contains(&orientation),
            "orientation {orientation} out of range"
        );
        let start = self.level_range(level).start + (orientation - 1) * self.band_len(level);
        start..start + self.band_len(level)
    }

    pub fn locate(&self, index: usize) -> Result<CoefficientIndex> {
        if index >= self.len() {
            return Err(Error::Layout(format!(
                "index {index} outside layout of length {}",
                self.len()
            )));
        }
        if index == 0 {
            return Ok(CoefficientIndex::Scaling);
        }
        let level = (usize::BITS - 1 - index.leading_zeros()) as usize / self.dim;
        let offset = index - (1 << (level * self.dim));
        let band = self.band_len(level);
        Ok(CoefficientIndex::Detail {
            level,
            orientation: offset / band + 1,
            position: offset % band,
        })
    }

    /// Level of every flat index; the scaling coefficient reports `None`.
    pub fn levels_by_index(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.len()];
        for level in 0..self.levels {
            for slot in &mut out[self.level_range(level)] {
                *slot = Some(level);
            }
        }
        out
    }
}

/// A coefficient vector together with its layout.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletCoefficients {
    values: Vec<f64>,
    layout: CoefficientLayout,
}

impl WaveletCoefficients {
    pub fn new(values: Vec<f64>, layout: CoefficientLayout) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::Layout(format!(
                "{} values do not fit a layout of length {}",
                values.len(),
                layout.len()
            )));
        }
        Ok(Self { values, layout })
    }

    pub fn layout(&self) -> CoefficientLayout {
        self.layout
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaling(&self) -> f64 {
        self.values[0]
    }

    pub fn level(&self, level: usize) -> &[f64] {
        &self.values[self.layout.level_range(level)]
    }

    pub fn band(&self, level: usize, orientation: usize) -> &[f64] {
        &self.values[self.layout.band_range(level, orientation)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_counts_match_pyramid() {
        for dim in [1, 2] {
            let layout = CoefficientLayout::new(dim, 4).unwrap();
            let mut cumulative = 1;
            for j in 0..4 {
                let r = layout.level_range(j);
                assert_eq!(r.len(), ((1 << dim) - 1) * (1 << (j * dim)));
                cumulative += r.len();
                assert_eq!(cumulative, 1 << ((j + 1) * dim));
            }
            assert_eq!(cumulative, layout.len());
        }
    }

    #[test]
    fn locate_round_trips_band_ranges() {
        let layout = CoefficientLayout::new(2, 3).unwrap();
        assert_eq!(layout.locate(0).unwrap(), CoefficientIndex::Scaling);
        for j in 0..3 {
            for l in 1..=3 {
                for (k, idx) in layout.band_range(j, l).enumerate() {
                    assert_eq!(
                        layout.locate(idx).unwrap(),
                        CoefficientIndex::Detail { level: j, orientation: l, position: k }
                    );
                }
            }
        }
        assert!(layout.locate(64).is_err());
    }

    #[test]
    fn wrong_length_is_a_layout_error() {
        let layout = CoefficientLayout::new(1, 3).unwrap();
        assert!(matches!(
            WaveletCoefficients::new(vec![0.0; 7], layout),
            Err(Error::Layout(_))
        ));
    }
}
