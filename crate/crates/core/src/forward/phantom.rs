use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Piecewise test signal on `x_i = i / n`:
///
/// | interval        | value                                   |
/// |-----------------|-----------------------------------------|
/// | `[0, 0.125)`    | `0.05`                                  |
/// | `[0.125, 0.35)` | `0.4 + 0.3 sin²(π (x - 0.125) / 0.225)` |
/// | `[0.35, 0.6)`   | `0.2 + 0.6 exp(-((x - 0.45) / 0.05)²)`  |
/// | `[0.6, 0.7)`    | linear ramp from `0.2` to `0.9`         |
/// | `[0.7, 0.9)`    | `0.9`                                   |
/// | `[0.9, 1)`      | `0.05`                                  |
pub fn phantom_1d(n: usize) -> Result<Vec<f64>> {
    if !n.is_power_of_two() {
        return Err(Error::Parameter(format!("phantom length must be a power of two, got {n}")));
    }
    Ok((0..n).map(|i| phantom_1d_at(i as f64 / n as f64)).collect())
}

fn phantom_1d_at(x: f64) -> f64 {
    if x < 0.125 {
        0.05
    } else if x < 0.35 {
        0.4 + 0.3 * (PI * (x - 0.125) / 0.225).sin().powi(2)
    } else if x < 0.6 {
        0.2 + 0.6 * (-((x - 0.45) / 0.05).powi(2)).exp()
    } else if x < 0.7 {
        0.2 + 0.7 * (x - 0.6) / 0.1
    } else if x < 0.9 {
        0.9
    } else {
        0.05
    }
}

/// Modified Shepp-Logan ellipses: intensity, semi-axes `a`, `b`, center
/// `(x0, y0)`, rotation in degrees.
const SHEPP_LOGAN: [[f64; 6]; 10] = [
    [1.0, 0.69, 0.92, 0.0, 0.0, 0.0],
    [-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0],
    [-0.2, 0.11, 0.31, 0.22, 0.0, -18.0],
    [-0.2, 0.16, 0.41, -0.22, 0.0, 18.0],
    [0.1, 0.21, 0.25, 0.0, 0.35, 0.0],
    [0.1, 0.046, 0.046, 0.0, 0.1, 0.0],
    [0.1, 0.046, 0.046, 0.0, -0.1, 0.0],
    [0.1, 0.046, 0.023, -0.08, -0.605, 0.0],
    [0.1, 0.023, 0.023, 0.0, -0.606, 0.0],
    [0.1, 0.023, 0.046, 0.06, -0.605, 0.0],
];

/// Shepp-Logan head phantom rasterized on a `side × side` grid covering
/// `[-1, 1]²`, row-major with row 0 at `y = 1`, clamped to `[0, 1]`.
pub fn shepp_logan(side: usize) -> Result<Vec<f64>> {
    if side == 0 {
        return Err(Error::Parameter("phantom side must be positive".into()));
    }
    let h = 2.0 / side as f64;
    let mut img = vec![0.0; side * side];
    for r in 0..side {
        let y = 1.0 - (r as f64 + 0.5) * h;
        for c in 0..side {
            let x = -1.0 + (c as f64 + 0.5) * h;
            let mut v = 0.0;
            for &[amp, a, b, x0, y0, deg] in &SHEPP_LOGAN {
                let (sin, cos) = deg.to_radians().sin_cos();
                let (dx, dy) = (x - x0, y - y0);
                let xr = dx * cos + dy * sin;
                let yr = -dx * sin + dy * cos;
                if (xr / a).powi(2) + (yr / b).powi(2) <= 1.0 {
                    v += amp;
                }
            }
            img[r * side + c] = v.clamp(0.0, 1.0);
        }
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_has_range_jump_and_plateau() {
        let f = phantom_1d(512).unwrap();
        assert!(f.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(f.windows(2).any(|w| (w[1] - w[0]).abs() > 0.3));
        let plateau = &f[(0.72 * 512.0) as usize..(0.88 * 512.0) as usize];
        assert!(plateau.iter().all(|&v| v == 0.9));
        assert!(phantom_1d(100).is_err());
    }

    #[test]
    fn head_background_is_zero() {
        let side = 64;
        let img = shepp_logan(side).unwrap();
        let h = 2.0 / side as f64;
        for r in 0..side {
            for c in 0..side {
                let x = -1.0 + (c as f64 + 0.5) * h;
                let y = 1.0 - (r as f64 + 0.5) * h;
                if (x / 0.69).powi(2) + (y / 0.92).powi(2) > 1.0 {
                    assert_eq!(img[r * side + c], 0.0);
                }
            }
        }
        assert!(img.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn head_is_upright() {
        // The small bright ellipse sits at y = 0.35, above the centre.
        let img = shepp_logan(64).unwrap();
        let top = img[(64.0 * (1.0 - 0.35) / 2.0) as usize * 64 + 32];
        let bottom = img[(64.0 * (1.0 + 0.35) / 2.0) as usize * 64 + 32];
        assert!(top > bottom, "{top} vs {bottom}");
    }

    #[test]
    fn head_mean_regression() {
        let img = shepp_logan(64).unwrap();
        let mean = img.iter().sum::<f64>() / img.len() as f64;
        println!("shepp_logan(64) mean = {mean:.17}");
        assert!((mean - SHEPP_LOGAN_64_MEAN).abs() < 1e-12, "{mean}");
    }

    const SHEPP_LOGAN_64_MEAN: f64 = 0.125_195_312_499_997_44;
}
