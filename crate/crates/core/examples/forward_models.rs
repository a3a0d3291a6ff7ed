// The three forward operators, the phantoms and the noise model.

use besov_rto::forward::{make_data, phantom_1d, shepp_logan, Convolution, Inpainting, LinearForward, Radon};
use besov_rto::Result;

fn describe(name: &str, op: &dyn LinearForward, f: &[f64]) -> Result<()> {
    let (m, n) = op.shape();
    let data = make_data(op, f, 0.02, 1)?;
    println!(
        "{name}: {m} x {n}, σ = {:.3e}, realized noise level {:.4}",
        data.noise.sigma, data.realized_level
    );
    Ok(())
}

pub fn run_example() -> Result<()> {
    let f = phantom_1d(512)?;
    let inpaint = Inpainting::new(512, &[[0.1, 0.15], [0.425, 0.475]])?;
    describe("inpainting", &inpaint, &f)?;

    let blur = Convolution::new(512, 0.02)?;
    println!("convolution kernel half width {}", blur.half_width());
    describe("convolution", &blur, &f)?;

    let side = 32;
    let image = shepp_logan(side)?;
    let radon = Radon::new(side, 15, 45)?;
    describe("radon", &radon, &image)?;
    let sino = radon.apply(&image)?;
    let peak = sino.iter().fold(0.0f64, |a, v| a.max(*v));
    println!("sinogram peak {peak:.4} over {} angles", radon.n_angles());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
