// Periodic wavelet transforms, the canonical coefficient layout and Besov
// weights.

use besov_rto::wavelet::{BesovOperator, BesovWeights, WaveletFamily, WaveletSystem};
use besov_rto::Result;

pub fn run_example() -> Result<()> {
    let n = 64;
    let signal: Vec<f64> = (0..n).map(|i| if i < n / 3 { 1.0 } else { (i as f64 / 7.0).sin() }).collect();

    for family in [WaveletFamily::Haar, WaveletFamily::Daubechies(8)] {
        let w = WaveletSystem::for_signal(family, n)?;
        let coeffs = w.analyze(&signal)?;
        let back = w.synthesize(&coeffs)?;
        let err = back.iter().zip(&signal).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let energy = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        println!(
            "{family}: {} levels, reconstruction error {err:.2e}, energy {:.6} vs {:.6}",
            w.levels(),
            energy(&coeffs),
            energy(&signal)
        );
        let layout = w.layout();
        for j in 0..w.levels() {
            let band = &coeffs[layout.level_range(j)];
            let peak = band.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            println!("  level {j}: {:>3} coefficients, max |w| = {peak:.4}", band.len());
        }
    }

    // B = S W with S = diag(2^{jκ}); κ = s + d/2 - d/p.
    let weights = BesovWeights::new(1.0, 2.0, 1, 3)?;
    println!("weights (s=1, p=2, d=1, J=3): {:?}", weights.diagonal());

    let w2 = WaveletSystem::for_image(WaveletFamily::Haar, 8)?;
    let besov = BesovOperator::new(w2, BesovWeights::new(1.5, 1.5, 2, 3)?)?;
    let image: Vec<f64> = (0..64).map(|k| ((k / 8) as f64 - 3.5).abs()).collect();
    let bf = besov.apply(&image)?;
    let round_trip = besov.apply_inverse(&bf)?;
    let err = round_trip.iter().zip(&image).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("2D Besov operator round trip error {err:.2e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
