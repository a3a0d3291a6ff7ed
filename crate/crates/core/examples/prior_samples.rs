// Draws from Besov priors with different smoothness and sparsity settings.

use besov_rto::prior::BesovPrior;
use besov_rto::wavelet::{WaveletFamily, WaveletSystem};
use besov_rto::Result;

pub fn run_example() -> Result<()> {
    let n = 256;
    for &(s, p) in &[(0.8, 1.0), (1.4, 1.5), (2.0, 2.0)] {
        let prior = BesovPrior::new(s, p, 1.0, WaveletSystem::for_signal(WaveletFamily::Daubechies(8), n)?)?;
        print!("s = {s}, p = {p}, κ = {:.3}:", prior.kappa());
        for seed in 0..3 {
            let f = prior.sample_prior(seed)?;
            let tv: f64 = f.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
            print!("  [‖f‖_B = {:.3}, TV = {tv:.2}]", prior.besov_norm(&f)?);
        }
        println!();
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
