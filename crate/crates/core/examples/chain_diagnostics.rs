// Autocorrelation and effective sample size on synthetic chains with known
// answers.

use besov_rto::diagnostics::{acf, ess, summarize, SampleSet};
use besov_rto::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn ar1(rho: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0;
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            x = rho * x + (1.0 - rho * rho).sqrt() * z;
            x
        })
        .collect()
}

pub fn run_example() -> Result<()> {
    let n = 20_000;
    for rho in [0.0, 0.5, 0.9] {
        let chain = ar1(rho, n, 1);
        let r = acf(&chain, 3)?;
        let e = ess(&[&chain])?;
        println!(
            "AR(1) ρ = {rho}: acf[1..4] = {:.3?}, ESS/N = {:.3} (theory {:.3})",
            &r[1..],
            e / n as f64,
            (1.0 - rho) / (1.0 + rho)
        );
    }

    let (a, b) = (ar1(0.0, n, 2), ar1(0.0, n, 3));
    let flat: Vec<f64> = a.iter().zip(&b).flat_map(|(x, y)| [*x, 2.0 * y + 1.0]).collect();
    let set = SampleSet::new(2, flat)?;
    let stats = summarize(&set, 0.9, None, None)?;
    println!(
        "N(0, 1) and N(1, 4): 90% intervals [{:.3}, {:.3}] and [{:.3}, {:.3}] (theory ±1.645 and 1 ± 3.290)",
        stats.ci_lower[0], stats.ci_upper[0], stats.ci_lower[1], stats.ci_upper[1]
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
