// The generalized Gaussian distribution and the map `g` that pushes a
// standard normal onto it.

use besov_rto::gen_gaussian::GenGaussParams;
use besov_rto::Result;

pub fn run_example() -> Result<()> {
    for &(p, lambda) in &[(1.0, 1.0), (1.5, 0.025), (2.0, 1.0)] {
        let gg = GenGaussParams::new(p, lambda)?;
        println!(
            "p = {p}, λ = {lambda}: α = {:.5}, τ = {:.5}, variance = {:.4}",
            gg.alpha(),
            gg.tau(),
            gg.variance()
        );
        for q in [0.025, 0.5, 0.975] {
            println!("  quantile({q}) = {:+.5}", gg.quantile(q)?);
        }
        for h in [-8.0, -1.0, 0.5, 3.0, 40.0] {
            let m = gg.map_with_derivative(h);
            println!("  g({h:+}) = {:+.6e}, g' = {:.6e} ({:?})", m.value, m.derivative, m.regime);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
