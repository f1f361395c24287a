//! Scalar Möbius and Cayley maps: where eigenvalues land in the μ-plane.

use num_complex::Complex64;
use pencil_eig::mobius::{cayley_map, optimal_sigma};
use pencil_eig::synth::reference_unstable;
use pencil_eig::{Extended, MobiusParams};

fn main() -> pencil_eig::Result<()> {
    let c = |re, im| Complex64::new(re, im);
    let sigma = c(4.8334, 0.0);

    // right half-plane goes outside the unit circle, left half-plane inside
    for lam in reference_unstable().into_iter().chain([c(-0.0925, 3.9827), c(-120.0, 0.0), c(0.0, 2.0)]) {
        let mu = cayley_map(sigma, lam).finite().unwrap();
        println!("λ = {:>18}  ->  μ = {:>22}  |μ| = {:.6}", show(lam, 4), show(mu, 6), mu.norm());
    }

    let p = MobiusParams::new(c(2.0, 0.0), c(1.0, 1.0), c(3.0, 0.0))?;
    let s = c(0.3, -2.0);
    let mu = p.map(s.into());
    println!("\ngeneral map: {s} -> {mu:?} -> {:?}", p.inverse_map(mu));
    println!("pole: {:?}, infinity: {:?}", p.map(p.alpha().into()), p.map(Extended::Infinity));

    let lam = reference_unstable()[0];
    println!("\nbest real σ for {lam}: {:.5}", optimal_sigma(lam)?);
    Ok(())
}

fn show(z: Complex64, digits: usize) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{:.*}{sign}{:.*}i", digits, z.re, digits, z.im.abs())
}
