//! Möbius deflation: every trajectory after the first iterates
//! `(C^{-1} - ξI)(C^{-1} - μI)^{-1}` with ξ the last eigenvalue found, so it
//! cannot settle on ξ again.

use num_complex::Complex64;
use pencil_eig::eigensolvers::{algorithm_two, recover_lambda};
use pencil_eig::{planted_pencil, IterationConfig, PlantSpec};

fn main() -> pencil_eig::Result<()> {
    let sigma = Complex64::new(4.8334, 0.0);
    let (pencil, _) = planted_pencil(&PlantSpec::power_system_like(1))?;
    let cfg = IterationConfig { p: 40, ..Default::default() };
    for r in algorithm_two(&pencil, sigma, &cfg, None)? {
        let xi = r
            .xi
            .and_then(|x| recover_lambda(x, sigma).finite())
            .map(|z| format!("{z:.4}"))
            .unwrap_or("-".into());
        let lam = r.lambda.finite().map(|z| format!("{z:.4}")).unwrap_or("inf".into());
        println!("shift {}: ξ ~ {xi:>22}  ->  {lam:>22}  {:?} after {} iterations", r.shift_index, r.status, r.iterations);
    }
    Ok(())
}
