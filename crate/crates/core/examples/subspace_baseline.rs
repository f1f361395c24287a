//! Shift-invert subspace iteration with Rayleigh-Ritz steps at a = 4i.

use num_complex::Complex64;
use pencil_eig::eigensolvers::subspace_iteration;
use pencil_eig::{planted_pencil, PlantSpec, SubspaceConfig};

fn main() -> pencil_eig::Result<()> {
    let (pencil, _) = planted_pencil(&PlantSpec::power_system_like(1))?;
    let a = Complex64::new(0.0, 4.0);
    let cfg = SubspaceConfig::default();
    let t0 = std::time::Instant::now();
    let records = subspace_iteration(&pencil, a, &cfg)?;
    for r in records.iter().filter(|r| r.converged()) {
        println!(
            "{:>24.6}  after {:>3} applications  O(r) = 1e{}",
            r.lambda.finite().unwrap(),
            r.iterations,
            r.residual_order.unwrap_or(0)
        );
    }
    println!("block {}, {} converged in {:.2?}", cfg.block, records.iter().filter(|r| r.converged()).count(), t0.elapsed());
    Ok(())
}
