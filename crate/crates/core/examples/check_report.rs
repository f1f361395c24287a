//! Solve, then re-verify every reported eigenvalue independently of the solver.

use num_complex::Complex64;
use pencil_eig::cli::check_report;
use pencil_eig::eigensolvers::algorithm_one;
use pencil_eig::{planted_pencil, Algorithm, IterationConfig, PlantSpec, SpectrumReport};

fn main() -> pencil_eig::Result<()> {
    let sigma = Complex64::new(4.8334, 0.0);
    let (pencil, spectrum) = planted_pencil(&PlantSpec::power_system_like(2))?;
    let cfg = IterationConfig { p: 40, ..Default::default() };
    let report = SpectrumReport::new(Algorithm::One, sigma, algorithm_one(&pencil, sigma, &cfg, None)?);
    for row in check_report(&pencil, &report, Some(&spectrum))? {
        println!(
            "{} {:.6}  O(r) = 1e{}  nearest {:.1e}",
            if row.pass { "PASS" } else { "FAIL" },
            row.lambda,
            row.residual_order,
            row.nearest_error.unwrap_or(f64::NAN)
        );
    }
    print!("{}", report.to_csv()?);
    Ok(())
}
