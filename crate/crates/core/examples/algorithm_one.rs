//! Preconditioned shift-invert search with shift updates on the planted
//! pencil. Pass `--p 0` to skip preconditioning.

use num_complex::Complex64;
use pencil_eig::eigensolvers::{algorithm_one, distinct_eigenvalues};
use pencil_eig::{planted_pencil, IterationConfig, PlantSpec};

fn main() -> pencil_eig::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let p = args
        .iter()
        .position(|a| a == "--p")
        .and_then(|i| args.get(i + 1))
        .map(|s| s.parse().expect("--p takes an integer"))
        .unwrap_or(40);

    let (pencil, _) = planted_pencil(&PlantSpec::power_system_like(1))?;
    let cfg = IterationConfig { p, ..Default::default() };
    let records = algorithm_one(&pencil, Complex64::new(4.8334, 0.0), &cfg, None)?;

    println!("{:>6} {:>26} {:>9} {:>6}  status", "shift", "λ", "iter(LU)", "O(r)");
    for r in &records {
        let lam = r.lambda.finite().map(|z| format!("{z:.4}")).unwrap_or("inf".into());
        let order = r.residual_order.map(|o| format!("1e{o}")).unwrap_or_default();
        println!(
            "{:>6} {lam:>26} {:>9} {order:>6}  {:?}",
            r.shift_index,
            format!("{}({})", r.iterations, r.lu_count),
            r.status
        );
    }
    let found = distinct_eigenvalues(&records, &cfg);
    println!("p = {p}: {} distinct eigenvalues, unstable: {:?}", found.len(),
        found.iter().filter(|z| z.re > 0.0).collect::<Vec<_>>());
    Ok(())
}
