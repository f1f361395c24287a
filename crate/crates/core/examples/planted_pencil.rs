//! Generate a 60 + 40 pencil with a planted spectrum and confirm it against the
//! dense reduction `D^{-1}(J1 - J2 J4^{-1} J3)`.

use pencil_eig::dense_eig::{eigen, spectral_distance};
use pencil_eig::{planted_pencil, PlantSpec};

fn main() -> pencil_eig::Result<()> {
    let spec = PlantSpec::power_system_like(1);
    let (pencil, spectrum) = planted_pencil(&spec)?;
    println!(
        "order {} ({} states, {} algebraic), {} nonzeros",
        pencil.order(),
        pencil.n_states(),
        pencil.n_algebraic(),
        pencil.jacobian().nnz()
    );
    let mut unstable: Vec<_> = spectrum.iter().filter(|z| z.re > 0.0).collect();
    unstable.sort_by(|a, b| b.re.total_cmp(&a.re));
    println!("unstable: {unstable:?}");

    let dense = eigen(&pencil.dense_state_matrix()?, false)?;
    let d = spectral_distance(&dense.values, &spectrum).expect("same count");
    println!("dense oracle agrees to {d:.1e} (relative)");
    Ok(())
}
