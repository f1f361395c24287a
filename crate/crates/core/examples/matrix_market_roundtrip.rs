//! Write a pencil to Matrix Market plus an L-diagonal file and read it back.

use pencil_eig::pencil::{read_l_diag, write_l_diag};
use pencil_eig::sparse::{read_matrix_market, write_matrix_market};
use pencil_eig::{planted_pencil, PlantSpec};

fn main() -> pencil_eig::Result<()> {
    let (pencil, _) = planted_pencil(&PlantSpec::power_system_like(1))?;
    let dir = std::env::temp_dir().join("pencil-eig-roundtrip");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let (jp, lp) = (dir.join("J.mtx"), dir.join("L.txt"));

    write_matrix_market(pencil.jacobian(), &jp)?;
    write_l_diag(pencil.l_diag(), &lp)?;

    let j = read_matrix_market(&jp)?;
    let l = read_l_diag(&lp, j.order())?;
    println!("order {}, {} nonzeros, {} state variables", j.order(), j.nnz(), l.iter().filter(|d| **d != 0.0).count());
    println!("identical triplets: {}", j.triplets() == pencil.jacobian().triplets());
    println!("identical L: {}", l == pencil.l_diag());

    let text = std::fs::read_to_string(&jp).expect("written above");
    for line in text.lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
