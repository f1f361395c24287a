//! Factorize `J - aL` for a complex shift and solve against it.
//!
//! ```text
//! cargo run --example sparse_lu
//! ```

use num_complex::Complex64;
use pencil_eig::sparse::{ColumnOrdering, LuOptions};
use pencil_eig::{Error, Pencil, ShiftedFactorization, SparseMatrix};

fn main() -> pencil_eig::Result<()> {
    // J = [[1, 1], [1, 2]], L = diag(1, 0): the only finite eigenvalue is 0.5
    let j = SparseMatrix::from_triplets(&[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)], 2)?;
    let pencil = Pencil::new(j, vec![1.0, 0.0])?;

    let a = Complex64::new(0.5, 1.0);
    let f = pencil.factorize_shifted(a)?;
    let b = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)];
    let x = f.solve(&b)?;
    let back = pencil.assemble_shifted(a).matvec(&x)?;
    println!("shift {a}: x = {x:?}");
    println!("residual {:.1e}, pivot growth {:.2}", dist(&back, &b), f.pivot_growth());

    match pencil.factorize_shifted(Complex64::new(0.5, 0.0)) {
        Err(Error::SingularShift { shift, step, pivot }) => {
            println!("shift {shift} is an eigenvalue: pivot {pivot:.1e} at step {step}")
        }
        other => println!("unexpected: {other:?}"),
    }

    // Optional minimum-degree column ordering
    let a = pencil.assemble_shifted(Complex64::new(0.0, 3.0));
    let opts = LuOptions { ordering: ColumnOrdering::MinimumDegree };
    let f = ShiftedFactorization::factorize_with(&a, Complex64::new(0.0, 3.0), opts)?;
    println!("column order {:?}, row order {:?}", f.col_perm(), f.row_perm());
    Ok(())
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}
