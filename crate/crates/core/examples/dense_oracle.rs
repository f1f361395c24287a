//! Dense eigenvalues, eigenvectors and Ritz pairs for small matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pencil_eig::dense_eig::{eigen, ritz_decompose};

fn main() -> pencil_eig::Result<()> {
    // companion matrix of (x - 1)(x^2 + 4)
    let a = DMatrix::from_row_slice(3, 3, &[1.0, -4.0, 4.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let e = eigen(&a, true)?;
    println!("eigenvalues {:?}", e.values);

    let g = DMatrix::<Complex64>::identity(2, 2);
    let h = DMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 1.0), Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0), Complex64::new(3.0, 0.0)]);
    let (theta, _) = ritz_decompose(&g, &h)?;
    println!("Ritz values by decreasing modulus {theta:?}");
    Ok(())
}
