//! The Cayley operator and its shifted inverses applied to vectors, each at the
//! cost of one solve with a cached factorization.

use num_complex::Complex64;
use pencil_eig::{CayleyOperator, Pencil, SparseMatrix};

fn main() -> pencil_eig::Result<()> {
    let c = |re| Complex64::new(re, 0.0);
    // J = diag(2, 1), L = diag(1, 0), σ = 1: C = diag(3, 1), C^{-1} = diag(1/3, 1)
    let j = SparseMatrix::from_triplets(&[(0, 0, 2.0), (1, 1, 1.0)], 2)?;
    let pencil = Pencil::new(j, vec![1.0, 0.0])?;
    let op = CayleyOperator::new(&pencil, c(1.0))?;
    let v = vec![c(1.0), c(1.0)];

    println!("C v            = {:?}", op.apply_c(&v)?);
    println!("C^-1 v         = {:?}", op.apply_c_inv(&v)?);
    println!("(C^-1 - 0.5)^-1 v = {:?}", op.shift_invert_c_inv(c(0.5), &v)?);
    // deflating ξ = 1/3 kills the eigenvector of λ = 2
    println!("deflated v     = {:?}", op.apply_deflated(c(0.5), c(1.0 / 3.0), &v)?);

    let stats = op.cache().stats();
    println!("{} factorizations, {} solves", stats.factorizations, stats.solves);

    // μ = 1 is the image of the infinite eigenvalue
    println!("{:?}", op.shift_invert_c_inv(c(1.0), &v).unwrap_err());
    Ok(())
}
