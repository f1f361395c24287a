//! The pencil `(J, L)` with diagonal, singular `L`.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::{ShiftedFactorization, SparseMatrix};

/// Largest `n + m` accepted by the dense oracle paths.
pub const DENSE_CAP: usize = 500;

/// `J z = λ L z` with `L = diag(l_diag)`.
///
/// Coordinates with a nonzero diagonal entry are state variables, the rest
/// are algebraic. The two sets may interleave.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    j: SparseMatrix<f64>,
    l_diag: Vec<f64>,
    state: Vec<usize>,
    algebraic: Vec<usize>,
}

impl Pencil {
    pub fn new(j: SparseMatrix<f64>, l_diag: Vec<f64>) -> Result<Self> {
        if l_diag.len() != j.order() {
            return Err(Error::DimensionMismatch {
                expected: j.order(),
                got: l_diag.len(),
            });
        }
        if l_diag.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidParameter("L diagonal must be finite".into()));
        }
        let (state, algebraic): (Vec<usize>, Vec<usize>) =
            (0..l_diag.len()).partition(|&i| l_diag[i] != 0.0);
        if state.is_empty() {
            return Err(Error::InvalidParameter(
                "L must have at least one nonzero diagonal entry".into(),
            ));
        }
        Ok(Self {
            j,
            l_diag,
            state,
            algebraic,
        })
    }

    pub fn order(&self) -> usize {
        self.j.order()
    }

    /// Number of state variables, `rank(L)`.
    pub fn n_states(&self) -> usize {
        self.state.len()
    }

    pub fn n_algebraic(&self) -> usize {
        self.algebraic.len()
    }

    pub fn jacobian(&self) -> &SparseMatrix<f64> {
        &self.j
    }

    pub fn l_diag(&self) -> &[f64] {
        &self.l_diag
    }

    pub fn state_indices(&self) -> &[usize] {
        &self.state
    }

    pub fn algebraic_indices(&self) -> &[usize] {
        &self.algebraic
    }

    /// `J - aL` as a complex matrix. The pattern always includes the state diagonal.
    pub fn assemble_shifted(&self, a: Complex64) -> SparseMatrix<Complex64> {
        let mut trip: Vec<(usize, usize, Complex64)> = self
            .j
            .triplets()
            .into_iter()
            .map(|(r, c, v)| (r, c, Complex64::new(v, 0.0)))
            .collect();
        trip.extend(self.state.iter().map(|&i| (i, i, -a * self.l_diag[i])));
        SparseMatrix::from_triplets(&trip, self.order()).expect("pencil indices are in range")
    }

    pub fn factorize_shifted(&self, a: Complex64) -> Result<ShiftedFactorization> {
        ShiftedFactorization::factorize(&self.assemble_shifted(a), a)
    }

    pub fn apply_l(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(v.len())?;
        Ok(v.iter().zip(&self.l_diag).map(|(x, d)| x * d).collect())
    }

    /// Zeroes the algebraic coordinates, projecting onto `range(L)`.
    pub fn project_state_space(&self, v: &mut [Complex64]) {
        for &i in &self.algebraic {
            v[i] = Complex64::new(0.0, 0.0);
        }
    }

    /// Embeds a length-`n` vector at the state indices.
    pub fn embed_state(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.order()];
        for (&i, &xi) in self.state.iter().zip(x) {
            v[i] = xi;
        }
        v
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                got: len,
            });
        }
        Ok(())
    }

    /// `D^{-1} (J1 - J2 J4^{-1} J3)`, whose eigenvalues are the finite
    /// eigenvalues of the pencil. Dense; oracle use only.
    pub fn dense_state_matrix(&self) -> Result<DMatrix<f64>> {
        self.dense_state_matrix_capped(DENSE_CAP)
    }

    pub fn dense_state_matrix_capped(&self, cap: usize) -> Result<DMatrix<f64>> {
        if self.order() > cap {
            return Err(Error::DenseCapExceeded {
                order: self.order(),
                cap,
            });
        }
        let n = self.n_states();
        let m = self.n_algebraic();
        let dense = self.j.to_dense();
        let block = |rows: &[usize], cols: &[usize]| {
            DMatrix::from_fn(rows.len(), cols.len(), |i, k| dense[rows[i]][cols[k]])
        };
        let mut a = block(&self.state, &self.state);
        if m > 0 {
            let j2 = block(&self.state, &self.algebraic);
            let j3 = block(&self.algebraic, &self.state);
            let j4 = block(&self.algebraic, &self.algebraic);
            let scale = j4.amax();
            let lu = j4.lu();
            let u = lu.u();
            let min_piv = (0..m).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
            if scale == 0.0 || min_piv <= 1e-14 * scale {
                return Err(Error::SingularAlgebraicBlock);
            }
            let x = lu.solve(&j3).ok_or(Error::SingularAlgebraicBlock)?;
            a -= j2 * x;
        }
        for (row, &i) in self.state.iter().enumerate() {
            let d = self.l_diag[i];
            for c in 0..n {
                a[(row, c)] /= d;
            }
        }
        Ok(a)
    }
}

/// Reads the `index value` L-diagonal format (1-based, unlisted entries zero).
pub fn read_l_diag(path: impl AsRef<Path>, order: usize) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_l_diag(&text, order)
}

pub(crate) fn parse_l_diag(text: &str, order: usize) -> Result<Vec<f64>> {
    let mut d = vec![0.0; order];
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(idx), Some(val), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::parse(ln, "expected 'index value'"));
        };
        let idx: usize = idx.parse().map_err(|_| Error::parse(ln, "bad index"))?;
        let val: f64 = val.parse().map_err(|_| Error::parse(ln, "bad value"))?;
        if idx == 0 || idx > order {
            return Err(Error::parse(ln, format!("index {idx} out of range 1..={order}")));
        }
        d[idx - 1] = val;
    }
    Ok(d)
}

pub fn write_l_diag(l_diag: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_l_diag(l_diag)).map_err(|e| Error::io(path, e))
}

pub(crate) fn format_l_diag(l_diag: &[f64]) -> String {
    l_diag
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, v)| format!("{} {:.16e}\n", i + 1, v))
        .collect()
}
