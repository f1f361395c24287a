//! Compressed sparse column storage, complex sparse LU, and Matrix Market I/O.

mod lu;
mod market;

pub use lu::{ColumnOrdering, LuOptions, ShiftedFactorization, SINGULAR_PIVOT_TOL};
pub use market::{read_matrix_market, write_matrix_market};

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalars a [`SparseMatrix`] can hold.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn modulus(self) -> f64;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Square matrix in compressed sparse column form.
///
/// Row indices inside each column are strictly increasing, so a `(row, col)`
/// pair appears at most once.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    order: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(triplets: &[(usize, usize, T)], order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Structural("order must be positive".into()));
        }
        for &(r, c, _) in triplets {
            if r >= order || c >= order {
                return Err(Error::Structural(format!(
                    "entry ({r}, {c}) out of range for order {order}"
                )));
            }
        }
        let mut sorted: Vec<(usize, usize, T)> = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (c, r));

        let mut col_ptr = vec![0usize; order + 1];
        let mut row_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<T> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            row_idx.push(r);
            values.push(v);
            col_ptr[c + 1] += 1;
            last = Some((r, c));
        }
        for c in 0..order {
            col_ptr[c + 1] += col_ptr[c];
        }
        Ok(Self {
            order,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn identity(order: usize) -> Self
    where
        T: From<f64>,
    {
        let trip: Vec<_> = (0..order).map(|i| (i, i, T::from(1.0))).collect();
        Self::from_triplets(&trip, order).expect("identity is well formed")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates `(row, value)` over the stored entries of column `col`.
    pub fn column(&self, col: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.col_ptr[col]..self.col_ptr[col + 1];
        self.row_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// Canonical column-major triplets.
    pub fn triplets(&self) -> Vec<(usize, usize, T)> {
        (0..self.order)
            .flat_map(|c| self.column(c).map(move |(r, v)| (r, c, v)))
            .collect()
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        let range = self.col_ptr[col]..self.col_ptr[col + 1];
        match self.row_idx[range.clone()].binary_search(&row) {
            Ok(k) => self.values[range.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }

    /// `y = A x` for real or complex `x`.
    pub fn matvec<U>(&self, x: &[U]) -> Result<Vec<U>>
    where
        U: Scalar + Mul<T, Output = U>,
    {
        if x.len() != self.order {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                got: x.len(),
            });
        }
        let mut y = vec![U::zero(); self.order];
        for (c, &xc) in x.iter().enumerate() {
            if xc == U::zero() {
                continue;
            }
            for (r, v) in self.column(c) {
                y[r] += xc * v;
            }
        }
        Ok(y)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.order]; self.order];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> SparseMatrix<U> {
        SparseMatrix {
            order: self.order,
            col_ptr: self.col_ptr.clone(),
            row_idx: self.row_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn to_complex(&self) -> SparseMatrix<Complex64> {
        self.map(Scalar::to_complex)
    }
}
