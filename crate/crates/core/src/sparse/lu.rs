use std::collections::BTreeSet;

use num_complex::Complex64;

use super::{Scalar, SparseMatrix};
use crate::error::{Error, Result};

/// A pivot smaller than this times the largest entry of its original column is
/// treated as zero.
pub const SINGULAR_PIVOT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColumnOrdering {
    #[default]
    Natural,
    /// Greedy minimum degree on the pattern of `A + A^T`.
    MinimumDegree,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LuOptions {
    pub ordering: ColumnOrdering,
}

/// Complex sparse LU of `J - aL` with partial pivoting: `P A Q = L U`.
///
/// Factors are stored column by column. Row indices of `L` stay in the
/// original row numbering until [`ShiftedFactorization::lower`] renumbers them.
#[derive(Debug, Clone)]
pub struct ShiftedFactorization {
    shift: Complex64,
    order: usize,
    /// `pivot_rows[k]` is the original row chosen as pivot at step `k`.
    pivot_rows: Vec<usize>,
    /// `col_perm[k]` is the original column eliminated at step `k`.
    col_perm: Vec<usize>,
    l_cols: Vec<Vec<(usize, Complex64)>>,
    /// Strictly upper part, indexed by step.
    u_cols: Vec<Vec<(usize, Complex64)>>,
    u_diag: Vec<Complex64>,
    pivot_growth: f64,
}

impl ShiftedFactorization {
    pub fn factorize(a: &SparseMatrix<Complex64>, shift: Complex64) -> Result<Self> {
        Self::factorize_with(a, shift, LuOptions::default())
    }

    pub fn factorize_with(
        a: &SparseMatrix<Complex64>,
        shift: Complex64,
        opts: LuOptions,
    ) -> Result<Self> {
        let n = a.order();
        let col_perm = match opts.ordering {
            ColumnOrdering::Natural => (0..n).collect(),
            ColumnOrdering::MinimumDegree => minimum_degree(a),
        };
        let zero = Complex64::new(0.0, 0.0);

        let mut pivot_rows: Vec<usize> = Vec::with_capacity(n);
        let mut pivoted = vec![false; n];
        let mut l_cols: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(n);
        let mut u_cols = Vec::with_capacity(n);
        let mut u_diag = Vec::with_capacity(n);
        let mut x = vec![zero; n];
        let mut touched = Vec::with_capacity(n);
        let mut mark = vec![false; n];
        let a_max = a.max_abs();
        let mut u_max: f64 = 0.0;

        for (k, &col) in col_perm.iter().enumerate() {
            let mut col_max: f64 = 0.0;
            for (r, v) in a.column(col) {
                x[r] = v;
                col_max = col_max.max(v.norm());
                if !mark[r] {
                    mark[r] = true;
                    touched.push(r);
                }
            }

            let mut u_col = Vec::new();
            for j in 0..k {
                let ujk = x[pivot_rows[j]];
                if ujk == zero {
                    continue;
                }
                u_col.push((j, ujk));
                u_max = u_max.max(ujk.norm());
                for &(r, l) in &l_cols[j] {
                    x[r] -= l * ujk;
                    if !mark[r] {
                        mark[r] = true;
                        touched.push(r);
                    }
                }
            }

            // Max modulus among rows not yet pivoted; ties go to the smallest row.
            let mut piv_row = usize::MAX;
            let mut piv_abs = -1.0;
            touched.sort_unstable();
            for &r in &touched {
                if pivoted[r] {
                    continue;
                }
                let m = x[r].norm();
                if m > piv_abs {
                    piv_abs = m;
                    piv_row = r;
                }
            }
            if piv_row == usize::MAX || col_max == 0.0 || piv_abs < SINGULAR_PIVOT_TOL * col_max {
                return Err(Error::SingularShift {
                    shift,
                    step: k,
                    pivot: piv_abs.max(0.0),
                });
            }
            let piv = x[piv_row];
            u_max = u_max.max(piv_abs);
            pivoted[piv_row] = true;

            let mut l_col = Vec::new();
            for &r in &touched {
                if !pivoted[r] && x[r] != zero {
                    l_col.push((r, x[r] / piv));
                }
            }
            for &r in &touched {
                x[r] = zero;
                mark[r] = false;
            }
            touched.clear();

            pivot_rows.push(piv_row);
            l_cols.push(l_col);
            u_cols.push(u_col);
            u_diag.push(piv);
        }

        Ok(Self {
            shift,
            order: n,
            pivot_rows,
            col_perm,
            l_cols,
            u_cols,
            u_diag,
            pivot_growth: if a_max > 0.0 { u_max / a_max } else { 1.0 },
        })
    }

    pub fn shift(&self) -> Complex64 {
        self.shift
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `max |U| / max |A|`.
    pub fn pivot_growth(&self) -> f64 {
        self.pivot_growth
    }

    /// `row_perm[k]` is the original row placed at position `k` of `P A Q`.
    pub fn row_perm(&self) -> &[usize] {
        &self.pivot_rows
    }

    pub fn col_perm(&self) -> &[usize] {
        &self.col_perm
    }

    /// Unit lower triangular factor in permuted numbering.
    pub fn lower(&self) -> SparseMatrix<Complex64> {
        let mut pos = vec![0usize; self.order];
        for (k, &r) in self.pivot_rows.iter().enumerate() {
            pos[r] = k;
        }
        let mut trip = Vec::new();
        for (j, col) in self.l_cols.iter().enumerate() {
            trip.push((j, j, Complex64::new(1.0, 0.0)));
            trip.extend(col.iter().map(|&(r, l)| (pos[r], j, l)));
        }
        SparseMatrix::from_triplets(&trip, self.order).expect("factor indices in range")
    }

    pub fn upper(&self) -> SparseMatrix<Complex64> {
        let mut trip = Vec::new();
        for (k, col) in self.u_cols.iter().enumerate() {
            trip.extend(col.iter().map(|&(j, u)| (j, k, u)));
            trip.push((k, k, self.u_diag[k]));
        }
        SparseMatrix::from_triplets(&trip, self.order).expect("factor indices in range")
    }

    /// Solves `A x = b` with one forward and one backward substitution.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if b.len() != self.order {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                got: b.len(),
            });
        }
        let n = self.order;
        let mut work = b.to_vec();
        let mut y = vec![Complex64::zero(); n];
        for j in 0..n {
            let yj = work[self.pivot_rows[j]];
            y[j] = yj;
            if yj != Complex64::zero() {
                for &(r, l) in &self.l_cols[j] {
                    work[r] -= l * yj;
                }
            }
        }
        for j in (0..n).rev() {
            let zj = y[j] / self.u_diag[j];
            y[j] = zj;
            if zj != Complex64::zero() {
                for &(i, u) in &self.u_cols[j] {
                    y[i] -= u * zj;
                }
            }
        }
        let mut x = vec![Complex64::zero(); n];
        for (k, &c) in self.col_perm.iter().enumerate() {
            x[c] = y[k];
        }
        Ok(x)
    }
}

fn minimum_degree(a: &SparseMatrix<Complex64>) -> Vec<usize> {
    let n = a.order();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (r, c, _) in a.triplets() {
        if r != c {
            adj[r].insert(c);
            adj[c].insert(r);
        }
    }
    let mut eliminated = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let p = (0..n)
            .filter(|&i| !eliminated[i])
            .min_by_key(|&i| (adj[i].len(), i))
            .expect("a node remains");
        eliminated[p] = true;
        order.push(p);
        let nbrs: Vec<usize> = std::mem::take(&mut adj[p]).into_iter().collect();
        for &u in &nbrs {
            adj[u].remove(&p);
            for &v in &nbrs {
                if u != v {
                    adj[u].insert(v);
                }
            }
        }
    }
    order
}
