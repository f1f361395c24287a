use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{fourier_vectors, max_modulus_index, order_of, sup_norm, unit, ConvergenceRecord, TrajectoryStatus};
use crate::dense_eig::ritz_decompose;
use crate::error::{Error, Result};
use crate::mobius::{Extended, FactorCache};
use crate::pencil::Pencil;

/// Columns whose norm drops below this fraction during orthogonalization are
/// treated as dependent.
const DEPENDENT_COLUMN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceConfig {
    pub block: usize,
    /// Shift-invert applications per Rayleigh-Ritz step.
    pub ritz_period: usize,
    pub tol: f64,
    pub max_cycles: usize,
}

impl Default for SubspaceConfig {
    fn default() -> Self {
        Self {
            block: 8,
            ritz_period: 4,
            tol: 1e-5,
            max_cycles: 200,
        }
    }
}

/// Shift-invert subspace iteration with `T = L (J − aL)^{-1} L` and a
/// Rayleigh-Ritz step every `ritz_period` applications.
///
/// Converged Ritz vectors are frozen: they leave the block and later bases are
/// orthogonalized against them. Records are emitted per cycle in decreasing
/// `|θ|`, with `λ = a + 1/θ`.
pub fn subspace_iteration(
    pencil: &Pencil,
    a: Complex64,
    cfg: &SubspaceConfig,
) -> Result<Vec<ConvergenceRecord>> {
    let n = pencil.n_states();
    if cfg.block == 0 || cfg.block > n {
        return Err(Error::InvalidParameter(format!(
            "block must lie in 1..={n}, got {}",
            cfg.block
        )));
    }
    if cfg.ritz_period == 0 || !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter("ritz_period and tol must be positive".into()));
    }
    let cache = FactorCache::new(pencil);
    let apply = |z: &[Complex64]| -> Result<Vec<Complex64>> {
        let x = cache.solve(a, &pencil.apply_l(z)?)?;
        pencil.apply_l(&x)
    };

    let mut z: Vec<Vec<Complex64>> = fourier_vectors(n, cfg.block)?
        .iter()
        .map(|c| pencil.embed_state(c))
        .collect();
    let mut frozen: Vec<Vec<Complex64>> = Vec::new();
    let mut records = Vec::new();
    let mut applications = 0;

    for _ in 0..cfg.max_cycles {
        for _ in 1..cfg.ritz_period {
            z = z
                .iter()
                .map(|v| apply(v).map(|w| sup_scaled(&w)))
                .collect::<Result<_>>()?;
        }
        applications += cfg.ritz_period;
        orthonormalize(&mut z, &frozen);
        let mut w: Vec<Vec<Complex64>> = z.iter().map(|v| apply(v)).collect::<Result<_>>()?;

        let (thetas, y) = loop {
            if z.is_empty() {
                return Ok(records);
            }
            let g = gram(&z, &z);
            let h = gram(&z, &w);
            match ritz_decompose(&g, &h) {
                Ok(d) => break d,
                Err(Error::RankDeficientBasis) => {
                    z.pop();
                    w.pop();
                }
                Err(e) => return Err(e),
            }
        };

        let x = combine(&z, &y);
        let xw = combine(&w, &y);
        let mut next = Vec::new();
        for (col, theta) in thetas.iter().enumerate() {
            let xc = max_normalized(&x[col]);
            let wc = max_normalized(&xw[col]);
            let change = xc.iter().zip(&wc).fold(0.0f64, |m, (p, q)| m.max((p - q).norm()));
            if change < cfg.tol && theta.norm() > 0.0 {
                let u = unit(&xc)?;
                let tu = apply(&u)?;
                records.push(ConvergenceRecord {
                    lambda: Extended::Finite(a + theta.inv()),
                    mu: *theta,
                    sigma: a,
                    iterations: applications,
                    lu_count: 1,
                    residual_order: Some(order_of(tu.iter().zip(&u).map(|(p, q)| p - theta * q))),
                    shift_index: col,
                    xi: None,
                    status: TrajectoryStatus::Converged,
                    message: None,
                });
                frozen.push(u);
            } else {
                next.push(wc);
            }
        }
        if next.is_empty() {
            break;
        }
        z = next;
    }
    Ok(records)
}

fn sup_scaled(v: &[Complex64]) -> Vec<Complex64> {
    let s = sup_norm(v);
    if s > 0.0 {
        v.iter().map(|x| x / s).collect()
    } else {
        v.to_vec()
    }
}

fn max_normalized(v: &[Complex64]) -> Vec<Complex64> {
    let i = max_modulus_index(v);
    let a = v[i];
    if a.norm() == 0.0 {
        return v.to_vec();
    }
    let mut out: Vec<Complex64> = v.iter().map(|x| x / a).collect();
    out[i] = Complex64::new(1.0, 0.0);
    out
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Modified Gram-Schmidt against `frozen`, then among the columns themselves.
/// Dependent columns are dropped.
fn orthonormalize(z: &mut Vec<Vec<Complex64>>, frozen: &[Vec<Complex64>]) {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(z.len());
    for mut v in z.drain(..) {
        let before = norm2(&v);
        for q in frozen.iter().chain(basis.iter()) {
            let c = dot(q, &v);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= c * y;
            }
        }
        let after = norm2(&v);
        if before > 0.0 && after > DEPENDENT_COLUMN_TOL * before {
            basis.push(v.iter().map(|x| x / after).collect());
        }
    }
    *z = basis;
}

fn gram(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| dot(&a[i], &b[j]))
}

fn combine(z: &[Vec<Complex64>], y: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    let n = z[0].len();
    (0..y.ncols())
        .map(|c| {
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            for (k, col) in z.iter().enumerate() {
                let s = y[(k, c)];
                for (o, x) in out.iter_mut().zip(col) {
                    *o += s * x;
                }
            }
            out
        })
        .collect()
}
