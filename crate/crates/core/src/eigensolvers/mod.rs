//! Iterative eigensolvers on the Cayley extension.
//!
//! [`algorithm_one`] runs shift-invert iterations on `C_σ^{-1}` from a ring of
//! initial shifts, updating each shift from the normalizing coordinate.
//! [`algorithm_two`] does the same but deflates the most recently found
//! eigenvalue from every later trajectory. [`subspace_iteration`] is a plain
//! shift-invert block method with Rayleigh-Ritz steps, kept as a baseline.

mod shift_invert;
mod subspace;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::{CayleyOperator, Extended, DEGENERATE_SHIFT_TOL};
use crate::pencil::Pencil;

pub use shift_invert::{
    algorithm_one, algorithm_one_with, algorithm_two, algorithm_two_with, precondition,
};
pub use subspace::{subspace_iteration, SubspaceConfig};

/// Starting vectors for each trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum InitialVectors {
    /// The first `r` columns of the Fourier matrix of order `n_states`.
    #[default]
    Fourier,
    /// Uniform random entries; trajectory `k` uses seed `seed + k`.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationConfig {
    /// Iteration vectors per trajectory.
    pub r: usize,
    /// Number of initial shifts (trajectories).
    pub s: usize,
    /// Preconditioning power.
    pub p: usize,
    /// Iterations between shift updates.
    pub t: usize,
    /// Radius of the initial-shift ring.
    pub eps: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Relative coalescing tolerance: `|a − b| ≤ dedupe_tol (1 + |b|)`.
    pub dedupe_tol: f64,
    pub init: InitialVectors,
    /// Replaces the ring of initial shifts when set.
    pub initial_shifts: Option<Vec<Complex64>>,
    /// Worker threads for independent trajectories; 0 means rayon's default.
    pub threads: usize,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            r: 4,
            s: 6,
            p: 0,
            t: 4,
            eps: 1.0,
            tol: 1e-4,
            max_iter: 200,
            dedupe_tol: 1e-6,
            init: InitialVectors::Fourier,
            initial_shifts: None,
            threads: 0,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.r == 0 {
            return bad("r must be at least 1");
        }
        if self.initial_shifts.is_none() && self.s == 0 {
            return bad("s must be at least 1");
        }
        if self.t == 0 {
            return bad("t must be at least 1");
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return bad("eps must lie in (0, 1]");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if let Some(shifts) = &self.initial_shifts {
            if shifts.is_empty() {
                return bad("initial shift list is empty");
            }
            if shifts.iter().any(|m| (m - 1.0).norm() < DEGENERATE_SHIFT_TOL) {
                return bad("initial shift at the spurious eigenvalue 1");
            }
        }
        Ok(())
    }

    pub fn same_eigenvalue(&self, a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= self.dedupe_tol * (1.0 + b.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrajectoryStatus {
    Converged,
    Stagnated,
    Degenerate,
    Failed,
}

/// Outcome of one trajectory (or one converged Ritz column).
///
/// For subspace runs `sigma` holds the shift `a` and `mu` the Ritz value `θ`
/// of `L (J − aL)^{-1} L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub lambda: Extended,
    pub mu: Complex64,
    pub sigma: Complex64,
    pub iterations: usize,
    pub lu_count: usize,
    pub residual_order: Option<i32>,
    pub shift_index: usize,
    pub xi: Option<Complex64>,
    pub status: TrajectoryStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub message: Option<String>,
}

impl ConvergenceRecord {
    pub fn converged(&self) -> bool {
        self.status == TrajectoryStatus::Converged
    }
}

/// Finite eigenvalues of the converged records with near-duplicates removed,
/// in record order.
pub fn distinct_eigenvalues(records: &[ConvergenceRecord], cfg: &IterationConfig) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for lam in records.iter().filter(|r| r.converged()).filter_map(|r| r.lambda.finite()) {
        if !out.iter().any(|&b| cfg.same_eigenvalue(lam, b)) {
            out.push(lam);
        }
    }
    out
}

/// Column `k` (1-based) has entry `j` (1-based) equal to `e^{j k 2πi / n}`.
pub fn fourier_vectors(n: usize, r: usize) -> Result<Vec<Vec<Complex64>>> {
    if r == 0 || r > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= r <= n, got r={r}, n={n}"
        )));
    }
    Ok((1..=r)
        .map(|k| {
            (1..=n)
                .map(|j| {
                    // reduce j·k mod n first to keep the angle small
                    let m = (j * k) % n;
                    Complex64::from_polar(1.0, 2.0 * PI * m as f64 / n as f64)
                })
                .collect()
        })
        .collect())
}

/// `μ_k = eps · e^{i(2k+1)π/(2s)}`, `k = 0..s`, unless overridden.
pub fn initial_shifts(cfg: &IterationConfig) -> Vec<Complex64> {
    if let Some(shifts) = &cfg.initial_shifts {
        return shifts.clone();
    }
    let s = cfg.s as f64;
    (0..cfg.s)
        .map(|k| Complex64::from_polar(cfg.eps, (2 * k + 1) as f64 * PI / (2.0 * s)))
        .collect()
}

/// The pencil eigenvalue whose image under `C_σ^{-1}` is `μ`:
/// `λ = (μ conj(σ) + σ) / (1 − μ)`.
pub fn recover_lambda(mu: Complex64, sigma: Complex64) -> Extended {
    if (mu - 1.0).norm() < DEGENERATE_SHIFT_TOL {
        return Extended::Infinity;
    }
    Extended::Finite((mu * sigma.conj() + sigma) / (1.0 - mu))
}

/// `floor(log10 ‖C_σ^{-1} x − μ x‖₂)` for `x` scaled to unit 2-norm.
pub fn residual_order(op: &CayleyOperator, mu: Complex64, x: &[Complex64]) -> Result<i32> {
    let x = unit(x)?;
    let y = op.apply_c_inv(&x)?;
    Ok(order_of(y.iter().zip(&x).map(|(a, b)| a - mu * b)))
}

pub(crate) fn order_of(r: impl Iterator<Item = Complex64>) -> i32 {
    let norm = r.map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return f64::MIN_POSITIVE.log10().floor() as i32;
    }
    norm.log10().floor() as i32
}

pub(crate) fn unit(x: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidParameter("zero or non-finite vector".into()));
    }
    Ok(x.iter().map(|z| z / n).collect())
}

pub(crate) fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Index of the max-modulus coordinate; ties go to the smallest index.
pub(crate) fn max_modulus_index(v: &[Complex64]) -> usize {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        let a = z.norm();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    best
}

/// Starting vectors for trajectory `k`, embedded at the state indices.
pub(crate) fn start_vectors(
    pencil: &Pencil,
    cfg: &IterationConfig,
    k: usize,
) -> Result<Vec<Vec<Complex64>>> {
    let n = pencil.n_states();
    let cols = match cfg.init {
        InitialVectors::Fourier => fourier_vectors(n, cfg.r)?,
        InitialVectors::Random { seed } => {
            if cfg.r > n {
                return Err(Error::InvalidParameter(format!(
                    "need r <= n, got r={}, n={n}",
                    cfg.r
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            (0..cfg.r)
                .map(|_| {
                    (0..n)
                        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect()
                })
                .collect()
        }
    };
    Ok(cols.iter().map(|c| pencil.embed_state(c)).collect())
}
