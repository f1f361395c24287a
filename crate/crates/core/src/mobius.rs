//! Möbius maps `s ↦ k (s + conj(β)) / (s − α)` and their extensions to the
//! pencil, `C = k (J + conj(β) L)(J − αL)^{-1}` and `D = k (J − αL)^{-1}(J + conj(β) L)`.
//!
//! Every operator application reduces to one solve with a factorization of
//! `J − aL` for a suitable scalar `a`. Factorizations are cached by shift.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pencil::Pencil;
use crate::sparse::ShiftedFactorization;

/// Shifts closer than this to the spurious eigenvalue 1 are rejected.
pub const DEGENERATE_SHIFT_TOL: f64 = 1e-12;

/// A point of the extended complex plane. Serialized as `[re, im]`, or
/// `null` for infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Extended {
    Finite(Complex64),
    Infinity,
}

impl Extended {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Extended::Finite(z) => Some(z),
            Extended::Infinity => None,
        }
    }
}

impl From<Complex64> for Extended {
    fn from(z: Complex64) -> Self {
        Extended::Finite(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusParams {
    k: Complex64,
    alpha: Complex64,
    beta: Complex64,
}

impl MobiusParams {
    pub fn new(k: Complex64, alpha: Complex64, beta: Complex64) -> Result<Self> {
        if k == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidParameter("k must be nonzero".into()));
        }
        if alpha + beta.conj() == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidParameter("alpha + conj(beta) must be nonzero".into()));
        }
        Ok(Self { k, alpha, beta })
    }

    /// The Cayley transform `k = 1, α = β = σ`.
    pub fn cayley(sigma: Complex64) -> Result<Self> {
        Self::new(Complex64::new(1.0, 0.0), sigma, sigma)
    }

    pub fn k(&self) -> Complex64 {
        self.k
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// `k (s + conj(β)) / (s − α)`; `α ↦ ∞` and `∞ ↦ k`.
    pub fn map(&self, s: Extended) -> Extended {
        match s {
            Extended::Infinity => Extended::Finite(self.k),
            Extended::Finite(s) if s == self.alpha => Extended::Infinity,
            Extended::Finite(s) => Extended::Finite(self.k * (s + self.beta.conj()) / (s - self.alpha)),
        }
    }

    /// The unique `s` with `map(s) = mu`: `(k conj(β) + μ α) / (μ − k)`.
    pub fn inverse_map(&self, mu: Extended) -> Extended {
        match mu {
            Extended::Infinity => Extended::Finite(self.alpha),
            Extended::Finite(mu) if mu == self.k => Extended::Infinity,
            Extended::Finite(mu) => {
                Extended::Finite((self.k * self.beta.conj() + mu * self.alpha) / (mu - self.k))
            }
        }
    }
}

pub fn mobius_map(p: &MobiusParams, s: Extended) -> Extended {
    p.map(s)
}

pub fn mobius_inverse_map(p: &MobiusParams, mu: Extended) -> Extended {
    p.inverse_map(mu)
}

/// `c_σ(s) = (s + conj(σ)) / (s − σ)`.
pub fn cayley_map(sigma: Complex64, s: Complex64) -> Extended {
    if s == sigma {
        return Extended::Infinity;
    }
    Extended::Finite((s + sigma.conj()) / (s - sigma))
}

/// The real `σ` maximizing `|c_σ(λ)|`, namely `|λ|`.
pub fn optimal_sigma(lambda: Complex64) -> Result<f64> {
    let r = lambda.norm();
    if r == 0.0 {
        return Err(Error::InvalidParameter("optimal sigma undefined for lambda = 0".into()));
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct ShiftKey(u64, u64);

impl ShiftKey {
    fn new(a: Complex64) -> Self {
        // +0.0 and -0.0 name the same shift
        let canon = |x: f64| if x == 0.0 { 0.0f64.to_bits() } else { x.to_bits() };
        ShiftKey(canon(a.re), canon(a.im))
    }
}

/// Counters for factorizations performed and triangular solve pairs issued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CacheStats {
    pub factorizations: usize,
    pub solves: usize,
}

/// Append-only cache of factorizations of `J − aL` keyed by the exact shift.
#[derive(Debug)]
pub struct FactorCache<'p> {
    pencil: &'p Pencil,
    map: RwLock<HashMap<ShiftKey, Arc<ShiftedFactorization>>>,
    factorizations: AtomicUsize,
    solves: AtomicUsize,
}

impl<'p> FactorCache<'p> {
    pub fn new(pencil: &'p Pencil) -> Self {
        Self {
            pencil,
            map: RwLock::new(HashMap::new()),
            factorizations: AtomicUsize::new(0),
            solves: AtomicUsize::new(0),
        }
    }

    pub fn pencil(&self) -> &'p Pencil {
        self.pencil
    }

    pub fn factorization(&self, a: Complex64) -> Result<Arc<ShiftedFactorization>> {
        let key = ShiftKey::new(a);
        if let Some(f) = self.map.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(f));
        }
        let f = Arc::new(self.pencil.factorize_shifted(a)?);
        self.factorizations.fetch_add(1, Ordering::Relaxed);
        self.map
            .write()
            .expect("cache lock")
            .insert(key, Arc::clone(&f));
        Ok(f)
    }

    pub fn contains(&self, a: Complex64) -> bool {
        self.map.read().expect("cache lock").contains_key(&ShiftKey::new(a))
    }

    /// `(J − aL)^{-1} b`.
    pub fn solve(&self, a: Complex64, b: &[Complex64]) -> Result<Vec<Complex64>> {
        self.pencil.check_len(b.len())?;
        let f = self.factorization(a)?;
        self.solves.fetch_add(1, Ordering::Relaxed);
        f.solve(b)
    }

    /// `L (J − aL)^{-1} b`.
    fn l_solve(&self, a: Complex64, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let x = self.solve(a, b)?;
        self.pencil.apply_l(&x)
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            factorizations: self.factorizations.load(Ordering::Relaxed),
            solves: self.solves.load(Ordering::Relaxed),
        }
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn axpy(v: &[Complex64], scale: Complex64, w: &[Complex64]) -> Vec<Complex64> {
    v.iter().zip(w).map(|(a, b)| a + scale * b).collect()
}

fn scaled(v: &[Complex64], s: Complex64) -> Vec<Complex64> {
    v.iter().map(|x| x * s).collect()
}

/// General `C_{k,α,β}` and `D_{k,α,β}` bound to a pencil.
#[derive(Debug)]
pub struct MobiusOperator<'p> {
    params: MobiusParams,
    cache: FactorCache<'p>,
}

impl<'p> MobiusOperator<'p> {
    pub fn new(pencil: &'p Pencil, params: MobiusParams) -> Self {
        Self {
            params,
            cache: FactorCache::new(pencil),
        }
    }

    pub fn params(&self) -> &MobiusParams {
        &self.params
    }

    pub fn cache(&self) -> &FactorCache<'p> {
        &self.cache
    }

    /// `k v + k (α + conj(β)) L (J − αL)^{-1} v`.
    pub fn apply_c(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let MobiusParams { k, alpha, beta } = self.params;
        let w = self.cache.l_solve(alpha, v)?;
        Ok(scaled(&axpy(v, alpha + beta.conj(), &w), k))
    }

    /// `k v + k (α + conj(β)) (J − αL)^{-1} L v`.
    pub fn apply_d(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let MobiusParams { k, alpha, beta } = self.params;
        let lv = self.cache.pencil().apply_l(v)?;
        let w = self.cache.solve(alpha, &lv)?;
        Ok(scaled(&axpy(v, alpha + beta.conj(), &w), k))
    }
}

/// The Cayley extension `C_σ = (J + conj(σ) L)(J − σL)^{-1}`, `Re σ > 0`,
/// together with its inverse, shifted inverses, and the deflated operator.
///
/// None of the `apply` methods project onto `range(L)`; iteration loops do that.
#[derive(Debug)]
pub struct CayleyOperator<'p> {
    sigma: Complex64,
    cache: FactorCache<'p>,
}

impl<'p> CayleyOperator<'p> {
    pub fn new(pencil: &'p Pencil, sigma: Complex64) -> Result<Self> {
        if !(sigma.re > 0.0) || !sigma.im.is_finite() || !sigma.re.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma must have positive real part, got {sigma}"
            )));
        }
        Ok(Self {
            sigma,
            cache: FactorCache::new(pencil),
        })
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }

    pub fn pencil(&self) -> &'p Pencil {
        self.cache.pencil()
    }

    pub fn cache(&self) -> &FactorCache<'p> {
        &self.cache
    }

    fn two_re_sigma(&self) -> Complex64 {
        Complex64::new(2.0 * self.sigma.re, 0.0)
    }

    fn check_mu(mu: Complex64) -> Result<()> {
        if (mu - 1.0).norm() < DEGENERATE_SHIFT_TOL {
            return Err(Error::DegenerateShift { mu });
        }
        Ok(())
    }

    /// `C_σ v = v + 2 Re σ · L (J − σL)^{-1} v`.
    pub fn apply_c(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let w = self.cache.l_solve(self.sigma, v)?;
        Ok(axpy(v, self.two_re_sigma(), &w))
    }

    /// `C_σ^{-1} v = v − 2 Re σ · L (J + conj(σ) L)^{-1} v`.
    pub fn apply_c_inv(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let w = self.cache.l_solve(-self.sigma.conj(), v)?;
        Ok(axpy(v, -self.two_re_sigma(), &w))
    }

    /// Shift `a` of the factorization behind `(C_σ − μI)^{-1}`.
    pub fn shift_invert_c_pole(&self, mu: Complex64) -> Complex64 {
        (self.sigma.conj() + mu * self.sigma) / (mu - 1.0)
    }

    /// Shift `a` of the factorization behind `(C_σ^{-1} − μI)^{-1}`.
    /// This is the pencil eigenvalue whose image under `C_σ^{-1}` is `μ`.
    pub fn shift_invert_c_inv_pole(&self, mu: Complex64) -> Complex64 {
        -(self.sigma + mu * self.sigma.conj()) / (mu - 1.0)
    }

    /// `(C_σ − μI)^{-1} v = 1/(1−μ) [v + 2Reσ/(μ−1) · L (J − aL)^{-1} v]`,
    /// `a = (conj(σ) + μσ)/(μ − 1)`.
    pub fn shift_invert_c(&self, mu: Complex64, v: &[Complex64]) -> Result<Vec<Complex64>> {
        Self::check_mu(mu)?;
        let w = self.cache.l_solve(self.shift_invert_c_pole(mu), v)?;
        let inner = axpy(v, self.two_re_sigma() / (mu - 1.0), &w);
        Ok(scaled(&inner, (1.0 - mu).inv()))
    }

    /// `(C_σ^{-1} − μI)^{-1} v = 1/(1−μ) [v − 2Reσ/(μ−1) · L (J + bL)^{-1} v]`,
    /// `b = (σ + μ conj(σ))/(μ − 1)`.
    pub fn shift_invert_c_inv(&self, mu: Complex64, v: &[Complex64]) -> Result<Vec<Complex64>> {
        Self::check_mu(mu)?;
        let w = self.cache.l_solve(self.shift_invert_c_inv_pole(mu), v)?;
        let inner = axpy(v, -self.two_re_sigma() / (mu - 1.0), &w);
        Ok(scaled(&inner, (1.0 - mu).inv()))
    }

    /// `(C_σ^{-1} − ξI)(C_σ^{-1} − μI)^{-1} v = v + (μ − ξ)(C_σ^{-1} − μI)^{-1} v`.
    pub fn apply_deflated(
        &self,
        mu: Complex64,
        xi: Complex64,
        v: &[Complex64],
    ) -> Result<Vec<Complex64>> {
        let u = self.shift_invert_c_inv(mu, v)?;
        Ok(axpy(v, mu - xi, &u))
    }
}
