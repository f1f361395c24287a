//! Desk-scale pencils with a planted, exactly known finite spectrum.
//!
//! The state matrix is a real block-diagonal core (2×2 rotation-scaling blocks
//! for conjugate pairs, 1×1 blocks for reals) conjugated by a product of sparse
//! elementary transforms. `J1` is then chosen so that `J1 − J2 J4^{-1} J3`
//! equals that core, and state/algebraic coordinates are interleaved by a
//! seeded shuffle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pencil::Pencil;
use crate::sparse::SparseMatrix;

/// The four right-half-plane eigenvalues of the reference power-system pencil.
pub const REFERENCE_UNSTABLE: [(f64, f64); 4] =
    [(0.1814, 4.8323), (0.1814, -4.8323), (0.0233, 0.0), (0.0004, 0.0)];

pub fn reference_unstable() -> Vec<Complex64> {
    REFERENCE_UNSTABLE
        .iter()
        .map(|&(re, im)| Complex64::new(re, im))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    /// Eigenvalues to plant; missing conjugates are added.
    pub planted: Vec<Complex64>,
    pub n_states: usize,
    pub m_algebraic: usize,
    /// Probability of an off-diagonal nonzero in `J4` (and in `J2`, `J3`
    /// unless `coupling_density` is set).
    pub density: f64,
    pub coupling_density: Option<f64>,
    pub seed: u64,
    /// Range of real parts of filler eigenvalues; both ends negative.
    pub fill_real: (f64, f64),
    /// Largest imaginary part of filler conjugate pairs.
    pub fill_imag_max: f64,
    /// Filler negative reals with large modulus (drawn from `[-250, -50]`).
    pub large_negative: usize,
}

impl PlantSpec {
    pub fn new(planted: Vec<Complex64>, n_states: usize, m_algebraic: usize, seed: u64) -> Self {
        Self {
            planted,
            n_states,
            m_algebraic,
            density: 0.05,
            coupling_density: None,
            seed,
            fill_real: (-3.0, -0.05),
            fill_imag_max: 15.0,
            large_negative: 3,
        }
    }

    /// 60 states, 40 algebraic variables, the four reference unstable
    /// eigenvalues and 56 stable fillers.
    pub fn power_system_like(seed: u64) -> Self {
        Self::new(reference_unstable(), 60, 40, seed)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.n_states == 0 {
            return bad("at least one state variable is required");
        }
        for d in std::iter::once(self.density).chain(self.coupling_density) {
            if !(d > 0.0 && d <= 1.0) && !(d == 0.0 && self.coupling_density == Some(d)) {
                return bad("density must lie in (0, 1]");
            }
        }
        let (lo, hi) = self.fill_real;
        if !(lo <= hi && hi < 0.0) {
            return bad("filler real parts must be negative");
        }
        if !(self.fill_imag_max > 0.0) {
            return bad("fill_imag_max must be positive");
        }
        Ok(())
    }
}

/// Adds missing conjugates, keeping input order.
pub fn conjugate_closure(values: &[Complex64]) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(values.len() * 2);
    for &z in values {
        if !out.contains(&z) {
            out.push(z);
        }
        if z.im != 0.0 && !out.contains(&z.conj()) {
            out.push(z.conj());
        }
    }
    out
}

/// Builds a pencil whose finite spectrum is exactly the returned list.
pub fn planted_pencil(spec: &PlantSpec) -> Result<(Pencil, Vec<Complex64>)> {
    spec.validate()?;
    let n = spec.n_states;
    let m = spec.m_algebraic;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let planted = conjugate_closure(&spec.planted);
    if planted.len() > n {
        return Err(Error::InvalidParameter(format!(
            "{} planted eigenvalues do not fit in {n} states",
            planted.len()
        )));
    }
    let spectrum = [planted.clone(), filler(spec, n - planted.len(), &mut rng)].concat();

    let mut core = block_core(&spectrum, n);
    mix_similarity(&mut core, 2 * n, &mut rng);

    let coupling = spec.coupling_density.unwrap_or(spec.density);
    let sparse_block = |rows: usize, cols: usize, p: f64, rng: &mut ChaCha8Rng| -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| {
            if p > 0.0 && rng.gen_bool(p) {
                rng.gen_range(-1.0..1.0)
            } else {
                0.0
            }
        })
    };
    let j2 = sparse_block(n, m, coupling, &mut rng);
    let j3 = sparse_block(m, n, coupling, &mut rng);
    let mut j4 = sparse_block(m, m, spec.density, &mut rng);
    for i in 0..m {
        j4[(i, i)] = 0.0;
        let off: f64 = j4.row(i).iter().map(|x: &f64| x.abs()).sum();
        j4[(i, i)] = off + 1.0 + rng.gen::<f64>();
    }
    let j1 = if m > 0 {
        let x = j4
            .clone()
            .lu()
            .solve(&j3)
            .ok_or_else(|| Error::Structural("generated J4 is singular".into()))?;
        &core + &j2 * x
    } else {
        core
    };

    let mut positions: Vec<usize> = (0..n + m).collect();
    positions.shuffle(&mut rng);
    let mut state_pos = positions[..n].to_vec();
    let mut alg_pos = positions[n..].to_vec();
    state_pos.sort_unstable();
    alg_pos.sort_unstable();

    let mut trip = Vec::new();
    let mut push = |rows: &[usize], cols: &[usize], b: &DMatrix<f64>| {
        for (i, &r) in rows.iter().enumerate() {
            for (k, &c) in cols.iter().enumerate() {
                if b[(i, k)] != 0.0 {
                    trip.push((r, c, b[(i, k)]));
                }
            }
        }
    };
    push(&state_pos, &state_pos, &j1);
    push(&state_pos, &alg_pos, &j2);
    push(&alg_pos, &state_pos, &j3);
    push(&alg_pos, &alg_pos, &j4);
    let j = SparseMatrix::from_triplets(&trip, n + m)?;
    let mut l_diag = vec![0.0; n + m];
    for &i in &state_pos {
        l_diag[i] = 1.0;
    }
    Ok((Pencil::new(j, l_diag)?, spectrum))
}

fn filler(spec: &PlantSpec, count: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(count);
    let (lo, hi) = spec.fill_real;
    let re = |rng: &mut ChaCha8Rng| if lo == hi { lo } else { rng.gen_range(lo..hi) };
    for _ in 0..spec.large_negative.min(count) {
        out.push(Complex64::new(rng.gen_range(-250.0..-50.0), 0.0));
    }
    while out.len() < count {
        if count - out.len() >= 2 && rng.gen_bool(0.7) {
            let z = Complex64::new(re(rng), rng.gen_range(0.1..spec.fill_imag_max));
            out.push(z);
            out.push(z.conj());
        } else {
            out.push(Complex64::new(re(rng), 0.0));
        }
    }
    out
}

fn block_core(spectrum: &[Complex64], n: usize) -> DMatrix<f64> {
    let mut core = DMatrix::zeros(n, n);
    let mut i = 0;
    let mut k = 0;
    while k < spectrum.len() {
        let z = spectrum[k];
        if z.im == 0.0 {
            core[(i, i)] = z.re;
            i += 1;
            k += 1;
        } else {
            // [[a, b], [-b, a]] has eigenvalues a ± bi
            core[(i, i)] = z.re;
            core[(i + 1, i + 1)] = z.re;
            core[(i, i + 1)] = z.im;
            core[(i + 1, i)] = -z.im;
            i += 2;
            k += 2;
        }
    }
    core
}

/// `A ← E A E^{-1}` for `steps` random `E = I + c e_i e_j^T`, `|c| ≤ 0.5`.
fn mix_similarity(a: &mut DMatrix<f64>, steps: usize, rng: &mut ChaCha8Rng) {
    let n = a.nrows();
    if n < 2 {
        return;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c: f64 = rng.gen_range(-0.5..0.5);
        for col in 0..n {
            let v = a[(j, col)];
            a[(i, col)] += c * v;
        }
        for row in 0..n {
            let v = a[(row, i)];
            a[(row, j)] -= c * v;
        }
    }
}
