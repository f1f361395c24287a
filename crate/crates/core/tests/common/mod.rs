#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use pencil_eig::synth::{planted_pencil, PlantSpec};
use pencil_eig::{Pencil, SparseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| random_complex(rng)).collect()
}

pub fn dense(a: &SparseMatrix<f64>) -> DMatrix<Complex64> {
    let n = a.order();
    let mut d = DMatrix::zeros(n, n);
    for (r, col, v) in a.triplets() {
        d[(r, col)] = c(v, 0.0);
    }
    d
}

pub fn dense_c64(a: &SparseMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.order();
    let mut d = DMatrix::zeros(n, n);
    for (r, col, v) in a.triplets() {
        d[(r, col)] = v;
    }
    d
}

pub fn dense_l(p: &Pencil) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        p.order(),
        p.l_diag().iter().map(|&d| c(d, 0.0)),
    ))
}

/// `k (J + conj(β) L)(J − αL)^{-1}`.
pub fn dense_c(p: &Pencil, k: Complex64, alpha: Complex64, beta: Complex64) -> DMatrix<Complex64> {
    let j = dense(p.jacobian());
    let l = dense_l(p);
    let inv = (&j - &l * alpha).try_inverse().expect("J - αL invertible");
    (&j + &l * beta.conj()) * inv * k
}

/// `k (J − αL)^{-1}(J + conj(β) L)`.
pub fn dense_d(p: &Pencil, k: Complex64, alpha: Complex64, beta: Complex64) -> DMatrix<Complex64> {
    let j = dense(p.jacobian());
    let l = dense_l(p);
    let inv = (&j - &l * alpha).try_inverse().expect("J - αL invertible");
    inv * (&j + &l * beta.conj()) * k
}

pub fn matvec(a: &DMatrix<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    (a * nalgebra::DVector::from_column_slice(v)).iter().copied().collect()
}

pub fn sup(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

pub fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Small planted pencil with `n` states and `m` algebraic variables.
pub fn small_planted(seed: u64, n: usize, m: usize) -> (Pencil, Vec<Complex64>) {
    let mut spec = PlantSpec::new(vec![c(0.3, 1.7), c(0.05, 0.0)], n, m, seed);
    spec.density = 0.2;
    spec.large_negative = 1;
    planted_pencil(&spec).expect("valid plant")
}

/// Random pencils with upper block-triangular structure under a symmetric
/// permutation. Integer entries and `d_i` in {1, 2, 1/2} make every
/// eigenvalue `J_ii / d_i` exactly representable.
pub fn exact_pencil(seed: u64) -> (Pencil, Vec<f64>) {
    let mut g = rng(seed);
    let (n, m) = (5 + (seed as usize % 4), 3 + (seed as usize % 3));
    let order = n + m;
    let mut perm: Vec<usize> = (0..order).collect();
    for i in (1..order).rev() {
        perm.swap(i, g.gen_range(0..=i));
    }
    let mut trip = Vec::new();
    let mut l = vec![0.0; order];
    let mut exact = Vec::new();
    for i in 0..order {
        let diag = if i < n {
            let d = [1.0, 2.0, 0.5][g.gen_range(0..3)];
            let v = g.gen_range(-9..=9) as f64;
            l[perm[i]] = d;
            exact.push(v / d);
            v
        } else {
            [3.0, -2.0, 4.0, -1.0][g.gen_range(0..4)]
        };
        trip.push((perm[i], perm[i], diag));
        for j in i + 1..order {
            if g.gen_bool(0.5) {
                trip.push((perm[i], perm[j], g.gen_range(-5..=5) as f64));
            }
        }
    }
    let j = SparseMatrix::from_triplets(&trip, order).unwrap();
    (Pencil::new(j, l).unwrap(), exact)
}


/// Random sparse complex matrix, diagonally boosted so it is nonsingular.
pub fn random_sparse_complex(rng: &mut ChaCha8Rng, n: usize, density: f64) -> SparseMatrix<Complex64> {
    let mut trip = Vec::new();
    for r in 0..n {
        for col in 0..n {
            if r != col && rng.gen_bool(density) {
                trip.push((r, col, random_complex(rng)));
            }
        }
        trip.push((r, r, random_complex(rng) + c(2.0 + n as f64 * density, 0.0)));
    }
    SparseMatrix::from_triplets(&trip, n).unwrap()
}

pub fn random_sparse_real(rng: &mut ChaCha8Rng, n: usize, density: f64) -> SparseMatrix<f64> {
    let mut trip = Vec::new();
    for r in 0..n {
        for col in 0..n {
            if rng.gen_bool(density) {
                trip.push((r, col, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    SparseMatrix::from_triplets(&trip, n).unwrap()
}

/// Planted pencil of order at most 40 with random shape, for spectrum checks.
pub fn random_small_planted(seed: u64) -> (Pencil, Vec<Complex64>) {
    let mut g = rng(seed ^ 0x5eed);
    let n = g.gen_range(6..=24);
    let m = g.gen_range(3..=(40 - n).min(15));
    small_planted(seed, n, m)
}

/// Random Möbius parameters with the pole kept off the left half-plane fillers.
pub fn random_params(g: &mut ChaCha8Rng) -> pencil_eig::MobiusParams {
    let k = c(g.gen_range(0.5..2.0), g.gen_range(-1.0..1.0));
    let alpha = c(g.gen_range(0.5..5.0), g.gen_range(-5.0..5.0));
    let beta = c(g.gen_range(0.5..5.0), g.gen_range(-5.0..5.0));
    pencil_eig::MobiusParams::new(k, alpha, beta).unwrap()
}

/// Worst relative mismatch between the dense spectrum of `C_{k,α,β}` and the
/// mapped pencil spectrum plus `k` repeated `m` times.
pub fn spectrum_correspondence_error(seed: u64) -> f64 {
    let (p, _) = random_small_planted(seed);
    let mut g = rng(seed);
    let params = random_params(&mut g);
    let lam = pencil_eig::dense_eig::eigen(&p.dense_state_matrix().unwrap(), false)
        .unwrap()
        .values;
    let mut expected: Vec<Complex64> = lam
        .iter()
        .map(|&l| params.map(l.into()).finite().expect("pole off the spectrum"))
        .collect();
    expected.extend(std::iter::repeat(params.k()).take(p.n_algebraic()));
    let cd = dense_c(&p, params.k(), params.alpha(), params.beta());
    let found = pencil_eig::dense_eig::eigen_complex(&cd, false).unwrap().values;
    pencil_eig::dense_eig::spectral_distance(&found, &expected).expect("sizes agree")
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OperatorErrors {
    pub shift_invert_c: f64,
    pub shift_invert_c_inv: f64,
    pub deflated: f64,
    /// Every application cost exactly one solve.
    pub one_solve_each: bool,
}

/// Residual and composition oracles for the shifted Cayley operators on one
/// random (pencil, μ, v) triple.
pub fn operator_errors(seed: u64) -> OperatorErrors {
    let (p, _) = random_small_planted(seed);
    let mut g = rng(seed.wrapping_mul(31) + 1);
    let sigma = c(g.gen_range(0.5..6.0), 0.0);
    let op = pencil_eig::CayleyOperator::new(&p, sigma).unwrap();
    let mu = c(g.gen_range(-3.0..3.0), g.gen_range(-3.0..3.0));
    let xi = c(g.gen_range(-3.0..3.0), g.gen_range(-3.0..3.0));
    let mut v = random_vector(&mut g, p.order());
    p.project_state_space(&mut v);
    let scale = sup(&v);

    let mut one_solve_each = true;
    let mut counted = |f: &dyn Fn() -> Vec<Complex64>| {
        let before = op.cache().stats().solves;
        let out = f();
        one_solve_each &= op.cache().stats().solves == before + 1;
        out
    };
    let x = counted(&|| op.shift_invert_c(mu, &v).unwrap());
    let y = counted(&|| op.shift_invert_c_inv(mu, &v).unwrap());
    let z = counted(&|| op.apply_deflated(mu, xi, &v).unwrap());

    let cx = op.apply_c(&x).unwrap();
    let r1: Vec<Complex64> = cx.iter().zip(&x).map(|(a, b)| a - mu * b).collect();
    let cy = op.apply_c_inv(&y).unwrap();
    let r2: Vec<Complex64> = cy.iter().zip(&y).map(|(a, b)| a - mu * b).collect();
    let composed: Vec<Complex64> = cy.iter().zip(&y).map(|(a, b)| a - xi * b).collect();
    OperatorErrors {
        shift_invert_c: sup_diff(&r1, &v) / scale,
        shift_invert_c_inv: sup_diff(&r2, &v) / scale,
        deflated: sup_diff(&z, &composed) / sup(&composed).max(scale),
        one_solve_each,
    }
}

/// The 60 + 40 reference pencil.
pub fn reference_pencil(seed: u64) -> (Pencil, Vec<Complex64>) {
    planted_pencil(&PlantSpec::power_system_like(seed)).expect("reference plant")
}

pub const REFERENCE_SIGMA: f64 = 4.8334;

/// Length of the orthogonal projection of the unit vector along `v` onto the
/// span of the eigenvectors of dense `C_σ` whose eigenvalues have the largest
/// modulus (a conjugate pair for real `σ`).
pub fn dominant_projection(p: &Pencil, sigma: f64, v: &[Complex64]) -> f64 {
    let cs = dense_c(p, c(1.0, 0.0), c(sigma, 0.0), c(sigma, 0.0));
    let eig = pencil_eig::dense_eig::eigen_complex(&cs, true).unwrap();
    let vecs = eig.vectors.unwrap();
    let top = eig.values.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let cols: Vec<_> = (0..eig.values.len())
        .filter(|&i| eig.values[i].norm() >= top * (1.0 - 1e-9))
        .map(|i| vecs.column(i).into_owned())
        .collect();
    let basis = DMatrix::from_columns(&cols).qr().q();
    let x = nalgebra::DVector::from_column_slice(v);
    (basis.adjoint() * &x).norm() / x.norm()
}

/// Factorization at every (snapped) oracle eigenvalue of [`exact_pencil`]
/// reports `SingularShift`, and succeeds at 50 random points away from it.
pub fn singular_detection_matches_oracle(seed: u64) -> Result<(), String> {
    let (p, exact) = exact_pencil(seed);
    let oracle = pencil_eig::dense_eig::eigen(&p.dense_state_matrix().unwrap(), false)
        .unwrap()
        .values;
    if oracle.len() != exact.len() {
        return Err(format!("seed {seed}: oracle size {}", oracle.len()));
    }
    for &lam in &oracle {
        let snapped = exact
            .iter()
            .copied()
            .find(|&e| (lam - e).norm() <= 1e-8 * (1.0 + e.abs()))
            .ok_or_else(|| format!("seed {seed}: oracle value {lam} not in {exact:?}"))?;
        if !matches!(
            p.factorize_shifted(c(snapped, 0.0)),
            Err(pencil_eig::Error::SingularShift { .. })
        ) {
            return Err(format!("seed {seed}: eigenvalue {snapped} not detected"));
        }
    }
    let mut g = rng(900 + seed);
    let mut tried = 0;
    while tried < 50 {
        let a = c(g.gen_range(-10.0..10.0), g.gen_range(-10.0..10.0));
        if oracle.iter().any(|l| (l - a).norm() < 1e-3) {
            continue;
        }
        tried += 1;
        if p.factorize_shifted(a).is_err() {
            return Err(format!("seed {seed}: non-eigenvalue {a} flagged"));
        }
    }
    Ok(())
}
