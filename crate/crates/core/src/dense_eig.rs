//! Dense eigenvalue routines for small matrices.
//!
//! Real input goes through Householder reduction to Hessenberg form and the
//! Francis double-shift QR iteration, so complex eigenvalues come out in exact
//! conjugate pairs. Complex input (and any request for eigenvectors) goes
//! through a complex Schur decomposition with Wilkinson shifts; eigenvectors
//! are recovered from the triangular factor by back substitution.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type DenseMatrix<T> = DMatrix<T>;

/// QR sweeps allowed per unit of matrix order.
const SWEEPS_PER_ORDER: usize = 100;

#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<Complex64>,
    /// Unit 2-norm eigenvectors as columns, in the order of `values`.
    pub vectors: Option<DMatrix<Complex64>>,
}

/// Eigenvalues of a real square matrix, optionally with eigenvectors.
pub fn eigen(a: &DMatrix<f64>, vectors: bool) -> Result<Eigen> {
    check_square(a.nrows(), a.ncols())?;
    if vectors {
        return eigen_complex(&a.map(|x| Complex64::new(x, 0.0)), true);
    }
    Ok(Eigen {
        values: francis_eigenvalues(a)?,
        vectors: None,
    })
}

/// Eigenvalues (and optionally eigenvectors) of a complex square matrix.
pub fn eigen_complex(a: &DMatrix<Complex64>, vectors: bool) -> Result<Eigen> {
    check_square(a.nrows(), a.ncols())?;
    let (t, q) = complex_schur(a, vectors)?;
    let n = a.nrows();
    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let vectors = q.map(|q| schur_eigenvectors(&t, &q));
    Ok(Eigen { values, vectors })
}

fn check_square(r: usize, c: usize) -> Result<()> {
    if r != c {
        return Err(Error::DimensionMismatch { expected: r, got: c });
    }
    Ok(())
}

/// Ritz pairs of `B = G^{-1} H`, ordered by decreasing modulus
/// (ties: larger real part first, then larger imaginary part).
pub fn ritz_decompose(
    g: &DMatrix<Complex64>,
    h: &DMatrix<Complex64>,
) -> Result<(Vec<Complex64>, DMatrix<Complex64>)> {
    check_square(g.nrows(), g.ncols())?;
    if h.shape() != g.shape() {
        return Err(Error::DimensionMismatch {
            expected: g.nrows(),
            got: h.nrows(),
        });
    }
    let k = g.nrows();
    let scale = g.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let lu = g.clone().lu();
    let min_piv = (0..k)
        .map(|i| lu.u()[(i, i)].norm())
        .fold(f64::INFINITY, f64::min);
    if scale == 0.0 || min_piv <= 1e-12 * scale {
        return Err(Error::RankDeficientBasis);
    }
    let b = lu.solve(h).ok_or(Error::RankDeficientBasis)?;
    let eig = eigen_complex(&b, true)?;
    let vecs = eig.vectors.expect("vectors requested");
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&i, &j| ritz_order(eig.values[i], eig.values[j]));
    let values = idx.iter().map(|&i| eig.values[i]).collect();
    let vectors = DMatrix::from_fn(k, k, |r, c| vecs[(r, idx[c])]);
    Ok((values, vectors))
}

fn ritz_order(a: Complex64, b: Complex64) -> Ordering {
    let (ma, mb) = (a.norm(), b.norm());
    if (ma - mb).abs() > 1e-12 * ma.max(mb) {
        return mb.total_cmp(&ma);
    }
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

/// Greedy nearest matching of `found` against `expected`; returns the largest
/// `|found - expected| / (1 + |expected|)` over the matching, or `None` when
/// the multisets differ in size.
pub fn spectral_distance(found: &[Complex64], expected: &[Complex64]) -> Option<f64> {
    if found.len() != expected.len() {
        return None;
    }
    let mut used = vec![false; expected.len()];
    let mut worst: f64 = 0.0;
    for f in found {
        let (j, d) = expected
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, e)| (j, (f - e).norm() / (1.0 + e.norm())))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

pub fn spectra_match(found: &[Complex64], expected: &[Complex64], tol: f64) -> bool {
    spectral_distance(found, expected).is_some_and(|d| d <= tol)
}

fn francis_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    real_hessenberg(&mut h);

    // 1-based working copy keeps the classic index arithmetic readable.
    let mut m = vec![vec![0.0f64; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            m[i + 1][j + 1] = h[(i, j)];
        }
    }
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += m[i][j].abs();
        }
    }
    let max_sweeps = SWEEPS_PER_ORDER * n;
    let mut sweeps = 0usize;
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = m[l - 1][l - 1].abs() + m[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if m[l][l - 1].abs() + s == s {
                    m[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = m[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = m[nn - 1][nn - 1];
            let mut w = m[nn][nn - 1] * m[nn - 1][nn];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn -= 2;
                break;
            }
            sweeps += 1;
            if sweeps > max_sweeps {
                return Err(Error::NoConvergence { sweeps: max_sweeps });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += x;
                for i in 1..=nn {
                    m[i][i] -= x;
                }
                let s = m[nn][nn - 1].abs() + m[nn - 1][nn - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let (mut p, mut q, mut r, mut z);
            let mut mm = nn - 2;
            loop {
                z = m[mm][mm];
                r = x - z;
                let s0 = y - z;
                p = (r * s0 - w) / m[mm + 1][mm] + m[mm][mm + 1];
                q = m[mm + 1][mm + 1] - z - r - s0;
                r = m[mm + 2][mm + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if mm == l {
                    break;
                }
                let u = m[mm][mm - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (m[mm - 1][mm - 1].abs() + z.abs() + m[mm + 1][mm + 1].abs());
                if u + v == v {
                    break;
                }
                mm -= 1;
            }
            for i in (mm + 2)..=nn {
                m[i][i - 2] = 0.0;
                if i != mm + 2 {
                    m[i][i - 3] = 0.0;
                }
            }
            let mut k = mm;
            while k < nn {
                if k != mm {
                    p = m[k][k - 1];
                    q = m[k + 1][k - 1];
                    r = if k != nn - 1 { m[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == mm {
                        if l != mm {
                            m[k][k - 1] = -m[k][k - 1];
                        }
                    } else {
                        m[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = m[k][j] + q * m[k + 1][j];
                        if k != nn - 1 {
                            p += r * m[k + 2][j];
                            m[k + 2][j] -= p * z;
                        }
                        m[k + 1][j] -= p * y;
                        m[k][j] -= p * x;
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        p = x * m[i][k] + y * m[i][k + 1];
                        if k != nn - 1 {
                            p += z * m[i][k + 2];
                            m[i][k + 2] -= p * r;
                        }
                        m[i][k + 1] -= p * q;
                        m[i][k] -= p;
                    }
                }
                k += 1;
            }
            if l >= nn - 1 {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

fn real_hessenberg(h: &mut DMatrix<f64>) {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| h[(i, k)] * h[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = -norm.copysign(h[(k + 1, k)]);
        let mut v: Vec<f64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vnorm);
        for j in 0..n {
            let d: f64 = v.iter().enumerate().map(|(i, vi)| vi * h[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= 2.0 * vi * d;
            }
        }
        for i in 0..n {
            let d: f64 = v.iter().enumerate().map(|(j, vj)| h[(i, k + 1 + j)] * vj).sum();
            for (j, vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] -= 2.0 * d * vj;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
}

/// Returns `(T, Q)` with `A = Q T Q^H`, `T` upper triangular.
fn complex_schur(
    a: &DMatrix<Complex64>,
    want_q: bool,
) -> Result<(DMatrix<Complex64>, Option<DMatrix<Complex64>>)> {
    let n = a.nrows();
    let zero = Complex64::new(0.0, 0.0);
    let mut h = a.clone();
    let mut q = want_q.then(|| DMatrix::<Complex64>::identity(n, n));

    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vnorm);
        // H <- (I - 2 v v^H) H (I - 2 v v^H)
        for j in 0..n {
            let d: Complex64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= *vi * d * 2.0;
            }
        }
        let right = |m: &mut DMatrix<Complex64>| {
            for i in 0..n {
                let d: Complex64 = v.iter().enumerate().map(|(j, vj)| m[(i, k + 1 + j)] * vj).sum();
                for (j, vj) in v.iter().enumerate() {
                    m[(i, k + 1 + j)] -= d * vj.conj() * 2.0;
                }
            }
        };
        right(&mut h);
        if let Some(q) = q.as_mut() {
            right(q);
        }
        for i in k + 2..n {
            h[(i, k)] = zero;
        }
    }

    let anorm = h.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let max_sweeps = SWEEPS_PER_ORDER * n.max(1);
    let mut sweeps = 0;
    let mut hi = n.saturating_sub(1);
    let mut its = 0;
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == 0.0 {
                s = anorm;
            }
            if h[(l, l - 1)].norm() <= f64::EPSILON * s {
                h[(l, l - 1)] = zero;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        sweeps += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergence { sweeps: max_sweeps });
        }
        its += 1;
        let shift = if its % 10 == 0 {
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for k in l..=hi {
            h[(k, k)] -= shift;
        }
        rot.clear();
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rot.push((c, s));
            for j in k..n {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = l + idx;
            let apply = |m: &mut DMatrix<Complex64>, rows: usize| {
                for i in 0..rows {
                    let (x, y) = (m[(i, k)], m[(i, k + 1)]);
                    m[(i, k)] = x * c + s.conj() * y;
                    m[(i, k + 1)] = -s * x + y * c;
                }
            };
            apply(&mut h, (k + 2).min(hi + 1));
            if let Some(q) = q.as_mut() {
                apply(q, n);
            }
        }
        for k in l..=hi {
            h[(k, k)] += shift;
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = zero;
        }
    }
    Ok((h, q))
}

fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let r = a.norm().hypot(b.norm());
    if r == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if a.norm() == 0.0 {
        return (0.0, b.conj() / b.norm());
    }
    let c = a.norm() / r;
    let s = (a / a.norm()) * b.conj() / r;
    (c, s)
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let (l1, l2) = (tr_half + disc, tr_half - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn schur_eigenvectors(t: &DMatrix<Complex64>, q: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = t.nrows();
    let tnorm = t.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let small = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE);
    let mut v = DMatrix::<Complex64>::zeros(n, n);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        y.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        y[k] = Complex64::new(1.0, 0.0);
        let lam = t[(k, k)];
        for i in (0..k).rev() {
            let s: Complex64 = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
            let mut d = t[(i, i)] - lam;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            y[i] = -s / d;
        }
        let mut col: Vec<Complex64> = (0..n)
            .map(|r| (0..=k).map(|j| q[(r, j)] * y[j]).sum())
            .collect();
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        col.iter_mut().for_each(|z| *z /= norm);
        for (r, z) in col.into_iter().enumerate() {
            v[(r, k)] = z;
        }
    }
    v
}
