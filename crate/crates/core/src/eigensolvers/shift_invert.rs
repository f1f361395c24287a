use num_complex::Complex64;
use rayon::prelude::*;

use super::{
    initial_shifts, max_modulus_index, recover_lambda, residual_order, start_vectors, sup_norm,
    ConvergenceRecord, InitialVectors, IterationConfig, TrajectoryStatus,
};
use crate::error::{Error, Result};
use crate::mobius::CayleyOperator;
use crate::pencil::Pencil;

/// Perturbation applied once when an updated shift is exactly singular.
const RETRY_PERTURBATION: f64 = 1e-8;
/// Guard against the pole of the deflated shift update.
const DEFLATED_POLE_TOL: f64 = 1e-12;

/// Sup-normalizes each vector, then `p` times multiplies by `C_σ`, projects
/// onto the state space and sup-normalizes again.
pub fn precondition(
    op: &CayleyOperator,
    vectors: &[Vec<Complex64>],
    p: usize,
) -> Result<Vec<Vec<Complex64>>> {
    let pencil = op.pencil();
    vectors
        .iter()
        .map(|v| {
            let mut v = sup_normalized(v)?;
            for _ in 0..p {
                v = op.apply_c(&v)?;
                pencil.project_state_space(&mut v);
                v = sup_normalized(&v)?;
            }
            Ok(v)
        })
        .collect()
}

fn sup_normalized(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let s = sup_norm(v);
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter("zero or non-finite iteration vector".into()));
    }
    Ok(v.iter().map(|z| z / s).collect())
}

/// Preconditioned shift-invert iteration on `C_σ^{-1}` with shift updates,
/// one trajectory per initial shift. Trajectories run in parallel; records
/// come back in shift order.
pub fn algorithm_one(
    pencil: &Pencil,
    sigma: Complex64,
    cfg: &IterationConfig,
    initial_vectors: Option<Vec<Vec<Complex64>>>,
) -> Result<Vec<ConvergenceRecord>> {
    let op = CayleyOperator::new(pencil, sigma)?;
    algorithm_one_with(&op, cfg, initial_vectors)
}

/// As [`algorithm_one`], sharing the caller's operator and factorization cache.
pub fn algorithm_one_with(
    op: &CayleyOperator,
    cfg: &IterationConfig,
    initial_vectors: Option<Vec<Vec<Complex64>>>,
) -> Result<Vec<ConvergenceRecord>> {
    cfg.validate()?;
    let starts = Starts::new(op, cfg, initial_vectors)?;
    let shifts = initial_shifts(cfg);
    let run = |(k, &mu0): (usize, &Complex64)| -> ConvergenceRecord {
        match starts.get(op, cfg, k) {
            Ok(w0) => run_trajectory(op, cfg, k, mu0, w0, None),
            Err(e) => failed(op, k, mu0, None, e),
        }
    };
    if cfg.threads == 1 {
        return Ok(shifts.iter().enumerate().map(run).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(|| shifts.par_iter().enumerate().map(run).collect()))
}

/// Algorithm I for the first trajectory; every later trajectory iterates the
/// deflated operator `(C_σ^{-1} − ξI)(C_σ^{-1} − μI)^{-1}` with `ξ` the shift
/// of the most recent converged record.
pub fn algorithm_two(
    pencil: &Pencil,
    sigma: Complex64,
    cfg: &IterationConfig,
    initial_vectors: Option<Vec<Vec<Complex64>>>,
) -> Result<Vec<ConvergenceRecord>> {
    let op = CayleyOperator::new(pencil, sigma)?;
    algorithm_two_with(&op, cfg, initial_vectors)
}

pub fn algorithm_two_with(
    op: &CayleyOperator,
    cfg: &IterationConfig,
    initial_vectors: Option<Vec<Vec<Complex64>>>,
) -> Result<Vec<ConvergenceRecord>> {
    cfg.validate()?;
    let starts = Starts::new(op, cfg, initial_vectors)?;
    let mut records: Vec<ConvergenceRecord> = Vec::new();
    for (k, &mu0) in initial_shifts(cfg).iter().enumerate() {
        let xi = records.iter().rev().find(|r| r.converged()).map(|r| r.mu);
        let rec = match starts.get(op, cfg, k) {
            Ok(w0) => run_trajectory(op, cfg, k, mu0, w0, xi),
            Err(e) => failed(op, k, mu0, xi, e),
        };
        records.push(rec);
    }
    Ok(records)
}

/// Preconditioned start vectors: shared, or built per trajectory when random.
enum Starts {
    Shared(Vec<Vec<Complex64>>),
    PerTrajectory,
}

impl Starts {
    fn new(
        op: &CayleyOperator,
        cfg: &IterationConfig,
        given: Option<Vec<Vec<Complex64>>>,
    ) -> Result<Self> {
        let pencil = op.pencil();
        let v = match (given, cfg.init) {
            (Some(mut v), _) => {
                if v.len() != cfg.r {
                    return Err(Error::DimensionMismatch {
                        expected: cfg.r,
                        got: v.len(),
                    });
                }
                for x in &mut v {
                    pencil.check_len(x.len())?;
                    pencil.project_state_space(x);
                }
                v
            }
            (None, InitialVectors::Fourier) => start_vectors(pencil, cfg, 0)?,
            (None, InitialVectors::Random { .. }) => return Ok(Starts::PerTrajectory),
        };
        Ok(Starts::Shared(precondition(op, &v, cfg.p)?))
    }

    fn get(&self, op: &CayleyOperator, cfg: &IterationConfig, k: usize) -> Result<Vec<Vec<Complex64>>> {
        match self {
            Starts::Shared(v) => Ok(v.clone()),
            Starts::PerTrajectory => precondition(op, &start_vectors(op.pencil(), cfg, k)?, cfg.p),
        }
    }
}

fn failed(
    op: &CayleyOperator,
    k: usize,
    mu: Complex64,
    xi: Option<Complex64>,
    e: Error,
) -> ConvergenceRecord {
    ConvergenceRecord {
        lambda: recover_lambda(mu, op.sigma()),
        mu,
        sigma: op.sigma(),
        iterations: 0,
        lu_count: 0,
        residual_order: None,
        shift_index: k,
        xi,
        status: TrajectoryStatus::Failed,
        message: Some(e.to_string()),
    }
}

/// New shift from the normalizer `α_q`: `μ + 1/α` undeflated, and
/// `(μα − ξ)/(α − 1)` when deflating `ξ`. `None` at the pole of the latter.
fn updated_shift(mu: Complex64, alpha: Complex64, xi: Option<Complex64>) -> Option<Complex64> {
    match xi {
        None => Some(mu + alpha.inv()),
        Some(xi) => {
            if (alpha - 1.0).norm() < DEFLATED_POLE_TOL {
                None
            } else {
                Some((mu * alpha - xi) / (alpha - 1.0))
            }
        }
    }
}

fn run_trajectory(
    op: &CayleyOperator,
    cfg: &IterationConfig,
    k: usize,
    mu0: Complex64,
    mut w: Vec<Vec<Complex64>>,
    xi: Option<Complex64>,
) -> ConvergenceRecord {
    let pencil = op.pencil();
    let mut mu = mu0;
    let mut poles: Vec<Complex64> = Vec::new();
    let mut retried = false;
    let mut q = 0;
    let mut j = 0;

    let finish = |status: TrajectoryStatus,
                  mu: Complex64,
                  j: usize,
                  lu: usize,
                  x: &[Complex64],
                  message: Option<String>| ConvergenceRecord {
        lambda: recover_lambda(mu, op.sigma()),
        mu,
        sigma: op.sigma(),
        iterations: j,
        lu_count: lu,
        residual_order: residual_order(op, mu, x).ok(),
        shift_index: k,
        xi,
        status,
        message,
    };

    while j < cfg.max_iter {
        j += 1;
        let applied: Result<Vec<Vec<Complex64>>> = w
            .iter()
            .map(|wi| match xi {
                None => op.shift_invert_c_inv(mu, wi),
                Some(xi) => op.apply_deflated(mu, xi, wi),
            })
            .collect();
        let us = match applied {
            Ok(us) => us,
            Err(Error::SingularShift { .. }) if !retried => {
                retried = true;
                mu += Complex64::new(RETRY_PERTURBATION, RETRY_PERTURBATION);
                j -= 1;
                continue;
            }
            Err(e @ Error::DegenerateShift { .. }) => {
                return finish(TrajectoryStatus::Degenerate, mu, j - 1, poles.len(), &w[q], Some(e.to_string()));
            }
            Err(e) => {
                return finish(TrajectoryStatus::Failed, mu, j - 1, poles.len(), &w[q], Some(e.to_string()));
            }
        };
        let pole = op.shift_invert_c_inv_pole(mu);
        if !poles.contains(&pole) {
            poles.push(pole);
        }

        let mut alphas = Vec::with_capacity(w.len());
        let mut diffs = Vec::with_capacity(w.len());
        for (wi, mut u) in w.iter_mut().zip(us) {
            pencil.project_state_space(&mut u);
            let idx = max_modulus_index(&u);
            let alpha = u[idx];
            if alpha.norm() == 0.0 || !alpha.norm().is_finite() {
                let msg = "iteration vector vanished".to_string();
                return finish(TrajectoryStatus::Failed, mu, j, poles.len(), wi, Some(msg));
            }
            let inv = alpha.inv();
            for z in u.iter_mut() {
                *z *= inv;
            }
            u[idx] = Complex64::new(1.0, 0.0);
            diffs.push(u.iter().zip(wi.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm())));
            alphas.push(alpha);
            *wi = u;
        }
        // first minimum wins
        q = (0..diffs.len()).fold(0, |b, i| if diffs[i] < diffs[b] { i } else { b });

        let converged = diffs[q] < cfg.tol;
        if converged || j % cfg.t == 0 {
            match updated_shift(mu, alphas[q], xi) {
                Some(m) => mu = m,
                None => {
                    let msg = "normalizer at the pole of the deflated update".to_string();
                    return finish(TrajectoryStatus::Stagnated, mu, j, poles.len(), &w[q], Some(msg));
                }
            }
        }
        if converged {
            return finish(TrajectoryStatus::Converged, mu, j, poles.len(), &w[q], None);
        }
    }
    finish(TrajectoryStatus::Stagnated, mu, j, poles.len(), &w[q], None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::Extended;
    use crate::sparse::SparseMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag_pencil() -> Pencil {
        let j = SparseMatrix::from_triplets(&[(0, 0, 2.0), (1, 1, 1.0)], 2).unwrap();
        Pencil::new(j, vec![1.0, 0.0]).unwrap()
    }

    /// J = diag(2, -0.5, 3, 5), L = diag(1, 1, 1, 0).
    fn diag3_pencil() -> Pencil {
        let j = SparseMatrix::from_triplets(&[(0, 0, 2.0), (1, 1, -0.5), (2, 2, 3.0), (3, 3, 5.0)], 4)
            .unwrap();
        Pencil::new(j, vec![1.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn single(mu0: Complex64) -> IterationConfig {
        IterationConfig {
            r: 1,
            s: 1,
            initial_shifts: Some(vec![mu0]),
            threads: 1,
            ..Default::default()
        }
    }

    #[test]
    fn precondition_fixed_point_and_p_zero() {
        let p = diag_pencil();
        let op = CayleyOperator::new(&p, c(1.0, 0.0)).unwrap();
        let v = vec![vec![c(1.0, 0.0), c(0.0, 0.0)]];
        assert_eq!(precondition(&op, &v, 3).unwrap(), v);
        let v = vec![vec![c(4.0, 0.0), c(0.0, 0.0)]];
        assert_eq!(precondition(&op, &v, 0).unwrap()[0], vec![c(1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn diag_pencil_converges_to_two() {
        let p = diag_pencil();
        let recs = algorithm_one(&p, c(1.0, 0.0), &single(c(0.25, 0.25)), None).unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert!(r.converged());
        let lam = r.lambda.finite().unwrap();
        assert!((lam - 2.0).norm() < 1e-10, "{lam}");
        assert!(r.residual_order.unwrap() <= -8);
        assert!((r.mu - 1.0 / 3.0).norm() < 1e-12);
    }

    #[test]
    fn shift_update_is_exact_on_an_eigenvector() {
        // C^{-1} = diag(1/3, -3, 1/2) on the state space when σ = 1
        let p = diag3_pencil();
        let op = CayleyOperator::new(&p, c(1.0, 0.0)).unwrap();
        let mu = c(0.1, 0.2);
        let w = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let u = op.shift_invert_c_inv(mu, &w).unwrap();
        let alpha = u[1];
        let nu = c(-3.0, 0.0);
        assert!((alpha - (nu - mu).inv()).norm() < 1e-12);
        assert!((updated_shift(mu, alpha, None).unwrap() - nu).norm() < 1e-12);
    }

    #[test]
    fn deflated_update_is_exact_on_an_eigenvector() {
        let p = diag3_pencil();
        let op = CayleyOperator::new(&p, c(1.0, 0.0)).unwrap();
        let (mu, xi, nu) = (c(0.1, 0.2), c(1.0 / 3.0, 0.0), c(0.5, 0.0));
        let w = vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let u = op.apply_deflated(mu, xi, &w).unwrap();
        let alpha = u[2];
        assert!((alpha - (nu - xi) / (nu - mu)).norm() < 1e-12);
        assert!((updated_shift(mu, alpha, Some(xi)).unwrap() - nu).norm() < 1e-12);
        assert_eq!(updated_shift(mu, c(1.0, 0.0), Some(xi)), None);
    }

    #[test]
    fn deflation_annihilates_the_known_eigenvector() {
        let p = diag_pencil();
        let op = CayleyOperator::new(&p, c(1.0, 0.0)).unwrap();
        let xi = c(1.0 / 3.0, 0.0);
        let mut v = vec![c(1.0, 0.0), c(0.0, 0.0)];
        for _ in 0..3 {
            let before = v.iter().map(|z| z.norm()).sum::<f64>();
            v = op.apply_deflated(c(0.2, 0.1), xi, &v).unwrap();
            let after = v.iter().map(|z| z.norm()).sum::<f64>();
            assert!(after <= before / 10.0);
        }
    }

    #[test]
    fn spurious_xi_behaves_like_algorithm_one() {
        let p = diag3_pencil();
        let cfg = IterationConfig {
            r: 2,
            initial_shifts: Some(vec![c(0.2, 0.3)]),
            threads: 1,
            ..Default::default()
        };
        let op = CayleyOperator::new(&p, c(1.0, 0.0)).unwrap();
        let w0 = precondition(&op, &start_vectors(&p, &cfg, 0).unwrap(), 0).unwrap();
        let plain = run_trajectory(&op, &cfg, 0, c(0.2, 0.3), w0.clone(), None);
        let far = run_trajectory(&op, &cfg, 0, c(0.2, 0.3), w0, Some(c(-40.0, 25.0)));
        assert!(plain.converged() && far.converged());
        let (a, b) = (plain.lambda.finite().unwrap(), far.lambda.finite().unwrap());
        assert!((a - b).norm() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn vectors_stay_in_the_state_space() {
        let p = diag3_pencil();
        let cfg = IterationConfig {
            r: 2,
            s: 3,
            p: 2,
            threads: 1,
            max_iter: 3,
            ..Default::default()
        };
        let op = CayleyOperator::new(&p, c(1.0, 0.0)).unwrap();
        let w = precondition(&op, &start_vectors(&p, &cfg, 0).unwrap(), 2).unwrap();
        for v in &w {
            assert_eq!(v[3], c(0.0, 0.0));
        }
        let mut mu = c(0.2, 0.2);
        let mut w = w;
        for _ in 0..3 {
            for v in w.iter_mut() {
                let mut u = op.shift_invert_c_inv(mu, v).unwrap();
                p.project_state_space(&mut u);
                assert_eq!(u[3], c(0.0, 0.0));
                *v = u;
            }
            mu += c(0.01, 0.0);
        }
    }

    #[test]
    fn lu_count_matches_cache() {
        let p = diag3_pencil();
        let cfg = IterationConfig {
            r: 2,
            s: 4,
            p: 1,
            t: 2,
            threads: 1,
            ..Default::default()
        };
        let op = CayleyOperator::new(&p, c(1.0, 0.0)).unwrap();
        let recs = algorithm_one_with(&op, &cfg, None).unwrap();
        let total: usize = recs.iter().map(|r| r.lu_count).sum();
        // σ for preconditioning and −conj(σ) for the residual check
        assert_eq!(op.cache().stats().factorizations, total + 2);
        for r in &recs {
            assert!(r.converged());
            assert_eq!(r.lu_count, 1 + (r.iterations - 1) / cfg.t);
        }
    }

    #[test]
    fn conjugate_shifts_give_conjugate_eigenvalues() {
        let p = crate::synth::planted_pencil(&crate::synth::PlantSpec::new(
            vec![c(0.3, 2.0), c(0.1, 0.0)],
            12,
            6,
            5,
        ))
        .unwrap()
        .0;
        let cfg = IterationConfig {
            threads: 1,
            ..Default::default()
        };
        let conj_cfg = IterationConfig {
            initial_shifts: Some(initial_shifts(&cfg).iter().map(|z| z.conj()).collect()),
            ..cfg.clone()
        };
        let a = algorithm_one(&p, c(2.0, 0.0), &cfg, None).unwrap();
        // Fourier vectors are conjugated by reversing k, so start from conj(F)
        let conj_start: Vec<Vec<Complex64>> = start_vectors(&p, &cfg, 0)
            .unwrap()
            .iter()
            .map(|v| v.iter().map(|z| z.conj()).collect())
            .collect();
        let b = algorithm_one(&p, c(2.0, 0.0), &conj_cfg, Some(conj_start)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.status, y.status);
            if let (Extended::Finite(l1), Extended::Finite(l2)) = (x.lambda, y.lambda) {
                if x.converged() {
                    assert!((l1.conj() - l2).norm() < 1e-9, "{l1} vs {l2}");
                }
            }
        }
    }

    #[test]
    fn algorithm_two_records_xi() {
        let p = diag3_pencil();
        let cfg = IterationConfig {
            r: 2,
            s: 3,
            threads: 1,
            ..Default::default()
        };
        let recs = algorithm_two(&p, c(1.0, 0.0), &cfg, None).unwrap();
        assert_eq!(recs[0].xi, None);
        for k in 1..recs.len() {
            let prev = recs[..k].iter().rev().find(|r| r.converged()).map(|r| r.mu);
            assert_eq!(recs[k].xi, prev);
            if let (true, Some(xi)) = (recs[k].converged(), prev) {
                assert!(!cfg.same_eigenvalue(recs[k].mu, xi));
            }
        }
    }

    #[test]
    fn thread_count_does_not_change_records() {
        let p = crate::synth::planted_pencil(&crate::synth::PlantSpec::new(vec![c(0.2, 1.0)], 10, 5, 9))
            .unwrap()
            .0;
        let one = IterationConfig {
            threads: 1,
            ..Default::default()
        };
        let four = IterationConfig {
            threads: 4,
            ..Default::default()
        };
        let a = algorithm_one(&p, c(1.0, 0.0), &one, None).unwrap();
        let b = algorithm_one(&p, c(1.0, 0.0), &four, None).unwrap();
        assert_eq!(a, b);
    }
}
