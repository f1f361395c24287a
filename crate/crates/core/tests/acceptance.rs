//! Acceptance criteria AC1 to AC9, one PASS/FAIL line each.

mod common;

use std::time::{Duration, Instant};

use common::{c, reference_pencil, rng, REFERENCE_SIGMA};
use num_complex::Complex64;
use pencil_eig::eigensolvers::{algorithm_one, algorithm_two, subspace_iteration, InitialVectors};
use pencil_eig::mobius::{cayley_map, optimal_sigma};
use pencil_eig::synth::reference_unstable;
use pencil_eig::{Algorithm, ConvergenceRecord, IterationConfig, SpectrumReport, SubspaceConfig};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let t0 = Instant::now();
    let mut o = f();
    let took = t0.elapsed();
    o.detail = format!("{} [{:.2?}]", o.detail, took);
    if let Some(b) = budget {
        if took >= b {
            o.pass = false;
            o.detail = format!("{} over budget {b:?}", o.detail);
        }
    }
    o
}

fn reference_config(p: usize) -> IterationConfig {
    IterationConfig {
        p,
        ..IterationConfig::default()
    }
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-6 * (1.0 + b.norm())
}

/// Converged record for `target` or, the pencil being real, its conjugate.
fn found<'a>(recs: &'a [ConvergenceRecord], target: Complex64) -> Option<&'a ConvergenceRecord> {
    recs.iter().filter(|r| r.converged()).find(|r| {
        let z = r.lambda.finite().unwrap();
        close(z, target) || close(z.conj(), target)
    })
}

fn ac1() -> Outcome {
    let worst = (0..20).map(common::spectrum_correspondence_error).fold(0.0, f64::max);
    outcome(worst <= 1e-8, format!("20 pencils, worst relative mismatch {worst:.1e}"))
}

fn ac2() -> Outcome {
    let mut worst = [0.0f64; 3];
    let mut one_solve = true;
    for seed in 0..100 {
        let e = common::operator_errors(seed);
        worst[0] = worst[0].max(e.shift_invert_c);
        worst[1] = worst[1].max(e.shift_invert_c_inv);
        worst[2] = worst[2].max(e.deflated);
        one_solve &= e.one_solve_each;
    }
    outcome(
        worst.iter().all(|&w| w <= 1e-9) && one_solve,
        format!(
            "100 triples, worst (C-μ)^-1 {:.1e}, (C^-1-μ)^-1 {:.1e}, deflated {:.1e}, one solve each: {one_solve}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn ac3() -> Outcome {
    let mut g = rng(3);
    let mut bad = 0;
    for k in 0..1000 {
        let sigma = c(g.gen_range(1e-3..50.0), 0.0);
        let re = match k % 3 {
            0 => 0.0,
            1 => g.gen_range(1e-6..50.0),
            _ => -g.gen_range(1e-6..50.0),
        };
        let s = c(re, g.gen_range(-50.0..50.0));
        let m = cayley_map(sigma, s).finite().map(|z| z.norm()).unwrap_or(f64::INFINITY);
        let ok = if s.re > 0.0 {
            m > 1.0
        } else if s.re < 0.0 {
            m < 1.0
        } else {
            (m - 1.0).abs() <= 1e-12
        };
        bad += usize::from(!ok);
    }
    outcome(bad == 0, format!("1000 samples, {bad} violations"))
}

fn ac4() -> Outcome {
    let (p, _) = reference_pencil(1);
    let sigma = c(REFERENCE_SIGMA, 0.0);
    let run = |pre| algorithm_one(&p, sigma, &reference_config(pre), None).unwrap();
    let with = run(40);
    let mut missing = Vec::new();
    let mut inaccurate = Vec::new();
    for target in reference_unstable() {
        match found(&with, target) {
            None => missing.push(target),
            Some(r) if r.residual_order.is_none_or(|o| o > -6) => inaccurate.push(target),
            Some(_) => {}
        }
    }
    let without = run(0);
    let any_unstable = reference_unstable().iter().any(|&t| found(&without, t).is_some());
    let fmt = |v: &[Complex64]| v.iter().map(|z| format!("{z:.4}")).collect::<Vec<_>>().join(", ");
    outcome(
        missing.is_empty() && inaccurate.is_empty() && any_unstable,
        format!(
            "p=40 missing [{}], inaccurate [{}]; p=0 finds an unstable value: {any_unstable}",
            fmt(&missing),
            fmt(&inaccurate)
        ),
    )
}

fn ac5() -> Outcome {
    let cfg = reference_config(40);
    let pair = reference_unstable()[0];
    let mut returned = 0;
    let mut seeds_with_new = 0;
    let mut seeds_with_xi = 0;
    for seed in 1..=5 {
        let (p, _) = reference_pencil(seed);
        let recs = algorithm_two(&p, c(REFERENCE_SIGMA, 0.0), &cfg, None).unwrap();
        let Some(xi) = recs
            .iter()
            .find(|r| r.converged() && close(r.lambda.finite().unwrap(), pair))
            .map(|r| r.mu)
        else {
            continue;
        };
        seeds_with_xi += 1;
        let deflated: Vec<_> = recs.iter().filter(|r| r.converged() && r.xi == Some(xi)).collect();
        returned += deflated.iter().filter(|r| cfg.same_eigenvalue(r.mu, xi)).count();
        let other = deflated.iter().any(|r| {
            let z = r.lambda.finite().unwrap();
            z.re > 0.0 && !close(z, pair)
        });
        seeds_with_new += usize::from(other);
    }
    outcome(
        seeds_with_xi == 5 && returned == 0 && seeds_with_new == 5,
        format!(
            "ξ reached on {seeds_with_xi}/5 seeds, returns to ξ: {returned}, \
             another unstable value after ξ on {seeds_with_new}/5"
        ),
    )
}

fn ac6() -> Outcome {
    let (p, planted) = reference_pencil(1);
    let a = c(0.0, 4.0);
    let recs = subspace_iteration(&p, a, &SubspaceConfig::default()).unwrap();
    let target = planted
        .iter()
        .copied()
        .min_by(|x, y| (x - a).norm().total_cmp(&(y - a).norm()))
        .unwrap();
    let hit = recs
        .iter()
        .filter(|r| r.converged())
        .find(|r| close(r.lambda.finite().unwrap(), target));
    match hit {
        Some(r) => {
            let err = (r.lambda.finite().unwrap() - target).norm();
            let order = r.residual_order.unwrap_or(i32::MAX);
            outcome(order <= -4, format!("{target:.4} found, error {err:.1e}, residual 1e{order}"))
        }
        None => outcome(false, format!("{target:.4} not found")),
    }
}

/// `σ = |λ|` maximizes `|c_σ(λ)|` for `Re λ > 0`; for `Re λ < 0` the same
/// point is the minimizer, which is checked on mirrored samples.
fn ac7() -> Outcome {
    let mut g = rng(7);
    let mut bad = 0;
    for _ in 0..50 {
        let sign = if g.gen_bool(0.5) { 1.0 } else { -1.0 };
        let lam = c(g.gen_range(0.01..10.0), sign * g.gen_range(0.05..10.0));
        let r = lam.norm();
        let n = 400;
        let step = 4.0 * r / n as f64;
        let grid = || (1..=n).map(|i| i as f64 * step);
        let modulus = |z: Complex64, s: f64| cayley_map(c(s, 0.0), z).finite().unwrap().norm();
        let best = grid().max_by(|&x, &y| modulus(lam, x).total_cmp(&modulus(lam, y))).unwrap();
        let mirrored = c(-lam.re, lam.im);
        let worst = grid()
            .min_by(|&x, &y| modulus(mirrored, x).total_cmp(&modulus(mirrored, y)))
            .unwrap();
        let ok = (best - r).abs() <= step && (worst - r).abs() <= step && optimal_sigma(lam).unwrap() == r;
        bad += usize::from(!ok);
    }
    outcome(bad == 0, format!("50 values, {bad} extremum off by more than a grid step"))
}

fn ac8() -> Outcome {
    let errs: Vec<String> = (0..20)
        .filter_map(|s| common::singular_detection_matches_oracle(s).err())
        .collect();
    outcome(errs.is_empty(), format!("20 pencils, {}", if errs.is_empty() { "all agree".into() } else { errs.join("; ") }))
}

fn ac9() -> Outcome {
    let (p, _) = reference_pencil(1);
    let sigma = c(REFERENCE_SIGMA, 0.0);
    let json = |threads: usize, init: InitialVectors, two: bool| {
        let cfg = IterationConfig {
            threads,
            init,
            ..reference_config(40)
        };
        let (alg, recs) = if two {
            (Algorithm::Two, algorithm_two(&p, sigma, &cfg, None).unwrap())
        } else {
            (Algorithm::One, algorithm_one(&p, sigma, &cfg, None).unwrap())
        };
        SpectrumReport::new(alg, sigma, recs).to_json().unwrap()
    };
    let mut same = 0;
    let cases = [
        (InitialVectors::Fourier, false),
        (InitialVectors::Random { seed: 5 }, false),
        (InitialVectors::Fourier, true),
    ];
    for &(init, two) in &cases {
        let serial = json(1, init, two);
        same += usize::from([2, 4, 8].iter().all(|&t| json(t, init, two) == serial));
    }
    outcome(same == cases.len(), format!("{same}/{} configurations bitwise identical across 1/2/4/8 threads", cases.len()))
}

fn main() {
    let s = Duration::from_secs;
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 9] = [
        ("AC1 spectrum correspondence", Some(s(10)), ac1),
        ("AC2 operator formulas", Some(s(10)), ac2),
        ("AC3 half-plane map", Some(s(1)), ac3),
        ("AC4 algorithm I end-to-end", Some(s(60)), ac4),
        ("AC5 algorithm II inhibition", Some(s(60)), ac5),
        ("AC6 subspace baseline", Some(s(60)), ac6),
        ("AC7 sigma optimality", Some(s(1)), ac7),
        ("AC8 singular shift detection", Some(s(10)), ac8),
        ("AC9 determinism", None, ac9),
    ];
    let mut failed = 0;
    for (name, budget, f) in criteria {
        let o = timed(budget, f);
        failed += usize::from(!o.pass);
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}/9 criteria pass", 9 - failed);
    if failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| v == "1") {
        std::process::exit(1);
    }
}
