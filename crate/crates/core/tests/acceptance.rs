//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::Command;
use std::time::Instant;

use marginals::grid::Grid2;
use marginals::marginal::{MarginalParams, MarginalParams1D};
use marginals::oscillator::{
    boost_lightcone, boost_zt, lightcone_from_zt, norm_squared, overlap, phi_momentum_density,
    subsidiary_residual, Wavefunction,
};
use marginals::quadrature::QuadratureSpec;
use marginals::relativity::{
    galileo_marginal_shift, oscillator_marginal_grid, verify_covariance, Method, NestedQuadrature,
};
use marginals::symplectic::{is_symplectic, random_symplectic};
use marginals::wigner::{
    oscillator_ground_1d, total_probability, wigner_ground, wigner_numeric, OscillatorWigner,
    PhasePoint4,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_marginals");

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn within(value: f64, tol: f64) -> Self {
        Self {
            passed: value <= tol,
            detail: format!("max deviation {value:.3e} (tol {tol:.0e})"),
        }
    }
}

fn fold_max(acc: f64, x: f64) -> f64 {
    if acc.is_nan() || x.is_nan() {
        f64::NAN
    } else {
        acc.max(x)
    }
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, fold_max)
}

fn covariance_analytic() -> Outcome {
    let grid = Grid2::square(-3.0, 3.0, 21).unwrap();
    let quad = NestedQuadrature::default();
    let mut worst = 0.0;
    for &beta in &[0.3, -0.3, 0.6, -0.6, 0.9, -0.9] {
        for seed in 0..50 {
            let p = MarginalParams::random(seed);
            let r = verify_covariance(0, beta, &p, &grid, 1e-10, Method::Analytic, &quad).unwrap();
            worst = fold_max(worst, r.max_abs_deviation);
        }
    }
    Outcome::within(worst, 1e-10)
}

fn covariance_numeric() -> Outcome {
    let grid = Grid2::square(-3.0, 3.0, 21).unwrap();
    let quad = NestedQuadrature::default();
    let mut sigmas = vec![MarginalParams::position_plane()];
    sigmas.extend((0..5).map(MarginalParams::random));
    let mut worst = 0.0;
    for n in 1..=2 {
        for &beta in &[0.3, -0.3, 0.6, -0.6] {
            for p in &sigmas {
                let r = verify_covariance(n, beta, p, &grid, 1e-5, Method::Numeric, &quad).unwrap();
                worst = fold_max(worst, r.max_abs_deviation);
            }
        }
    }
    Outcome::within(worst, 1e-5)
}

fn limiting_cases() -> Outcome {
    let points = Grid2::square(-3.0, 3.0, 21).unwrap().points();
    let quad = NestedQuadrature::default();
    let single = QuadratureSpec::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 0..=2 {
        let (method, tol) = if n == 0 {
            (Method::Analytic, 1e-8)
        } else {
            (Method::Numeric, 1e-5)
        };
        let mut worst = 0.0;
        for &beta in &[0.0, 0.6, -0.6] {
            let wf = Wavefunction::new(n, beta).unwrap();
            let pos = oscillator_marginal_grid(
                n,
                beta,
                &MarginalParams::position_plane(),
                &points,
                method,
                &quad,
            )
            .unwrap();
            let psi2: Vec<f64> = points
                .iter()
                .map(|&(u, v)| wf.eval_lightcone(u, v).powi(2))
                .collect();
            let mom = oscillator_marginal_grid(
                n,
                beta,
                &MarginalParams::momentum_plane(),
                &points,
                method,
                &quad,
            )
            .unwrap();
            let phi2: Vec<f64> = points
                .iter()
                .map(|&(a, b)| phi_momentum_density(n, beta, a, b, &single).unwrap())
                .collect();
            worst = fold_max(worst, fold_max(sup(&pos, &psi2), sup(&mom, &phi2)));
        }
        ok &= worst <= tol;
        parts.push(format!("n={n}: {worst:.3e} (tol {tol:.0e})"));
    }
    Outcome {
        passed: ok,
        detail: parts.join(", "),
    }
}

fn wigner_normalization() -> Outcome {
    let outer = QuadratureSpec::nested_outer();
    let inner = QuadratureSpec::nested_inner();
    let betas = [0.0, 0.3, -0.3, 0.6, -0.6, 0.9, -0.9];
    let mut norm_dev = 0.0;
    for &beta in &betas {
        norm_dev = fold_max(
            norm_dev,
            (total_probability(&wigner_ground(beta).unwrap(), &outer).unwrap() - 1.0).abs(),
        );
        for n in 0..=2 {
            let w = OscillatorWigner::new(n, beta, &inner).unwrap();
            norm_dev = fold_max(
                norm_dev,
                (total_probability(&w, &outer).unwrap() - 1.0).abs(),
            );
        }
    }
    let axis: Vec<f64> = (0..5).map(|i| -2.0 + i as f64).collect();
    let mut cross = 0.0;
    for &beta in &betas {
        let ground = wigner_ground(beta).unwrap();
        for &u in &axis {
            for &v in &axis {
                for &pu in &axis {
                    for &pv in &axis {
                        let a = wigner_numeric(0, beta, PhasePoint4::new(u, v, pu, pv), &inner)
                            .unwrap();
                        let b = ground.eval(&[u, v, pu, pv]).unwrap();
                        cross = fold_max(cross, (a - b).abs());
                    }
                }
            }
        }
    }
    Outcome {
        passed: norm_dev <= 1e-6 && cross <= 1e-8,
        detail: format!(
            "|∫W - 1| {norm_dev:.3e} (tol 1e-6), numeric vs closed form {cross:.3e} (tol 1e-8)"
        ),
    }
}

fn galileo() -> Outcome {
    let state = oscillator_ground_1d();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut bad = 0;
    for _ in 0..100 {
        let mu: f64 = rng.random_range(-2.0..2.0);
        let nu: f64 = rng.random_range(-2.0..2.0);
        let v: f64 = rng.random_range(-3.0..3.0);
        let t: f64 = rng.random_range(-3.0..3.0);
        let s =
            galileo_marginal_shift(&state, &MarginalParams1D::new(mu, nu).unwrap(), v, t).unwrap();
        let exact_mean = s.after.mean - s.before.mean == mu * (v * t) + nu * v;
        let same_var = s.after.variance.to_bits() == s.before.variance.to_bits();
        if !(exact_mean && same_var && s.deviation() == 0.0) {
            bad += 1;
        }
    }
    Outcome {
        passed: bad == 0,
        detail: format!("{bad} of 100 random (mu, nu, v, t) off the exact shift"),
    }
}

fn subsidiary() -> Outcome {
    let points = Grid2::square(-2.0, 2.0, 5).unwrap().points();
    let mut worst = 0.0;
    let mut ratios = Vec::new();
    for n in 0..=2 {
        for &beta in &[0.0, 0.3, 0.6] {
            for &(z, t) in &points {
                worst = fold_max(worst, subsidiary_residual(n, beta, z, t, 1e-4).unwrap());
                let r: Vec<f64> = [1e-3, 5e-4, 2.5e-4]
                    .iter()
                    .map(|&h| subsidiary_residual(n, beta, z, t, h).unwrap())
                    .collect();
                if r[0] > 1e-9 {
                    ratios.push(r[0] / r[1]);
                    ratios.push(r[1] / r[2]);
                }
            }
        }
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let second_order = !ratios.is_empty() && lo > 3.9 && hi < 4.1;
    Outcome {
        passed: worst <= 1e-6 && second_order,
        detail: format!(
            "max residual {worst:.3e} (tol 1e-6), halving-h ratios in [{lo:.4}, {hi:.4}] over {} pairs",
            ratios.len()
        ),
    }
}

fn kinematic_invariants() -> Outcome {
    let points = Grid2::square(-2.0, 2.0, 5).unwrap().points();
    let mut worst = 0.0;
    for &beta in &[-0.99, -0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9, 0.99] {
        for &(z, t) in &points {
            let (zp, tp) = boost_zt(z, t, beta).unwrap();
            worst = fold_max(worst, ((zp * zp - tp * tp) - (z * z - t * t)).abs());
            let p = lightcone_from_zt(z, t);
            let q = boost_lightcone(p, beta).unwrap();
            worst = fold_max(worst, (q.u * q.v - p.u * p.v).abs());
        }
    }
    Outcome::within(worst, 1e-10)
}

fn symplectic_validation() -> Outcome {
    let mut failures = 0;
    let mut worst = 0.0;
    for dim in [2, 4] {
        for seed in 0..1000 {
            let m = random_symplectic(dim, seed).unwrap();
            let c = is_symplectic(m.matrix(), 1e-10).unwrap();
            worst = fold_max(worst, c.residual);
            if !c.ok {
                failures += 1;
            }
        }
    }
    let diag = is_symplectic(&DMatrix::from_diagonal_element(2, 2, 2.0), 1e-10).unwrap();
    Outcome {
        passed: failures == 0 && !diag.ok,
        detail: format!(
            "{failures} of 2000 rejected (max residual {worst:.3e}), diag(2,2) rejected: {}",
            !diag.ok
        ),
    }
}

fn spectrum() -> Outcome {
    let out = Command::new(BIN)
        .args(["spectrum", "--m0", "0", "--lambda-max", "10"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header_ok = lines.next() == Some("lambda,mass_squared,degeneracy");
    let rows: Vec<Vec<i64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let mut ok = out.status.success() && header_ok && rows.len() == 11;
    for (lambda, row) in rows.iter().enumerate() {
        let lambda = lambda as i64;
        let mut count = 0;
        for a in 0..=lambda {
            for b in 0..=lambda - a {
                for n in 0..=lambda - a - b {
                    if a + b + n == lambda {
                        count += 1;
                    }
                }
            }
        }
        ok &= row == &vec![lambda, lambda + 1, count];
    }
    Outcome {
        passed: ok,
        detail: format!("{} rows checked against enumeration", rows.len()),
    }
}

fn norms_and_overlaps() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut worst = 0.0;
    for &beta in &[0.0, 0.3, -0.3, 0.6, -0.6, 0.9, -0.9] {
        for m in 0..=3 {
            worst = fold_max(worst, (norm_squared(m, beta, &spec).unwrap() - 1.0).abs());
            for n in 0..=3 {
                if m != n {
                    worst = fold_max(worst, overlap(m, n, beta, &spec).unwrap().abs());
                }
            }
        }
    }
    Outcome::within(worst, 1e-8)
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 4] = [
        &[
            "marginal",
            "--beta",
            "0.6",
            "--sigma",
            "0.3,-1,0.5,0.2,1,0.1,-0.4,0.7",
        ],
        &["marginal", "--n", "1", "--beta", "-0.3", "--grid", "-2:2:7"],
        &[
            "wigner", "--n", "2", "--beta", "0.6", "--format", "json", "--grid", "-1:1:3",
        ],
        &[
            "verify", "--check", "all", "--n", "1", "--beta", "0.3", "--grid", "-2:2:5",
        ],
    ];
    let mut identical = 0;
    for args in runs {
        let a = Command::new(BIN).args(args).output().unwrap();
        let b = Command::new(BIN).args(args).output().unwrap();
        if a.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout {
            identical += 1;
        }
    }
    Outcome {
        passed: identical == runs.len(),
        detail: format!("{identical} of {} invocations byte-identical", runs.len()),
    }
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("covariance identity, analytic path", covariance_analytic),
        ("covariance identity, numeric path", covariance_numeric),
        ("limiting cases", limiting_cases),
        ("Wigner normalization and cross-check", wigner_normalization),
        ("Galileo shift", galileo),
        ("subsidiary condition", subsidiary),
        ("kinematic invariants", kinematic_invariants),
        ("symplectic validation", symplectic_validation),
        ("spectrum", spectrum),
        ("norm and orthogonality", norms_and_overlaps),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!(
            "[{status}] {:>2} {name}: {} [{:.1}s]",
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
