use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::{Check, CliError, CliResult, Options, Resolved};
use crate::grid::Grid2;
use crate::marginal::{MarginalParams, MarginalParams1D};
use crate::oscillator::{norm_squared, phi_momentum_density, subsidiary_residual, Wavefunction};
use crate::relativity::{
    galileo_marginal_shift, oscillator_marginal_grid, verify_covariance, Method,
};
use crate::wigner::{oscillator_ground_1d, total_probability, wigner_ground, OscillatorWigner};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: Check,
    pub parameters: Value,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(check: Check, parameters: Value, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            check,
            parameters,
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub check: Check,
    pub parameters: Value,
    pub max_deviation: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
    pub runtime_ms: Option<f64>,
    pub config_echo: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<Vec<CheckResult>>,
}

pub fn run(check: Check, r: &Resolved, o: &Options) -> CliResult<Report> {
    if check == Check::All {
        let results = [
            Check::Covariance,
            Check::Normalization,
            Check::Limits,
            Check::Galileo,
            Check::Subsidiary,
        ]
        .into_iter()
        .map(|c| run_one(c, r, o))
        .collect::<CliResult<Vec<_>>>()?;
        return Ok(Report {
            check,
            parameters: common(r),
            max_deviation: None,
            tolerance: None,
            passed: results.iter().all(|c| c.passed),
            runtime_ms: None,
            config_echo: r.echo.clone(),
            results: Some(results),
        });
    }
    let c = run_one(check, r, o)?;
    Ok(Report {
        check: c.check,
        parameters: c.parameters,
        max_deviation: Some(c.max_deviation),
        tolerance: Some(c.tolerance),
        passed: c.passed,
        runtime_ms: None,
        config_echo: r.echo.clone(),
        results: None,
    })
}

fn run_one(check: Check, r: &Resolved, o: &Options) -> CliResult<CheckResult> {
    match check {
        Check::Covariance => covariance(r, o),
        Check::Normalization => normalization(r, o),
        Check::Limits => limits(r, o),
        Check::Galileo => galileo(o),
        Check::Subsidiary => subsidiary(r, o),
        Check::All => unreachable!("expanded by run"),
    }
}

fn common(r: &Resolved) -> Value {
    json!({
        "n": r.n,
        "beta": r.beta,
        "boost_convention": r.convention.as_str(),
    })
}

fn grid_json(g: &Grid2) -> Value {
    json!([
        [g.first.min, g.first.max, g.first.count],
        [g.second.min, g.second.max, g.second.count],
    ])
}

fn extend(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut base, extra) {
        a.extend(b);
    }
    base
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, |m, d| {
            if d.is_nan() || m.is_nan() {
                f64::NAN
            } else {
                m.max(d)
            }
        })
}

fn covariance(r: &Resolved, o: &Options) -> CliResult<CheckResult> {
    let method = r.method()?;
    let tol = o.tol.unwrap_or(match method {
        Method::Analytic => 1e-10,
        Method::Numeric => 1e-5,
    });
    let grid = r.grid2("-3:3:21")?;
    let mut sigmas = vec![r.params()?];
    sigmas
        .extend((0..o.random_count as u64).map(|k| MarginalParams::random(o.seed.wrapping_add(k))));
    let mut worst = 0.0f64;
    for sigma in &sigmas {
        let rep = verify_covariance(r.n, r.effective_beta, sigma, &grid, tol, method, &r.nested)?;
        worst = if rep.max_abs_deviation.is_nan() {
            f64::NAN
        } else {
            worst.max(rep.max_abs_deviation)
        };
    }
    let params = extend(
        common(r),
        json!({
            "method": method,
            "grid": grid_json(&grid),
            "sigma": sigmas.iter().map(|s| s.sigma().to_vec()).collect::<Vec<_>>(),
            "seed": o.seed,
        }),
    );
    Ok(CheckResult::new(Check::Covariance, params, worst, tol))
}

fn normalization(r: &Resolved, o: &Options) -> CliResult<CheckResult> {
    let tol = o.tol.unwrap_or(1e-6);
    let psi = norm_squared(r.n, r.effective_beta, &r.single)?;
    let wigner = if r.n == 0 {
        total_probability(&wigner_ground(r.effective_beta)?, &r.nested.outer)?
    } else {
        let w = OscillatorWigner::new(r.n, r.effective_beta, &r.nested.inner)?;
        total_probability(&w, &r.nested.outer)?
    };
    let dev = (psi - 1.0).abs().max((wigner - 1.0).abs());
    let params = extend(
        common(r),
        json!({ "psi_norm_squared": psi, "wigner_integral": wigner }),
    );
    Ok(CheckResult::new(Check::Normalization, params, dev, tol))
}

fn limits(r: &Resolved, o: &Options) -> CliResult<CheckResult> {
    let method = r.method()?;
    let tol = o.tol.unwrap_or(match method {
        Method::Analytic => 1e-8,
        Method::Numeric => 1e-5,
    });
    let grid = r.grid2("-3:3:21")?;
    let points = grid.points();
    let beta = r.effective_beta;

    let pos = oscillator_marginal_grid(
        r.n,
        beta,
        &MarginalParams::position_plane(),
        &points,
        method,
        &r.nested,
    )?;
    let wf = Wavefunction::new(r.n, beta)?;
    let psi2: Vec<f64> = points
        .iter()
        .map(|&(u, v)| wf.eval_lightcone(u, v).powi(2))
        .collect();
    let d_pos = max_abs_diff(&pos, &psi2);

    let mom = oscillator_marginal_grid(
        r.n,
        beta,
        &MarginalParams::momentum_plane(),
        &points,
        method,
        &r.nested,
    )?;
    let phi2 = points
        .iter()
        .map(|&(pu, pv)| phi_momentum_density(r.n, beta, pu, pv, &r.single))
        .collect::<crate::Result<Vec<_>>>()?;
    let d_mom = max_abs_diff(&mom, &phi2);

    let dev = if d_pos.is_nan() || d_mom.is_nan() {
        f64::NAN
    } else {
        d_pos.max(d_mom)
    };
    let params = extend(
        common(r),
        json!({
            "method": method,
            "grid": grid_json(&grid),
            "position_deviation": d_pos,
            "momentum_deviation": d_mom,
        }),
    );
    Ok(CheckResult::new(Check::Limits, params, dev, tol))
}

fn galileo(o: &Options) -> CliResult<CheckResult> {
    let tol = o.tol.unwrap_or(0.0);
    let state = oscillator_ground_1d();
    let mut pairs = vec![(o.mu.unwrap_or(1.0), o.nu.unwrap_or(1.0))];
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    for _ in 0..o.random_count {
        pairs.push((rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    }
    let mut worst = 0.0f64;
    for &(mu, nu) in &pairs {
        let p = MarginalParams1D::new(mu, nu)?;
        let s = galileo_marginal_shift(&state, &p, o.v, o.t)?;
        worst = if s.deviation().is_nan() {
            f64::NAN
        } else {
            worst.max(s.deviation())
        };
    }
    let params = json!({
        "v": o.v,
        "t": o.t,
        "mu_nu": pairs.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        "seed": o.seed,
    });
    Ok(CheckResult::new(Check::Galileo, params, worst, tol))
}

fn subsidiary(r: &Resolved, o: &Options) -> CliResult<CheckResult> {
    let tol = o.tol.unwrap_or(1e-6);
    let grid = r.grid2("-2:2:5")?;
    let mut worst = 0.0f64;
    for (z, t) in grid.points() {
        let res = subsidiary_residual(r.n, r.effective_beta, z, t, o.h)?;
        worst = if res.is_nan() {
            f64::NAN
        } else {
            worst.max(res)
        };
    }
    let params = extend(common(r), json!({ "h": o.h, "grid": grid_json(&grid) }));
    Ok(CheckResult::new(Check::Subsidiary, params, worst, tol))
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}
