//! Transformation laws of marginals under Galileo and Lorentz boosts.
//!
//! A Lorentz boost along `z` rescales the light-cone phase space by
//! `S_β = diag(c, 1/c, 1/c, c)`, and `W_β(ξ) = W_0(S_β ξ)`. Substituting into
//! the marginal moves the boost off the state and onto the projection
//! parameters: the boosted marginal with `σ` equals the rest-frame marginal
//! with `σ_β`, where the `μ, ζ` coefficients are divided by `c` and the
//! `ν, η` coefficients multiplied by `c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid2;
use crate::marginal::{
    marginal_1d, marginal_gaussian, marginal_numeric_grid, Gaussian1D, MarginalParams,
    MarginalParams1D,
};
use crate::oscillator::dilation;
use crate::quadrature::QuadratureSpec;
use crate::wigner::{galileo_shift, wigner_ground, GaussianWignerState, OscillatorWigner};

/// Which printed boost direction `β` refers to.
///
/// `LabToRest` is the direction of the coordinate boost into the hadron rest
/// frame (`u' = c·u`). `RestToLab` is the opposite scaling and is reached by
/// flipping the sign of `β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BoostConvention {
    #[default]
    #[serde(rename = "eq2.2")]
    LabToRest,
    #[serde(rename = "eq7.46")]
    RestToLab,
}

impl BoostConvention {
    pub fn effective_beta(&self, beta: f64) -> f64 {
        match self {
            BoostConvention::LabToRest => beta,
            BoostConvention::RestToLab => -beta,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BoostConvention::LabToRest => "eq2.2",
            BoostConvention::RestToLab => "eq7.46",
        }
    }
}

impl std::str::FromStr for BoostConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq2.2" => Ok(BoostConvention::LabToRest),
            "eq7.46" => Ok(BoostConvention::RestToLab),
            other => Err(Error::InvalidArgument(format!(
                "unknown boost convention '{other}' (expected eq2.2 or eq7.46)"
            ))),
        }
    }
}

/// Parameters `σ_β` with `w_β(𝒰, 𝒱; σ) = w_0(𝒰, 𝒱; σ_β)`.
pub fn boost_pullback_params(params: &MarginalParams, beta: f64) -> Result<MarginalParams> {
    let c = dilation(beta)?;
    // Columns act on (u, v, p_u, p_v): μ/ζ sit on u and p_v, ν/η on v and p_u.
    let scale = [1.0 / c, c, c, 1.0 / c];
    let rows = params.rows().map(|row| {
        let mut out = row;
        for (x, s) in out.iter_mut().zip(scale) {
            *x *= s;
        }
        out
    });
    MarginalParams::from_rows(rows)
}

pub fn boost_pullback_params_with(
    params: &MarginalParams,
    beta: f64,
    convention: BoostConvention,
) -> Result<MarginalParams> {
    boost_pullback_params(params, convention.effective_beta(beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Numeric,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Method::Analytic),
            "numeric" => Ok(Method::Numeric),
            other => Err(Error::InvalidArgument(format!(
                "unknown method '{other}' (expected analytic or numeric)"
            ))),
        }
    }
}

/// Quadrature rules for marginals of numerically evaluated Wigner functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestedQuadrature {
    /// Integrates out the two null-space coordinates.
    pub outer: QuadratureSpec,
    /// Evaluates the Wigner transform at each outer node.
    pub inner: QuadratureSpec,
}

impl Default for NestedQuadrature {
    fn default() -> Self {
        Self {
            outer: QuadratureSpec::nested_outer(),
            inner: QuadratureSpec::nested_inner(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostReport {
    pub beta: f64,
    pub n: u32,
    pub sigma: [f64; 8],
    pub grid: Grid2,
    pub max_abs_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub method: Method,
}

/// Marginal density of the `n`-th oscillator state on a grid.
pub fn oscillator_marginal_grid(
    n: u32,
    beta: f64,
    params: &MarginalParams,
    points: &[(f64, f64)],
    method: Method,
    quad: &NestedQuadrature,
) -> Result<Vec<f64>> {
    match method {
        Method::Analytic => {
            if n != 0 {
                return Err(Error::InvalidArgument(format!(
                    "analytic marginals exist only for the ground state, got n = {n}"
                )));
            }
            let g = marginal_gaussian(&wigner_ground(beta)?, params)?;
            Ok(points.iter().map(|&(x, y)| g.density(x, y)).collect())
        }
        Method::Numeric => {
            let w = OscillatorWigner::new(n, beta, &quad.inner)?;
            marginal_numeric_grid(&w, params, points, &quad.outer)
        }
    }
}

/// Checks `w_β(𝒰, 𝒱; σ) = w_0(𝒰, 𝒱; σ_β)` on a grid.
pub fn verify_covariance(
    n: u32,
    beta: f64,
    params: &MarginalParams,
    grid: &Grid2,
    tol: f64,
    method: Method,
    quad: &NestedQuadrature,
) -> Result<BoostReport> {
    let pulled = boost_pullback_params(params, beta)?;
    let points = grid.points();
    let boosted = oscillator_marginal_grid(n, beta, params, &points, method, quad)?;
    let rest = oscillator_marginal_grid(n, 0.0, &pulled, &points, method, quad)?;
    let max_abs_deviation = boosted
        .iter()
        .zip(&rest)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(BoostReport {
        beta,
        n,
        sigma: params.sigma(),
        grid: *grid,
        max_abs_deviation,
        tolerance: tol,
        passed: max_abs_deviation <= tol,
        method,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalileoShift {
    /// `Δ = μvt + νv`
    pub shift: f64,
    pub before: Gaussian1D,
    pub after: Gaussian1D,
}

impl GalileoShift {
    /// `|(mean_after - mean_before) - Δ| + |var_after - var_before|`.
    pub fn deviation(&self) -> f64 {
        ((self.after.mean - self.before.mean) - self.shift).abs()
            + (self.after.variance - self.before.variance).abs()
    }
}

/// Marginal of a Galileo-boosted state versus the unboosted marginal.
pub fn galileo_marginal_shift(
    state: &GaussianWignerState,
    p: &MarginalParams1D,
    v: f64,
    t: f64,
) -> Result<GalileoShift> {
    let before = marginal_1d(state, p)?;
    let after = marginal_1d(&galileo_shift(state, v, t)?, p)?;
    Ok(GalileoShift {
        shift: p.mu() * (v * t) + p.nu() * v,
        before,
        after,
    })
}
