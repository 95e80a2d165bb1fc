//! Marginal ("tomographic") distributions: projections of a Wigner function
//! onto linear combinations of phase-space coordinates.
//!
//! In four dimensions the projection plane is given by a 2×4 matrix `A`
//! acting on `(u, v, p_u, p_v)`:
//!
//! ```text
//! 𝒰 = μ₁u + ν₁v + ν₂p_u + μ₂p_v
//! 𝒱 = ζ₁u + η₁v + η₂p_u + ζ₂p_v
//! ```
//!
//! Two independent routes compute `w(𝒰, 𝒱)`. For Gaussian Wigner functions
//! the marginal is the Gaussian law of `A·ξ`. For any density the delta
//! constraints are removed by an exact change of variables: `A` is completed
//! to an invertible `T` with an orthonormal basis of its null space, and the
//! two leftover coordinates are integrated out by quadrature.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, Vector2, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{try_integrate_affine_2d, QuadratureSpec, StandardRule};
use crate::wigner::{GaussianWignerState, PhaseSpaceDensity};

/// Rank tolerance on the smallest singular value of the row-normalized `A`.
pub const RANK_TOL: f64 = 1e-10;

const ZERO_VECTOR_TOL: f64 = 1e-12;

/// Projection plane parameters σ = {μᵢ, νᵢ, ζᵢ, ηᵢ} as a 2×4 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalParams {
    rows: [[f64; 4]; 2],
}

impl MarginalParams {
    /// Rows `(μ₁, ν₁, ν₂, μ₂)` and `(ζ₁, η₁, η₂, ζ₂)`.
    pub fn from_rows(rows: [[f64; 4]; 2]) -> Result<Self> {
        let s = smallest_singular_value(&rows);
        if s.is_nan() || s <= RANK_TOL {
            return Err(Error::DegenerateProjection(s));
        }
        Ok(Self { rows })
    }

    /// `[μ₁, ν₁, ν₂, μ₂, ζ₁, η₁, η₂, ζ₂]`, the row-major order of the matrix.
    pub fn from_sigma(sigma: [f64; 8]) -> Result<Self> {
        Self::from_rows([
            [sigma[0], sigma[1], sigma[2], sigma[3]],
            [sigma[4], sigma[5], sigma[6], sigma[7]],
        ])
    }

    /// `μ₁ = η₁ = 1`: the marginal is `|ψ(u, v)|²`.
    pub fn position_plane() -> Self {
        Self {
            rows: [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]],
        }
    }

    /// `ν₂ = ζ₂ = 1`: the marginal is `|φ(p_u, p_v)|²`.
    pub fn momentum_plane() -> Self {
        Self {
            rows: [[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]],
        }
    }

    /// Entries uniform in `[-1, 1]`, redrawn until rank 2.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut rows = [[0.0; 4]; 2];
            for r in rows.iter_mut() {
                for x in r.iter_mut() {
                    *x = rng.random_range(-1.0..1.0);
                }
            }
            if let Ok(p) = Self::from_rows(rows) {
                return p;
            }
        }
    }

    pub fn rows(&self) -> &[[f64; 4]; 2] {
        &self.rows
    }

    pub fn sigma(&self) -> [f64; 8] {
        let [a, b] = self.rows;
        [a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]]
    }

    pub fn mu(&self) -> [f64; 2] {
        [self.rows[0][0], self.rows[0][3]]
    }

    pub fn nu(&self) -> [f64; 2] {
        [self.rows[0][1], self.rows[0][2]]
    }

    pub fn zeta(&self) -> [f64; 2] {
        [self.rows[1][0], self.rows[1][3]]
    }

    pub fn eta(&self) -> [f64; 2] {
        [self.rows[1][1], self.rows[1][2]]
    }

    pub fn smallest_singular_value(&self) -> f64 {
        smallest_singular_value(&self.rows)
    }

    fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(2, 4, |r, c| self.rows[r][c])
    }
}

/// Smallest singular value of the 2×4 matrix after scaling each row to unit norm.
pub fn smallest_singular_value(rows: &[[f64; 4]; 2]) -> f64 {
    let norm = |r: &[f64; 4]| r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (n0, n1) = (norm(&rows[0]), norm(&rows[1]));
    if !(n0 > 0.0 && n1 > 0.0) || !n0.is_finite() || !n1.is_finite() {
        return 0.0;
    }
    let a: Vec<f64> = rows[0].iter().map(|x| x / n0).collect();
    let b: Vec<f64> = rows[1].iter().map(|x| x / n1).collect();
    // det(A Aᵀ) as the sum of squared 2×2 minors (Cauchy–Binet).
    let mut det = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            let m = a[i] * b[j] - a[j] * b[i];
            det += m * m;
        }
    }
    let trace = 2.0;
    let disc = (trace * trace - 4.0 * det).max(0.0).sqrt();
    let lmax = 0.5 * (trace + disc);
    (det / lmax).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian2D {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
}

impl Gaussian2D {
    pub fn new(mean: [f64; 2], cov: [[f64; 2]; 2]) -> Result<Self> {
        let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
        if (cov[0][1] - cov[1][0]).abs() > 1e-12 * cov[0][0].abs().max(cov[1][1].abs()) {
            return Err(Error::NotPositiveDefinite(
                "2x2 covariance not symmetric".into(),
            ));
        }
        if !(cov[0][0] > 0.0 && det > 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "2x2 covariance determinant {det:e}"
            )));
        }
        Ok(Self { mean, cov })
    }

    pub fn density(&self, x: f64, y: f64) -> f64 {
        let [[a, b], [_, d]] = self.cov;
        let det = a * d - b * b;
        let (dx, dy) = (x - self.mean[0], y - self.mean[1]);
        let q = (d * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det;
        (-0.5 * q).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian1D {
    pub mean: f64,
    pub variance: f64,
}

impl Gaussian1D {
    pub fn density(&self, x: f64) -> f64 {
        let d = x - self.mean;
        (-0.5 * d * d / self.variance).exp() / (2.0 * std::f64::consts::PI * self.variance).sqrt()
    }
}

/// Exact marginal of a Gaussian Wigner function: mean `A·m`, covariance `A·Σ·Aᵀ`.
pub fn marginal_gaussian(
    state: &GaussianWignerState,
    params: &MarginalParams,
) -> Result<Gaussian2D> {
    if state.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: state.dim(),
        });
    }
    let a = params.matrix();
    let mean = &a * state.mean();
    let cov = &a * state.covariance() * a.transpose();
    let off = 0.5 * (cov[(0, 1)] + cov[(1, 0)]);
    Gaussian2D::new([mean[0], mean[1]], [[cov[(0, 0)], off], [off, cov[(1, 1)]]])
}

/// Change of variables `η = T ξ` with `T = [A; N]`, `N` an orthonormal basis
/// of `ker A`, plus the conditional envelope of the leftover coordinates.
#[derive(Debug, Clone)]
pub struct Projection {
    t_inv: Matrix4<f64>,
    inv_abs_det: f64,
    env_a: Vector2<f64>,
    env_b: Vector2<f64>,
    gain: Matrix2<f64>,
    basis: [[f64; 2]; 2],
}

impl Projection {
    pub fn new(params: &MarginalParams, envelope: (DVector<f64>, DMatrix<f64>)) -> Result<Self> {
        let (mean, cov) = envelope;
        if mean.len() != 4 || cov.nrows() != 4 || cov.ncols() != 4 {
            return Err(Error::Dimension {
                expected: 4,
                got: mean.len(),
            });
        }
        let rows = params.rows();
        let null = null_space_rows(rows);
        let t = Matrix4::from_fn(|r, c| match r {
            0 | 1 => rows[r][c],
            _ => null[r - 2][c],
        });
        let det = t.determinant();
        let t_inv = t.try_inverse().ok_or(Error::DegenerateProjection(
            params.smallest_singular_value(),
        ))?;

        let m = Vector4::from_column_slice(mean.as_slice());
        let s = Matrix4::from_column_slice(cov.as_slice());
        let mt = t * m;
        let c = t * s * t.transpose();
        let caa = c.fixed_view::<2, 2>(0, 0).into_owned();
        let cab = c.fixed_view::<2, 2>(0, 2).into_owned();
        let cba = c.fixed_view::<2, 2>(2, 0).into_owned();
        let cbb = c.fixed_view::<2, 2>(2, 2).into_owned();
        let caa_inv = caa
            .try_inverse()
            .ok_or_else(|| Error::NotPositiveDefinite("projected envelope covariance".into()))?;
        let gain = cba * caa_inv;
        let mut cond = cbb - gain * cab;
        let off = 0.5 * (cond[(0, 1)] + cond[(1, 0)]);
        cond[(0, 1)] = off;
        cond[(1, 0)] = off;
        let l = cond
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite("conditional envelope covariance".into()))?
            .l();
        Ok(Self {
            t_inv,
            inv_abs_det: 1.0 / det.abs(),
            env_a: Vector2::new(mt[0], mt[1]),
            env_b: Vector2::new(mt[2], mt[3]),
            gain,
            basis: [[l[(0, 0)], l[(0, 1)]], [l[(1, 0)], l[(1, 1)]]],
        })
    }

    pub fn eval<D: PhaseSpaceDensity + ?Sized>(
        &self,
        density: &D,
        point: (f64, f64),
        rule: &StandardRule,
    ) -> Result<f64> {
        let a = Vector2::new(point.0, point.1);
        let center = self.env_b + self.gain * (a - self.env_a);
        try_integrate_affine_2d(
            |s, r| {
                let xi = self.t_inv * Vector4::new(point.0, point.1, s, r);
                Ok(density.eval(xi.as_slice())? * self.inv_abs_det)
            },
            [center[0], center[1]],
            self.basis,
            rule,
        )
    }
}

/// Right singular vectors of `A` for its two zero singular values, in index
/// order, each signed so its largest-magnitude entry is positive.
fn null_space_rows(rows: &[[f64; 4]; 2]) -> [[f64; 4]; 2] {
    let padded = Matrix4::from_fn(|r, c| if r < 2 { rows[r][c] } else { 0.0 });
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[i]
            .partial_cmp(&svd.singular_values[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut picked = [order[0], order[1]];
    picked.sort_unstable();
    picked.map(|i| {
        let mut row = [v_t[(i, 0)], v_t[(i, 1)], v_t[(i, 2)], v_t[(i, 3)]];
        let big = row
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if big < 0.0 {
            row.iter_mut().for_each(|x| *x = -*x);
        }
        row
    })
}

/// `w(𝒰, 𝒱)` of an arbitrary 4D density by exact change of variables and quadrature.
pub fn marginal_numeric<D: PhaseSpaceDensity + ?Sized>(
    density: &D,
    params: &MarginalParams,
    point: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<f64> {
    let proj = Projection::new(params, density.envelope())?;
    proj.eval(density, point, &StandardRule::new(spec)?)
}

/// [`marginal_numeric`] over many points; output order matches `points`.
pub fn marginal_numeric_grid<D: PhaseSpaceDensity + ?Sized>(
    density: &D,
    params: &MarginalParams,
    points: &[(f64, f64)],
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let proj = Projection::new(params, density.envelope())?;
    let rule = StandardRule::new(spec)?;
    points
        .par_iter()
        .map(|&p| proj.eval(density, p, &rule))
        .collect()
}

/// Coefficients `(μ, ν)` of `X = μq + νp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalParams1D {
    mu: f64,
    nu: f64,
}

impl MarginalParams1D {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        let norm = mu.hypot(nu);
        if !norm.is_finite() || norm <= ZERO_VECTOR_TOL {
            return Err(Error::DegenerateProjection(norm));
        }
        Ok(Self { mu, nu })
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { mu: c, nu: s }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// Law of `X = μq + νp` under a Gaussian Wigner function on `(q, p)`.
pub fn marginal_1d(state: &GaussianWignerState, p: &MarginalParams1D) -> Result<Gaussian1D> {
    if state.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: state.dim(),
        });
    }
    let m = state.mean();
    let s = state.covariance();
    let (mu, nu) = (p.mu, p.nu);
    Ok(Gaussian1D {
        mean: mu * m[0] + nu * m[1],
        variance: mu * mu * s[(0, 0)] + 2.0 * mu * nu * s[(0, 1)] + nu * nu * s[(1, 1)],
    })
}

/// Marginal along the phase-space direction at angle `θ`: `X = q cos θ + p sin θ`.
pub fn rotation_marginal(state: &GaussianWignerState, theta: f64) -> Result<Gaussian1D> {
    let reduced = theta.rem_euclid(std::f64::consts::TAU);
    marginal_1d(state, &MarginalParams1D::rotation(reduced))
}
