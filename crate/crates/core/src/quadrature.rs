//! Special functions and Gaussian quadrature primitives.
//!
//! Two rule families are supported: Gauss–Legendre on a truncated box
//! `[-L, L]` and Gauss–Hermite for the weight `e^{-x^2}`. Nodes and weights
//! come from Newton iteration on the three-term recurrences (Hermite roots
//! are seeded by the eigenvalues of the Jacobi matrix), so a given
//! [`QuadratureSpec`] always produces the same bits.
//!
//! Most integrals in this crate are not taken over a fixed box. Instead the
//! caller supplies an affine *envelope* `y = c + B x`, where the columns of
//! `B` are the standard deviations (and orientation) of the Gaussian factor
//! of the integrand. The rule is then applied in the standardized
//! coordinate `x`, see [`StandardRule`].

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of nodes per axis.
pub const MAX_ORDER: usize = 256;

const NEWTON_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    GaussHermite,
    GaussLegendre,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::GaussHermite => "gauss-hermite",
            Scheme::GaussLegendre => "gauss-legendre",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss-hermite" => Ok(Scheme::GaussHermite),
            "gauss-legendre" => Ok(Scheme::GaussLegendre),
            other => Err(Error::InvalidSpec(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Scheme, number of nodes and box half-width for a quadrature rule.
///
/// `truncation` is ignored by Gauss–Hermite rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    scheme: Scheme,
    order: usize,
    truncation: f64,
}

impl QuadratureSpec {
    pub fn new(scheme: Scheme, order: usize, truncation: f64) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidSpec(format!(
                "order must be >= 2, got {order}"
            )));
        }
        if order > MAX_ORDER {
            return Err(Error::UnsupportedOrder {
                order,
                cap: MAX_ORDER,
            });
        }
        if !(truncation > 0.0 && truncation.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "truncation must be a positive finite number, got {truncation}"
            )));
        }
        Ok(Self {
            scheme,
            order,
            truncation,
        })
    }

    pub fn gauss_legendre(order: usize, truncation: f64) -> Result<Self> {
        Self::new(Scheme::GaussLegendre, order, truncation)
    }

    pub fn gauss_hermite(order: usize) -> Result<Self> {
        Self::new(Scheme::GaussHermite, order, 8.0)
    }

    /// Rule for the outer level of nested (4D) integrals.
    pub fn nested_outer() -> Self {
        Self {
            scheme: Scheme::GaussHermite,
            order: 12,
            truncation: 8.0,
        }
    }

    /// Rule for the oscillatory inner level (Wigner transform) of nested integrals.
    pub fn nested_inner() -> Self {
        Self {
            scheme: Scheme::GaussHermite,
            order: 32,
            truncation: 8.0,
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            scheme: Scheme::GaussLegendre,
            order: 96,
            truncation: 8.0,
        }
    }
}

/// Physicists' Hermite polynomial `H_n(x)` by upward recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_n(z)` at a complex argument.
pub fn hermite_complex(n: usize, z: Complex64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * z;
    for k in 1..n {
        let next = 2.0 * z * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Nodes (strictly increasing) and positive weights of the rule.
///
/// Gauss–Hermite weights are for `∫ f(x) e^{-x^2} dx`; Gauss–Legendre nodes
/// and weights are rescaled to `[-L, L]`.
pub fn quad_nodes(spec: &QuadratureSpec) -> Result<Vec<(f64, f64)>> {
    if spec.order > MAX_ORDER {
        return Err(Error::UnsupportedOrder {
            order: spec.order,
            cap: MAX_ORDER,
        });
    }
    let pairs = match spec.scheme {
        Scheme::GaussLegendre => {
            let l = spec.truncation;
            gauss_legendre_unit(spec.order)
                .into_iter()
                .map(|(x, w)| (l * x, l * w))
                .collect()
        }
        Scheme::GaussHermite => gauss_hermite_nodes(spec.order),
    };
    Ok(pairs)
}

fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, p_prev) = legendre_pair(n, z);
            dp = nf * (z * p - p_prev) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-15 {
                break;
            }
        }
        let (p, p_prev) = legendre_pair(n, z);
        dp = if p.is_finite() {
            nf * (z * p - p_prev) / (z * z - 1.0)
        } else {
            dp
        };
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        out[i] = (-z, w);
        out[n - 1 - i] = (z, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    out
}

/// `(P_n(z), P_{n-1}(z))`.
fn legendre_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
    }
    (p1, p2)
}

/// `(h_n(z), h_{n-1}(z))` for the orthonormal Hermite functions without the
/// Gaussian factor.
fn hermite_orthonormal_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI.powf(-0.25);
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}

/// Golub–Welsch eigenvalues of the Jacobi matrix as starting points, then
/// Newton polishing on the orthonormal recurrence.
fn gauss_hermite_nodes(n: usize) -> Vec<(f64, f64)> {
    let nf = n as f64;
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut guesses: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    guesses.sort_by(|a, b| a.total_cmp(b));

    let half = n / 2;
    let mut out = vec![(0.0, 0.0); n];
    // Positive roots only; mirror for the negative half.
    for (i, &guess) in guesses.iter().enumerate().skip(n - half) {
        let mut z = guess;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, p_prev) = hermite_orthonormal_pair(n, z);
            let dz = p / ((2.0 * nf).sqrt() * p_prev);
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, p_prev) = hermite_orthonormal_pair(n, z);
        let dp = (2.0 * nf).sqrt() * p_prev;
        let w = 2.0 / (dp * dp);
        out[i] = (z, w);
        out[n - 1 - i] = (-z, w);
    }
    if n % 2 == 1 {
        let (_, p_prev) = hermite_orthonormal_pair(n, 0.0);
        let dp = (2.0 * nf).sqrt() * p_prev;
        out[half] = (0.0, 2.0 / (dp * dp));
    }
    out
}

/// A one-dimensional rule expressed in envelope-standardized units.
///
/// Approximates `∫ g(x) dx` over the real line for integrands whose
/// Gaussian factor is `e^{-x^2/2}`. For Gauss–Legendre the nodes cover
/// `[-L, L]` (`L` standard deviations); for Gauss–Hermite the node `y` is
/// placed at `x = √2·y` and the weight carries `e^{y^2}`, which makes
/// polynomial-times-Gaussian integrands exact.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl StandardRule {
    pub fn new(spec: &QuadratureSpec) -> Result<Self> {
        let pairs = quad_nodes(spec)?;
        let (nodes, weights) = match spec.scheme {
            Scheme::GaussLegendre => pairs.into_iter().unzip(),
            Scheme::GaussHermite => pairs
                .into_iter()
                .map(|(y, w)| {
                    (
                        std::f64::consts::SQRT_2 * y,
                        std::f64::consts::SQRT_2 * w * (y * y).exp(),
                    )
                })
                .unzip(),
        };
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn check_finite(value: f64, point: &[f64]) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Integrand {
            value,
            point: point.to_vec(),
        })
    }
}

/// Tensor-product estimate of `∫∫ f(x, y) dx dy`.
///
/// Gauss–Legendre integrates over `[-L, L]^2`. Gauss–Hermite integrates over
/// the plane, dividing out the `e^{-x^2-y^2}` weight, so it is exact when
/// `f` is a polynomial times `e^{-x^2-y^2}`.
pub fn integrate_2d<F>(f: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let pairs = quad_nodes(spec)?;
    let pairs: Vec<(f64, f64)> = match spec.scheme {
        Scheme::GaussLegendre => pairs,
        Scheme::GaussHermite => pairs
            .into_iter()
            .map(|(x, w)| (x, w * (x * x).exp()))
            .collect(),
    };
    let mut total = 0.0;
    for &(x, wx) in &pairs {
        let mut row = 0.0;
        for &(y, wy) in &pairs {
            row += wy * check_finite(f(x, y), &[x, y])?;
        }
        total += wx * row;
    }
    Ok(total)
}

/// `∫∫ f(y) dy` with `y = center + basis·x`, `x` in standardized units.
pub fn integrate_affine_2d<F>(
    f: F,
    center: [f64; 2],
    basis: [[f64; 2]; 2],
    rule: &StandardRule,
) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    try_integrate_affine_2d(|a, b| Ok(f(a, b)), center, basis, rule)
}

/// [`integrate_affine_2d`] for a fallible integrand; the first error aborts.
pub fn try_integrate_affine_2d<F>(
    mut f: F,
    center: [f64; 2],
    basis: [[f64; 2]; 2],
    rule: &StandardRule,
) -> Result<f64>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let jac = (basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0]).abs();
    let mut total = 0.0;
    for (&a, &wa) in rule.nodes.iter().zip(&rule.weights) {
        let mut row = 0.0;
        for (&b, &wb) in rule.nodes.iter().zip(&rule.weights) {
            let y0 = center[0] + basis[0][0] * a + basis[0][1] * b;
            let y1 = center[1] + basis[1][0] * a + basis[1][1] * b;
            row += wb * check_finite(f(y0, y1)?, &[y0, y1])?;
        }
        total += wa * row;
    }
    Ok(jac * total)
}

/// Complex-valued counterpart of [`integrate_affine_2d`].
pub fn integrate_affine_2d_complex<F>(
    f: F,
    center: [f64; 2],
    basis: [[f64; 2]; 2],
    rule: &StandardRule,
) -> Result<Complex64>
where
    F: Fn(f64, f64) -> Complex64,
{
    let jac = (basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0]).abs();
    let mut total = Complex64::new(0.0, 0.0);
    for (&a, &wa) in rule.nodes.iter().zip(&rule.weights) {
        let mut row = Complex64::new(0.0, 0.0);
        for (&b, &wb) in rule.nodes.iter().zip(&rule.weights) {
            let y0 = center[0] + basis[0][0] * a + basis[0][1] * b;
            let y1 = center[1] + basis[1][0] * a + basis[1][1] * b;
            let v = f(y0, y1);
            check_finite(v.re, &[y0, y1])?;
            check_finite(v.im, &[y0, y1])?;
            row += v * wb;
        }
        total += row * wa;
    }
    Ok(total * jac)
}

/// `∫ f(y) dy` over `R^d` with `y = center + basis·x`, tensor-product rule in `x`.
pub fn integrate_affine<F>(
    f: F,
    center: &[f64],
    basis: &DMatrix<f64>,
    rule: &StandardRule,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    try_integrate_affine(|y| Ok(f(y)), center, basis, rule)
}

/// [`integrate_affine`] for a fallible integrand; the first error aborts.
pub fn try_integrate_affine<F>(
    mut f: F,
    center: &[f64],
    basis: &DMatrix<f64>,
    rule: &StandardRule,
) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let d = center.len();
    if basis.nrows() != d || basis.ncols() != d {
        return Err(Error::Dimension {
            expected: d,
            got: basis.nrows(),
        });
    }
    let jac = basis.determinant().abs();
    let m = rule.len();
    let mut idx = vec![0usize; d];
    let mut y = vec![0.0; d];
    let mut total = 0.0;
    loop {
        let w: f64 = idx.iter().map(|&i| rule.weights[i]).product();
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = center[r];
            for (c, &i) in idx.iter().enumerate() {
                acc += basis[(r, c)] * rule.nodes[i];
            }
            *yr = acc;
        }
        total += w * check_finite(f(&y)?, &y)?;

        let mut k = 0;
        loop {
            if k == d {
                return Ok(jac * total);
            }
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn fd_derivative<F>(f: F, x: f64, h: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    (f(x + h) - f(x - h)) / (2.0 * h)
}
