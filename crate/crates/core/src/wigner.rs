//! Wigner functions on the light-cone phase space `(u, v, p_u, p_v)` and on
//! the one-dimensional phase space `(q, p)`.
//!
//! Ground states are represented exactly as normalized Gaussians. Excited
//! oscillator states are evaluated pointwise by quadrature of the Wigner
//! transform
//!
//! ```text
//! W(u, p_u; v, p_v) = (1/π²) ∫∫ ψ(u+x, v+y) ψ(u-x, v-y) e^{2i(p_u x + p_v y)} dx dy
//! ```
//!
//! normalized so that `∫W = 1` and its position and momentum marginals are
//! `|ψ|²` and `|φ|²`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oscillator::{dilation, Wavefunction};
use crate::quadrature::{hermite_complex, try_integrate_affine, QuadratureSpec, StandardRule};

/// Imaginary parts at or below this are discarded silently.
pub const IMAG_DISCARD: f64 = 1e-10;
/// Imaginary parts above this are reported as errors.
pub const IMAG_LIMIT: f64 = 1e-8;

const SYMMETRY_TOL: f64 = 1e-12;

/// A point in the light-cone phase space, stored in the order `(u, v, p_u, p_v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint4 {
    pub u: f64,
    pub v: f64,
    pub p_u: f64,
    pub p_v: f64,
}

impl PhasePoint4 {
    pub fn new(u: f64, v: f64, p_u: f64, p_v: f64) -> Self {
        Self { u, v, p_u, p_v }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.u, self.v, self.p_u, self.p_v]
    }

    pub fn from_slice(xi: &[f64]) -> Result<Self> {
        match *xi {
            [u, v, p_u, p_v] => Ok(Self { u, v, p_u, p_v }),
            _ => Err(Error::Dimension {
                expected: 4,
                got: xi.len(),
            }),
        }
    }
}

/// A phase-space density that can be integrated numerically.
pub trait PhaseSpaceDensity: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, xi: &[f64]) -> Result<f64>;

    /// Mean and covariance of a Gaussian whose tails dominate the density.
    /// Used only to place quadrature nodes.
    fn envelope(&self) -> (DVector<f64>, DMatrix<f64>);
}

/// Normalized Gaussian Wigner function.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianWignerState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    precision: DMatrix<f64>,
    peak: f64,
}

impl GaussianWignerState {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim != 2 && dim != 4 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: cov.nrows(),
            });
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::NotPositiveDefinite(format!(
                "asymmetry {asym:e} exceeds {SYMMETRY_TOL:e}"
            )));
        }
        let chol = cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorization failed".into()))?;
        let det = chol.determinant();
        let precision = chol.inverse();
        let peak = (2.0 * PI).powf(-(dim as f64) / 2.0) / det.sqrt();
        Ok(Self {
            mean,
            cov,
            precision,
            peak,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Density value at the mean, `(2π)^{-d/2} det(Σ)^{-1/2}`.
    pub fn peak(&self) -> f64 {
        self.peak
    }

    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        if xi.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: xi.len(),
            });
        }
        let d = DVector::from_column_slice(xi) - &self.mean;
        let q = d.dot(&(&self.precision * &d));
        Ok(self.peak * (-0.5 * q).exp())
    }
}

impl PhaseSpaceDensity for GaussianWignerState {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn eval(&self, xi: &[f64]) -> Result<f64> {
        GaussianWignerState::eval(self, xi)
    }

    fn envelope(&self) -> (DVector<f64>, DMatrix<f64>) {
        (self.mean.clone(), self.cov.clone())
    }
}

/// Closed-form Wigner function of the boosted oscillator ground state.
///
/// Diagonal covariance with `Var(u) = Var(p_v) = (1+β)/(2(1-β))` and
/// `Var(v) = Var(p_u) = (1-β)/(2(1+β))`.
pub fn wigner_ground(beta: f64) -> Result<GaussianWignerState> {
    let c = dilation(beta)?;
    let wide = 0.5 / (c * c);
    let narrow = 0.5 * c * c;
    GaussianWignerState::new(
        DVector::zeros(4),
        DMatrix::from_diagonal(&DVector::from_vec(vec![wide, narrow, narrow, wide])),
    )
}

/// Ground state of the unit-mass, unit-frequency oscillator on `(q, p)`.
pub fn oscillator_ground_1d() -> GaussianWignerState {
    GaussianWignerState::new(DVector::zeros(2), DMatrix::identity(2, 2) * 0.5)
        .expect("isotropic covariance is positive definite")
}

/// `S_β = diag(c, 1/c, 1/c, c)`, with `W_β(ξ) = W_0(S_β ξ)`.
pub fn lightcone_scaling(beta: f64) -> Result<DMatrix<f64>> {
    let c = dilation(beta)?;
    Ok(DMatrix::from_diagonal(&DVector::from_vec(vec![
        c,
        1.0 / c,
        1.0 / c,
        c,
    ])))
}

/// Galileo boost with unit mass: `W(q, p) -> W(q - vt, p - v)`.
pub fn galileo_shift(state: &GaussianWignerState, v: f64, t: f64) -> Result<GaussianWignerState> {
    if state.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: state.dim(),
        });
    }
    let mut shifted = state.clone();
    shifted.mean[0] += v * t;
    shifted.mean[1] += v;
    Ok(shifted)
}

/// Wigner function of an excited oscillator state, evaluated by quadrature.
#[derive(Debug, Clone)]
pub struct OscillatorWigner {
    wf: Wavefunction,
    rule: StandardRule,
    envelope: GaussianWignerState,
}

impl OscillatorWigner {
    pub fn new(n: u32, beta: f64, spec: &QuadratureSpec) -> Result<Self> {
        Ok(Self {
            wf: Wavefunction::new(n, beta)?,
            rule: StandardRule::new(spec)?,
            envelope: wigner_ground(beta)?,
        })
    }

    pub fn n(&self) -> u32 {
        self.wf.n()
    }

    pub fn beta(&self) -> f64 {
        self.wf.beta()
    }

    /// Complex value of the transform before the imaginary-part check.
    ///
    /// The phase `e^{2i p x}` is absorbed by completing the square, so the
    /// rule only sees `P(x + i p/a) e^{-a x²}` and needs no extra nodes at
    /// large momenta.
    pub fn eval_complex(&self, xi: PhasePoint4) -> Complex64 {
        let c = self.wf.dilation();
        let n = self.wf.n() as usize;
        // Gaussian factor of ψ(u+x, v+y) ψ(u-x, v-y) splits into
        // e^{-c²(u²+x²)} e^{-(v²+y²)/c²}; widths of the x and y factors:
        let sx = FRAC_1_SQRT_2 / c;
        let sy = FRAC_1_SQRT_2 * c;
        let (ax, ay) = (c * c, 1.0 / (c * c));

        let nodes = self.rule.nodes();
        let weights = self.rule.weights();
        let shifted = |s: f64, a: f64, p: f64| -> Vec<(Complex64, f64)> {
            nodes
                .iter()
                .zip(weights)
                .map(|(&t, &w)| {
                    let x = s * t;
                    (Complex64::new(x, p / a), w * (-a * x * x).exp())
                })
                .collect()
        };
        let gx = shifted(sx, ax, xi.p_u);
        let gy = shifted(sy, ay, xi.p_v);

        let mut sum = Complex64::new(0.0, 0.0);
        if n == 0 {
            let sx_sum: f64 = gx.iter().map(|p| p.1).sum();
            let sy_sum: f64 = gy.iter().map(|p| p.1).sum();
            sum += sx_sum * sy_sum;
        } else {
            // Rest-frame longitudinal coordinate z' = (c·u + v/c)/√2 at u±x, v±y.
            let zc = (c * xi.u + xi.v / c) * FRAC_1_SQRT_2;
            for &(x, wx) in &gx {
                let mut row = Complex64::new(0.0, 0.0);
                for &(y, wy) in &gy {
                    let d = (c * x + y / c) * FRAC_1_SQRT_2;
                    row += wy * (hermite_complex(n, zc + d) * hermite_complex(n, zc - d));
                }
                sum += wx * row;
            }
        }
        let norm = self.wf.normalization();
        let gauss = (-ax * xi.u * xi.u - ay * xi.v * xi.v).exp();
        let phase = (-xi.p_u * xi.p_u / ax - xi.p_v * xi.p_v / ay).exp();
        sum * (norm * norm * gauss * phase * sx * sy / (PI * PI))
    }

    pub fn eval_point(&self, xi: PhasePoint4) -> Result<f64> {
        let w = self.eval_complex(xi);
        check_imaginary(w)
    }
}

pub(crate) fn check_imaginary(w: Complex64) -> Result<f64> {
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::Integrand {
            value: if w.re.is_finite() { w.im } else { w.re },
            point: vec![],
        });
    }
    if w.im.abs() > IMAG_LIMIT {
        return Err(Error::ImaginaryResidual(w.im.abs()));
    }
    Ok(w.re)
}

impl PhaseSpaceDensity for OscillatorWigner {
    fn dim(&self) -> usize {
        4
    }

    fn eval(&self, xi: &[f64]) -> Result<f64> {
        self.eval_point(PhasePoint4::from_slice(xi)?)
    }

    fn envelope(&self) -> (DVector<f64>, DMatrix<f64>) {
        self.envelope.envelope()
    }
}

/// Wigner function of the `n`-th boosted oscillator state by quadrature.
pub fn wigner_numeric(n: u32, beta: f64, xi: PhasePoint4, spec: &QuadratureSpec) -> Result<f64> {
    OscillatorWigner::new(n, beta, spec)?.eval_point(xi)
}

/// `∫ W dξ` over the full phase space, nodes placed on the density's envelope.
pub fn total_probability<D: PhaseSpaceDensity + ?Sized>(
    density: &D,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let (mean, cov) = density.envelope();
    let basis = cov
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("envelope covariance".into()))?
        .l();
    let rule = StandardRule::new(spec)?;
    try_integrate_affine(|xi| density.eval(xi), mean.as_slice(), &basis, &rule)
}
