//! Relativistic oscillator states in the longitudinal `(z, t)` plane.
//!
//! The internal wavefunction of the hadron is a Hermite–Gaussian in the
//! rest-frame coordinates `(z', t')` with no excitation along `t'`. Boosts
//! act passively: `ψ_β(z, t) = ψ_0(z', t')`. In light-cone coordinates the
//! boost is a reciprocal scaling `u' = c·u`, `v' = v/c` with
//! `c = √((1-β)/(1+β))`, which is the direction obtained by inserting the
//! lab-to-rest coordinate boost into `u = (z+t)/√2`, `v = (z-t)/√2`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{
    fd_derivative, hermite, integrate_affine_2d, integrate_affine_2d_complex, QuadratureSpec,
    StandardRule,
};

/// Default central-difference step for [`subsidiary_residual`].
pub const DEFAULT_FD_STEP: f64 = 1e-4;

pub(crate) fn check_velocity(beta: f64) -> Result<()> {
    if beta.is_finite() && beta.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidVelocity(beta))
    }
}

/// Light-cone dilation factor `c = √((1-β)/(1+β))`.
pub fn dilation(beta: f64) -> Result<f64> {
    check_velocity(beta)?;
    Ok(((1.0 - beta) / (1.0 + beta)).sqrt())
}

/// Relativistic velocity addition `(β₁+β₂)/(1+β₁β₂)`.
pub fn velocity_addition(b1: f64, b2: f64) -> f64 {
    (b1 + b2) / (1.0 + b1 * b2)
}

/// Quantum numbers `(a, b, n, k)` and velocity of an oscillator state.
///
/// `a`, `b` are the transverse excitations, `n` the longitudinal one and
/// `k` the timelike one. Only `k = 0` states have wavefunctions here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorState {
    pub a: u32,
    pub b: u32,
    pub n: u32,
    pub k: u32,
    beta: f64,
}

impl OscillatorState {
    pub fn new(a: u32, b: u32, n: u32, k: u32, beta: f64) -> Result<Self> {
        check_velocity(beta)?;
        Ok(Self { a, b, n, k, beta })
    }

    pub fn longitudinal(n: u32, beta: f64) -> Result<Self> {
        Self::new(0, 0, n, 0, beta)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Eigenvalue `λ = a + b + n - k`.
    pub fn lambda(&self) -> i64 {
        self.a as i64 + self.b as i64 + self.n as i64 - self.k as i64
    }

    pub fn mass_squared(&self, m0: f64) -> f64 {
        mass_squared(m0, self.a, self.b, self.n, self.k)
    }

    pub fn wavefunction(&self) -> Result<Wavefunction> {
        if self.k != 0 {
            return Err(Error::InvalidArgument(format!(
                "timelike excitation k = {} has no normalizable wavefunction; k must be 0",
                self.k
            )));
        }
        Wavefunction::new(self.n, self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightConePoint {
    pub u: f64,
    pub v: f64,
}

pub fn lightcone_from_zt(z: f64, t: f64) -> LightConePoint {
    LightConePoint {
        u: (z + t) * FRAC_1_SQRT_2,
        v: (z - t) * FRAC_1_SQRT_2,
    }
}

pub fn zt_from_lightcone(p: LightConePoint) -> (f64, f64) {
    ((p.u + p.v) * FRAC_1_SQRT_2, (p.u - p.v) * FRAC_1_SQRT_2)
}

pub fn boost_lightcone(p: LightConePoint, beta: f64) -> Result<LightConePoint> {
    let c = dilation(beta)?;
    Ok(LightConePoint {
        u: c * p.u,
        v: p.v / c,
    })
}

/// Lab-to-rest coordinate boost along `z`.
pub fn boost_zt(z: f64, t: f64, beta: f64) -> Result<(f64, f64)> {
    check_velocity(beta)?;
    let gamma = 1.0 / (1.0 - beta * beta).sqrt();
    Ok((gamma * (z - beta * t), gamma * (t - beta * z)))
}

fn normalization(n: u32) -> f64 {
    let mut fact = 1.0;
    for k in 2..=n {
        fact *= k as f64;
    }
    (PI * 2f64.powi(n as i32) * fact).sqrt().recip()
}

pub fn psi_rest(n: u32, z: f64, t: f64) -> f64 {
    normalization(n) * hermite(n as usize, z) * (-(z * z + t * t) / 2.0).exp()
}

pub fn psi_boosted(n: u32, beta: f64, z: f64, t: f64) -> Result<f64> {
    let (zp, tp) = boost_zt(z, t, beta)?;
    Ok(psi_rest(n, zp, tp))
}

/// A `k = 0` oscillator wavefunction at fixed velocity, with the boost
/// constants precomputed for repeated evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavefunction {
    n: u32,
    beta: f64,
    c: f64,
    norm: f64,
}

impl Wavefunction {
    pub fn new(n: u32, beta: f64) -> Result<Self> {
        let c = dilation(beta)?;
        Ok(Self {
            n,
            beta,
            c,
            norm: normalization(n),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dilation(&self) -> f64 {
        self.c
    }

    pub fn normalization(&self) -> f64 {
        self.norm
    }

    pub fn eval_zt(&self, z: f64, t: f64) -> f64 {
        let p = lightcone_from_zt(z, t);
        self.eval_lightcone(p.u, p.v)
    }

    pub fn eval_lightcone(&self, u: f64, v: f64) -> f64 {
        let (up, vp) = (self.c * u, v / self.c);
        let zp = (up + vp) * FRAC_1_SQRT_2;
        self.norm * hermite(self.n as usize, zp) * (-(up * up + vp * vp) / 2.0).exp()
    }

    /// Standard deviations of the Gaussian factor of `ψ` along `u` and `v`.
    pub fn lightcone_widths(&self) -> (f64, f64) {
        (1.0 / self.c, self.c)
    }

    /// Affine map from standardized coordinates to `(z, t)` covering `|ψ|²`.
    fn zt_density_basis(&self) -> [[f64; 2]; 2] {
        let (su, sv) = self.lightcone_widths();
        // |ψ|² has widths su/√2, sv/√2 along u and v; rotate into (z, t).
        let (a, b) = (su / 2.0, sv / 2.0);
        [[a, b], [a, -b]]
    }
}

/// `∫∫ ψ_β^m ψ_β^n dz dt` by quadrature in the lab frame.
pub fn overlap(m: u32, n: u32, beta: f64, spec: &QuadratureSpec) -> Result<f64> {
    let envelope = Wavefunction::new(m, beta)?.zt_density_basis();
    let rule = StandardRule::new(spec)?;
    integrate_affine_2d(
        |z, t| {
            let a = psi_boosted(m, beta, z, t).unwrap_or(f64::NAN);
            let b = psi_boosted(n, beta, z, t).unwrap_or(f64::NAN);
            a * b
        },
        [0.0, 0.0],
        envelope,
        &rule,
    )
}

/// `∫∫ |ψ_β^n|² dz dt`.
pub fn norm_squared(n: u32, beta: f64, spec: &QuadratureSpec) -> Result<f64> {
    overlap(n, n, beta, spec)
}

/// Momentum-energy wavefunction in `(p_u, p_v)`.
///
/// Closed form for `n = 0`; quadrature of the Fourier integral otherwise.
/// The value is complex in general: for odd `n` it is purely imaginary.
pub fn phi_momentum(
    n: u32,
    beta: f64,
    p_u: f64,
    p_v: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if n == 0 {
        let c = dilation(beta)?;
        let e = -0.5 * (p_u * p_u / (c * c) + c * c * p_v * p_v);
        return Ok(Complex64::new(PI.sqrt().recip() * e.exp(), 0.0));
    }
    phi_momentum_numeric(n, beta, p_u, p_v, spec)
}

/// `(1/2π) ∫∫ ψ_β(u, v) e^{-i(u p_u + v p_v)} du dv`, using
/// `z p_z - t p_0 = u p_u + v p_v` and the unit Jacobian of `(z,t) -> (u,v)`.
pub fn phi_momentum_numeric(
    n: u32,
    beta: f64,
    p_u: f64,
    p_v: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let wf = Wavefunction::new(n, beta)?;
    let rule = StandardRule::new(spec)?;
    phi_with_rule(&wf, p_u, p_v, &rule)
}

pub(crate) fn phi_with_rule(
    wf: &Wavefunction,
    p_u: f64,
    p_v: f64,
    rule: &StandardRule,
) -> Result<Complex64> {
    let (su, sv) = wf.lightcone_widths();
    let v = integrate_affine_2d_complex(
        |u, v| {
            let phase = -(u * p_u + v * p_v);
            Complex64::from_polar(wf.eval_lightcone(u, v), phase)
        },
        [0.0, 0.0],
        [[su, 0.0], [0.0, sv]],
        rule,
    )?;
    Ok(v / (2.0 * PI))
}

/// `|φ_β(p_u, p_v)|²`.
pub fn phi_momentum_density(
    n: u32,
    beta: f64,
    p_u: f64,
    p_v: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(phi_momentum(n, beta, p_u, p_v, spec)?.norm_sqr())
}

/// `|t'ψ + ∂ψ/∂t'|` at a lab point, differentiating along the rest-frame
/// time axis, i.e. the lab direction `γ(β, 1)` in `(z, t)`.
pub fn subsidiary_residual(n: u32, beta: f64, z: f64, t: f64, h: f64) -> Result<f64> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "step h must be > 0, got {h}"
        )));
    }
    let (_, tp) = boost_zt(z, t, beta)?;
    let gamma = 1.0 / (1.0 - beta * beta).sqrt();
    let (dz, dt) = (gamma * beta, gamma);
    let along = |s: f64| psi_boosted(n, beta, z + s * dz, t + s * dt).unwrap_or(f64::NAN);
    let psi = along(0.0);
    let deriv = fd_derivative(along, 0.0, h);
    Ok((tp * psi + deriv).abs())
}

/// `M² = m₀² + λ + 1` with `λ = a + b + n - k`.
pub fn mass_squared(m0: f64, a: u32, b: u32, n: u32, k: u32) -> f64 {
    let lambda = a as i64 + b as i64 + n as i64 - k as i64;
    m0 * m0 + (lambda + 1) as f64
}

/// Number of `(a, b, n)` with `a + b + n = λ` (the `k = 0` level degeneracy).
pub fn degeneracy(lambda: u64) -> u64 {
    (lambda + 1) * (lambda + 2) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

    #[test]
    fn lightcone_examples() {
        let p = lightcone_from_zt(1.0, 1.0);
        assert!((p.u - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.v, 0.0);
        assert_eq!(
            lightcone_from_zt(0.0, 0.0),
            LightConePoint { u: 0.0, v: 0.0 }
        );
        for &(z, t) in &[(0.3, -1.7), (4.0, 2.5), (-3.25, 0.125)] {
            let (z2, t2) = zt_from_lightcone(lightcone_from_zt(z, t));
            assert!((z2 - z).abs() <= 4.0 * f64::EPSILON * z.abs().max(t.abs()));
            assert!((t2 - t).abs() <= 4.0 * f64::EPSILON * z.abs().max(t.abs()));
        }
    }

    #[test]
    fn lightcone_boost_examples() {
        let b = boost_lightcone(LightConePoint { u: 1.0, v: 1.0 }, 0.6).unwrap();
        assert!((b.u - 0.5).abs() < 1e-15);
        assert!((b.v - 2.0).abs() < 1e-15);
        let p = LightConePoint { u: 0.7, v: -1.3 };
        assert_eq!(boost_lightcone(p, 0.0).unwrap(), p);
        assert_eq!(boost_lightcone(p, 1.0), Err(Error::InvalidVelocity(1.0)));
        assert!(boost_lightcone(p, -1.2).is_err());
    }

    #[test]
    fn boost_zt_examples() {
        let (z, t) = boost_zt(1.0, 0.0, 0.6).unwrap();
        assert!((z - 1.25).abs() < 1e-15);
        assert!((t + 0.75).abs() < 1e-15);
        assert_eq!(boost_zt(0.4, -2.0, 0.0).unwrap(), (0.4, -2.0));
        assert!(boost_zt(0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn zt_boost_matches_lightcone_boost() {
        for &beta in &[-0.9, -0.3, 0.45, 0.99] {
            for &(z, t) in &[(1.0, 0.0), (0.2, -1.1), (-2.0, 3.0)] {
                let (zp, tp) = boost_zt(z, t, beta).unwrap();
                let a = lightcone_from_zt(zp, tp);
                let b = boost_lightcone(lightcone_from_zt(z, t), beta).unwrap();
                assert!((a.u - b.u).abs() < 1e-12 && (a.v - b.v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn psi_rest_examples() {
        assert!((psi_rest(0, 0.0, 0.0) - INV_SQRT_PI).abs() < 1e-15);
        assert!((psi_rest(0, 0.0, 0.0) - 0.564_189_583_5).abs() < 1e-10);
        for t in [-1.0, 0.0, 2.5] {
            assert_eq!(psi_rest(1, 0.0, t), 0.0);
        }
    }

    #[test]
    fn psi_boosted_examples() {
        let v = psi_boosted(0, 0.6, 1.0, 0.0).unwrap();
        let expected = INV_SQRT_PI * (-2.125f64 / 2.0).exp();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.194_978_702_8).abs() < 1e-10);
        assert_eq!(
            psi_boosted(3, 0.0, 0.4, -0.2).unwrap(),
            psi_rest(3, 0.4, -0.2)
        );
        assert!(psi_boosted(0, -1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn ground_state_lightcone_form() {
        for &beta in &[-0.6, 0.0, 0.3, 0.8] {
            let r = (1.0 - beta) / (1.0 + beta);
            for i in 0..21 {
                for j in 0..21 {
                    let (z, t) = (-3.0 + 0.3 * i as f64, -3.0 + 0.3 * j as f64);
                    let p = lightcone_from_zt(z, t);
                    let closed = INV_SQRT_PI * (-0.5 * (r * p.u * p.u + p.v * p.v / r)).exp();
                    let v = psi_boosted(0, beta, z, t).unwrap();
                    assert!((v - closed).abs() < 1e-14, "beta {beta} ({z},{t})");
                }
            }
        }
    }

    #[test]
    fn wavefunction_paths_agree() {
        for n in 0..4 {
            for &beta in &[-0.7, 0.0, 0.5] {
                let wf = Wavefunction::new(n, beta).unwrap();
                for &(z, t) in &[(0.3, 0.9), (-1.5, 0.2), (2.0, -2.0)] {
                    let a = wf.eval_zt(z, t);
                    let b = psi_boosted(n, beta, z, t).unwrap();
                    assert!((a - b).abs() < 1e-13, "n {n} beta {beta}");
                }
            }
        }
    }

    #[test]
    fn normalized_and_orthogonal() {
        let spec = QuadratureSpec::default();
        for &beta in &[-0.9, -0.4, 0.0, 0.6, 0.9] {
            for m in 0..4 {
                for n in 0..4 {
                    let o = overlap(m, n, beta, &spec).unwrap();
                    let target = if m == n { 1.0 } else { 0.0 };
                    assert!((o - target).abs() < 1e-8, "beta {beta} <{m}|{n}> = {o}");
                }
            }
        }
        let gh = QuadratureSpec::gauss_hermite(8).unwrap();
        assert!((norm_squared(2, 0.0, &gh).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phi_examples() {
        let spec = QuadratureSpec::default();
        for &beta in &[-0.5, 0.0, 0.6] {
            let v = phi_momentum(0, beta, 0.0, 0.0, &spec).unwrap();
            assert!((v.re - INV_SQRT_PI).abs() < 1e-15 && v.im == 0.0);
        }
        let v = phi_momentum(0, 0.6, 0.5, 0.0, &spec).unwrap();
        assert!((v.re - INV_SQRT_PI * (-0.5f64).exp()).abs() < 1e-15);
        assert!((v.re - 0.342_198_280_3).abs() < 1e-10);

        // Rest-frame Gaussian at β = 0.
        for &(pu, pv) in &[(0.3, -0.4), (1.5, 1.0)] {
            let v = phi_momentum(0, 0.0, pu, pv, &spec).unwrap();
            let g = INV_SQRT_PI * (-(pu * pu + pv * pv) / 2.0f64).exp();
            assert!((v.re - g).abs() < 1e-10);
        }
    }

    #[test]
    fn phi_quadrature_matches_closed_form() {
        let spec = QuadratureSpec::default();
        for &beta in &[-0.6, 0.0, 0.3, 0.6] {
            for i in 0..7 {
                for j in 0..7 {
                    let (pu, pv) = (-1.5 + 0.5 * i as f64, -1.5 + 0.5 * j as f64);
                    let a = phi_momentum(0, beta, pu, pv, &spec).unwrap();
                    let b = phi_momentum_numeric(0, beta, pu, pv, &spec).unwrap();
                    assert!((a - b).norm() < 1e-8, "beta {beta} ({pu},{pv})");
                }
            }
        }
    }

    #[test]
    fn excited_phi_matches_hermite_function_oracle() {
        // Rest frame: φ⁰(p_z, p_0) = (-i)^n N_n H_n(p_z) e^{-(p_z²+p_0²)/2}; boosted:
        // φ_β(p_u, p_v) = φ_0(p_u / c, c p_v).
        let spec = QuadratureSpec::default();
        for n in 1..4u32 {
            for &beta in &[0.0, 0.6, -0.3] {
                let c = dilation(beta).unwrap();
                for &(pu, pv) in &[(0.4, -0.2), (1.0, 0.7), (-0.8, 1.3)] {
                    let (qu, qv) = (pu / c, c * pv);
                    let pz = (qu + qv) * FRAC_1_SQRT_2;
                    let p0 = (qv - qu) * FRAC_1_SQRT_2;
                    let mag = psi_rest(n, pz, p0);
                    let expected = Complex64::new(0.0, -1.0).powu(n) * mag;
                    let got = phi_momentum(n, beta, pu, pv, &spec).unwrap();
                    assert!(
                        (got - expected).norm() < 1e-10,
                        "n {n} beta {beta}: {got} vs {expected}"
                    );
                }
            }
        }
    }

    #[test]
    fn subsidiary_condition_holds() {
        let r = subsidiary_residual(0, 0.0, 0.5, -0.2, 1e-4).unwrap();
        assert!(r < 1e-6);
        for i in 0..5 {
            for j in 0..5 {
                let (z, t) = (-2.0 + i as f64, -2.0 + j as f64);
                let r = subsidiary_residual(2, 0.6, z, t, 1e-4).unwrap();
                assert!(r < 1e-6, "({z},{t}): {r}");
            }
        }
        assert!(subsidiary_residual(0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(subsidiary_residual(0, 1.0, 0.0, 0.0, 1e-4).is_err());
    }

    #[test]
    fn subsidiary_residual_is_second_order() {
        let r1 = subsidiary_residual(1, 0.3, 0.7, 0.4, 1e-3).unwrap();
        let r2 = subsidiary_residual(1, 0.3, 0.7, 0.4, 5e-4).unwrap();
        let ratio = r1 / r2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(mass_squared(0.0, 0, 0, 0, 0), 1.0);
        assert_eq!(mass_squared(2.0, 1, 1, 0, 0), 7.0);
        assert_eq!(
            mass_squared(1.0, 1, 0, 2, 0) - mass_squared(1.0, 1, 0, 2, 1),
            1.0
        );
        assert_eq!(degeneracy(0), 1);
        assert_eq!(degeneracy(2), 6);
        for lambda in 0..=20u64 {
            let mut count = 0;
            for a in 0..=lambda {
                for b in 0..=lambda - a {
                    let _n = lambda - a - b;
                    count += 1;
                }
            }
            assert_eq!(degeneracy(lambda), count);
        }
        let s = OscillatorState::new(1, 2, 3, 1, 0.5).unwrap();
        assert_eq!(s.lambda(), 5);
        assert!(s.wavefunction().is_err());
        assert!(OscillatorState::new(0, 0, 0, 0, 1.0).is_err());
    }
}
