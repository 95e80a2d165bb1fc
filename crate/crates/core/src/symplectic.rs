//! Real symplectic matrices in two and four phase-space dimensions.
//!
//! Phase-space vectors are ordered positions first, then momenta:
//! `(q, p)` in 2D and `(q1, q2, p1, p2)` in 4D. With that ordering the
//! symplectic form is the block matrix `[[0, I], [-I, 0]]`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Number of elementary generators multiplied together by [`random_symplectic`].
pub const DEFAULT_GENERATORS: usize = 8;

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 => Ok(()),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

pub fn symplectic_form(dim: usize) -> Result<DMatrix<f64>> {
    check_dim(dim)?;
    let half = dim / 2;
    let mut s = DMatrix::zeros(dim, dim);
    for i in 0..half {
        s[(i, i + half)] = 1.0;
        s[(i + half, i)] = -1.0;
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticCheck {
    pub ok: bool,
    /// Max-abs entry of `Λ σ Λᵀ - σ`.
    pub residual: f64,
}

pub fn is_symplectic(m: &DMatrix<f64>, tol: f64) -> Result<SymplecticCheck> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let s = symplectic_form(m.nrows())?;
    let residual = (m * &s * m.transpose() - &s).amax();
    Ok(SymplecticCheck {
        ok: residual <= tol,
        residual,
    })
}

/// A matrix known to satisfy `Λ σ Λᵀ = σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SympMatrix {
    entries: DMatrix<f64>,
}

impl SympMatrix {
    pub fn new(entries: DMatrix<f64>, tol: f64) -> Result<Self> {
        let check = is_symplectic(&entries, tol)?;
        if !check.ok {
            return Err(Error::InvalidArgument(format!(
                "matrix is not symplectic (residual {:e} > {:e})",
                check.residual, tol
            )));
        }
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            entries: DMatrix::identity(dim, dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// Product of two symplectic matrices, which is again symplectic.
    pub fn compose(&self, other: &SympMatrix) -> Result<SympMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(SympMatrix {
            entries: &self.entries * &other.entries,
        })
    }

    /// For dim 2, the rows `(μ, ν)` and `(μ', ν')`; `μν' - νμ' = 1`.
    pub fn rows_2d(&self) -> Option<([f64; 2], [f64; 2])> {
        (self.dim() == 2).then(|| {
            let m = &self.entries;
            ([m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]])
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Generator {
    Rotation {
        pair: usize,
        angle: f64,
    },
    Squeeze {
        pair: usize,
        s: f64,
    },
    /// `q_i -> q_i + a p_i`
    Shear {
        pair: usize,
        a: f64,
    },
    /// `[[I, S], [0, I]]` with `S` symmetric (dim 4 only)
    SymmetricShear {
        s11: f64,
        s12: f64,
        s22: f64,
    },
    /// `[[A, 0], [0, A^{-T}]]` with `A = [[1, b], [0, 1]]` (dim 4 only)
    PointMix {
        b: f64,
    },
}

impl Generator {
    fn sample(rng: &mut ChaCha8Rng, dim: usize) -> Self {
        let half = dim / 2;
        let kinds = if dim == 4 { 5 } else { 3 };
        let pair = rng.random_range(0..half);
        match rng.random_range(0..kinds) {
            0 => Generator::Rotation {
                pair,
                angle: rng.random_range(0.0..std::f64::consts::TAU),
            },
            1 => Generator::Squeeze {
                pair,
                s: rng.random_range(0.5..2.0),
            },
            2 => Generator::Shear {
                pair,
                a: rng.random_range(-1.0..1.0),
            },
            3 => Generator::SymmetricShear {
                s11: rng.random_range(-1.0..1.0),
                s12: rng.random_range(-1.0..1.0),
                s22: rng.random_range(-1.0..1.0),
            },
            _ => Generator::PointMix {
                b: rng.random_range(-1.0..1.0),
            },
        }
    }

    fn matrix(&self, dim: usize) -> DMatrix<f64> {
        let half = dim / 2;
        let mut m = DMatrix::identity(dim, dim);
        match *self {
            Generator::Rotation { pair, angle } => {
                let (s, c) = angle.sin_cos();
                let (q, p) = (pair, pair + half);
                m[(q, q)] = c;
                m[(q, p)] = s;
                m[(p, q)] = -s;
                m[(p, p)] = c;
            }
            Generator::Squeeze { pair, s } => {
                m[(pair, pair)] = s;
                m[(pair + half, pair + half)] = 1.0 / s;
            }
            Generator::Shear { pair, a } => {
                m[(pair, pair + half)] = a;
            }
            Generator::SymmetricShear { s11, s12, s22 } => {
                m[(0, 2)] = s11;
                m[(0, 3)] = s12;
                m[(1, 2)] = s12;
                m[(1, 3)] = s22;
            }
            Generator::PointMix { b } => {
                m[(0, 1)] = b;
                // A^{-T} = [[1, 0], [-b, 1]]
                m[(3, 2)] = -b;
            }
        }
        m
    }
}

/// Seeded random symplectic matrix built from [`DEFAULT_GENERATORS`] elementary generators.
pub fn random_symplectic(dim: usize, seed: u64) -> Result<SympMatrix> {
    random_symplectic_with(dim, seed, DEFAULT_GENERATORS)
}

/// Product of `generators` seeded elementary symplectic maps; zero gives the identity.
pub fn random_symplectic_with(dim: usize, seed: u64, generators: usize) -> Result<SympMatrix> {
    check_dim(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::identity(dim, dim);
    for _ in 0..generators {
        m = Generator::sample(&mut rng, dim).matrix(dim) * m;
    }
    Ok(SympMatrix { entries: m })
}
