//! The two-copy output state `σ₁₂(λ) = (Φ⊗Φ)(|ψ⟩⟨ψ|)` for the Schmidt state
//! `|ψ⟩ = Σ √λ_α |αα⟩`, and its spectrum.
//!
//! In the product basis `|αβ⟩` the state is diagonal plus a rank-one block on
//! the span of `{|αα⟩}`:
//!
//! ```text
//! σ₁₂ = Σ_{αβ} μ_{αβ} |αβ⟩⟨αβ| + t² Σ_{αβ} √(λ_α λ_β) |αα⟩⟨ββ|,
//! μ_{αβ} = c₁ + (c₂/2)(λ_α + λ_β).
//! ```
//!
//! Its eigenvalues split into the `d(d−1)` off-diagonal values
//! `γ_{αβ} = μ_{αβ}` (`α ≠ β`) and the `d` roots of the secular equation
//! `1 + Σ_α t² λ_α / (c₁ + c₂ λ_α − g) = 0`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use crate::channel::Channel;
use crate::density::{hermitian_eigenvalues, CMatrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::secular::SecularSolver;

/// Tolerance on `Σ λ = 1`.
pub const SUM_TOL: f64 = 1e-12;
/// Schmidt coefficients at or below this are deflated: they contribute the
/// explicit root `g = c₁` instead of a pole.
pub const ZERO_WEIGHT: f64 = 1e-14;

/// A point of the probability simplex `Σ_d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtVector {
    lambda: Vec<f64>,
}

impl SchmidtVector {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() < 2 {
            return Err(Error::BadDimension(lambda.len()));
        }
        if let Some(x) = lambda.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidProbability(format!("entry {x} is not a nonnegative number")));
        }
        let sum: f64 = lambda.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidProbability(format!("entries sum to {sum}, not 1")));
        }
        Ok(Self { lambda })
    }

    pub fn uniform(d: usize) -> Self {
        Self { lambda: vec![1.0 / d as f64; d] }
    }

    pub fn vertex(d: usize, alpha: usize) -> Self {
        let mut lambda = vec![0.0; d];
        lambda[alpha] = 1.0;
        Self { lambda }
    }

    /// Draw from the flat Dirichlet distribution on `Σ_d`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Self {
        let gamma = Gamma::new(1.0, 1.0).expect("valid shape");
        let mut lambda: Vec<f64> = (0..d).map(|_| gamma.sample(rng)).collect();
        let s: f64 = lambda.iter().sum();
        lambda.iter_mut().for_each(|x| *x /= s);
        Self { lambda }
    }

    /// Renormalizes a nonnegative vector; used for points produced by
    /// projection, where the sum can be off by a few ulps.
    pub fn from_weights(mut lambda: Vec<f64>) -> Result<Self> {
        let s: f64 = lambda.iter().sum();
        if s.is_nan() || s <= 0.0 {
            return Err(Error::InvalidProbability("weights sum to zero".into()));
        }
        lambda.iter_mut().for_each(|x| *x = x.max(0.0) / s);
        Self::new(lambda)
    }

    pub fn d(&self) -> usize {
        self.lambda.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.lambda
    }

    /// ℓ¹ distance to the closest vertex of the simplex.
    pub fn vertex_distance(&self) -> f64 {
        let max = self.lambda.iter().copied().fold(0.0, f64::max);
        2.0 * (1.0 - max)
    }
}

/// Closed-form spectrum of `σ₁₂(λ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// `γ_{αβ}`, `α ≠ β`, in row-major pair order.
    pub offdiag: Vec<f64>,
    /// Secular roots `g_α`, descending.
    pub secular: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
    pub offdiag_sum: f64,
}

impl Spectrum {
    /// Both families merged, descending.
    pub fn sorted(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.offdiag.iter().chain(&self.secular).copied().collect();
        all.sort_by(|a, b| b.total_cmp(a));
        all
    }

    pub fn total(&self) -> f64 {
        self.offdiag_sum + self.secular.iter().sum::<f64>()
    }
}

fn check_dims(ch: &Channel, lam: &SchmidtVector) -> Result<()> {
    if lam.d() != ch.d() {
        return Err(Error::DimensionMismatch { expected: ch.d(), found: lam.d() });
    }
    Ok(())
}

/// The `d²×d²` matrix of `σ₁₂(λ)` in the basis `|αβ⟩ ↦ α·d + β`.
pub fn sigma12_matrix(ch: &Channel, lam: &SchmidtVector) -> Result<CMatrix> {
    check_dims(ch, lam)?;
    let d = ch.d();
    let l = lam.as_slice();
    let t2 = ch.t() * ch.t();
    let mut m = CMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            let mu = ch.c1() + 0.5 * ch.c2() * (l[a] + l[b]);
            m[(a * d + b, a * d + b)] += Complex64::new(mu, 0.0);
            m[(a * d + a, b * d + b)] += Complex64::new(t2 * (l[a] * l[b]).sqrt(), 0.0);
        }
    }
    Ok(m)
}

pub fn sigma12(ch: &Channel, lam: &SchmidtVector) -> Result<DensityMatrix> {
    DensityMatrix::new(sigma12_matrix(ch, lam)?)
}

/// `(α, β, γ_{αβ})` for all ordered pairs with `α ≠ β`.
pub fn offdiag_eigenvalues(ch: &Channel, lam: &SchmidtVector) -> Result<Vec<(usize, usize, f64)>> {
    check_dims(ch, lam)?;
    let d = ch.d();
    let l = lam.as_slice();
    let mut out = Vec::with_capacity(d * (d - 1));
    for a in 0..d {
        for b in 0..d {
            if a != b {
                out.push((a, b, ch.c1() + 0.5 * ch.c2() * (l[a] + l[b])));
            }
        }
    }
    Ok(out)
}

pub fn secular_roots(ch: &Channel, lam: &SchmidtVector) -> Result<Vec<f64>> {
    secular_roots_with(ch, lam, &SecularSolver::default())
}

pub fn secular_roots_with(ch: &Channel, lam: &SchmidtVector, solver: &SecularSolver) -> Result<Vec<f64>> {
    check_dims(ch, lam)?;
    let d = ch.d();
    if ch.t() == 0.0 {
        return Ok(vec![1.0 / (d * d) as f64; d]);
    }
    let t2 = ch.t() * ch.t();
    let mut roots = Vec::with_capacity(d);
    let mut poles = Vec::with_capacity(d);
    let mut weights = Vec::with_capacity(d);
    for &l in lam.as_slice() {
        if l <= ZERO_WEIGHT {
            roots.push(ch.c1());
        } else {
            poles.push(ch.c1() + ch.c2() * l);
            weights.push(t2 * l);
        }
    }
    roots.extend(solver.roots(&poles, &weights)?);
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok(roots)
}

pub fn full_spectrum(ch: &Channel, lam: &SchmidtVector) -> Result<Spectrum> {
    let offdiag: Vec<f64> = offdiag_eigenvalues(ch, lam)?.into_iter().map(|(_, _, g)| g).collect();
    let secular = secular_roots(ch, lam)?;
    let offdiag_sum = offdiag.iter().sum();
    Ok(Spectrum { offdiag, secular, c1: ch.c1(), c2: ch.c2(), offdiag_sum })
}

/// Eigenvalues of `σ₁₂(λ)` from a dense Hermitian eigensolver, descending.
pub fn dense_spectrum(ch: &Channel, lam: &SchmidtVector) -> Result<Vec<f64>> {
    Ok(hermitian_eigenvalues(&sigma12_matrix(ch, lam)?))
}

/// Max absolute difference between the closed-form and dense spectra.
pub fn dense_delta(ch: &Channel, lam: &SchmidtVector) -> Result<f64> {
    let closed = full_spectrum(ch, lam)?.sorted();
    let dense = dense_spectrum(ch, lam)?;
    Ok(closed.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}
