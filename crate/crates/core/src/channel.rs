//! The transpose depolarizing channel `Φ(μ) = t μᵀ + (1 − t) tr μ · I/d`.
//!
//! Transposition is taken in the computational basis. The admissible range is
//! `−1/(d−1) ≤ t ≤ 1/(d+1)`; inside it `Φ` is a convex mixture of
//! `Φ₊(μ) = (I tr μ + μᵀ)/(d+1)` and the antisymmetric channel
//! `Φ₋(μ) = (I tr μ − μᵀ)/(d−1)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::density::{CMatrix, DensityMatrix};
use crate::error::{Error, Result};

/// Slack allowed when comparing `t` against the range endpoints, so that
/// endpoints computed in floating point (e.g. `-1.0 / 3.0`) are accepted.
const RANGE_SLACK: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Channel {
    d: usize,
    t: f64,
    c1: f64,
    c2: f64,
}

impl Channel {
    pub fn new(d: usize, t: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::BadDimension(d));
        }
        let (lo, hi) = (Self::lower_endpoint(d), Self::upper_endpoint(d));
        if !t.is_finite() || t < lo - RANGE_SLACK || t > hi + RANGE_SLACK {
            return Err(Error::OutOfRange { d, t, lo, hi });
        }
        let df = d as f64;
        Ok(Self { d, t, c1: (1.0 - t).powi(2) / (df * df), c2: 2.0 * t * (1.0 - t) / df })
    }

    /// `−1/(d−1)`, where `Φ = Φ₋`.
    pub fn lower_endpoint(d: usize) -> f64 {
        -1.0 / (d as f64 - 1.0)
    }

    /// `1/(d+1)`, the `Φ₊` end of the family.
    pub fn upper_endpoint(d: usize) -> f64 {
        1.0 / (d as f64 + 1.0)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `(1−t)²/d²`
    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// `2t(1−t)/d`
    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// `c₂/c₁ = 2td/(1−t)`, in `[−2, 0]` for `t ≤ 0`.
    pub fn ratio(&self) -> f64 {
        2.0 * self.t * self.d as f64 / (1.0 - self.t)
    }

    /// Total weight `(d−1)(1−t²)/d` of the `d(d−1)` off-diagonal output
    /// eigenvalues of the two-copy Schmidt state. Independent of `λ`.
    pub fn offdiag_mass(&self) -> f64 {
        let df = self.d as f64;
        (df - 1.0) * (1.0 - self.t * self.t) / df
    }

    /// Output spectrum on any pure input, descending:
    /// `t + (1−t)/d` once and `(1−t)/d` with multiplicity `d−1`.
    pub fn pure_output_spectrum(&self) -> Vec<f64> {
        let df = self.d as f64;
        let base = (1.0 - self.t) / df;
        let top = self.t + base;
        let mut out = vec![base; self.d];
        out[0] = top;
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: rho.dim() });
        }
        DensityMatrix::new(self.apply_matrix(rho.matrix()))
    }

    /// The channel on an arbitrary `d×d` matrix (linear extension).
    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let d = self.d;
        let tr = m.trace();
        let mut out = m.transpose() * Complex64::new(self.t, 0.0);
        let diag = tr * ((1.0 - self.t) / d as f64);
        for i in 0..d {
            out[(i, i)] += diag;
        }
        out
    }

    /// `(Φ⊗Φ)(X)` for a `d²×d²` matrix, computed from partial traces:
    /// `t² Xᵀ + t s ((Tr₂X)ᵀ ⊗ I + I ⊗ (Tr₁X)ᵀ) + s² tr X · I` with `s = (1−t)/d`.
    pub fn apply_product(&self, x: &CMatrix) -> CMatrix {
        let d = self.d;
        let n = d * d;
        assert_eq!(x.nrows(), n, "apply_product expects a d²×d² matrix");
        let t = self.t;
        let s = (1.0 - t) / d as f64;
        let mut tr2 = CMatrix::zeros(d, d);
        let mut tr1 = CMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                for k in 0..d {
                    tr2[(a, b)] += x[(a * d + k, b * d + k)];
                    tr1[(a, b)] += x[(k * d + a, k * d + b)];
                }
            }
        }
        let eye = CMatrix::identity(d, d);
        let mut out = x.transpose() * Complex64::new(t * t, 0.0);
        out += (tr2.transpose().kronecker(&eye) + eye.kronecker(&tr1.transpose())) * Complex64::new(t * s, 0.0);
        let diag = x.trace() * (s * s);
        for i in 0..n {
            out[(i, i)] += diag;
        }
        out
    }

    /// Mixing weights of `Φ = w₊ Φ₊ + w₋ Φ₋`.
    pub fn decompose(&self) -> Decomposition {
        let df = self.d as f64;
        let scale = (df * df - 1.0) / (2.0 * df);
        Decomposition {
            plus: scale * (self.t + 1.0 / (df - 1.0)),
            minus: -scale * (self.t - 1.0 / (df + 1.0)),
        }
    }

    /// Kraus operators of `Φ` itself: those of `Φ±` scaled by `√w±`.
    pub fn kraus(&self) -> Vec<CMatrix> {
        let w = self.decompose();
        let mut ops = Vec::new();
        for (sign, weight) in [(Sign::Plus, w.plus), (Sign::Minus, w.minus)] {
            if weight <= 0.0 {
                continue;
            }
            let scale = Complex64::new(weight.sqrt(), 0.0);
            let set = kraus_set(self.d, sign).expect("d >= 2 checked at construction");
            ops.extend(set.operators.into_iter().map(|k| k * scale));
        }
        ops
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub plus: f64,
    pub minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `Φ±(μ) = (I tr μ ± μᵀ)/(d ± 1)`.
pub fn phi_sign(sign: Sign, m: &CMatrix) -> CMatrix {
    let d = m.nrows();
    let s = sign.value();
    let mut out = m.transpose() * Complex64::new(s, 0.0);
    let tr = m.trace();
    for i in 0..d {
        out[(i, i)] += tr;
    }
    out / Complex64::new(d as f64 + s, 0.0)
}

#[derive(Debug, Clone)]
pub struct KrausSet {
    pub dim: usize,
    pub sign: Sign,
    pub operators: Vec<CMatrix>,
}

/// Operators `(|i⟩⟨j| ± |j⟩⟨i|)/√(2(d±1))` over all ordered pairs `(i, j)`;
/// the vanishing `i = j` operators of the antisymmetric set are dropped.
pub fn kraus_set(d: usize, sign: Sign) -> Result<KrausSet> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let s = sign.value();
    let norm = 1.0 / (2.0 * (d as f64 + s)).sqrt();
    let mut operators = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            if i == j && sign == Sign::Minus {
                continue;
            }
            let mut k = CMatrix::zeros(d, d);
            k[(i, j)] += Complex64::new(norm, 0.0);
            k[(j, i)] += Complex64::new(s * norm, 0.0);
            operators.push(k);
        }
    }
    Ok(KrausSet { dim: d, sign, operators })
}

impl KrausSet {
    /// `Σ_k K ρ K†`
    pub fn apply(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for k in &self.operators {
            out += k * m * k.adjoint();
        }
        out
    }

    /// `Σ_k K† K`, which equals the identity.
    pub fn completeness(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for k in &self.operators {
            out += k.adjoint() * k;
        }
        out
    }
}

/// Applies the single-site Kraus map `ops` to each tensor factor of a
/// `d²×d²` matrix in turn, i.e. `(Φ⊗Φ)(X)` without forming `d⁴` products.
pub fn apply_kraus_product(ops: &[CMatrix], x: &CMatrix) -> CMatrix {
    let d = ops[0].nrows();
    let eye = CMatrix::identity(d, d);
    let mut right = CMatrix::zeros(d * d, d * d);
    for k in ops {
        let kk = eye.kronecker(k);
        right += &kk * x * kk.adjoint();
    }
    let mut out = CMatrix::zeros(d * d, d * d);
    for k in ops {
        let kk = k.kronecker(&eye);
        out += &kk * &right * kk.adjoint();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{hermitian_eigenvalues, random_density, random_pure_state, random_unitary};
    use crate::rng::stream;
    use approx::assert_abs_diff_eq;

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn new_channel_accepts_endpoints() {
        let ch = Channel::new(3, -0.5).unwrap();
        assert_eq!(ch.t(), Channel::lower_endpoint(3));
        assert!(Channel::new(3, 0.25).is_ok());
        assert!(Channel::new(4, -1.0 / 3.0).is_ok());
    }

    #[test]
    fn new_channel_rejects_out_of_range() {
        assert!(matches!(Channel::new(3, 0.26), Err(Error::OutOfRange { .. })));
        assert!(matches!(Channel::new(3, -0.51), Err(Error::OutOfRange { .. })));
        assert!(matches!(Channel::new(1, 0.0), Err(Error::BadDimension(1))));
        assert!(Channel::new(3, f64::NAN).is_err());
    }

    #[test]
    fn qubit_lower_endpoint_constants() {
        let ch = Channel::new(2, -1.0).unwrap();
        assert_eq!(ch.c1(), 1.0);
        assert_eq!(ch.c2(), -2.0);
        assert_eq!(ch.ratio(), -2.0);
    }

    #[test]
    fn depolarizing_limit_gives_maximally_mixed() {
        let mut rng = stream(3, 0, 0);
        for d in 2..5 {
            let ch = Channel::new(d, 0.0).unwrap();
            let out = ch.apply(&random_density(&mut rng, d)).unwrap();
            let diff = out.matrix() - DensityMatrix::maximally_mixed(d).matrix();
            assert!(max_abs(&diff) < 1e-15);
        }
    }

    #[test]
    fn qubit_lower_endpoint_flips_basis_state() {
        let ch = Channel::new(2, -1.0).unwrap();
        let out = ch.apply(&DensityMatrix::basis(2, 0)).unwrap();
        let diff = out.matrix() - DensityMatrix::basis(2, 1).matrix();
        assert!(max_abs(&diff) < 1e-15);
    }

    #[test]
    fn lower_endpoint_output_spectrum() {
        let ch = Channel::new(3, -0.5).unwrap();
        let out = ch.apply(&DensityMatrix::basis(3, 0)).unwrap();
        let ev = out.eigenvalues();
        assert_abs_diff_eq!(ev[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[2], 0.0, epsilon = 1e-14);
        assert_eq!(ch.pure_output_spectrum(), vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn apply_rejects_wrong_dimension() {
        let ch = Channel::new(3, 0.1).unwrap();
        let err = ch.apply(&DensityMatrix::maximally_mixed(2)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, found: 2 });
    }

    #[test]
    fn kraus_sets_are_complete_and_match_direct_form() {
        let mut rng = stream(4, 0, 0);
        for d in 2..5 {
            for sign in [Sign::Plus, Sign::Minus] {
                let set = kraus_set(d, sign).unwrap();
                let err = max_abs(&(set.completeness() - CMatrix::identity(d, d)));
                assert!(err < 1e-12, "completeness {err}");
                let rho = random_density(&mut rng, d);
                let diff = set.apply(rho.matrix()) - phi_sign(sign, rho.matrix());
                assert!(max_abs(&diff) < 1e-12);
            }
        }
        assert!(kraus_set(1, Sign::Plus).is_err());
    }

    #[test]
    fn symmetric_kraus_fixes_maximally_mixed() {
        let set = kraus_set(3, Sign::Plus).unwrap();
        let mixed = DensityMatrix::maximally_mixed(3);
        let diff = set.apply(mixed.matrix()) - mixed.matrix();
        assert!(max_abs(&diff) < 1e-15);
    }

    #[test]
    fn antisymmetric_kraus_on_real_pure_state() {
        let set = kraus_set(3, Sign::Minus).unwrap();
        let psi = nalgebra::DVector::from_vec(vec![0.6, 0.0, 0.8]).map(|x| Complex64::new(x, 0.0));
        let rho = &psi * psi.adjoint();
        let expect = (CMatrix::identity(3, 3) - &rho) * Complex64::new(0.5, 0.0);
        assert!(max_abs(&(set.apply(&rho) - expect)) < 1e-15);
    }

    #[test]
    fn decomposition_weights() {
        let w = Channel::new(3, -0.5).unwrap().decompose();
        assert_abs_diff_eq!(w.plus, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.minus, 1.0, epsilon = 1e-15);
        let w = Channel::new(3, 0.25).unwrap().decompose();
        assert_abs_diff_eq!(w.minus, 0.0, epsilon = 1e-15);
        let w = Channel::new(3, 0.0).unwrap().decompose();
        assert_abs_diff_eq!(w.plus, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w.minus, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn decomposition_reconstructs_channel() {
        let mut rng = stream(5, 0, 0);
        for d in 2..6 {
            for step in 0..=8 {
                let lo = Channel::lower_endpoint(d);
                let t = lo + (Channel::upper_endpoint(d) - lo) * step as f64 / 8.0;
                let ch = Channel::new(d, t).unwrap();
                let w = ch.decompose();
                assert_abs_diff_eq!(w.plus + w.minus, 1.0, epsilon = 1e-14);
                let rho = random_density(&mut rng, d);
                let mix = phi_sign(Sign::Plus, rho.matrix()) * Complex64::new(w.plus, 0.0)
                    + phi_sign(Sign::Minus, rho.matrix()) * Complex64::new(w.minus, 0.0);
                assert!(max_abs(&(mix - ch.apply_matrix(rho.matrix()))) < 1e-12);
            }
        }
    }

    #[test]
    fn kraus_of_channel_matches_direct_application() {
        let mut rng = stream(6, 0, 0);
        for d in 2..5 {
            for i in 0..100 {
                let lo = Channel::lower_endpoint(d);
                let t = lo + (Channel::upper_endpoint(d) - lo) * (i as f64 / 99.0);
                let ch = Channel::new(d, t).unwrap();
                let rho = random_density(&mut rng, d);
                let mut via_kraus = CMatrix::zeros(d, d);
                for k in ch.kraus() {
                    via_kraus += &k * rho.matrix() * k.adjoint();
                }
                assert!(max_abs(&(via_kraus - ch.apply_matrix(rho.matrix()))) < 1e-10);
            }
        }
    }

    #[test]
    fn covariance_under_unitaries() {
        let mut rng = stream(7, 0, 0);
        for d in 2..5 {
            let ch = Channel::new(d, -0.7 / (d as f64 - 1.0)).unwrap();
            for _ in 0..20 {
                let u = random_unitary(&mut rng, d);
                let rho = random_density(&mut rng, d);
                let lhs = ch.apply_matrix(&(&u * rho.matrix() * u.adjoint()));
                let ubar = u.conjugate();
                let rhs = &ubar * ch.apply_matrix(rho.matrix()) * ubar.adjoint();
                assert!(max_abs(&(lhs - rhs)) < 1e-10);
            }
        }
    }

    #[test]
    fn output_is_a_density_matrix_across_range() {
        let mut rng = stream(8, 0, 0);
        for d in 2..6 {
            for step in 0..=10 {
                let lo = Channel::lower_endpoint(d);
                let t = lo + (Channel::upper_endpoint(d) - lo) * step as f64 / 10.0;
                let ch = Channel::new(d, t).unwrap();
                let rho = if step % 2 == 0 {
                    DensityMatrix::pure(&random_pure_state(&mut rng, d))
                } else {
                    random_density(&mut rng, d)
                };
                let out = ch.apply_matrix(rho.matrix());
                assert!((out.trace().re - 1.0).abs() < 1e-12);
                assert!(*hermitian_eigenvalues(&out).last().unwrap() >= -1e-10);
            }
        }
    }

    #[test]
    fn product_map_matches_kraus_route() {
        let mut rng = stream(9, 0, 0);
        for d in 2..5 {
            let ch = Channel::new(d, -0.3 / (d as f64 - 1.0)).unwrap();
            let x = random_density(&mut rng, d * d);
            let direct = ch.apply_product(x.matrix());
            let kraus = apply_kraus_product(&ch.kraus(), x.matrix());
            assert!(max_abs(&(direct - kraus)) < 1e-12);
        }
    }
}
