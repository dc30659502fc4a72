//! Majorization, elementary symmetric polynomials and the Schur-concavity
//! criterion for the secular-root polynomials.
//!
//! With `ν_α = 1 + (c₂/c₁) λ_α` the scaled secular roots `γ = g/c₁` are the
//! eigenvalues of `diag(ν) + u uᵀ`, `u_α² = (ν_α − 1) t²/c₂`, so
//!
//! ```text
//! s_{d−k}(γ) = Φ_k(ν) = s_{d−k}(ν) + Σ_l s_{d−1−k}(ν without ν_l) (ν_l − 1) t²/c₂.
//! ```
//!
//! `Φ_k` is Schur-concave in `λ` iff `(ν_i − ν_j)(∂Φ_k/∂ν_i − ∂Φ_k/∂ν_j) ≤ 0`.

use serde::Serialize;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::spectrum::{secular_roots, SchmidtVector};

/// Tolerance on the box and sum constraints of [`NuVector`].
const NU_TOL: f64 = 1e-12;
/// Tolerance on the equal-sum precondition of [`majorizes`].
const SUM_TOL: f64 = 1e-10;

/// The transformed coordinates `ν_α = 1 + ratio · λ_α`, `ratio = c₂/c₁`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuVector {
    nu: Vec<f64>,
    ratio: f64,
}

impl NuVector {
    /// Checks `1 + ratio ≤ ν_l ≤ 1` and `ratio ∈ [−2, 0]`.
    pub fn new(nu: Vec<f64>, ratio: f64) -> Result<Self> {
        if !(-2.0 - NU_TOL..=NU_TOL).contains(&ratio) {
            return Err(Error::Config(format!("ratio {ratio} outside [-2, 0]")));
        }
        if let Some(x) = nu.iter().find(|x| !(**x >= 1.0 + ratio - NU_TOL && **x <= 1.0 + NU_TOL)) {
            return Err(Error::Config(format!("nu entry {x} outside [{}, 1]", 1.0 + ratio)));
        }
        Ok(Self { nu, ratio })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.nu
    }

    pub fn len(&self) -> usize {
        self.nu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nu.is_empty()
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }
}

pub fn lambda_to_nu(ch: &Channel, lam: &SchmidtVector) -> Result<NuVector> {
    if lam.d() != ch.d() {
        return Err(Error::DimensionMismatch { expected: ch.d(), found: lam.d() });
    }
    let ratio = ch.ratio();
    NuVector::new(lam.as_slice().iter().map(|l| 1.0 + ratio * l).collect(), ratio)
}

/// Scaled secular roots `γ_i = g_i / c₁`.
pub fn gamma_roots(ch: &Channel, lam: &SchmidtVector) -> Result<Vec<f64>> {
    Ok(secular_roots(ch, lam)?.into_iter().map(|g| g / ch.c1()).collect())
}

/// True iff `x` majorizes `y`: every prefix sum of `x` sorted descending
/// dominates the corresponding prefix sum of `y`.
pub fn majorizes(x: &[f64], y: &[f64]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let (sx, sy): (f64, f64) = (x.iter().sum(), y.iter().sum());
    if (sx - sy).abs() > SUM_TOL {
        return Err(Error::SumMismatch(sx, sy));
    }
    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    let (xs, ys) = (sorted(x), sorted(y));
    let (mut px, mut py) = (0.0, 0.0);
    for (a, b) in xs.iter().zip(&ys) {
        px += a;
        py += b;
        if px < py - SUM_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Moves a fraction `eps` of the gap `λ_i − λ_j` from coordinate `i` to `j`.
/// The input majorizes the output.
pub fn t_transform(lam: &SchmidtVector, i: usize, j: usize, eps: f64) -> Result<SchmidtVector> {
    let d = lam.d();
    for index in [i, j] {
        if index >= d {
            return Err(Error::IndexError { index, len: d });
        }
    }
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::Config(format!("eps = {eps} outside [0, 1/2]")));
    }
    let mut l = lam.as_slice().to_vec();
    if l[i] < l[j] {
        return Err(Error::Config(format!("t_transform needs lambda[{i}] >= lambda[{j}]")));
    }
    let shift = eps * (l[i] - l[j]);
    l[i] -= shift;
    l[j] += shift;
    SchmidtVector::new(l)
}

/// All elementary symmetric polynomials `s_0, …, s_n` of `values`, read off
/// the coefficients of `∏(1 + ν_l x)`.
pub fn elem_sym_all(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (m, v) in values.iter().enumerate() {
        for q in (1..=m + 1).rev() {
            e[q] += v * e[q - 1];
        }
    }
    e
}

/// `s_q(values)`; zero for `q > len`.
pub fn elem_sym(values: &[f64], q: usize) -> f64 {
    if q > values.len() {
        return 0.0;
    }
    elem_sym_all(values)[q]
}

/// `s_q` of `values` with the entries at `skip` removed; zero for negative `q`.
pub(crate) fn elem_sym_without(values: &[f64], skip: &[usize], q: isize) -> f64 {
    if q < 0 {
        return 0.0;
    }
    let kept: Vec<f64> = values.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, v)| *v).collect();
    elem_sym(&kept, q as usize)
}

fn check_phi_args(nu: &NuVector, k: usize, ch: &Channel) -> Result<()> {
    if nu.len() != ch.d() {
        return Err(Error::BadLength { expected: ch.d(), found: nu.len() });
    }
    if k >= ch.d() {
        return Err(Error::BadK { k, lo: 0, hi: ch.d() - 1 });
    }
    if ch.t() == 0.0 {
        return Err(Error::ZeroT);
    }
    Ok(())
}

/// `t²/c₂ = t d / (2(1−t))`
fn secular_coupling(ch: &Channel) -> f64 {
    ch.t() * ch.t() / ch.c2()
}

/// `Φ_k(ν) = s_{d−k}(ν) + Σ_l s_{d−1−k}(ν∖l)(ν_l − 1) t²/c₂`.
pub fn phi_k(nu: &NuVector, k: usize, ch: &Channel) -> Result<f64> {
    check_phi_args(nu, k, ch)?;
    let v = nu.as_slice();
    let d = ch.d() as isize;
    let k = k as isize;
    let w = secular_coupling(ch);
    let tail: f64 = (0..v.len()).map(|l| elem_sym_without(v, &[l], d - 1 - k) * (v[l] - 1.0) * w).sum();
    Ok(elem_sym_without(v, &[], d - k) + tail)
}

/// `∂Φ_k/∂ν_i = s_{d−1−k}(ν∖i)(1 + t²/c₂) + Σ_{l≠i} s_{d−2−k}(ν∖{i,l})(ν_l − 1) t²/c₂`.
pub fn partial_phi_k(nu: &NuVector, k: usize, i: usize, ch: &Channel) -> Result<f64> {
    check_phi_args(nu, k, ch)?;
    let v = nu.as_slice();
    if i >= v.len() {
        return Err(Error::IndexError { index: i, len: v.len() });
    }
    let d = ch.d() as isize;
    let k = k as isize;
    let w = secular_coupling(ch);
    let own = elem_sym_without(v, &[i], d - 1 - k) * (1.0 + w);
    let cross: f64 = (0..v.len())
        .filter(|&l| l != i)
        .map(|l| elem_sym_without(v, &[i, l], d - 2 - k) * (v[l] - 1.0) * w)
        .sum();
    Ok(own + cross)
}

/// `(ν_i − ν_j)(∂Φ_k/∂ν_i − ∂Φ_k/∂ν_j)`; nonpositive when `Φ_k` is
/// Schur-concave.
pub fn schur_defect(nu: &NuVector, k: usize, i: usize, j: usize, ch: &Channel) -> Result<f64> {
    if i == j {
        return Err(Error::Config("schur_defect needs i != j".into()));
    }
    let v = nu.as_slice();
    let gap = v.get(i).ok_or(Error::IndexError { index: i, len: v.len() })?
        - v.get(j).ok_or(Error::IndexError { index: j, len: v.len() })?;
    let di = partial_phi_k(nu, k, i, ch)?;
    let dj = partial_phi_k(nu, k, j, ch)?;
    if gap == 0.0 {
        return Ok(0.0);
    }
    Ok(gap * (di - dj))
}

/// `|s_{d−k}(γ) − Φ_k(ν)|`, relative to the magnitude scale of both sides
/// (the same polynomials evaluated on absolute values).
pub fn sympol_defect(ch: &Channel, lam: &SchmidtVector, k: usize) -> Result<f64> {
    let nu = lambda_to_nu(ch, lam)?;
    let rhs = phi_k(&nu, k, ch)?;
    let gamma = gamma_roots(ch, lam)?;
    let q = ch.d() - k;
    let lhs = elem_sym(&gamma, q);

    let abs_gamma: Vec<f64> = gamma.iter().map(|x| x.abs()).collect();
    let v = nu.as_slice();
    let abs_nu: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let w = secular_coupling(ch).abs();
    let rhs_scale = elem_sym(&abs_nu, q)
        + (0..v.len())
            .map(|l| elem_sym_without(&abs_nu, &[l], q as isize - 1) * (v[l] - 1.0).abs() * w)
            .sum::<f64>();
    let scale = elem_sym(&abs_gamma, q).max(rhs_scale).max(f64::MIN_POSITIVE);
    Ok((lhs - rhs).abs() / scale)
}
