//! Density matrices, Hermitian eigenvalues and random-state constructions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Maximum entrywise deviation from Hermiticity.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Maximum deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as numerically nonnegative.
pub const PSD_FLOOR: f64 = -1e-10;

/// Validation thresholds for [`DensityMatrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermitian: f64,
    pub trace: f64,
    pub psd_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { hermitian: HERMITIAN_TOL, trace: TRACE_TOL, psd_floor: PSD_FLOOR }
    }
}

/// A Hermitian, trace-one, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    pub fn with_tolerances(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::BadDimension(0));
        }
        let dev = hermitian_deviation(&m);
        if dev > tol.hermitian {
            return Err(Error::NotHermitian(dev));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::BadTrace(tr.re));
        }
        let min = hermitian_eigenvalues(&m).last().copied().unwrap_or(0.0);
        if min < tol.psd_floor {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { m })
    }

    /// Wraps a matrix that is a density matrix by construction.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self { m }
    }

    /// `|ψ⟩⟨ψ|` for the normalized `psi`.
    pub fn pure(psi: &CVector) -> Self {
        let norm = psi.norm();
        let v = psi / Complex64::new(norm, 0.0);
        Self { m: &v * v.adjoint() }
    }

    /// The computational basis projector `|i⟩⟨i|`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        Self { m }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    /// Eigenvalues sorted in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    pub fn to_wire(&self) -> MatrixWire {
        let rows = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| [self.m[(i, j)].re, self.m[(i, j)].im]).collect())
            .collect();
        MatrixWire { dim: self.dim(), rows }
    }
}

/// JSON layout `{"dim": n, "rows": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixWire {
    pub dim: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl MatrixWire {
    /// Shape check only; call [`DensityMatrix::new`] on the result to validate.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.rows.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: self.rows.len() });
        }
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: row.len() });
            }
            for (j, [re, im]) in row.iter().enumerate() {
                m[(i, j)] = Complex64::new(*re, *im);
            }
        }
        Ok(m)
    }
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigenvalues of the Hermitian part of `m`, descending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn complex_gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Uniformly random unit vector (normalized complex Gaussian).
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    let v = complex_gaussian_vector(rng, dim);
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// `GG†/tr(GG†)` with `G` complex Gaussian.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = complex_gaussian_matrix(rng, dim, dim);
    let w = &g * g.adjoint();
    let tr = w.trace();
    let mut m = w / tr;
    // exact Hermitian symmetry
    for i in 0..dim {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..dim {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    DensityMatrix::from_trusted(m)
}

/// Haar unitary: QR of a complex Gaussian matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let qr = complex_gaussian_matrix(rng, dim, dim).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rejects_bad_trace_and_non_hermitian() {
        let m = CMatrix::identity(2, 2);
        assert!(matches!(DensityMatrix::new(m), Err(Error::BadTrace(_))));
        let mut m = CMatrix::identity(2, 2) * c(0.5);
        m[(0, 1)] = Complex64::new(0.1, 0.2);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotPsd(_))));
    }

    #[test]
    fn tolerances_can_be_relaxed() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0 + 1e-9), c(-1e-9)]));
        assert!(DensityMatrix::new(m.clone()).is_err());
        let loose = Tolerances { hermitian: 1e-6, trace: 1e-6, psd_floor: -1e-6 };
        assert!(DensityMatrix::with_tolerances(m, &loose).is_ok());
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = stream(1, 0, 0);
        for dim in 2..6 {
            let rho = random_density(&mut rng, dim);
            assert!(DensityMatrix::new(rho.into_matrix()).is_ok());
            let u = random_unitary(&mut rng, dim);
            let err = (&u * u.adjoint() - CMatrix::identity(dim, dim)).norm();
            assert!(err < 1e-12, "unitarity error {err}");
            let psi = random_pure_state(&mut rng, dim);
            assert!((psi.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn wire_round_trip() {
        let mut rng = stream(2, 0, 0);
        let rho = random_density(&mut rng, 3);
        let wire = rho.to_wire();
        let back = DensityMatrix::new(wire.to_matrix().unwrap()).unwrap();
        assert_eq!(back, rho);
        let json = serde_json::to_string(&wire).unwrap();
        assert!(json.starts_with("{\"dim\":3,\"rows\":[[["));
    }

    #[test]
    fn wire_rejects_ragged_rows() {
        let wire = MatrixWire { dim: 2, rows: vec![vec![[1.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]] };
        assert!(wire.to_matrix().is_err());
    }
}
