//! Entropy functionals on channel outputs.
//!
//! All entropies are in nats; [`LogBase`] converts for reporting.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::Channel;
use crate::density::{hermitian_eigenvalues, random_pure_state, CVector, DensityMatrix, PSD_FLOOR};
use crate::error::{Error, Result};
use crate::optimize::{project_to_simplex, NelderMead};
use crate::rng;
use crate::spectrum::{full_spectrum, SchmidtVector};

/// Probabilities at or below this contribute nothing (`0 · ln 0 := 0`).
pub const PROB_CLAMP: f64 = 1e-15;

/// A candidate replaces the incumbent minimum only if it is lower by more
/// than this; ties therefore resolve to the earliest candidate.
const TIE_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum LogBase {
    #[default]
    E,
    Two,
}

impl LogBase {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            LogBase::E => nats,
            LogBase::Two => nats / std::f64::consts::LN_2,
        }
    }
}

/// `−Σ p ln p` over entries above [`PROB_CLAMP`].
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|x| **x > PROB_CLAMP).map(|x| -x * x.ln()).sum()
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    spectral_entropy(&rho.eigenvalues())
}

/// Entropy of a spectrum; fails if an eigenvalue is below [`PSD_FLOOR`].
pub fn spectral_entropy(eigenvalues: &[f64]) -> Result<f64> {
    if let Some(min) = eigenvalues.iter().copied().reduce(f64::min) {
        if min < PSD_FLOOR {
            return Err(Error::NotPsd(min));
        }
    }
    Ok(shannon_entropy(eigenvalues))
}

/// `S(σ₁₂) = S₁ + S₂` with `S₁` from the off-diagonal family and `S₂` from
/// the secular roots. `c` is the total off-diagonal mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    pub s_total: f64,
    pub s1: f64,
    pub s2: f64,
    pub c: f64,
}

impl EntropyReport {
    pub fn in_base(self, base: LogBase) -> Self {
        Self { s_total: base.convert(self.s_total), s1: base.convert(self.s1), s2: base.convert(self.s2), c: self.c }
    }
}

pub fn entropy_split(ch: &Channel, lam: &SchmidtVector) -> Result<EntropyReport> {
    let spec = full_spectrum(ch, lam)?;
    let s1 = shannon_entropy(&spec.offdiag);
    let s2 = shannon_entropy(&spec.secular);
    Ok(EntropyReport { s_total: s1 + s2, s1, s2, c: ch.offdiag_mass() })
}

/// `λ ↦ S(σ₁₂(λ))`.
pub fn simplex_output_entropy(ch: &Channel, lam: &SchmidtVector) -> Result<f64> {
    Ok(entropy_split(ch, lam)?.s_total)
}

/// `h(Φ)` in closed form: every pure input has output spectrum
/// `{t + (1−t)/d, (1−t)/d × (d−1)}` and the minimum over mixed inputs is
/// attained on pure ones.
pub fn closed_form_min_output_entropy(ch: &Channel) -> f64 {
    shannon_entropy(&ch.pure_output_spectrum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Random starting points per optimization (in addition to fixed seeds).
    pub restarts: usize,
    pub tol: f64,
    /// Haar-random bipartite pure states sampled by [`additivity_gap`].
    pub n_random: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 50, tol: 1e-10, n_random: 200, seed: 0 }
    }
}

impl OptimizerConfig {
    fn nelder_mead(&self) -> NelderMead {
        NelderMead { f_tol: self.tol, ..NelderMead::default() }
    }
}

/// Result of minimizing `S(Φ(|ψ⟩⟨ψ|))` over unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MinOutputEntropy {
    pub h: f64,
    pub closed_form: f64,
    pub argmin: Vec<Complex64>,
}

fn pure_state_from_params(x: &[f64]) -> CVector {
    let d = x.len() / 2;
    let v = CVector::from_fn(d, |i, _| Complex64::new(x[2 * i], x[2 * i + 1]));
    let n = v.norm();
    if n > 0.0 {
        v / Complex64::new(n, 0.0)
    } else {
        let mut e = CVector::zeros(d);
        e[0] = Complex64::new(1.0, 0.0);
        e
    }
}

fn pure_output_entropy(ch: &Channel, psi: &CVector) -> f64 {
    let out = ch.apply_matrix(DensityMatrix::pure(psi).matrix());
    shannon_entropy(&hermitian_eigenvalues(&out))
}

/// Multi-start Nelder–Mead over unit vectors in `ℂ^d`; even restarts start
/// from real Gaussian vectors, odd ones from complex Gaussian vectors.
pub fn min_output_entropy(ch: &Channel, cfg: &OptimizerConfig) -> MinOutputEntropy {
    let d = ch.d();
    let nm = cfg.nelder_mead();
    let domain = rng::domain(1, d as u16, 0, 0);
    let runs: Vec<(f64, Vec<f64>)> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(cfg.seed, domain, i as u64);
            let psi = random_pure_state(&mut r, d);
            let x0: Vec<f64> = psi
                .iter()
                .flat_map(|z| [z.re, if i % 2 == 0 { 0.0 } else { z.im }])
                .collect();
            let m = nm.minimize(|x| pure_output_entropy(ch, &pure_state_from_params(x)), &x0);
            (m.f, m.x)
        })
        .collect();
    let (h, x) = pick_best(runs);
    MinOutputEntropy {
        h,
        closed_form: closed_form_min_output_entropy(ch),
        argmin: pure_state_from_params(&x).iter().copied().collect(),
    }
}

fn pick_best<T>(candidates: Vec<(f64, T)>) -> (f64, T) {
    let mut iter = candidates.into_iter();
    let mut best = iter.next().expect("at least one candidate");
    for c in iter {
        if c.0 < best.0 - TIE_MARGIN {
            best = c;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMinimum {
    pub value: f64,
    pub argmin: SchmidtVector,
}

fn simplex_point(x: &[f64]) -> SchmidtVector {
    let mut v = x.to_vec();
    v.push(1.0 - x.iter().sum::<f64>());
    SchmidtVector::from_weights(project_to_simplex(&v)).expect("projection is a probability vector")
}

/// Minimizes [`simplex_output_entropy`] over `Σ_d`. Candidates, in tie-break
/// order: the vertices, the barycenter, then Nelder–Mead runs from each of
/// those and from `cfg.restarts` Dirichlet draws.
pub fn minimize_simplex_entropy(ch: &Channel, cfg: &OptimizerConfig) -> Result<SimplexMinimum> {
    let d = ch.d();
    let mut seeds: Vec<SchmidtVector> = (0..d).map(|a| SchmidtVector::vertex(d, a)).collect();
    seeds.push(SchmidtVector::uniform(d));

    let mut candidates = Vec::new();
    for s in &seeds {
        candidates.push((simplex_output_entropy(ch, s)?, s.clone()));
    }

    let domain = rng::domain(2, d as u16, 0, 0);
    let starts: Vec<SchmidtVector> = seeds
        .into_iter()
        .chain((0..cfg.restarts).map(|i| SchmidtVector::random(&mut rng::stream(cfg.seed, domain, i as u64), d)))
        .collect();
    let nm = NelderMead { step: 0.5 / d as f64, ..cfg.nelder_mead() };
    let runs: Vec<(f64, SchmidtVector)> = starts
        .par_iter()
        .map(|start| {
            let objective = |x: &[f64]| simplex_output_entropy(ch, &simplex_point(x)).unwrap_or(f64::INFINITY);
            let m = nm.minimize(objective, &start.as_slice()[..d - 1]);
            let lam = simplex_point(&m.x);
            (simplex_output_entropy(ch, &lam).unwrap_or(f64::INFINITY), lam)
        })
        .collect();
    candidates.extend(runs);
    let (value, argmin) = pick_best(candidates);
    Ok(SimplexMinimum { value, argmin })
}

/// Minimum of `S((Φ⊗Φ)(|ψ⟩⟨ψ|))` over `n` Haar-random `ψ ∈ ℂ^{d²}`.
pub fn random_bipartite_minimum(ch: &Channel, n: usize, seed: u64) -> f64 {
    let d = ch.d();
    let domain = rng::domain(3, d as u16, 0, 0);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let psi = random_pure_state(&mut rng::stream(seed, domain, i as u64), d * d);
            let out = ch.apply_product(DensityMatrix::pure(&psi).matrix());
            shannon_entropy(&hermitian_eigenvalues(&out))
        })
        .reduce(|| f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdditivityGap {
    pub d: usize,
    pub t: f64,
    /// Single-copy minimum output entropy (optimizer value).
    pub h: f64,
    pub min_simplex: f64,
    pub min_random: f64,
    /// `min(min_simplex, min_random) − 2h`
    pub gap: f64,
    pub argmin: Vec<f64>,
    /// ℓ¹ distance from `argmin` to the nearest simplex vertex.
    pub vertex_distance: f64,
}

impl AdditivityGap {
    pub fn in_base(mut self, base: LogBase) -> Self {
        self.h = base.convert(self.h);
        self.min_simplex = base.convert(self.min_simplex);
        self.min_random = base.convert(self.min_random);
        self.gap = base.convert(self.gap);
        self
    }
}

pub fn additivity_gap(ch: &Channel, cfg: &OptimizerConfig) -> Result<AdditivityGap> {
    let h = min_output_entropy(ch, cfg).h;
    let simplex = minimize_simplex_entropy(ch, cfg)?;
    let min_random = random_bipartite_minimum(ch, cfg.n_random, cfg.seed);
    Ok(AdditivityGap {
        d: ch.d(),
        t: ch.t(),
        h,
        min_simplex: simplex.value,
        min_random,
        gap: simplex.value.min(min_random) - 2.0 * h,
        vertex_distance: simplex.argmin.vertex_distance(),
        argmin: simplex.argmin.as_slice().to_vec(),
    })
}

/// Convenience for tests and the CLI: a real unit vector as a state.
pub fn real_pure_state(v: &[f64]) -> DensityMatrix {
    DensityMatrix::pure(&DVector::from_iterator(v.len(), v.iter().map(|x| Complex64::new(*x, 0.0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::random_density;
    use crate::majorization::t_transform;
    use crate::spectrum::sigma12;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn von_neumann_examples() {
        for d in 2..6 {
            let s = von_neumann_entropy(&DensityMatrix::maximally_mixed(d)).unwrap();
            assert_abs_diff_eq!(s, (d as f64).ln(), epsilon = 1e-13);
        }
        let pure = real_pure_state(&[0.6, 0.8, 0.0]);
        assert_abs_diff_eq!(von_neumann_entropy(&pure).unwrap(), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(shannon_entropy(&[0.5, 0.5, 0.0]), LN_2, epsilon = 1e-15);
    }

    #[test]
    fn spectral_entropy_rejects_negative() {
        assert!(matches!(spectral_entropy(&[1.1, -0.1]), Err(Error::NotPsd(_))));
        assert!(spectral_entropy(&[1.0, -1e-12]).is_ok());
    }

    #[test]
    fn entropy_bounds_on_random_states() {
        let mut r = rng::stream(21, 0, 0);
        for d in 2..6 {
            let s = von_neumann_entropy(&random_density(&mut r, d)).unwrap();
            assert!(s >= 0.0 && s <= (d as f64).ln() + 1e-12);
        }
    }

    #[test]
    fn split_at_vertex() {
        let ch = Channel::new(3, -0.5).unwrap();
        let r = entropy_split(&ch, &SchmidtVector::vertex(3, 0)).unwrap();
        assert_abs_diff_eq!(r.s1, LN_2, epsilon = 1e-13);
        assert_abs_diff_eq!(r.s2, LN_2, epsilon = 1e-13);
        assert_abs_diff_eq!(r.s_total, 2.0 * LN_2, epsilon = 1e-13);
    }

    #[test]
    fn split_at_barycenter() {
        let ch = Channel::new(3, -0.5).unwrap();
        let r = entropy_split(&ch, &SchmidtVector::uniform(3)).unwrap();
        let expect = 2.0 / 3.0 * 12f64.ln() + 3f64.ln() / 3.0;
        assert_abs_diff_eq!(r.s_total, expect, epsilon = 1e-13);
        assert_abs_diff_eq!(r.s_total, 2.0228, epsilon = 1e-4);
    }

    #[test]
    fn depolarizing_split() {
        let mut r = rng::stream(22, 0, 0);
        for d in 2..6 {
            let ch = Channel::new(d, 0.0).unwrap();
            let s = simplex_output_entropy(&ch, &SchmidtVector::random(&mut r, d)).unwrap();
            assert_abs_diff_eq!(s, 2.0 * (d as f64).ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn split_invariants_and_dense_agreement() {
        let mut r = rng::stream(23, 0, 0);
        for d in 2..6 {
            for i in 0..10 {
                let lo = Channel::lower_endpoint(d);
                let t = lo + (Channel::upper_endpoint(d) - lo) * i as f64 / 9.0;
                let ch = Channel::new(d, t).unwrap();
                let lam = SchmidtVector::random(&mut r, d);
                let rep = entropy_split(&ch, &lam).unwrap();
                let spec = full_spectrum(&ch, &lam).unwrap();
                let c = rep.c;
                if c > PROB_CLAMP {
                    let tilde: Vec<f64> = spec.offdiag.iter().map(|g| g / c).collect();
                    assert_abs_diff_eq!(rep.s1, c * shannon_entropy(&tilde) - c * c.ln(), epsilon = 1e-12);
                }
                let tilde: Vec<f64> = spec.secular.iter().map(|g| g / (1.0 - c)).collect();
                let rest = (1.0 - c) * shannon_entropy(&tilde) - (1.0 - c) * (1.0 - c).ln();
                assert_abs_diff_eq!(rep.s2, rest, epsilon = 1e-12);
                let dense = von_neumann_entropy(&sigma12(&ch, &lam).unwrap()).unwrap();
                assert_abs_diff_eq!(rep.s_total, dense, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn permutation_symmetry() {
        let ch = Channel::new(4, -0.25).unwrap();
        let a = SchmidtVector::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let b = SchmidtVector::new(vec![0.3, 0.1, 0.4, 0.2]).unwrap();
        let (sa, sb) = (simplex_output_entropy(&ch, &a).unwrap(), simplex_output_entropy(&ch, &b).unwrap());
        assert_abs_diff_eq!(sa, sb, epsilon = 1e-13);
    }

    #[test]
    fn vertex_value_is_twice_single_copy_minimum() {
        for (d, t) in [(2, -1.0), (3, -0.5), (4, 0.1), (5, -0.1)] {
            let ch = Channel::new(d, t).unwrap();
            let v = simplex_output_entropy(&ch, &SchmidtVector::vertex(d, d - 1)).unwrap();
            assert_abs_diff_eq!(v, 2.0 * closed_form_min_output_entropy(&ch), epsilon = 1e-12);
        }
    }

    #[test]
    fn min_output_entropy_examples() {
        let cfg = OptimizerConfig { restarts: 8, ..Default::default() };
        let m = min_output_entropy(&Channel::new(3, -0.5).unwrap(), &cfg);
        assert_abs_diff_eq!(m.h, LN_2, epsilon = 1e-9);
        assert_abs_diff_eq!(m.closed_form, LN_2, epsilon = 1e-15);
        let norm: f64 = m.argmin.iter().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        let m = min_output_entropy(&Channel::new(2, -1.0).unwrap(), &cfg);
        assert_abs_diff_eq!(m.h, 0.0, epsilon = 1e-9);
        let m = min_output_entropy(&Channel::new(4, 0.0).unwrap(), &cfg);
        assert_abs_diff_eq!(m.h, 4f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn additivity_examples() {
        let cfg = OptimizerConfig { restarts: 10, n_random: 50, ..Default::default() };
        let g = additivity_gap(&Channel::new(3, -0.5).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(g.min_simplex, 2.0 * LN_2, epsilon = 1e-9);
        assert!(g.gap.abs() < 1e-9);
        assert!(g.vertex_distance < 1e-4);
        let g = additivity_gap(&Channel::new(2, -1.0).unwrap(), &cfg).unwrap();
        assert!(g.min_simplex.abs() < 1e-9 && g.gap.abs() < 1e-9);
        let g = additivity_gap(&Channel::new(3, 0.0).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(g.min_simplex, 2.0 * 3f64.ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(g.min_random, 2.0 * 3f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn additivity_is_deterministic() {
        let cfg = OptimizerConfig { restarts: 6, n_random: 20, seed: 9, ..Default::default() };
        let ch = Channel::new(3, -0.2).unwrap();
        assert_eq!(additivity_gap(&ch, &cfg).unwrap(), additivity_gap(&ch, &cfg).unwrap());
    }

    #[test]
    fn vertices_minimize_over_random_interior_points() {
        let mut r = rng::stream(24, 0, 0);
        for d in 2..6 {
            let ch = Channel::new(d, -0.8 / (d as f64 - 1.0)).unwrap();
            let vertex = simplex_output_entropy(&ch, &SchmidtVector::vertex(d, 0)).unwrap();
            for _ in 0..100 {
                let s = simplex_output_entropy(&ch, &SchmidtVector::random(&mut r, d)).unwrap();
                assert!(s >= vertex - 1e-9);
            }
        }
    }

    #[test]
    fn s2_is_schur_concave_on_t_transforms() {
        let mut r = rng::stream(25, 0, 0);
        use rand::Rng;
        for d in 3..6 {
            let lo = Channel::lower_endpoint(d);
            for _ in 0..100 {
                let t = lo * r.random::<f64>();
                let ch = Channel::new(d, t).unwrap();
                let lam = SchmidtVector::random(&mut r, d);
                let (i, j) = (r.random_range(0..d), r.random_range(0..d));
                if i == j {
                    continue;
                }
                let (hi, lo_i) = if lam.as_slice()[i] >= lam.as_slice()[j] { (i, j) } else { (j, i) };
                let moved = t_transform(&lam, hi, lo_i, r.random_range(0.0..=0.5)).unwrap();
                let before = entropy_split(&ch, &lam).unwrap().s2;
                let after = entropy_split(&ch, &moved).unwrap().s2;
                assert!(after >= before - 1e-9, "d={d} t={t} {before} -> {after}");
            }
        }
    }

    #[test]
    fn s1_is_concave() {
        let mut r = rng::stream(26, 0, 0);
        use rand::Rng;
        for d in 2..6 {
            let ch = Channel::new(d, -0.5 / (d as f64 - 1.0)).unwrap();
            for _ in 0..50 {
                let a = SchmidtVector::random(&mut r, d);
                let b = SchmidtVector::random(&mut r, d);
                let th: f64 = r.random();
                let mix: Vec<f64> = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| th * x + (1.0 - th) * y).collect();
                let mix = SchmidtVector::from_weights(mix).unwrap();
                let s = |l: &SchmidtVector| entropy_split(&ch, l).unwrap().s1;
                assert!(s(&mix) >= th * s(&a) + (1.0 - th) * s(&b) - 1e-9);
            }
        }
    }

    #[test]
    fn log_base_conversion() {
        assert_abs_diff_eq!(LogBase::Two.convert(LN_2), 1.0, epsilon = 1e-15);
        assert_eq!(LogBase::E.convert(0.3), 0.3);
    }
}
