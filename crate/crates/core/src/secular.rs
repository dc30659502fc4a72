//! Roots of the secular equation `1 + Σ_α w_α / (p_α − g) = 0` with `w_α > 0`.
//!
//! These are the eigenvalues of `diag(p) + v vᵀ` with `v_α² = w_α`. After
//! sorting and merging coincident poles, exactly one root lies strictly between
//! each pair of consecutive distinct poles and one lies above the largest pole;
//! a merged pole of multiplicity `m` additionally carries `m − 1` roots at the
//! pole itself.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct SecularSolver {
    /// Poles closer than this are merged.
    pub merge_tol: f64,
    /// Bisection stops once the bracket is narrower than `rel_tol` times the
    /// larger of the bracket endpoints and the pole scale.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for SecularSolver {
    fn default() -> Self {
        Self { merge_tol: 1e-12, rel_tol: 1e-14, max_iter: 200 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pole {
    at: f64,
    weight: f64,
    count: usize,
}

impl SecularSolver {
    /// All `poles.len()` roots, descending. Weights must be positive.
    pub fn roots(&self, poles: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(poles.len(), weights.len());
        if poles.is_empty() {
            return Ok(Vec::new());
        }
        let merged = self.merge(poles, weights);
        let scale = merged.iter().map(|p| p.at.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let secular = |g: f64| 1.0 + merged.iter().map(|p| p.weight / (p.at - g)).sum::<f64>();

        let mut roots = Vec::with_capacity(poles.len());
        for p in &merged {
            roots.extend(std::iter::repeat_n(p.at, p.count - 1));
        }
        for pair in merged.windows(2) {
            roots.push(self.bisect(&secular, pair[0].at, pair[1].at, scale)?);
        }
        let last = merged[merged.len() - 1].at;
        let total: f64 = merged.iter().map(|p| p.weight).sum();
        let mut width = total.max(scale * f64::EPSILON);
        while secular(last + width) <= 0.0 {
            width *= 2.0;
            if !width.is_finite() {
                return Err(Error::ConvergenceFailure { lo: last, hi: width, iterations: 0 });
            }
        }
        roots.push(self.bisect(&secular, last, last + width, scale)?);

        roots.sort_by(|a, b| b.total_cmp(a));
        Ok(roots)
    }

    fn merge(&self, poles: &[f64], weights: &[f64]) -> Vec<Pole> {
        let mut pairs: Vec<(f64, f64)> = poles.iter().copied().zip(weights.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<Pole> = Vec::new();
        let mut anchor = f64::NEG_INFINITY;
        for (at, weight) in pairs {
            match merged.last_mut() {
                Some(p) if at - anchor < self.merge_tol => {
                    p.at = (p.at * p.count as f64 + at) / (p.count + 1) as f64;
                    p.weight += weight;
                    p.count += 1;
                }
                _ => {
                    anchor = at;
                    merged.push(Pole { at, weight, count: 1 });
                }
            }
        }
        merged
    }

    /// The secular function increases from −∞ to +∞ on `(lo, hi)`.
    fn bisect(&self, f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, scale: f64) -> Result<f64> {
        let (lo0, hi0) = (lo, hi);
        for _ in 0..self.max_iter {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= self.rel_tol * lo.abs().max(hi.abs()).max(scale) {
                return Ok(0.5 * (lo + hi));
            }
        }
        Err(Error::ConvergenceFailure { lo: lo0, hi: hi0, iterations: self.max_iter })
    }
}
