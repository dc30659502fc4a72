//! Numerical scans of the inequalities behind the Schur-concavity of `S₂`.
//!
//! For `n = d − 2`, `r = 2td/(1−t)` and the polytope
//! `P = {ν ∈ ℝⁿ : 1 + r ≤ ν_l ≤ 1, Σ ν_l ≥ n + r}` the master inequality is
//!
//! ```text
//! Σ_l (1 − ν_l) s_{n−k−1}(ν∖l) − κ s_{n−k}(ν) ≥ 0,   κ = 2(1 + t(d−1))/(td) ≤ 0,
//! ```
//!
//! for `0 ≤ k ≤ n − 1`. For `k = 0` it reduces (when exactly one `ν_l` is
//! negative) to `Σ (1 − ν_l)/ν_l ≤ κ`, whose worst case is the extreme point
//! `(1 + r, 1, …, 1)` and finally the positivity of
//! `3(td)² + 3(1−t)(td) + (1−t)²`.
//!
//! Every scan draws sample `i` of cell `(kind, d, t)` from its own counter-based
//! stream, so reports do not depend on the thread count.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::Channel;
use crate::entropy::entropy_split;
use crate::error::{Error, Result};
use crate::majorization::{elem_sym, elem_sym_without, lambda_to_nu, schur_defect, sympol_defect, t_transform, NuVector};
use crate::rng;
use crate::spectrum::SchmidtVector;

/// Margins below this count as violations.
pub const VIOLATION_TOL: f64 = -1e-9;
/// Right end of the default `t` grids; the coefficient `κ` is singular at 0.
pub const NEAR_ZERO_T: f64 = -1e-6;
const MAX_REJECTIONS: usize = 10_000;
const BOX_TOL: f64 = 1e-12;
const RANGE_SLACK: f64 = 1e-14;

fn check_t(d: usize, t: f64) -> Result<()> {
    let lo = Channel::lower_endpoint(d);
    if !(t.is_finite() && t >= lo - RANGE_SLACK && t < 0.0) {
        return Err(Error::BadT { d, t, lo });
    }
    Ok(())
}

/// `κ = 2(1 + t(d−1))/(td)`
pub fn master_coefficient(d: usize, t: f64) -> f64 {
    let df = d as f64;
    2.0 * (1.0 + t * (df - 1.0)) / (t * df)
}

/// `r = c₂/c₁ = 2td/(1−t)`
pub fn nu_ratio(d: usize, t: f64) -> f64 {
    2.0 * t * d as f64 / (1.0 - t)
}

/// `Σ_l (1 − ν_l) s_{n−k−1}(ν∖l)`
pub fn first_term(nu: &[f64], k: usize) -> f64 {
    let q = nu.len() as isize - k as isize - 1;
    (0..nu.len()).map(|l| (1.0 - nu[l]) * elem_sym_without(nu, &[l], q)).sum()
}

/// Left-hand side of the master inequality.
pub fn main_inequality_lhs(nu: &[f64], k: usize, d: usize, t: f64) -> Result<f64> {
    if d < 3 {
        return Err(Error::BadLength { expected: 1, found: 0 });
    }
    let n = d - 2;
    if nu.len() != n {
        return Err(Error::BadLength { expected: n, found: nu.len() });
    }
    if k >= n {
        return Err(Error::BadK { k, lo: 0, hi: n - 1 });
    }
    check_t(d, t)?;
    Ok(first_term(nu, k) - master_coefficient(d, t) * elem_sym(nu, n - k))
}

/// `s_{n−k}(ν)`, the polynomial in the second term, for `1 ≤ k ≤ n`.
pub fn second_term_value(nu: &[f64], k: usize) -> Result<f64> {
    let n = nu.len();
    if k < 1 || k > n {
        return Err(Error::BadK { k, lo: 1, hi: n });
    }
    Ok(elem_sym(nu, n - k))
}

fn k0_checks(nu: &[f64], d: usize, t: f64) -> Result<()> {
    check_t(d, t)?;
    if let Some((index, value)) = nu.iter().copied().enumerate().find(|(_, v)| v.abs() <= 1e-12) {
        return Err(Error::NearZeroNu { index, value });
    }
    let negatives = nu.iter().filter(|v| **v < 0.0).count();
    if negatives != 1 {
        return Err(Error::BadSignPattern(negatives));
    }
    Ok(())
}

/// `κ − Σ (1 − ν_l)/ν_l`; nonnegative when the `k = 0` inequality holds.
pub fn k0_defect(nu: &[f64], d: usize, t: f64) -> Result<f64> {
    k0_checks(nu, d, t)?;
    let lhs: f64 = nu.iter().map(|v| (1.0 - v) / v).sum();
    Ok(master_coefficient(d, t) - lhs)
}

/// `e_n · [Σ (1 − ν_l)/ν_l − κ]` with `e_n = ∏ ν_l`, which equals the master
/// left-hand side at `k = 0`.
pub fn k0_factorized(nu: &[f64], d: usize, t: f64) -> Result<f64> {
    k0_checks(nu, d, t)?;
    let e_n: f64 = nu.iter().product();
    let sum: f64 = nu.iter().map(|v| (1.0 - v) / v).sum();
    Ok(e_n * (sum - master_coefficient(d, t)))
}

/// `κ − (1/ν₁ + 1/ν₂ − 2)` at `ν₁ = 1 + r`, `ν₂ = 2 + r − ν₁ = 1`.
/// `None` when `ν₁ ≥ 0`, i.e. no coordinate can be negative.
pub fn extreme_point_defect(d: usize, t: f64) -> Result<Option<f64>> {
    check_t(d, t)?;
    let r = nu_ratio(d, t);
    let nu1 = 1.0 + r;
    if nu1 >= 0.0 {
        return Ok(None);
    }
    let nu2 = 2.0 + r - nu1;
    Ok(Some(master_coefficient(d, t) - (1.0 / nu1 + 1.0 / nu2 - 2.0)))
}

/// `3(td)² + 3(1−t)(td) + (1−t)²`
pub fn final_polynomial(d: usize, t: f64) -> f64 {
    let td = t * d as f64;
    3.0 * td * td + 3.0 * (1.0 - t) * td + (1.0 - t) * (1.0 - t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    /// Fair coin between the two strata below.
    Mixed,
    NonNegative,
    /// Exactly one coordinate in `[1 + r, 0)`.
    OneNegative,
}

/// The box-and-sum polytope `{1 + r ≤ ν_l ≤ 1, Σ ν_l ≥ n + r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polytope {
    pub n: usize,
    pub ratio: f64,
}

impl Polytope {
    pub fn new(n: usize, d: usize, t: f64) -> Result<Self> {
        check_t(d, t)?;
        if n == 0 {
            return Err(Error::BadLength { expected: 1, found: 0 });
        }
        Ok(Self { n, ratio: nu_ratio(d, t) })
    }

    /// `{ν_l ≤ 1, Σ ν_l ≥ n − 2}`, i.e. `r = −2`.
    pub fn weak(n: usize) -> Self {
        Self { n, ratio: -2.0 }
    }

    pub fn lower(&self) -> f64 {
        1.0 + self.ratio
    }

    pub fn sum_min(&self) -> f64 {
        self.n as f64 + self.ratio
    }

    pub fn contains(&self, nu: &[f64]) -> bool {
        nu.len() == self.n
            && nu.iter().all(|v| *v >= self.lower() - BOX_TOL && *v <= 1.0 + BOX_TOL)
            && nu.iter().sum::<f64>() >= self.sum_min() - BOX_TOL
    }

    /// Samples through the deficits `δ_l = 1 − ν_l`, for which the sum
    /// constraint reads `Σ δ_l ≤ −r`.
    ///
    /// Nonnegative stratum: `δ` uniform on `{δ ≥ 0, Σ δ ≤ −r}`, rejecting
    /// draws with some `δ_l > 1 − max(1 + r, 0)`. One-negative stratum: `ν_j`
    /// uniform on `[1 + r, 0)`, then the remaining deficits uniform on
    /// `{δ ≥ 0, Σ δ ≤ ν_j − 1 − r}`, which keeps them nonnegative without
    /// rejection. After [`MAX_REJECTIONS`] failures a random point on the
    /// segment between `(1, …, 1)` and a vertex is returned.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, stratum: Stratum) -> Vec<f64> {
        let n = self.n;
        let lo = self.lower();
        let stratum = match stratum {
            _ if lo >= 0.0 => Stratum::NonNegative,
            Stratum::Mixed if rng.random_bool(0.5) => Stratum::NonNegative,
            Stratum::Mixed => Stratum::OneNegative,
            s => s,
        };
        if stratum == Stratum::OneNegative {
            let j = rng.random_range(0..n);
            let neg = (lo - lo * rng.random::<f64>()).min(-f64::MIN_POSITIVE);
            let deficits = scaled_simplex(rng, n - 1, neg - lo);
            let mut nu: Vec<f64> = deficits.iter().map(|x| (1.0 - x).max(0.0)).collect();
            nu.insert(j, neg);
            return nu;
        }
        let cap = 1.0 - lo.max(0.0);
        for _ in 0..MAX_REJECTIONS {
            let deficits = scaled_simplex(rng, n, -self.ratio);
            if deficits.iter().all(|x| *x <= cap) {
                return deficits.iter().map(|x| 1.0 - x).collect();
            }
        }
        let theta: f64 = rng.random();
        let mut nu = vec![1.0; n];
        nu[rng.random_range(0..n)] = 1.0 - theta * cap;
        nu
    }

    /// Vertices of `P`: corners of the box inside the half-space, and the
    /// points where box edges cross the hyperplane `Σ ν = n + r`.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let (n, lo, smin) = (self.n, self.lower(), self.sum_min());
        let mut out: Vec<Vec<f64>> = Vec::new();
        let mut push = |v: Vec<f64>| {
            if !out.iter().any(|w| w.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-12)) {
                out.push(v);
            }
        };
        for mask in 0u32..(1 << n) {
            let v: Vec<f64> = (0..n).map(|i| if mask & (1 << i) != 0 { 1.0 } else { lo }).collect();
            if v.iter().sum::<f64>() >= smin - BOX_TOL {
                push(v);
            }
        }
        for free in 0..n {
            for mask in 0u32..(1 << (n - 1)) {
                let mut v = vec![0.0; n];
                let mut bit = 0;
                for (i, slot) in v.iter_mut().enumerate() {
                    if i == free {
                        continue;
                    }
                    *slot = if mask & (1 << bit) != 0 { 1.0 } else { lo };
                    bit += 1;
                }
                let rest: f64 = v.iter().sum();
                let x = smin - rest;
                if x > lo + BOX_TOL && x < 1.0 - BOX_TOL {
                    v[free] = x;
                    push(v);
                }
            }
        }
        out
    }
}

/// Uniform point of `{x ∈ ℝᵐ : x ≥ 0, Σ x ≤ total}`.
fn scaled_simplex<R: Rng + ?Sized>(rng: &mut R, m: usize, total: f64) -> Vec<f64> {
    let e: Vec<f64> = (0..=m).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let sum: f64 = e.iter().sum();
    e[..m].iter().map(|x| total * x / sum).collect()
}

/// One draw from the polytope for `(n, d, t)`, mixed stratum.
pub fn sample_polytope<R: Rng + ?Sized>(n: usize, d: usize, t: f64, rng: &mut R) -> Result<NuVector> {
    let p = Polytope::new(n, d, t)?;
    NuVector::new(p.sample(rng, Stratum::Mixed), p.ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanKind {
    /// Master inequality over polytope samples and vertices.
    Main,
    /// First term alone under the weaker constraints `Σ ν ≥ n − 2`.
    FirstTerm,
    /// `s_{n−k}(ν) ≥ 0` for `1 ≤ k ≤ n`.
    SecondTerm,
    /// `k = 0` reduction on the one-negative stratum.
    K0,
    Extreme,
    FinalPoly,
    /// Symmetric-polynomial identity for the secular roots.
    Sympol,
    /// Schur criterion on `Φ_k`.
    Schur,
    /// `S₂` along T-transforms.
    S2Schur,
}

impl ScanKind {
    pub const ALL: [ScanKind; 9] = [
        ScanKind::Main,
        ScanKind::FirstTerm,
        ScanKind::SecondTerm,
        ScanKind::K0,
        ScanKind::Extreme,
        ScanKind::FinalPoly,
        ScanKind::Sympol,
        ScanKind::Schur,
        ScanKind::S2Schur,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScanKind::Main => "main",
            ScanKind::FirstTerm => "first-term",
            ScanKind::SecondTerm => "second-term",
            ScanKind::K0 => "k0",
            ScanKind::Extreme => "extreme",
            ScanKind::FinalPoly => "final-poly",
            ScanKind::Sympol => "sympol",
            ScanKind::Schur => "schur",
            ScanKind::S2Schur => "s2-schur",
        }
    }

    fn tag(self) -> u16 {
        100 + Self::ALL.iter().position(|k| *k == self).unwrap() as u16
    }

    fn min_d(self) -> usize {
        match self {
            ScanKind::Main | ScanKind::FirstTerm | ScanKind::SecondTerm | ScanKind::K0 => 3,
            _ => 2,
        }
    }

    /// One evaluation per `t` rather than `samples` random draws.
    fn is_deterministic(self) -> bool {
        matches!(self, ScanKind::Extreme | ScanKind::FinalPoly)
    }

    /// `t` grid used when none is given: 9 points for sampled kinds, 101 for
    /// the deterministic ones, from `−1/(d−1)` to `−10⁻⁶`.
    pub fn default_t_grid(self, d: usize) -> Vec<f64> {
        let steps = if self.is_deterministic() { 101 } else { 9 };
        linspace(Channel::lower_endpoint(d), NEAR_ZERO_T, steps)
    }

    fn k_values(self, d: usize) -> Vec<Option<usize>> {
        let n = d.saturating_sub(2);
        match self {
            ScanKind::Main => (0..n).map(Some).collect(),
            ScanKind::FirstTerm => (0..=n).map(Some).collect(),
            ScanKind::SecondTerm => (1..=n).map(Some).collect(),
            ScanKind::Sympol => (0..d).map(Some).collect(),
            ScanKind::Schur => (0..=d - 2).map(Some).collect(),
            _ => vec![None],
        }
    }
}

impl fmt::Display for ScanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s || k.name().replace('-', "_") == s)
            .ok_or_else(|| Error::Config(format!("unknown scan kind '{s}'")))
    }
}

/// `steps ≥ 2` evenly spaced values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, steps: usize) -> Vec<f64> {
    if steps < 2 {
        return vec![start];
    }
    (0..steps)
        .map(|i| if i + 1 == steps { end } else { start + (end - start) * i as f64 / (steps - 1) as f64 })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub kind: ScanKind,
    pub d_values: Vec<usize>,
    /// Overrides [`ScanKind::default_t_grid`] for every `d`.
    pub t_grid: Option<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub d: usize,
    pub t: f64,
    pub k: Option<usize>,
    pub samples: usize,
    pub violations: usize,
    /// `+∞` (serialized as `null`) when the cell has no samples.
    pub worst_margin: f64,
    /// The input that produced `worst_margin`, for reproduction.
    pub worst_input: Option<Vec<f64>>,
}

/// One scan report per `(kind, d, t)`; `cells` holds one row per `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub kind: ScanKind,
    pub d: usize,
    pub t_values: Vec<f64>,
    pub k_values: Vec<usize>,
    pub samples: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub seed: u64,
    pub cells: Vec<CellReport>,
}

#[derive(Debug, Clone, Copy)]
struct Acc {
    samples: usize,
    violations: usize,
    worst: f64,
    worst_index: u64,
}

impl Acc {
    const EMPTY: Acc = Acc { samples: 0, violations: 0, worst: f64::INFINITY, worst_index: u64::MAX };

    fn add(mut self, margin: f64, index: u64) -> Self {
        self.samples += 1;
        if margin < VIOLATION_TOL || margin.is_nan() {
            self.violations += 1;
        }
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        if margin < self.worst || (margin == self.worst && index < self.worst_index) {
            self.worst = margin;
            self.worst_index = index;
        }
        self
    }

    fn merge(self, other: Acc) -> Acc {
        let (worst, worst_index) = if other.worst < self.worst
            || (other.worst == self.worst && other.worst_index < self.worst_index)
        {
            (other.worst, other.worst_index)
        } else {
            (self.worst, self.worst_index)
        };
        Acc { samples: self.samples + other.samples, violations: self.violations + other.violations, worst, worst_index }
    }
}

/// Dirichlet draw; one time in four a random coordinate is zeroed to
/// exercise the deflated secular roots.
fn random_lambda<R: Rng + ?Sized>(rng: &mut R, d: usize) -> SchmidtVector {
    let lam = SchmidtVector::random(rng, d);
    if rng.random_range(0..4) == 0 {
        let mut l = lam.as_slice().to_vec();
        l[rng.random_range(0..d)] = 0.0;
        return SchmidtVector::from_weights(l).unwrap_or(lam);
    }
    lam
}

/// Cell-level context for evaluating one sample.
struct Cell<'a> {
    kind: ScanKind,
    d: usize,
    t: f64,
    ks: &'a [Option<usize>],
    vertices: Vec<Vec<f64>>,
    random: usize,
    seed: u64,
    domain: u64,
}

impl Cell<'_> {
    fn total(&self) -> usize {
        if self.kind.is_deterministic() {
            1
        } else {
            self.random + self.vertices.len()
        }
    }

    /// The sample's input echo and one margin per entry of `ks` (`None` when
    /// the sample does not apply to that slot).
    fn evaluate(&self, index: u64) -> Result<(Vec<f64>, Vec<Option<f64>>)> {
        let (d, t) = (self.d, self.t);
        let n = d.saturating_sub(2);
        let mut r = rng::stream(self.seed, self.domain, index);
        let nu_sample = |r: &mut rand_chacha::ChaCha8Rng, p: Polytope, stratum| {
            if (index as usize) < self.random {
                p.sample(r, stratum)
            } else {
                self.vertices[index as usize - self.random].clone()
            }
        };
        let per_k = |f: &dyn Fn(usize) -> Result<f64>| -> Result<Vec<Option<f64>>> {
            self.ks.iter().map(|k| f(k.expect("k-indexed kind")).map(Some)).collect()
        };
        Ok(match self.kind {
            ScanKind::Main => {
                let nu = nu_sample(&mut r, Polytope::new(n, d, t)?, Stratum::Mixed);
                let m = per_k(&|k| main_inequality_lhs(&nu, k, d, t))?;
                (nu, m)
            }
            ScanKind::FirstTerm => {
                let nu = nu_sample(&mut r, Polytope::weak(n), Stratum::Mixed);
                let m = per_k(&|k| Ok(first_term(&nu, k)))?;
                (nu, m)
            }
            ScanKind::SecondTerm => {
                let nu = nu_sample(&mut r, Polytope::new(n, d, t)?, Stratum::Mixed);
                let m = per_k(&|k| second_term_value(&nu, k))?;
                (nu, m)
            }
            ScanKind::K0 => {
                let nu = Polytope::new(n, d, t)?.sample(&mut r, Stratum::OneNegative);
                let m = k0_defect(&nu, d, t)?;
                (nu, vec![Some(m)])
            }
            ScanKind::Extreme => (vec![t], vec![extreme_point_defect(d, t)?]),
            ScanKind::FinalPoly => (vec![t], vec![Some(final_polynomial(d, t))]),
            ScanKind::Sympol => {
                let ch = Channel::new(d, t)?;
                let lam = random_lambda(&mut r, d);
                let m = per_k(&|k| sympol_defect(&ch, &lam, k).map(|x| -x))?;
                (lam.as_slice().to_vec(), m)
            }
            ScanKind::Schur => {
                let ch = Channel::new(d, t)?;
                let lam = random_lambda(&mut r, d);
                let i = r.random_range(0..d);
                let j = (i + r.random_range(1..d)) % d;
                let nu = lambda_to_nu(&ch, &lam)?;
                let m = per_k(&|k| schur_defect(&nu, k, i, j, &ch).map(|x| -x))?;
                let mut echo = lam.as_slice().to_vec();
                echo.extend([i as f64, j as f64]);
                (echo, m)
            }
            ScanKind::S2Schur => {
                let ch = Channel::new(d, t)?;
                let lam = random_lambda(&mut r, d);
                let i = r.random_range(0..d);
                let j = (i + r.random_range(1..d)) % d;
                let (hi, lo) = if lam.as_slice()[i] >= lam.as_slice()[j] { (i, j) } else { (j, i) };
                let eps = 0.5 * r.random::<f64>();
                let moved = t_transform(&lam, hi, lo, eps)?;
                let m = entropy_split(&ch, &moved)?.s2 - entropy_split(&ch, &lam)?.s2;
                let mut echo = lam.as_slice().to_vec();
                echo.extend([hi as f64, lo as f64, eps]);
                (echo, vec![Some(m)])
            }
        })
    }
}

fn validate(cfg: &ScanConfig) -> Result<()> {
    if cfg.d_values.is_empty() {
        return Err(Error::Config("no dimensions given".into()));
    }
    for &d in &cfg.d_values {
        if d < cfg.kind.min_d() {
            return Err(Error::Config(format!(
                "{} scan needs d >= {} (n = d - 2 >= 1), got d = {d}",
                cfg.kind,
                cfg.kind.min_d()
            )));
        }
        if cfg.kind != ScanKind::FinalPoly {
            if let Some(grid) = &cfg.t_grid {
                for &t in grid {
                    check_t(d, t).map_err(|e| Error::Config(e.to_string()))?;
                }
            }
        }
    }
    Ok(())
}

pub fn run_scan(cfg: &ScanConfig) -> Result<Vec<ScanReport>> {
    validate(cfg)?;
    let mut reports = Vec::new();
    for &d in &cfg.d_values {
        let grid = match (cfg.kind, &cfg.t_grid) {
            (ScanKind::FirstTerm, _) => vec![Channel::lower_endpoint(d)],
            (_, Some(g)) => g.clone(),
            (kind, None) => kind.default_t_grid(d),
        };
        for (ti, &t) in grid.iter().enumerate() {
            reports.push(scan_cell(cfg, d, ti, t)?);
        }
    }
    Ok(reports)
}

fn scan_cell(cfg: &ScanConfig, d: usize, t_index: usize, t: f64) -> Result<ScanReport> {
    let kind = cfg.kind;
    let ks = kind.k_values(d);
    let n = d.saturating_sub(2);
    let vertices = match kind {
        ScanKind::Main | ScanKind::SecondTerm if n <= 4 => Polytope::new(n, d, t)?.vertices(),
        ScanKind::FirstTerm if n <= 4 => Polytope::weak(n).vertices(),
        _ => Vec::new(),
    };
    let random = if kind == ScanKind::K0 && 1.0 + nu_ratio(d, t) >= 0.0 { 0 } else { cfg.samples };
    let cell = Cell {
        kind,
        d,
        t,
        ks: &ks,
        vertices,
        random,
        seed: cfg.seed,
        domain: rng::domain(kind.tag(), d as u16, t_index as u16, 0),
    };

    let accs = (0..cell.total() as u64)
        .into_par_iter()
        .try_fold(
            || vec![Acc::EMPTY; ks.len()],
            |mut accs, i| -> Result<Vec<Acc>> {
                let (_, margins) = cell.evaluate(i)?;
                for (acc, m) in accs.iter_mut().zip(margins) {
                    if let Some(m) = m {
                        *acc = acc.add(m, i);
                    }
                }
                Ok(accs)
            },
        )
        .try_reduce(
            || vec![Acc::EMPTY; ks.len()],
            |a, b| Ok(a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()),
        )?;

    let mut cells = Vec::with_capacity(ks.len());
    for (k, acc) in ks.iter().zip(&accs) {
        let worst_input = if acc.samples > 0 { Some(cell.evaluate(acc.worst_index)?.0) } else { None };
        cells.push(CellReport {
            d,
            t,
            k: *k,
            samples: acc.samples,
            violations: acc.violations,
            worst_margin: acc.worst,
            worst_input,
        });
    }
    Ok(ScanReport {
        kind,
        d,
        t_values: vec![t],
        k_values: ks.iter().flatten().copied().collect(),
        samples: cells.iter().map(|c| c.samples).max().unwrap_or(0),
        violations: cells.iter().map(|c| c.violations).sum(),
        worst_margin: cells.iter().map(|c| c.worst_margin).fold(f64::INFINITY, f64::min),
        seed: cfg.seed,
        cells,
    })
}
