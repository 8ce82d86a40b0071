//! Quasi-exact solutions of the parity-symmetric quartic oscillator.
//!
//! For `x > 0` the ansatz `Ψ = p(x) e^{-∫X1}` with `p = Σ a_n X2^n` turns the
//! Schrödinger equation into the four-term recursion
//!
//! ```text
//! −(n+2)(n+1) β3² a_{n+2} + (n+1) c a_{n+1} − 2E a_n + (α + n) a_{n−1} = 0
//! ```
//!
//! which truncates at `a_N` only for `α = −(N+1)`. Rows `n = 0..=N` form the
//! eigenproblem `M a = E a`; the two half-line solutions are then glued at
//! `x = 0` by a parity-dependent continuity condition that fixes `β2`.

mod closed_form;
mod czero;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::BetaVector;
use crate::poly::Poly;
use crate::potential::PotentialParams;

pub use closed_form::{
    closed_form_n1, closed_form_n2, n1_scaling_energy, n2_even_beta2_from_energy, n2_scaling_energies,
    simultaneous_n2_beta3, N2Branch,
};
pub use czero::{czero_coefficients, czero_continuity, czero_solutions, CZERO_RATIO_SCAN};

/// Target for the polished continuity residual.
pub const CONTINUITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "even" | "+" => Ok(Parity::Even),
            "odd" | "-" => Ok(Parity::Odd),
            other => Err(Error::InvalidArgument(format!("unknown parity '{other}'"))),
        }
    }
}

/// `α = −(N+1)`, the only coupling for which the recursion terminates at `a_N`.
pub fn alpha_for(n: i64) -> Result<f64> {
    if n < 0 {
        return Err(Error::NegativeDegree(n));
    }
    Ok(-((n + 1) as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QesProblem {
    pub n: usize,
    pub parity: Parity,
    pub beta1: f64,
    pub beta3: f64,
    /// Only used for the families where continuity leaves `β2` free
    /// (`N = 0` even and `N = 1` odd, both with `β1 = 0`), or to evaluate a
    /// single candidate `β2` instead of scanning.
    pub beta2: Option<f64>,
}

impl QesProblem {
    pub fn new(n: usize, parity: Parity, beta1: f64, beta3: f64) -> Self {
        Self { n, parity, beta1, beta3, beta2: None }
    }

    pub fn with_beta2(mut self, beta2: f64) -> Self {
        self.beta2 = Some(beta2);
        self
    }

    pub fn alpha(&self) -> f64 {
        -((self.n + 1) as f64)
    }

    /// True for the families in which the continuity condition holds for every `β2`.
    pub fn has_free_beta2(&self) -> bool {
        self.beta1 == 0.0 && matches!((self.n, self.parity), (0, Parity::Even) | (1, Parity::Odd))
    }
}

/// The `(N+1)×(N+1)` matrix of the recursion rows `n = 0..=N`, stored dense.
///
/// Nonzero entries sit at `(n, n−1)`, `(n, n+1)` and `(n, n+2)`; the diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionMatrix {
    n: usize,
    c: f64,
    beta3: f64,
    rows: Vec<Vec<f64>>,
}

impl RecursionMatrix {
    pub fn build(n: usize, c: f64, beta3: f64) -> Result<Self> {
        if !(beta3 > 0.0) {
            return Err(Error::NonPositiveBeta3(beta3));
        }
        let dim = n + 1;
        let mut rows = vec![vec![0.0; dim]; dim];
        for (i, row) in rows.iter_mut().enumerate() {
            let k = i as f64;
            if i >= 1 {
                row[i - 1] = -0.5 * (n as f64 + 1.0 - k);
            }
            if i + 1 < dim {
                row[i + 1] = 0.5 * c * (k + 1.0);
            }
            if i + 2 < dim {
                row[i + 2] = -0.5 * beta3 * beta3 * (k + 2.0) * (k + 1.0);
            }
        }
        Ok(Self { n, c, beta3, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn casimir(&self) -> f64 {
        self.c
    }

    pub fn beta3(&self) -> f64 {
        self.beta3
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn apply(&self, a: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|row| row.iter().zip(a).map(|(m, x)| m * x).sum()).collect()
    }

    fn inf_norm(&self) -> f64 {
        self.rows.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `det(M − E I)` as a polynomial in `E`, from the upper-Hessenberg
    /// determinant recurrence on the leading principal minors.
    pub fn characteristic_polynomial(&self) -> Poly {
        let dim = self.dim();
        let entry = |i: usize, j: usize| -> Poly {
            if i == j {
                Poly::linear(self.rows[i][j], -1.0)
            } else {
                Poly::constant(self.rows[i][j])
            }
        };
        let mut minors = vec![Poly::constant(1.0)];
        for k in 0..dim {
            let mut next = entry(k, k).mul(&minors[k]);
            let mut sub_product = 1.0;
            for i in (0..k).rev() {
                sub_product *= self.rows[i + 1][i];
                if sub_product == 0.0 {
                    break;
                }
                let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
                next = next.add(&entry(i, k).mul(&minors[i]).scale(sign * sub_product));
            }
            minors.push(next);
        }
        minors.pop().unwrap_or_else(|| Poly::constant(1.0))
    }

    pub fn energy_roots(&self) -> EnergyRoots {
        let r = self.characteristic_polynomial().real_roots();
        EnergyRoots { roots: r.roots, complex_discarded: r.complex_discarded }
    }

    /// Coefficient vector for eigenvalue `energy`, normalized to `a_N = 1`.
    ///
    /// Rows `N, N−1, …, 1` are solved downward for `a_{N−1}, …, a_0`; row 0 is
    /// then the characteristic equation and is checked against `1e-9`.
    pub fn eigen_coefficients(&self, energy: f64) -> Result<Vec<f64>> {
        let a = self.downward_coefficients(energy);
        let residual = self.row0_relative_residual(energy, &a);
        if residual > 1e-9 {
            return Err(Error::NotAnEigenvalue { energy, residual });
        }
        Ok(a)
    }

    fn downward_coefficients(&self, energy: f64) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n + 1];
        a[n] = 1.0;
        for row in (1..=n).rev() {
            let mut rhs = energy * a[row];
            if row < n {
                rhs -= self.rows[row][row + 1] * a[row + 1];
            }
            if row + 2 <= n {
                rhs -= self.rows[row][row + 2] * a[row + 2];
            }
            a[row - 1] = rhs / self.rows[row][row - 1];
        }
        a
    }

    fn row0_relative_residual(&self, energy: f64, a: &[f64]) -> f64 {
        let terms = [
            energy * a[0],
            if self.n >= 1 { -self.rows[0][1] * a[1] } else { 0.0 },
            if self.n >= 2 { -self.rows[0][2] * a[2] } else { 0.0 },
        ];
        let scale: f64 = terms.iter().map(|t| t.abs()).sum::<f64>().max(1.0);
        terms.iter().sum::<f64>().abs() / scale
    }

    /// `‖M a − E a‖∞ / (‖a‖∞ · max(1, ‖M‖∞, |E|))`.
    pub fn eigen_residual(&self, energy: f64, a: &[f64]) -> f64 {
        let ma = self.apply(a);
        let num = ma.iter().zip(a).map(|(m, x)| (m - energy * x).abs()).fold(0.0, f64::max);
        let a_norm = a.iter().map(|x| x.abs()).fold(0.0, f64::max);
        num / (a_norm * self.inf_norm().max(energy.abs()).max(1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRoots {
    /// Real roots, ascending.
    pub roots: Vec<f64>,
    pub complex_discarded: usize,
}

/// Largest violation of the recursion over rows `n = 0..=N+1`, with
/// `a_{-1} = a_{N+1} = a_{N+2} = 0` and `α = −(N+1)`. Scaled by the largest
/// term in each row.
pub fn recursion_residual(n: usize, c: f64, beta3: f64, energy: f64, a: &[f64]) -> f64 {
    let alpha = -((n + 1) as f64);
    let coeff = |k: i64| -> f64 {
        if k < 0 || k as usize > n {
            0.0
        } else {
            a[k as usize]
        }
    };
    let mut worst: f64 = 0.0;
    for row in 0..=(n as i64 + 1) {
        let k = row as f64;
        let terms = [
            -(k + 2.0) * (k + 1.0) * beta3 * beta3 * coeff(row + 2),
            (k + 1.0) * c * coeff(row + 1),
            -2.0 * energy * coeff(row),
            (alpha + k) * coeff(row - 1),
        ];
        let scale = terms.iter().map(|t| t.abs()).fold(1.0, f64::max);
        worst = worst.max(terms.iter().sum::<f64>().abs() / scale);
    }
    worst
}

/// Matching condition at `x = 0`.
///
/// Even: `a0 β1 − Σ_{n≥1} a_n (n β3 − β1 β2) β2^{n−1}` (derivative continuity).
/// Odd: `Σ a_n β2^n` (value continuity).
pub fn continuity_residual(a: &[f64], beta: &BetaVector, parity: Parity) -> f64 {
    continuity_terms(a, beta, parity).0
}

/// `|continuity_residual|` divided by the sum of the absolute values of its terms.
pub fn relative_continuity_residual(a: &[f64], beta: &BetaVector, parity: Parity) -> f64 {
    let (r, scale) = continuity_terms(a, beta, parity);
    if scale > 0.0 {
        (r / scale).abs()
    } else {
        r.abs()
    }
}

/// Residual and the sum of the absolute values of its terms.
fn continuity_terms(a: &[f64], beta: &BetaVector, parity: Parity) -> (f64, f64) {
    let BetaVector { beta1, beta2, beta3 } = *beta;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    match parity {
        Parity::Even => {
            let mut push = |t: f64| {
                sum += t;
                abs_sum += t.abs();
            };
            if let Some(&a0) = a.first() {
                push(a0 * beta1);
            }
            let mut power = 1.0;
            for (n, &an) in a.iter().enumerate().skip(1) {
                push(-an * (n as f64 * beta3 - beta1 * beta2) * power);
                power *= beta2;
            }
        }
        Parity::Odd => {
            let mut power = 1.0;
            for &an in a {
                let t = an * power;
                sum += t;
                abs_sum += t.abs();
                power *= beta2;
            }
        }
    }
    (sum, abs_sum)
}

/// A matched solution: energy, the `β2` fixed by continuity, and `a_0..a_N` with `a_N = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QesSolution {
    pub n: usize,
    pub parity: Parity,
    pub energy: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub coeffs: Vec<f64>,
    pub casimir: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionChecks {
    pub matrix_residual: f64,
    pub continuity_residual: f64,
    pub recursion_residual: f64,
}

impl QesSolution {
    /// Assembles a solution at `(β1, β2, β3)` for a given root `energy`.
    pub fn assemble(n: usize, parity: Parity, energy: f64, beta: BetaVector) -> Result<Self> {
        let c = beta.casimir_c();
        let m = RecursionMatrix::build(n, c, beta.beta3)?;
        let coeffs = m.eigen_coefficients(energy)?;
        Ok(Self { n, parity, energy, beta1: beta.beta1, beta2: beta.beta2, beta3: beta.beta3, coeffs, casimir: c })
    }

    pub fn beta(&self) -> BetaVector {
        BetaVector::new(self.beta1, self.beta2, self.beta3)
    }

    pub fn alpha(&self) -> f64 {
        -((self.n + 1) as f64)
    }

    pub fn potential(&self) -> PotentialParams {
        PotentialParams { alpha: self.alpha(), beta: self.beta() }
    }

    pub fn checks(&self) -> Result<SolutionChecks> {
        let m = RecursionMatrix::build(self.n, self.casimir, self.beta3)?;
        Ok(SolutionChecks {
            matrix_residual: m.eigen_residual(self.energy, &self.coeffs),
            continuity_residual: continuity_residual(&self.coeffs, &self.beta(), self.parity).abs(),
            recursion_residual: recursion_residual(self.n, self.casimir, self.beta3, self.energy, &self.coeffs),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// `β2` scan interval; defaults to `[−10β1² − 10, 10β1² + 10]`.
    pub bracket: Option<(f64, f64)>,
    pub samples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { bracket: None, samples: 2000 }
    }
}

impl SolverConfig {
    pub fn bracket_for(&self, beta1: f64) -> (f64, f64) {
        self.bracket.unwrap_or_else(|| {
            let w = 10.0 * beta1 * beta1 + 10.0;
            (-w, w)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    /// Sorted by `β2`, then `E`.
    pub solutions: Vec<QesSolution>,
    pub bracket: (f64, f64),
    pub samples: usize,
    /// Set when the whole bracket was scanned without a single crossing.
    pub bracket_exhausted: bool,
}

#[derive(Debug, Clone, Copy)]
struct BranchPoint {
    energy: f64,
    residual: f64,
}

fn branch_points(prob: &QesProblem, beta2: f64) -> Vec<BranchPoint> {
    let beta = BetaVector::new(prob.beta1, beta2, prob.beta3);
    let Ok(m) = RecursionMatrix::build(prob.n, beta.casimir_c(), prob.beta3) else {
        return Vec::new();
    };
    m.energy_roots()
        .roots
        .into_iter()
        .map(|energy| {
            let a = m.downward_coefficients(energy);
            BranchPoint { energy, residual: continuity_residual(&a, &beta, prob.parity) }
        })
        .collect()
}

/// Index of the root in `pts` closest to `target`.
fn nearest(pts: &[BranchPoint], target: f64) -> Option<usize> {
    pts.iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| (x.energy - target).abs().total_cmp(&(y.energy - target).abs()))
        .map(|(i, _)| i)
}

/// Solves `det(M − E) = 0` together with the parity continuity condition.
///
/// Scans `β2` over the configured bracket, follows each real energy branch
/// between neighbouring samples, and bisects every sign change of the
/// continuity residual. Sample evaluation runs in parallel; the refinement
/// schedule and output order are fixed, so results do not depend on scheduling.
pub fn solve_qes(prob: &QesProblem, cfg: &SolverConfig) -> Result<SolveOutcome> {
    if !(prob.beta3 > 0.0) {
        return Err(Error::NonPositiveBeta3(prob.beta3));
    }
    let bracket = cfg.bracket_for(prob.beta1);

    if prob.has_free_beta2() || prob.beta2.is_some() {
        let beta2 = prob.beta2.ok_or(Error::FreeBeta2)?;
        let solutions = solutions_at(prob, beta2);
        let exhausted = solutions.is_empty();
        return Ok(SolveOutcome { solutions, bracket: (beta2, beta2), samples: 1, bracket_exhausted: exhausted });
    }

    let samples = cfg.samples.max(2);
    if !(bracket.1 > bracket.0) {
        return Err(Error::InvalidArgument(format!("empty beta2 bracket {bracket:?}")));
    }
    let step = (bracket.1 - bracket.0) / (samples - 1) as f64;
    let grid: Vec<f64> = (0..samples).map(|i| bracket.0 + i as f64 * step).collect();
    let points: Vec<Vec<BranchPoint>> = grid.par_iter().map(|&b2| branch_points(prob, b2)).collect();

    let mut found = Vec::new();
    for i in 0..samples - 1 {
        let (left, right) = (&points[i], &points[i + 1]);
        for p in left {
            if p.residual == 0.0 {
                found.push((grid[i], p.energy));
                continue;
            }
            let Some(j) = nearest(right, p.energy) else { continue };
            // mutual nearest neighbours only, so branches are not crossed
            if nearest(left, right[j].energy).map(|k| left[k].energy) != Some(p.energy) {
                continue;
            }
            let q = right[j];
            if p.residual * q.residual < 0.0 {
                if let Some(hit) = bisect_branch(prob, (grid[i], *p), (grid[i + 1], q)) {
                    found.push(hit);
                }
            }
        }
    }

    let mut solutions: Vec<QesSolution> = Vec::new();
    for (beta2, energy) in found {
        let Ok(sol) = QesSolution::assemble(prob.n, prob.parity, energy, BetaVector::new(prob.beta1, beta2, prob.beta3))
        else {
            continue;
        };
        if !continuity_ok(&sol) {
            continue;
        }
        if solutions.iter().any(|s| (s.beta2 - sol.beta2).abs() < 1e-9 && (s.energy - sol.energy).abs() < 1e-9) {
            continue;
        }
        solutions.push(sol);
    }
    solutions.sort_by(|a, b| a.beta2.total_cmp(&b.beta2).then(a.energy.total_cmp(&b.energy)));
    let exhausted = solutions.is_empty();
    Ok(SolveOutcome { solutions, bracket, samples, bracket_exhausted: exhausted })
}

fn continuity_ok(sol: &QesSolution) -> bool {
    let (r, scale) = continuity_terms(&sol.coeffs, &sol.beta(), sol.parity);
    r.abs() <= CONTINUITY_TOL * scale.max(1.0)
}

fn solutions_at(prob: &QesProblem, beta2: f64) -> Vec<QesSolution> {
    let beta = BetaVector::new(prob.beta1, beta2, prob.beta3);
    let Ok(m) = RecursionMatrix::build(prob.n, beta.casimir_c(), prob.beta3) else {
        return Vec::new();
    };
    m.energy_roots()
        .roots
        .into_iter()
        .filter_map(|e| QesSolution::assemble(prob.n, prob.parity, e, beta).ok())
        .filter(continuity_ok)
        .collect()
}

/// Bisects on `β2`, following the energy branch by continuity.
fn bisect_branch(prob: &QesProblem, lo: (f64, BranchPoint), hi: (f64, BranchPoint)) -> Option<(f64, f64)> {
    let (mut b_lo, mut p_lo) = lo;
    let (mut b_hi, mut p_hi) = hi;
    for _ in 0..200 {
        let mid = 0.5 * (b_lo + b_hi);
        if mid <= b_lo || mid >= b_hi {
            break;
        }
        let pts = branch_points(prob, mid);
        let guess = 0.5 * (p_lo.energy + p_hi.energy);
        let p_mid = pts[nearest(&pts, guess)?];
        if p_mid.residual == 0.0 {
            return Some((mid, p_mid.energy));
        }
        if p_lo.residual * p_mid.residual < 0.0 {
            b_hi = mid;
            p_hi = p_mid;
        } else {
            b_lo = mid;
            p_lo = p_mid;
        }
    }
    let (b, p) = if p_lo.residual.abs() <= p_hi.residual.abs() { (b_lo, p_lo) } else { (b_hi, p_hi) };
    Some((b, p.energy))
}

/// Relative defect `|E(β_t) − t² E(β)| / |t² E(β)|` of the energy scaling law,
/// maximized over all solutions of `prob`. Solutions are paired through
/// `β2 ↦ t² β2`; zero energies are compared in absolute terms.
pub fn scaled_energy_check(prob: &QesProblem, t: f64, cfg: &SolverConfig) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveScale(t));
    }
    let original = solve_qes(prob, cfg)?;
    if original.solutions.is_empty() {
        return Err(Error::NoRealSolution(format!("no solution for {prob:?}")));
    }
    let t2 = t * t;
    let scaled_prob = QesProblem {
        beta1: t * prob.beta1,
        beta3: t * t2 * prob.beta3,
        beta2: prob.beta2.map(|b| t2 * b),
        ..*prob
    };
    let (lo, hi) = cfg.bracket_for(prob.beta1);
    let scaled_cfg = SolverConfig { bracket: Some((t2 * lo, t2 * hi)), ..*cfg };
    let scaled = solve_qes(&scaled_prob, &scaled_cfg)?;

    let mut worst: f64 = 0.0;
    for sol in &original.solutions {
        let partner = scaled
            .solutions
            .iter()
            .filter(|s| (s.beta2 - t2 * sol.beta2).abs() <= 1e-6 * (1.0 + (t2 * sol.beta2).abs()))
            .min_by(|a, b| (a.energy - t2 * sol.energy).abs().total_cmp(&(b.energy - t2 * sol.energy).abs()))
            .ok_or_else(|| Error::NoRealSolution(format!("no scaled partner for beta2 = {}", sol.beta2)))?;
        let target = t2 * sol.energy;
        let defect = if target.abs() > 1e-300 {
            (partner.energy - target).abs() / target.abs()
        } else {
            partner.energy.abs()
        };
        worst = worst.max(defect);
    }
    Ok(worst)
}
