//! Finite-difference spectrum of `H = −½ d²/dx² + V(x)` used as an independent
//! check on the closed-form energies.
//!
//! The main mode works on `x = tan y` over `(−π/2, π/2)` with Dirichlet ends.
//! With `d/dx = cos²y d/dy`, the operator `2H` is discretized in the
//! flux form `−cos²y ∂_y(cos²y ∂_y ψ) + 2Vψ` and symmetrized by `φ = ψ / cos y`,
//! which gives an exactly symmetric tridiagonal matrix whose eigenvectors
//! satisfy `h Σ φ² ≈ ∫ ψ² dx`. A secondary mode uses a uniform `x` grid on a
//! large box.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialParams;
use crate::tridiag::SymTridiag;

/// Grids below this size are accepted but never reported as converged.
pub const RELIABLE_GRID_POINTS: usize = 200;
/// Smallest grid the oracle will build at all.
pub const MIN_GRID_POINTS: usize = 11;
/// Finest-level disagreement above which a run counts as not converged.
pub const CONVERGENCE_LIMIT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Points on the coarsest level, endpoints included.
    pub grid_points: usize,
    pub domain: (f64, f64),
    pub eigen_count: usize,
    /// Levels `n, 2n − 1, 4n − 3, …` (the spacing halves each time).
    pub refinement_levels: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { grid_points: 2001, domain: (-FRAC_PI_2, FRAC_PI_2), eigen_count: 5, refinement_levels: 3 }
    }
}

impl OracleConfig {
    pub fn with_grid(grid_points: usize, eigen_count: usize) -> Self {
        Self { grid_points, eigen_count, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_points < MIN_GRID_POINTS {
            return Err(Error::InvalidArgument(format!(
                "grid_points must be at least {MIN_GRID_POINTS}, got {}",
                self.grid_points
            )));
        }
        let (lo, hi) = self.domain;
        if !(hi > lo) || lo < -FRAC_PI_2 || hi > FRAC_PI_2 {
            return Err(Error::InvalidArgument(format!("domain must satisfy -pi/2 <= y_min < y_max <= pi/2, got {:?}", self.domain)));
        }
        if self.eigen_count == 0 || self.eigen_count > self.grid_points - 2 {
            return Err(Error::InvalidArgument(format!("eigen_count {} out of range", self.eigen_count)));
        }
        if self.refinement_levels == 0 {
            return Err(Error::InvalidArgument("refinement_levels must be at least 1".into()));
        }
        Ok(())
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        (0..self.refinement_levels).map(|k| ((self.grid_points - 1) << k) + 1).collect()
    }
}

/// Eigenvalues on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub grid_points: usize,
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Richardson-extrapolated energies, ascending.
    pub energies: Vec<f64>,
    pub levels: Vec<LevelResult>,
    /// Per-level maximum change from the previous level (first entry is 0).
    pub level_changes: Vec<f64>,
    /// `|extrapolated − finest|`, maximized over the reported energies.
    pub precision: f64,
    /// Maximum disagreement between the two finest levels.
    pub disagreement: f64,
    pub converged: bool,
    /// Interior nodes of the finest grid.
    pub nodes: Vec<f64>,
    /// Eigenvectors on `nodes`, scaled so that `Σ w_i φ_i² = 1` with the
    /// grid spacing as weight; in the `tan y` mode `φ = ψ / cos y`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub mode: GridMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    Arctan,
    Box,
}

/// Tridiagonal discretization of `2H` on the interior `y` nodes of a grid
/// with `grid_points` points spanning `domain`.
pub fn discretize(p: &PotentialParams, grid_points: usize, domain: (f64, f64)) -> Result<(SymTridiag, Vec<f64>)> {
    if grid_points < 3 {
        return Err(Error::InvalidArgument("need at least 3 grid points".into()));
    }
    let (y0, y1) = domain;
    let h = (y1 - y0) / (grid_points - 1) as f64;
    let h2 = h * h;
    let m = grid_points - 2;
    let ys: Vec<f64> = (1..=m).map(|j| y0 + j as f64 * h).collect();
    let half = |y: f64| y.cos().powi(2);
    let mut diag = Vec::with_capacity(m);
    let mut off = Vec::with_capacity(m.saturating_sub(1));
    for (j, &y) in ys.iter().enumerate() {
        let c = y.cos();
        let flux = half(y + 0.5 * h) + half(y - 0.5 * h);
        diag.push(flux * c * c / h2 + 2.0 * p.eval(y.tan()));
        if j + 1 < m {
            let c_next = ys[j + 1].cos();
            off.push(-half(y + 0.5 * h) * c * c_next / h2);
        }
    }
    Ok((SymTridiag::new(diag, off)?, ys))
}

/// Lowest energies of `H` (eigenvalues of `2H` halved) on one grid.
fn level_energies(p: &PotentialParams, grid_points: usize, domain: (f64, f64), count: usize) -> Result<Vec<f64>> {
    let (t, _) = discretize(p, grid_points, domain)?;
    Ok(t.lowest(count)?.into_iter().map(|l| 0.5 * l).collect())
}

/// Repeated Richardson extrapolation for a second-order scheme with the
/// spacing halving between levels.
pub fn richardson(levels: &[Vec<f64>]) -> Vec<f64> {
    let count = levels.iter().map(Vec::len).min().unwrap_or(0);
    let mut table: Vec<Vec<f64>> = levels.iter().map(|l| l[..count].to_vec()).collect();
    let mut factor = 4.0;
    while table.len() > 1 {
        table = table
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).map(|(c, f)| (factor * f - c) / (factor - 1.0)).collect())
            .collect();
        factor *= 4.0;
    }
    table.pop().unwrap_or_default()
}

fn assemble(
    levels: Vec<LevelResult>,
    nodes: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
    finest_points: usize,
    mode: GridMode,
) -> SpectrumResult {
    let raw: Vec<Vec<f64>> = levels.iter().map(|l| l.energies.clone()).collect();
    let energies = richardson(&raw);
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let mut level_changes = vec![0.0];
    for w in raw.windows(2) {
        level_changes.push(diff(&w[0], &w[1]));
    }
    let disagreement = if raw.len() > 1 { level_changes[level_changes.len() - 1] } else { f64::INFINITY };
    let precision = raw.last().map(|f| diff(&energies, f)).unwrap_or(0.0);
    let coarsest = levels.first().map(|l| l.grid_points).unwrap_or(0);
    let converged = coarsest >= RELIABLE_GRID_POINTS && finest_points >= RELIABLE_GRID_POINTS && disagreement <= CONVERGENCE_LIMIT;
    SpectrumResult { energies, levels, level_changes, precision, disagreement, converged, nodes, eigenvectors, mode }
}

/// The `eigen_count` lowest energies at every refinement level, extrapolated.
/// Eigenvectors are taken from the finest level.
pub fn lowest_eigenvalues(p: &PotentialParams, cfg: &OracleConfig) -> Result<SpectrumResult> {
    cfg.validate()?;
    let sizes = cfg.level_sizes();
    let finest = *sizes.last().expect("at least one level");
    let levels: Vec<LevelResult> = sizes
        .par_iter()
        .map(|&n| level_energies(p, n, cfg.domain, cfg.eigen_count).map(|energies| LevelResult { grid_points: n, energies }))
        .collect::<Result<_>>()?;

    let (t, nodes) = discretize(p, finest, cfg.domain)?;
    let (_, vecs) = t.lowest_pairs(cfg.eigen_count)?;
    let h = (cfg.domain.1 - cfg.domain.0) / (finest - 1) as f64;
    let scale = 1.0 / h.sqrt();
    let eigenvectors = vecs.into_iter().map(|v| v.into_iter().map(|x| x * scale).collect()).collect();
    Ok(assemble(levels, nodes, eigenvectors, finest, GridMode::Arctan))
}

/// Fails with `NonConvergence` unless the run converged.
pub fn ensure_converged(result: &SpectrumResult) -> Result<()> {
    if result.converged {
        Ok(())
    } else {
        Err(Error::NonConvergence { disagreement: result.disagreement, limit: CONVERGENCE_LIMIT })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxConfig {
    pub grid_points: usize,
    pub eigen_count: usize,
    pub refinement_levels: usize,
    /// Highest energy of interest; the box edge `L` is chosen with `V(L) > e_max + 50`.
    pub e_max: f64,
}

impl Default for BoxConfig {
    fn default() -> Self {
        Self { grid_points: 2001, eigen_count: 5, refinement_levels: 3, e_max: 10.0 }
    }
}

/// Half-width `L` of the box: the smallest power-of-two multiple of `1/4`
/// beyond which `V` stays above `e_max + 50`.
pub fn box_half_width(p: &PotentialParams, e_max: f64) -> f64 {
    let target = e_max + 50.0;
    let mut l: f64 = 0.25;
    while l < 1e6 {
        // V is eventually increasing; check a few points past L as well
        if (0..8).all(|k| p.eval(l * (1.0 + k as f64 / 8.0)) > target) {
            return l;
        }
        l *= 2.0;
    }
    l
}

/// Cross-check mode: uniform `x` grid on `[−L, L]` with Dirichlet ends.
pub fn box_eigenvalues(p: &PotentialParams, cfg: &BoxConfig) -> Result<SpectrumResult> {
    if cfg.grid_points < MIN_GRID_POINTS || cfg.eigen_count == 0 || cfg.eigen_count > cfg.grid_points - 2 || cfg.refinement_levels == 0 {
        return Err(Error::InvalidArgument(format!("invalid box configuration {cfg:?}")));
    }
    let l = box_half_width(p, cfg.e_max);
    let build = |n: usize| -> Result<(SymTridiag, Vec<f64>, f64)> {
        let h = 2.0 * l / (n - 1) as f64;
        let xs: Vec<f64> = (1..n - 1).map(|j| -l + j as f64 * h).collect();
        let diag = xs.iter().map(|&x| 2.0 / (h * h) + 2.0 * p.eval(x)).collect();
        let off = vec![-1.0 / (h * h); xs.len() - 1];
        Ok((SymTridiag::new(diag, off)?, xs, h))
    };
    let sizes: Vec<usize> = (0..cfg.refinement_levels).map(|k| ((cfg.grid_points - 1) << k) + 1).collect();
    let levels: Vec<LevelResult> = sizes
        .par_iter()
        .map(|&n| {
            let (t, _, _) = build(n)?;
            Ok(LevelResult { grid_points: n, energies: t.lowest(cfg.eigen_count)?.into_iter().map(|e| 0.5 * e).collect() })
        })
        .collect::<Result<_>>()?;
    let finest = *sizes.last().expect("at least one level");
    let (t, xs, h) = build(finest)?;
    let (_, vecs) = t.lowest_pairs(cfg.eigen_count)?;
    let scale = 1.0 / h.sqrt();
    let eigenvectors = vecs.into_iter().map(|v| v.into_iter().map(|x| x * scale).collect()).collect();
    Ok(assemble(levels, xs, eigenvectors, finest, GridMode::Box))
}

/// Index `k` with `|energies[k] − energy| ≤ tol`.
pub fn rank_of_energy(result: &SpectrumResult, energy: f64, tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let hits: Vec<usize> = result
        .energies
        .iter()
        .enumerate()
        .filter(|(_, e)| (*e - energy).abs() <= tol)
        .map(|(k, _)| k)
        .collect();
    match hits.as_slice() {
        [] => Err(Error::NoMatch { energy, tol }),
        [k] => Ok(*k),
        _ => Err(Error::AmbiguousMatch { energy, tol, count: hits.len() }),
    }
}

impl SpectrumResult {
    /// `x` coordinate and quadrature weight factor `φ → ψ` for each node.
    fn node_map(&self) -> Vec<(f64, f64)> {
        match self.mode {
            GridMode::Arctan => self.nodes.iter().map(|&y| (y.tan(), y.cos())).collect(),
            GridMode::Box => self.nodes.iter().map(|&x| (x, 1.0)).collect(),
        }
    }

    /// `|⟨ψ_k, ψ⟩| / ‖ψ‖` in `L²(dx)`, using the finest grid.
    pub fn overlap(&self, k: usize, psi: impl Fn(f64) -> f64) -> Result<f64> {
        let v = self
            .eigenvectors
            .get(k)
            .ok_or_else(|| Error::InvalidArgument(format!("no eigenvector {k}")))?;
        let map = self.node_map();
        // both sides in the φ variable, where the measure is uniform
        let phi: Vec<f64> = map.iter().map(|&(x, c)| psi(x) / c).collect();
        let dot: f64 = v.iter().zip(&phi).map(|(a, b)| a * b).sum();
        let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let np: f64 = phi.iter().map(|a| a * a).sum::<f64>().sqrt();
        if np == 0.0 || nv == 0.0 {
            return Err(Error::NotNormalizable);
        }
        Ok((dot / (nv * np)).abs())
    }

    /// Sign changes of eigenvector `k`, ignoring entries below `1e-8` of its peak.
    pub fn node_count(&self, k: usize) -> Result<usize> {
        let v = self
            .eigenvectors
            .get(k)
            .ok_or_else(|| Error::InvalidArgument(format!("no eigenvector {k}")))?;
        let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut last = 0.0;
        let mut count = 0;
        for &x in v {
            if x.abs() <= 1e-8 * peak {
                continue;
            }
            if last * x < 0.0 {
                count += 1;
            }
            last = x;
        }
        Ok(count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::BetaVector;

    fn reference_well() -> PotentialParams {
        let (b1, b3) = (-0.7, 0.1);
        PotentialParams::new(-2.0, BetaVector::new(b1, b1 * b1 + b3 / (2.0 * b1), b3)).unwrap()
    }

    #[test]
    fn matrix_is_symmetric_by_construction() {
        let (t, ys) = discretize(&reference_well(), 101, (-FRAC_PI_2, FRAC_PI_2)).unwrap();
        assert_eq!(t.len(), 99);
        assert_eq!(ys.len(), 99);
        assert!(t.off().iter().all(|&o| o < 0.0));
    }

    #[test]
    fn free_particle_is_positive() {
        let zero = PotentialParams { alpha: 0.0, beta: BetaVector::new(0.0, 0.0, 1e-300) };
        let r = lowest_eigenvalues(&zero, &OracleConfig::with_grid(401, 2)).unwrap();
        // the continuum edge sits at 0; extrapolation may overshoot, raw levels may not
        assert!(r.levels.iter().all(|l| l.energies[0] > 0.0));
    }

    #[test]
    fn harmonic_limit() {
        let p = PotentialParams::new(0.0, BetaVector::new(0.0, 1.0, 1e-6)).unwrap();
        let r = lowest_eigenvalues(&p, &OracleConfig::with_grid(1001, 3)).unwrap();
        for (k, e) in r.energies.iter().enumerate() {
            assert!((e - (k as f64 + 0.5)).abs() < 1e-4, "{k}: {e}");
        }
    }

    #[test]
    fn reference_well_levels() {
        let r = lowest_eigenvalues(&reference_well(), &OracleConfig { grid_points: 1001, eigen_count: 3, ..Default::default() }).unwrap();
        for (e, want) in r.energies.iter().zip([-0.366183, -0.183108, 0.280714]) {
            assert!((e - want).abs() < 1e-5, "{e} vs {want}");
        }
        assert!(r.converged);
        assert_eq!(rank_of_energy(&r, 0.280714, 1e-5).unwrap(), 2);
        assert!(matches!(rank_of_energy(&r, 5.0, 1e-5), Err(Error::NoMatch { .. })));
        assert!(matches!(rank_of_energy(&r, 0.0, 1.0), Err(Error::AmbiguousMatch { .. })));
        for k in 0..3 {
            assert_eq!(r.node_count(k).unwrap(), k);
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let cfg = OracleConfig { grid_points: 401, eigen_count: 4, refinement_levels: 1, ..Default::default() };
        let r = lowest_eigenvalues(&reference_well(), &cfg).unwrap();
        let h = std::f64::consts::PI / 400.0;
        for i in 0..4 {
            for j in 0..4 {
                let d: f64 = h * r.eigenvectors[i].iter().zip(&r.eigenvectors[j]).map(|(a, b)| a * b).sum::<f64>();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-8);
            }
        }
        assert!(!r.converged, "single level is never reported as converged");
    }

    #[test]
    fn box_mode_agrees() {
        let r = box_eigenvalues(&reference_well(), &BoxConfig { grid_points: 1001, eigen_count: 3, refinement_levels: 3, e_max: 1.0 }).unwrap();
        for (e, want) in r.energies.iter().zip([-0.366183, -0.183108, 0.280714]) {
            assert!((e - want).abs() < 1e-5, "{e} vs {want}");
        }
    }

    #[test]
    fn small_grid_is_flagged() {
        let r = lowest_eigenvalues(&reference_well(), &OracleConfig::with_grid(51, 3)).unwrap();
        assert!(!r.converged);
        assert!(matches!(ensure_converged(&r), Err(Error::NonConvergence { .. })));
        assert!(OracleConfig::with_grid(5, 1).validate().is_err());
    }

    #[test]
    fn richardson_removes_h2_and_h4() {
        // E(h) = 1 + h² + h⁴ on h = 1, ½, ¼
        let f = |h: f64| vec![1.0 + h * h + h.powi(4)];
        let r = richardson(&[f(1.0), f(0.5), f(0.25)]);
        assert!((r[0] - 1.0).abs() < 1e-14);
    }
}
