//! A charged particle in the plane with a constant electric field along `x`
//! and a magnetic field `B_z` affine in `x`.
//!
//! The Hamiltonian `H = ½[−∂x² + (−i∂y + β2|x| + β3x²/2)² + α(β2 + β3|x|)]`
//! maps a mode `e^{iβ1 y} g(x)` to the one-dimensional quartic Hamiltonian
//! with labels `(β1, β2, β3)` acting on `g`. Superposing QES modes along a
//! family `β2(β1)` gives two-dimensional wavefunctions.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::BetaVector;
use crate::qes::{closed_form_n1, closed_form_n2, N2Branch, Parity, QesSolution};
use crate::wavefunction::WavefunctionSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EMFieldSpec {
    pub alpha: f64,
    pub beta2: f64,
    pub beta3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldComponents {
    pub phi: f64,
    pub a_y: f64,
    pub e_x: f64,
    pub b_z: f64,
}

impl EMFieldSpec {
    /// `Φ = α(β2 + β3x)`, `A_y = β2 + β3x`, `E_x = β3`, `B_z = β2 + β3x`.
    pub fn field_components(&self, x: f64) -> FieldComponents {
        let affine = self.beta2 + self.beta3 * x;
        FieldComponents { phi: self.alpha * affine, a_y: affine, e_x: self.beta3, b_z: affine }
    }
}

/// Complex samples on a tensor grid, `values[i * ys.len() + j] = f(xs[i], ys[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2 {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl Grid2 {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != xs.len() * ys.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                xs.len(),
                ys.len()
            )));
        }
        Ok(Self { xs, ys, values })
    }

    pub fn from_fn(xs: Vec<f64>, ys: Vec<f64>, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).map(|(x, y)| f(x, y)).collect();
        Self { xs, ys, values }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.ys.len() + j]
    }

    /// CSV with header `x,y,re,im`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,re,im")?;
        for (i, &x) in self.xs.iter().enumerate() {
            for (j, &y) in self.ys.iter().enumerate() {
                let v = self.get(i, j);
                writeln!(w, "{x:.16e},{y:.16e},{:.16e},{:.16e}", v.re, v.im)?;
            }
        }
        Ok(())
    }
}

/// Evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn uniform_step(v: &[f64], axis: &str) -> Result<f64> {
    if v.len() < 3 {
        return Err(Error::GridMismatch(format!("{axis} axis needs at least 3 points")));
    }
    let h = v[1] - v[0];
    let uniform = v.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    if !(h > 0.0) || !uniform {
        return Err(Error::GridMismatch(format!("{axis} axis is not uniform and increasing")));
    }
    Ok(h)
}

/// Applies `H` with second-order differences in `x` and `y`. The result lives
/// on the interior nodes of the input grid.
pub fn reducible_hamiltonian_apply(spec: &EMFieldSpec, f: &Grid2) -> Result<Grid2> {
    let hx = uniform_step(&f.xs, "x")?;
    let hy = uniform_step(&f.ys, "y")?;
    let (nx, ny) = (f.xs.len(), f.ys.len());
    if f.values.len() != nx * ny {
        return Err(Error::GridMismatch("value count does not match axes".into()));
    }
    let i_unit = Complex64::new(0.0, 1.0);
    let xs: Vec<f64> = f.xs[1..nx - 1].to_vec();
    let ys: Vec<f64> = f.ys[1..ny - 1].to_vec();
    let mut values = Vec::with_capacity(xs.len() * ys.len());
    for i in 1..nx - 1 {
        let x = f.xs[i];
        let ax = x.abs();
        let a = spec.beta2 * ax + 0.5 * spec.beta3 * x * x;
        let scalar = spec.alpha * (spec.beta2 + spec.beta3 * ax);
        for j in 1..ny - 1 {
            let c = f.get(i, j);
            let fxx = (f.get(i + 1, j) - 2.0 * c + f.get(i - 1, j)) / (hx * hx);
            let fyy = (f.get(i, j + 1) - 2.0 * c + f.get(i, j - 1)) / (hy * hy);
            let fy = (f.get(i, j + 1) - f.get(i, j - 1)) / (2.0 * hy);
            let two_h = -fxx - fyy - 2.0 * i_unit * a * fy + (a * a + scalar) * c;
            values.push(0.5 * two_h);
        }
    }
    Grid2::new(xs, ys, values)
}

/// A one-parameter family of QES solutions indexed by `β1` at fixed `β3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeFamily {
    /// `N = 1` even: `β2 = β1² + β3/(2β1)`.
    N1Even,
    N2Even(N2Branch),
    N2Odd,
}

impl ModeFamily {
    pub fn n(&self) -> usize {
        match self {
            ModeFamily::N1Even => 1,
            _ => 2,
        }
    }

    pub fn parity(&self) -> Parity {
        match self {
            ModeFamily::N2Odd => Parity::Odd,
            _ => Parity::Even,
        }
    }

    pub fn alpha(&self) -> f64 {
        -((self.n() + 1) as f64)
    }

    /// `(E, β2)` on the family at `β1`.
    pub fn energy_and_beta2(&self, beta1: f64, beta3: f64) -> Result<(f64, f64)> {
        match *self {
            ModeFamily::N1Even => closed_form_n1(Parity::Even, beta1, beta3, None),
            ModeFamily::N2Even(branch) => closed_form_n2(Parity::Even, beta1, beta3, branch),
            ModeFamily::N2Odd => closed_form_n2(Parity::Odd, beta1, beta3, N2Branch::Plus),
        }
    }

    pub fn mode(&self, beta1: f64, beta3: f64) -> Result<WavefunctionSpec> {
        let (energy, beta2) = self.energy_and_beta2(beta1, beta3)?;
        let sol = QesSolution::assemble(self.n(), self.parity(), energy, BetaVector::new(beta1, beta2, beta3))?;
        Ok(WavefunctionSpec::new(sol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// Each node contributes `w e^{iβ1 y} Ψ_{β1}(x)`.
    Direct,
    /// Each node contributes `w cos(β1 y) Ψ_{β1}(x)`, the average of the
    /// phases `e^{±iβ1 y}` on the same mode; the result is real.
    ConjugatePair,
}

/// Keep only nodes with `|E(β1) − target| ≤ eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSet {
    pub target: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSpec {
    pub family: ModeFamily,
    pub beta3: f64,
    pub beta1: Vec<f64>,
    pub weights: Vec<f64>,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub sampling: Sampling,
    pub level_set: Option<LevelSet>,
}

impl SynthesisSpec {
    /// Trapezoid rule on `count` nodes over `[lo, hi]`, including the `1/√(2π)` prefactor.
    pub fn trapezoid(family: ModeFamily, beta3: f64, range: (f64, f64), count: usize, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if count < 2 || !(range.1 > range.0) {
            return Err(Error::InvalidArgument(format!("need at least 2 nodes on a nonempty range, got {count} on {range:?}")));
        }
        let beta1 = linspace(range.0, range.1, count);
        let h = (range.1 - range.0) / (count - 1) as f64;
        let pre = 1.0 / (2.0 * PI).sqrt();
        let weights = (0..count).map(|i| if i == 0 || i == count - 1 { 0.5 * h * pre } else { h * pre }).collect();
        Ok(Self { family, beta3, beta1, weights, xs, ys, sampling: Sampling::Direct, level_set: None })
    }

    /// One node with unit weight.
    pub fn single(family: ModeFamily, beta3: f64, beta1: f64, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Self { family, beta3, beta1: vec![beta1], weights: vec![1.0], xs, ys, sampling: Sampling::Direct, level_set: None }
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn with_level_set(mut self, level_set: LevelSet) -> Self {
        self.level_set = Some(level_set);
        self
    }

    pub fn alpha(&self) -> f64 {
        self.family.alpha()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub beta1: f64,
    pub beta2: f64,
    pub energy: f64,
    pub weight: f64,
    /// Largest relative Schrödinger residual over the nonzero `x` nodes.
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub grid: Grid2,
    pub modes: Vec<ModeReport>,
    /// `max E − min E` over the used modes.
    pub energy_spread: f64,
}

/// Per-mode residual bound; a mode above it is rejected.
pub const MODE_RESIDUAL_TOL: f64 = 1e-8;

/// Quadrature sum over the family, accumulated in node order.
pub fn synthesize_psi(spec: &SynthesisSpec) -> Result<Synthesis> {
    if spec.beta1.len() != spec.weights.len() || spec.beta1.is_empty() {
        return Err(Error::InvalidArgument("beta1 nodes and weights must be nonempty and equal in length".into()));
    }
    let mut modes = Vec::new();
    let mut columns: Vec<(f64, f64, Vec<f64>)> = Vec::new();
    for (&b1, &w) in spec.beta1.iter().zip(&spec.weights) {
        let invalid = |e: Error| Error::InvalidMode { beta1: b1, reason: e.to_string() };
        let mode = spec.family.mode(b1, spec.beta3).map_err(invalid)?;
        if let Some(ls) = spec.level_set {
            if (mode.energy() - ls.target).abs() > ls.eps {
                continue;
            }
        }
        let max_residual = spec
            .xs
            .iter()
            .filter(|&&x| x != 0.0)
            .map(|&x| mode.relative_residual(x))
            .fold(0.0, f64::max);
        if !(max_residual <= MODE_RESIDUAL_TOL) {
            return Err(Error::InvalidMode { beta1: b1, reason: format!("residual {max_residual:e}") });
        }
        columns.push((b1, w, spec.xs.iter().map(|&x| mode.eval_psi(x)).collect()));
        modes.push(ModeReport { beta1: b1, beta2: mode.beta.beta2, energy: mode.energy(), weight: w, max_residual });
    }
    if modes.is_empty() {
        return Err(Error::InvalidArgument("no mode satisfies the level-set restriction".into()));
    }

    let ny = spec.ys.len();
    let mut values = vec![Complex64::new(0.0, 0.0); spec.xs.len() * ny];
    for (b1, w, psi) in &columns {
        for (j, &y) in spec.ys.iter().enumerate() {
            let phase = match spec.sampling {
                Sampling::Direct => Complex64::from_polar(*w, b1 * y),
                Sampling::ConjugatePair => Complex64::new(w * (b1 * y).cos(), 0.0),
            };
            for (i, &p) in psi.iter().enumerate() {
                values[i * ny + j] += phase * p;
            }
        }
    }
    let (lo, hi) = modes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), m| (l.min(m.energy), h.max(m.energy)));
    Ok(Synthesis {
        grid: Grid2::new(spec.xs.clone(), spec.ys.clone(), values)?,
        modes,
        energy_spread: hi - lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_examples() {
        let s = EMFieldSpec { alpha: -2.0, beta2: 0.4, beta3: 0.1 };
        let f0 = s.field_components(0.0);
        assert_eq!(f0, FieldComponents { phi: -0.8, a_y: 0.4, e_x: 0.1, b_z: 0.4 });
        assert_eq!(s.field_components(3.0).e_x, f0.e_x);
        assert!((s.field_components(1.0).b_z - f0.b_z - 0.1).abs() < 1e-15);
    }

    #[test]
    fn y_independent_input_reduces_to_1d() {
        let spec = EMFieldSpec { alpha: -1.0, beta2: 0.3, beta3: 0.6 };
        let xs = linspace(-3.0, 3.0, 61);
        let ys = linspace(0.0, 1.0, 5);
        let g = |x: f64| (-(x * x)).exp();
        let f = Grid2::from_fn(xs.clone(), ys.clone(), |x, _| Complex64::new(g(x), 0.0));
        let out = reducible_hamiltonian_apply(&spec, &f).unwrap();
        let p = crate::potential::PotentialParams::new(-1.0, BetaVector::new(0.0, 0.3, 0.6)).unwrap();
        let h = xs[1] - xs[0];
        for (i, &x) in out.xs.iter().enumerate() {
            let d2 = (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h);
            let expected = -0.5 * d2 + p.eval(x) * g(x);
            assert!((out.get(i, 0).re - expected).abs() < 1e-12);
            assert!(out.get(i, 0).im.abs() < 1e-12);
        }
    }

    #[test]
    fn grid_checks() {
        assert!(Grid2::new(vec![0.0, 1.0], vec![0.0], vec![Complex64::new(0.0, 0.0)]).is_err());
        let f = Grid2::from_fn(vec![0.0, 1.0, 3.0], vec![0.0, 1.0, 2.0], |_, _| Complex64::new(1.0, 0.0));
        let spec = EMFieldSpec { alpha: 0.0, beta2: 0.0, beta3: 1.0 };
        assert!(matches!(reducible_hamiltonian_apply(&spec, &f), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn single_mode_is_phase_times_profile() {
        let xs = linspace(-4.0, 4.0, 41);
        let ys = linspace(-2.0, 2.0, 9);
        let s = synthesize_psi(&SynthesisSpec::single(ModeFamily::N1Even, 0.1, -0.7, xs.clone(), ys.clone())).unwrap();
        let mode = ModeFamily::N1Even.mode(-0.7, 0.1).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let expected = Complex64::from_polar(1.0, -0.7 * y) * mode.eval_psi(x);
                assert_eq!(s.grid.get(i, j), expected);
            }
        }
    }

    #[test]
    fn family_and_level_set() {
        let xs = linspace(-5.0, 5.0, 51);
        let ys = linspace(-3.0, 3.0, 13);
        let spec = SynthesisSpec::trapezoid(ModeFamily::N1Even, 0.1, (-0.9, -0.5), 11, xs, ys).unwrap();
        let s = synthesize_psi(&spec).unwrap();
        assert_eq!(s.modes.len(), 11);
        assert!(s.modes.iter().all(|m| m.max_residual <= 1e-8));
        assert!(s.energy_spread > 0.0);

        let real = synthesize_psi(&spec.clone().with_sampling(Sampling::ConjugatePair)).unwrap();
        assert!(real.grid.values.iter().all(|v| v.im.abs() <= 1e-12));

        let e5 = s.modes[5].energy;
        let narrow = synthesize_psi(&spec.with_level_set(LevelSet { target: e5, eps: 1e-12 })).unwrap();
        assert_eq!(narrow.modes.len(), 1);
    }

    #[test]
    fn invalid_mode_names_beta1() {
        let spec = SynthesisSpec::single(ModeFamily::N1Even, 0.1, 0.0, vec![0.5], vec![0.0]);
        assert!(matches!(synthesize_psi(&spec), Err(Error::InvalidMode { beta1, .. }) if beta1 == 0.0));
    }
}
