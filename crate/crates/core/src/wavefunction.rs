//! Closed-form eigenfunctions `Ψ(x) = sign(x)^P p(β2 + β3|x|) e^{−S(|x|)}`
//! with `S(x) = β1 x + β2 x²/2 + β3 x³/6` and `p(u) = Σ a_n uⁿ`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::BetaVector;
use crate::potential::PotentialParams;
use crate::qes::{Parity, QesSolution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionSpec {
    pub solution: QesSolution,
    pub beta: BetaVector,
    /// Overall factor applied to every evaluation.
    pub normalization: f64,
}

/// `Ψ`, `Ψ'`, `Ψ''` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub psi: f64,
    pub d1: f64,
    pub d2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeReport {
    pub count: usize,
    pub positions: Vec<f64>,
    /// Interior minima of `|Ψ|` that come near zero without a sign change.
    pub tangential: Vec<f64>,
}

impl WavefunctionSpec {
    pub fn new(solution: QesSolution) -> Self {
        let beta = solution.beta();
        Self { solution, beta, normalization: 1.0 }
    }

    pub fn energy(&self) -> f64 {
        self.solution.energy
    }

    pub fn parity(&self) -> Parity {
        self.solution.parity
    }

    pub fn potential(&self) -> PotentialParams {
        self.solution.potential()
    }

    fn parity_sign(&self, x: f64) -> f64 {
        match self.solution.parity {
            Parity::Even => 1.0,
            Parity::Odd => {
                if x < 0.0 {
                    -1.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Value and derivatives of the right-half-line solution at `r ≥ 0`
    /// (without the normalization factor).
    fn half_line(&self, r: f64) -> Derivatives {
        let BetaVector { beta1, beta2, beta3 } = self.beta;
        let u = beta2 + beta3 * r;
        // p(u), p'(u), p''(u) by Horner
        let (mut p, mut dp, mut d2p) = (0.0, 0.0, 0.0);
        for &a in self.solution.coeffs.iter().rev() {
            d2p = d2p * u + 2.0 * dp;
            dp = dp * u + p;
            p = p * u + a;
        }
        let p1 = beta3 * dp;
        let p2 = beta3 * beta3 * d2p;
        let s = r * (beta1 + r * (0.5 * beta2 + r * beta3 / 6.0));
        let s1 = beta1 + r * (beta2 + 0.5 * beta3 * r);
        let s2 = u;
        let e = (-s).exp();
        Derivatives {
            psi: p * e,
            d1: (p1 - p * s1) * e,
            d2: (p2 - 2.0 * p1 * s1 - p * s2 + p * s1 * s1) * e,
        }
    }

    pub fn eval_psi(&self, x: f64) -> f64 {
        if x == 0.0 && self.solution.parity == Parity::Odd {
            return 0.0;
        }
        self.normalization * self.parity_sign(x) * self.half_line(x.abs()).psi
    }

    /// Analytic derivatives; at `x = 0` the right-hand limits are returned.
    pub fn derivatives(&self, x: f64) -> Derivatives {
        let h = self.half_line(x.abs());
        let s = self.parity_sign(x);
        let k = self.normalization;
        let mirror = if x < 0.0 { -1.0 } else { 1.0 };
        let psi = if x == 0.0 && self.solution.parity == Parity::Odd { 0.0 } else { k * s * h.psi };
        Derivatives { psi, d1: k * s * mirror * h.d1, d2: k * s * h.d2 }
    }

    /// `|−Ψ'' + 2VΨ − 2EΨ|` at `x ≠ 0`.
    pub fn schrodinger_residual(&self, x: f64) -> f64 {
        let d = self.derivatives(x);
        let v = self.potential().eval(x);
        (-d.d2 + 2.0 * v * d.psi - 2.0 * self.energy() * d.psi).abs()
    }

    /// Residual divided by `|Ψ''| + |2VΨ| + |2EΨ|`, the size of the terms that cancel.
    pub fn relative_residual(&self, x: f64) -> f64 {
        let d = self.derivatives(x);
        let v = self.potential().eval(x);
        let e = self.energy();
        let scale = d.d2.abs() + (2.0 * v * d.psi).abs() + (2.0 * e * d.psi).abs();
        let r = (-d.d2 + 2.0 * v * d.psi - 2.0 * e * d.psi).abs();
        if scale > 0.0 {
            r / scale
        } else {
            r
        }
    }

    /// Sign changes of `Ψ` on `(−range, range)` from `samples` midpoint samples,
    /// each bracket refined by one bisection step.
    pub fn count_nodes(&self, range: f64, samples: usize) -> Result<NodeReport> {
        if samples < 1000 {
            return Err(Error::InvalidArgument(format!("need at least 1000 samples, got {samples}")));
        }
        if !(range > 0.0) {
            return Err(Error::InvalidArgument(format!("range must be positive, got {range}")));
        }
        let h = 2.0 * range / samples as f64;
        let xs: Vec<f64> = (0..samples).map(|i| -range + (i as f64 + 0.5) * h).collect();
        let vs: Vec<f64> = xs.iter().map(|&x| self.eval_psi(x)).collect();
        let peak = vs.iter().fold(0.0f64, |m, v| m.max(v.abs()));

        let mut positions = Vec::new();
        let mut last: Option<(f64, f64)> = None;
        for (&x, &v) in xs.iter().zip(&vs) {
            if v == 0.0 {
                continue;
            }
            if let Some((xl, vl)) = last {
                if vl * v < 0.0 {
                    let mid = 0.5 * (xl + x);
                    let vm = self.eval_psi(mid);
                    let pos = if vm == 0.0 {
                        mid
                    } else if vm * vl < 0.0 {
                        0.5 * (xl + mid)
                    } else {
                        0.5 * (mid + x)
                    };
                    positions.push(pos);
                }
            }
            last = Some((x, v));
        }

        let mut tangential = Vec::new();
        for i in 1..samples - 1 {
            let (a, b, c) = (vs[i - 1], vs[i], vs[i + 1]);
            let is_min = b.abs() < a.abs() && b.abs() <= c.abs();
            if is_min && b.abs() <= 1e-6 * peak && a * c > 0.0 && a * b >= 0.0 {
                tangential.push(xs[i]);
            }
        }
        Ok(NodeReport { count: positions.len(), positions, tangential })
    }

    /// `κ` with `∫_{−π/2}^{π/2} (κΨ(tan y))² dy = 1` by composite Simpson;
    /// the factor is folded into `normalization`.
    pub fn normalize_arctan(&mut self, grid_points: usize) -> Result<f64> {
        let integral = self.arctan_norm_squared(grid_points)?;
        if !(integral > 0.0) || !integral.is_finite() {
            return Err(Error::NotNormalizable);
        }
        let kappa = 1.0 / integral.sqrt();
        self.normalization *= kappa;
        Ok(kappa)
    }

    /// `∫ Ψ(tan y)² dy` over `(−π/2, π/2)`.
    pub fn arctan_norm_squared(&self, grid_points: usize) -> Result<f64> {
        if grid_points < 100 {
            return Err(Error::InvalidArgument(format!("need at least 100 grid points, got {grid_points}")));
        }
        Ok(simpson(-FRAC_PI_2, FRAC_PI_2, grid_points, |y| {
            if y.abs() >= FRAC_PI_2 {
                0.0
            } else {
                self.eval_psi(y.tan()).powi(2)
            }
        }))
    }
}

/// Composite Simpson rule on `points` nodes (rounded up to an odd count).
pub fn simpson(a: f64, b: f64, points: usize, f: impl Fn(f64) -> f64) -> f64 {
    let n = if points.is_multiple_of(2) { points + 1 } else { points.max(3) };
    let intervals = n - 1;
    let h = (b - a) / intervals as f64;
    let mut sum = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qes::closed_form_n1;

    fn n0(beta1: f64, beta2: f64, beta3: f64) -> WavefunctionSpec {
        WavefunctionSpec::new(QesSolution {
            n: 0,
            parity: Parity::Even,
            energy: 0.0,
            beta1,
            beta2,
            beta3,
            coeffs: vec![1.0],
            casimir: 2.0 * beta1 * beta3 - beta2 * beta2,
        })
    }

    fn n1(parity: Parity, beta1: f64, beta3: f64, beta2: Option<f64>) -> WavefunctionSpec {
        let (e, b2) = closed_form_n1(parity, beta1, beta3, beta2).unwrap();
        WavefunctionSpec::new(QesSolution::assemble(1, parity, e, BetaVector::new(beta1, b2, beta3)).unwrap())
    }

    #[test]
    fn n0_form_and_residual() {
        let w = n0(0.0, 0.3, 0.6);
        let x: f64 = 1.3;
        let expected = (-(0.5 * 0.3 * x * x + 0.1 * x.powi(3))).exp();
        assert!((w.eval_psi(x) - expected).abs() < 1e-15);
        assert_eq!(w.eval_psi(-x), w.eval_psi(x));
        for x in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0] {
            assert!(w.schrodinger_residual(x) < 1e-14, "{x}");
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let w = n1(Parity::Even, -0.7, 0.1, None);
        for x in [-1.7, -0.4, 0.3, 2.2] {
            let d = w.derivatives(x);
            let h = 1e-5;
            let fd1 = (w.eval_psi(x + h) - w.eval_psi(x - h)) / (2.0 * h);
            let fd2 = (w.eval_psi(x + h) - 2.0 * w.eval_psi(x) + w.eval_psi(x - h)) / (h * h);
            assert!((d.d1 - fd1).abs() < 1e-8, "{x}");
            assert!((d.d2 - fd2).abs() < 1e-4, "{x}");
        }
    }

    #[test]
    fn n1_residuals_and_sensitivity() {
        let w = n1(Parity::Even, -0.7, 0.1, None);
        for i in 0..100 {
            let x = -5.0 + 10.0 * (i as f64 + 0.5) / 100.0;
            assert!(w.schrodinger_residual(x) <= 1e-10 * (w.eval_psi(x).abs() * w.energy().abs()).max(1.0));
        }
        let mut bumped = w.clone();
        bumped.solution.energy += 1e-3;
        let x = 0.8;
        let ratio = bumped.schrodinger_residual(x) / w.eval_psi(x).abs();
        assert!((ratio - 2e-3).abs() < 1e-9);
    }

    #[test]
    fn parity_and_origin() {
        let odd = n1(Parity::Odd, 0.0, 0.6, Some(0.3));
        assert_eq!(odd.eval_psi(0.0), 0.0);
        let even = WavefunctionSpec { solution: QesSolution { parity: Parity::Even, ..odd.solution.clone() }, ..odd.clone() };
        for x in [0.2, 1.0, 3.5] {
            assert_eq!(odd.eval_psi(-x), -odd.eval_psi(x));
            assert_eq!(odd.eval_psi(-x), -even.eval_psi(-x));
        }
        // even continuity gives a smooth top at the origin
        let w = n1(Parity::Even, 0.7, 0.1, None);
        let h = 1e-6;
        assert!(((w.eval_psi(h) - w.eval_psi(-h)) / (2.0 * h)).abs() < 1e-12);
        assert!(w.derivatives(1e-300).d1.abs() < 1e-12);
    }

    #[test]
    fn node_counts() {
        assert_eq!(n0(0.0, 0.3, 0.6).count_nodes(8.0, 4000).unwrap().count, 0);
        assert_eq!(n1(Parity::Odd, 0.0, 0.6, Some(0.3)).count_nodes(8.0, 4000).unwrap().count, 1);
        let dw = n1(Parity::Even, -0.7, 0.1, None).count_nodes(10.0, 4000).unwrap();
        assert_eq!(dw.count, 2);
        assert!((dw.positions[0] + dw.positions[1]).abs() < 1e-2);
        assert_eq!(n1(Parity::Even, 0.7, 0.1, None).count_nodes(10.0, 4000).unwrap().count, 0);
        assert!(n0(0.0, 0.3, 0.6).count_nodes(8.0, 10).is_err());
    }

    #[test]
    fn arctan_normalization() {
        let mut w = n0(0.0, 0.3, 0.6);
        let k1 = w.normalize_arctan(10_001).unwrap();
        assert!((w.arctan_norm_squared(10_001).unwrap() - 1.0).abs() < 1e-12);
        let mut doubled = n0(0.0, 0.3, 0.6);
        doubled.solution.coeffs[0] = 2.0;
        let k2 = doubled.normalize_arctan(10_001).unwrap();
        assert!((k2 - 0.5 * k1).abs() < 1e-14);

        let coarse = n0(0.0, 0.3, 0.6).arctan_norm_squared(1001).unwrap();
        let fine = n0(0.0, 0.3, 0.6).arctan_norm_squared(10_001).unwrap();
        assert!((coarse - fine).abs() < 1e-8);

        let mut zero = n0(0.0, 0.3, 0.6);
        zero.solution.coeffs[0] = 0.0;
        assert!(matches!(zero.normalize_arctan(1000), Err(Error::NotNormalizable)));
        assert!(n0(0.0, 0.3, 0.6).arctan_norm_squared(50).is_err());
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(0.0, 2.0, 11, |x| x * x * x - x);
        assert!((v - 2.0).abs() < 1e-14);
    }
}
