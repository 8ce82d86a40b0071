//! Closed-form solutions for `N = 1, 2` and the scaling forms `E = β3^{2/3} e(ξ)`
//! with `ξ = c³/β3⁴`.

use serde::{Deserialize, Serialize};

use super::Parity;
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Sign in front of the square root in the `N = 2` even energy
/// `E = (β1³ − 3β3 ± R)/(5β1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum N2Branch {
    Plus,
    Minus,
}

impl N2Branch {
    fn sign(self) -> f64 {
        match self {
            N2Branch::Plus => 1.0,
            N2Branch::Minus => -1.0,
        }
    }
}

/// `N = 1` solution `(E, β2)`.
///
/// Even parity needs `β1 ≠ 0` and gives `E = β1²/2 − β3/(4β1)`,
/// `β2 = β1² + β3/(2β1)`. Odd parity forces `β1 = 0`; `β2` is then a free
/// input and `E = β2/2`.
pub fn closed_form_n1(parity: Parity, beta1: f64, beta3: f64, beta2: Option<f64>) -> Result<(f64, f64)> {
    check_beta3(beta3)?;
    match parity {
        Parity::Even => {
            if beta1 == 0.0 {
                return Err(Error::InvalidArgument("N = 1 even solution has a pole at beta1 = 0".into()));
            }
            Ok((0.5 * beta1 * beta1 - beta3 / (4.0 * beta1), beta1 * beta1 + beta3 / (2.0 * beta1)))
        }
        Parity::Odd => {
            if beta1 != 0.0 {
                return Err(Error::NoRealSolution(format!(
                    "N = 1 odd solutions need beta1 = 0, got {beta1}"
                )));
            }
            let beta2 = beta2.ok_or(Error::FreeBeta2)?;
            Ok((0.5 * beta2, beta2))
        }
    }
}

/// `N = 2` solution `(E, β2)`. The branch only matters for even parity.
///
/// The even `β2` comes from the continuity identity
/// [`n2_even_beta2_from_energy`] rather than a separate radical expression.
pub fn closed_form_n2(parity: Parity, beta1: f64, beta3: f64, branch: N2Branch) -> Result<(f64, f64)> {
    check_beta3(beta3)?;
    if beta1 == 0.0 {
        return Err(Error::InvalidArgument("N = 2 closed forms need beta1 != 0".into()));
    }
    match parity {
        Parity::Odd => Ok((2.0 * beta1 * beta1, (4.0 * beta1.powi(3) + beta3) / (2.0 * beta1))),
        Parity::Even => {
            let b13 = beta1.powi(3);
            let radicand = b13 * b13 - 6.0 * b13 * beta3 + 4.0 * beta3 * beta3;
            if radicand < 0.0 {
                return Err(Error::NoRealSolution(format!(
                    "beta1^6 - 6 beta1^3 beta3 + 4 beta3^2 = {radicand:e} < 0"
                )));
            }
            let energy = (b13 - 3.0 * beta3 + branch.sign() * radicand.sqrt()) / (5.0 * beta1);
            let beta2 = n2_even_beta2_from_energy(energy, beta1, beta3)?;
            Ok((energy, beta2))
        }
    }
}

/// `β2 = (E²β1 + β1²β3 + Eβ3)/(Eβ1 + β3)`, the even continuity condition for
/// `N = 2` solved for `β2` once `E` satisfies the cubic.
pub fn n2_even_beta2_from_energy(energy: f64, beta1: f64, beta3: f64) -> Result<f64> {
    let den = energy * beta1 + beta3;
    if den.abs() <= 1e-14 * (energy * beta1).abs().max(beta3.abs()) {
        return Err(Error::Degenerate(format!("E beta1 + beta3 = {den:e}")));
    }
    Ok((energy * energy * beta1 + beta1 * beta1 * beta3 + energy * beta3) / den)
}

/// `β3` at which the even and odd `N = 2` solutions share `β2`:
/// `(4/7)(2 + 3√2)β1³` for `β1 > 0` and `(4/7)(2 − 3√2)β1³` for `β1 < 0`.
pub fn simultaneous_n2_beta3(beta1: f64) -> Result<f64> {
    if beta1 == 0.0 || !beta1.is_finite() {
        return Err(Error::InvalidArgument(format!("beta1 must be finite and nonzero, got {beta1}")));
    }
    let root = 3.0 * std::f64::consts::SQRT_2;
    let sign = if beta1 > 0.0 { 1.0 } else { -1.0 };
    Ok(4.0 / 7.0 * (2.0 + sign * root) * beta1.powi(3))
}

/// Both `N = 1` energies from `e(ξ) = ±½(−ξ)^{1/6}`, `E = β3^{2/3} e(ξ)`, ascending.
pub fn n1_scaling_energy(c: f64, beta3: f64) -> Result<[f64; 2]> {
    check_beta3(beta3)?;
    let xi = c.powi(3) / beta3.powi(4);
    if xi > 0.0 {
        return Err(Error::NoRealSolution(format!("xi = {xi:e} > 0 gives complex N = 1 energies")));
    }
    let e = 0.5 * (-xi).powf(1.0 / 6.0);
    let scale = beta3.powf(2.0 / 3.0);
    Ok([-scale * e, scale * e])
}

/// Real `N = 2` energies `E = β3^{2/3} e` where `e` runs over the real roots of
/// `e³ + ξ^{1/3} e + ½ = 0`. Ascending.
pub fn n2_scaling_energies(c: f64, beta3: f64) -> Result<Vec<f64>> {
    check_beta3(beta3)?;
    let xi = c.powi(3) / beta3.powi(4);
    let reduced = Poly::new(vec![0.5, xi.cbrt(), 0.0, 1.0]);
    let scale = beta3.powf(2.0 / 3.0);
    Ok(reduced.real_roots().roots.into_iter().map(|e| scale * e).collect())
}

fn check_beta3(beta3: f64) -> Result<()> {
    if beta3 > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveBeta3(beta3))
    }
}
