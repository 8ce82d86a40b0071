//! The `c = 0` branch: `β3 = β2²/(2β1)` collapses the recursion to three terms
//! and admits `E = 0` solutions.

use super::{continuity_terms, Parity, QesSolution};
use crate::error::{Error, Result};
use crate::group::BetaVector;

/// Ratio interval `(0, 20]` and sample count used to bracket roots in `β2/β1²`.
pub const CZERO_RATIO_SCAN: (f64, f64, usize) = (0.0, 20.0, 20_000);

/// `E = 0` coefficients from `a_{n−3} = −[n(n−1)/(N−n+3)] β3² a_n`, `a_N = 1`.
/// Only indices `≡ N (mod 3)` are nonzero.
pub fn czero_coefficients(n: usize, beta3: f64) -> Result<Vec<f64>> {
    if n % 3 == 2 {
        return Err(Error::NoZeroEnergySolution(n));
    }
    let mut a = vec![0.0; n + 1];
    a[n] = 1.0;
    let b32 = beta3 * beta3;
    let mut k = n;
    while k >= 3 {
        let kf = k as f64;
        a[k - 3] = -kf * (kf - 1.0) / ((n + 3 - k) as f64) * b32 * a[k];
        k -= 3;
    }
    Ok(a)
}

/// Continuity residual on the `c = 0` branch as a function of `r = β2/β1²`,
/// divided by the sum of the absolute values of its terms.
pub fn czero_continuity(n: usize, beta1: f64, parity: Parity, ratio: f64) -> Result<f64> {
    let beta = czero_beta(beta1, ratio);
    let a = czero_coefficients(n, beta.beta3)?;
    let (r, scale) = continuity_terms(&a, &beta, parity);
    Ok(if scale > 0.0 { r / scale } else { r })
}

fn czero_beta(beta1: f64, ratio: f64) -> BetaVector {
    let beta2 = ratio * beta1 * beta1;
    BetaVector::new(beta1, beta2, beta2 * beta2 / (2.0 * beta1))
}

/// All `E = 0` solutions with `β2/β1² ∈ (0, 20]`, ascending in `β2`.
pub fn czero_solutions(n: usize, beta1: f64, parity: Parity) -> Result<Vec<QesSolution>> {
    if !(beta1 > 0.0) || !beta1.is_finite() {
        return Err(Error::InvalidArgument(format!("c = 0 branch needs beta1 > 0, got {beta1}")));
    }
    if n % 3 == 2 {
        return Err(Error::NoZeroEnergySolution(n));
    }
    let (lo, hi, samples) = CZERO_RATIO_SCAN;
    let step = (hi - lo) / samples as f64;
    let f = |r: f64| czero_continuity(n, beta1, parity, r);

    let mut ratios = Vec::new();
    let mut r_prev = lo + step;
    let mut f_prev = f(r_prev)?;
    if f_prev == 0.0 {
        ratios.push(r_prev);
    }
    for i in 2..=samples {
        let r = lo + i as f64 * step;
        let fr = f(r)?;
        if fr == 0.0 {
            ratios.push(r);
        } else if f_prev * fr < 0.0 {
            ratios.push(bisect(&f, r_prev, r, f_prev)?);
        }
        r_prev = r;
        f_prev = fr;
    }

    ratios
        .into_iter()
        .map(|r| {
            let beta = czero_beta(beta1, r);
            let coeffs = czero_coefficients(n, beta.beta3)?;
            Ok(QesSolution {
                n,
                parity,
                energy: 0.0,
                beta1,
                beta2: beta.beta2,
                beta3: beta.beta3,
                coeffs,
                casimir: beta.casimir_c(),
            })
        })
        .collect()
}

fn bisect(f: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if f_lo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = fm;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratios(n: usize, parity: Parity) -> Vec<f64> {
        czero_solutions(n, 0.5, parity).unwrap().iter().map(|s| s.beta2 / 0.25).collect()
    }

    #[test]
    fn low_rows() {
        let r = ratios(1, Parity::Even);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.0).abs() < 1e-10);
        let r = ratios(3, Parity::Even);
        assert!(r.len() == 1 && (r[0] - 0.5).abs() < 1e-10);
        let r = ratios(3, Parity::Odd);
        assert!(r.len() == 1 && (r[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn coefficients_follow_three_term_recursion() {
        let b3: f64 = 0.3;
        let a = czero_coefficients(6, b3).unwrap();
        assert_eq!(a[6], 1.0);
        assert!((a[3] + 30.0 / 3.0 * b3 * b3).abs() < 1e-15);
        assert!((a[0] + 6.0 / 6.0 * b3 * b3 * a[3]).abs() < 1e-15);
        assert!(a[1] == 0.0 && a[2] == 0.0 && a[4] == 0.0 && a[5] == 0.0);
        assert!(matches!(czero_coefficients(5, b3), Err(Error::NoZeroEnergySolution(5))));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(czero_solutions(2, 0.5, Parity::Even).is_err());
        assert!(czero_solutions(1, 0.0, Parity::Even).is_err());
        assert!(czero_solutions(1, -1.0, Parity::Odd).is_err());
    }
}
