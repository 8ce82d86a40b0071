//! The parity-symmetric quartic potential
//! `V(x) = ½[(β1 + β2|x| + β3 x²/2)² + α(β2 + β3|x|)]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::BetaVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub alpha: f64,
    pub beta: BetaVector,
}

impl PotentialParams {
    pub fn new(alpha: f64, beta: BetaVector) -> Result<Self> {
        if !(beta.beta3 > 0.0) {
            return Err(Error::NonPositiveBeta3(beta.beta3));
        }
        Ok(Self { alpha, beta })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let BetaVector { beta1, beta2, beta3 } = self.beta;
        let ax = x.abs();
        let x1 = beta1 + beta2 * ax + 0.5 * beta3 * x * x;
        0.5 * (x1 * x1 + self.alpha * (beta2 + beta3 * ax))
    }

    pub fn to_monomial(&self) -> MonomialForm {
        let BetaVector { beta1, beta2, beta3 } = self.beta;
        MonomialForm {
            v0: 0.5 * (beta1 * beta1 + self.alpha * beta2),
            a: beta1 * beta2 + 0.5 * self.alpha * beta3,
            b: 0.5 * (beta2 * beta2 + beta1 * beta3),
            c: 0.5 * beta2 * beta3,
            d: beta3 * beta3 / 8.0,
        }
    }

    /// `dV/dx` as `x → 0⁺`; the `0⁻` slope is its negation.
    pub fn slope_at_zero_plus(&self) -> f64 {
        self.beta.beta1 * self.beta.beta2 + 0.5 * self.alpha * self.beta.beta3
    }

    /// Counts strict local minima of `V` on `[-scan_range, scan_range]`.
    pub fn classify_well(&self, scan_range: f64) -> Result<WellReport> {
        if !(scan_range > 0.0) {
            return Err(Error::InvalidArgument(format!("scan range must be positive, got {scan_range}")));
        }
        const POINTS: usize = 10_001;
        let h = 2.0 * scan_range / (POINTS - 1) as f64;
        let mid = (POINTS / 2) as f64;
        let xs: Vec<f64> = (0..POINTS).map(|i| (i as f64 - mid) * h).collect();
        let vs: Vec<f64> = xs.iter().map(|&x| self.eval(x)).collect();

        let mut minima = Vec::new();
        let mut plateau = false;
        for i in 1..POINTS - 1 {
            if vs[i] == vs[i - 1] || vs[i] == vs[i + 1] {
                plateau = true;
                continue;
            }
            if vs[i] < vs[i - 1] && vs[i] < vs[i + 1] {
                // the kink at the origin is sampled exactly
                let x = if xs[i] == 0.0 { 0.0 } else { self.refine_minimum(xs[i - 1], xs[i + 1]) };
                minima.push(x);
            }
        }
        let class = if plateau {
            WellClass::MultiWell
        } else {
            match minima.len() {
                0 | 1 => WellClass::SingleWell,
                2 => WellClass::DoubleWell,
                _ => WellClass::MultiWell,
            }
        };
        Ok(WellReport { class, minima, plateau })
    }

    /// Golden-section search on a bracket that contains one minimum.
    fn refine_minimum(&self, mut lo: f64, mut hi: f64) -> f64 {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if self.eval(m1) < self.eval(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Coefficients of `V(x) = V0 + A|x| + B x² + C|x|³ + D x⁴`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonomialForm {
    pub v0: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MonomialForm {
    pub fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.v0 + ax * (self.a + ax * (self.b + ax * (self.c + ax * self.d)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WellClass {
    SingleWell,
    DoubleWell,
    MultiWell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellReport {
    pub class: WellClass,
    /// Locations of the strict local minima found.
    pub minima: Vec<f64>,
    /// Set when equal neighbouring samples were seen (flat plateau).
    pub plateau: bool,
}
