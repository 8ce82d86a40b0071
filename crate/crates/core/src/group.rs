//! The quartic group as a value algebra.
//!
//! An element `(a, b1, b2, b3)` is realized by the upper-triangular matrix
//!
//! ```text
//! [ 1  a  a²/2  b3 ]
//! [ 0  1  a     b2 ]
//! [ 0  0  1     b1 ]
//! [ 0  0  0     1  ]
//! ```
//!
//! and the group law is the matrix product read back into coordinates.

use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: 0.0, b1: 0.0, b2: 0.0, b3: 0.0 };

    pub fn new(a: f64, b1: f64, b2: f64, b3: f64) -> Self {
        Self { a, b1, b2, b3 }
    }

    /// Group product `self · other`.
    ///
    /// The `b3` slot picks up `a·b2' + (a²/2)·b1'` from the matrix product.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let a = self.a;
        GroupElement {
            a: a + other.a,
            b1: self.b1 + other.b1,
            b2: self.b2 + other.b2 + a * other.b1,
            b3: self.b3 + other.b3 + a * other.b2 + 0.5 * a * a * other.b1,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        let a = self.a;
        GroupElement {
            a: -a,
            b1: -self.b1,
            b2: -self.b2 + a * self.b1,
            b3: -self.b3 + a * self.b2 - 0.5 * a * a * self.b1,
        }
    }

    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let a = self.a;
        [
            [1.0, a, 0.5 * a * a, self.b3],
            [0.0, 1.0, a, self.b2],
            [0.0, 0.0, 1.0, self.b1],
            [0.0, 0.0, 0.0, 1.0],
        ]
    }

    /// Reads coordinates back from a matrix of the quartic shape. Entries
    /// outside the `a`, `b` slots are not checked.
    pub fn from_matrix(m: &[[f64; 4]; 4]) -> GroupElement {
        GroupElement { a: m[0][1], b1: m[2][3], b2: m[1][3], b3: m[0][3] }
    }

    pub fn max_abs_diff(&self, other: &GroupElement) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b1 - other.b1).abs())
            .max((self.b2 - other.b2).abs())
            .max((self.b3 - other.b3).abs())
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.compose(&rhs)
    }
}

/// Heisenberg element `(a, b1, b2)` placed in the `b1 = 0` subgroup as
/// `(a, 0, b1, b2)`.
pub fn embed_heisenberg(a: f64, b1h: f64, b2h: f64) -> GroupElement {
    GroupElement { a, b1: 0.0, b2: b1h, b3: b2h }
}

/// Heisenberg group law `(a, b1, b2)(a', b1', b2') = (a + a', b1 + b1', b2 + b2' + a b1')`.
pub fn heisenberg_compose(g: (f64, f64, f64), h: (f64, f64, f64)) -> (f64, f64, f64) {
    (g.0 + h.0, g.1 + h.1, g.2 + h.2 + g.0 * h.1)
}

/// Irreducible representation labels.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BetaVector {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

impl BetaVector {
    pub fn new(beta1: f64, beta2: f64, beta3: f64) -> Self {
        Self { beta1, beta2, beta3 }
    }

    /// Value `c = 2 β1 β3 − β2²` of the Casimir `C = 2 X1 X3 − X2²`.
    pub fn casimir_c(&self) -> f64 {
        2.0 * self.beta1 * self.beta3 - self.beta2 * self.beta2
    }

    /// Labels of the equivalent representation obtained by conjugating with
    /// the translation `(a, 0, 0, 0)`.
    pub fn translate(&self, a: f64) -> BetaVector {
        BetaVector {
            beta1: self.beta1 + a * self.beta2 + 0.5 * a * a * self.beta3,
            beta2: self.beta2 + a * self.beta3,
            beta3: self.beta3,
        }
    }

    /// `β_t = (t β1, t² β2, t³ β3)`.
    pub fn scale(&self, t: f64) -> Result<BetaVector> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveScale(t));
        }
        Ok(BetaVector { beta1: t * self.beta1, beta2: t * t * self.beta2, beta3: t * t * t * self.beta3 })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.beta1, self.beta2, self.beta3]
    }
}

/// Automorphism of the quartic Lie algebra, `α(X_i) = Σ_j g_ij X_j`.
///
/// Only the seven free entries are stored; rows 2 and 3 are fixed by
/// `g00` and `g11`, `g12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutomorphismMatrix {
    pub g00: f64,
    pub g01: f64,
    pub g02: f64,
    pub g03: f64,
    pub g11: f64,
    pub g12: f64,
    pub g13: f64,
}

impl AutomorphismMatrix {
    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let g00 = self.g00;
        [
            [g00, self.g01, self.g02, self.g03],
            [0.0, self.g11, self.g12, self.g13],
            [0.0, 0.0, g00 * self.g11, g00 * self.g12],
            [0.0, 0.0, 0.0, g00 * g00 * self.g11],
        ]
    }

    /// Extracts the free entries if `m` has the automorphism shape to within `tol`.
    pub fn from_matrix(m: &[[f64; 4]; 4], tol: f64) -> Result<Self> {
        let candidate = AutomorphismMatrix {
            g00: m[0][0],
            g01: m[0][1],
            g02: m[0][2],
            g03: m[0][3],
            g11: m[1][1],
            g12: m[1][2],
            g13: m[1][3],
        };
        let shaped = candidate.to_matrix();
        let dev = m
            .iter()
            .flatten()
            .zip(shaped.iter().flatten())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        if dev > tol {
            return Err(Error::InvalidArgument(format!(
                "matrix deviates from the automorphism shape by {dev:e}"
            )));
        }
        Ok(candidate)
    }

    pub fn structure_defect(&self) -> f64 {
        structure_defect(&self.to_matrix())
    }
}

/// Structure constants `f[i][j][k]` with `[X_i, X_j] = i Σ_k f_ijk X_k`.
fn structure_constants() -> [[[f64; 4]; 4]; 4] {
    let mut f = [[[0.0; 4]; 4]; 4];
    f[0][1][2] = 1.0;
    f[1][0][2] = -1.0;
    f[0][2][3] = 1.0;
    f[2][0][3] = -1.0;
    f
}

/// Largest violation of `[α(X_i), α(X_j)] = i α(Σ_k f_ijk X_k)` for the linear
/// map `α(X_i) = Σ_j g_ij X_j`. Zero exactly when `g` is a Lie algebra
/// automorphism (up to invertibility).
pub fn structure_defect(g: &[[f64; 4]; 4]) -> f64 {
    let f = structure_constants();
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let mut lhs = 0.0;
                for p in 0..4 {
                    for q in 0..4 {
                        lhs += g[i][p] * g[j][q] * f[p][q][k];
                    }
                }
                let rhs: f64 = (0..4).map(|l| f[i][j][l] * g[l][k]).sum();
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    worst
}
