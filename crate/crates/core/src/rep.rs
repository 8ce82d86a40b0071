//! Generators of the quartic Lie algebra and the unitary irreducible
//! representation.
//!
//! The generators act on polynomials `f(x) = Σ c_k x^k` by
//!
//! ```text
//! X0 f = i f'
//! X1 f = (β1 + β2 x + β3 x²/2) f
//! X2 f = (β2 + β3 x) f
//! X3 f = β3 f
//! ```
//!
//! Commutator and scaling checks run in exact rational arithmetic: the `f64`
//! labels are converted exactly, so a zero defect is a true zero.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{BetaVector, GroupElement};

/// Scalar field for polynomial coefficients (real part of a complex number).
pub trait Field: Clone + Num + Neg<Output = Self> + Debug {}

impl<T: Clone + Num + Neg<Output = T> + Debug> Field for T {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeneratorId {
    X0,
    X1,
    X2,
    X3,
}

impl GeneratorId {
    pub const ALL: [GeneratorId; 4] = [GeneratorId::X0, GeneratorId::X1, GeneratorId::X2, GeneratorId::X3];

    /// Scaling weight `w` in `S_t X S_t⁻¹ = t^{-w} X(β_t)`.
    pub fn scaling_weight(self) -> i32 {
        match self {
            GeneratorId::X0 | GeneratorId::X1 => 1,
            GeneratorId::X2 => 2,
            GeneratorId::X3 => 3,
        }
    }
}

/// Polynomial with complex coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFunction<R: Field = f64> {
    coeffs: Vec<Complex<R>>,
}

impl<R: Field> PolyFunction<R> {
    pub fn new(coeffs: Vec<Complex<R>>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex::zero(); k + 1];
        coeffs[k] = Complex::one();
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex<R>] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn derivative(&self) -> Self {
        let mut k = R::zero();
        let coeffs = self
            .coeffs
            .iter()
            .skip(1)
            .map(|c| {
                k = k.clone() + R::one();
                c.clone() * k.clone()
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, s: &Complex<R>) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Product with the real polynomial `m[0] + m[1] x + ...`.
    pub fn mul_real(&self, m: &[R]) -> Self {
        if self.is_zero() || m.is_empty() {
            return Self::zero();
        }
        let mut out = vec![Complex::zero(); self.coeffs.len() + m.len() - 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            for (j, r) in m.iter().enumerate() {
                out[i + j] = out[i + j].clone() + c.clone() * r.clone();
            }
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).cloned().unwrap_or_else(Complex::zero);
                let b = other.coeffs.get(k).cloned().unwrap_or_else(Complex::zero);
                a - b
            })
            .collect();
        Self::new(coeffs)
    }

    /// `(D_s f)(x) = f(s x)`.
    pub fn dilate(&self, s: &R) -> Self {
        let mut power = R::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c.clone() * power.clone();
                power = power.clone() * s.clone();
                out
            })
            .collect();
        Self::new(coeffs)
    }
}

impl PolyFunction<f64> {
    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * x + c)
    }
}

/// Applies generator `id` with labels `beta = [β1, β2, β3]`.
pub fn apply_generator_with<R: Field>(id: GeneratorId, beta: &[R; 3], f: &PolyFunction<R>) -> PolyFunction<R> {
    let [b1, b2, b3] = beta.clone();
    match id {
        GeneratorId::X0 => f.derivative().scale(&Complex::i()),
        GeneratorId::X1 => {
            let half = R::one() / (R::one() + R::one());
            f.mul_real(&[b1, b2, b3 * half])
        }
        GeneratorId::X2 => f.mul_real(&[b2, b3]),
        GeneratorId::X3 => f.mul_real(&[b3]),
    }
}

pub fn apply_generator(id: GeneratorId, beta: &BetaVector, f: &PolyFunction<f64>) -> PolyFunction<f64> {
    apply_generator_with(id, &beta.as_array(), f)
}

fn exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("non-finite value {x}")))
}

fn exact_beta(beta: &BetaVector) -> Result<[BigRational; 3]> {
    Ok([exact(beta.beta1)?, exact(beta.beta2)?, exact(beta.beta3)?])
}

fn max_coeff_norm(p: &PolyFunction<BigRational>) -> f64 {
    p.coeffs()
        .iter()
        .map(|c| {
            let re = c.re.to_f64().unwrap_or(f64::INFINITY);
            let im = c.im.to_f64().unwrap_or(f64::INFINITY);
            re.hypot(im)
        })
        .fold(0.0, f64::max)
}

/// Expected value of `[X_a, X_b]` as `(sign, generator)` meaning `sign · i · X_gen`.
fn expected_commutator(a: GeneratorId, b: GeneratorId) -> Option<(i32, GeneratorId)> {
    use GeneratorId::*;
    match (a, b) {
        (X0, X1) => Some((1, X2)),
        (X1, X0) => Some((-1, X2)),
        (X0, X2) => Some((1, X3)),
        (X2, X0) => Some((-1, X3)),
        _ => None,
    }
}

/// Largest coefficient norm of `([X_a, X_b] − expected) x^k` over `k = 0..=degree`,
/// evaluated exactly.
pub fn commutator_defect(a: GeneratorId, b: GeneratorId, beta: &BetaVector, degree: usize) -> Result<f64> {
    let beta = exact_beta(beta)?;
    let mut worst: f64 = 0.0;
    for k in 0..=degree {
        let f = PolyFunction::<BigRational>::monomial(k);
        let ab = apply_generator_with(a, &beta, &apply_generator_with(b, &beta, &f));
        let ba = apply_generator_with(b, &beta, &apply_generator_with(a, &beta, &f));
        let mut defect = ab.sub(&ba);
        if let Some((sign, gen)) = expected_commutator(a, b) {
            let i = Complex::new(BigRational::zero(), BigRational::from_integer(BigInt::from(sign)));
            defect = defect.sub(&apply_generator_with(gen, &beta, &f).scale(&i));
        }
        worst = worst.max(max_coeff_norm(&defect));
    }
    Ok(worst)
}

/// Largest coefficient deviation of `S_t X(β) S_t⁻¹ − t^{-w} X(β_t)` on the
/// monomials `x^k`, `k = 0..=degree`, with `(S_t f)(x) = √t f(t x)`.
///
/// The `√t` prefactors of `S_t` and `S_t⁻¹` cancel, so the conjugation is
/// carried out with the pure dilation and stays exact.
pub fn scale_conjugate_defect(id: GeneratorId, beta: &BetaVector, t: f64, degree: usize) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveScale(t));
    }
    let tq = exact(t)?;
    let t_inv = BigRational::one() / tq.clone();
    let b = exact_beta(beta)?;
    let scaled = [b[0].clone() * tq.clone(), b[1].clone() * tq.clone() * tq.clone(), b[2].clone() * tq.clone() * tq.clone() * tq.clone()];
    let mut weight = BigRational::one();
    for _ in 0..id.scaling_weight() {
        weight *= t_inv.clone();
    }
    let weight = Complex::new(weight, BigRational::zero());

    let mut worst: f64 = 0.0;
    for k in 0..=degree {
        let f = PolyFunction::<BigRational>::monomial(k);
        let lhs = apply_generator_with(id, &b, &f.dilate(&t_inv)).dilate(&tq);
        let rhs = apply_generator_with(id, &scaled, &f).scale(&weight);
        worst = worst.max(max_coeff_norm(&lhs.sub(&rhs)));
    }
    Ok(worst)
}

/// `(U_g φ)(x) = exp(−i[β1 b1 + β2(b2 + b1 x) + β3(b3 + b2 x + b1 x²/2)]) φ(x + a)`.
pub fn irrep_apply<F>(g: &GroupElement, beta: &BetaVector, phi: F, x: f64) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let phase = beta.beta1 * g.b1
        + beta.beta2 * (g.b2 + g.b1 * x)
        + beta.beta3 * (g.b3 + g.b2 * x + 0.5 * g.b1 * x * x);
    Complex64::from_polar(1.0, -phase) * phi(x + g.a)
}
