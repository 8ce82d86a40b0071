//! Dense real polynomials (lowest degree first) and real-root extraction
//! through the companion matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

/// Real roots plus the number of complex roots that were discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct RealRoots {
    pub roots: Vec<f64>,
    pub complex_discarded: usize,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        while p.coeffs.last() == Some(&0.0) {
            p.coeffs.pop();
        }
        p
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c0 + c1 x`.
    pub fn linear(c0: f64, c1: f64) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).copied().unwrap_or(0.0) + other.coeffs.get(k).copied().unwrap_or(0.0))
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly::new(Vec::new());
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// All roots, as eigenvalues of the companion matrix of the monic polynomial.
    pub fn complex_roots(&self) -> Vec<Complex64> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        // strip zero roots so the companion matrix stays well scaled
        let zeros = self.coeffs.iter().take_while(|&&c| c == 0.0).count();
        let trimmed = &self.coeffs[zeros..];
        let n = deg - zeros;
        let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
        if n == 0 {
            return roots;
        }
        let lead = trimmed[n];
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -trimmed[i] / lead;
        }
        roots.extend(companion.complex_eigenvalues().iter().copied());
        roots
    }

    /// Real roots in ascending order. A root counts as real when
    /// `|Im| ≤ 1e-9 (1 + |Re|)`; each is polished with one Newton step and
    /// roots closer than `1e-9` are merged.
    pub fn real_roots(&self) -> RealRoots {
        let all = self.complex_roots();
        let deriv = self.derivative();
        let mut roots = Vec::new();
        let mut complex_discarded = 0;
        for z in all {
            if z.im.abs() <= 1e-9 * (1.0 + z.re.abs()) {
                let mut x = z.re;
                let d = deriv.eval(x);
                if d != 0.0 {
                    let step = self.eval(x) / d;
                    if step.is_finite() {
                        x -= step;
                    }
                }
                roots.push(x);
            } else {
                complex_discarded += 1;
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|b, a| (*b - *a).abs() <= 1e-9);
        RealRoots { roots, complex_discarded }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_product_of_linear_factors() {
        let p = Poly::linear(-1.0, 1.0).mul(&Poly::linear(2.0, 1.0)).mul(&Poly::linear(-0.5, 1.0));
        let r = p.real_roots();
        assert_eq!(r.complex_discarded, 0);
        let expected = [-2.0, 0.5, 1.0];
        for (a, b) in r.roots.iter().zip(expected) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn complex_pair_is_discarded() {
        // (x² + 1)(x − 3)
        let p = Poly::new(vec![1.0, 0.0, 1.0]).mul(&Poly::linear(-3.0, 1.0));
        let r = p.real_roots();
        assert_eq!(r.complex_discarded, 2);
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn zero_roots_and_constants() {
        let p = Poly::new(vec![0.0, 0.0, 1.0, 1.0]);
        assert_eq!(p.real_roots().roots, vec![-1.0, 0.0]);
        assert!(Poly::constant(2.0).real_roots().roots.is_empty());
        assert_eq!(Poly::linear(0.0, -1.0).real_roots().roots, vec![0.0]);
    }

    #[test]
    fn derivative_and_eval() {
        let p = Poly::new(vec![1.0, -2.0, 0.5, 4.0]);
        assert_eq!(p.derivative().coeffs(), &[-2.0, 1.0, 12.0]);
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 2.0 + 32.0);
    }
}
