//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for selected
//! eigenvalues and inverse iteration for their eigenvectors.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiag {
    /// `off[i]` couples rows `i` and `i + 1`.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidArgument(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let coupling = if i > 0 { self.off[i - 1] * self.off[i - 1] / q } else { 0.0 };
            q = self.diag[i] - x - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected to rounding level.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.len() {
            return Err(Error::InvalidArgument(format!("eigenvalue index {k} out of range {}", self.len())));
        }
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
        lo -= pad;
        hi += pad;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// The `count` smallest eigenvalues, ascending.
    pub fn lowest(&self, count: usize) -> Result<Vec<f64>> {
        (0..count.min(self.len())).map(|k| self.eigenvalue(k)).collect()
    }

    /// Unit eigenvector for an accurate eigenvalue `lambda`, kept orthogonal
    /// to the unit vectors in `previous`.
    pub fn eigenvector(&self, lambda: f64, previous: &[Vec<f64>]) -> Result<Vec<f64>> {
        let n = self.len();
        // no shift offset: with graded diagonals eps·‖T‖ can exceed the gaps
        // between low eigenvalues, and exact pivots are guarded in the factorization
        let lu = TridiagLu::factor(&self.diag, &self.off, lambda);
        // deterministic, generic start vector
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract()).collect();
        normalize(&mut v);
        for _ in 0..4 {
            for p in previous {
                let d: f64 = p.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(p).for_each(|(x, y)| *x -= d * y);
            }
            v = lu.solve(&v);
            if !normalize(&mut v) {
                return Err(Error::InvalidArgument("inverse iteration collapsed".into()));
            }
        }
        for p in previous {
            let d: f64 = p.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(p).for_each(|(x, y)| *x -= d * y);
        }
        normalize(&mut v);
        // fix the sign: largest component positive
        let big = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if big < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        Ok(v)
    }

    /// Lowest `count` eigenpairs; vectors have unit Euclidean norm.
    pub fn lowest_pairs(&self, count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let values = self.lowest(count)?;
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(values.len());
        for &lambda in &values {
            let v = self.eigenvector(lambda, &vectors)?;
            vectors.push(v);
        }
        Ok((values, vectors))
    }
}

fn normalize(v: &mut [f64]) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

/// LU factorization of `T − σI` with partial pivoting (rows `i`, `i+1`).
struct TridiagLu {
    // row i of U: u0[i] at column i, u1[i] at i+1, u2[i] at i+2
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(diag: &[f64], off: &[f64], sigma: f64) -> Self {
        let n = diag.len();
        // guard for exactly zero pivots; the diagonal is left out because it can be graded
        let tiny = f64::EPSILON * (sigma.abs() + off.iter().fold(0.0f64, |m, x| m.max(x.abs()))).max(f64::MIN_POSITIVE);
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];

        // current row i being eliminated: (a, b, c) at columns i, i+1, i+2
        let mut a = diag[0] - sigma;
        let mut b = if n > 1 { off[0] } else { 0.0 };
        let mut c = 0.0;
        for i in 0..n.saturating_sub(1) {
            let (la, lb, lc) = (off[i], diag[i + 1] - sigma, if i + 2 < n { off[i + 1] } else { 0.0 });
            if la.abs() > a.abs() {
                swapped[i] = true;
                u0[i] = la;
                u1[i] = lb;
                u2[i] = lc;
                let m = a / la;
                mult[i] = m;
                a = b - m * lb;
                b = c - m * lc;
            } else {
                let pivot = if a == 0.0 { tiny } else { a };
                u0[i] = pivot;
                u1[i] = b;
                u2[i] = c;
                let m = la / pivot;
                mult[i] = m;
                a = lb - m * b;
                b = lc - m * c;
            }
            c = 0.0;
        }
        u0[n - 1] = if a == 0.0 { tiny } else { a };
        Self { u0, u1, u2, mult, swapped }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut y = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                y.swap(i, i + 1);
            }
            y[i + 1] -= self.mult[i] * y[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * x[i + 2];
            }
            x[i] = s / self.u0[i];
        }
        x
    }
}
