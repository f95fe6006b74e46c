//! Dense square complex matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense `n x n` complex matrix stored row-major.
#[derive(Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "crate::io::MatrixJson", into = "crate::io::MatrixJson")]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

/// Binary matrix operations exposed through [`mat_op`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatOp {
    Add,
    Sub,
    Mul,
    Commutator,
}

/// Structural flags of a matrix at a given tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Classification {
    pub normal: bool,
    pub hermitian: bool,
    pub unitary: bool,
    pub diagonal: bool,
    pub simple_spectrum: bool,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Rejects `n == 0`, a wrong
    /// entry count and non-finite values.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: data.len() });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexMatrix { n, data })
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
        }
        Self::new(n, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor for real matrices given as rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect())
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        ComplexMatrix { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// Matrix with a single unit entry at `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(i, j)] = ONE;
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.n)
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn from_columns(cols: &[Vec<Complex64>]) -> Result<Self> {
        let n = cols.len();
        if n == 0 {
            return Err(Error::InvalidParameter("no columns".into()));
        }
        let mut m = Self::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.len() });
            }
            for (i, &z) in c.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    /// Hilbert-Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max(1, ||A||_HS)`, the scale used by every relative threshold.
    pub fn scale(&self) -> f64 {
        self.hs_norm().max(1.0)
    }

    /// Hilbert-Schmidt norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        ComplexMatrix { n: self.n, data: self.data.iter().map(|&z| z * c).collect() }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        ComplexMatrix { n: self.n, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    /// `a b - b a`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `u a u*`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    /// Hermitian part `(a + a*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scaled(Complex64::new(0.5, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `||a - b||_HS`.
    pub fn hs_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Determinant by LU factorisation with partial pivoting. Exactly
    /// singular inputs return zero.
    pub fn determinant(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = ONE;
        for k in 0..n {
            let (p, pmax) =
                (k..n).map(|i| (i, a[i * n + k].norm())).fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                return ZERO;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        det
    }

    /// Structural flags; every defect is measured relative to
    /// `max(1, ||a||_HS)` (squared for the quadratic tests).
    pub fn classify(&self, tol: f64) -> Classification {
        let s = self.scale();
        let adj = self.adjoint();
        let hermitian = self.hs_distance(&adj) <= tol * s;
        let normal = normality_defect(self) <= tol;
        let unitary = (self * &adj).hs_distance(&Self::identity(self.n)) <= tol * s * s;
        let diagonal = self.off_diagonal_norm() <= tol * s;
        let simple_spectrum = normal
            && match crate::eigen::normal_eig(self, tol) {
                Ok(eig) => crate::eigen::cluster_complex(&eig.values, tol * s).len() == self.n,
                Err(_) => false,
            };
        Classification { normal, hermitian, unitary, diagonal, simple_spectrum }
    }
}

/// `||a a* - a* a||_HS / max(1, ||a||_HS)^2`.
pub fn normality_defect(a: &ComplexMatrix) -> f64 {
    let adj = a.adjoint();
    (a * &adj).hs_distance(&(&adj * a)) / (a.scale() * a.scale())
}

/// Checked binary operation.
pub fn mat_op(a: &ComplexMatrix, b: &ComplexMatrix, kind: MatOp) -> Result<ComplexMatrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, got: b.n });
    }
    Ok(match kind {
        MatOp::Add => a + b,
        MatOp::Sub => a - b,
        MatOp::Mul => a * b,
        MatOp::Commutator => a.commutator(b),
    })
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

// The operator impls panic on a dimension mismatch; use `mat_op` for a
// checked version.

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix { n, data: out }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.n, self.n)?;
        for row in self.rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| if z.im == 0.0 { format!("{:.6}", z.re) } else { format!("{:.6}{:+.6}i", z.re, z.im) })
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Cofactor expansion along the first row; exponential, test-only.
    fn cofactor_det(m: &ComplexMatrix) -> Complex64 {
        fn rec(rows: &[Vec<Complex64>]) -> Complex64 {
            let n = rows.len();
            if n == 1 {
                return rows[0][0];
            }
            let mut acc = ZERO;
            for j in 0..n {
                let minor: Vec<Vec<Complex64>> = rows[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, z)| *z).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += rows[0][j] * rec(&minor) * sign;
            }
            acc
        }
        rec(&m.rows().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn lcg_matrix(n: usize, seed: u64) -> ComplexMatrix {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let data = (0..n * n).map(|_| c(next(), next())).collect();
        ComplexMatrix::new(n, data).unwrap()
    }

    #[test]
    fn commutator_with_identity_vanishes() {
        let m = lcg_matrix(4, 7);
        let z = mat_op(&ComplexMatrix::identity(4), &m, MatOp::Commutator).unwrap();
        assert_eq!(z.hs_norm(), 0.0);
    }

    #[test]
    fn mat_op_rejects_mismatch() {
        let r = mat_op(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3), MatOp::Add);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(ComplexMatrix::new(0, vec![]).is_err());
        assert!(ComplexMatrix::new(2, vec![ZERO; 3]).is_err());
        assert!(matches!(ComplexMatrix::new(1, vec![c(f64::NAN, 0.0)]), Err(Error::NonFinite)));
        assert!(ComplexMatrix::from_rows(vec![vec![ONE, ONE], vec![ONE]]).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let d = ComplexMatrix::from_diag(&[c(0.0, 1.0), c(2.0, 0.0)]);
        assert_eq!(d.adjoint(), ComplexMatrix::from_diag(&[c(0.0, -1.0), c(2.0, 0.0)]));
        let m = lcg_matrix(5, 3);
        assert_eq!(m.adjoint().adjoint(), m);
        assert!((m.adjoint().hs_norm() - m.hs_norm()).abs() <= 1e-15 * m.hs_norm());
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(ComplexMatrix::identity(5).determinant(), ONE);
        let (a, b, cc, d) = (c(1.0, 2.0), c(-0.5, 0.3), c(2.0, -1.0), c(0.25, 4.0));
        let m = ComplexMatrix::from_rows(vec![vec![a, b], vec![cc, d]]).unwrap();
        assert!((m.determinant() - (a * d - b * cc)).norm() < 1e-14);
        assert_eq!(ComplexMatrix::zeros(3).determinant(), ZERO);
    }

    #[test]
    fn determinant_matches_cofactor_oracle() {
        for seed in 0..20 {
            let m = lcg_matrix(6, seed);
            let lu = m.determinant();
            let co = cofactor_det(&m);
            assert!((lu - co).norm() <= 1e-9 * co.norm().max(1e-300), "seed {seed}: {lu} vs {co}");
        }
    }

    #[test]
    fn determinant_is_multiplicative() {
        for seed in 0..20 {
            let a = lcg_matrix(5, 100 + seed);
            let b = lcg_matrix(5, 200 + seed);
            let lhs = (&a * &b).determinant();
            let rhs = a.determinant() * b.determinant();
            assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm());
        }
    }

    #[test]
    fn classify_examples() {
        let one = ComplexMatrix::identity(1).classify(1e-9);
        assert!(one.normal && one.hermitian && one.unitary && one.diagonal && one.simple_spectrum);
        let id = ComplexMatrix::identity(3).classify(1e-9);
        assert!(id.normal && id.hermitian && id.unitary && id.diagonal);
        assert!(!id.simple_spectrum, "identity has a triple eigenvalue");

        let e3 = ComplexMatrix::from_real_rows(&[&[0., 2., 0.], &[0., 0., 2.], &[0., 0., 0.]]).unwrap();
        let cl = e3.classify(1e-9);
        assert!(!cl.normal && !cl.hermitian && !cl.diagonal && !cl.simple_spectrum);

        let rot = ComplexMatrix::from_real_rows(&[&[0., -1.], &[1., 0.]]).unwrap();
        let cl = rot.classify(1e-9);
        assert!(cl.normal && cl.unitary && !cl.hermitian && cl.simple_spectrum);
    }
}
