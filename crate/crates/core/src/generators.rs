//! Concrete generator families and the commutation-relation checker.
//!
//! Indexing follows the `n`-dimensional convention: basis `e_0..e_{n-1}`,
//! `H e_k = h_k e_k`, `E e_k = ν c_k e_{k-1}`, `F e_k = -c_{k+1} e_{k+1}`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Where a tuple came from. `Custom` covers anything read from disk or
/// produced by conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "snu2")]
    Snu2,
    #[serde(rename = "sl2")]
    Sl2,
    #[serde(rename = "limit")]
    Limit,
    #[serde(rename = "fundamental")]
    Fundamental,
    #[serde(rename = "onedim")]
    OneDim,
    #[serde(rename = "counterexample")]
    Counterexample,
    #[serde(rename = "custom")]
    Custom,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Snu2 => "snu2",
            Family::Sl2 => "sl2",
            Family::Limit => "limit",
            Family::Fundamental => "fundamental",
            Family::OneDim => "onedim",
            Family::Counterexample => "counterexample",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "snu2" => Family::Snu2,
            "sl2" => Family::Sl2,
            "limit" => Family::Limit,
            "fundamental" => Family::Fundamental,
            "onedim" => Family::OneDim,
            "counterexample" => Family::Counterexample,
            "custom" => Family::Custom,
            other => return Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        })
    }
}

/// A triple `(H, E, F)`; as a pencil tuple the slots are `(A1, A2, A3)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::io::TupleJson", into = "crate::io::TupleJson")]
pub struct GeneratorTuple {
    pub h: ComplexMatrix,
    pub e: ComplexMatrix,
    pub f: ComplexMatrix,
    pub n: usize,
    pub nu: Option<f64>,
    pub family: Family,
}

impl GeneratorTuple {
    pub fn new(h: ComplexMatrix, e: ComplexMatrix, f: ComplexMatrix, family: Family, nu: Option<f64>) -> Result<Self> {
        let n = h.n();
        for m in [&e, &f] {
            if m.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.n() });
            }
        }
        Ok(GeneratorTuple { h, e, f, n, nu, family })
    }

    /// Slots in pencil order `(A1, A2, A3) = (H, E, F)`.
    pub fn slots(&self) -> [&ComplexMatrix; 3] {
        [&self.h, &self.e, &self.f]
    }

    /// `(W H W*, W E W*, W F W*)`, tagged as a custom tuple with the same
    /// parameters.
    pub fn conjugated(&self, w: &ComplexMatrix) -> GeneratorTuple {
        GeneratorTuple {
            h: self.h.conjugate_by(w),
            e: self.e.conjugate_by(w),
            f: self.f.conjugate_by(w),
            n: self.n,
            nu: self.nu,
            family: Family::Custom,
        }
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if !nu.is_finite() || nu == 0.0 || nu.abs() > 1.0 {
        return Err(Error::InvalidParameter(format!("nu must lie in [-1, 1] \\ {{0}}, got {nu}")));
    }
    Ok(())
}

fn check_dim(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidParameter(format!("dimension must be at least {min}, got {n}")));
    }
    Ok(())
}

/// `c_k(ν)` for the `n`-dimensional representation, `k = 0..=n`.
///
/// Uses the factorisation
/// `c_k² = ν²/(1-ν²)² (ν^{-2k} - 1)(1 - ν^{2(n-k)})` of the radicand; at
/// `|ν| = 1` returns the limit `sqrt(k (n - k))`.
pub fn c_coeff(n: usize, k: usize, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    if k > n {
        return Err(Error::InvalidParameter(format!("index {k} exceeds dimension {n}")));
    }
    if k == 0 || k == n {
        return Ok(0.0);
    }
    if nu.abs() == 1.0 {
        return Ok(((k * (n - k)) as f64).sqrt());
    }
    let l = (nu * nu).ln();
    let a = (-(k as f64) * l).exp_m1();
    let b = -(((n - k) as f64) * l).exp_m1();
    Ok(nu / ((1.0 - nu) * (1.0 + nu)) * (a * b).sqrt())
}

/// Diagonal entry `h_k = ν²/(1-ν²) (ν^{2(n-2k-1)} - 1)`, or `2k + 1 - n`
/// at `|ν| = 1`.
pub fn h_coeff(n: usize, k: usize, nu: f64) -> Result<f64> {
    check_nu(nu)?;
    let m = n as f64 - 2.0 * k as f64 - 1.0;
    if nu.abs() == 1.0 {
        return Ok(-m);
    }
    let l = (nu * nu).ln();
    Ok(nu * nu / ((1.0 - nu) * (1.0 + nu)) * (m * l).exp_m1())
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Generators `(H_{n,ν}, E_{n,ν}, F_{n,ν})` of the `n`-dimensional
/// representation of twisted `S_νU(2)`.
pub fn snu2_generators(n: usize, nu: f64) -> Result<GeneratorTuple> {
    check_nu(nu)?;
    check_dim(n, 1)?;
    let mut h = ComplexMatrix::zeros(n);
    let mut e = ComplexMatrix::zeros(n);
    let mut f = ComplexMatrix::zeros(n);
    for k in 0..n {
        h[(k, k)] = real(h_coeff(n, k, nu)?);
        if k >= 1 {
            e[(k - 1, k)] = real(nu * c_coeff(n, k, nu)?);
        }
        if k + 1 < n {
            f[(k + 1, k)] = real(-c_coeff(n, k + 1, nu)?);
        }
    }
    GeneratorTuple::new(h, e, f, Family::Snu2, Some(nu))
}

/// The `ν -> 1` limits `(H̃_n, Ẽ_n, F̃_n)` written out in closed form.
pub fn limit_generators(n: usize) -> Result<GeneratorTuple> {
    check_dim(n, 1)?;
    let mut h = ComplexMatrix::zeros(n);
    let mut e = ComplexMatrix::zeros(n);
    let mut f = ComplexMatrix::zeros(n);
    for k in 0..n {
        h[(k, k)] = real(2.0 * k as f64 + 1.0 - n as f64);
        if k >= 1 {
            e[(k - 1, k)] = real(((k * (n - k)) as f64).sqrt());
        }
        if k + 1 < n {
            f[(k + 1, k)] = real(-(((k + 1) * (n - k - 1)) as f64).sqrt());
        }
    }
    GeneratorTuple::new(h, e, f, Family::Limit, Some(1.0))
}

/// The irreducible `n`-dimensional representation of `sl(2)`:
/// `F ζ_j = ζ_{j+1}`, `E ζ_j = j(n-j) ζ_{j-1}`, `H ζ_j = (n-1-2j) ζ_j`.
pub fn sl2_generators(n: usize) -> Result<GeneratorTuple> {
    check_dim(n, 2)?;
    let mut h = ComplexMatrix::zeros(n);
    let mut e = ComplexMatrix::zeros(n);
    let mut f = ComplexMatrix::zeros(n);
    for j in 0..n {
        h[(j, j)] = real(n as f64 - 1.0 - 2.0 * j as f64);
        if j >= 1 {
            e[(j - 1, j)] = real((j * (n - j)) as f64);
        }
        if j + 1 < n {
            f[(j + 1, j)] = real(1.0);
        }
    }
    GeneratorTuple::new(h, e, f, Family::Sl2, None)
}

/// Generators of the fundamental (2-dimensional) representation.
pub fn fundamental_generators(nu: f64) -> Result<GeneratorTuple> {
    check_nu(nu)?;
    let h = ComplexMatrix::from_real_diag(&[1.0, -nu * nu]);
    let e = ComplexMatrix::unit(2, 0, 1);
    let f = ComplexMatrix::unit(2, 1, 0).scaled(real(-nu));
    GeneratorTuple::new(h, e, f, Family::Fundamental, Some(nu))
}

/// The one-dimensional representation with free constant `c`:
/// `F = cν/(1-ν²)`, `H = -ν²/(1-ν²)`, `E = ν²/(c(1-ν²))`.
pub fn one_dim_rep(c: Complex64, nu: f64) -> Result<GeneratorTuple> {
    check_nu(nu)?;
    if nu.abs() == 1.0 {
        return Err(Error::InvalidParameter("one-dimensional representation needs |nu| < 1".into()));
    }
    if c == Complex64::new(0.0, 0.0) || !(c.re.is_finite() && c.im.is_finite()) {
        return Err(Error::InvalidParameter("constant c must be finite and nonzero".into()));
    }
    let k = 1.0 / ((1.0 - nu) * (1.0 + nu));
    let one = |z: Complex64| ComplexMatrix::from_diag(&[z]);
    GeneratorTuple::new(
        one(real(-nu * nu * k)),
        one(c.inv() * (nu * nu * k)),
        one(c * (nu * k)),
        Family::OneDim,
        Some(nu),
    )
}

/// The 3x3 tuple `(H_3, A_2, A_3)` sharing the joint spectrum of
/// `(H_3, E_3, F_3)` whenever `αγ = βδ = 2`.
pub fn counterexample_tuple(
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    delta: Complex64,
) -> Result<GeneratorTuple> {
    let two = real(2.0);
    if (alpha * gamma - two).norm() > 1e-12 || (beta * delta - two).norm() > 1e-12 {
        return Err(Error::InvalidParameter("counterexample needs alpha*gamma = beta*delta = 2".into()));
    }
    let h = sl2_generators(3)?.h;
    let mut a2 = ComplexMatrix::zeros(3);
    a2[(0, 1)] = alpha;
    a2[(2, 1)] = beta;
    let mut a3 = ComplexMatrix::zeros(3);
    a3[(1, 0)] = gamma;
    a3[(1, 2)] = delta;
    GeneratorTuple::new(h, a2, a3, Family::Counterexample, None)
}

/// Cyclic permutation `P` (`P[r][r+1 mod n] = 1`) and the transposition
/// `Q_ij` exchanging rows `i` and `j`.
pub fn structural_matrices(n: usize, i: usize, j: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !(i < j && j < n) {
        return Err(Error::InvalidParameter(format!("need 0 <= i < j < n, got i={i}, j={j}, n={n}")));
    }
    let mut p = ComplexMatrix::zeros(n);
    for r in 0..n {
        p[(r, (r + 1) % n)] = real(1.0);
    }
    let mut q = ComplexMatrix::identity(n);
    q[(i, i)] = real(0.0);
    q[(j, j)] = real(0.0);
    q[(i, j)] = real(1.0);
    q[(j, i)] = real(1.0);
    Ok((p, q))
}

/// Operand order in the deformed commutation relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `νFE - ν⁻¹EF = H`, `ν²HE - ν⁻²EH = (1+ν²)E`, `ν²FH - ν⁻²HF = (1+ν²)F`.
    Paper,
    /// Each product pair reversed: `νEF - ν⁻¹FE = H`, and so on.
    Swapped,
}

impl FromStr for Orientation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Orientation::Paper),
            "swapped" => Ok(Orientation::Swapped),
            other => Err(Error::InvalidParameter(format!("unknown orientation '{other}'"))),
        }
    }
}

/// Hilbert-Schmidt norms of the three relation defects. `scales` holds
/// `max(1, sum of the norms of the terms)` for each relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationResidual {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub scales: [f64; 3],
    pub orientation: Orientation,
}

impl RelationResidual {
    pub fn relative(&self) -> [f64; 3] {
        [self.r1 / self.scales[0], self.r2 / self.scales[1], self.r3 / self.scales[2]]
    }

    pub fn max_relative(&self) -> f64 {
        self.relative().into_iter().fold(0.0, f64::max)
    }
}

/// Evaluates the three deformed relations on a tuple carrying a `ν`.
pub fn relation_residuals(t: &GeneratorTuple, orientation: Orientation) -> Result<RelationResidual> {
    let nu =
        t.nu.ok_or_else(|| Error::InvalidParameter(format!("family '{}' carries no deformation parameter", t.family)))?;
    let (h, e, f) = (&t.h, &t.e, &t.f);
    let (fe, ef) = (f * e, e * f);
    let (he, eh) = (h * e, e * h);
    let (fh, hf) = (f * h, h * f);
    let (ordered_fe, reversed_fe, ordered_he, reversed_he, ordered_fh, reversed_fh) = match orientation {
        Orientation::Paper => (&fe, &ef, &he, &eh, &fh, &hf),
        Orientation::Swapped => (&ef, &fe, &eh, &he, &hf, &fh),
    };
    let nu2 = nu * nu;
    let q = real(1.0 + nu2);
    let defect = |terms: [ComplexMatrix; 3]| {
        let scale = terms.iter().map(|m| m.hs_norm()).sum::<f64>().max(1.0);
        ((&(&terms[0] - &terms[1]) - &terms[2]).hs_norm(), scale)
    };
    let (r1, s1) = defect([ordered_fe.scaled(real(nu)), reversed_fe.scaled(real(1.0 / nu)), h.clone()]);
    let (r2, s2) = defect([ordered_he.scaled(real(nu2)), reversed_he.scaled(real(1.0 / nu2)), e.scaled(q)]);
    let (r3, s3) = defect([ordered_fh.scaled(real(nu2)), reversed_fh.scaled(real(1.0 / nu2)), f.scaled(q)]);
    Ok(RelationResidual { r1, r2, r3, scales: [s1, s2, s3], orientation })
}

/// `[H,E] - 2E`, `[H,F] + 2F`, `[E,F] - H` in Hilbert-Schmidt norm.
pub fn sl2_relation_residuals(t: &GeneratorTuple) -> [f64; 3] {
    let (h, e, f) = (&t.h, &t.e, &t.f);
    [
        (&h.commutator(e) - &e.scaled(real(2.0))).hs_norm(),
        (&h.commutator(f) + &f.scaled(real(2.0))).hs_norm(),
        (&e.commutator(f) - h).hs_norm(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(r: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(r).unwrap()
    }

    /// Radicand of the printed formula, evaluated literally.
    fn c_literal(n: usize, k: usize, nu: f64) -> f64 {
        let (n, k) = (n as i32, k as i32);
        let rad = (nu.powi(n - 2 * k - 1) - nu.powi(n - 1)) * (nu.powi(1 - n) - nu.powi(n - 2 * k + 1));
        nu / (1.0 - nu * nu) * rad.sqrt()
    }

    #[test]
    fn c_boundary_and_small_cases() {
        for nu in [0.3, -0.7, 1.0] {
            assert_eq!(c_coeff(5, 0, nu).unwrap(), 0.0);
            assert_eq!(c_coeff(5, 5, nu).unwrap(), 0.0);
        }
        assert!((c_coeff(2, 1, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((c_coeff(5, 2, 1.0).unwrap() - 6f64.sqrt()).abs() < 1e-15);
        assert!(c_coeff(3, 1, 0.0).is_err());
        assert!(c_coeff(3, 1, 1.5).is_err());
        assert!(c_coeff(3, 4, 0.5).is_err());
    }

    #[test]
    fn stable_form_matches_literal_formula() {
        for n in 2..9 {
            for k in 1..n {
                for nu in [0.3, 0.5, 0.9, -0.4] {
                    let lit = c_literal(n, k, nu);
                    let got = c_coeff(n, k, nu).unwrap();
                    assert!((lit - got).abs() <= 1e-12 * lit.abs().max(1.0), "n={n} k={k} nu={nu}");
                }
            }
        }
    }

    #[test]
    fn snu2_dimension_two() {
        let nu = 0.5;
        let t = snu2_generators(2, nu).unwrap();
        assert!(t.h.max_abs_diff(&ComplexMatrix::from_real_diag(&[-nu * nu, 1.0])) < 1e-15);
        assert!(t.e.max_abs_diff(&rows(&[&[0., nu], &[0., 0.]])) < 1e-15);
        assert!(t.f.max_abs_diff(&rows(&[&[0., 0.], &[-1., 0.]])) < 1e-15);
    }

    #[test]
    fn unit_nu_matches_closed_form_limit() {
        for n in 1..=9 {
            let a = snu2_generators(n, 1.0).unwrap();
            let b = limit_generators(n).unwrap();
            assert_eq!((a.h, a.e, a.f), (b.h, b.e, b.f));
        }
    }

    #[test]
    fn snu2_diagonal_is_increasing_with_expected_max() {
        for n in 2..10 {
            for nu in [0.3, 0.5, 0.9] {
                let t = snu2_generators(n, nu).unwrap();
                let d: Vec<f64> = t.h.diag().iter().map(|z| z.re).collect();
                assert!(d.windows(2).all(|w| w[0] < w[1]));
                let lambda_max = nu * nu / (1.0 - nu * nu) * (nu.powi(2 * (1 - n as i32)) - 1.0);
                assert!((d[n - 1] - lambda_max).abs() <= 1e-12 * lambda_max.abs().max(1.0));
                for (k, &hk) in d.iter().enumerate() {
                    let lit = nu * nu / (1.0 - nu * nu) * (nu.powi(2 * (n as i32 - 2 * k as i32 - 1)) - 1.0);
                    assert!((hk - lit).abs() <= 1e-12 * lit.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn gram_matrices_are_diagonal() {
        for n in 2..8 {
            for nu in [0.3, 0.5, -0.7, 1.0] {
                let t = snu2_generators(n, nu).unwrap();
                let c: Vec<f64> = (0..=n).map(|k| c_coeff(n, k, nu).unwrap()).collect();
                let ee = &t.e * &t.e.adjoint();
                let e_e = &t.e.adjoint() * &t.e;
                let want_ee: Vec<f64> = (0..n).map(|k| nu * nu * c[k + 1] * c[k + 1]).collect();
                let want_e_e: Vec<f64> = (0..n).map(|k| nu * nu * c[k] * c[k]).collect();
                assert!(ee.max_abs_diff(&ComplexMatrix::from_real_diag(&want_ee)) <= 1e-12 * ee.scale());
                assert!(e_e.max_abs_diff(&ComplexMatrix::from_real_diag(&want_e_e)) <= 1e-12 * ee.scale());
            }
        }
    }

    #[test]
    fn self_adjointness_only_at_unit_nu() {
        for n in 2..8 {
            for nu in [1.0, -1.0] {
                let t = snu2_generators(n, nu).unwrap();
                assert!(t.e.adjoint().scaled(real(-nu)).max_abs_diff(&t.f) < 1e-12);
            }
            let t = snu2_generators(n, 0.5).unwrap();
            assert!(t.e.adjoint().scaled(real(-0.5)).max_abs_diff(&t.f) > 1e-3);
        }
    }

    #[test]
    fn continuity_towards_unit_nu() {
        let n = 6;
        let limit = snu2_generators(n, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let t = snu2_generators(n, 1.0 - eps).unwrap();
            let d = t.h.hs_distance(&limit.h) + t.e.hs_distance(&limit.e) + t.f.hs_distance(&limit.f);
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn sl2_n3_matches_displayed_matrices() {
        let t = sl2_generators(3).unwrap();
        assert_eq!(t.e, rows(&[&[0., 2., 0.], &[0., 0., 2.], &[0., 0., 0.]]));
        assert_eq!(t.f, rows(&[&[0., 0., 0.], &[1., 0., 0.], &[0., 1., 0.]]));
        assert_eq!(t.h, ComplexMatrix::from_real_diag(&[2., 0., -2.]));
        assert!(sl2_generators(1).is_err());
    }

    #[test]
    fn sl2_relations_are_exact() {
        for n in 2..=12 {
            let t = sl2_generators(n).unwrap();
            assert_eq!(sl2_relation_residuals(&t), [0.0; 3]);
            let ef = &t.e * &t.f;
            let want: Vec<f64> = (0..n).map(|j| if j + 1 < n { ((j + 1) * (n - 1 - j)) as f64 } else { 0.0 }).collect();
            assert_eq!(ef, ComplexMatrix::from_real_diag(&want));
        }
    }

    #[test]
    fn fundamental_representation() {
        let t = fundamental_generators(1.0).unwrap();
        assert_eq!(t.f, rows(&[&[0., 0.], &[-1., 0.]]));
        assert_eq!(t.h, ComplexMatrix::from_real_diag(&[1., -1.]));
        for nu in [0.3, -0.9, 0.5] {
            let t = fundamental_generators(nu).unwrap();
            let r = relation_residuals(&t, Orientation::Paper).unwrap();
            assert!(r.r1 < 1e-12 && r.r2 < 1e-12 && r.r3 < 1e-12);
            assert!(t.e.adjoint().scaled(real(-nu)).max_abs_diff(&t.f) < 1e-15);
        }
    }

    #[test]
    fn one_dimensional_case() {
        let t = one_dim_rep(real(1.0), 0.5).unwrap();
        assert!((t.f[(0, 0)] - real(2.0 / 3.0)).norm() < 1e-15);
        assert!((t.h[(0, 0)] - real(-0.25 / 0.75)).norm() < 1e-15);
        for c in [real(1.0), Complex64::new(0.3, -2.0)] {
            let t = one_dim_rep(c, 0.4).unwrap();
            let prod = t.f[(0, 0)] * t.e[(0, 0)];
            assert!((prod - real(0.4f64.powi(3) / (1.0 - 0.16f64).powi(2))).norm() < 1e-14);
        }
        assert!(one_dim_rep(real(1.0), 1.0).is_err());
        assert!(one_dim_rep(real(0.0), 0.5).is_err());
    }

    #[test]
    fn counterexample_commutator() {
        let t = counterexample_tuple(real(1.0), real(2.0), real(2.0), real(1.0)).unwrap();
        let comm = t.e.commutator(&t.f);
        assert_eq!(comm, rows(&[&[2., 0., 1.], &[0., -4., 0.], &[4., 0., 2.]]));
        let t = counterexample_tuple(real(2.0), real(1.0), real(1.0), real(2.0)).unwrap();
        assert_eq!(t.e.commutator(&t.f), rows(&[&[2., 0., 4.], &[0., -4., 0.], &[1., 0., 2.]]));
        assert!(counterexample_tuple(real(1.0), real(1.0), real(1.0), real(1.0)).is_err());
    }

    #[test]
    fn structural_matrix_properties() {
        for n in 2..8 {
            let (p, q) = structural_matrices(n, 0, n - 1).unwrap();
            assert!(p.classify(1e-12).unitary);
            let mut pow = ComplexMatrix::identity(n);
            for _ in 0..n {
                pow = &pow * &p;
            }
            assert_eq!(pow, ComplexMatrix::identity(n));
            assert_eq!(&q * &q, ComplexMatrix::identity(n));
            let d: Vec<f64> = (0..n).map(|k| (k * k + 1) as f64).collect();
            let shifted = &(&p.adjoint() * &ComplexMatrix::from_real_diag(&d)) * &p;
            let want: Vec<f64> = (0..n).map(|k| d[(k + n - 1) % n]).collect();
            assert_eq!(shifted, ComplexMatrix::from_real_diag(&want));
        }
        assert!(structural_matrices(4, 2, 2).is_err());
        assert!(structural_matrices(4, 1, 4).is_err());
    }

    #[test]
    fn relation_checker_requires_nu() {
        assert!(relation_residuals(&sl2_generators(3).unwrap(), Orientation::Paper).is_err());
    }
}
