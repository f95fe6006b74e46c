//! The exceptional parameters `ν` at which `E E*` (equivalently `E* E`)
//! acquires a doubled eigenvalue.
//!
//! For `|ν| < 1`, `c_i(ν)² = c_j(ν)²` with `i < j` happens exactly when
//! `z = ν²` is the root in `(0, 1)` of
//! `1 + z + ... + z^{n-j-1} - z^{n-i} - ... - z^{n-1}`, which requires
//! `i + j > n`. At `|ν| = 1` the pairing is `i + j = n`.

use serde::Serialize;

use crate::eigen::cluster_sorted;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::generators::c_coeff;

const BISECTION_STEPS: usize = 60;

/// Two roots closer than this are treated as one when checking the
/// ordering claims.
pub const COINCIDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceptionalRoot {
    pub n: usize,
    pub i: usize,
    pub j: usize,
    pub z: f64,
    pub nu: f64,
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if !(i < j && j < n && i + j > n) {
        return Err(Error::InvalidParameter(format!("need i < j <= n-1 and i + j > n, got n={n}, i={i}, j={j}")));
    }
    Ok(())
}

/// Coefficients by ascending degree: `+1` on `0..n-j`, `-1` on `n-i..n`.
pub fn root_polynomial(n: usize, i: usize, j: usize) -> Result<Vec<f64>> {
    check_pair(n, i, j)?;
    let mut p = vec![0.0; n];
    p[..n - j].fill(1.0);
    p[n - i..].fill(-1.0);
    Ok(p)
}

pub fn eval_real(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
}

/// Sign changes in a coefficient sequence, zeros skipped.
pub fn descartes_sign_changes(coeffs: &[f64]) -> usize {
    let signs: Vec<bool> = coeffs.iter().filter(|c| **c != 0.0).map(|c| *c > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// The root of [`root_polynomial`] in `(0, 1)`, by bisection.
pub fn z_root(n: usize, i: usize, j: usize) -> Result<ExceptionalRoot> {
    let p = root_polynomial(n, i, j)?;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if eval_real(&p, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z = 0.5 * (lo + hi);
    Ok(ExceptionalRoot { n, i, j, z, nu: z.sqrt() })
}

/// All pairs `(i, j)` with `i < j <= n-1`, `i + j > n`, lexicographic.
pub fn exceptional_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| i + j > n).collect()
}

/// The exceptional set: one root per pair (standing for `±ν`) plus the
/// separately tagged `±1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExceptionalSet {
    pub n: usize,
    pub roots: Vec<ExceptionalRoot>,
}

impl ExceptionalSet {
    /// Every element of the set as a signed `ν`, ascending, `±1` included.
    pub fn values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.roots.iter().flat_map(|r| [r.nu, -r.nu]).chain([1.0, -1.0]).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Size of the non-unit part, counted with sign.
    pub fn tilde_len(&self) -> usize {
        2 * self.roots.len()
    }
}

pub fn exceptional_set(n: usize) -> Result<ExceptionalSet> {
    exceptional_set_with(Exec::default(), n)
}

pub fn exceptional_set_with(exec: Exec, n: usize) -> Result<ExceptionalSet> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
    }
    let pairs = exceptional_pairs(n);
    let roots = exec.map(pairs.len(), |k| z_root(n, pairs[k].0, pairs[k].1)).into_iter().collect::<Result<_>>()?;
    Ok(ExceptionalSet { n, roots })
}

/// Whether `ν` lies in the exceptional set, comparing `|ν|` against the
/// roots within `tol`.
pub fn is_exceptional(n: usize, nu: f64, tol: f64) -> Result<bool> {
    if nu.abs() == 1.0 {
        return Ok(true);
    }
    Ok(exceptional_set_with(Exec::Sequential, n)?.roots.iter().any(|r| (r.nu - nu.abs()).abs() <= tol))
}

/// Clustered eigenvalues `ν² c_{k+1}(ν)²`, `k = 0..n-1`, of `E E*`, with
/// multiplicities. Values within `tol * max(1, largest)` merge.
pub fn multiplicity_profile(n: usize, nu: f64, tol: f64) -> Result<Vec<(f64, usize)>> {
    let mut vals = (1..=n).map(|k| c_coeff(n, k, nu).map(|c| nu * nu * c * c)).collect::<Result<Vec<f64>>>()?;
    vals.sort_by(f64::total_cmp);
    let scale = vals.last().copied().unwrap_or(0.0).max(1.0);
    Ok(cluster_sorted(&vals, tol * scale)
        .into_iter()
        .map(|r| (vals[r.clone()].iter().sum::<f64>() / r.len() as f64, r.len()))
        .collect())
}

/// Outcome of checking the ordering claims on coincident roots.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CorollaryReport {
    pub ok: bool,
    /// Coincident pairs `((i1, j1), (i2, j2))`, `i1 <= i2`, breaking
    /// `j1 > j2` or `i2 - i1 > j1 - j2`.
    pub violations: Vec<((usize, usize), (usize, usize))>,
    /// Groups of three or more pairs sharing a root.
    pub triples: Vec<Vec<(usize, usize)>>,
    pub coincidences: usize,
}

pub fn corollary_check(n: usize) -> Result<CorollaryReport> {
    let set = exceptional_set(n)?;
    let roots = &set.roots;
    let mut report = CorollaryReport { ok: true, ..Default::default() };
    let mut seen = vec![false; roots.len()];
    for a in 0..roots.len() {
        if seen[a] {
            continue;
        }
        let group: Vec<usize> =
            (a..roots.len()).filter(|&b| (roots[a].z - roots[b].z).abs() <= COINCIDENCE_TOL).collect();
        for (x, &p) in group.iter().enumerate() {
            seen[p] = true;
            for &q in &group[x + 1..] {
                report.coincidences += 1;
                let (r1, r2) = if roots[p].i <= roots[q].i { (roots[p], roots[q]) } else { (roots[q], roots[p]) };
                let fine = r1.i < r2.i && r1.j > r2.j && r2.i - r1.i > r1.j - r2.j;
                if !fine {
                    report.violations.push(((r1.i, r1.j), (r2.i, r2.j)));
                }
            }
        }
        if group.len() >= 3 {
            report.triples.push(group.iter().map(|&g| (roots[g].i, roots[g].j)).collect());
        }
    }
    report.ok = report.violations.is_empty() && report.triples.is_empty();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_polynomial_examples() {
        assert_eq!(root_polynomial(4, 2, 3).unwrap(), vec![1.0, 0.0, -1.0, -1.0]);
        assert_eq!(root_polynomial(5, 3, 4).unwrap(), vec![1.0, 0.0, -1.0, -1.0, -1.0]);
        assert!(root_polynomial(4, 1, 3).is_err());
        assert!(root_polynomial(4, 3, 2).is_err());
        assert!(root_polynomial(4, 2, 4).is_err());
        for n in 3..12 {
            for (i, j) in exceptional_pairs(n) {
                let p = root_polynomial(n, i, j).unwrap();
                assert_eq!(p[0], 1.0);
                assert_eq!(p[n - 1], -1.0);
                assert_eq!(descartes_sign_changes(&p), 1);
            }
        }
    }

    #[test]
    fn n4_root() {
        let r = z_root(4, 2, 3).unwrap();
        assert!((r.z.powi(3) + r.z.powi(2) - 1.0).abs() <= 1e-12);
        assert!(r.z > 0.754877 && r.z < 0.754878);
        assert!((r.nu - 0.868836).abs() < 1e-6);
    }

    #[test]
    fn roots_equalise_coefficients() {
        for n in 4..=12 {
            for (i, j) in exceptional_pairs(n) {
                let r = z_root(n, i, j).unwrap();
                let p = root_polynomial(n, i, j).unwrap();
                assert!(eval_real(&p, r.z).abs() <= 1e-13);
                let m = 1.0 + r.z.powi(n as i32) - r.z.powi((n - j) as i32) - r.z.powi((n - i) as i32);
                assert!(m.abs() <= 1e-11);
                for nu in [r.nu, -r.nu] {
                    let ci = c_coeff(n, i, nu).unwrap().powi(2);
                    let cj = c_coeff(n, j, nu).unwrap().powi(2);
                    assert!((ci - cj).abs() <= 1e-10 * ci.max(1.0), "n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn small_sets() {
        let s3 = exceptional_set(3).unwrap();
        assert!(s3.roots.is_empty());
        assert_eq!(s3.values(), vec![-1.0, 1.0]);
        let s4 = exceptional_set(4).unwrap();
        assert_eq!(s4.roots.len(), 1);
        assert_eq!((s4.roots[0].i, s4.roots[0].j), (2, 3));
        for n in 2..=12 {
            let s = exceptional_set(n).unwrap();
            assert_eq!(s.tilde_len(), 2 * exceptional_pairs(n).len());
            let v = s.values();
            for x in &v {
                assert!(v.iter().any(|y| (x + y).abs() < 1e-15));
            }
        }
        assert!(exceptional_set(1).is_err());
    }

    #[test]
    fn positivity_below_the_diagonal() {
        for n in 2..=10 {
            for i in 0..n {
                for j in i + 1..n {
                    if i + j > n {
                        continue;
                    }
                    for step in 1..100 {
                        let z = step as f64 / 100.0;
                        let lhs = 1.0 + z.powi(n) - z.powi(n - j) - z.powi(n - i);
                        let bound = (1.0 - z.powi(i)) * (1.0 - z.powi(n - i));
                        assert!(lhs >= bound - 1e-15);
                        if i > 0 {
                            assert!(bound > 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn profiles() {
        assert!(multiplicity_profile(4, 0.5, 1e-9).unwrap().iter().all(|&(_, m)| m == 1));
        let r = z_root(4, 2, 3).unwrap();
        let prof = multiplicity_profile(4, r.nu, 1e-9).unwrap();
        assert_eq!(prof.iter().filter(|p| p.1 == 2).count(), 1);
        assert_eq!(prof.iter().map(|p| p.1).sum::<usize>(), 4);
        let prof = multiplicity_profile(6, 1.0, 1e-9).unwrap();
        // k(6-k) for k = 1..5 is 5, 8, 9, 8, 5, plus c_6 = 0
        assert_eq!(prof.iter().map(|p| p.1).collect::<Vec<_>>(), vec![1, 2, 2, 1]);
    }

    #[test]
    fn exceptional_iff_doubled() {
        for n in 3..=9 {
            let set = exceptional_set(n).unwrap();
            let mut samples: Vec<f64> = set.roots.iter().flat_map(|r| [r.nu, -r.nu]).collect();
            samples.extend([0.3, -0.7, 0.5, 1.0, -1.0]);
            for nu in samples {
                let doubled = multiplicity_profile(n, nu, 1e-9).unwrap().iter().any(|p| p.1 == 2);
                assert_eq!(is_exceptional(n, nu, 1e-12).unwrap(), doubled, "n={n} nu={nu}");
            }
        }
    }

    #[test]
    fn corollary_holds_up_to_twelve() {
        for n in 2..=12 {
            let rep = corollary_check(n).unwrap();
            assert!(rep.ok, "n={n}: {rep:?}");
            assert!(rep.triples.is_empty());
        }
    }

    #[test]
    fn enumeration_is_order_stable() {
        let a = exceptional_set_with(Exec::Sequential, 11).unwrap();
        let b = exceptional_set_with(Exec::Parallel, 11).unwrap();
        assert_eq!(a, b);
    }
}
