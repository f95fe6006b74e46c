//! Determinantal polynomials of matrix pencils and their line arrangements.
//!
//! `det(x_1 M_1 + ... + x_k M_k - I)` is recovered by evaluation on a
//! tensor grid of scaled roots of unity followed by an inverse DFT along
//! each axis. Pencils whose coefficients span many orders of magnitude are
//! sampled on several radii, and each coefficient is read from the radius
//! where its round-off bound is smallest.

use std::borrow::Borrow;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::normal_eig;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::generators::GeneratorTuple;
use crate::matrix::ComplexMatrix;
use crate::pencil::{eval_pencil, PencilExpr};
use crate::polynomial::{poly_distance, LinearForm, MultiPoly};

/// Largest number of pencil variables accepted.
pub const MAX_VARS: usize = 4;

/// Coefficients below this multiple of their own round-off bound are
/// treated as zero.
const NOISE_REL: f64 = 1e-13;

/// `det(x_1 M_1 + ... + x_k M_k - I)`.
pub fn det_pencil<M: Borrow<ComplexMatrix> + Sync>(mats: &[M], vars: &[String]) -> Result<MultiPoly> {
    det_pencil_with(Exec::default(), mats, vars)
}

/// [`det_pencil`] with an explicit execution strategy for the grid.
pub fn det_pencil_with<M: Borrow<ComplexMatrix> + Sync>(exec: Exec, mats: &[M], vars: &[String]) -> Result<MultiPoly> {
    interpolate(exec, mats, vars, true)
}

/// `det(x_1 M_1 + ... + x_k M_k)` without the identity shift; homogeneous
/// of degree `n`.
pub fn det_pencil_homogeneous<M: Borrow<ComplexMatrix> + Sync>(mats: &[M], vars: &[String]) -> Result<MultiPoly> {
    interpolate(Exec::default(), mats, vars, false)
}

fn check_pencil<M: Borrow<ComplexMatrix>>(mats: &[M], vars: &[String]) -> Result<usize> {
    let k = mats.len();
    if k == 0 || k > MAX_VARS {
        return Err(Error::Unsupported(format!("pencils need 1 to {MAX_VARS} matrices, got {k}")));
    }
    if vars.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: vars.len() });
    }
    let n = mats[0].borrow().n();
    for m in mats {
        if m.borrow().n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m.borrow().n() });
        }
    }
    Ok(n)
}

/// Number of radii to sample: one per two decades of the largest norm.
fn radius_levels(norms: &[f64]) -> usize {
    let top = norms.iter().copied().fold(1.0, f64::max);
    1 + (top.log10() / 2.0).ceil() as usize
}

fn interpolate<M: Borrow<ComplexMatrix> + Sync>(
    exec: Exec,
    mats: &[M],
    vars: &[String],
    shifted: bool,
) -> Result<MultiPoly> {
    let n = check_pencil(mats, vars)?;
    let k = mats.len();
    let nodes = n + 1;
    let grid = nodes.pow(k as u32);
    let norms: Vec<f64> = mats.iter().map(|m| m.borrow().scale()).collect();
    let levels = radius_levels(&norms);
    // level l samples on |x_i| = norms[i]^{-l/(levels-1)}
    let radii: Vec<Vec<f64>> = (0..levels)
        .map(|l| {
            let t = if levels == 1 { 0.0 } else { l as f64 / (levels - 1) as f64 };
            norms.iter().map(|s| s.powf(-t)).collect()
        })
        .collect();
    let roots: Vec<Complex64> = (0..nodes).map(|m| Complex64::from_polar(1.0, TAU * m as f64 / nodes as f64)).collect();

    let values = exec.map(levels * grid, |idx| {
        let (level, mut g) = (idx / grid, idx % grid);
        let mut point = vec![Complex64::new(0.0, 0.0); k];
        for i in (0..k).rev() {
            point[i] = roots[g % nodes] * radii[level][i];
            g /= nodes;
        }
        pencil_at(mats, &point, shifted).determinant()
    });

    let mut best: Vec<(f64, Complex64)> = vec![(f64::INFINITY, Complex64::new(0.0, 0.0)); grid];
    for (level, chunk) in values.chunks(grid).enumerate() {
        let peak = chunk.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let coeffs = inverse_dft(chunk, nodes, k);
        for (a, c) in coeffs.into_iter().enumerate() {
            let exp = digits(a, nodes, k);
            let r: f64 = exp.iter().zip(&radii[level]).map(|(&e, &r)| r.powi(e as i32)).product();
            let bound = peak / r;
            if bound < best[a].0 {
                best[a] = (bound, c / r);
            }
        }
    }

    let terms = best.into_iter().enumerate().filter_map(|(a, (bound, c))| {
        let exp = digits(a, nodes, k);
        let deg: u32 = exp.iter().sum();
        let keep = if shifted { deg as usize <= n } else { deg as usize == n };
        (keep && c.norm() > NOISE_REL * bound).then_some((exp, c))
    });
    MultiPoly::from_terms(vars, terms)
}

fn pencil_at<M: Borrow<ComplexMatrix>>(mats: &[M], point: &[Complex64], shifted: bool) -> ComplexMatrix {
    let n = mats[0].borrow().n();
    let mut a =
        if shifted { ComplexMatrix::identity(n).scaled(Complex64::new(-1.0, 0.0)) } else { ComplexMatrix::zeros(n) };
    for (m, &x) in mats.iter().zip(point) {
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] += m.borrow()[(i, j)] * x;
            }
        }
    }
    a
}

/// Base-`nodes` digits of a grid index, most significant first.
fn digits(mut g: usize, nodes: usize, k: usize) -> Vec<u32> {
    let mut e = vec![0u32; k];
    for i in (0..k).rev() {
        e[i] = (g % nodes) as u32;
        g /= nodes;
    }
    e
}

/// Separable inverse DFT of a `nodes^k` tensor stored row-major.
fn inverse_dft(values: &[Complex64], nodes: usize, k: usize) -> Vec<Complex64> {
    let twiddle: Vec<Complex64> =
        (0..nodes).map(|j| Complex64::from_polar(1.0 / nodes as f64, -TAU * j as f64 / nodes as f64)).collect();
    let mut data = values.to_vec();
    let mut line = vec![Complex64::new(0.0, 0.0); nodes];
    for axis in 0..k {
        let stride = nodes.pow((k - 1 - axis) as u32);
        let block = stride * nodes;
        for base in (0..data.len()).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (a, slot) in line.iter_mut().enumerate() {
                    *slot = (0..nodes).map(|m| data[start + m * stride] * twiddle[(m * a) % nodes]).sum();
                }
                for (a, v) in line.iter().enumerate() {
                    data[start + a * stride] = *v;
                }
            }
        }
    }
    data
}

/// One factor `coeffs . x = 1` of a line arrangement, repeated `mult` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub coeffs: Vec<Complex64>,
    pub mult: usize,
}

/// A union of hyperplanes, standing for `prod (coeffs . x - 1)^mult`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LineArrangement {
    pub lines: Vec<Line>,
}

impl LineArrangement {
    pub fn total_multiplicity(&self) -> usize {
        self.lines.iter().map(|l| l.mult).sum()
    }

    /// `prod (coeffs . x - 1)^mult`.
    pub fn to_poly(&self, vars: &[String]) -> Result<MultiPoly> {
        let mut p = MultiPoly::constant(vars, Complex64::new(1.0, 0.0));
        for line in &self.lines {
            let f = LinearForm::new(line.coeffs.clone(), Complex64::new(-1.0, 0.0))?.to_poly(vars)?;
            for _ in 0..line.mult {
                p = p.mul(&f)?;
            }
        }
        Ok(p)
    }
}

/// Candidate lines `λ_j x_1 + b̂_jj x_2 = 1` read off in an eigenbasis of
/// the normal matrix `a`, together with whether their product reproduces
/// `det(x_1 a + x_2 b - I)` within `tol`.
///
/// Eigen-directions where both coefficients vanish contribute the
/// constant factor `-1` and no line. Coefficients are compared relative to
/// their own size, so lines of very different magnitude stay apart.
pub fn lines_of_pair(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<(LineArrangement, bool)> {
    lines_of_pair_with(Exec::default(), a, b, tol)
}

pub fn lines_of_pair_with(
    exec: Exec,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: f64,
) -> Result<(LineArrangement, bool)> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), got: b.n() });
    }
    let eig = normal_eig(a, tol)?;
    let b_hat = b.conjugate_by(&eig.vectors.adjoint());
    let cand: Vec<[Complex64; 2]> = (0..a.n()).map(|j| [eig.values[j], b_hat[(j, j)]]).collect();

    // eigenvalues of `a` carry absolute round-off of order eps * ||a||
    let floor = [64.0 * f64::EPSILON * a.scale(), 64.0 * f64::EPSILON * b.scale()];
    let close = |x: Complex64, y: Complex64, f: f64| (x - y).norm() <= (tol * x.norm().max(y.norm()).max(1.0)).max(f);
    let is_zero = |c: &[Complex64; 2]| {
        close(c[0], Complex64::new(0.0, 0.0), floor[0]) && close(c[1], Complex64::new(0.0, 0.0), floor[1])
    };
    let zero = cand.iter().filter(|c| is_zero(c)).count();
    let mut arrangement = LineArrangement::default();
    let mut used = vec![false; cand.len()];
    for i in 0..cand.len() {
        if used[i] || is_zero(&cand[i]) {
            continue;
        }
        let mut mult = 0;
        for j in i..cand.len() {
            if !used[j] && close(cand[i][0], cand[j][0], floor[0]) && close(cand[i][1], cand[j][1], floor[1]) {
                used[j] = true;
                mult += 1;
            }
        }
        arrangement.lines.push(Line { coeffs: cand[i].to_vec(), mult });
    }

    let vars = MultiPoly::default_vars(2);
    let mut product = arrangement.to_poly(&vars)?;
    if zero % 2 == 1 {
        product = product.scale(Complex64::new(-1.0, 0.0));
    }
    let det = det_pencil_with(exec, &[a, b], &vars)?;
    let certified = poly_equal_or_false(&product, &det, tol);
    Ok((arrangement, certified))
}

fn poly_equal_or_false(p: &MultiPoly, q: &MultiPoly, tol: f64) -> bool {
    poly_distance(p, q).is_some_and(|d| d <= tol)
}

/// Relative coefficient distance between the determinantal polynomials of
/// the same pencil evaluated on two tuples, one entry per pencil.
pub fn pencil_distances(t1: &GeneratorTuple, t2: &GeneratorTuple, pencils: &[Vec<PencilExpr>]) -> Result<Vec<f64>> {
    if t1.n != t2.n {
        return Err(Error::DimensionMismatch { expected: t1.n, got: t2.n });
    }
    pencils
        .iter()
        .map(|exprs| {
            let vars = MultiPoly::default_vars(exprs.len());
            let p = det_pencil(&eval_pencil(exprs, t1), &vars)?;
            let q = det_pencil(&eval_pencil(exprs, t2), &vars)?;
            Ok(poly_distance(&p, &q).expect("same variables"))
        })
        .collect()
}

/// Equality of the determinantal polynomials, one flag per pencil.
pub fn spectra_equal(
    t1: &GeneratorTuple,
    t2: &GeneratorTuple,
    pencils: &[Vec<PencilExpr>],
    tol: f64,
) -> Result<Vec<bool>> {
    Ok(pencil_distances(t1, t2, pencils)?.into_iter().map(|d| d <= tol).collect())
}

/// Whether `det(x_1 a1 + x_2 a2 - I)` involves `x_2` once coefficients
/// below `1e-10` of the largest are discarded.
pub fn x2_dependence(a1: &ComplexMatrix, a2: &ComplexMatrix) -> Result<bool> {
    let p = det_pencil(&[a1, a2], &MultiPoly::default_vars(2))?.pruned(1e-10);
    Ok(p.var_degree(1) > 0)
}
