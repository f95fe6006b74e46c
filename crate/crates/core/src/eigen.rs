//! Cyclic Jacobi eigensolver for Hermitian matrices, joint diagonalisation of
//! commuting Hermitian families, and spectral projections of normal matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{normality_defect, ComplexMatrix};

const MAX_SWEEPS: usize = 60;

/// Eigenvalues in ascending order with unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Eigen-decomposition of a normal matrix.
#[derive(Debug, Clone)]
pub struct NormalEig {
    pub values: Vec<Complex64>,
    pub vectors: ComplexMatrix,
}

/// Common eigenbasis of a commuting Hermitian family.
#[derive(Debug, Clone)]
pub struct JointEig {
    /// Orthonormal columns, ordered by the first matrix's clusters, then the
    /// second's inside each cluster, and so on.
    pub vectors: ComplexMatrix,
    /// `values[m][j] = v_j* M_m v_j`.
    pub values: Vec<Vec<f64>>,
    /// Groups of columns that no matrix in the family separates.
    pub unresolved: Vec<Vec<usize>>,
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Fails if `||a - a*||_HS > tol ||a||_HS`.
pub fn hermitian_eig(a: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition> {
    let defect = a.hs_distance(&a.adjoint());
    if defect > tol * a.hs_norm() {
        return Err(Error::NotHermitian { defect: defect / a.scale() });
    }
    let (values, vectors) = jacobi(&a.hermitian_part());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let cols: Vec<Vec<Complex64>> = order.iter().map(|&j| normalize_phase(vectors.column(j))).collect();
    Ok(EigenDecomposition {
        values: order.iter().map(|&j| values[j]).collect(),
        vectors: ComplexMatrix::from_columns(&cols)?,
    })
}

/// Jacobi on a Hermitian matrix; returns unsorted eigenvalues and the
/// accumulated unitary.
fn jacobi(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.n();
    let mut m = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let norm = a.hs_norm();
    for _ in 0..MAX_SWEEPS {
        let off = m.off_diagonal_norm();
        if off == 0.0 || off <= 1e-3 * f64::EPSILON * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    ((0..n).map(|i| m[(i, i)].re).collect(), v)
}

/// One complex Jacobi rotation annihilating `m[p][q]`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
    // negligible against both diagonal entries; also keeps subnormals out
    if r == 0.0 || (app.abs() + 100.0 * r == app.abs() && aqq.abs() + 100.0 * r == aqq.abs()) {
        return;
    }
    let n = m.n();
    let theta = (aqq - app) / (2.0 * r);
    let t =
        if theta.abs() > 1e150 { 0.5 / theta } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase = Complex64::from_polar(1.0, -apq.arg());
    let (gpp, gpq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
    let (gqp, gqq) = (phase * -s, phase * c);

    for k in 0..n {
        let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = mkp * gpp + mkq * gqp;
        m[(k, q)] = mkp * gpq + mkq * gqq;
    }
    for k in 0..n {
        let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = gpp.conj() * mpk + gqp.conj() * mqk;
        m[(q, k)] = gpq.conj() * mpk + gqq.conj() * mqk;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(app - t * r, 0.0);
    m[(q, q)] = Complex64::new(aqq + t * r, 0.0);
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

/// Rotates a vector so its largest-modulus component is real and positive.
pub(crate) fn normalize_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let (mut best, mut idx) = (0.0, 0);
    for (i, z) in v.iter().enumerate() {
        // prefer the first index among near-ties so the choice is stable
        if z.norm() > best * (1.0 + 1e-9) {
            best = z.norm();
            idx = i;
        }
    }
    if best > 0.0 {
        let ph = (v[idx] / best).conj();
        for z in v.iter_mut() {
            *z *= ph;
        }
    }
    v
}

/// Partitions ascending values into runs whose consecutive gaps are at most
/// `threshold`.
pub fn cluster_sorted(values: &[f64], threshold: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > threshold {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Single-linkage clustering of complex values at `threshold`; groups are
/// ordered by first member.
pub fn cluster_complex(values: &[Complex64], threshold: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= threshold {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut label, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Common eigenbasis of commuting Hermitian matrices by cluster refinement:
/// diagonalise the first matrix, then inside every eigenvalue cluster (gap
/// `<= tol * max(1, ||M||_HS)`) diagonalise the compression of the next one.
///
/// Only the Hermitian part of each matrix is used; commutativity is not
/// checked here.
pub fn joint_diagonalize(mats: &[&ComplexMatrix], tol: f64) -> Result<JointEig> {
    let Some(first) = mats.first() else {
        return Err(Error::InvalidParameter("empty matrix family".into()));
    };
    let n = first.n();
    if let Some(m) = mats.iter().find(|m| m.n() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: m.n() });
    }
    let herm: Vec<ComplexMatrix> = mats.iter().map(|m| m.hermitian_part()).collect();
    let identity: Vec<Vec<Complex64>> = (0..n).map(|j| ComplexMatrix::identity(n).column(j)).collect();
    let mut vectors = Vec::with_capacity(n);
    let mut unresolved = Vec::new();
    refine(&herm, 0, identity, tol, &mut vectors, &mut unresolved);

    let vectors: Vec<Vec<Complex64>> = vectors.into_iter().map(normalize_phase).collect();
    let values = herm.iter().map(|m| vectors.iter().map(|v| quadratic_form(m, v).re).collect()).collect();
    Ok(JointEig { vectors: ComplexMatrix::from_columns(&vectors)?, values, unresolved })
}

fn refine(
    mats: &[ComplexMatrix],
    level: usize,
    basis: Vec<Vec<Complex64>>,
    tol: f64,
    out: &mut Vec<Vec<Complex64>>,
    unresolved: &mut Vec<Vec<usize>>,
) {
    if basis.len() == 1 {
        out.extend(basis);
        return;
    }
    if level == mats.len() {
        let start = out.len();
        unresolved.push((start..start + basis.len()).collect());
        out.extend(basis);
        return;
    }
    let m = &mats[level];
    let k = basis.len();
    // compression B* M B
    let mb: Vec<Vec<Complex64>> = basis.iter().map(|b| mat_vec(m, b)).collect();
    let mut comp = ComplexMatrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            comp[(i, j)] = dot(&basis[i], &mb[j]);
        }
    }
    let (vals, vecs) = jacobi(&comp.hermitian_part());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    for range in cluster_sorted(&sorted, tol * m.scale()) {
        let sub: Vec<Vec<Complex64>> = order[range]
            .iter()
            .map(|&c| {
                let mut v = vec![Complex64::new(0.0, 0.0); basis[0].len()];
                for (r, b) in basis.iter().enumerate() {
                    let w = vecs[(r, c)];
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi += w * bi;
                    }
                }
                v
            })
            .collect();
        refine(mats, level + 1, sub, tol, out, unresolved);
    }
}

fn mat_vec(m: &ComplexMatrix, v: &[Complex64]) -> Vec<Complex64> {
    m.rows().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `<u, v>` with the first argument conjugated.
fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn quadratic_form(m: &ComplexMatrix, v: &[Complex64]) -> Complex64 {
    dot(v, &mat_vec(m, v))
}

/// Eigen-decomposition of a normal matrix through the commuting pair
/// `(A + A*)/2`, `(A - A*)/2i`. Fails if the normality defect exceeds `tol`.
pub fn normal_eig(a: &ComplexMatrix, tol: f64) -> Result<NormalEig> {
    let defect = normality_defect(a);
    if defect > tol {
        return Err(Error::NotNormal { defect });
    }
    let re = a.hermitian_part();
    let im = (a - &a.adjoint()).scaled(Complex64::new(0.0, -0.5));
    let joint = joint_diagonalize(&[&re, &im], tol)?;
    let values = joint.values[0].iter().zip(&joint.values[1]).map(|(&x, &y)| Complex64::new(x, y)).collect();
    Ok(NormalEig { values, vectors: joint.vectors })
}

/// Orthogonal projection onto the eigenspace of a normal matrix at `lambda`.
/// Eigenvalues within `tol * max(1, ||a||_HS)` of each other are treated as
/// one spectral point.
pub fn spectral_projection(a: &ComplexMatrix, lambda: Complex64, tol: f64) -> Result<ComplexMatrix> {
    let eig = normal_eig(a, tol)?;
    let thresh = tol * a.scale();
    let group = cluster_complex(&eig.values, thresh)
        .into_iter()
        .find(|g| g.iter().any(|&j| (eig.values[j] - lambda).norm() <= thresh))
        .ok_or(Error::NotAnEigenvalue { value: lambda })?;
    Ok(projector(&eig.vectors, &group))
}

/// All spectral points with their projections, in cluster order.
pub fn spectral_projections(a: &ComplexMatrix, tol: f64) -> Result<Vec<(Complex64, ComplexMatrix)>> {
    let eig = normal_eig(a, tol)?;
    Ok(cluster_complex(&eig.values, tol * a.scale())
        .into_iter()
        .map(|g| {
            let mean = g.iter().map(|&j| eig.values[j]).sum::<Complex64>() / g.len() as f64;
            (mean, projector(&eig.vectors, &g))
        })
        .collect())
}

fn projector(vectors: &ComplexMatrix, cols: &[usize]) -> ComplexMatrix {
    let n = vectors.n();
    let mut p = ComplexMatrix::zeros(n);
    for &c in cols {
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] += vectors[(i, c)] * vectors[(j, c)].conj();
            }
        }
    }
    p
}
