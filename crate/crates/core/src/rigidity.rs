//! Spectral rigidity: check that a tuple `(A1, A2, A3)` has the pairwise
//! joint spectra of the reference generators, then rebuild the diagonal
//! unitary `Λ̃` with `(A1, A2, A3) = Λ̃ (H, E, F) Λ̃*` in an eigenbasis of
//! `A1`, or say which step broke.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{joint_diagonalize, normal_eig, NormalEig};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::generators::{sl2_generators, snu2_generators, Family, GeneratorTuple};
use crate::matrix::{normality_defect, ComplexMatrix};
use crate::pencil::{parse_pencil, PencilExpr};
use crate::polynomial::{poly_distance, LinearForm, MultiPoly};
use crate::spectrum::{det_pencil_with, x2_dependence};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equivalent,
    HypothesisFailed,
    ReconstructionFailed,
}

impl Verdict {
    /// Process exit code used by the CLI.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Equivalent => 0,
            Verdict::HypothesisFailed => 2,
            Verdict::ReconstructionFailed => 3,
        }
    }
}

/// Stages of the reconstruction, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Hypothesis,
    /// Eigenbasis of `A1` in the order of the reference diagonal.
    Diagonalize,
    /// Gram matrices `A2A2*`, `A2*A2`, ... diagonal in that basis.
    Gram,
    /// `A2` confined to the superdiagonal with the reference moduli.
    A2Support,
    /// `A3` confined to the subdiagonal with the reference moduli.
    A3Support,
    /// Phases of `A3` agree with those read from `A2`.
    Phases,
    /// Spectral compressions of `A2A3` on its simple lines.
    Compression,
    /// Hilbert-Schmidt budget of `A3`.
    HsBudget,
    Certify,
}

impl Step {
    /// Position in the five-stage outline: hypotheses are 0, the basis 1,
    /// Gram matrices 2, `A2` 3, `A3` and its phases 4, certification 5.
    pub fn number(self) -> u8 {
        match self {
            Step::Hypothesis => 0,
            Step::Diagonalize => 1,
            Step::Gram => 2,
            Step::A2Support => 3,
            Step::A3Support | Step::Phases | Step::Compression | Step::HsBudget => 4,
            Step::Certify => 5,
        }
    }
}

/// One structured finding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub step: Step,
    /// Short machine-readable code such as `a2_support_off_superdiagonal`.
    pub finding: String,
    pub message: String,
    /// Offending entries `(row, column)` in the constructed basis.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl Diagnostic {
    fn new(step: Step, finding: &str, message: impl Into<String>) -> Self {
        Diagnostic { step, finding: finding.into(), message: message.into(), entries: Vec::new(), value: None }
    }

    fn at(mut self, entries: Vec<(usize, usize)>) -> Self {
        self.entries = entries;
        self
    }

    fn value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub verdict: Verdict,
    pub family: Family,
    pub n: usize,
    #[serde(default)]
    pub nu: Option<f64>,
    pub tol: f64,
    /// `Λ̃`: diagonal, unitary, first entry 1. Present iff equivalent.
    #[serde(default)]
    pub witness: Option<ComplexMatrix>,
    /// `W = V Λ̃` with `A_i = W R_i W*`, `V` the ordered eigenbasis of `A1`.
    #[serde(default)]
    pub global_witness: Option<ComplexMatrix>,
    /// Relative residual of the final certification.
    #[serde(default)]
    pub certified_residual: Option<f64>,
    #[serde(default)]
    pub failed_step: Option<Step>,
    /// Pencil name (and `normality`) to relative residual.
    pub condition_residuals: BTreeMap<String, f64>,
    pub diagnostics: Vec<Diagnostic>,
}

impl RigidityReport {
    fn start(r: &Reference, tol: f64) -> Self {
        RigidityReport {
            verdict: Verdict::ReconstructionFailed,
            family: r.family,
            n: r.n(),
            nu: r.tuple.nu,
            tol,
            witness: None,
            global_witness: None,
            certified_residual: None,
            failed_step: None,
            condition_residuals: BTreeMap::new(),
            diagnostics: Vec::new(),
        }
    }

    fn fail(mut self, verdict: Verdict, d: Diagnostic) -> Self {
        self.verdict = verdict;
        self.failed_step = Some(d.step);
        self.diagnostics.push(d);
        self.witness = None;
        self.global_witness = None;
        self
    }
}

struct Condition {
    name: String,
    expr: PencilExpr,
    /// Variable scalings `1/max(1, ||H||)` and `1/max(1, ||M||)` taken from
    /// the reference. Comparing `p(x1 s1, x2 s2)` keeps every bidegree on
    /// the same footing when the two matrices differ by orders of magnitude.
    scales: (f64, f64),
    poly: MultiPoly,
}

fn scaled_pencil(a1: &ComplexMatrix, m: &ComplexMatrix, (s1, s2): (f64, f64), vars: &[String]) -> Result<MultiPoly> {
    let a = a1.scaled(Complex64::new(s1, 0.0));
    let b = m.scaled(Complex64::new(s2, 0.0));
    det_pencil_with(Exec::Sequential, &[&a, &b], vars)
}

/// The reference generators with their pencil polynomials precomputed, for
/// checking many tuples against the same `(n, ν)`.
pub struct Reference {
    pub family: Family,
    pub tuple: GeneratorTuple,
    conditions: Vec<Condition>,
    /// `(name, expression, reference matrix)` of the Gram matrices used to
    /// split eigenspaces of `A1`.
    grams: Vec<(String, PencilExpr, ComplexMatrix)>,
}

const SNU2_PENCILS: [(&str, &str); 5] = [
    ("A1,A2A2*", "A2 A2^H"),
    ("A1,A2*A2", "A2^H A2"),
    ("A1,A3A3*", "A3 A3^H"),
    ("A1,A3*A3", "A3^H A3"),
    ("A1,A2A3", "A2 A3"),
];

const SL2_PENCILS: [(&str, &str); 4] =
    [("A1,A2A2*", "A2 A2^H"), ("A1,A2*A2", "A2^H A2"), ("A1,A3A3*", "A3 A3^H"), ("A1,A2A3", "A2 A3")];

impl Reference {
    pub fn snu2(n: usize, nu: f64) -> Result<Self> {
        Self::build(snu2_generators(n, nu)?, &SNU2_PENCILS)
    }

    pub fn sl2(n: usize) -> Result<Self> {
        Self::build(sl2_generators(n)?, &SL2_PENCILS)
    }

    /// `snu2` needs `nu`; `sl2` ignores it.
    pub fn for_family(family: Family, n: usize, nu: Option<f64>) -> Result<Self> {
        match family {
            Family::Snu2 => Self::snu2(n, nu.ok_or_else(|| Error::InvalidParameter("snu2 reference needs nu".into()))?),
            Family::Sl2 => Self::sl2(n),
            other => Err(Error::Unsupported(format!("no rigidity theorem for family '{other}'"))),
        }
    }

    fn build(tuple: GeneratorTuple, pencils: &[(&str, &str)]) -> Result<Self> {
        let vars = MultiPoly::default_vars(2);
        let mut conditions = Vec::new();
        let mut grams = Vec::new();
        for &(name, src) in pencils {
            let expr = parse_pencil(src)?.remove(0);
            let m = expr.eval_tuple(&tuple);
            let scales = (1.0 / tuple.h.scale(), 1.0 / m.scale());
            let poly = scaled_pencil(&tuple.h, &m, scales, &vars)?;
            if name != "A1,A2A3" {
                grams.push((name.trim_start_matches("A1,").to_string(), expr.clone(), m));
            }
            conditions.push(Condition { name: name.to_string(), expr, scales, poly });
        }
        Ok(Reference { family: tuple.family, tuple, conditions, grams })
    }

    pub fn n(&self) -> usize {
        self.tuple.n
    }

    /// Names of the pencils compared by [`verify_conditions`].
    pub fn condition_names(&self) -> Vec<&str> {
        self.conditions.iter().map(|c| c.name.as_str()).collect()
    }
}

/// Result of the hypothesis check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub normality_defect: f64,
    pub normal: bool,
    /// `(name, holds, relative coefficient distance)`; empty when `A1` is
    /// not normal.
    pub pencils: Vec<(String, bool, f64)>,
}

impl HypothesisCheck {
    pub fn holds(&self) -> bool {
        self.normal && self.pencils.iter().all(|p| p.1)
    }
}

fn check_dims(t: &GeneratorTuple, r: &Reference) -> Result<()> {
    if t.n != r.n() {
        return Err(Error::DimensionMismatch { expected: r.n(), got: t.n });
    }
    Ok(())
}

/// `A1` normal and every reference pencil polynomial matched within `tol`,
/// compared in variables normalized by the reference matrix norms.
pub fn verify_conditions(t: &GeneratorTuple, r: &Reference, tol: f64) -> Result<HypothesisCheck> {
    check_dims(t, r)?;
    let defect = normality_defect(&t.h);
    let mut check = HypothesisCheck { normality_defect: defect, normal: defect <= tol, pencils: Vec::new() };
    if !check.normal {
        return Ok(check);
    }
    let vars = MultiPoly::default_vars(2);
    for c in &r.conditions {
        let m = c.expr.eval_tuple(t);
        let p = scaled_pencil(&t.h, &m, c.scales, &vars)?;
        let d = poly_distance(&p, &c.poly).expect("same variables");
        check.pencils.push((c.name.clone(), d <= tol, d));
    }
    Ok(check)
}

pub fn verify_conditions_snu2(t: &GeneratorTuple, n: usize, nu: f64, tol: f64) -> Result<HypothesisCheck> {
    verify_conditions(t, &Reference::snu2(n, nu)?, tol)
}

pub fn verify_conditions_sl2(t: &GeneratorTuple, n: usize, tol: f64) -> Result<HypothesisCheck> {
    verify_conditions(t, &Reference::sl2(n)?, tol)
}

/// Hypothesis check followed by reconstruction.
pub fn reconstruct(t: &GeneratorTuple, r: &Reference, tol: f64) -> Result<RigidityReport> {
    let check = verify_conditions(t, r, tol)?;
    let mut report = RigidityReport::start(r, tol);
    report.condition_residuals.insert("normality".into(), check.normality_defect);
    if !check.normal {
        let d = Diagnostic::new(Step::Hypothesis, "a1_not_normal", "A1 is not normal").value(check.normality_defect);
        return Ok(report.fail(Verdict::HypothesisFailed, d));
    }
    for (name, _, dist) in &check.pencils {
        report.condition_residuals.insert(name.clone(), *dist);
    }
    if let Some((name, _, dist)) = check.pencils.iter().find(|p| !p.1) {
        let d = Diagnostic::new(
            Step::Hypothesis,
            "pencil_mismatch",
            format!("joint spectrum of ({name}) differs from the reference"),
        )
        .value(*dist);
        return Ok(report.fail(Verdict::HypothesisFailed, d));
    }
    Ok(rebuild(t, r, tol, report))
}

pub fn reconstruct_snu2(t: &GeneratorTuple, n: usize, nu: f64, tol: f64) -> Result<RigidityReport> {
    reconstruct(t, &Reference::snu2(n, nu)?, tol)
}

pub fn reconstruct_sl2(t: &GeneratorTuple, n: usize, tol: f64) -> Result<RigidityReport> {
    reconstruct(t, &Reference::sl2(n)?, tol)
}

/// Runs only the reconstruction steps, skipping the hypothesis check. Useful
/// to see which structural step a tuple breaks.
pub fn reconstruct_structure(t: &GeneratorTuple, r: &Reference, tol: f64) -> Result<RigidityReport> {
    check_dims(t, r)?;
    Ok(rebuild(t, r, tol, RigidityReport::start(r, tol)))
}

/// [`reconstruct`] over many tuples; results are in input order.
pub fn reconstruct_batch(
    exec: Exec,
    tuples: &[GeneratorTuple],
    r: &Reference,
    tol: f64,
) -> Result<Vec<RigidityReport>> {
    exec.map(tuples.len(), |i| reconstruct(&tuples[i], r, tol)).into_iter().collect()
}

fn zero_threshold(m: &ComplexMatrix, tol: f64) -> f64 {
    tol * m.scale()
}

/// Entries `(i, j)` with `|m_ij| > thr` outside the allowed pattern.
fn stray_entries(m: &ComplexMatrix, thr: f64, allowed: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
    let n = m.n();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !allowed(i, j) && m[(i, j)].norm() > thr)
        .collect()
}

/// Greedy matching of joint eigenvalues to reference diagonal positions,
/// cheapest pair first.
fn assign(values: &[Vec<f64>], reference: &[Vec<f64>]) -> Vec<usize> {
    let n = values.len();
    let mut pairs = Vec::with_capacity(n * n);
    for (j, v) in values.iter().enumerate() {
        for (k, r) in reference.iter().enumerate() {
            let cost: f64 = v.iter().zip(r).map(|(a, b)| (a - b).abs() / b.abs().max(1.0)).sum();
            pairs.push((cost, j, k));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut col_of = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, j, k) in pairs {
        if !taken[j] && col_of[k] == usize::MAX {
            taken[j] = true;
            col_of[k] = j;
        }
    }
    col_of
}

fn rebuild(t: &GeneratorTuple, r: &Reference, tol: f64, mut report: RigidityReport) -> RigidityReport {
    let n = r.n();
    let rt = &r.tuple;
    let [a1, a2, a3] = t.slots();

    // 1. ordered eigenbasis of A1, split further by the Gram matrices
    let re = a1.hermitian_part();
    let im = (a1 - &a1.adjoint()).scaled(Complex64::new(0.0, -0.5));
    let t_grams: Vec<ComplexMatrix> = r.grams.iter().map(|g| g.1.eval_tuple(t)).collect();
    let mut family = vec![&re, &im];
    family.extend(t_grams.iter());
    let joint = match joint_diagonalize(&family, tol) {
        Ok(j) => j,
        Err(e) => {
            return report
                .fail(Verdict::ReconstructionFailed, Diagnostic::new(Step::Diagonalize, "eigensolver", e.to_string()))
        }
    };
    if let Some(group) = joint.unresolved.first() {
        let d = Diagnostic::new(
            Step::Diagonalize,
            "unresolved_eigenspace",
            format!("{} eigenvectors of A1 are not separated by the Gram matrices", group.len()),
        )
        .at(group.iter().map(|&c| (c, c)).collect());
        return report.fail(Verdict::ReconstructionFailed, d);
    }
    let ref_family: Vec<ComplexMatrix> =
        [rt.h.hermitian_part(), (&rt.h - &rt.h.adjoint()).scaled(Complex64::new(0.0, -0.5))]
            .into_iter()
            .chain(r.grams.iter().map(|g| g.2.clone()))
            .collect();
    let values: Vec<Vec<f64>> = (0..n).map(|j| joint.values.iter().map(|v| v[j]).collect()).collect();
    let ref_values: Vec<Vec<f64>> = (0..n).map(|k| ref_family.iter().map(|m| m[(k, k)].re).collect()).collect();
    let col_of = assign(&values, &ref_values);
    let cols: Vec<Vec<Complex64>> = col_of.iter().map(|&j| joint.vectors.column(j)).collect();
    let v = ComplexMatrix::from_columns(&cols).expect("square basis");
    let vh = v.adjoint();
    let b1 = a1.conjugate_by(&vh);
    let b2 = a2.conjugate_by(&vh);
    let b3 = a3.conjugate_by(&vh);

    let thr1 = zero_threshold(a1, tol);
    let off = stray_entries(&b1, thr1, |i, j| i == j);
    let moved: Vec<(usize, usize)> =
        (0..n).filter(|&k| (b1[(k, k)] - rt.h[(k, k)]).norm() > thr1).map(|k| (k, k)).collect();
    if !off.is_empty() || !moved.is_empty() {
        let d = Diagnostic::new(
            Step::Diagonalize,
            "a1_spectrum_mismatch",
            "A1 does not match the reference diagonal in its eigenbasis",
        )
        .at(if moved.is_empty() { off } else { moved });
        return report.fail(Verdict::ReconstructionFailed, d);
    }

    // 2. Gram matrices diagonal in this basis
    for (name, expr, _) in &r.grams {
        let g = expr.eval([&b1, &b2, &b3]);
        let stray = stray_entries(&g, zero_threshold(&g, tol), |i, j| i == j);
        if !stray.is_empty() {
            let d = Diagnostic::new(
                Step::Gram,
                "gram_not_diagonal",
                format!("{name} is not diagonal in the eigenbasis of A1"),
            )
            .at(stray);
            return report.fail(Verdict::ReconstructionFailed, d);
        }
    }

    // 3. A2 = Λ E
    let thr2 = zero_threshold(a2, tol);
    let edge: Vec<(usize, usize)> = stray_entries(&b2, thr2, |i, j| j != 0 && i != n - 1);
    let stray = if edge.is_empty() { stray_entries(&b2, thr2, |i, j| j == i + 1) } else { edge.clone() };
    if !stray.is_empty() {
        let (finding, what) = if edge.is_empty() {
            ("a2_support_off_superdiagonal", "A2 has mass off the superdiagonal")
        } else {
            ("a2_first_column_or_last_row", "the first column or last row of A2 is not zero")
        };
        report.diagnostics.push(Diagnostic::new(Step::A2Support, finding, what).at(stray.clone()));
        let d = match x2_dependence(&b1, &b2) {
            Ok(true) => Diagnostic::new(
                Step::A2Support,
                "x2_dependence",
                "x2_dependence detected: det(x1 A1 + x2 A2 - I) involves x2",
            ),
            Ok(false) => Diagnostic::new(
                Step::A2Support,
                "x2_free",
                "det(x1 A1 + x2 A2 - I) is free of x2 despite the stray mass",
            ),
            Err(e) => Diagnostic::new(Step::A2Support, "x2_dependence_error", e.to_string()),
        };
        return report.fail(Verdict::ReconstructionFailed, d);
    }
    let moduli: Vec<(usize, usize)> = (1..n)
        .filter(|&k| (b2[(k - 1, k)].norm() - rt.e[(k - 1, k)].norm()).abs() > thr2)
        .map(|k| (k - 1, k))
        .collect();
    if !moduli.is_empty() {
        let worst = moduli.iter().map(|&(i, j)| (b2[(i, j)].norm() - rt.e[(i, j)].norm()).abs()).fold(0.0, f64::max);
        let d = Diagnostic::new(
            Step::A2Support,
            "a2_modulus_mismatch",
            "superdiagonal moduli of A2 differ from the reference",
        )
        .at(moduli)
        .value(worst);
        return report.fail(Verdict::ReconstructionFailed, d);
    }
    // rho[k] = phase of A2[k-1][k] relative to E, k = 1..n-1
    let mut rho = vec![Complex64::new(1.0, 0.0); n];
    for k in 1..n {
        let z = b2[(k - 1, k)] / rt.e[(k - 1, k)];
        rho[k] = z / z.norm();
    }

    // 4. A3
    let thr3 = zero_threshold(a3, tol);
    let expected_a3 = |k: usize| rho[k + 1].conj() * rt.f[(k + 1, k)];
    match r.family {
        Family::Sl2 => {
            if let Err(d) = sl2_a3(a1, a2, a3, &b2, &b3, &rho, tol) {
                return report.fail(Verdict::ReconstructionFailed, d);
            }
        }
        _ => {
            let stray = stray_entries(&b3, thr3, |i, j| i == j + 1);
            if !stray.is_empty() {
                let d =
                    Diagnostic::new(Step::A3Support, "a3_support_off_subdiagonal", "A3 has mass off the subdiagonal")
                        .at(stray);
                return report.fail(Verdict::ReconstructionFailed, d);
            }
            let moduli: Vec<(usize, usize)> = (0..n - 1)
                .filter(|&k| (b3[(k + 1, k)].norm() - rt.f[(k + 1, k)].norm()).abs() > thr3)
                .map(|k| (k + 1, k))
                .collect();
            if !moduli.is_empty() {
                let d = Diagnostic::new(
                    Step::A3Support,
                    "a3_modulus_mismatch",
                    "subdiagonal moduli of A3 differ from the reference",
                )
                .at(moduli);
                return report.fail(Verdict::ReconstructionFailed, d);
            }
            let phases: Vec<(usize, usize)> =
                (0..n - 1).filter(|&k| (b3[(k + 1, k)] - expected_a3(k)).norm() > thr3).map(|k| (k + 1, k)).collect();
            if !phases.is_empty() {
                let d =
                    Diagnostic::new(Step::Phases, "phase_mismatch", "phases of A3 disagree with those of A2 (Λ ≠ Σ)")
                        .at(phases);
                return report.fail(Verdict::ReconstructionFailed, d);
            }
        }
    }

    // 5. Λ̃ and certification
    let mut d = vec![Complex64::new(1.0, 0.0); n];
    for k in 1..n {
        d[k] = d[k - 1] * rho[k].conj();
    }
    let lambda = ComplexMatrix::from_diag(&d);
    let w = &v * &lambda;
    match certify_equivalence(t, rt, &w, tol) {
        Ok(res) if res <= tol => {
            report.verdict = Verdict::Equivalent;
            report.certified_residual = Some(res);
            report.witness = Some(lambda);
            report.global_witness = Some(w);
            report
        }
        Ok(res) => {
            report.certified_residual = Some(res);
            let d = Diagnostic::new(
                Step::Certify,
                "certification_residual",
                "the reconstructed witness does not reproduce the tuple",
            )
            .value(res);
            report.fail(Verdict::ReconstructionFailed, d)
        }
        Err(e) => report
            .fail(Verdict::ReconstructionFailed, Diagnostic::new(Step::Certify, "witness_not_unitary", e.to_string())),
    }
}

/// The `sl(2)` route for `A3`: compressions of `A2A3` onto the simple lines
/// `(n-1-2j) x1 + (j+1)(n-1-j) x2 = 1` pin the subdiagonal, and the budget
/// `||A3||_HS² = n - 1` leaves nothing for the other entries.
fn sl2_a3(
    a1: &ComplexMatrix,
    a2: &ComplexMatrix,
    a3: &ComplexMatrix,
    b2: &ComplexMatrix,
    b3: &ComplexMatrix,
    rho: &[Complex64],
    tol: f64,
) -> std::result::Result<(), Diagnostic> {
    let n = a1.n();
    let prod = a2 * a3;
    let pencil = Compressor::new(a1, &prod, tol)
        .map_err(|e| Diagnostic::new(Step::Compression, "compression_setup", e.to_string()))?;
    let thr3 = zero_threshold(a3, tol);
    for j in 0..n - 1 {
        let lambda = n as f64 - 1.0 - 2.0 * j as f64;
        let mu = ((j + 1) * (n - 1 - j)) as f64;
        match pencil.check(Complex64::new(lambda, 0.0), Complex64::new(mu, 0.0)) {
            Ok(true) => {}
            Ok(false) => {
                return Err(Diagnostic::new(
                    Step::Compression,
                    "compression_mismatch",
                    format!("P A2A3 P != {mu} P on line {j}"),
                )
                .at(vec![(j, j)]))
            }
            Err(e) => {
                return Err(Diagnostic::new(Step::Compression, "compression_line", e.to_string()).at(vec![(j, j)]))
            }
        }
        // the compression reads b2[j][j+1] b3[j+1][j] = mu, so b3[j+1][j] = conj(rho[j+1])
        let pinned = Complex64::new(mu, 0.0) / b2[(j, j + 1)];
        if (b3[(j + 1, j)] - pinned).norm() > thr3 || (pinned - rho[j + 1].conj()).norm() > thr3 {
            return Err(Diagnostic::new(
                Step::Compression,
                "a3_subdiagonal_mismatch",
                "A3 subdiagonal disagrees with the compression",
            )
            .at(vec![(j + 1, j)]));
        }
    }
    let total = a3.hs_norm().powi(2);
    let budget = (n - 1) as f64;
    let stray = stray_entries(b3, thr3, |i, j| i == j + 1);
    if (total - budget).abs() > thr3 * budget.sqrt() || !stray.is_empty() {
        return Err(Diagnostic::new(
            Step::HsBudget,
            "hs_budget_violation",
            format!("||A3||_HS^2 = {total}, expected {budget}"),
        )
        .at(stray)
        .value(total));
    }
    Ok(())
}

/// Shared state for repeated compressions against one pencil.
struct Compressor<'a> {
    a1: &'a ComplexMatrix,
    b: &'a ComplexMatrix,
    poly: MultiPoly,
    eig: NormalEig,
    tol: f64,
}

impl<'a> Compressor<'a> {
    fn new(a1: &'a ComplexMatrix, b: &'a ComplexMatrix, tol: f64) -> Result<Self> {
        let poly = det_pencil_with(Exec::Sequential, &[a1, b], &MultiPoly::default_vars(2))?;
        let eig = normal_eig(a1, tol)?;
        Ok(Compressor { a1, b, poly, eig, tol })
    }

    fn check(&self, lambda: Complex64, mu: Complex64) -> Result<bool> {
        let line = LinearForm::new(vec![lambda, mu], Complex64::new(-1.0, 0.0))?;
        let scale = self.poly.max_abs_coeff().max(1.0);
        let (q, rem) = self.poly.divide_linear(&line)?;
        let rem_rel = rem.max_abs_coeff() / scale;
        if rem_rel > self.tol {
            return Err(Error::LineNotInSpectrum { line: line.to_string(), remainder: rem_rel });
        }
        let (_, rem2) = q.divide_linear(&line)?;
        if rem2.max_abs_coeff() <= self.tol * q.max_abs_coeff().max(1.0) {
            return Err(Error::MultipleLine { line: line.to_string(), multiplicity: 2 });
        }
        let thr = self.tol * self.a1.scale();
        let cols: Vec<usize> = (0..self.a1.n()).filter(|&j| (self.eig.values[j] - lambda).norm() <= thr).collect();
        if cols.is_empty() {
            return Err(Error::NotAnEigenvalue { value: lambda });
        }
        let p = projector(&self.eig.vectors, &cols);
        let pbp = &(&p * self.b) * &p;
        Ok((&pbp - &p.scaled(mu)).hs_norm() <= self.tol * self.b.scale())
    }
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

/// Whether `P_λ b P_λ = μ P_λ` for the spectral projection of `a1` at `λ`,
/// after confirming that `λ x1 + μ x2 = 1` is a simple line of
/// `det(x1 a1 + x2 b - I)`.
pub fn compression_check(
    a1: &ComplexMatrix,
    b: &ComplexMatrix,
    lambda: Complex64,
    mu: Complex64,
    tol: f64,
) -> Result<bool> {
    if a1.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a1.n(), got: b.n() });
    }
    Compressor::new(a1, b, tol)?.check(lambda, mu)
}

/// `max_i ||t_i - w R_i w*||_HS / max(1, ||R_i||_HS)` over the three slots.
pub fn certify_equivalence(t: &GeneratorTuple, reference: &GeneratorTuple, w: &ComplexMatrix, tol: f64) -> Result<f64> {
    if t.n != reference.n || w.n() != t.n {
        return Err(Error::DimensionMismatch {
            expected: reference.n,
            got: if t.n != reference.n { t.n } else { w.n() },
        });
    }
    let defect = (w * &w.adjoint()).hs_distance(&ComplexMatrix::identity(w.n()));
    if defect > tol {
        return Err(Error::NotUnitary { defect });
    }
    Ok(t.slots()
        .iter()
        .zip(reference.slots())
        .map(|(a, r)| a.hs_distance(&r.conjugate_by(w)) / r.scale())
        .fold(0.0, f64::max))
}

/// Checks a witness for the shape promised by [`RigidityReport`]: diagonal,
/// unitary within `tol`, first entry 1.
pub fn witness_is_canonical(w: &ComplexMatrix, tol: f64) -> bool {
    let c = w.classify(tol);
    c.diagonal
        && c.unitary
        && (w[(0, 0)] - Complex64::new(1.0, 0.0)).norm() <= tol
        && w.as_slice().iter().all(|z| *z == ZERO || (z.norm() - 1.0).abs() <= tol)
}
