//! Sparse multivariate polynomials with complex coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients at or below this fraction of the largest one are dropped.
pub const PRUNE_REL: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

type Terms = BTreeMap<Vec<u32>, Complex64>;

/// Polynomial in named variables; terms keyed by exponent vectors in
/// lexicographic order.
#[derive(Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "crate::io::PolyJson", into = "crate::io::PolyJson")]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: Terms,
}

/// Ring operations selectable at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

/// `coeffs . x + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    coeffs: Vec<Complex64>,
    constant: Complex64,
}

impl MultiPoly {
    pub fn zero(vars: &[String]) -> Self {
        MultiPoly { vars: vars.to_vec(), terms: Terms::new() }
    }

    pub fn constant(vars: &[String], c: Complex64) -> Self {
        let mut terms = Terms::new();
        if c != ZERO {
            terms.insert(vec![0; vars.len()], c);
        }
        MultiPoly { vars: vars.to_vec(), terms }
    }

    /// The monomial `x_i`.
    pub fn var(vars: &[String], i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        MultiPoly { vars: vars.to_vec(), terms: [(e, Complex64::new(1.0, 0.0))].into() }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing
    /// repeated exponents and pruning.
    pub fn from_terms<I>(vars: &[String], terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        let mut map = Terms::new();
        for (e, c) in terms {
            if e.len() != vars.len() {
                return Err(Error::DimensionMismatch { expected: vars.len(), got: e.len() });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            *map.entry(e).or_insert(ZERO) += c;
        }
        Ok(MultiPoly { vars: vars.to_vec(), terms: map }.pruned(PRUNE_REL))
    }

    /// Variable names `x1..xk`.
    pub fn default_vars(k: usize) -> Vec<String> {
        (1..=k).map(|i| format!("x{i}")).collect()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: &[u32]) -> Complex64 {
        self.terms.get(exp).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Largest exponent of variable `i`. Panics if `i` is out of range.
    pub fn var_degree(&self, i: usize) -> u32 {
        assert!(i < self.vars.len(), "variable index {i} out of range");
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// Drops coefficients with `|c| <= rel * max|c|` (and exact zeros).
    pub fn pruned(mut self, rel: f64) -> Self {
        let cut = rel * self.max_abs_coeff();
        self.terms.retain(|_, c| *c != ZERO && c.norm() > cut);
        self
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch { left: self.vars.clone(), right: other.vars.clone() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        Ok(self.add_raw(other, Complex64::new(1.0, 0.0)).pruned(PRUNE_REL))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        Ok(self.add_raw(other, Complex64::new(-1.0, 0.0)).pruned(PRUNE_REL))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        Ok(self.mul_raw(other).pruned(PRUNE_REL))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let terms = self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect();
        MultiPoly { vars: self.vars.clone(), terms }.pruned(PRUNE_REL)
    }

    fn add_raw(&self, other: &Self, factor: Complex64) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            *terms.entry(e.clone()).or_insert(ZERO) += factor * c;
        }
        terms.retain(|_, c| *c != ZERO);
        MultiPoly { vars: self.vars.clone(), terms }
    }

    fn mul_raw(&self, other: &Self) -> Self {
        let mut terms = Terms::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *terms.entry(e).or_insert(ZERO) += ca * cb;
            }
        }
        terms.retain(|_, c| *c != ZERO);
        MultiPoly { vars: self.vars.clone(), terms }
    }

    /// Evaluates by nested Horner schemes, one variable at a time.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.vars.len() {
            return Err(Error::DimensionMismatch { expected: self.vars.len(), got: point.len() });
        }
        Ok(horner(&self.terms_vec(), 0, point))
    }

    /// Divides by a linear form with respect to its pivot variable (the one
    /// with the largest coefficient modulus, first on ties):
    /// `self = f * quotient + remainder` with the remainder free of the pivot.
    pub fn divide_linear(&self, f: &LinearForm) -> Result<(MultiPoly, MultiPoly)> {
        if f.coeffs.len() != self.vars.len() {
            return Err(Error::DimensionMismatch { expected: self.vars.len(), got: f.coeffs.len() });
        }
        let pivot = f.pivot().ok_or_else(|| Error::InvalidParameter("linear form has no variable part".into()))?;
        let lead = f.coeffs[pivot];
        let mut rest = f.to_poly(&self.vars)?;
        rest.terms.remove(&unit_exp(self.vars.len(), pivot));

        // slices of self by degree in the pivot variable
        let top = self.var_degree(pivot) as usize;
        let mut slices: Vec<MultiPoly> = vec![MultiPoly::zero(&self.vars); top + 1];
        for (e, c) in &self.terms {
            let mut e0 = e.clone();
            let d = std::mem::replace(&mut e0[pivot], 0) as usize;
            slices[d].terms.insert(e0, *c);
        }
        let mut quotient = MultiPoly::zero(&self.vars);
        for d in (1..=top).rev() {
            let q = slices[d].scale_raw(lead.inv());
            slices[d - 1] = slices[d - 1].add_raw(&rest.mul_raw(&q), Complex64::new(-1.0, 0.0));
            for (e, c) in q.terms {
                let mut e = e;
                e[pivot] = (d - 1) as u32;
                quotient.terms.insert(e, c);
            }
        }
        let remainder = std::mem::replace(&mut slices[0], MultiPoly::zero(&self.vars));
        Ok((quotient.pruned(PRUNE_REL), remainder.pruned(PRUNE_REL)))
    }

    fn scale_raw(&self, c: Complex64) -> Self {
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    /// Same polynomial with the variables renamed.
    pub fn with_vars(mut self, vars: &[String]) -> Result<Self> {
        if vars.len() != self.vars.len() {
            return Err(Error::DimensionMismatch { expected: self.vars.len(), got: vars.len() });
        }
        self.vars = vars.to_vec();
        Ok(self)
    }
}

fn unit_exp(k: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; k];
    e[i] = 1;
    e
}

impl MultiPoly {
    fn terms_vec(&self) -> Vec<(&[u32], Complex64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c)).collect()
    }
}

type Term<'a> = (&'a [u32], Complex64);

/// Terms must be sorted lexicographically and share the exponent prefix
/// `[..var]`.
fn horner(terms: &[Term], var: usize, x: &[Complex64]) -> Complex64 {
    if terms.is_empty() {
        return ZERO;
    }
    if var == x.len() {
        return terms.iter().map(|t| t.1).sum();
    }
    let mut groups: Vec<(u32, &[Term])> = Vec::new();
    let mut start = 0;
    for i in 1..=terms.len() {
        if i == terms.len() || terms[i].0[var] != terms[start].0[var] {
            groups.push((terms[start].0[var], &terms[start..i]));
            start = i;
        }
    }
    let mut acc = ZERO;
    let mut prev: Option<u32> = None;
    for (deg, group) in groups.iter().rev() {
        if let Some(p) = prev {
            acc *= x[var].powu(p - deg);
        }
        acc += horner(group, var + 1, x);
        prev = Some(*deg);
    }
    acc * x[var].powu(prev.unwrap_or(0))
}

/// Checked ring operation.
pub fn poly_arith(p: &MultiPoly, q: &MultiPoly, kind: PolyOp) -> Result<MultiPoly> {
    match kind {
        PolyOp::Add => p.add(q),
        PolyOp::Sub => p.sub(q),
        PolyOp::Mul => p.mul(q),
    }
}

/// Coefficientwise equality: every coefficient difference is at most
/// `tol * max(1, max|p|, max|q|)`. Different variable lists compare unequal.
pub fn poly_equal(p: &MultiPoly, q: &MultiPoly, tol: f64) -> bool {
    poly_distance(p, q).is_some_and(|d| d <= tol)
}

/// Largest coefficient difference divided by `max(1, max|p|, max|q|)`, or
/// `None` when the variable lists differ.
pub fn poly_distance(p: &MultiPoly, q: &MultiPoly) -> Option<f64> {
    if p.vars != q.vars {
        return None;
    }
    let scale = 1f64.max(p.max_abs_coeff()).max(q.max_abs_coeff());
    let mut worst: f64 = 0.0;
    for (e, c) in &p.terms {
        worst = worst.max((c - q.coeff(e)).norm());
    }
    for (e, c) in &q.terms {
        if !p.terms.contains_key(e) {
            worst = worst.max(c.norm());
        }
    }
    Some(worst / scale)
}

impl LinearForm {
    pub fn new(coeffs: Vec<Complex64>, constant: Complex64) -> Result<Self> {
        if coeffs.iter().all(|c| *c == ZERO) && constant == ZERO {
            return Err(Error::InvalidParameter("linear form is identically zero".into()));
        }
        if !coeffs.iter().chain([&constant]).all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(LinearForm { coeffs, constant })
    }

    /// Real line `coeffs . x - 1`, the normal form of a spectral line.
    pub fn line(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(), Complex64::new(-1.0, 0.0))
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    fn pivot(&self) -> Option<usize> {
        let (mut best, mut idx) = (0.0, None);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm() > best {
                best = c.norm();
                idx = Some(i);
            }
        }
        idx
    }

    pub fn to_poly(&self, vars: &[String]) -> Result<MultiPoly> {
        if vars.len() != self.coeffs.len() {
            return Err(Error::DimensionMismatch { expected: vars.len(), got: self.coeffs.len() });
        }
        let k = vars.len();
        let terms =
            self.coeffs.iter().enumerate().map(|(i, &c)| (unit_exp(k, i), c)).chain([(vec![0; k], self.constant)]);
        MultiPoly::from_terms(vars, terms)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(i, c)| format!("({}) x{}", fmt_c(*c), i + 1))
            .collect();
        parts.push(fmt_c(self.constant));
        write!(f, "{}", parts.join(" + "))
    }
}

fn fmt_c(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .zip(&self.vars)
                    .filter(|(d, _)| **d > 0)
                    .map(|(d, v)| if *d == 1 { v.clone() } else { format!("{v}^{d}") })
                    .collect();
                format!(
                    "({}){}",
                    fmt_c(*c),
                    if mono.is_empty() { String::new() } else { format!("*{}", mono.join("*")) }
                )
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
