//! JSON and CSV formats.
//!
//! * matrix: `{"n": 3, "entries": [[[re, im], ...], ...]}`, row-major
//! * tuple: `{"family": "snu2", "n": 3, "nu": 0.5, "matrices": {"H": M, "E": M, "F": M}}`
//! * polynomial: `{"vars": ["x1", "x2"], "terms": [{"exp": [2, 0], "re": 4.0, "im": 0.0}]}`,
//!   terms in lexicographic exponent order
//! * arrangement: `{"lines": [{"coeffs": [[re, im], ...], "mult": 1}], "certified": true}`
//!
//! Floats are written in shortest round-trip form.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{Family, GeneratorTuple};
use crate::matrix::ComplexMatrix;
use crate::polynomial::MultiPoly;
use crate::spectrum::Line;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        MatrixJson { n: m.n(), entries: m.rows().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect() }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = String;

    fn try_from(j: MatrixJson) -> std::result::Result<Self, String> {
        if j.entries.len() != j.n {
            return Err(format!("expected {} rows, found {}", j.n, j.entries.len()));
        }
        if let Some((i, r)) = j.entries.iter().enumerate().find(|(_, r)| r.len() != j.n) {
            return Err(format!("row {i} has {} entries, expected {}", r.len(), j.n));
        }
        let data = j.entries.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
        ComplexMatrix::new(j.n, data).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatricesJson {
    #[serde(rename = "H")]
    pub h: ComplexMatrix,
    #[serde(rename = "E")]
    pub e: ComplexMatrix,
    #[serde(rename = "F")]
    pub f: ComplexMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TupleJson {
    pub family: Family,
    pub n: usize,
    #[serde(default)]
    pub nu: Option<f64>,
    pub matrices: MatricesJson,
}

impl From<GeneratorTuple> for TupleJson {
    fn from(t: GeneratorTuple) -> Self {
        TupleJson { family: t.family, n: t.n, nu: t.nu, matrices: MatricesJson { h: t.h, e: t.e, f: t.f } }
    }
}

impl TryFrom<TupleJson> for GeneratorTuple {
    type Error = String;

    fn try_from(j: TupleJson) -> std::result::Result<Self, String> {
        if j.matrices.h.n() != j.n {
            return Err(format!("declared n = {} but H is {}x{}", j.n, j.matrices.h.n(), j.matrices.h.n()));
        }
        GeneratorTuple::new(j.matrices.h, j.matrices.e, j.matrices.f, j.family, j.nu).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

impl From<MultiPoly> for PolyJson {
    fn from(p: MultiPoly) -> Self {
        let terms = p.terms().map(|(e, c)| TermJson { exp: e.to_vec(), re: c.re, im: c.im }).collect();
        PolyJson { vars: p.vars().to_vec(), terms }
    }
}

impl TryFrom<PolyJson> for MultiPoly {
    type Error = String;

    fn try_from(j: PolyJson) -> std::result::Result<Self, String> {
        MultiPoly::from_terms(&j.vars, j.terms.into_iter().map(|t| (t.exp, Complex64::new(t.re, t.im))))
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrangementJson {
    pub lines: Vec<Line>,
    pub certified: bool,
}

/// One row of the exceptional-set table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalRow {
    pub i: usize,
    pub j: usize,
    pub z: f64,
    pub nu: f64,
}

/// Reads and parses a JSON file, reporting the path on failure.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let malformed = |reason: String| Error::Malformed { path: path.display().to_string(), reason };
    let text = fs::read_to_string(path).map_err(|e| malformed(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// CSV with a header row derived from the field names.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{sl2_generators, snu2_generators};

    #[test]
    fn matrix_round_trip() {
        let m = snu2_generators(3, 0.37).unwrap().e;
        let s = serde_json::to_string(&m).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let bad = r#"{"n": 2, "entries": [[[1,0],[0,0]], [[0,0]]]}"#;
        let err = serde_json::from_str::<ComplexMatrix>(bad).unwrap_err().to_string();
        assert!(err.contains("row 1"), "{err}");
        let short = r#"{"n": 2, "entries": [[[1,0],[0,0]]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(short).is_err());
    }

    #[test]
    fn tuple_round_trip() {
        for t in [snu2_generators(4, -0.7).unwrap(), sl2_generators(3).unwrap()] {
            let s = to_json(&t).unwrap();
            let back: GeneratorTuple = serde_json::from_str(&s).unwrap();
            assert_eq!(t, back);
        }
        let t = sl2_generators(3).unwrap();
        let v: serde_json::Value = serde_json::to_value(&t).unwrap();
        assert_eq!(v["family"], "sl2");
        assert_eq!(v["matrices"]["E"]["entries"][0][1], serde_json::json!([2.0, 0.0]));
    }

    #[test]
    fn poly_schema() {
        let vars = MultiPoly::default_vars(2);
        let p = MultiPoly::from_terms(
            &vars,
            [(vec![2, 0], Complex64::new(4.0, 0.0)), (vec![0, 1], Complex64::new(0.5, -1.0))],
        )
        .unwrap();
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["terms"][0]["exp"], serde_json::json!([0, 1]));
        assert_eq!(v["terms"][1]["re"], 4.0);
        let back: MultiPoly = serde_json::from_value(v).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn csv_rows() {
        let rows = [ExceptionalRow { i: 2, j: 3, z: 0.5, nu: 0.25 }];
        assert_eq!(to_csv(&rows).unwrap(), "i,j,z,nu\n2,3,0.5,0.25\n");
    }
}
