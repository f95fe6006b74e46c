//! The `specrig` command line.
//!
//! Exit codes: 0 success (or an equivalent verdict), 1 usage or input error,
//! 2 hypothesis failed, 3 reconstruction failed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exceptional::exceptional_set;
use crate::exec::set_threads;
use crate::fixtures::{random_phases, random_unitary, seeded_rng};
use crate::generators::{
    counterexample_tuple, fundamental_generators, limit_generators, one_dim_rep, relation_residuals, sl2_generators,
    snu2_generators, Family, GeneratorTuple, Orientation, RelationResidual,
};
use crate::io::{emit, read_json, to_csv, to_json, ArrangementJson, ExceptionalRow};
use crate::matrix::ComplexMatrix;
use crate::pencil::{eval_pencil, format_pencil, parse_pencil};
use crate::polynomial::{poly_distance, MultiPoly};
use crate::rigidity::{reconstruct, Reference, RigidityReport};
use crate::spectrum::{det_pencil, det_pencil_homogeneous, lines_of_pair, pencil_distances};
use crate::DEFAULT_TOL;

#[derive(Debug, Parser)]
#[command(name = "specrig", version, about = "Joint spectra and spectral rigidity of generator tuples")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Numerical tolerance.
    #[arg(long, global = true, env = "SPECRIG_TOL", default_value_t = DEFAULT_TOL, value_parser = positive)]
    pub tol: f64,

    /// Worker threads for grid evaluations (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output file; stdout when absent.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    #[command(flatten)]
    pub format: FormatFlags,
}

/// Output format; JSON unless another is asked for.
#[derive(Debug, Args)]
pub struct FormatFlags {
    #[arg(long, global = true, conflicts_with_all = ["csv", "text"])]
    pub json: bool,
    #[arg(long, global = true, conflicts_with = "text")]
    pub csv: bool,
    #[arg(long, global = true)]
    pub text: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FormatFlags {
    pub fn format(&self) -> Format {
        if self.csv {
            Format::Csv
        } else if self.text {
            Format::Text
        } else {
            Format::Json
        }
    }
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenFamily {
    Snu2,
    Sl2,
    Limit,
    Fundamental,
    Onedim,
    Counterexample,
    RandomConjugate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RigidityFamily {
    Snu2,
    Sl2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    Paper,
    Swapped,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generator tuple as JSON.
    Gen {
        #[arg(long)]
        family: GenFamily,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        nu: Option<f64>,
        /// Counterexample parameters `alpha,beta,gamma,delta`.
        #[arg(long, default_value = "1,2,2,1")]
        params: String,
        /// Constant `c` of the one-dimensional representation, `re[,im]`.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        c: String,
        /// Base family conjugated by `random-conjugate`.
        #[arg(long, value_enum, default_value = "snu2")]
        base: RigidityFamily,
        /// Conjugate by a diagonal phase matrix instead of a full unitary.
        #[arg(long)]
        phases: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Determinantal polynomial `det(x1 M1 + ... + xk Mk - I)` of a pencil.
    Det {
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long)]
        pencil: String,
        /// Comma-separated variable names (default x1, x2, ...).
        #[arg(long)]
        vars: Option<String>,
        /// Append `-I` as an extra slot and drop the shift, giving the
        /// homogeneous polynomial in one more variable.
        #[arg(long)]
        homogeneous: bool,
    },
    /// Line arrangement of a two-slot pencil.
    Lines {
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long)]
        pencil: String,
    },
    /// Compare pencil polynomials of two tuples; pencils separated by ';'.
    Compare {
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long)]
        other: PathBuf,
        #[arg(long, default_value = "A1, A2 A2^H; A1, A2^H A2; A1, A3 A3^H; A1, A3^H A3; A1, A2 A3")]
        pencil: String,
    },
    /// Verify the rigidity hypotheses and reconstruct the witness.
    Rigidity {
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long, value_enum)]
        family: RigidityFamily,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        nu: Option<f64>,
    },
    /// Exceptional parameters for dimension n.
    Exceptional {
        #[arg(long)]
        n: usize,
    },
    /// Residuals of the deformed commutation relations.
    Relations {
        /// Tuple file; otherwise built from --family/--n/--nu.
        #[arg(long)]
        tuple: Option<PathBuf>,
        #[arg(long, value_enum)]
        family: Option<GenFamily>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        nu: Option<f64>,
        #[arg(long, value_enum, default_value = "both")]
        orientation: OrientationArg,
    },
    /// The three-matrix counterexample against the sl(2) hypotheses.
    Counterexample {
        #[arg(long, default_value = "1,2,2,1")]
        params: String,
    },
}

/// Parses `argv` (including the program name), runs, and returns the exit
/// code. Output goes to `--output` or stdout, errors to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(&config) {
        Ok((text, code)) => match emit(&text, config.output.as_deref()) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs a parsed configuration, returning the rendered output and the exit
/// code.
pub fn execute(config: &RunConfig) -> Result<(String, i32)> {
    if let Some(t) = config.threads {
        if t == 0 {
            return Err(Error::InvalidParameter("--threads must be positive".into()));
        }
        // a pool that is already configured keeps its size
        let _ = set_threads(t);
    }
    let format = config.format.format();
    let tol = config.tol;
    match &config.command {
        Command::Gen { family, n, nu, params, c, base, phases, seed } => {
            let t = generate(*family, *n, *nu, params, c, *base, *phases, *seed)?;
            Ok((render_tuple(&t, format)?, 0))
        }
        Command::Det { tuple, pencil, vars, homogeneous } => {
            let t = load_tuple(tuple)?;
            let exprs = parse_pencil(pencil)?;
            let mut mats = eval_pencil(&exprs, &t);
            let k = mats.len() + usize::from(*homogeneous);
            let names = match vars {
                Some(v) => v.split(',').map(|s| s.trim().to_string()).collect(),
                None => MultiPoly::default_vars(k),
            };
            if names.len() != k {
                return Err(Error::InvalidParameter(format!(
                    "pencil has {k} slots but {} variable names were given",
                    names.len()
                )));
            }
            let p = if *homogeneous {
                mats.push(ComplexMatrix::identity(t.n).scaled(Complex64::new(-1.0, 0.0)));
                det_pencil_homogeneous(&mats, &names)?
            } else {
                det_pencil(&mats, &names)?
            };
            let text = match format {
                Format::Json => to_json(&p)?,
                Format::Text => format!("{}\n", tidy(&p, tol)?),
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row {
                        exp: String,
                        re: f64,
                        im: f64,
                    }
                    let rows: Vec<Row> = p
                        .terms()
                        .map(|(e, c)| Row {
                            exp: e.iter().map(u32::to_string).collect::<Vec<_>>().join(" "),
                            re: c.re,
                            im: c.im,
                        })
                        .collect();
                    to_csv(&rows)?
                }
            };
            Ok((text, 0))
        }
        Command::Lines { tuple, pencil } => {
            let t = load_tuple(tuple)?;
            let exprs = parse_pencil(pencil)?;
            if exprs.len() != 2 {
                return Err(Error::InvalidParameter(format!("lines needs a two-slot pencil, got {}", exprs.len())));
            }
            let mats = eval_pencil(&exprs, &t);
            let (arr, certified) = lines_of_pair(&mats[0], &mats[1], tol)?;
            let report = ArrangementJson { lines: arr.lines, certified };
            let text = match format {
                Format::Json => to_json(&report)?,
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row {
                        a_re: f64,
                        a_im: f64,
                        b_re: f64,
                        b_im: f64,
                        mult: usize,
                    }
                    let rows: Vec<Row> = report
                        .lines
                        .iter()
                        .map(|l| Row {
                            a_re: l.coeffs[0].re,
                            a_im: l.coeffs[0].im,
                            b_re: l.coeffs[1].re,
                            b_im: l.coeffs[1].im,
                            mult: l.mult,
                        })
                        .collect();
                    to_csv(&rows)?
                }
                Format::Text => {
                    let mut s = String::new();
                    for l in &report.lines {
                        s += &format!("({:.10}) x1 + ({:.10}) x2 = 1  [mult {}]\n", l.coeffs[0], l.coeffs[1], l.mult);
                    }
                    s += &format!("certified: {}\n", report.certified);
                    s
                }
            };
            Ok((text, 0))
        }
        Command::Compare { tuple, other, pencil } => {
            let t1 = load_tuple(tuple)?;
            let t2 = load_tuple(other)?;
            let pencils = pencil.split(';').map(parse_pencil).collect::<Result<Vec<_>>>()?;
            let dist = pencil_distances(&t1, &t2, &pencils)?;
            #[derive(Serialize)]
            struct Row {
                pencil: String,
                equal: bool,
                distance: f64,
            }
            let rows: Vec<Row> = pencils
                .iter()
                .zip(&dist)
                .map(|(p, &d)| Row { pencil: format_pencil(p), equal: d <= tol, distance: d })
                .collect();
            let text = match format {
                Format::Json => to_json(&rows)?,
                Format::Csv => to_csv(&rows)?,
                Format::Text => {
                    rows.iter().map(|r| format!("{:<24} {:<5} {:.3e}\n", r.pencil, r.equal, r.distance)).collect()
                }
            };
            Ok((text, 0))
        }
        Command::Rigidity { tuple, family, n, nu } => {
            let t = load_tuple(tuple)?;
            let reference = match family {
                RigidityFamily::Snu2 => {
                    Reference::snu2(*n, nu.ok_or_else(|| Error::InvalidParameter("--nu is required for snu2".into()))?)?
                }
                RigidityFamily::Sl2 => Reference::sl2(*n)?,
            };
            let report = reconstruct(&t, &reference, tol)?;
            let code = report.verdict.exit_code();
            let text = match format {
                Format::Json => to_json(&report)?,
                Format::Text => render_report(&report),
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row<'a> {
                        condition: &'a str,
                        residual: f64,
                    }
                    let rows: Vec<Row> =
                        report.condition_residuals.iter().map(|(k, v)| Row { condition: k, residual: *v }).collect();
                    to_csv(&rows)?
                }
            };
            Ok((text, code))
        }
        Command::Exceptional { n } => {
            let set = exceptional_set(*n)?;
            let rows: Vec<ExceptionalRow> =
                set.roots.iter().map(|r| ExceptionalRow { i: r.i, j: r.j, z: r.z, nu: r.nu }).collect();
            let text = match format {
                Format::Json => to_json(&rows)?,
                Format::Csv => to_csv(&rows)?,
                Format::Text => rows.iter().map(|r| format!("{} {} {:.10} {:.10}\n", r.i, r.j, r.z, r.nu)).collect(),
            };
            Ok((text, 0))
        }
        Command::Relations { tuple, family, n, nu, orientation } => {
            let t = match (tuple, family) {
                (Some(path), _) => load_tuple(path)?,
                (None, Some(f)) => generate(*f, *n, *nu, "1,2,2,1", "1", RigidityFamily::Snu2, false, 0)?,
                (None, None) => return Err(Error::InvalidParameter("relations needs --tuple or --family".into())),
            };
            let orientations = match orientation {
                OrientationArg::Paper => vec![Orientation::Paper],
                OrientationArg::Swapped => vec![Orientation::Swapped],
                OrientationArg::Both => vec![Orientation::Paper, Orientation::Swapped],
            };
            #[derive(Serialize)]
            struct Row {
                orientation: Orientation,
                r1: f64,
                r2: f64,
                r3: f64,
                max_relative: f64,
            }
            let rows = orientations
                .into_iter()
                .map(|o| {
                    relation_residuals(&t, o).map(|r: RelationResidual| Row {
                        orientation: o,
                        r1: r.r1,
                        r2: r.r2,
                        r3: r.r3,
                        max_relative: r.max_relative(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let text = match format {
                Format::Json => to_json(&rows)?,
                Format::Csv => to_csv(&rows)?,
                Format::Text => rows
                    .iter()
                    .map(|r| {
                        format!(
                            "{:?}: r1={:.3e} r2={:.3e} r3={:.3e} (max relative {:.3e})\n",
                            r.orientation, r.r1, r.r2, r.r3, r.max_relative
                        )
                    })
                    .collect(),
            };
            Ok((text, 0))
        }
        Command::Counterexample { params } => {
            let [a, b, g, d] = parse_params(params)?;
            let t = counterexample_tuple(a, b, g, d)?;
            let sl2 = sl2_generators(3)?;
            let names: Vec<String> = ["x", "y", "z", "t"].map(String::from).to_vec();
            let minus_i = ComplexMatrix::identity(3).scaled(Complex64::new(-1.0, 0.0));
            let p = det_pencil_homogeneous(&[&t.h, &t.e, &t.f, &minus_i], &names)?;
            let q = det_pencil_homogeneous(&[&sl2.h, &sl2.e, &sl2.f, &minus_i], &names)?;
            let report = reconstruct(&t, &Reference::sl2(3)?, tol)?;
            #[derive(Serialize)]
            struct Out {
                polynomial: MultiPoly,
                reference_polynomial: MultiPoly,
                spectrum_distance: f64,
                same_three_matrix_spectrum: bool,
                commutator_defect: f64,
                commutator: ComplexMatrix,
                rigidity: RigidityReport,
            }
            let dist = poly_distance(&p, &q).expect("same variables");
            let comm = t.e.commutator(&t.f);
            let out = Out {
                spectrum_distance: dist,
                same_three_matrix_spectrum: dist <= tol,
                commutator_defect: comm.hs_distance(&t.h),
                commutator: comm,
                polynomial: p,
                reference_polynomial: q,
                rigidity: report,
            };
            let text = match format {
                Format::Json | Format::Csv => to_json(&out)?,
                Format::Text => format!(
                    "det(xA1 + yA2 + zA3 - tI) = {}\nsame spectrum as (H3, E3, F3): {}\n||[A2, A3] - A1||_HS = {:.6}\nrigidity verdict: {:?}\n",
                    tidy(&out.polynomial, tol)?, out.same_three_matrix_spectrum, out.commutator_defect, out.rigidity.verdict
                ),
            };
            Ok((text, 0))
        }
    }
}

/// Drops round-off: components below `tol * max|c|` are zeroed and the rest
/// rounded to 12 significant digits.
fn tidy(p: &MultiPoly, tol: f64) -> Result<MultiPoly> {
    let floor = tol * p.max_abs_coeff();
    let round = |x: f64| if x.abs() <= floor { 0.0 } else { format!("{x:.11e}").parse().unwrap_or(x) };
    MultiPoly::from_terms(p.vars(), p.terms().map(|(e, c)| (e.to_vec(), Complex64::new(round(c.re), round(c.im)))))
}

fn load_tuple(path: &Path) -> Result<GeneratorTuple> {
    read_json(path)
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::InvalidParameter(format!("cannot parse complex number '{s}'"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

fn parse_params(s: &str) -> Result<[Complex64; 4]> {
    let v = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map(|x| Complex64::new(x, 0.0)))
        .collect::<std::result::Result<Vec<_>, _>>();
    match v {
        Ok(v) if v.len() == 4 => Ok([v[0], v[1], v[2], v[3]]),
        _ => Err(Error::InvalidParameter(format!("expected four comma-separated reals, got '{s}'"))),
    }
}

fn need<T>(x: Option<T>, flag: &str) -> Result<T> {
    x.ok_or_else(|| Error::InvalidParameter(format!("{flag} is required for this family")))
}

#[allow(clippy::too_many_arguments)]
fn generate(
    family: GenFamily,
    n: Option<usize>,
    nu: Option<f64>,
    params: &str,
    c: &str,
    base: RigidityFamily,
    phases: bool,
    seed: u64,
) -> Result<GeneratorTuple> {
    match family {
        GenFamily::Snu2 => snu2_generators(need(n, "--n")?, need(nu, "--nu")?),
        GenFamily::Sl2 => sl2_generators(need(n, "--n")?),
        GenFamily::Limit => limit_generators(need(n, "--n")?),
        GenFamily::Fundamental => fundamental_generators(need(nu, "--nu")?),
        GenFamily::Onedim => one_dim_rep(parse_complex(c)?, need(nu, "--nu")?),
        GenFamily::Counterexample => {
            let [a, b, g, d] = parse_params(params)?;
            counterexample_tuple(a, b, g, d)
        }
        GenFamily::RandomConjugate => {
            let n = need(n, "--n")?;
            let t = match base {
                RigidityFamily::Snu2 => snu2_generators(n, need(nu, "--nu")?)?,
                RigidityFamily::Sl2 => sl2_generators(n)?,
            };
            let mut rng = seeded_rng(seed);
            let w = if phases { random_phases(&mut rng, n, false) } else { random_unitary(&mut rng, n) };
            Ok(t.conjugated(&w))
        }
    }
}

fn render_tuple(t: &GeneratorTuple, format: Format) -> Result<String> {
    match format {
        Format::Json | Format::Csv => to_json(t),
        Format::Text => Ok(format!(
            "family {} n {} nu {}\nH = {:?}E = {:?}F = {:?}",
            Family::as_str(t.family),
            t.n,
            t.nu.map_or("-".to_string(), |v| v.to_string()),
            t.h,
            t.e,
            t.f
        )),
    }
}

fn render_report(r: &RigidityReport) -> String {
    let mut s = format!("verdict: {:?}\n", r.verdict);
    if let Some(res) = r.certified_residual {
        s += &format!("certified residual: {res:.3e}\n");
    }
    for (k, v) in &r.condition_residuals {
        s += &format!("  {k:<12} {v:.3e}\n");
    }
    for d in &r.diagnostics {
        s += &format!("[{:?}] {}: {}", d.step, d.finding, d.message);
        if !d.entries.is_empty() {
            s += &format!(" at {:?}", d.entries);
        }
        s.push('\n');
    }
    if let Some(w) = &r.witness {
        let phases: Vec<String> = w.diag().iter().map(|z| format!("{:.6}", z.arg())).collect();
        s += &format!("witness phases: [{}]\n", phases.join(", "));
    }
    s
}
