//! Command-line front end. Exit codes: 0 success, 1 input error,
//! 2 inadmissible vertex conditions, 3 numerical failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dirac::{dirac_spectrum, DiracPath};
use crate::error::{Error, ErrorCode, Result};
use crate::io::{check_document, check_table, emit_document, parse_document, ProblemDocument, SpectrumReport};
use crate::linalg::{unitarity_defect, CMatrix};
use crate::model::{Operator, QuantumGraph};
use crate::secular::{find_spectrum, null_vectors, verify_eigenfunction, SolverOptions, Spectrum};

#[derive(Debug, Parser)]
#[command(name = "qgraph", version, about = "Spectra of quantum graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Lower end of the wavenumber range (overrides the document).
    #[arg(long)]
    kmin: Option<f64>,
    #[arg(long)]
    kmax: Option<f64>,
    /// Grid points per mean level spacing.
    #[arg(long = "grid-q")]
    grid_q: Option<f64>,
    /// Relative root tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Skip eigenfunction verification of the roots.
    #[arg(long)]
    no_verify: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues in a wavenumber range.
    Spectrum {
        file: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Admissibility and k-independence of every vertex condition.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Vertex scattering matrix at one vertex and wavenumber.
    Scattering {
        file: PathBuf,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        k: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Massless Dirac spectrum against the direct scattering quantization.
    Compare {
        file: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Vertex-condition residual of the eigenfunctions at `k`.
    Verify {
        file: PathBuf,
        #[arg(long)]
        k: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// The same problem on a graph without loops or parallel edges.
    Simplify { file: PathBuf },
}

fn code_name(code: ErrorCode) -> &'static str {
    match code {
        ErrorCode::Input => "input",
        ErrorCode::Inadmissible => "inadmissible",
        ErrorCode::Numerical => "numerical",
    }
}

/// Runs one command; returns the process exit code.
pub fn run_command<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                ErrorCode::Input as i32
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let code = e.code();
            let _ = writeln!(stderr, "error[{}]: {e}", code_name(code));
            code as i32
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load(path: &PathBuf) -> Result<(String, ProblemDocument)> {
    let text = read(path)?;
    let doc = parse_document(&text)?;
    Ok((text, doc))
}

fn solve_setup(doc: &ProblemDocument, args: &SolveArgs) -> Result<(f64, f64, SolverOptions)> {
    let k_min = args.kmin.or(doc.model.k_min);
    let k_max = args.kmax.or(doc.model.k_max);
    let (Some(k_min), Some(k_max)) = (k_min, k_max) else {
        return Err(Error::InvalidParameter(
            "no wavenumber range: pass --kmin/--kmax or set model.k_min/model.k_max".into(),
        ));
    };
    let mut opts = doc.solver_options();
    if let Some(q) = args.grid_q {
        opts.q = q;
    }
    if let Some(t) = args.tol {
        opts.tol_root = t;
    }
    if args.no_verify {
        opts.verify = false;
    }
    if args.jobs == 0 {
        return Err(Error::InvalidParameter("--jobs must be at least 1".into()));
    }
    opts.jobs = args.jobs;
    Ok((k_min, k_max, opts))
}

fn warn_unresolved(spectrum: &Spectrum, stderr: &mut dyn Write) {
    let n = spectrum.roots.iter().filter(|r| r.unresolved).count();
    if n > 0 {
        let _ = writeln!(
            stderr,
            "warning: {n} root(s) flagged unresolved (multiplicity cross-check failed)"
        );
    }
    if spectrum.stats.ambiguous_intervals > 0 {
        let _ = writeln!(
            stderr,
            "warning: eigenphase tracking stayed ambiguous in {} interval(s)",
            spectrum.stats.ambiguous_intervals
        );
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Spectrum { file, solve, format } => {
            let (text, doc) = load(&file)?;
            let model = doc.build()?;
            let (k_min, k_max, opts) = solve_setup(&doc, &solve)?;
            let spectrum = find_spectrum(&model, k_min, k_max, &opts)?;
            warn_unresolved(&spectrum, err);
            let report = SpectrumReport::new(&text, model.operator(), &opts, &spectrum);
            match format {
                Format::Csv => write!(out, "{}", report.to_csv())?,
                Format::Json => write!(out, "{}", report.to_json())?,
            }
            Ok(0)
        }
        Command::Check { file, format } => {
            let text = read(&file)?;
            let doc = match parse_document(&text) {
                Ok(doc) => doc,
                Err(e) if e.code() == ErrorCode::Inadmissible => {
                    serde_json::from_str(&text).map_err(|e| Error::Syntax {
                        path: ".".into(),
                        message: e.to_string(),
                    })?
                }
                Err(e) => return Err(e),
            };
            let rows = check_document(&doc)?;
            match format {
                Format::Csv => write!(out, "{}", check_table(&rows))?,
                Format::Json => write!(out, "{}", json(&rows))?,
            }
            Ok(if rows.iter().all(|r| r.admissible) {
                0
            } else {
                ErrorCode::Inadmissible as i32
            })
        }
        Command::Scattering {
            file,
            vertex,
            k,
            format,
        } => {
            let (_, doc) = load(&file)?;
            let model = doc.build()?;
            let sigma = model.vertex_scattering(&vertex, k)?;
            write_matrix(out, &vertex, k, &sigma, format)?;
            Ok(0)
        }
        Command::Compare { file, solve, format } => {
            let (_, doc) = load(&file)?;
            let (k_min, k_max, opts) = solve_setup(&doc, &solve)?;
            compare(&doc, k_min, k_max, &opts, format, out, err)
        }
        Command::Verify { file, k, format } => {
            let (_, doc) = load(&file)?;
            let model = doc.build()?;
            let tol = doc.solver_options().null_tol;
            let (vectors, _) = null_vectors(&model, k, tol)?;
            let residual = verify_eigenfunction(&model, k)?;
            #[derive(Serialize)]
            struct Verified {
                k: f64,
                null_dimension: usize,
                residual: f64,
            }
            let v = Verified {
                k,
                null_dimension: vectors.len(),
                residual,
            };
            match format {
                Format::Csv => write!(
                    out,
                    "k,null_dimension,residual\n{:.16e},{},{:.6e}\n",
                    v.k, v.null_dimension, v.residual
                )?,
                Format::Json => write!(out, "{}", json(&v))?,
            }
            Ok(0)
        }
        Command::Simplify { file } => {
            let (_, doc) = load(&file)?;
            write!(out, "{}", emit_document(&doc.simplified()?))?;
            Ok(0)
        }
    }
}

fn write_matrix(out: &mut dyn Write, vertex: &str, k: f64, m: &CMatrix, format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "row,col,re,im")?;
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    writeln!(out, "{i},{j},{:.16e},{:.16e}", m[(i, j)].re, m[(i, j)].im)?;
                }
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Matrix<'a> {
                vertex: &'a str,
                k: f64,
                unitarity_defect: f64,
                matrix: Vec<Vec<[f64; 2]>>,
            }
            let matrix = (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect();
            let value = Matrix {
                vertex,
                k,
                unitarity_defect: unitarity_defect(m),
                matrix,
            };
            write!(out, "{}", json(&value))?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ComparisonRow {
    index: usize,
    k_scattering: f64,
    multiplicity_scattering: usize,
    k_dirac: f64,
    multiplicity_dirac: usize,
    deviation: f64,
}

#[derive(Debug, Serialize)]
struct Comparison {
    rows: Vec<ComparisonRow>,
    max_deviation: f64,
    multiplicities_doubled: bool,
}

/// Uses the document's vertex conditions as k-independent scattering
/// matrices `Û_v`; the Dirac side carries `Û_v ⊗ I₂` at zero mass.
fn compare(
    doc: &ProblemDocument,
    k_min: f64,
    k_max: f64,
    opts: &SolverOptions,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let graph = doc.graph()?;
    let direct = QuantumGraph::new(graph.clone(), &doc.condition_specs()?, Operator::Scattering)?;
    let uhat: BTreeMap<String, CMatrix> = graph
        .vertices()
        .iter()
        .map(|v| Ok((v.clone(), direct.vertex_scattering(v, 1.0)?)))
        .collect::<Result<_>>()?;
    let scattering = find_spectrum(&direct, k_min, k_max, opts)?;
    let dirac = dirac_spectrum(&graph, &uhat, 0.0, k_min, k_max, opts, DiracPath::Full)?;
    warn_unresolved(&scattering, err);
    warn_unresolved(&dirac, err);

    if scattering.roots.len() != dirac.roots.len() {
        return Err(Error::Inconsistent(format!(
            "spectra differ in size: {} scattering roots, {} Dirac roots",
            scattering.roots.len(),
            dirac.roots.len()
        )));
    }
    let rows: Vec<ComparisonRow> = scattering
        .roots
        .iter()
        .zip(&dirac.roots)
        .enumerate()
        .map(|(i, (s, d))| ComparisonRow {
            index: i + 1,
            k_scattering: s.k,
            multiplicity_scattering: s.multiplicity,
            k_dirac: d.k,
            multiplicity_dirac: d.multiplicity,
            deviation: (s.k - d.k).abs(),
        })
        .collect();
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let multiplicities_doubled = rows
        .iter()
        .all(|r| r.multiplicity_dirac == 2 * r.multiplicity_scattering);
    let result = Comparison {
        rows,
        max_deviation,
        multiplicities_doubled,
    };
    match format {
        Format::Csv => {
            writeln!(
                out,
                "index,k_scattering,multiplicity_scattering,k_dirac,multiplicity_dirac,deviation"
            )?;
            for r in &result.rows {
                writeln!(
                    out,
                    "{},{:.16e},{},{:.16e},{},{:.6e}",
                    r.index, r.k_scattering, r.multiplicity_scattering, r.k_dirac, r.multiplicity_dirac, r.deviation
                )?;
            }
            writeln!(err, "max deviation: {max_deviation:.6e}")?;
        }
        Format::Json => write!(out, "{}", json(&result))?,
    }
    Ok(0)
}
