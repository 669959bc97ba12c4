//! Command-line front end: build example cells, homogenize them, and run
//! micro/macro symmetry checks, classification, and transport.
//!
//! Exit codes: 0 on success (and passing checks), 2 when a mathematical
//! check fails (residual above tolerance), 1 on operational errors. Data
//! goes to stdout or `--out`; progress goes to stderr.

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cellhom::cell::{examples, io as cellio, UnitCell};
use cellhom::homog;
use cellhom::microsym::{self, AffineSymmetry};
use cellhom::solver::SolverOptions;
use cellhom::tensor::{ElasticityTensor, UnimodularMap};
use cellhom::{Error, Result};

#[derive(Parser)]
#[command(
    name = "cellhom",
    about = "Periodic homogenization of elastic unit cells with symmetry analysis",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Relative residual target for conjugate gradients.
    #[arg(long, default_value_t = 1e-10)]
    cg_tol: f64,
    /// Iteration cap (default: 10·dim·(∏N)^(1/dim)).
    #[arg(long)]
    max_iter: Option<usize>,
    /// Serial loops and reductions; output files are byte-stable.
    #[arg(long)]
    deterministic: bool,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            cg_tol: self.cg_tol,
            max_iter: self.max_iter,
            deterministic: self.deterministic,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write one of the built-in example cells as config + voxel files.
    BuildExample {
        /// One of: laminate, orthotropic_octants, tetragonal_single_fiber,
        /// tetragonal_four_fibers, tetragonal_orthogonal_fibers,
        /// hexagonal_bundle, checkerboard2d.
        name: String,
        /// Grid resolution.
        #[arg(long, default_value_t = 32)]
        n: usize,
        /// Laminate volume fraction (laminate only).
        #[arg(long, default_value_t = 0.5)]
        fraction: f64,
        /// Output path prefix; writes PREFIX.json and PREFIX.vox.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the cell problems and report the macroscopic tensor.
    Homogenize {
        cell: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Evaluate the symmetry generator catalog on the result.
        #[arg(long)]
        catalog: bool,
        /// Residual tolerance for the symmetry table and classification.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Export nodal fluctuation fields as PREFIX_<case>.f64 plus a JSON
        /// sidecar describing grid and ordering.
        #[arg(long)]
        export_solutions: Option<PathBuf>,
    },
    /// Check an affine transformation against the voxel field.
    CheckMicro {
        cell: PathBuf,
        /// JSON file {"z0": [...], "a": [...], "H": [[...]]}.
        transform: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a linear map against a macroscopic tensor (from a homogenize
    /// report or by homogenizing a cell).
    CheckMacro {
        /// JSON file containing at least {"H": [[...]]}.
        transform: PathBuf,
        #[arg(long, conflicts_with = "cell")]
        report: Option<PathBuf>,
        #[arg(long)]
        cell: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a macroscopic tensor into its symmetry class.
    Classify {
        #[arg(long, conflicts_with = "cell")]
        report: Option<PathBuf>,
        #[arg(long)]
        cell: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Homogenize a first-order transport cell (mobility materials).
    Transport {
        cell: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("CELLHOM_THREADS") {
        if let Ok(k) = threads.trim().parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(check_failed) => {
            if check_failed {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(1)
        }
    }
}

/// Runs a subcommand; `Ok(true)` means a mathematical check failed.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::BuildExample { name, n, fraction, out } => {
            let cell = if name == "laminate" {
                examples::laminate(fraction, n, examples::TwoPhase::default())?
            } else {
                examples::build_named(&name, n)?
            };
            let config = out.with_extension("json");
            let vox = format!(
                "{}.vox",
                out.file_stem().and_then(|s| s.to_str()).unwrap_or("cell")
            );
            cellio::save_unit_cell(&cell, &config, &vox)?;
            eprintln!(
                "wrote {} and {} ({} voxels, {} materials)",
                config.display(),
                vox,
                cell.num_voxels(),
                cell.materials().len()
            );
            Ok(false)
        }
        Command::Homogenize { cell, solver, catalog, tol, format, out, export_solutions } => {
            let cell = cellio::load_unit_cell(&cell)?;
            eprintln!(
                "homogenizing {}D cell, grid {:?}, {} materials",
                cell.dim(),
                cell.grid(),
                cell.materials().len()
            );
            if let Some(prefix) = &export_solutions {
                export_fields(&cell, &solver.options(), prefix)?;
            }
            let options = homog::HomogenizeOptions {
                solver: solver.options(),
                with_symmetry: catalog,
                symmetry_tol: tol,
            };
            let report = homog::effective_tensor(&cell, &options)?;
            for s in &report.solves {
                eprintln!("  case {}: {} iterations, residual {:.3e}", s.case, s.iterations, s.residual);
            }
            let text = match format {
                OutputFormat::Json => serde_json::to_string_pretty(&report)? + "\n",
                OutputFormat::Csv => homog::mandel_csv(&report.c0),
            };
            emit(out.as_deref(), &text)?;
            Ok(false)
        }
        Command::CheckMicro { cell, transform, tol, out } => {
            let cell = cellio::load_unit_cell(&cell)?;
            let h = read_affine(&transform)?;
            let report = microsym::check_micro_symmetry(&cell, &h, tol)?;
            let text = serde_json::to_string_pretty(&report)? + "\n";
            emit(out.as_deref(), &text)?;
            eprintln!("residual {:.3e}, pass: {}", report.residual, report.pass);
            Ok(!report.pass)
        }
        Command::CheckMacro { transform, report, cell, tol, solver, out } => {
            let c0 = resolve_tensor(report.as_deref(), cell.as_deref(), &solver)?;
            let h = read_unimodular(&transform)?;
            let check = homog::check_macro_symmetry(&c0, &h, tol)?;
            let text = serde_json::to_string_pretty(&check)? + "\n";
            emit(out.as_deref(), &text)?;
            eprintln!("residual {:.3e}, pass: {}", check.residual, check.pass);
            Ok(!check.pass)
        }
        Command::Classify { report, cell, tol, solver, out } => {
            let c0 = resolve_tensor(report.as_deref(), cell.as_deref(), &solver)?;
            let classification = homog::classify_macro(&c0, tol)?;
            let text = serde_json::to_string_pretty(&classification)? + "\n";
            emit(out.as_deref(), &text)?;
            eprintln!("class: {}", classification.class);
            Ok(false)
        }
        Command::Transport { cell, solver, out } => {
            let cell = cellhom::cell::io::load_mobility_cell(&cell)?;
            let report = homog::effective_transport(&cell, &solver.options())?;
            for s in &report.solves {
                eprintln!("  case {}: {} iterations, residual {:.3e}", s.case, s.iterations, s.residual);
            }
            let text = serde_json::to_string_pretty(&report)? + "\n";
            emit(out.as_deref(), &text)?;
            Ok(false)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read_affine(path: &Path) -> Result<AffineSymmetry> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Reads the linear part from a transform file: accepts either a bare
/// {"H": [[...]]} or a full affine-symmetry file.
fn read_unimodular(path: &Path) -> Result<UnimodularMap> {
    #[derive(Deserialize)]
    struct HOnly {
        #[serde(rename = "H")]
        h: Vec<Vec<f64>>,
    }
    let text = std::fs::read_to_string(path)?;
    let wire: HOnly = serde_json::from_str(&text)?;
    let n = wire.h.len();
    if wire.h.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidConfig { reason: "H must be square".into() });
    }
    let flat: Vec<f64> = wire.h.iter().flatten().copied().collect();
    UnimodularMap::new(DMatrix::from_row_slice(n, n, &flat))
}

/// Either parses C0 out of a homogenize report or homogenizes a cell.
fn resolve_tensor(
    report: Option<&Path>,
    cell: Option<&Path>,
    solver: &SolverArgs,
) -> Result<ElasticityTensor> {
    #[derive(Deserialize)]
    struct ReportC0 {
        #[serde(rename = "C0")]
        c0: ElasticityTensor,
    }
    match (report, cell) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)?;
            let wire: ReportC0 = serde_json::from_str(&text)?;
            Ok(wire.c0)
        }
        (None, Some(path)) => {
            let cell = cellio::load_unit_cell(path)?;
            let options = homog::HomogenizeOptions {
                solver: solver.options(),
                with_symmetry: false,
                symmetry_tol: 1e-6,
            };
            Ok(homog::effective_tensor(&cell, &options)?.c0)
        }
        (None, None) => Err(Error::InvalidConfig {
            reason: "pass either --report or --cell".into(),
        }),
    }
}

/// Writes the nodal fluctuation fields for all Mandel basis loads: one flat
/// little-endian f64 file per case plus a JSON sidecar with the layout.
fn export_fields(cell: &UnitCell, options: &SolverOptions, prefix: &Path) -> Result<()> {
    use cellhom::solver::CellOperator;
    use cellhom::tensor::{Dim, SymTensor2};
    use std::io::Write;

    let dim = Dim::from_n(cell.dim())?;
    let op = CellOperator::new(cell, options.clone())?;
    let mut cases = Vec::new();
    for k in 0..dim.mandel_len() {
        let (i, j) = dim.mandel_pairs()[k];
        let case = format!("E{}{}", i + 1, j + 1);
        let sol = op.solve(&SymTensor2::basis(dim, k))?;
        let path = PathBuf::from(format!("{}_{}.f64", prefix.display(), case));
        let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
        for v in sol.nodal() {
            file.write_all(&v.to_le_bytes())?;
        }
        file.flush()?;
        cases.push(case);
    }
    let sidecar = serde_json::json!({
        "grid": cell.grid(),
        "dofs_per_node": cell.dim(),
        "ordering": "row-major nodes (last lattice index fastest), dof fastest within node; little-endian f64",
        "cases": cases,
    });
    std::fs::write(
        PathBuf::from(format!("{}_fields.json", prefix.display())),
        serde_json::to_string_pretty(&sidecar)? + "\n",
    )?;
    Ok(())
}
