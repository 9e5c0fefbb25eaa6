//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on input errors (arguments, files, scene
//! validation), 2 on numerical failures (solver breakdown, non-finite
//! integrals, self-test tolerances exceeded).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gbem_core::extraction::{capacitance_row, Baseline, CapacitanceMatrix, ExtractOptions};
use gbem_core::partition::PartitionParams;

use crate::model::{parse_model, ModelError};
use crate::report::{write_matrix_file, RunReport};
use crate::selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gbem", version, about = "Capacitance extraction with a Galerkin boundary element method")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract capacitances from a scene file.
    Extract(ExtractArgs),
    /// Parse a scene file and check its geometry.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Kernel diagnostics.
    Kernels {
        #[command(subcommand)]
        command: KernelCommand,
    },
}

#[derive(Debug, Subcommand)]
enum KernelCommand {
    /// Compare panel integrals with the brute-force oracle on random pairs.
    Selftest {
        /// Pairs per geometric case.
        #[arg(long, default_value_t = 500)]
        pairs: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Oracle refinement depth.
        #[arg(long, default_value_t = selftest::ORACLE_DEPTH)]
        depth: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaselineArg {
    Galerkin,
    Collocation,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long)]
    input: PathBuf,
    /// Main net of a single row.
    #[arg(long, conflicts_with = "all")]
    net: Option<u32>,
    /// Every row of the matrix (the default).
    #[arg(long)]
    all: bool,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    p3: Option<f64>,
    #[arg(long)]
    p5: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BaselineArg::Galerkin)]
    baseline: BaselineArg,
    /// Write each system matrix; with several rows the net id is appended
    /// as `PATH.net<ID>`.
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
    /// Solve with LU when Cholesky fails.
    #[arg(long)]
    lu_fallback: bool,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<gbem_core::Error> for Failure {
    fn from(e: gbem_core::Error) -> Self {
        use gbem_core::Error as E;
        let code = match e {
            E::NotPositiveDefinite { .. } | E::Singular { .. } | E::NonFinite { .. } | E::Assembly(_) | E::Dimension(_) => {
                EXIT_NUMERICAL
            }
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn monotonic_seconds() -> f64 {
    static START: OnceLock<Instant> = OnceLock::new();
    START.get_or_init(Instant::now).elapsed().as_secs_f64()
}

fn load(path: &Path) -> Result<(gbem_core::geometry::Scene, PartitionParams), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| match e {
        ModelError::Syntax { .. } => Failure::input(format!("{}: {e}", path.display())),
        ModelError::Geometry(g) => Failure::input(format!("{}: {g}", path.display())),
    })
}

fn extract(args: &ExtractArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (scene, mut params) = load(&args.input)?;
    for (slot, v) in [
        (&mut params.p1, args.p1),
        (&mut params.p2, args.p2),
        (&mut params.p3, args.p3),
        (&mut params.p5, args.p5),
    ] {
        if let Some(v) = v {
            *slot = v;
        }
    }
    params.validate()?;
    let baseline = match args.baseline {
        BaselineArg::Galerkin => Baseline::Galerkin,
        BaselineArg::Collocation => Baseline::Collocation,
    };
    let opts = ExtractOptions {
        baseline,
        lu_fallback: args.lu_fallback,
        clock: Some(monotonic_seconds),
        keep_matrix: args.dump_matrix.is_some(),
        ..ExtractOptions::default()
    };
    let nets = match args.net {
        Some(n) => {
            if scene.conductor(n).is_none() {
                return Err(Failure::input(format!("unknown net {n}")));
            }
            vec![n]
        }
        None => {
            let mut all = scene.net_ids();
            all.sort_unstable();
            if all.is_empty() {
                return Err(gbem_core::Error::NoConductors.into());
            }
            all
        }
    };
    let mut rows = Vec::with_capacity(nets.len());
    for &n in &nets {
        let mut row = capacitance_row(&scene, n, &params, &opts)?;
        if let (Some(path), Some(m)) = (&args.dump_matrix, row.matrix.take()) {
            let target = if args.net.is_some() {
                path.clone()
            } else {
                let mut p = path.clone().into_os_string();
                p.push(format!(".net{n}"));
                PathBuf::from(p)
            };
            write_matrix_file(&m, &target).map_err(|e| Failure::input(format!("{}: {e}", target.display())))?;
        }
        rows.push(row);
    }
    let reciprocity = if args.net.is_none() {
        Some(CapacitanceMatrix::from_rows(rows.clone())?.reciprocity_defect)
    } else {
        None
    };
    let report = RunReport::new(
        args.input.display().to_string(),
        &params,
        baseline,
        &opts.quadrature,
        &rows,
        reciprocity,
    );
    let text = match args.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    match &args.output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(format!("writing output: {e}"))),
    }
}

fn run_selftest(pairs: usize, seed: u64, depth: u32, out: &mut dyn Write) -> Result<(), Failure> {
    let mut ok = true;
    for case in selftest::Case::ALL {
        let r = selftest::run_case(case, pairs, seed, depth);
        ok &= r.passed();
        let _ = writeln!(out, "{r}");
    }
    if ok {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_NUMERICAL,
            message: "kernel self-test exceeded its tolerances".into(),
        })
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Extract(a) => extract(a, out),
        Command::Validate { input } => load(input).map(|(scene, _)| {
            let _ = writeln!(
                out,
                "{}: ok ({} nets, {} regions)",
                input.display(),
                scene.net_ids().len(),
                scene.regions().len()
            );
        }),
        Command::Kernels {
            command: KernelCommand::Selftest { pairs, seed, depth },
        } => run_selftest(*pairs, *seed, *depth, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
