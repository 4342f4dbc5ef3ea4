use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cuboid_complex::assembly::{assemble_space, operator_matrix, Operator};
use cuboid_complex::elements::{check_unisolvence, FamilyId, FamilyKind};
use cuboid_complex::linalg::{write_matrix_market, Arithmetic};
use cuboid_complex::mesh::CuboidMesh;
use cuboid_complex::polytensor::{parse_rational, Rational};
use cuboid_complex::random::DEFAULT_SEED;
use cuboid_complex::verify::{identity_suite, verify_complex, verify_dimensions, verify_local_complex, ComplexKind};
use cuboid_complex::Error;

/// Builds conforming gradgrad and elasticity element spaces on cuboid meshes
/// and verifies their properties exactly.
#[derive(Parser, Debug)]
#[command(name = "cuboid-complex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact rank test of a family's local DOF matrix.
    Unisolvence {
        #[arg(long)]
        family: FamilyKind,
        #[arg(long)]
        k: i64,
    },
    /// Exactness ladder of a discrete complex on a mesh.
    Complex {
        #[arg(long)]
        complex: ComplexKind,
        #[arg(long)]
        k: i64,
        #[command(flatten)]
        mesh: MeshArgs,
        /// Floating-point ranks instead of exact ones.
        #[arg(long)]
        float: bool,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Assembled global dimension against the closed form.
    Dims {
        #[arg(long)]
        family: FamilyKind,
        #[arg(long)]
        k: i64,
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// Writes one operator matrix of a complex in Matrix Market format.
    Export {
        #[arg(long)]
        complex: ComplexKind,
        /// gradgrad, curl, div, symgrad or curlcurlt
        #[arg(long)]
        edge: Operator,
        #[arg(long)]
        k: i64,
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(short, long)]
        output: PathBuf,
        /// Write doubles instead of exact p/q entries.
        #[arg(long)]
        float: bool,
    },
    /// curl/sym-grad identities on random vector fields.
    Identities {
        #[arg(long)]
        k: i64,
        #[arg(long, default_value_t = 50)]
        fields: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Polynomial complex on one reference cell (gradgrad or elasticity).
    Local {
        #[arg(long)]
        complex: ComplexKind,
        #[arg(long)]
        k: i64,
    },
}

#[derive(Args, Debug)]
struct MeshArgs {
    /// Uniform subdivision of the unit box, e.g. `2,1,1`.
    #[arg(long, conflicts_with_all = ["breakpoints_x", "breakpoints_y", "breakpoints_z"])]
    mesh: Option<String>,
    /// Breakpoints along x, e.g. `0,1/3,1`; missing axes default to `0,1`.
    #[arg(long, allow_hyphen_values = true)]
    breakpoints_x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    breakpoints_y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    breakpoints_z: Option<String>,
}

impl MeshArgs {
    fn build(&self) -> Result<CuboidMesh, Error> {
        if let Some(spec) = &self.mesh {
            let n: Vec<usize> = spec
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad mesh size '{s}'"))))
                .collect::<Result<_, _>>()?;
            let [nx, ny, nz] = n[..] else {
                return Err(Error::Parse(format!("--mesh expects nx,ny,nz, got '{spec}'")));
            };
            return CuboidMesh::unit_box([nx, ny, nz]);
        }
        let axis = |list: &Option<String>| -> Result<Vec<Rational>, Error> {
            match list {
                Some(s) => s.split(',').map(|t| parse_rational(t.trim())).collect(),
                None => Ok(vec![Rational::from_integer(0.into()), Rational::from_integer(1.into())]),
            }
        };
        CuboidMesh::new(axis(&self.breakpoints_x)?, axis(&self.breakpoints_y)?, axis(&self.breakpoints_z)?)
    }
}

/// A failed verification (exit 1) or a bad request (exit 2).
enum Failure {
    Verification(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InadmissibleOrder { .. } | Error::Parse(_) | Error::BadBreakpoints(_) | Error::KindMismatch(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Verification(other.to_string()),
        }
    }
}

fn emit<T: Serialize>(report: &T) {
    println!("{}", serde_json::to_string_pretty(report).expect("reports serialize"));
}

#[derive(Serialize)]
struct ExportReport {
    complex: String,
    edge: String,
    k: i64,
    mesh: String,
    rows: usize,
    cols: usize,
    nnz: usize,
    path: String,
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Unisolvence { family, k } => {
            let report = check_unisolvence(FamilyId::new(family, k)?)?;
            eprintln!("{family} k={k}: {} DOFs, rank {} of {}", report.dofs, report.rank, report.dim);
            emit(&report);
            Ok(report.nonsingular)
        }
        Command::Complex { complex, k, mesh, float, seed } => {
            let mode = if float { Arithmetic::Float } else { Arithmetic::Rational };
            let mesh = mesh.build()?;
            let report = verify_complex(complex, k, &mesh, mode, seed)?;
            eprintln!(
                "{complex} k={k} on {}: dims {:?}, ranks {:?}, cohomology {}, {}",
                report.mesh,
                report.dims,
                report.ranks,
                report.cohomology_dim,
                if report.fully_exact() { "exact" } else { "NOT exact" }
            );
            emit(&report);
            Ok(report.fully_exact())
        }
        Command::Dims { family, k, mesh } => {
            let report = verify_dimensions(FamilyId::new(family, k)?, &mesh.build()?)?;
            eprintln!("{family} k={k} on {}: formula {}, assembled {}", report.mesh, report.formula, report.assembled);
            emit(&report);
            Ok(report.matches)
        }
        Command::Export { complex, edge, k, mesh, output, float } => {
            let mesh = mesh.build()?;
            let families = complex.families(k)?;
            let Some(i) = complex.operators().iter().position(|&op| op == edge) else {
                return Err(Failure::Usage(format!("{complex} has no {edge} edge")));
            };
            let src = assemble_space(families[i], &mesh)?;
            let dst = assemble_space(families[i + 1], &mesh)?;
            let m = operator_matrix(&src, edge, &dst)?;
            let file = File::create(&output).map_err(Error::from)?;
            write_matrix_market(&m, BufWriter::new(file), float).map_err(Error::from)?;
            eprintln!("wrote {}x{} {edge} matrix to {}", m.nrows(), m.ncols(), output.display());
            emit(&ExportReport {
                complex: complex.name().into(),
                edge: edge.name().into(),
                k,
                mesh: mesh.describe(),
                rows: m.nrows(),
                cols: m.ncols(),
                nnz: m.nnz(),
                path: output.display().to_string(),
            });
            Ok(true)
        }
        Command::Identities { k, fields, seed } => {
            let report = identity_suite(k, fields, seed)?;
            eprintln!("k={k}: {} of {fields} fields with nonzero residual", report.failures);
            emit(&report);
            Ok(report.failures == 0)
        }
        Command::Local { complex, k } => {
            let report = verify_local_complex(complex, k)?;
            eprintln!("local {complex} k={k}: dims {:?}, ranks {:?}", report.dims, report.ranks);
            emit(&report);
            Ok(report.fully_exact())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
