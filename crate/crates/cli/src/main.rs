//! `dalat`: discrete analytic function calculus on rhombic lattice patches.
//!
//! Exit codes: 0 on success (all properties pass), 1 when a verification or
//! validation property fails, 2 on usage or input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use dalat_core::calculus::{backward_shift, exp_basis, forward_shift, monomial_basis};
use dalat_core::io;
use dalat_core::lattice::{Lattice, LatticeKind, VertexId};
use dalat_core::rational::{
    certificate_residual, kernel, quotient_certificate, shift_rank, RationalDa,
};
use dalat_core::realization::{
    evaluate, inverse, product, sum, tau_eval, tau_inverse, ScalarRational,
};
use dalat_core::verify::{verify_suite, VerifyConfig};
use dalat_core::Tolerance;

#[derive(Parser)]
#[command(
    name = "dalat",
    version,
    about = "Discrete analytic functions on rhombic lattices"
)]
struct Cli {
    /// Relative tolerance used by analyticity gates and verification
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Seed for randomized verification properties
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Output file (defaults to stdout where applicable)
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or validate lattice files
    Lattice {
        #[command(subcommand)]
        action: LatticeAction,
    },
    /// Export the pseudo-power basis function z^(n)
    Basis {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Export the eigenfunction e_t
    Eigen {
        #[arg(long)]
        lattice: PathBuf,
        /// Complex parameter as RE,IM (or just RE)
        #[arg(long, value_parser = parse_complex)]
        t: Complex64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Apply a shift operator to a function file
    Shift {
        #[command(subcommand)]
        direction: ShiftDirection,
    },
    /// Realization algebra: evaluate, add, multiply, invert
    Real {
        #[command(subcommand)]
        action: RealAction,
    },
    /// The tau transform between rational DA functions and rational functions
    Tau {
        #[command(subcommand)]
        action: TauAction,
    },
    /// Export the reproducing kernel K_w
    Kernel {
        #[arg(long)]
        lattice: PathBuf,
        /// Base vertex id
        #[arg(long)]
        w: u64,
        /// Kernel scale M > 1
        #[arg(long)]
        m: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Compute the polynomial quotient certificate of a realization
    Certify {
        #[arg(short = 'r', long = "realization")]
        realization: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
    },
    /// Shift-invariance rank of a function file
    Rank {
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Run the property-verification suite
    Verify {
        #[arg(long)]
        lattice: PathBuf,
        /// Pseudo-power span depth for random DA functions
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Series truncation order
        #[arg(long, default_value_t = 200)]
        truncation: usize,
        /// Comma-separated group filter (lattice,calculus,realization,rational)
        #[arg(long, value_delimiter = ',')]
        groups: Vec<String>,
    },
}

#[derive(Subcommand)]
enum LatticeAction {
    /// Generate a standard patch
    Gen(GenArgs),
    /// Validate a lattice file; exit 0 iff all invariants hold
    Validate { file: PathBuf },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    radius: u32,
    /// Rhombus angle in radians, required for --kind rhombic
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Square,
    Rhombic,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum ShiftDirection {
    /// Forward shift Z+
    Fwd(ShiftArgs),
    /// Backward shift Z-
    Bwd(ShiftArgs),
}

#[derive(Args)]
struct ShiftArgs {
    #[arg(long = "fn")]
    function: PathBuf,
    #[arg(long)]
    lattice: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result's domain lattice here (the backward shift loses the
    /// leashless boundary, so its domain can be a sub-lattice of the input)
    #[arg(long)]
    lattice_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RealAction {
    /// Evaluate a realization as a DA function
    Eval(RealArgs),
    /// Sum of two realizations
    Sum(RealArgs),
    /// Convolution product of two realizations
    Mul(RealArgs),
    /// Convolution inverse of a realization
    Inv(RealArgs),
}

#[derive(Args)]
struct RealArgs {
    #[arg(long)]
    lattice: PathBuf,
    #[arg(short = 'r', long = "realization")]
    first: PathBuf,
    #[arg(short = 's', long = "second")]
    second: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum TauAction {
    /// Evaluate tau f at a point
    Fwd {
        #[arg(short = 'r', long = "realization")]
        realization: PathBuf,
        #[arg(long, value_parser = parse_complex)]
        t: Complex64,
    },
    /// Build the companion realization of num/den
    Inv {
        /// Numerator coefficients, constant term first (e.g. "1,-0.3" or "1+2i,0.5")
        #[arg(long, value_parser = parse_coeffs)]
        num: Coeffs,
        /// Denominator coefficients, constant term first
        #[arg(long, value_parser = parse_coeffs)]
        den: Coeffs,
        #[arg(long)]
        lattice: PathBuf,
    },
}

#[derive(Clone)]
struct Coeffs(Vec<Complex64>);

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [re] => re
            .trim()
            .parse::<f64>()
            .map(|r| Complex64::new(r, 0.0))
            .map_err(|e| format!("bad real part '{re}': {e}")),
        [re, im] => {
            let r = re
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("bad real part '{re}': {e}"))?;
            let i = im
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("bad imaginary part '{im}': {e}"))?;
            Ok(Complex64::new(r, i))
        }
        _ => Err(format!("expected RE or RE,IM, got '{text}'")),
    }
}

/// One coefficient: `re`, `re+imi` or `re-imi` (e.g. `0.5-1.2i`).
fn parse_coeff(text: &str) -> Result<Complex64, String> {
    let s = text.trim();
    if let Some(stripped) = s.strip_suffix('i') {
        // split at the last +/- that is not a leading sign or exponent sign
        let bytes = stripped.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
                split = Some(k);
                break;
            }
        }
        let k = split.ok_or_else(|| format!("bad complex coefficient '{text}'"))?;
        let re: f64 = stripped[..k]
            .parse()
            .map_err(|e| format!("bad '{text}': {e}"))?;
        let im: f64 = match &stripped[k..] {
            "+" => 1.0,
            "-" => -1.0,
            rest => rest.parse().map_err(|e| format!("bad '{text}': {e}"))?,
        };
        Ok(Complex64::new(re, im))
    } else {
        s.parse::<f64>()
            .map(|r| Complex64::new(r, 0.0))
            .map_err(|e| format!("bad coefficient '{text}': {e}"))
    }
}

fn parse_coeffs(text: &str) -> Result<Coeffs, String> {
    text.split(',')
        .map(parse_coeff)
        .collect::<Result<Vec<_>, _>>()
        .map(Coeffs)
}

fn emit(text: String, out: &Option<PathBuf>) -> Result<(), dalat_core::Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_lattice(path: &Path) -> Result<Arc<Lattice>, dalat_core::Error> {
    Ok(Arc::new(io::load_lattice(path)?))
}

fn write_function(
    f: &dalat_core::DaFunction,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<(), dalat_core::Error> {
    let text = match format {
        Format::Csv => io::function_to_csv(f),
        Format::Json => io::function_to_json(f) + "\n",
    };
    emit(text, out)
}

fn run(cli: Cli) -> Result<u8, dalat_core::Error> {
    let tol = Tolerance::new(cli.tol);
    match cli.command {
        Command::Lattice { action } => match action {
            LatticeAction::Gen(args) => {
                let kind = match args.kind {
                    Kind::Square => LatticeKind::Square,
                    Kind::Rhombic => {
                        let alpha = args.alpha.ok_or_else(|| {
                            dalat_core::Error::InvalidParameter(
                                "--alpha is required for rhombic lattices".into(),
                            )
                        })?;
                        LatticeKind::Rhombic { alpha }
                    }
                };
                let lattice = Lattice::generate(kind, args.radius)?;
                emit(io::lattice_to_json(&lattice) + "\n", &cli.out)?;
                Ok(0)
            }
            LatticeAction::Validate { file } => {
                let text = std::fs::read_to_string(&file)?;
                match io::lattice_from_json(&text) {
                    Ok(lattice) => {
                        let report = lattice.validate();
                        for check in &report.checks {
                            println!(
                                "[{}] {}: {}",
                                if check.ok { "PASS" } else { "FAIL" },
                                check.name,
                                check.detail
                            );
                        }
                        println!(
                            "leash coverage: {}/{} vertices ({} without in-patch leashes)",
                            lattice.vertex_count() - report.leashless.len(),
                            lattice.vertex_count(),
                            report.leashless.len()
                        );
                        Ok(if report.ok { 0 } else { 1 })
                    }
                    Err(e @ dalat_core::Error::ValidationError { .. }) => {
                        println!("[FAIL] {e}");
                        Ok(1)
                    }
                    Err(e) => Err(e),
                }
            }
        },
        Command::Basis { lattice, n, format } => {
            let lat = load_lattice(&lattice)?;
            let basis = monomial_basis(&lat, n, tol)?;
            write_function(&basis[n], format, &cli.out)?;
            Ok(0)
        }
        Command::Eigen { lattice, t, format } => {
            let lat = load_lattice(&lattice)?;
            let e = exp_basis(&lat, t, tol)?;
            write_function(&e, format, &cli.out)?;
            Ok(0)
        }
        Command::Shift { direction } => {
            let (args, forward) = match direction {
                ShiftDirection::Fwd(a) => (a, true),
                ShiftDirection::Bwd(a) => (a, false),
            };
            let lat = load_lattice(&args.lattice)?;
            let f = io::load_function(&args.function, &lat)?;
            let shifted = if forward {
                forward_shift(&f, tol)?
            } else {
                backward_shift(&f, tol)?
            };
            if let Some(path) = &args.lattice_out {
                io::save_lattice(shifted.lattice(), path)?;
            }
            write_function(&shifted, args.format, &cli.out)?;
            Ok(0)
        }
        Command::Real { action } => {
            let (args, op) = match action {
                RealAction::Eval(a) => (a, "eval"),
                RealAction::Sum(a) => (a, "sum"),
                RealAction::Mul(a) => (a, "mul"),
                RealAction::Inv(a) => (a, "inv"),
            };
            let lat = load_lattice(&args.lattice)?;
            let first = io::load_realization(&args.first)?;
            let second = args
                .second
                .as_ref()
                .map(|p| io::load_realization(p))
                .transpose()?;
            let need_second = || {
                second.clone().ok_or_else(|| {
                    dalat_core::Error::InvalidParameter(format!(
                        "real {op} needs a second realization (-s FILE)"
                    ))
                })
            };
            match op {
                "eval" => {
                    let f = evaluate(&first, &lat, tol)?;
                    write_function(&f, args.format, &cli.out)?;
                }
                "sum" => {
                    let r = sum(&first, &need_second()?)?;
                    emit(io::realization_to_json(&r) + "\n", &cli.out)?;
                }
                "mul" => {
                    let r = product(&first, &need_second()?)?;
                    emit(io::realization_to_json(&r) + "\n", &cli.out)?;
                }
                _ => {
                    let r = inverse(&first, lat.direction_data(), tol)?;
                    emit(io::realization_to_json(&r) + "\n", &cli.out)?;
                }
            }
            Ok(0)
        }
        Command::Tau { action } => match action {
            TauAction::Fwd { realization, t } => {
                let r = io::load_realization(&realization)?;
                let value = tau_eval(&r, t, tol)?;
                let mut text = String::new();
                for i in 0..value.nrows() {
                    let row: Vec<String> = (0..value.ncols())
                        .map(|j| format!("{}{:+}i", value[(i, j)].re, value[(i, j)].im))
                        .collect();
                    text.push_str(&row.join(","));
                    text.push('\n');
                }
                emit(text, &cli.out)?;
                Ok(0)
            }
            TauAction::Inv { num, den, lattice } => {
                let lat = load_lattice(&lattice)?;
                let fraction = ScalarRational::new(num.0, den.0)?;
                let r = tau_inverse(&fraction, lat.direction_data(), tol)?;
                emit(io::realization_to_json(&r) + "\n", &cli.out)?;
                Ok(0)
            }
        },
        Command::Kernel {
            lattice,
            w,
            m,
            format,
        } => {
            let lat = load_lattice(&lattice)?;
            let kw = kernel(&lat, VertexId(w), m, tol)?;
            write_function(kw.values(), format, &cli.out)?;
            Ok(0)
        }
        Command::Certify {
            realization,
            lattice,
        } => {
            let lat = load_lattice(&lattice)?;
            let r = io::load_realization(&realization)?;
            let f = RationalDa::new(r, &lat, tol)?;
            let (p, q) = quotient_certificate(&f, tol)?;
            let residual = certificate_residual(&f, &p, &q, tol)?;
            let fmt_poly = |poly: &dalat_core::DaPolynomial| -> String {
                (0..=poly.degree())
                    .map(|k| {
                        let c = poly.coeff(k);
                        if poly.shape() == (1, 1) {
                            format!("{}{:+}i", c[(0, 0)].re, c[(0, 0)].im)
                        } else {
                            format!("<{}x{} matrix>", c.nrows(), c.ncols())
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let text = format!(
                "p coefficients: [{}]\nq degree: {}\nq coefficients: [{}]\nresidual |pI (.) f - q|: {residual:.3e}\n",
                fmt_poly(&p),
                q.degree(),
                fmt_poly(&q),
            );
            emit(text, &cli.out)?;
            Ok(0)
        }
        Command::Rank {
            function,
            lattice,
            k,
        } => {
            let lat = load_lattice(&lattice)?;
            let f = io::load_function(&function, &lat)?;
            let rank = shift_rank(&f, k, tol)?;
            emit(format!("{rank}\n"), &cli.out)?;
            Ok(0)
        }
        Command::Verify {
            lattice,
            depth,
            truncation,
            groups,
        } => {
            let lat = load_lattice(&lattice)?;
            let cfg = VerifyConfig {
                tol,
                basis_depth: depth,
                truncation,
                seed: cli.seed,
                groups: if groups.is_empty() {
                    None
                } else {
                    Some(groups)
                },
            };
            let report = verify_suite(&lat, &cfg)?;
            print!("{}", report.summary());
            if let Some(path) = &cli.out {
                std::fs::write(path, report.to_json() + "\n")?;
            }
            Ok(if report.ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
