//! Command-line front end: single-point spectra, slice scans, boundary
//! tracing, transition classification, curve sampling and the self-test
//! battery. Exit codes: 0 success, 2 usage error, 3 numerical or tolerance
//! failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ptlattice_core::boundary::{sample_alpha_curve, sample_b_curve, sample_c_curve};
use ptlattice_core::domain::{c_slice, classify_transition, membership, trace_boundary, GridSpec, RangeSpec};
use ptlattice_core::model::{CartesianCouplings, ProductCouplings};
use ptlattice_core::secular::spectrum;
use ptlattice_core::Error;

#[derive(Parser)]
#[command(name = "ptlattice", version, about = "Spectra and phase boundaries of a PT-symmetric six-site lattice")]
struct Cli {
    /// Worker threads for grid commands (defaults to all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Write output to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form spectrum at one parameter point
    Spectrum(SpectrumArgs),
    /// Physical C-intervals at fixed (A, B), or a dense C scan
    Slice(SliceArgs),
    /// Exceptional-point boundary mesh over an (A, B) grid
    Trace(TraceArgs),
    /// Classify a boundary crossing as first or second kind
    Classify(ClassifyArgs),
    /// Sample one implicit curve as a plot-ready two-column table
    Curve(CurveArgs),
    /// Run the validation battery
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long = "A", allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long = "B", allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long = "C", allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    y: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    z: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SliceArgs {
    #[arg(long = "A", allow_negative_numbers = true)]
    a: f64,
    #[arg(long = "B", allow_negative_numbers = true)]
    b: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Scan C and emit (C, verdict) rows; optional value is "lo:hi:step"
    #[arg(long, num_args = 0..=1, default_missing_value = "-1:6:0.001", allow_hyphen_values = true)]
    scan: Option<String>,
}

#[derive(Args)]
struct TraceArgs {
    /// Grid as "amin:amax:step,bmin:bmax:step"
    #[arg(long, default_value = "0.01:3:0.01,-1:3:0.01", allow_hyphen_values = true)]
    grid: String,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long = "A", allow_negative_numbers = true)]
    a: f64,
    #[arg(long = "B", allow_negative_numbers = true)]
    b: f64,
    #[arg(long = "C", allow_negative_numbers = true)]
    c: f64,
    /// Crossing direction as "da,db,dc"
    #[arg(long, allow_hyphen_values = true)]
    dir: String,
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CurveKind {
    /// C(E) at fixed (B, alpha)
    C,
    /// alpha(E) at fixed (B, C)
    Alpha,
    /// B(E) at fixed (C, alpha)
    B,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long, value_enum)]
    kind: CurveKind,
    #[arg(long = "B", allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long = "C", allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Energy range as "lo:hi:step"
    #[arg(long, default_value = "-3:3:0.001", allow_hyphen_values = true)]
    range: String,
}

#[derive(Args)]
struct SelftestArgs {
    /// Sample count for the randomized checks
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().is_err() {
            eprintln!("failed to size the worker pool");
            return ExitCode::from(EXIT_NUMERIC);
        }
    }
    let out = cli.out.clone();
    match run(cli) {
        Ok(payload) => match emit(&out, &payload) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_NUMERIC)
            }
        },
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

enum CliError {
    Usage(String),
    Numeric(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

fn emit(out: &Option<PathBuf>, payload: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, payload),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(payload.as_bytes())
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Slice(args) => cmd_slice(args),
        Command::Trace(args) => cmd_trace(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Curve(args) => cmd_curve(args),
        Command::Selftest(args) => cmd_selftest(args),
    }
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<String, CliError> {
    let products = match (args.a, args.b, args.c, args.x, args.y, args.z) {
        (Some(a), Some(b), Some(c), None, None, None) => ProductCouplings::new(a, b, c),
        (None, None, None, Some(x), Some(y), Some(z)) => CartesianCouplings::new(x, y, z).to_products(),
        _ => {
            return Err(CliError::Usage(
                "pass exactly one full triple: --A --B --C, or --x --y --z".into(),
            ))
        }
    };
    if !(args.tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let r = spectrum(&products, args.tol);
    match args.format {
        Format::Json => Ok(format!("{}\n", serde_json::to_string(&r).expect("serializable"))),
        Format::Csv => {
            let mut csv = String::from("re,im\n");
            for e in &r.energies {
                csv.push_str(&format!("{:.16e},{:.16e}\n", e.re, e.im));
            }
            Ok(csv)
        }
    }
}

fn cmd_slice(args: SliceArgs) -> Result<String, CliError> {
    if !(args.tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    match args.scan {
        None => {
            let slice = c_slice(args.a, args.b, args.tol)?;
            Ok(format!("{}\n", serde_json::to_string(&slice).expect("serializable")))
        }
        Some(range) => {
            let spec = parse_range(&range)?;
            let mut csv = String::from("C,verdict\n");
            for c in spec.values() {
                let v = membership(&ProductCouplings::new(args.a, args.b, c), args.tol);
                csv.push_str(&format!("{:.16e},{:?}\n", c, v.verdict));
            }
            Ok(csv)
        }
    }
}

fn cmd_trace(args: TraceArgs) -> Result<String, CliError> {
    let grid = parse_grid(&args.grid)?;
    let mesh = trace_boundary(&grid)?;
    Ok(mesh.to_csv())
}

fn cmd_classify(args: ClassifyArgs) -> Result<String, CliError> {
    let parts: Vec<&str> = args.dir.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("--dir wants \"da,db,dc\", got {:?}", args.dir)));
    }
    let mut dir = [0.0f64; 3];
    for (slot, part) in dir.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("unparseable direction component {part:?}")))?;
    }
    let p = ProductCouplings::new(args.a, args.b, args.c);
    let report = classify_transition(&p, dir, args.eps, args.tol)?;
    Ok(format!("{}\n", serde_json::to_string(&report).expect("serializable")))
}

fn cmd_curve(args: CurveArgs) -> Result<String, CliError> {
    let spec = parse_range(&args.range)?;
    let (header, points) = match args.kind {
        CurveKind::C => {
            let (b, alpha) = match (args.b, args.alpha) {
                (Some(b), Some(alpha)) => (b, alpha),
                _ => return Err(CliError::Usage("curve --kind c needs --B and --alpha".into())),
            };
            ("E,C", sample_c_curve(alpha, b, spec.lo, spec.hi, spec.step))
        }
        CurveKind::Alpha => {
            let (b, c) = match (args.b, args.c) {
                (Some(b), Some(c)) => (b, c),
                _ => return Err(CliError::Usage("curve --kind alpha needs --B and --C".into())),
            };
            ("E,alpha", sample_alpha_curve(b, c, spec.lo, spec.hi, spec.step))
        }
        CurveKind::B => {
            let (c, alpha) = match (args.c, args.alpha) {
                (Some(c), Some(alpha)) => (c, alpha),
                _ => return Err(CliError::Usage("curve --kind b needs --C and --alpha".into())),
            };
            ("E,B", sample_b_curve(c, alpha, spec.lo, spec.hi, spec.step))
        }
    };
    let mut csv = format!("{header}\n");
    for (e, v) in points {
        csv.push_str(&format!("{:.16e},{:.16e}\n", e, v));
    }
    Ok(csv)
}

fn cmd_selftest(args: SelftestArgs) -> Result<String, CliError> {
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    let reports = ptlattice_core::battery::run_battery(args.samples, args.seed);
    let mut table = String::new();
    let mut all_passed = true;
    for r in &reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        table.push_str(&format!("[{status}] {:<30} {} ({} ms)\n", r.name, r.detail, r.millis));
        all_passed &= r.passed;
    }
    table.push_str(if all_passed { "all checks passed\n" } else { "some checks FAILED\n" });
    if all_passed {
        Ok(table)
    } else {
        // the table still goes to stdout so the failure is inspectable
        print!("{table}");
        Err(CliError::Numeric("self-test battery reported failures".into()))
    }
}

fn parse_range(text: &str) -> Result<RangeSpec, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("range wants \"lo:hi:step\", got {text:?}")));
    }
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
    let nums = nums.map_err(|_| CliError::Usage(format!("unparseable range {text:?}")))?;
    RangeSpec::new(nums[0], nums[1], nums[2]).map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_grid(text: &str) -> Result<GridSpec, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!(
            "grid wants \"amin:amax:step,bmin:bmax:step\", got {text:?}"
        )));
    }
    Ok(GridSpec { a: parse_range(parts[0])?, b: parse_range(parts[1])? })
}
