//! genconv: measure algebra, sampling, exact Kendall convolution, kernel
//! diagnostics, statistical checks, and named verification suites.
//!
//! Exit codes: 0 success, 1 a well-formed check or suite failed, 2 usage or
//! input errors (including computation errors, which are reported with the
//! module they came from). GENCONV_QUAD_TOL overrides the default quadrature
//! tolerance for every quadrature-backed operation.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use genconv_core::error::Error;
use genconv_core::families::Family;
use genconv_core::kernels::{
    default_product_grid, kernel_eval, polya_check, product_formula_residual,
};
use genconv_core::measures::MixtureMeasure;
use genconv_core::numerics::{linspace, QuadratureConfig};
use genconv_core::samplers::{sample_base, sample_family, sample_family_n, sample_measure, SeededRng};
use genconv_core::stats::{frequency_check, ks_against_measure, ks_two_sample, KsReport};
use genconv_core::suites::{run_suite, SuiteName};
use genconv_core::williamson::{kendall_convolve, kendall_pair_of};
use genconv_core::measures::DensityKind;

#[derive(Parser)]
#[command(
    name = "genconv",
    version,
    about = "Algebra of generalized convolutions on the half-line",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Convolve two point masses into an explicit mixture measure (JSON)
    Conv(ConvArgs),
    /// Draw from delta_theta1 conv delta_theta2 (CSV batch)
    Sample(SampleArgs),
    /// Tabulate the CDF of a measure file on a grid (CSV rows t,F)
    CdfGrid(CdfGridArgs),
    /// Kernel evaluation and diagnostics
    Kernel {
        #[command(subcommand)]
        cmd: KernelCmd,
    },
    /// Exact Kendall convolution machinery
    Kendall {
        #[command(subcommand)]
        cmd: KendallCmd,
    },
    /// Statistical checks; a failing check exits 1
    Check {
        #[command(subcommand)]
        cmd: CheckCmd,
    },
    /// Run a named verification suite; a failing suite exits 1
    Suite(SuiteArgs),
}

/// Family selector shared by the commands. The parameter flags are only
/// meaningful for the families that take them.
#[derive(Args, Clone)]
struct FamilyArgs {
    /// classical | symmetric | stable | kendall | max | kingman |
    /// kucharczak | ku | diamond | kendall_type
    #[arg(long)]
    family: Option<String>,
    /// Exponent (stable, kendall, ku, diamond, kendall_type)
    #[arg(long)]
    alpha: Option<f64>,
    /// Radial order above -1/2 (kingman)
    #[arg(long)]
    s: Option<f64>,
    /// Shape in (0, 1] (kucharczak)
    #[arg(long)]
    a: Option<f64>,
    /// Exponent (kucharczak)
    #[arg(long)]
    r: Option<f64>,
    /// Kernel power, at least 1 (ku)
    #[arg(long)]
    order: Option<u32>,
    /// Weight in [0, 1] (diamond) or exponent ratio at least 2 (kendall_type)
    #[arg(long)]
    p: Option<f64>,
    /// Mixing coefficient (kendall_type)
    #[arg(long)]
    c: Option<f64>,
}

impl FamilyArgs {
    fn build_optional(&self) -> Result<Option<Family<f64>>, Failure> {
        match &self.family {
            None => Ok(None),
            Some(_) => Ok(Some(self.build()?)),
        }
    }

    fn build(&self) -> Result<Family<f64>, Failure> {
        let name = self
            .family
            .as_deref()
            .ok_or_else(|| Failure::usage("--family is required"))?;
        let need = |v: Option<f64>, flag: &str| {
            v.ok_or_else(|| Failure::usage(format!("family {name} needs --{flag}")))
        };
        let fam = match name {
            "classical" => Family::Classical,
            "symmetric" => Family::Symmetric,
            "stable" => Family::Stable {
                alpha: need(self.alpha, "alpha")?,
            },
            "kendall" => Family::Kendall {
                alpha: need(self.alpha, "alpha")?,
            },
            "max" => Family::Max,
            "kingman" => Family::Kingman {
                s: need(self.s, "s")?,
            },
            "kucharczak" => Family::Kucharczak {
                a: need(self.a, "a")?,
                r: need(self.r, "r")?,
            },
            "ku" => Family::Ku {
                alpha: need(self.alpha, "alpha")?,
                n: self
                    .order
                    .ok_or_else(|| Failure::usage("family ku needs --order"))?,
            },
            "diamond" => Family::Diamond {
                p: need(self.p, "p")?,
                alpha: need(self.alpha, "alpha")?,
            },
            "kendall_type" => Family::KendallType {
                c: need(self.c, "c")?,
                alpha: need(self.alpha, "alpha")?,
                p: need(self.p, "p")?,
            },
            other => {
                return Err(Failure::usage(format!("unknown family '{other}'")));
            }
        };
        fam.validate().map_err(Failure::from)?;
        Ok(fam)
    }
}

#[derive(Args)]
struct ConvArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    y: f64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    theta1: f64,
    #[arg(long)]
    theta2: f64,
    /// Number of draws, at least 1
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Output file with a law-descriptor header line (values only on stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CdfGridArgs {
    /// Measure file (JSON)
    #[arg(long)]
    measure: PathBuf,
    /// start:stop:points with points >= 2
    #[arg(long)]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum KernelCmd {
    /// Evaluate the probability kernel at one point
    Eval {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        t: f64,
    },
    /// Positive-definiteness scan on a grid starting at 0 (JSON report)
    Polya {
        #[command(flatten)]
        family: FamilyArgs,
        /// start:stop:points; must start at 0 and reach past the kernel decay
        #[arg(long, default_value = "0:16:257")]
        grid: String,
    },
    /// Residual of the product formula against the convolved measure (JSON)
    ProductResidual {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        /// start:stop:points (a default grid is derived from x and y)
        #[arg(long)]
        grid: Option<String>,
    },
}

#[derive(Subcommand)]
enum KendallCmd {
    /// Exact CDF of the Kendall convolution of two measure files
    /// (CSV rows t,F,G)
    Cdf {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        lhs: PathBuf,
        #[arg(long)]
        rhs: PathBuf,
        /// start:stop:points with points >= 2
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// One- or two-sample Kolmogorov-Smirnov test. The right side is a
    /// measure file when it ends in .json, else a second batch.
    Ks {
        /// Batch file (CSV)
        #[arg(long)]
        lhs: PathBuf,
        /// Batch file (CSV) or measure file (JSON)
        #[arg(long)]
        rhs: PathBuf,
        /// 0.01 or 0.05
        #[arg(long, default_value_t = 0.01)]
        significance: f64,
    },
    /// Monte Carlo lack-of-memory residual against 4/sqrt(n)
    Lom {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Monotonicity witness: draws below the larger point. Non-monotonic
    /// families are held to their own left mass instead of zero.
    Monotone {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Max-representation identity via two-sample KS
    Maxrep {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 20_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct SuiteArgs {
    /// axioms | kendall-exact | lom | maxrep | weakstable | orderstat |
    /// normalization
    #[arg(long)]
    name: String,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Named check outcome for the non-KS checks.
#[derive(Serialize)]
struct CheckReport {
    check: &'static str,
    family: String,
    statistic: f64,
    threshold: f64,
    pass: bool,
}

enum Failure {
    /// Bad flags, bad files, bad parameters, or a computation error: exit 2.
    Usage(String),
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let origin = match e {
            Error::InvalidParameter { .. } | Error::NonPositiveInput { .. } => "input",
            Error::QuadratureNonConvergence { .. }
            | Error::SeriesNonConvergence { .. }
            | Error::BreakpointDerivative { .. } => "numerics",
            Error::MalformedMeasure(_)
            | Error::WeightSum { .. }
            | Error::UnboundedQuantile { .. } => "measures",
            Error::KendallTypeUnsupported
            | Error::NoLomLaw
            | Error::KernelNotVanishing
            | Error::NoConvexDecomposition
            | Error::NotAdmissible { .. } => "families",
            Error::DepthExceeded { .. } | Error::AlphaMismatch { .. } => "williamson",
            Error::EmptyBatch => "stats",
        };
        Failure::Usage(format!("{origin}: {e}"))
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    }
}

fn quad_cfg() -> Result<QuadratureConfig<f64>, Failure> {
    match std::env::var("GENCONV_QUAD_TOL") {
        Err(_) => Ok(QuadratureConfig::default()),
        Ok(raw) => {
            let tol: f64 = raw
                .parse()
                .map_err(|_| Failure::usage(format!("GENCONV_QUAD_TOL is not a number: {raw}")))?;
            if !(tol > 0.0) || !tol.is_finite() {
                return Err(Failure::usage("GENCONV_QUAD_TOL must be a positive number"));
            }
            Ok(QuadratureConfig::default()
                .with_abs_tol(tol)
                .with_rel_tol(tol))
        }
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::usage(format!(
            "grid must be start:stop:points, got '{spec}'"
        )));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| Failure::usage(format!("bad grid start '{}'", parts[0])))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| Failure::usage(format!("bad grid stop '{}'", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Failure::usage(format!("bad grid point count '{}'", parts[2])))?;
    if n < 2 || !a.is_finite() || !b.is_finite() || b <= a {
        return Err(Failure::usage(
            "grid needs finite start < stop and at least 2 points",
        ));
    }
    Ok(linspace(a, b, n))
}

fn read_measure(path: &Path) -> Result<MixtureMeasure<f64>, Failure> {
    let raw = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let m: MixtureMeasure<f64> = serde_json::from_str(&raw).map_err(|e| {
        Failure::usage(format!("malformed measure file {}: {e}", path.display()))
    })?;
    m.validate().map_err(Failure::from)?;
    Ok(m)
}

fn read_batch(path: &Path) -> Result<Vec<f64>, Failure> {
    let raw = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            Failure::usage(format!(
                "batch {} line {}: not a number: '{line}'",
                path.display(),
                i + 1
            ))
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(Failure::usage(format!(
            "batch {} holds no values",
            path.display()
        )));
    }
    Ok(values)
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.cmd {
        Cmd::Conv(args) => {
            let fam = args.family.build()?;
            let m = fam.delta_conv(args.x, args.y)?;
            emit(&args.out, &json_line(&m))?;
            Ok(0)
        }
        Cmd::Sample(args) => {
            if args.n == 0 {
                return Err(Failure::usage("--n must be at least 1"));
            }
            let fam = args.family.build()?;
            let mut rng = SeededRng::new(args.seed);
            let draws = sample_family_n(&fam, args.theta1, args.theta2, args.n, &mut rng)?;

            #[derive(Serialize)]
            struct Descriptor<'a> {
                law: &'a Family<f64>,
                theta1: f64,
                theta2: f64,
                seed: u64,
            }
            let header = serde_json::to_string(&Descriptor {
                law: &fam,
                theta1: args.theta1,
                theta2: args.theta2,
                seed: args.seed,
            })
            .expect("descriptor serialization");

            let mut content = String::new();
            if args.out.is_some() {
                content.push_str(&format!("# genconv v1 {header}\n"));
            }
            for v in &draws {
                content.push_str(&format!("{v:.16e}\n"));
            }
            emit(&args.out, &content)?;
            Ok(0)
        }
        Cmd::CdfGrid(args) => {
            let cfg = quad_cfg()?;
            let m = read_measure(&args.measure)?;
            let grid = parse_grid(&args.grid)?;
            let descriptor =
                serde_json::to_string(&m).expect("measure serialization");
            let mut content = format!("# genconv v1 {descriptor}\n");
            for &t in &grid {
                let f = m.cdf(t, &cfg)?;
                content.push_str(&format!("{t:.16e},{f:.16e}\n"));
            }
            emit(&args.out, &content)?;
            Ok(0)
        }
        Cmd::Kernel { cmd } => run_kernel(cmd),
        Cmd::Kendall { cmd } => run_kendall(cmd),
        Cmd::Check { cmd } => run_check(cmd),
        Cmd::Suite(args) => {
            let name = SuiteName::parse(&args.name)
                .ok_or_else(|| Failure::usage(format!("unknown suite '{}'", args.name)))?;
            let family = args.family.build_optional()?;
            let cfg = quad_cfg()?;
            let report = run_suite(name, family.as_ref(), args.seed, &cfg)?;
            emit(&args.out, &json_line(&report))?;
            if report.pass {
                Ok(0)
            } else {
                for case in report.cases.iter().filter(|c| !c.pass) {
                    eprintln!(
                        "FAIL {} statistic={} threshold={}",
                        case.id, case.statistic, case.threshold
                    );
                }
                Ok(1)
            }
        }
    }
}

fn run_kernel(cmd: KernelCmd) -> Result<i32, Failure> {
    match cmd {
        KernelCmd::Eval { family, t } => {
            let fam = family.build()?;
            let v = kernel_eval(&fam, t)?;
            println!("{v:.16e}");
            Ok(0)
        }
        KernelCmd::Polya { family, grid } => {
            let fam = family.build()?;
            let grid = parse_grid(&grid)?;
            let report = polya_check(&fam, &grid)?;
            print!("{}", json_line(&report));
            Ok(0)
        }
        KernelCmd::ProductResidual { family, x, y, grid } => {
            let fam = family.build()?;
            let cfg = quad_cfg()?;
            let grid = match grid {
                Some(spec) => parse_grid(&spec)?,
                None => default_product_grid(x, y),
            };
            let report = product_formula_residual(&fam, x, y, &grid, &cfg)?;
            print!("{}", json_line(&report));
            Ok(0)
        }
    }
}

fn run_kendall(cmd: KendallCmd) -> Result<i32, Failure> {
    match cmd {
        KendallCmd::Cdf {
            alpha,
            lhs,
            rhs,
            grid,
            out,
        } => {
            let cfg = quad_cfg()?;
            let m1 = read_measure(&lhs)?;
            let m2 = read_measure(&rhs)?;
            let grid = parse_grid(&grid)?;
            let p1 = kendall_pair_of(&m1, alpha, &cfg)?;
            let p2 = kendall_pair_of(&m2, alpha, &cfg)?;
            let pair = kendall_convolve(&p1, &p2)?;

            #[derive(Serialize)]
            struct Descriptor {
                op: &'static str,
                alpha: f64,
            }
            let header = serde_json::to_string(&Descriptor {
                op: "kendall_cdf",
                alpha,
            })
            .expect("descriptor serialization");
            let mut content = format!("# genconv v1 {header}\n");
            for &t in &grid {
                content.push_str(&format!(
                    "{t:.16e},{:.16e},{:.16e}\n",
                    pair.f(t)?,
                    pair.g(t)?
                ));
            }
            emit(&out, &content)?;
            Ok(0)
        }
    }
}

fn verdict<T: Serialize>(report: &T, pass: bool) -> Result<i32, Failure> {
    print!("{}", json_line(report));
    Ok(if pass { 0 } else { 1 })
}

fn run_check(cmd: CheckCmd) -> Result<i32, Failure> {
    match cmd {
        CheckCmd::Ks {
            lhs,
            rhs,
            significance,
        } => {
            let cfg = quad_cfg()?;
            let values = read_batch(&lhs)?;
            let is_measure = rhs
                .extension()
                .map(|e| e.eq_ignore_ascii_case("json"))
                .unwrap_or(false);
            let report: KsReport = if is_measure {
                let m = read_measure(&rhs)?;
                ks_against_measure(&values, &m, significance, &cfg)?
            } else {
                let other = read_batch(&rhs)?;
                ks_two_sample(&values, &other, significance)?
            };
            let pass = report.pass;
            verdict(&report, pass)
        }
        CheckCmd::Lom {
            family,
            x,
            y,
            n,
            seed,
        } => {
            if n == 0 {
                return Err(Failure::usage("--n must be at least 1"));
            }
            let fam = family.build()?;
            let statistic = fam.lom_residual(x, y, n, seed)?;
            let threshold = 4.0 / (n as f64).sqrt();
            let report = CheckReport {
                check: "lom",
                family: fam.to_string(),
                statistic,
                threshold,
                pass: statistic < threshold,
            };
            let pass = report.pass;
            verdict(&report, pass)
        }
        CheckCmd::Monotone {
            family,
            x,
            y,
            n,
            seed,
        } => {
            if n == 0 {
                return Err(Failure::usage("--n must be at least 1"));
            }
            let fam = family.build()?;
            let cfg = quad_cfg()?;
            let mut rng = SeededRng::new(seed);
            let big = x.max(y);
            let draws = sample_family_n(&fam, x, y, n, &mut rng)?;
            let below = draws.iter().filter(|v| **v < big * (1.0 - 1e-12)).count();
            let report = if fam.is_monotonic() {
                CheckReport {
                    check: "monotone",
                    family: fam.to_string(),
                    statistic: below as f64,
                    threshold: 0.5,
                    pass: below == 0,
                }
            } else {
                let p = fam.delta_conv(x, y)?.cdf_left(big, &cfg)?;
                let freq = frequency_check(below, n, p, 3.0)?;
                CheckReport {
                    check: "monotone-expected-left-mass",
                    family: fam.to_string(),
                    statistic: freq.z,
                    threshold: freq.z_max,
                    pass: freq.pass,
                }
            };
            let pass = report.pass;
            verdict(&report, pass)
        }
        CheckCmd::Maxrep { family, n, seed } => {
            if n == 0 {
                return Err(Failure::usage("--n must be at least 1"));
            }
            let fam = family.build()?;
            let report = maxrep_check(&fam, n, seed)?;
            let pass = report.pass;
            verdict(&report, pass)
        }
    }
}

/// Two-sample KS between max(theta1 X1, theta2 X2) and theta (X1 conv X2)
/// with X1 Pareto(3), X2 power(2), and theta the family's mixing law.
fn maxrep_check(fam: &Family<f64>, n: usize, seed: u64) -> Result<KsReport, Failure> {
    let mixing = fam.max_weak_rep_mixing_law()?;
    let x1_law = DensityKind::Pareto { beta: 3.0 };
    let x2_law = DensityKind::Pow { alpha: 2.0 };
    let rng = SeededRng::new(seed);

    let x1 = sample_base(&x1_law, n, &mut rng.substream(1))?.values;
    let x2 = sample_base(&x2_law, n, &mut rng.substream(2))?.values;
    let th1 = sample_measure(&mixing, n, &mut rng.substream(3))?;
    let th2 = sample_measure(&mixing, n, &mut rng.substream(4))?;
    let lhs: Vec<f64> = (0..n)
        .map(|i| (th1[i] * x1[i]).max(th2[i] * x2[i]))
        .collect();

    let y1 = sample_base(&x1_law, n, &mut rng.substream(5))?.values;
    let y2 = sample_base(&x2_law, n, &mut rng.substream(6))?.values;
    let th = sample_measure(&mixing, n, &mut rng.substream(7))?;
    let mut conv_rng = rng.substream(8);
    let mut rhs = Vec::with_capacity(n);
    for i in 0..n {
        rhs.push(th[i] * sample_family(fam, y1[i], y2[i], &mut conv_rng)?);
    }
    Ok(ks_two_sample(&lhs, &rhs, 0.01)?)
}
