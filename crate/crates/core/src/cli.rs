//! Command-line front end. [`run`] is what the binary calls; it returns
//! the process exit status (0 success, 1 computation error, 2 usage).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::analysis::{analyze_parameter, find_symmetry_parameters, solve_virtual_cycle, ParamBox};
use crate::conjugacy::ModelConstants;
use crate::json::{to_json, ComplexJson};
use crate::newton::{classify_newton_orbit, period_under_iterate, solve_newton_virtual_cycle, NewtonFate, NewtonParam};
use crate::orbit::IterationSettings;
use crate::rational::{approximation_report, AnSpec};
use crate::render::{render_dynamical_plane, render_parameter_plane, DynInstance, ParamFamily, TileGrid, Viewport};
use crate::service::{encode_output, OutputFormat};
use crate::TangentParam;

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn parse_width(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(w) if w.is_finite() && w > 0.0 => Ok(w),
        _ => Err(format!("'{s}' is not a positive number")),
    }
}

/// `RE,IM` or a bare real number.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parse = |t: &str| -> Result<f64, String> {
        let x: f64 = t.trim().parse().map_err(|_| format!("'{t}' is not a number"))?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(format!("'{t}' is not finite"))
        }
    };
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
        None => Ok(Complex64::new(parse(s)?, 0.0)),
    }
}

#[derive(Debug, Parser)]
#[command(name = "tandelbrot", version, about = "Explore the generalized tangent family and its Newton relatives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Tangent,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Png,
    Ppm,
    Tile,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Png => OutputFormat::Png,
            FormatArg::Ppm => OutputFormat::Ppm,
            FormatArg::Tile => OutputFormat::Tile,
        }
    }
}

#[derive(Debug, Args)]
struct ViewArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "-0.05,0")]
    center: Complex64,
    #[arg(long, value_parser = parse_width, default_value = "1.2")]
    width: f64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..), default_value_t = 512)]
    px: u32,
    /// Defaults to `--px`.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    py: Option<u32>,
    #[arg(long = "max-iter", default_value_t = 5000)]
    max_iter: u32,
}

impl ViewArgs {
    fn viewport(&self) -> crate::Result<Viewport> {
        Viewport::new(self.center, self.width, self.px, self.py.unwrap_or(self.px))
    }

    fn settings(&self) -> IterationSettings {
        IterationSettings::rendering().with_max_iter(self.max_iter)
    }
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to the extension of `--out`, else png.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

impl OutArgs {
    fn format(&self) -> OutputFormat {
        if let Some(f) = self.format {
            return f.into();
        }
        match self.out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("ppm") => OutputFormat::Ppm,
            Some("tile") | Some("tndl") | Some("bin") => OutputFormat::Tile,
            _ => OutputFormat::Png,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a parameter plane.
    RenderParam {
        #[arg(long, value_enum, default_value = "tangent")]
        family: FamilyArg,
        #[command(flatten)]
        view: ViewArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Render the dynamical plane of one map.
    RenderDyn {
        #[arg(long, value_enum, default_value = "tangent")]
        family: FamilyArg,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        alpha: Option<Complex64>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: Option<Complex64>,
        #[command(flatten)]
        view: ViewArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Report the fate of the free singular value as JSON.
    Analyze {
        #[arg(long, value_enum, default_value = "tangent")]
        family: FamilyArg,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        alpha: Option<Complex64>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: Option<Complex64>,
        #[arg(long = "max-iter", default_value_t = 100_000)]
        max_iter: u32,
    },
    /// Print the model constants p*, t and C.
    Constants,
    /// Find parameters with α² e^{(α²−1)/(8α)} = 1 in a box.
    SymmetryParams {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "-0.012,0.004")]
        center: Complex64,
        /// Side length of the search box.
        #[arg(long, value_parser = parse_width, default_value = "0.016")]
        width: f64,
    },
    /// Solve for a parameter whose free value lands on a pole at step n.
    VirtualCycle {
        #[arg(long, value_enum, default_value = "tangent")]
        family: FamilyArg,
        #[arg(long)]
        n: u32,
        /// Initial guess (tangent family).
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        alpha: Option<Complex64>,
        /// Initial guess (Newton family).
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: Option<Complex64>,
    },
    /// Membership mask of A_n, A_{n,k} or A_n(δ) on a grid inside |α| < 1/2.
    AnMask {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "-0.05,0")]
        center: Complex64,
        #[arg(long, value_parser = parse_width, default_value = "0.6")]
        width: f64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..), default_value_t = 512)]
        px: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        py: Option<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sup error of the rational approximants for k = 2^lo ..= 2^hi.
    ApproxReport {
        #[arg(long, default_value_t = 4)]
        lo: u32,
        #[arg(long, default_value_t = 13)]
        hi: u32,
        /// Lattice size for the parameter and point samples.
        #[arg(long, default_value_t = 48)]
        grid: u32,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of static UI assets.
        #[arg(long = "static-dir")]
        static_dir: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Computation(String),
}

impl From<crate::TandelbrotError> for Failure {
    fn from(e: crate::TandelbrotError) -> Self {
        Failure::Computation(e.to_string())
    }
}

impl From<crate::service::ApiError> for Failure {
    fn from(e: crate::service::ApiError) -> Self {
        Failure::Computation(e.message)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Computation(e.to_string())
    }
}

type CliResult = std::result::Result<(), Failure>;

fn emit(out: &OutArgs, grid: &TileGrid) -> CliResult {
    let bytes = encode_output(grid, out.format())?;
    match &out.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn println(s: &str) -> CliResult {
    let mut o = std::io::stdout().lock();
    writeln!(o, "{s}")?;
    Ok(())
}

fn need(v: Option<Complex64>, flag: &str) -> std::result::Result<Complex64, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing required flag {flag}")))
}

fn newton_report(a: Complex64, s: &IterationSettings) -> crate::Result<String> {
    let fate = classify_newton_orbit(&NewtonParam::new(a)?, s)?;
    let (name, root, cycle) = match fate {
        NewtonFate::ConvergedToRoot { root, .. } => ("root", Some(root), None),
        NewtonFate::AttractingCycle { info, .. } => ("cycle", None, Some(info)),
        NewtonFate::PoleHit { .. } => ("pole", None, None),
        NewtonFate::Undecided { .. } => ("undecided", None, None),
    };
    Ok(to_json(&json!({
        "a": ComplexJson::from(a),
        "fate": name,
        "steps": fate.steps(),
        "root": root.map(ComplexJson::from),
        "period": cycle.map(|c| c.period),
        "period_under_square": cycle.map(|c| period_under_iterate(c.period, 2)),
        "multiplier": cycle.map(|c| ComplexJson::from(c.multiplier)),
        "multiplier_abs": cycle.map(|c| c.multiplier.norm()),
    })))
}

fn execute(cmd: Command) -> CliResult {
    match cmd {
        Command::RenderParam { family, view, out } => {
            let fam = match family {
                FamilyArg::Tangent => ParamFamily::Tangent,
                FamilyArg::Newton => ParamFamily::Newton,
            };
            emit(&out, &render_parameter_plane(fam, &view.viewport()?, &view.settings())?)
        }
        Command::RenderDyn { family, alpha, a, view, out } => {
            let inst = match family {
                FamilyArg::Tangent => DynInstance::Tangent(TangentParam::new(need(alpha, "--alpha")?)?),
                FamilyArg::Newton => DynInstance::Newton(NewtonParam::new(need(a, "--a")?)?),
            };
            emit(&out, &render_dynamical_plane(inst, &view.viewport()?, &view.settings())?)
        }
        Command::Analyze { family, alpha, a, max_iter } => {
            let s = IterationSettings::analysis().with_max_iter(max_iter);
            match family {
                FamilyArg::Tangent => println(&analyze_parameter(need(alpha, "--alpha")?, &s)?.to_json()),
                FamilyArg::Newton => println(&newton_report(need(a, "--a")?, &s)?),
            }
        }
        Command::Constants => {
            let m = ModelConstants::get();
            println(&to_json(&json!({
                "p_star": m.p_star,
                "t": m.t,
                "C": m.c,
                "residual": m.residual(),
            })))
        }
        Command::SymmetryParams { center, width } => {
            let found = find_symmetry_parameters(&ParamBox::around(center, 0.5 * width));
            let out: Vec<ComplexJson> = found.into_iter().map(ComplexJson::from).collect();
            println(&to_json(&out))
        }
        Command::VirtualCycle { family, n, alpha, a } => {
            let s = IterationSettings::analysis();
            match family {
                FamilyArg::Tangent => println(&to_json(&solve_virtual_cycle(n, need(alpha, "--alpha")?, &s)?)),
                FamilyArg::Newton => {
                    let root = solve_newton_virtual_cycle(n, need(a, "--a")?, &s)?;
                    println(&to_json(&json!({ "a": ComplexJson::from(root), "n": n })))
                }
            }
        }
        Command::AnMask { n, k, delta, center, width, px, py, out } => {
            let vp = Viewport::new(center, width, px, py.unwrap_or(px))?;
            let spec = AnSpec { n, k, delta };
            emit(&out, &render_parameter_plane(ParamFamily::AnMask(spec), &vp, &IterationSettings::rendering())?)
        }
        Command::ApproxReport { lo, hi, grid } => {
            if lo > hi || hi > 30 || grid == 0 {
                return Err(Failure::Usage("need lo <= hi <= 30 and grid > 0".into()));
            }
            println(&to_json(&approximation_report(lo, hi, grid)))
        }
        Command::Serve { port, static_dir } => {
            let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
            rt.block_on(crate::service::serve(port, static_dir))?;
            Ok(())
        }
    }
}

fn init_workers() {
    if let Some(n) = crate::render::worker_count_from_env() {
        // fails only if a pool already exists, which is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    init_workers();
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Computation(msg)) => {
            eprintln!("error: {msg}");
            EXIT_COMPUTATION
        }
    }
}
