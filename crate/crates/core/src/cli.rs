//! Command-line front end. [`run`] takes the argument list and output
//! streams explicitly so the whole surface is testable in-process.
//!
//! Exit codes: 0 success, 2 input error, 3 iteration limit, 4 infeasible,
//! 5 verification failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::forward::{self, ForwardOptions};
use crate::ingest::{ingest_coordinates, parse_instance, GeneratorConfig, ParseError};
use crate::model::{validate_instance, Instance, Norm, Objective, Outcome, Point};
use crate::report::{self, human, machine, PlanError};
use crate::rowgen::{solve_inverse, verify_plan, InverseError, InverseOptions, RunTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Ok = 0,
    Input = 2,
    IterationLimit = 3,
    Infeasible = 4,
    VerifyFailed = 5,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn from_outcome(o: Outcome) -> Exit {
        match o {
            Outcome::Converged => Exit::Ok,
            Outcome::IterationLimit => Exit::IterationLimit,
            Outcome::Infeasible => Exit::Infeasible,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "invloc", version, about = "Inverse single-facility location with variable weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the forward location problem for an instance.
    Forward(ForwardArgs),
    /// Find the cheapest weight change that makes a goal point optimal.
    Inverse(InverseArgs),
    /// Generate an instance from a coordinate list with random parameters.
    Gen(GenArgs),
    /// Check whether a goal point is optimal under a plan's weights.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// Override the objective given in the instance header.
    #[arg(long, value_name = "minisum|minimax")]
    objective: Option<Objective>,
    /// Override the norm exponent given in the instance header.
    #[arg(long, value_name = "P")]
    p: Option<f64>,
}

#[derive(Args, Debug)]
struct ForwardArgs {
    instance: PathBuf,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Write `x y f iterations` with full precision.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Iteration cap of the forward solver.
    #[arg(long = "max-iter", value_name = "N")]
    max_iter: Option<usize>,
}

#[derive(Args, Debug)]
struct InverseArgs {
    /// Instance file; omit when using --batch.
    #[arg(required_unless_present = "batch")]
    instance: Option<PathBuf>,
    #[command(flatten)]
    problem: ProblemArgs,
    /// Goal point.
    #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true, required = true)]
    xbar: Vec<f64>,
    /// Stop once the weights change by at most this much.
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    /// Maximum number of master problems.
    #[arg(long = "max-iter", value_name = "N", default_value_t = 200)]
    max_iter: usize,
    /// Trace CSV path [default: <instance>.trace.csv].
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the final plan here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Solve every `.inst` file in a directory concurrently, writing
    /// `<file>.trace.csv` and `<file>.plan` beside each.
    #[arg(long, value_name = "DIR", conflicts_with_all = ["instance", "trace", "out"])]
    batch: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Coordinate list: `x y` or `index x y` per line.
    coordinates: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = Objective::Minisum)]
    objective: Objective,
    /// Output path [default: standard output].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    instance: PathBuf,
    plan: PathBuf,
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true, required = true)]
    xbar: Vec<f64>,
    /// Accept an objective gap of up to `10 * eps * max(1, f(x_bar))`.
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Plan { path: PathBuf, source: PlanError },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Inverse(#[from] InverseError),
    #[error(transparent)]
    Forward(#[from] forward::ForwardError),
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_instance(path: &Path, problem: &ProblemArgs) -> Result<Instance> {
    let mut inst = parse_instance(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    if let Some(o) = problem.objective {
        inst.objective = o;
    }
    if let Some(p) = problem.p {
        inst.norm = Norm::new(p).map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    if let Some(v) = validate_instance(&inst).into_iter().next() {
        return Err(CliError::Invalid(format!("{}: {v}", path.display())));
    }
    Ok(inst)
}

fn goal(xbar: &[f64]) -> Result<Point> {
    let p = Point::new(xbar[0], xbar[1]);
    if p.is_finite() {
        Ok(p)
    } else {
        Err(CliError::Invalid(format!("--xbar must be finite, got {p}")))
    }
}

fn point(p: Point) -> String {
    format!("({}, {})", human(p.x), human(p.y))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                Exit::Input.code()
            } else {
                let _ = write!(out, "{text}");
                Exit::Ok.code()
            };
        }
    };
    let result = match cli.command {
        Command::Forward(a) => cmd_forward(&a, out),
        Command::Inverse(a) => cmd_inverse(&a, out),
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
    };
    match result {
        Ok(code) => code.code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            Exit::Input.code()
        }
    }
}

fn cmd_forward(a: &ForwardArgs, out: &mut dyn Write) -> Result<Exit> {
    let inst = load_instance(&a.instance, &a.problem)?;
    let mut opts = ForwardOptions::default();
    if let Some(n) = a.max_iter {
        opts.max_iter = n;
    }
    let res = forward::solve(&inst, &inst.weights(), &opts)?;
    let _ = writeln!(out, "objective: {} (p = {})", inst.objective, human(inst.norm.p()));
    let _ = writeln!(out, "x: {}", point(res.x_star));
    let _ = writeln!(out, "f: {}", human(res.objective_value));
    let _ = writeln!(out, "iterations: {}", res.iterations);
    if res.degenerate {
        let _ = writeln!(out, "note: all weights are zero; every point is optimal");
    }
    if let Some(path) = &a.out {
        write(
            path,
            &format!(
                "{} {} {} {}\n",
                machine(res.x_star.x),
                machine(res.x_star.y),
                machine(res.objective_value),
                res.iterations
            ),
        )?;
    }
    Ok(if res.converged { Exit::Ok } else { Exit::IterationLimit })
}

fn inverse_options(a: &InverseArgs) -> Result<InverseOptions> {
    if !(a.eps > 0.0 && a.eps.is_finite()) {
        return Err(CliError::Invalid(format!("--eps must be positive, got {}", a.eps)));
    }
    Ok(InverseOptions {
        eps: a.eps,
        max_outer: a.max_iter,
        ..Default::default()
    })
}

fn summary(trace: &RunTrace) -> String {
    let last = trace.last();
    let mut s = format!(
        "outcome: {} ({})\niterations: {}\nx: {}\n",
        trace.outcome,
        trace.stop,
        trace.iterations(),
        point(last.x_k)
    );
    match trace.final_cost() {
        Some(c) => s += &format!("cost: {}\n", human(c)),
        None => s += "cost: none\n",
    }
    s += &format!("delta_w: {}\n", human(last.delta_w));
    if let Some(plan) = &trace.final_plan {
        let w: Vec<String> = plan.w_hat.iter().map(|&v| human(v)).collect();
        s += &format!("w_hat: {}\n", w.join(" "));
    }
    s
}

fn default_trace_path(instance: &Path) -> PathBuf {
    let mut name = instance.as_os_str().to_os_string();
    name.push(".trace.csv");
    PathBuf::from(name)
}

fn solve_one(
    path: &Path,
    a: &InverseArgs,
    x_bar: Point,
    opts: &InverseOptions,
    trace_path: &Path,
    plan_path: Option<&Path>,
) -> Result<RunTrace> {
    let inst = load_instance(path, &a.problem)?;
    let trace = solve_inverse(&inst, x_bar, opts)?;
    write(trace_path, &report::trace_csv(&trace))?;
    if let (Some(p), Some(plan)) = (plan_path, &trace.final_plan) {
        write(p, &report::write_plan(plan))?;
    }
    Ok(trace)
}

fn cmd_inverse(a: &InverseArgs, out: &mut dyn Write) -> Result<Exit> {
    let x_bar = goal(&a.xbar)?;
    let opts = inverse_options(a)?;
    if let Some(dir) = &a.batch {
        return batch(dir, a, x_bar, &opts, out);
    }
    let path = a.instance.as_deref().expect("clap requires an instance without --batch");
    let trace_path = a.trace.clone().unwrap_or_else(|| default_trace_path(path));
    let trace = solve_one(path, a, x_bar, &opts, &trace_path, a.out.as_deref())?;
    let _ = write!(out, "{}", summary(&trace));
    Ok(Exit::from_outcome(trace.outcome))
}

fn batch(
    dir: &Path,
    a: &InverseArgs,
    x_bar: Point,
    opts: &InverseOptions,
    out: &mut dyn Write,
) -> Result<Exit> {
    let entries = fs::read_dir(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "inst"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Invalid(format!("{}: no .inst files", dir.display())));
    }
    let results: Vec<Result<RunTrace>> = files
        .par_iter()
        .map(|f| {
            let mut plan = f.clone().into_os_string();
            plan.push(".plan");
            solve_one(f, a, x_bar, opts, &default_trace_path(f), Some(Path::new(&plan)))
        })
        .collect();
    let mut worst = Exit::Ok;
    let mut first_err = None;
    for (f, r) in files.iter().zip(results) {
        let name = f.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
        match r {
            Ok(t) => {
                let cost = t.final_cost().map_or_else(|| "none".to_string(), human);
                let _ = writeln!(
                    out,
                    "{name}: {} t={} cost={} delta_w={}",
                    t.outcome,
                    t.iterations(),
                    cost,
                    human(t.last().delta_w)
                );
                worst = worst.max(Exit::from_outcome(t.outcome));
            }
            Err(e) => {
                let _ = writeln!(out, "{name}: error");
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(worst),
    }
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<Exit> {
    let text = read(&a.coordinates)?;
    let norm = Norm::new(a.p).map_err(|e| CliError::Invalid(e.to_string()))?;
    let cfg = GeneratorConfig::with_seed(a.seed);
    let inst = ingest_coordinates(&text, &cfg, norm, a.objective).map_err(|source| {
        CliError::Parse {
            path: a.coordinates.clone(),
            source,
        }
    })?;
    let body = crate::ingest::write_instance(&inst);
    match &a.out {
        Some(path) => write(path, &body)?,
        None => {
            let _ = write!(out, "{body}");
        }
    }
    Ok(Exit::Ok)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<Exit> {
    let inst = load_instance(&a.instance, &a.problem)?;
    let plan = report::parse_plan(&read(&a.plan)?, &inst).map_err(|source| CliError::Plan {
        path: a.plan.clone(),
        source,
    })?;
    let x_bar = goal(&a.xbar)?;
    if !(a.eps > 0.0 && a.eps.is_finite()) {
        return Err(CliError::Invalid(format!("--eps must be positive, got {}", a.eps)));
    }
    let f_bar = forward::evaluate(&inst, x_bar, &plan.w_hat);
    let tol = 10.0 * a.eps * f_bar.max(1.0);
    let v = verify_plan(&inst, x_bar, &plan, tol, &ForwardOptions::default())?;
    let _ = writeln!(out, "gap: {}", human(v.gap));
    let _ = writeln!(out, "tolerance: {}", human(tol));
    let _ = writeln!(out, "x_fwd: {}", point(v.x_fwd));
    let _ = writeln!(out, "distance: {}", human(v.distance));
    let _ = writeln!(out, "result: {}", if v.pass { "pass" } else { "fail" });
    Ok(if v.pass { Exit::Ok } else { Exit::VerifyFailed })
}
