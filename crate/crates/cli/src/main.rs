//! `fracpga`: run the fractional solvers, the analytic examples, Sharpe-ratio
//! portfolio optimization and moving-window backtests from the shell.
//!
//! Exit codes: 0 success, 2 usage, 3 solver failure, 4 data error.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use fracpga::analytic::{
    build_sim1, build_sim2, sim1_analytic_solution, sim2_is_global, Sim1Params, Sim2Params,
};
use fracpga::backtest::{load_returns_csv, run_backtest, BacktestConfig, ReturnsUnit, Strategy};
use fracpga::{
    pga_solve, srm_pga, DenseVector, Error, ErrorClass, FractionalProblem, PgaConfig,
    ReturnsMatrix, SharpeModel, SolveResult, SolveStatus, SrmOptions,
};

const EXIT_USAGE: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_DATA: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "fracpga",
    version,
    about = "Proximal gradient solvers for fractional programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// min pᵀx/‖x‖ over the 2-simplex.
    Sim1(Sim1Args),
    /// min (a1 x1² + a2 x2² + a3)/(a4 x1² + a5 x2² + a6) over |x2| <= a0.
    Sim2(Sim2Args),
    /// Maximize the regularized Sharpe ratio of a returns table.
    Sharpe(SharpeArgs),
    /// Moving-window backtest of a portfolio strategy.
    Backtest(BacktestArgs),
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Step size as a fraction of the admissible bound.
    #[arg(long, default_value_t = 0.99)]
    alpha_frac: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Write the iterate trace CSV into --out.
    #[arg(long)]
    trace: bool,
    /// Output directory for trace files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct Sim1Args {
    /// Coefficients "p1,p2".
    #[arg(long, allow_hyphen_values = true, value_parser = parse_list)]
    p: Floats,
    #[arg(long, default_value = "0.5,0.5", allow_hyphen_values = true, value_parser = parse_list)]
    x0: Floats,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct Sim2Args {
    /// Half-width of the band |x2| <= a0.
    #[arg(long, default_value_t = 100.0)]
    a0: f64,
    /// Coefficients "a1,a2,a3,a4,a5,a6".
    #[arg(long, default_value = "4,2,3,3,2,3", allow_hyphen_values = true, value_parser = parse_list)]
    a: Floats,
    #[arg(long, default_value = "50,50", allow_hyphen_values = true, value_parser = parse_list)]
    x0: Floats,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Tolerance of the global-optimality verdict.
    #[arg(long, default_value_t = 1e-3)]
    global_tol: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Returns CSV: header of asset labels, optional leading period column.
    #[arg(long)]
    data: PathBuf,
    /// Unit of the returns in the file: decimal or percent.
    #[arg(long, default_value = "decimal", value_parser = parse_unit)]
    unit: ReturnsUnit,
    /// Covariance regularization ε̂.
    #[arg(long, default_value_t = fracpga::sharpe::DEFAULT_EPS_HAT)]
    eps: f64,
}

#[derive(Debug, Args)]
struct SharpeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Write the weight trace CSV into --out.
    #[arg(long)]
    trace: bool,
    /// Directory for sharpe.json (and the trace); nothing is written without it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BacktestArgs {
    #[command(flatten)]
    data: DataArgs,
    /// srm-pga, one-over-n or market.
    #[arg(long, default_value = "srm-pga", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Periods of history per optimization.
    #[arg(long, default_value_t = fracpga::backtest::DEFAULT_WINDOW)]
    window: usize,
    /// Directory for the JSON summary and per-period CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Comma-separated floats, e.g. "0.5,0.5".
#[derive(Debug, Clone)]
struct Floats(Vec<f64>);

fn parse_list(s: &str) -> Result<Floats, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("'{t}' is not a finite number"))
        })
        .collect::<Result<_, _>>()
        .map(Floats)
}

fn parse_unit(s: &str) -> Result<ReturnsUnit, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.class() {
            ErrorClass::Usage => EXIT_USAGE,
            ErrorClass::Solver => EXIT_SOLVER,
            ErrorClass::Data => EXIT_DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn data_io(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sim1(args) => cmd_sim1(args),
        Command::Sim2(args) => cmd_sim2(args),
        Command::Sharpe(args) => cmd_sharpe(args),
        Command::Backtest(args) => cmd_backtest(args),
    };
    match outcome {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn pair(name: &str, v: &[f64]) -> Result<DenseVector, Failure> {
    if v.len() != 2 {
        return Err(usage(format!("--{name} needs 2 values, got {}", v.len())));
    }
    Ok(DenseVector::new(v.to_vec())?)
}

fn solver_config<P: FractionalProblem>(
    problem: &P,
    args: &SolverArgs,
    tol: f64,
) -> Result<PgaConfig, Failure> {
    if !(args.alpha_frac > 0.0 && args.alpha_frac < 1.0) {
        return Err(usage(format!(
            "--alpha-frac must lie in (0, 1), got {}",
            args.alpha_frac
        )));
    }
    let cfg = PgaConfig::for_problem(problem)
        .with_alpha(args.alpha_frac * problem.step_bound())
        .with_tol(tol)
        .with_max_iter(args.max_iter)
        .with_trace(args.trace);
    cfg.validate(problem.step_bound())?;
    Ok(cfg)
}

fn require_converged(res: &SolveResult) -> Result<(), Failure> {
    match res.status {
        SolveStatus::Converged => Ok(()),
        SolveStatus::MaxIterReached => Err(Failure {
            code: EXIT_SOLVER,
            message: format!(
                "no convergence within {} iterations (last point {})",
                res.iterations,
                fmt_point(res.x_star.as_slice())
            ),
        }),
    }
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{:.4}", clean(*v))).collect();
    format!("({})", parts.join(", "))
}

/// Avoid printing "-0.0000".
fn clean(v: f64) -> f64 {
    if v.abs() < 5e-5 {
        0.0
    } else {
        v
    }
}

/// Writes `k, <coords>, objective` rows with full precision.
fn write_trace(path: &Path, coord_names: &[String], res: &SolveResult) -> Result<(), Failure> {
    let trace = res.trace.as_ref().expect("trace was requested");
    let mut out = String::from("k");
    for name in coord_names {
        out.push(',');
        out.push_str(name);
    }
    out.push_str(",objective\n");
    for (k, (x, ratio)) in trace.iterates.iter().zip(&trace.ratios).enumerate() {
        write!(out, "{k}").unwrap();
        for v in x.iter() {
            write!(out, ",{v}").unwrap();
        }
        writeln!(out, ",{ratio}").unwrap();
    }
    write_file(path, out.as_bytes())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| data_io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| data_io(path, e))
}

fn coords(n: usize, prefix: &str) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn cmd_sim1(args: Sim1Args) -> Result<String, Failure> {
    if args.p.0.len() != 2 {
        return Err(usage(format!("--p needs 2 values, got {}", args.p.0.len())));
    }
    let params = Sim1Params::new(args.p.0[0], args.p.0[1])?;
    let x0 = pair("x0", &args.x0.0)?;
    let problem = build_sim1(params);
    let cfg = solver_config(&problem, &args.solver, args.tol)?;
    let res = pga_solve(&problem, &x0, &cfg)?;
    require_converged(&res)?;

    let mut out = String::new();
    writeln!(out, "terminal point:  {}", fmt_point(res.x_star.as_slice())).unwrap();
    writeln!(out, "objective f/g:   {:.4}", res.ratio).unwrap();
    writeln!(out, "iterations:      {}", res.iterations).unwrap();
    writeln!(out, "step size:       {:.6e}", res.alpha).unwrap();
    writeln!(
        out,
        "analytic optimum: {}",
        fmt_point(sim1_analytic_solution(&params).as_slice())
    )
    .unwrap();
    if args.solver.trace {
        let path = args.solver.out.join("sim1_trace.csv");
        write_trace(&path, &coords(2, "x"), &res)?;
        writeln!(out, "trace:           {}", path.display()).unwrap();
    }
    Ok(out)
}

fn cmd_sim2(args: Sim2Args) -> Result<String, Failure> {
    let a: [f64; 6] = args
        .a
        .0
        .as_slice()
        .try_into()
        .map_err(|_| usage(format!("--a needs 6 values, got {}", args.a.0.len())))?;
    let params = Sim2Params::new(args.a0, a)?;
    let x0 = pair("x0", &args.x0.0)?;
    let problem = build_sim2(params)?;
    let cfg = solver_config(&problem, &args.solver, args.tol)?;
    let res = pga_solve(&problem, &x0, &cfg)?;
    require_converged(&res)?;

    let global = sim2_is_global(&params, &res.x_star, args.global_tol);
    let mut out = String::new();
    writeln!(out, "terminal point:  {}", fmt_point(res.x_star.as_slice())).unwrap();
    writeln!(out, "objective f/g:   {:.4}", res.ratio).unwrap();
    writeln!(out, "optimal value:   {:.4}", params.optimal_value()).unwrap();
    writeln!(out, "iterations:      {}", res.iterations).unwrap();
    writeln!(out, "|x1|:            {:.4e}", res.x_star[0].abs()).unwrap();
    writeln!(
        out,
        "global optimum:  {}",
        if global { "yes" } else { "no" }
    )
    .unwrap();
    if args.solver.trace {
        let path = args.solver.out.join("sim2_trace.csv");
        write_trace(&path, &coords(2, "x"), &res)?;
        writeln!(out, "trace:           {}", path.display()).unwrap();
    }
    Ok(out)
}

#[derive(Serialize)]
struct SharpeSummary<'a> {
    assets: &'a [String],
    weights: &'a [f64],
    sharpe: f64,
    global_certificate: bool,
    iterations: usize,
    eps: f64,
    returns_unit: ReturnsUnit,
}

fn load(args: &DataArgs) -> Result<ReturnsMatrix, Failure> {
    load_returns_csv(&args.data, args.unit).map_err(|e| match e {
        Error::Io(io) => data_io(&args.data, io),
        other => Failure::from(other),
    })
}

fn cmd_sharpe(args: SharpeArgs) -> Result<String, Failure> {
    let r = load(&args.data)?;
    let model = SharpeModel::build(&r, args.data.eps)?;
    let opts = SrmOptions {
        tol: Some(args.tol),
        max_iter: Some(args.max_iter),
        record_trace: args.trace && args.out.is_some(),
        ..SrmOptions::default()
    };
    let outcome = srm_pga(&model, &opts)?;
    require_converged(&outcome.solve)?;

    let labels = r.asset_labels();
    let width = labels.iter().map(String::len).max().unwrap_or(0);
    let mut out = String::from("weights:\n");
    for (label, w) in labels.iter().zip(outcome.weights.as_slice()) {
        writeln!(out, "  {label:<width$}  {:.4}", clean(*w)).unwrap();
    }
    writeln!(out, "Sharpe objective:   {:.4}", outcome.sharpe).unwrap();
    writeln!(out, "global certificate: {}", outcome.global_certificate).unwrap();
    writeln!(out, "iterations:         {}", outcome.solve.iterations).unwrap();

    if let Some(dir) = &args.out {
        let summary = SharpeSummary {
            assets: labels,
            weights: outcome.weights.as_slice(),
            sharpe: outcome.sharpe,
            global_certificate: outcome.global_certificate,
            iterations: outcome.solve.iterations,
            eps: args.data.eps,
            returns_unit: args.data.unit,
        };
        let path = dir.join("sharpe.json");
        let json = serde_json::to_vec_pretty(&summary).map_err(Error::from)?;
        write_file(&path, &json)?;
        writeln!(out, "report:             {}", path.display()).unwrap();
        if args.trace {
            let path = dir.join("sharpe_trace.csv");
            write_trace(&path, &coords(r.assets(), "w"), &outcome.solve)?;
            writeln!(out, "trace:              {}", path.display()).unwrap();
        }
    }
    Ok(out)
}

fn cmd_backtest(args: BacktestArgs) -> Result<String, Failure> {
    let r = load(&args.data)?;
    let cfg = BacktestConfig::new(args.strategy)
        .with_window(args.window)
        .with_eps_hat(args.data.eps)
        .with_unit(args.data.unit);
    let report = run_backtest(&r, &cfg)?;

    let mut out = String::new();
    writeln!(out, "strategy:     {}", args.strategy.name()).unwrap();
    writeln!(out, "periods:      {}", report.periods()).unwrap();
    match report.sharpe {
        Some(s) => writeln!(out, "Sharpe ratio: {s:.4}").unwrap(),
        None => writeln!(out, "Sharpe ratio: undefined (zero variance)").unwrap(),
    }
    writeln!(out, "final wealth: {:.4}", report.final_wealth).unwrap();

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| data_io(dir, e))?;
        let stem = format!("backtest_{}", args.strategy.name());
        let json_path = dir.join(format!("{stem}.json"));
        let csv_path = dir.join(format!("{stem}.csv"));
        let json = File::create(&json_path).map_err(|e| data_io(&json_path, e))?;
        report.write_json(BufWriter::new(json))?;
        let csv = File::create(&csv_path).map_err(|e| data_io(&csv_path, e))?;
        report.write_periods_csv(BufWriter::new(csv))?;
        writeln!(out, "report:       {}", json_path.display()).unwrap();
        writeln!(out, "periods csv:  {}", csv_path.display()).unwrap();
    }
    Ok(out)
}
