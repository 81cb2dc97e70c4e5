//! Command-line front end: solvability pre-flight, single solves,
//! convergence studies and published-table reproduction.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nonlocal_evolve::contour::{integration_hyperbola, strip_height};
use nonlocal_evolve::harness::{
    self, evaluate_example, example_config, run_study, ReportFormat, StudyConfig,
};
use nonlocal_evolve::solver_hom::StepRule;
use nonlocal_evolve::symbol::{check_solvability, q_bound, Verdict};
use nonlocal_evolve::SolverError;

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;

#[derive(Parser)]
#[command(
    name = "nonlocal-evolve",
    about = "Exponentially convergent contour solver for m-point nonlocal evolution problems",
    version
)]
struct Cli {
    /// Worker threads for node-parallel solves (fallback:
    /// NONLOCAL_EVOLVE_THREADS; numeric output is byte-identical for any
    /// thread count).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solvability pre-flight: verdict, Q, strip width and contour axes.
    Check(CheckArgs),
    /// Solve once and print u(x, t).
    Solve(SolveArgs),
    /// Run the convergence study described by a config file.
    Study(StudyArgs),
    /// Re-run a published example and check it against its tolerances.
    Reproduce(ReproduceArgs),
}

/// Flags that override the config file.
#[derive(Args, Clone)]
struct Overrides {
    /// Truncation order N (replaces the config's N list).
    #[arg(long = "N", visible_alias = "n")]
    n: Option<usize>,
    /// Evaluation time t.
    #[arg(long)]
    t: Option<f64>,
    /// Step-size rule.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Step constant for the fixed-t rule.
    #[arg(long)]
    c1: Option<f64>,
    /// Replicate the published tables: h = N^{-1/2} literally.
    #[arg(long = "h-exact-paper")]
    h_exact_paper: bool,
    /// Contour shift as a fraction of rho0.
    #[arg(long)]
    rho1: Option<f64>,
    /// Smoothness exponent alpha of the data (uniform rule input).
    #[arg(long)]
    alpha: Option<f64>,
    /// Run even when the solvability verdict is Unknown.
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Uniform,
    #[value(name = "fixed-t")]
    FixedT,
}

#[derive(Args)]
struct CheckArgs {
    /// Study config (JSON).
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
    /// Report path (overrides the config's output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Published example to re-run (1, 2 or 3).
    #[arg(long)]
    example: u8,
    /// Report path (default: example<N>.<ext> in the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Jsonl => ReportFormat::JsonLines,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let threads = cli.threads.or_else(|| {
        std::env::var("NONLOCAL_EVOLVE_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(k) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: cannot configure {k} threads: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    }

    let outcome = match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Study(args) => cmd_study(args),
        Command::Reproduce(args) => cmd_reproduce(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                SolverError::UnknownVerdict => EXIT_UNKNOWN,
                _ => EXIT_ERROR,
            };
            ExitCode::from(code)
        }
    }
}

fn load_config(path: &PathBuf, ov: &Overrides) -> Result<StudyConfig, SolverError> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg: StudyConfig = serde_json::from_str(&text)
        .map_err(|e| SolverError::InvalidInput(format!("bad config {}: {e}", path.display())))?;
    apply_overrides(&mut cfg, ov);
    Ok(cfg)
}

fn apply_overrides(cfg: &mut StudyConfig, ov: &Overrides) {
    if let Some(n) = ov.n {
        cfg.n_list = vec![n];
    }
    if let Some(t) = ov.t {
        cfg.eval_t = t;
    }
    if let Some(rho1) = ov.rho1 {
        cfg.problem.rho1_frac = rho1;
    }
    if let Some(alpha) = ov.alpha {
        cfg.problem.smoothness_alpha = alpha;
    }
    if ov.force {
        cfg.force = true;
    }
    let alpha = ov.alpha.unwrap_or(cfg.problem.smoothness_alpha);
    if ov.h_exact_paper {
        cfg.rule = StepRule::Published;
    } else if let Some(mode) = ov.mode {
        cfg.rule = match mode {
            ModeArg::Uniform => StepRule::UniformT0 { alpha },
            ModeArg::FixedT => StepRule::FixedT {
                c1: ov.c1.unwrap_or(1.0),
            },
        };
    } else {
        match (&mut cfg.rule, ov.c1, ov.alpha) {
            (StepRule::FixedT { c1 }, Some(c), _) => *c1 = c,
            (StepRule::UniformT0 { alpha }, _, Some(a)) => *alpha = a,
            _ => {}
        }
    }
}

fn cmd_check(args: CheckArgs) -> Result<u8, SolverError> {
    let cfg = load_config(&args.config, &args.overrides)?;
    let instance = cfg.problem.build_model()?;
    let spec = instance.spectral_characteristics();
    let verdict = check_solvability(&cfg.problem.nonlocal, spec);
    let d1 = strip_height(spec)?;
    let hyp = integration_hyperbola(spec)?;
    let q = q_bound(&cfg.problem.nonlocal, spec);

    if args.json {
        let q_json = match &q {
            Ok(q) => serde_json::json!(q),
            Err(e) => serde_json::json!({ "uncertified": e.to_string() }),
        };
        let doc = serde_json::json!({
            "verdict": verdict.to_string(),
            "q": q_json,
            "d1": d1,
            "a_i": hyp.a,
            "b_i": hyp.b,
            "rho0": spec.rho0,
            "rho1": spec.rho1,
            "phi": spec.phi,
        });
        println!("{doc}");
    } else {
        println!("verdict: {verdict}");
        match &q {
            Ok(q) => println!("Q: {q:.12}"),
            Err(e) => println!("Q: uncertified ({e})"),
        }
        println!("d1: {d1:.12}");
        println!("a_I: {:.12}", hyp.a);
        println!("b_I: {:.12}", hyp.b);
    }
    Ok(match verdict {
        Verdict::Um1 | Verdict::Um2 => EXIT_OK,
        Verdict::Unknown => EXIT_UNKNOWN,
    })
}

fn cmd_solve(args: SolveArgs) -> Result<u8, SolverError> {
    let cfg = load_config(&args.config, &args.overrides)?;
    cfg.validate()?;
    let n = *cfg.n_list.last().expect("validated nonempty");
    let instance = cfg.problem.build_model()?;
    let (value, imag_residual) =
        cfg.problem
            .solve_value(&instance, cfg.rule, n, cfg.eval_x, cfg.eval_t, cfg.force)?;
    if args.json {
        let doc = serde_json::json!({
            "x": cfg.eval_x,
            "t": cfg.eval_t,
            "n": n,
            "value": value,
            "imag_residual": imag_residual,
        });
        println!("{doc}");
    } else {
        println!("u({}, {}) = {value:.16e}  (N = {n})", cfg.eval_x, cfg.eval_t);
    }
    Ok(EXIT_OK)
}

fn cmd_study(args: StudyArgs) -> Result<u8, SolverError> {
    let cfg = load_config(&args.config, &args.overrides)?;
    let report = run_study(&cfg)?;
    let format = args.format.into();
    let rendered = harness::render_report(&report, format);
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from));
    match out {
        Some(path) => {
            std::fs::write(&path, rendered)?;
            eprintln!("report written to {}", path.display());
        }
        None => print!("{rendered}"),
    }
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    Ok(if report.notes.is_empty() {
        EXIT_OK
    } else {
        EXIT_ERROR
    })
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<u8, SolverError> {
    let cfg = example_config(args.example)?;
    let started = Instant::now();
    let report = run_study(&cfg)?;
    let elapsed = started.elapsed().as_secs_f64();

    let format: ReportFormat = args.format.into();
    let ext = match format {
        ReportFormat::Csv => "csv",
        ReportFormat::JsonLines => "jsonl",
    };
    let path = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("example{}.{ext}", args.example)));
    harness::write_report(&report, format, &path)?;

    println!(
        "example {} ({} rows, {:.2}s) -> {}",
        args.example,
        report.rows.len(),
        elapsed,
        path.display()
    );
    let outcomes = evaluate_example(args.example, &report);
    let mut all_pass = true;
    for o in &outcomes {
        all_pass &= o.pass;
        println!(
            "[{}] {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.label,
            o.detail
        );
    }
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    Ok(if all_pass && report.notes.is_empty() {
        EXIT_OK
    } else {
        EXIT_ERROR
    })
}
