use clap::{Parser, Subcommand, ValueEnum};
use lar_dyn::error::CliError;
use lar_dyn::invariants::{invariant_suite, InvariantRow};
use lar_dyn::{check_unique_names, for_each_scenario, load_validated, run, scenario_dir, Options};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lar-dyn", version, about = "Run least-action choice dynamics scenarios")]
struct Cli {
    /// Multiply every tolerance (validation slack and invariant thresholds).
    #[arg(long, global = true, default_value_t = 1.0, value_parser = positive)]
    tol_scale: f64,
    /// Override every seed in the scenario(s).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario tasks and write CSV channels plus report.json.
    Run {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Validate only; prints the scenario with defaults applied.
    Check {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
    },
    /// Run the invariant suite and print the table.
    Invariants {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options { tol_scale: cli.tol_scale, seed: cli.seed };
    let code = match cli.command {
        Command::Check { scenarios } => check(&scenarios, &opts),
        Command::Run { scenarios, out } => run_all(&scenarios, &out, &opts),
        Command::Invariants { scenarios, format } => invariants(&scenarios, &opts, format),
    };
    ExitCode::from(code as u8)
}

fn report(path: &std::path::Path, e: &CliError) -> i32 {
    eprintln!("lar-dyn: {}: {e}", path.display());
    e.exit_code()
}

fn check(paths: &[PathBuf], opts: &Options) -> i32 {
    let mut code = 0;
    for path in paths {
        match load_validated(path, opts) {
            Ok(v) => println!("{}", serde_json::to_string_pretty(&v.scenario).expect("scenario serializes")),
            Err(e) => code = code.max(report(path, &e)),
        }
    }
    code
}

fn run_all(paths: &[PathBuf], out: &std::path::Path, opts: &Options) -> i32 {
    let mut code = 0;
    let mut ok = Vec::new();
    for path in paths {
        match load_validated(path, opts) {
            Ok(v) => ok.push((path.clone(), v)),
            Err(e) => code = code.max(report(path, &e)),
        }
    }
    if let Err(e) = check_unique_names(&ok) {
        return code.max(report(out, &e));
    }
    let batch = paths.len() > 1;
    let results = for_each_scenario(&ok.iter().map(|(p, _)| p.clone()).collect::<Vec<_>>(), |p| {
        let v = &ok.iter().find(|(q, _)| q == p).expect("validated").1;
        run::run(v, &scenario_dir(out, &v.scenario.name, batch), opts.tol_scale)
    });
    for ((path, _), r) in ok.iter().zip(results) {
        match r {
            Ok(rep) => {
                for t in rep.tasks.iter().filter(|t| t.status != "ok") {
                    eprintln!("lar-dyn: {}: task {} {}: {}", path.display(), t.task, t.status, t.outputs);
                }
                code = code.max(rep.exit_code);
            }
            Err(e) => code = code.max(report(path, &e)),
        }
    }
    code
}

fn invariants(paths: &[PathBuf], opts: &Options, format: Format) -> i32 {
    let mut code = 0;
    for path in paths {
        let rows = load_validated(path, opts).and_then(|v| {
            invariant_suite(&v, opts.tol_scale).map_err(|e| CliError::numerical("invariants", e))
        });
        match rows {
            Ok(rows) => {
                print_rows(path, &rows, format);
                if rows.iter().any(|r| !r.pass) {
                    code = code.max(4);
                }
            }
            Err(e) => code = code.max(report(path, &e)),
        }
    }
    code
}

fn print_rows(path: &std::path::Path, rows: &[InvariantRow], format: Format) {
    match format {
        Format::Json => {
            let v = serde_json::json!({ "scenario": path.display().to_string(), "invariants": rows });
            println!("{}", serde_json::to_string_pretty(&v).expect("rows serialize"));
        }
        Format::Table => {
            println!("# {}", path.display());
            println!("{:<32} {:>12} {:>12}  result", "invariant", "defect", "tolerance");
            for r in rows {
                let verdict = if r.pass { "pass" } else { "FAIL" };
                println!("{:<32} {:>12.3e} {:>12.3e}  {verdict}", r.name, r.defect, r.tolerance);
            }
        }
    }
}
