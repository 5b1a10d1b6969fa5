use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hho::driver::{
    aitken_extrapolate, benchmark, init_threads, rate_table, read_csv, run_afem, verify, write_csv,
    BenchmarkId, RunSettings,
};

#[derive(Parser)]
#[command(name = "hho", version, about = "Adaptive unstabilized HHO for degenerate convex minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn problem_id(s: &str) -> Result<BenchmarkId, String> {
    s.parse().map_err(|e: hho::Error| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Run one benchmark and write its convergence history as CSV.
    Run {
        #[arg(long, value_parser = problem_id)]
        problem: Option<BenchmarkId>,
        /// Polynomial degree (0 to 4).
        #[arg(long)]
        k: Option<usize>,
        /// Dorfler bulk parameter; 1 refines uniformly.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        max_ndof: Option<f64>,
        /// CSV destination (standard output if absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// `key = value` file; flags given here override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Initial mesh file replacing the benchmark's.
        #[arg(long)]
        mesh: Option<PathBuf>,
        /// Worker threads (0 = automatic); defaults to HHO_NUM_THREADS.
        #[arg(long)]
        threads: Option<usize>,
        /// Weight of the lower-order term (two-well only).
        #[arg(long)]
        alpha: Option<f64>,
        /// Gradient tolerance of the Newton solver.
        #[arg(long)]
        solver_tol: Option<f64>,
    },
    /// Run the built-in property checks.
    Verify,
    /// Convergence rates with respect to ndof from a CSV history.
    Table {
        csv: PathBuf,
        /// Take the reference energy of this benchmark.
        #[arg(long, value_parser = problem_id)]
        problem: Option<BenchmarkId>,
        /// Reference energy for E - LEB (default: Aitken extrapolation of Eh).
        #[arg(long, allow_hyphen_values = true)]
        reference: Option<f64>,
        /// Number of trailing levels for the second slope column.
        #[arg(long, default_value_t = 3)]
        last: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command) -> hho::Result<ExitCode> {
    match command {
        Command::Run { problem, k, theta, max_ndof, out, config, mesh, threads, alpha, solver_tol } => {
            let mut s = RunSettings::default();
            if let Some(path) = config {
                s.apply_config(&std::fs::read_to_string(path)?)?;
            }
            if problem.is_some() {
                s.problem = problem;
            }
            let flags = [
                ("k", k.map(|v| v.to_string())),
                ("theta", theta.map(|v| v.to_string())),
                ("max_ndof", max_ndof.map(|v| v.to_string())),
                ("threads", threads.map(|v| v.to_string())),
                ("alpha", alpha.map(|v| v.to_string())),
                ("solver_tol", solver_tol.map(|v| v.to_string())),
            ];
            for (key, value) in flags {
                if let Some(v) = value {
                    s.set(key, &v)?;
                }
            }
            if out.is_some() {
                s.out = out;
            }
            if mesh.is_some() {
                s.mesh = mesh;
            }
            init_threads(s.threads)?;
            let bench = s.benchmark()?;
            let run = run_afem(&bench, &s.afem)?;
            match &s.out {
                Some(path) => write_csv(BufWriter::new(File::create(path)?), &run.records)?,
                None => write_csv(io::stdout().lock(), &run.records)?,
            }
            let last = run.records.last().expect("at least one level");
            eprintln!(
                "{}: {} levels, ndof {}, Eh {:.10e}, LEB {:.10e}",
                bench.id,
                run.records.len(),
                last.ndof,
                last.eh,
                last.leb
            );
            if let Some(c) = run.checks.iter().find(|c| !c.solve.converged) {
                eprintln!(
                    "warning: solver stopped at gradient norm {:.2e} after {} iterations; history ends there",
                    c.solve.gradient_norm, c.solve.iterations
                );
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify => {
            init_threads(None)?;
            let outcomes = verify::verify_suite()?;
            for o in &outcomes {
                println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
            }
            Ok(if outcomes.iter().all(|o| o.passed) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Table { csv, problem, reference, last } => {
            let records = read_csv(File::open(&csv)?)?;
            if records.is_empty() {
                return Err(hho::Error::Config(format!("{} has no rows", csv.display())));
            }
            let eh: Vec<f64> = records.iter().map(|r| r.eh).collect();
            let aitken = aitken_extrapolate(&eh);
            let reference = reference
                .or_else(|| problem.and_then(|id| benchmark(id).reference_energy))
                .or(aitken.map(|a| a.value))
                .unwrap_or(eh[eh.len() - 1]);
            println!("reference energy {reference:.10e}");
            if let Some(a) = aitken {
                println!("aitken extrapolation of Eh {:.10e}{}", a.value, if a.degenerate { " (degenerate)" } else { "" });
            }
            println!("{:<14}{:>12}{:>12}", "quantity", "all", format!("last {last}"));
            let fmt = |s: Option<f64>| s.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
            for row in rate_table(&records, reference, last) {
                println!("{:<14}{:>12}{:>12}", row.quantity, fmt(row.all), fmt(row.tail));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
