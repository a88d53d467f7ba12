use std::process::ExitCode;

use clap::Parser;
use ffs_bench::cli::{Cli, Command};
use ffs_bench::commands::{self, compare_csv, sweep_csv, time_csv};
use ffs_bench::BenchError;

fn execute(cli: Cli) -> ffs_bench::Result<()> {
    match cli.command {
        Command::Generate(args) => {
            let s = commands::cmd_generate(&args)?;
            println!(
                "wrote {} ({} jobs, total mean work {:.3}, max release {:.3}, mean slack {:.3})",
                s.path.display(),
                s.num_jobs,
                s.total_mean_work,
                s.max_release,
                s.mean_slack
            );
        }
        Command::Solve(args) => {
            let out = commands::cmd_solve(&args)?;
            println!(
                "best objective {} (fitness {}, emax {}), {} migrations; wrote {} and {}",
                out.result.best_objective,
                out.result.best_fitness,
                out.result.emax,
                out.result.migrations.len(),
                out.result_path.display(),
                out.trace_path.display()
            );
        }
        Command::SweepGap(args) => print!("{}", sweep_csv(&commands::cmd_sweep_gap(&args)?)),
        Command::Compare(args) => print!("{}", compare_csv(&commands::cmd_compare(&args)?)),
        Command::BenchTime(args) => print!("{}", time_csv(&commands::cmd_time(&args)?)),
    }
    Ok(())
}

fn report(err: &BenchError) {
    let line = serde_json::json!({ "error": err.kind(), "message": err.to_string() });
    eprintln!("{line}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            report(&BenchError::Usage(first.trim_start_matches("error: ").to_string()));
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::from(if matches!(e, BenchError::Usage(_)) { 2 } else { 1 })
        }
    }
}
