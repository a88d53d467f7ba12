//! The experiment commands. Each returns its table so callers (and tests)
//! can inspect results without re-reading files.

use std::path::{Path, PathBuf};

use ffs_core::generate::{generate, job_mean_work};
use ffs_core::orchestrator::{run, run_serialized, Mode, RunConfig, RunResult};
use ffs_core::{EmaxPolicy, Instance, Problem};

use crate::cli::{
    CompareArgs, GenerateArgs, InstanceArgs, SeedPolicy, ShapeArgs, SolveArgs, SweepArgs, TimeArgs,
};
use crate::error::{BenchError, Result};
use crate::files::{self, ConfigEcho, ResultFile};
use crate::stats;

/// Default generation budget for solve, sweep-gap and compare.
pub const DEFAULT_GENERATIONS: u64 = 2000;
/// Shorter budget for bench-time.
pub const DEFAULT_TIMING_GENERATIONS: u64 = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateSummary {
    pub path: PathBuf,
    pub num_jobs: usize,
    pub total_mean_work: f64,
    pub max_release: f64,
    pub mean_slack: f64,
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<GenerateSummary> {
    let inst = generate(&args.shape.params(args.seed))?;
    files::write_text(&args.out, &inst.to_json_string())?;
    let work = job_mean_work(&inst);
    let slack: f64 = inst
        .due()
        .iter()
        .zip(inst.release())
        .map(|(d, r)| d - r)
        .sum::<f64>()
        / inst.num_jobs() as f64;
    Ok(GenerateSummary {
        path: args.out.clone(),
        num_jobs: inst.num_jobs(),
        total_mean_work: work.iter().sum(),
        max_release: inst.release().iter().copied().fold(0.0, f64::max),
        mean_slack: slack,
    })
}

/// Reads an instance file, naming the path on failure.
pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = files::read_text(path)?;
    Instance::from_json_str(&text).map_err(|e| BenchError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Supplies the problem for each run of an experiment.
pub struct ProblemSource {
    fixed: Option<Problem>,
    shape: ShapeArgs,
    instance_seed: u64,
    emax: EmaxPolicy,
}

impl ProblemSource {
    pub fn new(args: &InstanceArgs, policy: SeedPolicy) -> Result<Self> {
        if policy == SeedPolicy::VariedInstance && args.instance.is_some() {
            return Err(BenchError::Usage(
                "--seed-policy varied-instance generates instances; drop --instance".into(),
            ));
        }
        let fixed = match policy {
            SeedPolicy::FixedInstance => Some(Self::single(args)?),
            SeedPolicy::VariedInstance => {
                // Validate the shape before any run starts.
                generate(&args.shape.params(args.instance_seed))?;
                None
            }
        };
        Ok(Self {
            fixed,
            shape: args.shape.clone(),
            instance_seed: args.instance_seed,
            emax: args.emax,
        })
    }

    pub fn single(args: &InstanceArgs) -> Result<Problem> {
        let inst = match &args.instance {
            Some(path) => load_instance(path)?,
            None => generate(&args.shape.params(args.instance_seed))?,
        };
        Ok(Problem::with_policy(inst, args.emax))
    }

    /// Problem for run `index`.
    pub fn get(&self, index: usize) -> Result<std::borrow::Cow<'_, Problem>> {
        use std::borrow::Cow;
        match &self.fixed {
            Some(p) => Ok(Cow::Borrowed(p)),
            None => {
                let inst = generate(&self.shape.params(self.instance_seed + index as u64))?;
                Ok(Cow::Owned(Problem::with_policy(inst, self.emax)))
            }
        }
    }
}

pub struct SolveOutput {
    pub result: RunResult,
    pub file: ResultFile,
    pub result_path: PathBuf,
    pub trace_path: PathBuf,
}

pub fn cmd_solve(args: &SolveArgs) -> Result<SolveOutput> {
    let problem = ProblemSource::single(&args.instance)?;
    let cfg = args.run.config(DEFAULT_GENERATIONS);
    let result = run(&cfg, &problem)?;
    let file = ResultFile::new(
        ConfigEcho::new(&cfg, &args.instance.emax.to_string()),
        &result,
        args.timings,
    );
    let result_path = args.out.join("result.json");
    let trace_path = args.out.join("trace.csv");
    files::write_text(&result_path, &file.to_json_string())?;
    files::write_text(&trace_path, &files::trace_csv(&result.trace))?;
    Ok(SolveOutput {
        result,
        file,
        result_path,
        trace_path,
    })
}

/// Final objectives of `runs` runs with GA seeds `cfg.seed + r`.
pub fn final_objectives(source: &ProblemSource, cfg: &RunConfig, runs: usize) -> Result<Vec<f64>> {
    (0..runs)
        .map(|r| {
            let problem = source.get(r)?;
            let cfg = RunConfig {
                seed: cfg.seed + r as u64,
                ..cfg.clone()
            };
            Ok(run(&cfg, &problem)?.best_objective)
        })
        .collect()
}

fn check_runs(runs: usize, min: usize) -> Result<()> {
    if runs < min {
        return Err(BenchError::Usage(format!("--runs must be at least {min}, got {runs}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gap: u64,
    pub mean: f64,
    pub std: f64,
    pub objectives: Vec<f64>,
}

pub fn cmd_sweep_gap(args: &SweepArgs) -> Result<Vec<SweepRow>> {
    check_runs(args.experiment.runs, 1)?;
    if args.gaps.is_empty() {
        return Err(BenchError::Usage("--gaps must list at least one gap".into()));
    }
    let source = ProblemSource::new(&args.instance, args.experiment.seed_policy)?;
    let base = RunConfig {
        mode: Mode::Dual,
        ..args.run.config(DEFAULT_GENERATIONS)
    };
    for &gap in &args.gaps {
        let mut cfg = base.clone();
        cfg.migration.gap = gap;
        cfg.validate()?;
    }
    let rows = args
        .gaps
        .iter()
        .map(|&gap| {
            let mut cfg = base.clone();
            cfg.migration.gap = gap;
            let objectives = final_objectives(&source, &cfg, args.experiment.runs)?;
            Ok(SweepRow {
                gap,
                mean: stats::mean(&objectives),
                std: stats::sample_std(&objectives),
                objectives,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(out) = &args.experiment.out {
        files::write_text(out, &sweep_csv(&rows))?;
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.gap.to_string(),
                r.mean.to_string(),
                r.std.to_string(),
                r.objectives.len().to_string(),
            ]
        })
        .collect();
    files::csv(&["gap", "mean_objective", "std_objective", "runs"], &cells)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub algorithm: &'static str,
    pub mode: Mode,
    pub best: f64,
    pub average: f64,
    pub variance: f64,
    pub objectives: Vec<f64>,
}

pub const COMPARE_MODES: [(&str, Mode); 3] = [
    ("Heterogeneous", Mode::Dual),
    ("Cellular", Mode::CellularOnly),
    ("Pseudo", Mode::PseudoOnly),
];

/// The three algorithms on matched seeds: run `r` of each uses GA seed
/// `seed + r` (and the same instance).
pub fn compare_runs(source: &ProblemSource, base: &RunConfig, runs: usize) -> Result<Vec<CompareRow>> {
    for (_, mode) in COMPARE_MODES {
        RunConfig { mode, ..base.clone() }.validate()?;
    }
    COMPARE_MODES
        .iter()
        .map(|&(algorithm, mode)| {
            let cfg = RunConfig { mode, ..base.clone() };
            let objectives = final_objectives(source, &cfg, runs)?;
            Ok(CompareRow {
                algorithm,
                mode,
                best: stats::min(&objectives),
                average: stats::mean(&objectives),
                variance: stats::sample_variance(&objectives),
                objectives,
            })
        })
        .collect()
}

pub fn cmd_compare(args: &CompareArgs) -> Result<Vec<CompareRow>> {
    check_runs(args.experiment.runs, 2)?;
    let source = ProblemSource::new(&args.instance, args.experiment.seed_policy)?;
    let rows = compare_runs(&source, &args.run.config(DEFAULT_GENERATIONS), args.experiment.runs)?;
    if let Some(out) = &args.experiment.out {
        files::write_text(out, &compare_csv(&rows))?;
    }
    Ok(rows)
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.algorithm.to_string(),
                r.best.to_string(),
                r.average.to_string(),
                r.variance.to_string(),
            ]
        })
        .collect();
    files::csv(&["algorithm", "best", "average", "variance"], &cells)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeRow {
    pub population: usize,
    pub concurrent_seconds: f64,
    pub serialized_seconds: f64,
    pub best_concurrent: f64,
    pub best_serialized: f64,
}

impl TimeRow {
    pub fn speedup(&self) -> f64 {
        self.serialized_seconds / self.concurrent_seconds
    }
}

/// Times one concurrent and one serialized run of the same configuration.
pub fn time_pair(problem: &Problem, cfg: &RunConfig) -> Result<TimeRow> {
    let concurrent = run(cfg, problem)?;
    let serialized = run_serialized(cfg, problem)?;
    if !concurrent.same_outcome(&serialized) {
        return Err(BenchError::Core(ffs_core::Error::Contract(format!(
            "concurrent and serialized runs diverged at population {}",
            cfg.population
        ))));
    }
    Ok(TimeRow {
        population: cfg.population,
        concurrent_seconds: concurrent.timings.total,
        serialized_seconds: serialized.timings.total,
        best_concurrent: concurrent.best_objective,
        best_serialized: serialized.best_objective,
    })
}

pub fn cmd_time(args: &TimeArgs) -> Result<Vec<TimeRow>> {
    if args.populations.is_empty() {
        return Err(BenchError::Usage("--populations must list at least one size".into()));
    }
    let problem = ProblemSource::single(&args.instance)?;
    let base = args.run.config(DEFAULT_TIMING_GENERATIONS);
    let configs: Vec<RunConfig> = args
        .populations
        .iter()
        .map(|&population| RunConfig {
            population,
            ..base.clone()
        })
        .collect();
    for cfg in &configs {
        cfg.validate()?;
    }
    let rows = configs
        .iter()
        .map(|cfg| time_pair(&problem, cfg))
        .collect::<Result<Vec<_>>>()?;
    if let Some(out) = &args.out {
        files::write_text(out, &time_csv(&rows))?;
    }
    Ok(rows)
}

pub fn time_csv(rows: &[TimeRow]) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.population.to_string(),
                r.concurrent_seconds.to_string(),
                r.serialized_seconds.to_string(),
                r.speedup().to_string(),
                r.best_concurrent.to_string(),
                r.best_serialized.to_string(),
            ]
        })
        .collect();
    files::csv(
        &[
            "population",
            "concurrent_seconds",
            "serialized_seconds",
            "speedup",
            "best_objective_concurrent",
            "best_objective_serialized",
        ],
        &cells,
    )
}
