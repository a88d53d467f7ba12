use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ffs_core::cellular::CellularParams;
use ffs_core::generate::{GenParams, DEFAULT_WEIGHT};
use ffs_core::migration::MigrationPolicy;
use ffs_core::orchestrator::{Mode, PseudoFitness, RunConfig};
use ffs_core::pseudo::PseudoParams;
use ffs_core::EmaxPolicy;

#[derive(Debug, Parser)]
#[command(
    name = "ffs-bench",
    version,
    about = "Flexible flow shop island GA: instance generation, solving and experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random instance as JSON.
    Generate(GenerateArgs),
    /// Run one GA and write result.json and trace.csv.
    Solve(SolveArgs),
    /// Mean final objective of the dual GA for several migration gaps.
    SweepGap(SweepArgs),
    /// Best / average / variance of the dual GA and both single-island baselines.
    Compare(CompareArgs),
    /// Wall-clock of concurrent versus serialized island execution.
    BenchTime(TimeArgs),
}

/// Shape of generated instances.
#[derive(Debug, Clone, Args)]
pub struct ShapeArgs {
    #[arg(long, default_value_t = 60)]
    pub jobs: usize,
    #[arg(long, default_value_t = 4)]
    pub stages: usize,
    /// Machines at every stage.
    #[arg(long, default_value_t = 2)]
    pub machines: usize,
    /// Tardiness weight.
    #[arg(long, default_value_t = DEFAULT_WEIGHT)]
    pub wt: f64,
    /// Round processing times to integers.
    #[arg(long)]
    pub integer_times: bool,
}

impl ShapeArgs {
    pub fn params(&self, seed: u64) -> GenParams {
        GenParams {
            num_jobs: self.jobs,
            machines_per_stage: vec![self.machines; self.stages],
            weight: self.wt,
            seed,
            integer_times: self.integer_times,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Instance JSON path.
    #[arg(long)]
    pub out: PathBuf,
}

/// Where the instance comes from: a file, or generated from the shape flags.
#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// Instance JSON file; when absent an instance is generated.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Seed for generated instances.
    #[arg(long, default_value_t = 1)]
    pub instance_seed: u64,
    /// How E_max is estimated: bound, sampled or sampled:<count>.
    #[arg(long, default_value = "sampled")]
    pub emax: EmaxPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Dual,
    CellularOnly,
    PseudoOnly,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Dual => Mode::Dual,
            ModeArg::CellularOnly => Mode::CellularOnly,
            ModeArg::PseudoOnly => Mode::PseudoOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PseudoFitnessArg {
    Current,
    Archive,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 512)]
    pub population: usize,
    /// Generation budget (2000, or 200 for bench-time).
    #[arg(long)]
    pub generations: Option<u64>,
    /// Generations between migration policy checks.
    #[arg(long, default_value_t = 500)]
    pub gap: u64,
    /// Migration threshold.
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Dual)]
    pub mode: ModeArg,
    /// GA master seed (first run's seed in multi-run commands).
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 1.0)]
    pub cellular_crossover: f64,
    #[arg(long, default_value_t = 0.05)]
    pub mutation: f64,
    #[arg(long, default_value_t = 0.75)]
    pub pseudo_crossover: f64,
    /// Pseudo island fitness fed to the migration policy.
    #[arg(long, value_enum, default_value_t = PseudoFitnessArg::Current)]
    pub pseudo_fitness: PseudoFitnessArg,
}

impl RunArgs {
    pub fn config(&self, default_generations: u64) -> RunConfig {
        RunConfig {
            population: self.population,
            generations: self.generations.unwrap_or(default_generations),
            migration: MigrationPolicy {
                threshold: self.theta,
                gap: self.gap,
            },
            cellular: CellularParams {
                crossover_rate: self.cellular_crossover,
                mutation_rate: self.mutation,
                neighborhood_radius: 1,
            },
            pseudo: PseudoParams {
                crossover_rate: self.pseudo_crossover,
            },
            mode: self.mode.into(),
            seed: self.seed,
            pseudo_fitness: match self.pseudo_fitness {
                PseudoFitnessArg::Current => PseudoFitness::Current,
                PseudoFitnessArg::Archive => PseudoFitness::Archive,
            },
            workers: self.workers,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Output directory for result.json and trace.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// Include wall-clock timings in result.json.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeedPolicy {
    /// One instance; GA seed varies per run.
    FixedInstance,
    /// A new generated instance per run as well.
    VariedInstance,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[arg(long, default_value_t = 50)]
    pub runs: usize,
    #[arg(long, value_enum, default_value_t = SeedPolicy::FixedInstance)]
    pub seed_policy: SeedPolicy,
    /// CSV output path; the table is printed either way.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Comma-separated gaps.
    #[arg(long, value_delimiter = ',', default_value = "10,50,100,200,400,500,800")]
    pub gaps: Vec<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub experiment: ExperimentArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TimeArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated total population sizes.
    #[arg(long, value_delimiter = ',', default_value = "512,1024,2048,4096")]
    pub populations: Vec<usize>,
    /// CSV output path; the table is printed either way.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
