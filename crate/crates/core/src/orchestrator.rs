//! End-to-end runs of the dual island GA and its single-island baselines.
//!
//! Between rendezvous points the two islands share nothing mutable, so they
//! advance side by side (`rayon::join`) with their own inner data
//! parallelism. At every generation that is a multiple of the migration gap,
//! except the last one, both islands stop, the policy decides from their best
//! fitness values, and migrants are copied across. All randomness comes from
//! substreams keyed by the master seed, the island, the generation and the
//! slot, so a run is reproducible whatever the worker count.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cellular::{CellGrid, CellularParams};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::migration::{decide, execute, Direction, MigrationPolicy};
use crate::problem::Problem;
use crate::pseudo::{PairPopulation, PseudoParams};
use crate::rng::SplitMix64;

/// Island ids used to derive island seeds from the master seed.
const CELLULAR_ISLAND: u64 = 0;
const PSEUDO_ISLAND: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Dual,
    CellularOnly,
    PseudoOnly,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dual" => Ok(Mode::Dual),
            "cellular" | "cellular-only" => Ok(Mode::CellularOnly),
            "pseudo" | "pseudo-only" => Ok(Mode::PseudoOnly),
            other => Err(Error::Config(format!(
                "unknown mode {other:?}; expected dual, cellular-only or pseudo-only"
            ))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Dual => "dual",
            Mode::CellularOnly => "cellular-only",
            Mode::PseudoOnly => "pseudo-only",
        })
    }
}

/// Which fitness of the pseudo island feeds the migration policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PseudoFitness {
    /// Best member of the current population.
    #[default]
    Current,
    /// Best-so-far record.
    Archive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub population: usize,
    pub generations: u64,
    pub migration: MigrationPolicy,
    pub cellular: CellularParams,
    pub pseudo: PseudoParams,
    pub mode: Mode,
    pub seed: u64,
    pub pseudo_fitness: PseudoFitness,
    /// Worker threads for [`run`]; 0 uses every available core.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            population: 512,
            generations: 2000,
            migration: MigrationPolicy::default(),
            cellular: CellularParams::default(),
            pseudo: PseudoParams::default(),
            mode: Mode::Dual,
            seed: 1,
            pseudo_fitness: PseudoFitness::Current,
            workers: 0,
        }
    }
}

impl RunConfig {
    /// `(cellular size, pseudo size)`; zero for an absent island.
    pub fn island_sizes(&self) -> (usize, usize) {
        match self.mode {
            Mode::Dual => (self.population / 2, self.population / 2),
            Mode::CellularOnly => (self.population, 0),
            Mode::PseudoOnly => (0, self.population),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.generations == 0 {
            return Err(Error::Config("generation budget must be at least 1".into()));
        }
        if self.mode == Mode::Dual && !self.population.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "dual mode splits the population evenly; {} is odd",
                self.population
            )));
        }
        let (a, b) = self.island_sizes();
        if b % 2 != 0 || (self.mode != Mode::CellularOnly && b == 0) {
            return Err(Error::Config(format!(
                "pseudo island size {b} must be even and positive"
            )));
        }
        if self.mode != Mode::PseudoOnly && a == 0 {
            return Err(Error::Config("cellular island is empty".into()));
        }
        self.migration.validate()?;
        self.cellular.validate()?;
        Ok(())
    }
}

/// Island seed as a pure function of the master seed.
pub fn island_seed(master: u64, island: u64) -> u64 {
    SplitMix64::substream(master, &[island]).next_u64()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub generation: u64,
    pub best_objective: f64,
    pub island_a: Option<f64>,
    pub island_b: Option<f64>,
    pub migrated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MigrationEvent {
    pub generation: u64,
    pub fit_a: f64,
    pub fit_b: f64,
    pub beta: f64,
    pub alpha: f64,
    pub direction: Direction,
    pub migrants: usize,
}

/// Wall-clock seconds per phase.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub total: f64,
    pub evolution: f64,
    pub migration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub mode: Mode,
    pub best_objective: f64,
    pub best_fitness: f64,
    pub best_chromosome: Vec<u32>,
    pub emax: f64,
    /// Migration policy evaluations, including those that moved nobody.
    pub policy_checks: u64,
    pub trace: Vec<TraceRow>,
    pub migrations: Vec<MigrationEvent>,
    #[serde(skip)]
    pub timings: Timings,
}

impl RunResult {
    /// True when everything but wall-clock time matches.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let strip = |r: &Self| RunResult {
            timings: Timings::default(),
            ..r.clone()
        };
        strip(self) == strip(other)
    }
}

/// Both islands advanced concurrently on `config.workers` threads.
pub fn run(config: &RunConfig, problem: &Problem) -> Result<RunResult> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if config.workers > 0 {
        builder = builder.num_threads(config.workers);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| drive(config, problem, Exec::Parallel))
}

/// Same algorithm as [`run`] on the calling thread alone, islands one after
/// the other.
pub fn run_serialized(config: &RunConfig, problem: &Problem) -> Result<RunResult> {
    config.validate()?;
    drive(config, problem, Exec::Sequential)
}

/// Per-generation best of one island.
struct IslandTrace {
    best_objective: Vec<f64>,
}

fn advance_cellular(grid: &mut CellGrid, problem: &Problem, gens: u64, exec: Exec) -> IslandTrace {
    let mut best_objective = Vec::with_capacity(gens as usize);
    for _ in 0..gens {
        grid.step(problem, exec);
        best_objective.push(grid.best().score.objective);
    }
    IslandTrace { best_objective }
}

fn advance_pseudo(pop: &mut PairPopulation, problem: &Problem, gens: u64, exec: Exec) -> IslandTrace {
    let mut best_objective = Vec::with_capacity(gens as usize);
    for _ in 0..gens {
        pop.step(problem, exec);
        best_objective.push(pop.best_so_far().score.objective);
    }
    IslandTrace { best_objective }
}

fn drive(config: &RunConfig, problem: &Problem, exec: Exec) -> Result<RunResult> {
    let started = Instant::now();
    let (size_a, size_b) = config.island_sizes();
    let mut cellular = (size_a > 0)
        .then(|| {
            CellGrid::new(
                problem,
                size_a,
                config.cellular,
                island_seed(config.seed, CELLULAR_ISLAND),
            )
        })
        .transpose()?;
    let mut pseudo = (size_b > 0)
        .then(|| {
            PairPopulation::init_pairs(
                problem,
                size_b,
                config.pseudo,
                island_seed(config.seed, PSEUDO_ISLAND),
            )
        })
        .transpose()?;

    let budget = config.generations;
    let gap = match config.mode {
        Mode::Dual => config.migration.gap,
        _ => budget,
    };
    let mut trace = Vec::with_capacity(budget as usize);
    let mut migrations = Vec::new();
    let mut policy_checks = 0;
    let mut timings = Timings::default();

    let mut done = 0;
    while done < budget {
        let next = ((done / gap + 1) * gap).min(budget);
        let gens = next - done;

        let t = Instant::now();
        let (trace_a, trace_b) = match exec {
            Exec::Parallel => rayon::join(
                || cellular.as_mut().map(|g| advance_cellular(g, problem, gens, exec)),
                || pseudo.as_mut().map(|p| advance_pseudo(p, problem, gens, exec)),
            ),
            Exec::Sequential => (
                cellular.as_mut().map(|g| advance_cellular(g, problem, gens, exec)),
                pseudo.as_mut().map(|p| advance_pseudo(p, problem, gens, exec)),
            ),
        };
        timings.evolution += t.elapsed().as_secs_f64();

        for i in 0..gens as usize {
            let a = trace_a.as_ref().map(|t| t.best_objective[i]);
            let b = trace_b.as_ref().map(|t| t.best_objective[i]);
            trace.push(TraceRow {
                generation: done + i as u64 + 1,
                best_objective: combine(a, b),
                island_a: a,
                island_b: b,
                migrated: false,
            });
        }
        done = next;

        if config.mode == Mode::Dual && done % gap == 0 && done < budget {
            let t = Instant::now();
            let (grid, pop) = (cellular.as_mut().unwrap(), pseudo.as_mut().unwrap());
            policy_checks += 1;
            let fit_a = grid.best().score.fitness;
            let fit_b = match config.pseudo_fitness {
                PseudoFitness::Current => pop.current_best().fitness,
                PseudoFitness::Archive => pop.best_so_far().score.fitness,
            };
            let decision = decide(fit_a, fit_b, &config.migration, size_a)?;
            match decision.direction {
                Direction::AToB => execute(problem, &*grid, pop, decision.migrants)?,
                Direction::BToA => execute(problem, &*pop, grid, decision.migrants)?,
                Direction::None => {}
            }
            if decision.direction != Direction::None {
                migrations.push(MigrationEvent {
                    generation: done,
                    fit_a,
                    fit_b,
                    beta: decision.beta,
                    alpha: decision.alpha,
                    direction: decision.direction,
                    migrants: decision.migrants,
                });
                let row = trace.last_mut().expect("at least one generation ran");
                let a = grid.best().score.objective;
                let b = pop.best_so_far().score.objective;
                row.island_a = Some(a);
                row.island_b = Some(b);
                row.best_objective = a.min(b);
                row.migrated = true;
            }
            timings.migration += t.elapsed().as_secs_f64();
        }
    }

    // Fitter of the cellular best and the pseudo record; cellular wins ties.
    let mut best = None;
    if let Some(grid) = &cellular {
        let c = grid.best();
        best = Some((c.chromosome.genes().to_vec(), c.score));
    }
    if let Some(pop) = &pseudo {
        let r = pop.best_so_far();
        if best.as_ref().is_none_or(|(_, s)| r.score.fitness > s.fitness) {
            best = Some((r.chromosome.genes().to_vec(), r.score));
        }
    }
    let (best_chromosome, score) = best.expect("at least one island");
    timings.total = started.elapsed().as_secs_f64();

    Ok(RunResult {
        mode: config.mode,
        best_objective: score.objective,
        best_fitness: score.fitness,
        best_chromosome,
        emax: problem.emax(),
        policy_checks,
        trace,
        migrations,
        timings,
    })
}

fn combine(a: Option<f64>, b: Option<f64>) -> f64 {
    match (a, b) {
        (Some(a), Some(b)) => a.min(b),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => f64::INFINITY,
    }
}
