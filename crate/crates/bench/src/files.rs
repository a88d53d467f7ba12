//! Result JSON and trace CSV, written and read back by the harness.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ffs_core::orchestrator::{MigrationEvent, RunConfig, RunResult, Timings, TraceRow};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

pub const TRACE_HEADER: &str =
    "generation,best_objective_combined,best_objective_island_A,best_objective_island_B,migration_flag";

/// Run settings echoed into the result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub mode: String,
    pub population: usize,
    pub generations: u64,
    pub gap: u64,
    pub theta: f64,
    pub seed: u64,
    pub cellular_crossover: f64,
    pub cellular_mutation: f64,
    pub pseudo_crossover: f64,
    pub emax_policy: String,
}

impl ConfigEcho {
    pub fn new(cfg: &RunConfig, emax_policy: &str) -> Self {
        Self {
            mode: cfg.mode.to_string(),
            population: cfg.population,
            generations: cfg.generations,
            gap: cfg.migration.gap,
            theta: cfg.migration.threshold,
            seed: cfg.seed,
            cellular_crossover: cfg.cellular.crossover_rate,
            cellular_mutation: cfg.cellular.mutation_rate,
            pseudo_crossover: cfg.pseudo.crossover_rate,
            emax_policy: emax_policy.to_string(),
        }
    }
}

/// The scalar part of a run plus its migration log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub config: ConfigEcho,
    pub best_objective: f64,
    pub best_fitness: f64,
    pub emax: f64,
    pub policy_checks: u64,
    pub migrations: Vec<MigrationEvent>,
    pub best_chromosome: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl ResultFile {
    pub fn new(config: ConfigEcho, result: &RunResult, with_timings: bool) -> Self {
        Self {
            config,
            best_objective: result.best_objective,
            best_fitness: result.best_fitness,
            emax: result.emax,
            policy_checks: result.policy_checks,
            migrations: result.migrations.clone(),
            best_chromosome: result.best_chromosome.clone(),
            timings: with_timings.then_some(result.timings),
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        serde_json::from_str(&text).map_err(|e| BenchError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut out = String::with_capacity(64 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for row in trace {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.generation,
            row.best_objective,
            opt(row.island_a),
            opt(row.island_b),
            u8::from(row.migrated)
        );
    }
    out
}

pub fn parse_trace_csv(text: &str) -> std::result::Result<Vec<TraceRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRACE_HEADER => {}
        other => return Err(format!("unexpected trace header {other:?}")),
    }
    let field = |s: &str, line: usize| -> std::result::Result<Option<f64>, String> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|e| format!("line {line}: {e}"))
        }
    };
    lines
        .enumerate()
        .map(|(i, l)| {
            let line = i + 2;
            let cols: Vec<&str> = l.split(',').collect();
            if cols.len() != 5 {
                return Err(format!("line {line}: expected 5 columns, got {}", cols.len()));
            }
            Ok(TraceRow {
                generation: cols[0].parse().map_err(|e| format!("line {line}: {e}"))?,
                best_objective: field(cols[1], line)?.ok_or(format!("line {line}: empty objective"))?,
                island_a: field(cols[2], line)?,
                island_b: field(cols[3], line)?,
                migrated: match cols[4] {
                    "0" => false,
                    "1" => true,
                    other => return Err(format!("line {line}: bad migration flag {other:?}")),
                },
            })
        })
        .collect()
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| BenchError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| BenchError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
    }
    fs::write(path, text).map_err(|e| BenchError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Renders rows of already formatted cells as CSV with a header.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}
