//! Seeded random instances.
//!
//! Draw order (all from one SplitMix64 stream seeded with `seed`):
//! 1. `P[j][s][m] ~ U[1, 5)`, job outer, stage middle, machine inner;
//! 2. `R_j ~ U[0, P_bar)` for each job in order, where
//!    `P_bar = sum_j sum_s (sum_m P[j][s][m] / M_s)`;
//! 3. `sigma_j ~ U[0, 2)` for each job in order, and
//!    `D_j = R_j + P_bar_j * (1 + sigma_j)` with
//!    `P_bar_j = sum_s (sum_m P[j][s][m] / M_s)`.

use crate::error::Result;
use crate::model::{validate_shape, Instance};
use crate::rng::SplitMix64;

pub const DEFAULT_WEIGHT: f64 = 100.0;
pub const PROC_TIME_RANGE: (f64, f64) = (1.0, 5.0);
pub const SLACK_RANGE: (f64, f64) = (0.0, 2.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub num_jobs: usize,
    pub machines_per_stage: Vec<usize>,
    pub weight: f64,
    pub seed: u64,
    /// Round processing times to the nearest integer after drawing.
    pub integer_times: bool,
}

impl GenParams {
    /// `num_stages` stages with `machines` machines each, default weight.
    pub fn uniform(num_jobs: usize, num_stages: usize, machines: usize, seed: u64) -> Self {
        Self {
            num_jobs,
            machines_per_stage: vec![machines; num_stages],
            weight: DEFAULT_WEIGHT,
            seed,
            integer_times: false,
        }
    }
}

/// Mean processing time of each job summed over stages (`P_bar_j`).
pub fn job_mean_work(inst: &Instance) -> Vec<f64> {
    (0..inst.num_jobs())
        .map(|j| {
            (0..inst.num_stages())
                .map(|s| inst.stage_times(j, s).iter().sum::<f64>() / inst.machines(s) as f64)
                .sum()
        })
        .collect()
}

fn mean_work(proc_time: &[Vec<Vec<f64>>]) -> Vec<f64> {
    proc_time
        .iter()
        .map(|stages| {
            stages
                .iter()
                .map(|ms| ms.iter().sum::<f64>() / ms.len() as f64)
                .sum()
        })
        .collect()
}

pub fn generate(params: &GenParams) -> Result<Instance> {
    validate_shape(params.num_jobs, &params.machines_per_stage)?;
    let mut rng = SplitMix64::new(params.seed);
    let (p_lo, p_hi) = PROC_TIME_RANGE;

    let mut proc_time = Vec::with_capacity(params.num_jobs);
    for _ in 0..params.num_jobs {
        let mut stages = Vec::with_capacity(params.machines_per_stage.len());
        for &m in &params.machines_per_stage {
            let mut times = Vec::with_capacity(m);
            for _ in 0..m {
                let p = rng.uniform(p_lo, p_hi)?;
                times.push(if params.integer_times { p.round() } else { p });
            }
            stages.push(times);
        }
        proc_time.push(stages);
    }

    let job_work = mean_work(&proc_time);
    let total_work: f64 = job_work.iter().sum();

    let release = (0..params.num_jobs)
        .map(|_| rng.uniform(0.0, total_work))
        .collect::<Result<Vec<_>>>()?;
    let (s_lo, s_hi) = SLACK_RANGE;
    let due = (0..params.num_jobs)
        .map(|j| Ok(release[j] + job_work[j] * (1.0 + rng.uniform(s_lo, s_hi)?)))
        .collect::<Result<Vec<_>>>()?;

    Instance::new(
        params.machines_per_stage.clone(),
        proc_time,
        release,
        due,
        params.weight,
    )
}
