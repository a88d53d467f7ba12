//! Flexible flow shop instances, the schedule decoder and objective evaluation.
//!
//! A chromosome fixes only which machine serves each (job, stage) operation.
//! Sequencing is a stage-wise list-scheduling rule: stage 0 dispatches jobs by
//! non-decreasing release time, every later stage by non-decreasing completion
//! time at the previous stage, ties going to the lower job index. A dispatched
//! job starts as soon as both the job and its assigned machine are free.
//!
//! Indices are 0-based throughout. Gene `i` of a chromosome addresses job
//! `i / S` at stage `i % S` (the 1-based write-up of the encoding repeats the
//! job formula for the stage coordinate; that reading cannot be right, so the
//! stage is taken as the remainder).

use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Flexible flow shop problem data.
///
/// Processing times are stored flat, job-major, with each job's block laid
/// out stage by stage and each stage block holding one entry per machine.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    num_jobs: usize,
    num_stages: usize,
    machines_per_stage: Vec<usize>,
    stage_offset: Vec<usize>,
    job_stride: usize,
    proc_time: Vec<f64>,
    release: Vec<f64>,
    due: Vec<f64>,
    weight: f64,
}

impl Instance {
    /// Builds and validates an instance. `proc_time` is indexed
    /// `[job][stage][machine]`.
    pub fn new(
        machines_per_stage: Vec<usize>,
        proc_time: Vec<Vec<Vec<f64>>>,
        release: Vec<f64>,
        due: Vec<f64>,
        weight: f64,
    ) -> Result<Self> {
        let num_jobs = proc_time.len();
        let num_stages = machines_per_stage.len();
        check_shape(num_jobs, &machines_per_stage)?;

        let mut stage_offset = Vec::with_capacity(num_stages);
        let mut acc = 0;
        for &m in &machines_per_stage {
            stage_offset.push(acc);
            acc += m;
        }
        let job_stride = acc;

        let mut flat = Vec::with_capacity(num_jobs * job_stride);
        for (j, stages) in proc_time.iter().enumerate() {
            if stages.len() != num_stages {
                return Err(Error::InvalidInstance(format!(
                    "proc_time[{j}] has {} stages, expected {num_stages}",
                    stages.len()
                )));
            }
            for (s, machines) in stages.iter().enumerate() {
                if machines.len() != machines_per_stage[s] {
                    return Err(Error::InvalidInstance(format!(
                        "proc_time[{j}][{s}] has {} machines, expected {}",
                        machines.len(),
                        machines_per_stage[s]
                    )));
                }
                for (m, &p) in machines.iter().enumerate() {
                    if !(p.is_finite() && p > 0.0) {
                        return Err(Error::InvalidInstance(format!(
                            "proc_time[{j}][{s}][{m}] = {p} must be positive and finite"
                        )));
                    }
                    flat.push(p);
                }
            }
        }

        if release.len() != num_jobs || due.len() != num_jobs {
            return Err(Error::InvalidInstance(format!(
                "release and due must have {num_jobs} entries, got {} and {}",
                release.len(),
                due.len()
            )));
        }
        for j in 0..num_jobs {
            let (r, d) = (release[j], due[j]);
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "release[{j}] = {r} must be non-negative and finite"
                )));
            }
            if !(d.is_finite() && d >= r) {
                return Err(Error::InvalidInstance(format!(
                    "due[{j}] = {d} must be finite and not before release {r}"
                )));
            }
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::InvalidInstance(format!(
                "weight = {weight} must be non-negative and finite"
            )));
        }

        Ok(Self {
            num_jobs,
            num_stages,
            machines_per_stage,
            stage_offset,
            job_stride,
            proc_time: flat,
            release,
            due,
            weight,
        })
    }

    pub fn num_jobs(&self) -> usize {
        self.num_jobs
    }

    pub fn num_stages(&self) -> usize {
        self.num_stages
    }

    /// Chromosome length `J * S`.
    pub fn num_genes(&self) -> usize {
        self.num_jobs * self.num_stages
    }

    pub fn machines_per_stage(&self) -> &[usize] {
        &self.machines_per_stage
    }

    pub fn machines(&self, stage: usize) -> usize {
        self.machines_per_stage[stage]
    }

    #[inline]
    pub fn proc_time(&self, job: usize, stage: usize, machine: usize) -> f64 {
        self.proc_time[job * self.job_stride + self.stage_offset[stage] + machine]
    }

    /// Processing times of one (job, stage) operation, one per machine.
    #[inline]
    pub fn stage_times(&self, job: usize, stage: usize) -> &[f64] {
        let start = job * self.job_stride + self.stage_offset[stage];
        &self.proc_time[start..start + self.machines_per_stage[stage]]
    }

    pub fn release(&self) -> &[f64] {
        &self.release
    }

    pub fn due(&self) -> &[f64] {
        &self.due
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Nested `[job][stage][machine]` copy of the processing times.
    pub fn proc_time_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.num_jobs)
            .map(|j| {
                (0..self.num_stages)
                    .map(|s| self.stage_times(j, s).to_vec())
                    .collect()
            })
            .collect()
    }

    /// Serializes to the instance JSON document.
    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("num_jobs".into(), self.num_jobs.into());
        doc.insert("num_stages".into(), self.num_stages.into());
        doc.insert(
            "machines_per_stage".into(),
            self.machines_per_stage.clone().into(),
        );
        doc.insert(
            "proc_time".into(),
            serde_json::to_value(self.proc_time_nested()).expect("finite floats serialize"),
        );
        doc.insert("release".into(), self.release.clone().into());
        doc.insert("due".into(), self.due.clone().into());
        doc.insert("weight".into(), self.weight.into());
        Value::Object(doc)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    /// Parses the instance JSON document. Errors name the offending key.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInstance(format!("malformed JSON: {e}")))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::InvalidInstance("top level must be an object".into()))?;

        let num_jobs = count(field(obj, "num_jobs")?, "num_jobs")?;
        let num_stages = count(field(obj, "num_stages")?, "num_stages")?;
        let machines_per_stage: Vec<usize> = array(field(obj, "machines_per_stage")?, "machines_per_stage")?
            .iter()
            .enumerate()
            .map(|(i, v)| count(v, &format!("machines_per_stage[{i}]")))
            .collect::<Result<_>>()?;
        let proc_time: Vec<Vec<Vec<f64>>> = array(field(obj, "proc_time")?, "proc_time")?
            .iter()
            .enumerate()
            .map(|(j, stages)| {
                array(stages, &format!("proc_time[{j}]"))?
                    .iter()
                    .enumerate()
                    .map(|(s, ms)| {
                        array(ms, &format!("proc_time[{j}][{s}]"))?
                            .iter()
                            .enumerate()
                            .map(|(m, p)| number(p, &format!("proc_time[{j}][{s}][{m}]")))
                            .collect()
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let release = numbers(field(obj, "release")?, "release")?;
        let due = numbers(field(obj, "due")?, "due")?;
        let weight = number(field(obj, "weight")?, "weight")?;

        if machines_per_stage.len() != num_stages {
            return Err(Error::InvalidInstance(format!(
                "machines_per_stage: {} entries but num_stages = {num_stages}",
                machines_per_stage.len()
            )));
        }
        if proc_time.len() != num_jobs {
            return Err(Error::InvalidInstance(format!(
                "proc_time: {} jobs but num_jobs = {num_jobs}",
                proc_time.len()
            )));
        }
        Self::new(machines_per_stage, proc_time, release, due, weight)
    }
}

fn check_shape(num_jobs: usize, machines_per_stage: &[usize]) -> Result<()> {
    if num_jobs == 0 {
        return Err(Error::InvalidInstance("num_jobs must be at least 1".into()));
    }
    if machines_per_stage.len() < 2 {
        return Err(Error::InvalidInstance(format!(
            "num_stages must be at least 2, got {}",
            machines_per_stage.len()
        )));
    }
    if let Some(s) = machines_per_stage.iter().position(|&m| m == 0) {
        return Err(Error::InvalidInstance(format!(
            "machines_per_stage[{s}] must be at least 1"
        )));
    }
    if machines_per_stage.iter().all(|&m| m < 2) {
        return Err(Error::InvalidInstance(
            "at least one stage must have two or more machines".into(),
        ));
    }
    Ok(())
}

/// Checks the structural parts of an instance description without any data.
pub fn validate_shape(num_jobs: usize, machines_per_stage: &[usize]) -> Result<()> {
    check_shape(num_jobs, machines_per_stage)
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::InvalidInstance(format!("{key}: missing key")))
}

fn array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidInstance(format!("{key}: expected an array")))
}

fn number(v: &Value, key: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::InvalidInstance(format!("{key}: expected a number")))
}

fn numbers(v: &Value, key: &str) -> Result<Vec<f64>> {
    array(v, key)?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{key}[{i}]")))
        .collect()
}

fn count(v: &Value, key: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::InvalidInstance(format!("{key}: expected a non-negative integer")))
}

/// Maps gene index `i` to its `(job, stage)` coordinates.
pub fn gene_position(i: usize, num_jobs: usize, num_stages: usize) -> Result<(usize, usize)> {
    if num_stages == 0 || i >= num_jobs * num_stages {
        return Err(Error::Contract(format!(
            "gene index {i} out of range for {num_jobs} jobs x {num_stages} stages"
        )));
    }
    Ok((i / num_stages, i % num_stages))
}

/// One scheduled operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operation {
    pub machine: usize,
    pub start: f64,
    pub completion: f64,
}

/// Decoded timetable, one operation per (job, stage), stored job-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    num_stages: usize,
    ops: Vec<Operation>,
}

impl Schedule {
    pub fn op(&self, job: usize, stage: usize) -> &Operation {
        &self.ops[job * self.num_stages + stage]
    }

    pub fn num_jobs(&self) -> usize {
        self.ops.len() / self.num_stages
    }

    /// Completion of the job's final stage.
    pub fn job_completion(&self, job: usize) -> f64 {
        self.op(job, self.num_stages - 1).completion
    }

    pub fn makespan(&self) -> f64 {
        (0..self.num_jobs())
            .map(|j| self.job_completion(j))
            .fold(0.0, f64::max)
    }

    /// Verifies the timing, precedence and machine-capacity invariants.
    pub fn check_feasible(&self, inst: &Instance) -> Result<()> {
        let s_count = inst.num_stages();
        if self.num_stages != s_count || self.num_jobs() != inst.num_jobs() {
            return Err(Error::Contract("schedule shape does not match instance".into()));
        }
        for j in 0..inst.num_jobs() {
            for s in 0..s_count {
                let op = self.op(j, s);
                if op.machine >= inst.machines(s) {
                    return Err(Error::Contract(format!("job {j} stage {s}: bad machine")));
                }
                if op.completion != op.start + inst.proc_time(j, s, op.machine) {
                    return Err(Error::Contract(format!("job {j} stage {s}: wrong duration")));
                }
                let ready = if s == 0 {
                    inst.release()[j]
                } else {
                    self.op(j, s - 1).completion
                };
                if op.start < ready {
                    return Err(Error::Contract(format!("job {j} stage {s}: starts too early")));
                }
            }
        }
        for s in 0..s_count {
            for m in 0..inst.machines(s) {
                let mut spans: Vec<(f64, f64)> = (0..inst.num_jobs())
                    .map(|j| self.op(j, s))
                    .filter(|op| op.machine == m)
                    .map(|op| (op.start, op.completion))
                    .collect();
                spans.sort_by(|a, b| a.0.total_cmp(&b.0));
                if spans.windows(2).any(|w| w[1].0 < w[0].1) {
                    return Err(Error::Contract(format!("stage {s} machine {m}: overlap")));
                }
            }
        }
        Ok(())
    }
}

fn check_assignment(inst: &Instance, assignment: &[u32]) -> Result<()> {
    if assignment.len() != inst.num_genes() {
        return Err(Error::Contract(format!(
            "assignment has {} genes, expected {}",
            assignment.len(),
            inst.num_genes()
        )));
    }
    let s_count = inst.num_stages();
    for (i, &g) in assignment.iter().enumerate() {
        let s = i % s_count;
        if g as usize >= inst.machines(s) {
            return Err(Error::Contract(format!(
                "gene {i} (job {}, stage {s}) selects machine {g} of {}",
                i / s_count,
                inst.machines(s)
            )));
        }
    }
    Ok(())
}

/// Decodes a machine assignment (one gene per (job, stage), job-major) into a
/// schedule.
pub fn decode(inst: &Instance, assignment: &[u32]) -> Result<Schedule> {
    check_assignment(inst, assignment)?;
    let s_count = inst.num_stages();
    let mut ops = vec![
        Operation {
            machine: 0,
            start: 0.0,
            completion: 0.0
        };
        inst.num_genes()
    ];
    Decoder::new(inst).run(inst, assignment, |j, s, m, start, end| {
        ops[j * s_count + s] = Operation {
            machine: m,
            start,
            completion: end,
        };
    });
    Ok(Schedule {
        num_stages: s_count,
        ops,
    })
}

/// Makespan, tardiness and the derived objective/fitness of a schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveReport {
    pub makespan: f64,
    pub total_tardiness: f64,
    pub objective: f64,
    pub fitness: f64,
    pub emax_used: f64,
}

impl ObjectiveReport {
    fn from_parts(weight: f64, makespan: f64, total_tardiness: f64, emax: f64) -> Self {
        let objective = weight * total_tardiness + makespan;
        Self {
            makespan,
            total_tardiness,
            objective,
            fitness: fitness_of(objective, emax),
            emax_used: emax,
        }
    }
}

/// `max(emax - objective, 0)`.
#[inline]
pub fn fitness_of(objective: f64, emax: f64) -> f64 {
    (emax - objective).max(0.0)
}

/// Objective `WT * sum(T_j) + Cmax` and fitness of a decoded schedule, with
/// `T_j = max(0, C_j - D_j)` on the last-stage completion `C_j`.
pub fn evaluate(inst: &Instance, sched: &Schedule, emax: f64) -> ObjectiveReport {
    let mut makespan = 0.0f64;
    let mut tardiness = 0.0;
    for j in 0..inst.num_jobs() {
        let c = sched.job_completion(j);
        makespan = makespan.max(c);
        tardiness += (c - inst.due()[j]).max(0.0);
    }
    ObjectiveReport::from_parts(inst.weight(), makespan, tardiness, emax)
}

/// Upper bound on the objective of any decodable schedule.
///
/// `H = max_j R_j + sum_j sum_s max_m P[j][s][m]` bounds every completion time
/// the decoder can produce: each start is either a release or the completion
/// of an earlier operation, so a completion is one release plus the durations
/// of a chain of distinct operations. `WT * sum_j max(0, H - D_j) + H` then
/// bounds the objective.
pub fn estimate_emax(inst: &Instance) -> f64 {
    let max_release = inst.release().iter().copied().fold(0.0, f64::max);
    let total_work: f64 = (0..inst.num_jobs())
        .flat_map(|j| (0..inst.num_stages()).map(move |s| (j, s)))
        .map(|(j, s)| inst.stage_times(j, s).iter().copied().fold(0.0, f64::max))
        .sum();
    let horizon = max_release + total_work;
    let tardiness: f64 = inst.due().iter().map(|&d| (horizon - d).max(0.0)).sum();
    inst.weight() * tardiness + horizon
}

/// Objective and fitness of one chromosome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub objective: f64,
    pub fitness: f64,
}

/// Reusable scratch space for decoding; the GA's hot path.
#[derive(Debug, Clone)]
pub struct Decoder {
    release_order: Vec<u32>,
    keyed: Vec<(u64, u32)>,
    ready: Vec<f64>,
    machine_free: Vec<f64>,
}

impl Decoder {
    pub fn new(inst: &Instance) -> Self {
        let mut release_order: Vec<u32> = (0..inst.num_jobs() as u32).collect();
        release_order.sort_by(|&a, &b| {
            inst.release()[a as usize]
                .total_cmp(&inst.release()[b as usize])
                .then(a.cmp(&b))
        });
        Self {
            release_order,
            keyed: Vec::with_capacity(inst.num_jobs()),
            ready: vec![0.0; inst.num_jobs()],
            machine_free: vec![0.0; inst.machines_per_stage().iter().copied().max().unwrap_or(1)],
        }
    }

    /// Runs the dispatching rule, reporting each operation as
    /// `(job, stage, machine, start, completion)` in dispatch order.
    ///
    /// `assignment` must already be range-checked.
    fn run<F>(&mut self, inst: &Instance, assignment: &[u32], mut emit: F)
    where
        F: FnMut(usize, usize, usize, f64, f64),
    {
        let s_count = inst.num_stages();
        self.ready.copy_from_slice(inst.release());
        for s in 0..s_count {
            let free = &mut self.machine_free[..inst.machines(s)];
            free.fill(0.0);
            if s == 0 {
                for &j in &self.release_order {
                    let j = j as usize;
                    dispatch(inst, assignment, j, s, free, &mut self.ready, &mut emit);
                }
            } else {
                // Times are non-negative, so their bit patterns sort like the values.
                self.keyed.clear();
                self.keyed
                    .extend(self.ready.iter().enumerate().map(|(j, &t)| (t.to_bits(), j as u32)));
                self.keyed.sort_unstable();
                for &(_, j) in &self.keyed {
                    dispatch(inst, assignment, j as usize, s, free, &mut self.ready, &mut emit);
                }
            }
        }
    }

    /// Makespan and total tardiness of an assignment.
    pub fn makespan_tardiness(&mut self, inst: &Instance, assignment: &[u32]) -> (f64, f64) {
        debug_assert!(check_assignment(inst, assignment).is_ok());
        self.run(inst, assignment, |_, _, _, _, _| {});
        let mut makespan = 0.0f64;
        let mut tardiness = 0.0;
        for (c, d) in self.ready.iter().zip(inst.due()) {
            makespan = makespan.max(*c);
            tardiness += (c - d).max(0.0);
        }
        (makespan, tardiness)
    }

    /// Objective and fitness of an assignment; identical to
    /// `evaluate(decode(..))` without building the schedule.
    pub fn score(&mut self, inst: &Instance, assignment: &[u32], emax: f64) -> Score {
        let (makespan, tardiness) = self.makespan_tardiness(inst, assignment);
        let objective = inst.weight() * tardiness + makespan;
        Score {
            objective,
            fitness: fitness_of(objective, emax),
        }
    }

    /// Full report for an assignment, checking its range first.
    pub fn report(&mut self, inst: &Instance, assignment: &[u32], emax: f64) -> Result<ObjectiveReport> {
        check_assignment(inst, assignment)?;
        let (makespan, tardiness) = self.makespan_tardiness(inst, assignment);
        Ok(ObjectiveReport::from_parts(inst.weight(), makespan, tardiness, emax))
    }
}

#[inline]
fn dispatch<F>(
    inst: &Instance,
    assignment: &[u32],
    j: usize,
    s: usize,
    free: &mut [f64],
    ready: &mut [f64],
    emit: &mut F,
) where
    F: FnMut(usize, usize, usize, f64, f64),
{
    let m = assignment[j * inst.num_stages() + s] as usize;
    let start = ready[j].max(free[m]);
    let end = start + inst.proc_time(j, s, m);
    free[m] = end;
    ready[j] = end;
    emit(j, s, m, start, end);
}
