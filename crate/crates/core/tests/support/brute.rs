//! Event-driven reference simulator and exhaustive enumeration.
//!
//! Shares no code with the library decoder: jobs arrive at machine queues
//! over simulated time and each free machine serves its earliest arrival
//! (lower job index on ties).

#![allow(dead_code)]

use ffs_core::Instance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOp {
    pub machine: usize,
    pub start: f64,
    pub completion: f64,
}

/// Simulated timetable, `ops[j][s]`.
pub fn simulate(inst: &Instance, assignment: &[u32]) -> Vec<Vec<SimOp>> {
    let jobs = inst.num_jobs();
    let stages = inst.num_stages();
    let mut ops = vec![vec![SimOp { machine: 0, start: 0.0, completion: 0.0 }; stages]; jobs];
    let mut arrival: Vec<f64> = inst.release().to_vec();
    for s in 0..stages {
        let mut free_at = vec![0.0f64; inst.machines(s)];
        let mut waiting: Vec<usize> = (0..jobs).collect();
        while !waiting.is_empty() {
            // Next event: the earliest time some machine can start some waiting job.
            let mut pick: Option<(f64, f64, usize, usize)> = None;
            for (pos, &j) in waiting.iter().enumerate() {
                let m = assignment[j * stages + s] as usize;
                // A machine serves jobs in arrival order, so a job can only
                // start once every earlier arrival on that machine has.
                let blocked = waiting.iter().any(|&o| {
                    o != j
                        && assignment[o * stages + s] as usize == m
                        && (arrival[o], o) < (arrival[j], j)
                });
                if blocked {
                    continue;
                }
                let start = arrival[j].max(free_at[m]);
                let key = (start, arrival[j], j, pos);
                if pick.is_none_or(|p| (key.0, key.1, key.2) < (p.0, p.1, p.2)) {
                    pick = Some(key);
                }
            }
            let (start, _, j, pos) = pick.expect("some waiting job is unblocked");
            let m = assignment[j * stages + s] as usize;
            let completion = start + inst.proc_time(j, s, m);
            free_at[m] = completion;
            ops[j][s] = SimOp { machine: m, start, completion };
            waiting.remove(pos);
        }
        for j in 0..jobs {
            arrival[j] = ops[j][s].completion;
        }
    }
    ops
}

/// `WT * sum(max(0, C_j - D_j)) + max C_j` from a simulated timetable.
pub fn objective(inst: &Instance, ops: &[Vec<SimOp>]) -> f64 {
    let mut cmax = 0.0f64;
    let mut tardiness = 0.0;
    for (j, row) in ops.iter().enumerate() {
        let c = row.last().unwrap().completion;
        cmax = cmax.max(c);
        tardiness += (c - inst.due()[j]).max(0.0);
    }
    inst.weight() * tardiness + cmax
}

/// Every assignment of the instance, in mixed-radix order (gene 0 fastest).
pub fn all_assignments(inst: &Instance) -> Vec<Vec<u32>> {
    let stages = inst.num_stages();
    let radix: Vec<u32> = (0..inst.num_jobs() * stages)
        .map(|i| inst.machines(i % stages) as u32)
        .collect();
    let total: usize = radix.iter().map(|&r| r as usize).product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0u32; radix.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for (g, &r) in cur.iter_mut().zip(&radix) {
            *g += 1;
            if *g < r {
                break;
            }
            *g = 0;
        }
    }
    out
}

/// Minimum objective over all assignments.
pub fn optimum(inst: &Instance) -> f64 {
    all_assignments(inst)
        .iter()
        .map(|a| objective(inst, &simulate(inst, a)))
        .fold(f64::INFINITY, f64::min)
}
