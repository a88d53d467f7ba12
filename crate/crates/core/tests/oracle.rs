mod support;

use ffs_core::generate::{generate, GenParams};
use ffs_core::{decode, evaluate, Instance};
use support::brute;

fn small(seed: u64, jobs: usize, machines: &[usize]) -> Instance {
    generate(&GenParams {
        num_jobs: jobs,
        machines_per_stage: machines.to_vec(),
        weight: 100.0,
        seed,
        integer_times: false,
    })
    .unwrap()
}

#[test]
fn simulator_reproduces_hand_example() {
    let inst = Instance::new(
        vec![2, 1],
        vec![vec![vec![2.0, 3.0], vec![4.0]], vec![vec![4.0, 1.0], vec![1.0]]],
        vec![0.0, 2.0],
        vec![4.0, 4.0],
        100.0,
    )
    .unwrap();
    let ops = brute::simulate(&inst, &[0, 0, 0, 0]);
    assert_eq!((ops[0][0].start, ops[0][0].completion), (0.0, 2.0));
    assert_eq!((ops[1][0].start, ops[1][0].completion), (2.0, 6.0));
    assert_eq!((ops[0][1].start, ops[0][1].completion), (2.0, 6.0));
    assert_eq!((ops[1][1].start, ops[1][1].completion), (6.0, 7.0));
    assert_eq!(brute::objective(&inst, &ops), 100.0 * (2.0 + 3.0) + 7.0);
}

#[test]
fn decoder_matches_simulator_on_every_assignment() {
    for seed in 0..12u64 {
        let jobs = 2 + (seed as usize % 4);
        let inst = small(seed, jobs, &[2, 2]);
        for a in brute::all_assignments(&inst) {
            let sched = decode(&inst, &a).unwrap();
            let ops = brute::simulate(&inst, &a);
            for j in 0..jobs {
                for s in 0..2 {
                    let d = sched.op(j, s);
                    let o = ops[j][s];
                    assert_eq!((d.machine, d.start, d.completion), (o.machine, o.start, o.completion));
                }
            }
            assert_eq!(evaluate(&inst, &sched, 1e12).objective, brute::objective(&inst, &ops));
        }
    }
}

#[test]
fn decoder_matches_simulator_on_uneven_stages() {
    // Mixed machine counts, including a single-machine stage.
    for seed in 0..6u64 {
        let inst = small(100 + seed, 3, &[3, 1, 2]);
        for a in brute::all_assignments(&inst) {
            let sched = decode(&inst, &a).unwrap();
            sched.check_feasible(&inst).unwrap();
            let ops = brute::simulate(&inst, &a);
            assert_eq!(evaluate(&inst, &sched, 0.0).objective, brute::objective(&inst, &ops));
        }
    }
}

#[test]
fn decoder_matches_simulator_with_release_ties() {
    // Integer times make equal ready times (and so index tie-breaks) common.
    for seed in 0..8u64 {
        let inst = generate(&GenParams {
            num_jobs: 4,
            machines_per_stage: vec![2, 2],
            weight: 3.0,
            seed,
            integer_times: true,
        })
        .unwrap();
        for a in brute::all_assignments(&inst) {
            let sched = decode(&inst, &a).unwrap();
            let ops = brute::simulate(&inst, &a);
            assert_eq!(evaluate(&inst, &sched, 0.0).objective, brute::objective(&inst, &ops));
        }
    }
}

#[test]
fn enumeration_covers_the_space_once() {
    let inst = small(3, 3, &[2, 3]);
    let all = brute::all_assignments(&inst);
    assert_eq!(all.len(), 2 * 3 * 2 * 3 * 2 * 3);
    let unique: std::collections::HashSet<_> = all.iter().collect();
    assert_eq!(unique.len(), all.len());
}
