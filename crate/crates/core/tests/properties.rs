use std::sync::Arc;

use ffs_core::cellular::{CellGrid, CellularParams};
use ffs_core::generate::{generate, GenParams};
use ffs_core::genome::{bits_to_int, complement, int_to_bits, random_int_chromosome, BitChromosome, BitLayout, IntChromosome};
use ffs_core::migration::{execute, Island};
use ffs_core::pseudo::{mask_crossover, PairPopulation, PseudoParams};
use ffs_core::rng::SplitMix64;
use ffs_core::{decode, estimate_emax, evaluate, EmaxPolicy, Exec, Instance, Problem};
use proptest::prelude::*;

fn instance(seed: u64, jobs: usize, machines: Vec<usize>) -> Instance {
    generate(&GenParams {
        num_jobs: jobs,
        machines_per_stage: machines,
        weight: 100.0,
        seed,
        integer_times: false,
    })
    .unwrap()
}

fn shape() -> impl Strategy<Value = (u64, usize, Vec<usize>)> {
    (any::<u64>(), 1usize..12, prop::collection::vec(1usize..6, 2..5))
        .prop_filter("some stage has parallel machines", |(_, _, m)| m.iter().any(|&x| x >= 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decoded_schedules_are_feasible((seed, jobs, machines) in shape(), gseed in any::<u64>()) {
        let inst = instance(seed, jobs, machines);
        let c = random_int_chromosome(&inst, &mut SplitMix64::new(gseed));
        let sched = decode(&inst, c.genes()).unwrap();
        prop_assert!(sched.check_feasible(&inst).is_ok());
        let rep = evaluate(&inst, &sched, estimate_emax(&inst));
        prop_assert!(rep.makespan >= inst.release().iter().copied().fold(0.0, f64::max));
        prop_assert!(rep.total_tardiness >= 0.0);
        prop_assert!(rep.objective <= rep.emax_used);
    }

    #[test]
    fn int_bit_round_trip((seed, jobs, machines) in shape(), gseed in any::<u64>()) {
        let inst = instance(seed, jobs, machines);
        let layout = BitLayout::for_instance(&inst);
        let c = random_int_chromosome(&inst, &mut SplitMix64::new(gseed));
        let b = int_to_bits(&c, &layout);
        prop_assert_eq!(bits_to_int(&b), c);
        prop_assert_eq!(complement(&complement(&b)), b.clone());
        let back = bits_to_int(&complement(&b));
        prop_assert!(IntChromosome::new(&inst, back.into_genes()).is_ok());
    }

    #[test]
    fn mask_crossover_keeps_pairs_complementary((seed, jobs, machines) in shape(), gseed in any::<u64>()) {
        let inst = instance(seed, jobs, machines);
        let layout = BitLayout::for_instance(&inst);
        let mut rng = SplitMix64::new(gseed);
        let a = int_to_bits(&random_int_chromosome(&inst, &mut rng), &layout);
        let b = complement(&a);
        let mask: Vec<u64> = (0..a.words().len()).map(|_| rng.next_u64()).collect();
        let (c1, c2) = mask_crossover(&a, &b, &mask).unwrap();
        prop_assert_eq!(complement(&c1), c2);
    }
}

#[test]
fn bound_emax_gives_positive_fitness() {
    let inst = instance(5, 40, vec![2, 3, 2, 4]);
    let problem = Problem::with_policy(inst.clone(), EmaxPolicy::Bound);
    let mut dec = problem.decoder();
    let mut rng = SplitMix64::new(9);
    for _ in 0..1000 {
        let c = random_int_chromosome(&inst, &mut rng);
        assert!(problem.score(&mut dec, c.genes()).fitness > 0.0);
    }
}

#[test]
fn genome_round_trip_exhaustive_for_small_machine_counts() {
    for m in 1..=5usize {
        // Two stages so the instance is valid even when m == 1.
        let machines = [m, 2];
        let layout = Arc::new(BitLayout::new(&machines, 2));
        let inst = Instance::new(
            machines.to_vec(),
            vec![vec![vec![1.0; m], vec![1.0; 2]]; 2],
            vec![0.0; 2],
            vec![0.0; 2],
            1.0,
        )
        .unwrap();
        let radix = [m as u32, 2, m as u32, 2];
        let total: u32 = radix.iter().product();
        for code in 0..total {
            let mut rest = code;
            let genes: Vec<u32> = radix
                .iter()
                .map(|&r| {
                    let g = rest % r;
                    rest /= r;
                    g
                })
                .collect();
            let c = IntChromosome::new(&inst, genes).unwrap();
            let b = int_to_bits(&c, &layout);
            assert_eq!(bits_to_int(&b), c, "M={m}");
            let comp = complement(&b);
            assert_eq!(complement(&comp), b);
            // Complement decodes to a valid assignment of every stage.
            for (g, &r) in bits_to_int(&comp).genes().iter().zip(&radix) {
                assert!(*g < r);
            }
        }
        // Every bit pattern, not just encoded ones, decodes in range.
        let len = layout.len_bits();
        for pattern in 0u32..(1 << len) {
            let s: String = (0..len).map(|k| if pattern >> k & 1 == 1 { '1' } else { '0' }).collect();
            let b = BitChromosome::from_bit_str(layout.clone(), &s).unwrap();
            for (g, &r) in bits_to_int(&b).genes().iter().zip(&radix) {
                assert!(*g < r);
            }
        }
    }
}

#[test]
fn ten_thousand_masks_preserve_complementarity() {
    let inst = instance(11, 60, vec![2, 2, 2, 2]);
    let layout = BitLayout::for_instance(&inst);
    let mut rng = SplitMix64::new(2024);
    let mut a = int_to_bits(&random_int_chromosome(&inst, &mut rng), &layout);
    let mut b = complement(&a);
    for _ in 0..10_000 {
        let mask: Vec<u64> = (0..a.words().len()).map(|_| rng.next_u64()).collect();
        let (c1, c2) = mask_crossover(&a, &b, &mask).unwrap();
        assert_eq!(complement(&c1), c2);
        a = c1;
        b = c2;
    }
}

#[test]
fn cellular_best_never_worsens_over_100_generations() {
    let problem = Problem::new(instance(21, 30, vec![2, 2, 2, 2]));
    let mut grid = CellGrid::new(&problem, 64, CellularParams::default(), 3).unwrap();
    let mut best = grid.best().score.fitness;
    let mut cell_fitness = grid.fitness_values();
    for _ in 0..100 {
        grid.step(&problem, Exec::Sequential);
        let now = grid.fitness_values();
        for (before, after) in cell_fitness.iter().zip(&now) {
            assert!(after >= before);
        }
        assert!(grid.best().score.fitness >= best);
        best = grid.best().score.fitness;
        cell_fitness = now;
    }
}

#[test]
fn pseudo_population_stays_complementary() {
    let problem = Problem::new(instance(22, 30, vec![2, 3, 2, 2]));
    let mut pop = PairPopulation::init_pairs(&problem, 64, PseudoParams::default(), 4).unwrap();
    for _ in 0..50 {
        pop.step(&problem, Exec::Sequential);
        for [x, y] in pop.pairs() {
            assert_eq!(complement(&x.bits), y.bits);
        }
    }
}

fn best(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn migration_conserves_sizes_and_leaves_emigrants_untouched() {
    let problem = Problem::new(instance(23, 30, vec![2, 2, 2, 2]));
    for (k, seed) in [(0usize, 1u64), (1, 2), (17, 3), (64, 4)] {
        let mut grid = CellGrid::new(&problem, 64, CellularParams::default(), seed).unwrap();
        let mut pop = PairPopulation::init_pairs(&problem, 64, PseudoParams::default(), seed).unwrap();
        for _ in 0..5 {
            grid.step(&problem, Exec::Sequential);
            pop.step(&problem, Exec::Sequential);
        }

        let grid_before = grid.clone();
        let pop_best = best(&Island::fitness_values(&pop));
        execute(&problem, &grid, &mut pop, k).unwrap();
        assert_eq!(grid.cells(), grid_before.cells());
        assert_eq!(Island::size(&pop), 64);
        assert!(best(&Island::fitness_values(&pop)) >= pop_best);

        let pop_before = pop.clone();
        let grid_best = best(&Island::fitness_values(&grid));
        execute(&problem, &pop, &mut grid, k).unwrap();
        assert_eq!(pop.pairs(), pop_before.pairs());
        assert_eq!(Island::size(&grid), 64);
        assert!(best(&Island::fitness_values(&grid)) >= grid_best);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn instance_json_round_trips_exactly((seed, jobs, machines) in shape()) {
        let inst = instance(seed, jobs, machines);
        let back = Instance::from_json_str(&inst.to_json_string()).unwrap();
        prop_assert_eq!(back.proc_time_nested(), inst.proc_time_nested());
        prop_assert_eq!(back.release(), inst.release());
        prop_assert_eq!(back.due(), inst.due());
        prop_assert_eq!(back.to_json_string(), inst.to_json_string());
    }
}
