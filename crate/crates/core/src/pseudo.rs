//! Pseudo GA over complementary parent pairs.
//!
//! Each pair starts as `(x, !x)`. A generation crosses every pair with a
//! uniform random bit mask and the two children replace their parents
//! outright; there is no selection between pairs and no mutation. Since
//! `(a & m) | (!a & !m)` is the complement of `(!a & m) | (a & !m)`, a
//! complementary pair stays complementary under any mask, so every allele
//! remains present in every pair. The population can lose its best member at
//! any time; a single best-so-far record is kept on the side.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::genome::{bits_to_genes, bits_to_int, int_to_bits, random_int_chromosome, BitChromosome, IntChromosome};
use crate::model::{Decoder, Score};
use crate::problem::Problem;
use crate::rng::SplitMix64;

const INIT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoParams {
    pub crossover_rate: f64,
}

impl Default for PseudoParams {
    fn default() -> Self {
        Self {
            crossover_rate: 0.75,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub bits: BitChromosome,
    pub score: Score,
}

impl Member {
    fn scored(problem: &Problem, bits: BitChromosome, dec: &mut Decoder, genes: &mut Vec<u32>) -> Self {
        bits_to_genes(&bits, genes);
        let score = problem.score(dec, genes);
        Self { bits, score }
    }
}

/// Best chromosome ever evaluated on the island.
#[derive(Debug, Clone, PartialEq)]
pub struct BestRecord {
    pub chromosome: IntChromosome,
    pub score: Score,
}

/// Pure mask crossover: `(a & m | b & !m, b & m | a & !m)`.
pub fn mask_crossover(a: &BitChromosome, b: &BitChromosome, mask: &[u64]) -> Result<(BitChromosome, BitChromosome)> {
    if !a.same_layout(b) {
        return Err(Error::Contract("pair members have different bit layouts".into()));
    }
    if mask.len() != a.words().len() {
        return Err(Error::Contract("mask length does not match chromosome".into()));
    }
    Ok((a.blend(b, mask), b.blend(a, mask)))
}

#[derive(Debug, Clone)]
pub struct PairPopulation {
    pairs: Vec<[Member; 2]>,
    best: BestRecord,
    generation: u64,
    seed: u64,
    params: PseudoParams,
}

impl PairPopulation {
    /// `size / 2` pairs, each a random chromosome and its complement.
    pub fn init_pairs(problem: &Problem, size: usize, params: PseudoParams, seed: u64) -> Result<Self> {
        if size == 0 || !size.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "pseudo island size must be even and positive, got {size}"
            )));
        }
        if !(0.0..=1.0).contains(&params.crossover_rate) {
            return Err(Error::Config(format!(
                "pseudo crossover_rate {} not in [0, 1]",
                params.crossover_rate
            )));
        }
        let mut rng = SplitMix64::substream(seed, &[INIT_STREAM]);
        let mut dec = problem.decoder();
        let mut genes = Vec::with_capacity(problem.instance().num_genes());
        let pairs: Vec<[Member; 2]> = (0..size / 2)
            .map(|_| {
                let a = int_to_bits(&random_int_chromosome(problem.instance(), &mut rng), problem.layout());
                let b = a.complement();
                [
                    Member::scored(problem, a, &mut dec, &mut genes),
                    Member::scored(problem, b, &mut dec, &mut genes),
                ]
            })
            .collect();
        let first = &pairs[0][0];
        let mut pop = Self {
            best: BestRecord {
                chromosome: bits_to_int(&first.bits),
                score: first.score,
            },
            pairs,
            generation: 0,
            seed,
            params,
        };
        pop.refresh_best();
        Ok(pop)
    }

    pub fn len(&self) -> usize {
        self.pairs.len() * 2
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn pairs(&self) -> &[[Member; 2]] {
        &self.pairs
    }

    /// Member in slot `index`; slots `2p` and `2p + 1` form pair `p`.
    pub fn member(&self, index: usize) -> &Member {
        &self.pairs[index / 2][index % 2]
    }

    pub fn fitness_values(&self) -> Vec<f64> {
        self.pairs
            .iter()
            .flat_map(|p| [p[0].score.fitness, p[1].score.fitness])
            .collect()
    }

    /// Fittest member of the current population.
    pub fn current_best(&self) -> Score {
        let mut best = self.pairs[0][0].score;
        for m in self.pairs.iter().flatten() {
            if m.score.fitness > best.fitness {
                best = m.score;
            }
        }
        best
    }

    pub fn best_so_far(&self) -> &BestRecord {
        &self.best
    }

    /// Folds every current member into the best-so-far record, in slot order.
    fn refresh_best(&mut self) {
        for m in self.pairs.iter().flatten() {
            if m.score.fitness > self.best.score.fitness {
                self.best = BestRecord {
                    chromosome: bits_to_int(&m.bits),
                    score: m.score,
                };
            }
        }
    }

    /// Overwrites one slot; the pair is not repaired to complementarity.
    pub fn replace(&mut self, index: usize, bits: BitChromosome, score: Score) {
        self.pairs[index / 2][index % 2] = Member { bits, score };
        if score.fitness > self.best.score.fitness {
            self.best = BestRecord {
                chromosome: bits_to_int(&self.pairs[index / 2][index % 2].bits),
                score,
            };
        }
    }

    /// Crosses one pair and scores both children.
    pub fn pair_step(
        problem: &Problem,
        pair: &[Member; 2],
        crossover_rate: f64,
        rng: &mut SplitMix64,
        dec: &mut Decoder,
    ) -> Result<[Member; 2]> {
        let [a, b] = pair;
        if !a.bits.same_layout(&b.bits) {
            return Err(Error::Contract("pair members have different bit layouts".into()));
        }
        if !rng.chance(crossover_rate) {
            return Ok(pair.clone());
        }
        let mask = BitChromosome::random_mask(a.bits.layout(), rng);
        let (c1, c2) = mask_crossover(&a.bits, &b.bits, &mask)?;
        let mut genes = Vec::with_capacity(problem.instance().num_genes());
        Ok([
            Member::scored(problem, c1, dec, &mut genes),
            Member::scored(problem, c2, dec, &mut genes),
        ])
    }

    /// Replaces every pair by its children.
    pub fn step(&mut self, problem: &Problem, exec: Exec) {
        let generation = self.generation + 1;
        let (seed, rate) = (self.seed, self.params.crossover_rate);
        let pairs = &self.pairs;
        let children = exec.map_slots(problem, pairs.len(), |dec, p| {
            let mut rng = SplitMix64::substream(seed, &[generation, p as u64]);
            Self::pair_step(problem, &pairs[p], rate, &mut rng, dec)
                .expect("island members share one layout")
        });
        self.pairs = children;
        self.generation = generation;
        self.refresh_best();
    }
}
