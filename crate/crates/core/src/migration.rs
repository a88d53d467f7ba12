//! Adaptive two-island migration.
//!
//! Given the best fitness of each island, the direction indicator is the
//! ratio of the smaller to the larger value,
//!
//! ```text
//! beta  = fit_A / fit_B   if fit_A < fit_B
//!         fit_B / fit_A   if fit_A > fit_B
//!         1               if fit_A = fit_B
//! alpha = 1 - beta        if 1 - beta < theta, else 0
//! ```
//!
//! and migration flows from the fitter island to the weaker one. The
//! `floor(alpha * N)` best emigrants are copied over the same number of the
//! worst immigrants, `N` being the island size.

use serde::{Deserialize, Serialize};

use crate::cellular::{sort_island, CellGrid};
use crate::error::{Error, Result};
use crate::genome::{bits_to_int, int_to_bits, IntChromosome};
use crate::problem::Problem;
use crate::pseudo::PairPopulation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MigrationPolicy {
    pub threshold: f64,
    pub gap: u64,
}

impl Default for MigrationPolicy {
    fn default() -> Self {
        Self {
            threshold: 1.0,
            gap: 500,
        }
    }
}

impl MigrationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(format!(
                "migration threshold {} not in [0, 1]",
                self.threshold
            )));
        }
        if self.gap == 0 {
            return Err(Error::Config("migration gap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "A->B")]
    AToB,
    #[serde(rename = "B->A")]
    BToA,
    #[serde(rename = "none")]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MigrationDecision {
    pub beta: f64,
    pub alpha: f64,
    pub direction: Direction,
    pub migrants: usize,
}

pub fn compute_beta(fit_a: f64, fit_b: f64) -> Result<f64> {
    if fit_a < 0.0 || fit_b < 0.0 || fit_a.is_nan() || fit_b.is_nan() {
        return Err(Error::Contract(format!(
            "fitness values must be non-negative, got {fit_a} and {fit_b}"
        )));
    }
    Ok(if fit_a < fit_b {
        fit_a / fit_b
    } else if fit_a > fit_b {
        fit_b / fit_a
    } else {
        1.0
    })
}

pub fn compute_alpha(beta: f64, threshold: f64) -> f64 {
    alpha_from_gap(1.0 - beta, threshold)
}

fn alpha_from_gap(gap: f64, threshold: f64) -> f64 {
    if gap < threshold {
        gap
    } else {
        0.0
    }
}

/// `1 - beta` evaluated as `(hi - lo) / hi`, which rounds once instead of
/// twice (`1 - 400/500` is not the double nearest 0.2, `100/500` is).
fn relative_gap(fit_a: f64, fit_b: f64) -> f64 {
    let (lo, hi) = if fit_a < fit_b { (fit_a, fit_b) } else { (fit_b, fit_a) };
    if hi == lo {
        0.0
    } else {
        (hi - lo) / hi
    }
}

pub fn decide(fit_a: f64, fit_b: f64, policy: &MigrationPolicy, island_size: usize) -> Result<MigrationDecision> {
    let beta = compute_beta(fit_a, fit_b)?;
    let alpha = alpha_from_gap(relative_gap(fit_a, fit_b), policy.threshold);
    let migrants = (alpha * island_size as f64).floor() as usize;
    let direction = if alpha == 0.0 || migrants == 0 {
        Direction::None
    } else if fit_a > fit_b {
        Direction::AToB
    } else {
        Direction::BToA
    };
    Ok(MigrationDecision {
        beta,
        alpha,
        direction,
        migrants: if direction == Direction::None { 0 } else { migrants },
    })
}

/// What migration needs from an island: ranked slots, copies out, installs in.
pub trait Island {
    fn size(&self) -> usize;
    fn fitness_values(&self) -> Vec<f64>;
    /// Copy of the chromosome in `slot`, in the integer view.
    fn export(&self, slot: usize) -> IntChromosome;
    /// Overwrites `slot` with `chromosome` and rescored fitness.
    fn install(&mut self, problem: &Problem, slot: usize, chromosome: &IntChromosome);
}

impl Island for CellGrid {
    fn size(&self) -> usize {
        self.len()
    }

    fn fitness_values(&self) -> Vec<f64> {
        CellGrid::fitness_values(self)
    }

    fn export(&self, slot: usize) -> IntChromosome {
        self.cell(slot).chromosome.clone()
    }

    fn install(&mut self, problem: &Problem, slot: usize, chromosome: &IntChromosome) {
        let score = problem.score(&mut problem.decoder(), chromosome.genes());
        self.replace(slot, chromosome.clone(), score);
    }
}

impl Island for PairPopulation {
    fn size(&self) -> usize {
        self.len()
    }

    fn fitness_values(&self) -> Vec<f64> {
        PairPopulation::fitness_values(self)
    }

    fn export(&self, slot: usize) -> IntChromosome {
        bits_to_int(&self.member(slot).bits)
    }

    fn install(&mut self, problem: &Problem, slot: usize, chromosome: &IntChromosome) {
        let score = problem.score(&mut problem.decoder(), chromosome.genes());
        self.replace(slot, int_to_bits(chromosome, problem.layout()), score);
    }
}

/// Copies the `k` best emigrants over the `k` worst immigrants, best migrant
/// onto the worst slot. The emigrant island is only read.
pub fn execute<E, I>(problem: &Problem, emigrant: &E, immigrant: &mut I, k: usize) -> Result<()>
where
    E: Island + ?Sized,
    I: Island + ?Sized,
{
    if k > emigrant.size() || k > immigrant.size() {
        return Err(Error::Contract(format!(
            "cannot migrate {k} individuals between islands of {} and {}",
            emigrant.size(),
            immigrant.size()
        )));
    }
    if k == 0 {
        return Ok(());
    }
    let best = sort_island(&emigrant.fitness_values());
    let worst: Vec<usize> = sort_island(&immigrant.fitness_values()).into_iter().rev().collect();
    let migrants: Vec<IntChromosome> = best[..k].iter().map(|&s| emigrant.export(s)).collect();
    for (chromosome, &slot) in migrants.iter().zip(&worst[..k]) {
        immigrant.install(problem, slot, chromosome);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellular::CellularParams;
    use crate::generate::{generate, GenParams};
    use crate::pseudo::PseudoParams;

    #[test]
    fn beta_examples() {
        assert_eq!(compute_beta(400.0, 500.0).unwrap(), 0.8);
        assert_eq!(compute_beta(500.0, 400.0).unwrap(), 0.8);
        assert_eq!(compute_beta(7.0, 7.0).unwrap(), 1.0);
        assert_eq!(compute_beta(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(compute_beta(0.0, 3.0).unwrap(), 0.0);
        assert!(compute_beta(-1.0, 3.0).is_err());
    }

    #[test]
    fn alpha_examples() {
        assert!((compute_alpha(0.8, 1.0) - 0.2).abs() < 1e-15);
        assert_eq!(compute_alpha(0.8, 1.0), 1.0 - 0.8);
        assert_eq!(compute_alpha(1.0, 0.7), 0.0);
        assert_eq!(compute_alpha(0.0, 1.0), 0.0);
    }

    #[test]
    fn decide_examples() {
        let policy = MigrationPolicy {
            threshold: 1.0,
            gap: 500,
        };
        let d = decide(400.0, 500.0, &policy, 256).unwrap();
        assert_eq!(d.beta, 0.8);
        assert_eq!(d.alpha, 0.2);
        assert_eq!(d.direction, Direction::BToA);
        assert_eq!(d.migrants, 51);
        assert_eq!(decide(500.0, 400.0, &policy, 256).unwrap().direction, Direction::AToB);
        assert_eq!(decide(9.0, 9.0, &policy, 256).unwrap().direction, Direction::None);
        let closed = MigrationPolicy {
            threshold: 0.0,
            gap: 1,
        };
        let d = decide(400.0, 500.0, &closed, 256).unwrap();
        assert_eq!((d.alpha, d.direction, d.migrants), (0.0, Direction::None, 0));
        // alpha too small for one migrant
        let d = decide(999.0, 1000.0, &policy, 256).unwrap();
        assert_eq!((d.direction, d.migrants), (Direction::None, 0));
    }

    #[test]
    fn policy_validation() {
        assert!(MigrationPolicy { threshold: 1.5, gap: 1 }.validate().is_err());
        assert!(MigrationPolicy { threshold: 0.5, gap: 0 }.validate().is_err());
        assert!(MigrationPolicy::default().validate().is_ok());
    }

    #[test]
    fn execute_copies_best_over_worst() {
        let p = Problem::new(generate(&GenParams::uniform(12, 3, 2, 5)).unwrap());
        let grid = CellGrid::new(&p, 16, CellularParams::default(), 1).unwrap();
        let mut pop = PairPopulation::init_pairs(&p, 16, PseudoParams::default(), 2).unwrap();
        let before = grid.cells().to_vec();
        let old_best = pop.current_best().fitness;
        let emigrant_order = sort_island(&grid.fitness_values());
        let third = grid.cell(emigrant_order[2]).score.fitness;

        execute(&p, &grid, &mut pop, 3).unwrap();

        assert_eq!(grid.cells(), &before[..]);
        assert_eq!(pop.len(), 16);
        assert!(pop.current_best().fitness >= old_best.max(third));
        let installed = bits_to_int(&pop.member(0).bits);
        assert!(IntChromosome::new(p.instance(), installed.into_genes()).is_ok());

        assert!(execute(&p, &grid, &mut pop, 17).is_err());
        let snapshot = pop.pairs().to_vec();
        execute(&p, &grid, &mut pop, 0).unwrap();
        assert_eq!(pop.pairs(), &snapshot[..]);
    }
}
