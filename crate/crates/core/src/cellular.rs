//! Synchronous cellular GA on a toroidal grid.
//!
//! Every cell mates only within its von Neumann neighborhood: two binary
//! tournaments over the neighbors pick the parents, two-point crossover makes
//! one child, per-gene mutation follows, and the child replaces the cell only
//! when it is strictly fitter. All cells of generation `g + 1` are computed
//! from a frozen copy of generation `g`, each with its own RNG substream keyed
//! by `(generation, cell)`, so results do not depend on how cells are spread
//! over workers.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::genome::{random_int_chromosome, IntChromosome};
use crate::model::{Decoder, Score};
use crate::problem::Problem;
use crate::rng::SplitMix64;

/// Substream key reserved for population initialization.
const INIT_STREAM: u64 = u64::MAX;

/// Tournament redraws before falling back to any distinct neighbor.
const MAX_PARENT_REDRAWS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellularParams {
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Manhattan radius of the neighborhood; 1 gives the four NEWS cells.
    pub neighborhood_radius: usize,
}

impl Default for CellularParams {
    fn default() -> Self {
        Self {
            crossover_rate: 1.0,
            mutation_rate: 0.05,
            neighborhood_radius: 1,
        }
    }
}

impl CellularParams {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("cellular {name} {p} not in [0, 1]")));
            }
        }
        if self.neighborhood_radius == 0 {
            return Err(Error::Config("neighborhood radius must be at least 1".into()));
        }
        Ok(())
    }
}

/// Grid dimensions `(width, height)` for `n` cells: the factorization with
/// the smallest side difference, width not above height.
pub fn grid_shape(n: usize) -> (usize, usize) {
    let mut w = (n as f64).sqrt() as usize;
    while w > 1 && !n.is_multiple_of(w) {
        w -= 1;
    }
    let w = w.max(1);
    (w, n / w)
}

/// Offsets with Manhattan distance `1..=radius`, ordered west, east, north,
/// south for radius 1.
fn neighborhood_offsets(radius: usize) -> Vec<(isize, isize)> {
    let r = radius as isize;
    let mut offsets = Vec::new();
    for d in 1..=r {
        for dy in -d..=d {
            let rest = d - dy.abs();
            if rest == 0 {
                continue;
            }
            offsets.push((-rest, dy));
            offsets.push((rest, dy));
        }
        offsets.push((0, -d));
        offsets.push((0, d));
    }
    // Radius 1 reads (-1,0),(1,0),(0,-1),(0,1).
    offsets
}

/// Toroidal neighbors of `(x, y)` on a `width x height` grid, center excluded.
pub fn neighborhood(pos: (usize, usize), width: usize, height: usize, radius: usize) -> Vec<(usize, usize)> {
    neighborhood_offsets(radius)
        .into_iter()
        .map(|(dx, dy)| {
            (
                (pos.0 as isize + dx).rem_euclid(width as isize) as usize,
                (pos.1 as isize + dy).rem_euclid(height as isize) as usize,
            )
        })
        .collect()
}

/// Slot order by fitness descending, ties by ascending slot index.
pub fn sort_island(fitness: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
    order
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub chromosome: IntChromosome,
    pub score: Score,
}

#[derive(Debug, Clone)]
pub struct CellGrid {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    /// Flat neighbor indices, `neighbor_count` per cell.
    neighbors: Vec<usize>,
    neighbor_count: usize,
    generation: u64,
    seed: u64,
    params: CellularParams,
}

impl CellGrid {
    /// Random population on the most-square grid for `size` cells.
    pub fn new(problem: &Problem, size: usize, params: CellularParams, seed: u64) -> Result<Self> {
        let (w, h) = grid_shape(size);
        Self::with_shape(problem, w, h, params, seed)
    }

    pub fn with_shape(
        problem: &Problem,
        width: usize,
        height: usize,
        params: CellularParams,
        seed: u64,
    ) -> Result<Self> {
        params.validate()?;
        let min_side = 2 * params.neighborhood_radius + 1;
        if width < min_side || height < min_side {
            return Err(Error::Config(format!(
                "cellular grid {width}x{height} too small for neighborhood radius {}; \
                 both sides must be at least {min_side}",
                params.neighborhood_radius
            )));
        }
        let mut rng = SplitMix64::substream(seed, &[INIT_STREAM]);
        let mut dec = problem.decoder();
        let cells = (0..width * height)
            .map(|_| {
                let chromosome = random_int_chromosome(problem.instance(), &mut rng);
                let score = problem.score(&mut dec, chromosome.genes());
                Cell { chromosome, score }
            })
            .collect();
        let mut neighbors = Vec::new();
        for y in 0..height {
            for x in 0..width {
                neighbors.extend(
                    neighborhood((x, y), width, height, params.neighborhood_radius)
                        .into_iter()
                        .map(|(nx, ny)| ny * width + nx),
                );
            }
        }
        let neighbor_count = neighbors.len() / (width * height);
        Ok(Self {
            width,
            height,
            cells,
            neighbors,
            neighbor_count,
            generation: 0,
            seed,
            params,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn params(&self) -> &CellularParams {
        &self.params
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, index: usize) -> &Cell {
        &self.cells[index]
    }

    pub fn fitness_values(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.score.fitness).collect()
    }

    /// Fittest cell, lowest index on ties.
    pub fn best(&self) -> &Cell {
        &self.cells[sort_island(&self.fitness_values())[0]]
    }

    pub fn neighbor_indices(&self, index: usize) -> &[usize] {
        &self.neighbors[index * self.neighbor_count..(index + 1) * self.neighbor_count]
    }

    /// Overwrites one cell with a fresh chromosome and rescored fitness.
    pub fn replace(&mut self, index: usize, chromosome: IntChromosome, score: Score) {
        self.cells[index] = Cell { chromosome, score };
    }

    /// The replacement `cell_step` proposes for cell `index`, or `None` when
    /// the incumbent stays.
    pub fn cell_step(
        &self,
        problem: &Problem,
        index: usize,
        rng: &mut SplitMix64,
        dec: &mut Decoder,
    ) -> Option<Cell> {
        let hood = self.neighbor_indices(index);
        let p1 = self.tournament(hood, rng);
        let mut p2 = self.tournament(hood, rng);
        let mut tries = 1;
        while p2 == p1 && tries < MAX_PARENT_REDRAWS {
            p2 = self.tournament(hood, rng);
            tries += 1;
        }
        if p2 == p1 {
            p2 = hood.iter().copied().find(|&n| n != p1).unwrap_or(p1);
        }

        let inst = problem.instance();
        let mut child = self.cells[p1].chromosome.clone();
        let len = child.len();
        if rng.chance(self.params.crossover_rate) && len > 0 {
            let (c1, c2) = cut_points(len, rng);
            child.genes_mut()[c1..c2].copy_from_slice(&self.cells[p2].chromosome.genes()[c1..c2]);
        }
        let s_count = inst.num_stages();
        for (i, g) in child.genes_mut().iter_mut().enumerate() {
            if rng.chance(self.params.mutation_rate) {
                *g = rng.below(inst.machines(i % s_count)) as u32;
            }
        }

        let score = problem.score(dec, child.genes());
        accept_if_better(&self.cells[index], Cell { chromosome: child, score })
    }

    /// Binary tournament over the neighborhood; the first draw wins ties.
    fn tournament(&self, hood: &[usize], rng: &mut SplitMix64) -> usize {
        let a = hood[rng.below(hood.len())];
        let b = hood[rng.below(hood.len())];
        if self.cells[b].score.fitness > self.cells[a].score.fitness {
            b
        } else {
            a
        }
    }

    /// Advances one synchronous generation.
    pub fn step(&mut self, problem: &Problem, exec: Exec) {
        let generation = self.generation + 1;
        let snapshot = &*self;
        let updates = exec.map_slots(problem, self.cells.len(), |dec, i| {
            let mut rng = SplitMix64::substream(snapshot.seed, &[generation, i as u64]);
            snapshot.cell_step(problem, i, &mut rng, dec)
        });
        for (slot, update) in self.cells.iter_mut().zip(updates) {
            if let Some(cell) = update {
                *slot = cell;
            }
        }
        self.generation = generation;
    }
}

/// Two distinct cut points `c1 < c2` drawn uniformly from `0..=len`.
fn cut_points(len: usize, rng: &mut SplitMix64) -> (usize, usize) {
    let a = rng.below(len + 1);
    let mut b = rng.below(len);
    if b >= a {
        b += 1;
    }
    (a.min(b), a.max(b))
}

/// Strict improvement installs the candidate.
pub fn accept_if_better(center: &Cell, candidate: Cell) -> Option<Cell> {
    (candidate.score.fitness > center.score.fitness).then_some(candidate)
}
