use rayon::prelude::*;

use crate::model::Decoder;
use crate::problem::Problem;

/// How an island runs its per-slot work within one generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    /// On the calling thread, slot by slot.
    Sequential,
    /// Fanned out over the current rayon pool.
    #[default]
    Parallel,
}

impl Exec {
    /// Evaluates `f` for every slot index. Output order is slot order in both
    /// modes, and each worker gets its own decoder scratch.
    pub(crate) fn map_slots<T, F>(self, problem: &Problem, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut Decoder, usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => {
                let mut dec = problem.decoder();
                (0..n).map(|i| f(&mut dec, i)).collect()
            }
            Exec::Parallel => (0..n)
                .into_par_iter()
                .map_init(|| problem.decoder(), |dec, i| f(dec, i))
                .collect(),
        }
    }
}
