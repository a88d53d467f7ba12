use std::sync::Arc;

use crate::error::{Error, Result};
use crate::genome::{random_int_chromosome, BitLayout};
use crate::model::{estimate_emax, Decoder, Instance, Score};
use crate::rng::SplitMix64;

/// Fixed stream for sampled `E_max` estimates, so the estimate depends on the
/// instance alone.
const EMAX_SAMPLE_SEED: u64 = 0x00E3_A7F1_5A3B_1E00;

/// How the fitness offset `E_max` is estimated for an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmaxPolicy {
    /// [`estimate_emax`]: a guaranteed upper bound on every objective. The
    /// bound is loose by orders of magnitude once tardiness is weighted, which
    /// pins every fitness ratio near 1 and keeps the migration rate below one
    /// migrant per island.
    Bound,
    /// Worst objective over `samples` uniformly random chromosomes. Worse
    /// chromosomes get fitness 0 through the clamp.
    Sampled { samples: usize },
}

impl Default for EmaxPolicy {
    fn default() -> Self {
        EmaxPolicy::Sampled { samples: 1024 }
    }
}

impl std::str::FromStr for EmaxPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bound" => Ok(EmaxPolicy::Bound),
            "sampled" => Ok(EmaxPolicy::default()),
            other => match other.strip_prefix("sampled:").map(str::parse) {
                Some(Ok(samples)) if samples > 0 => Ok(EmaxPolicy::Sampled { samples }),
                _ => Err(Error::Config(format!(
                    "unknown emax policy {other:?}; expected bound, sampled or sampled:<count>"
                ))),
            },
        }
    }
}

impl std::fmt::Display for EmaxPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EmaxPolicy::Bound => f.write_str("bound"),
            EmaxPolicy::Sampled { samples } => write!(f, "sampled:{samples}"),
        }
    }
}

/// Worst objective among `samples` random chromosomes drawn from a fixed
/// stream.
pub fn sample_emax(inst: &Instance, samples: usize) -> f64 {
    let mut rng = SplitMix64::new(EMAX_SAMPLE_SEED);
    let mut dec = Decoder::new(inst);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let c = random_int_chromosome(inst, &mut rng);
        let (makespan, tardiness) = dec.makespan_tardiness(inst, c.genes());
        worst = worst.max(inst.weight() * tardiness + makespan);
    }
    worst
}

/// An instance bundled with what every island needs to score chromosomes.
#[derive(Debug, Clone)]
pub struct Problem {
    instance: Instance,
    emax: f64,
    layout: Arc<BitLayout>,
}

impl Problem {
    /// Estimates `E_max` once with the default policy.
    pub fn new(instance: Instance) -> Self {
        Self::with_policy(instance, EmaxPolicy::default())
    }

    pub fn with_policy(instance: Instance, policy: EmaxPolicy) -> Self {
        let emax = match policy {
            EmaxPolicy::Bound => estimate_emax(&instance),
            EmaxPolicy::Sampled { samples } => sample_emax(&instance, samples),
        };
        Self::with_emax(instance, emax)
    }

    pub fn with_emax(instance: Instance, emax: f64) -> Self {
        let layout = BitLayout::for_instance(&instance);
        Self {
            instance,
            emax,
            layout,
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn emax(&self) -> f64 {
        self.emax
    }

    pub fn layout(&self) -> &Arc<BitLayout> {
        &self.layout
    }

    pub fn decoder(&self) -> Decoder {
        Decoder::new(&self.instance)
    }

    #[inline]
    pub fn score(&self, decoder: &mut Decoder, genes: &[u32]) -> Score {
        decoder.score(&self.instance, genes, self.emax)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GenParams};

    #[test]
    fn sampled_emax_is_deterministic_and_below_the_bound() {
        let inst = generate(&GenParams::uniform(30, 4, 2, 6)).unwrap();
        let a = sample_emax(&inst, 256);
        assert_eq!(a, sample_emax(&inst, 256));
        assert!(a > 0.0 && a <= estimate_emax(&inst));
        assert!(sample_emax(&inst, 512) >= a, "longer sample extends the same stream");
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("bound".parse::<EmaxPolicy>().unwrap(), EmaxPolicy::Bound);
        assert_eq!(
            "sampled:64".parse::<EmaxPolicy>().unwrap(),
            EmaxPolicy::Sampled { samples: 64 }
        );
        assert!("sampled:0".parse::<EmaxPolicy>().is_err());
        assert_eq!(EmaxPolicy::default().to_string(), "sampled:1024");
    }
}
