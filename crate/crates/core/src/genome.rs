//! Two views of the machine-assignment chromosome.
//!
//! The integer view stores one machine index per gene. The bit view stores
//! each gene in a fixed-width slot of `max(1, ceil(log2 M_s))` bits, most
//! significant bit first, slots concatenated in gene order. Slot values are
//! read back modulo `M_s`, so every bit pattern (in particular every
//! complement) decodes to a feasible assignment.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntChromosome {
    genes: Vec<u32>,
}

impl IntChromosome {
    /// Wraps genes after checking every one against its stage's machine count.
    pub fn new(inst: &Instance, genes: Vec<u32>) -> Result<Self> {
        if genes.len() != inst.num_genes() {
            return Err(Error::Contract(format!(
                "chromosome has {} genes, expected {}",
                genes.len(),
                inst.num_genes()
            )));
        }
        let s_count = inst.num_stages();
        if let Some(i) = genes
            .iter()
            .enumerate()
            .position(|(i, &g)| g as usize >= inst.machines(i % s_count))
        {
            return Err(Error::Contract(format!("gene {i} out of machine range")));
        }
        Ok(Self { genes })
    }

    #[cfg(test)]
    pub(crate) fn from_raw(genes: Vec<u32>) -> Self {
        Self { genes }
    }

    pub fn genes(&self) -> &[u32] {
        &self.genes
    }

    pub(crate) fn genes_mut(&mut self) -> &mut [u32] {
        &mut self.genes
    }

    pub fn into_genes(self) -> Vec<u32> {
        self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }
}

/// Uniformly random assignment, drawn gene by gene in order.
pub fn random_int_chromosome(inst: &Instance, rng: &mut SplitMix64) -> IntChromosome {
    let s_count = inst.num_stages();
    let genes = (0..inst.num_genes())
        .map(|i| rng.below(inst.machines(i % s_count)) as u32)
        .collect();
    IntChromosome { genes }
}

/// Bit positions of every gene slot for one instance shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitLayout {
    machines: Vec<usize>,
    bits_per_stage: Vec<usize>,
    stage_offset: Vec<usize>,
    bits_per_job: usize,
    num_jobs: usize,
}

impl BitLayout {
    pub fn new(machines_per_stage: &[usize], num_jobs: usize) -> Self {
        let bits_per_stage: Vec<usize> = machines_per_stage.iter().map(|&m| slot_width(m)).collect();
        let mut stage_offset = Vec::with_capacity(bits_per_stage.len());
        let mut acc = 0;
        for &b in &bits_per_stage {
            stage_offset.push(acc);
            acc += b;
        }
        Self {
            machines: machines_per_stage.to_vec(),
            bits_per_stage,
            stage_offset,
            bits_per_job: acc,
            num_jobs,
        }
    }

    pub fn for_instance(inst: &Instance) -> Arc<Self> {
        Arc::new(Self::new(inst.machines_per_stage(), inst.num_jobs()))
    }

    pub fn bits_per_stage(&self) -> &[usize] {
        &self.bits_per_stage
    }

    pub fn num_genes(&self) -> usize {
        self.num_jobs * self.machines.len()
    }

    /// Total chromosome length in bits.
    pub fn len_bits(&self) -> usize {
        self.num_jobs * self.bits_per_job
    }

    fn num_words(&self) -> usize {
        self.len_bits().div_ceil(64)
    }

    /// Mask of the valid bits in the last storage word.
    fn tail_mask(&self) -> u64 {
        match self.len_bits() % 64 {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    #[inline]
    fn slot(&self, gene: usize) -> (usize, usize) {
        let s_count = self.machines.len();
        let (j, s) = (gene / s_count, gene % s_count);
        (j * self.bits_per_job + self.stage_offset[s], self.bits_per_stage[s])
    }
}

/// `max(1, ceil(log2 m))`.
fn slot_width(m: usize) -> usize {
    if m <= 2 {
        1
    } else {
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }
}

/// Bit-string view. Bit `k` lives in word `k / 64` at position `k % 64`;
/// unused high bits of the last word are always zero.
#[derive(Debug, Clone)]
pub struct BitChromosome {
    layout: Arc<BitLayout>,
    words: Vec<u64>,
}

impl PartialEq for BitChromosome {
    fn eq(&self, other: &Self) -> bool {
        self.words == other.words && self.same_layout(other)
    }
}

impl Eq for BitChromosome {}

impl BitChromosome {
    pub fn zeros(layout: Arc<BitLayout>) -> Self {
        let words = vec![0; layout.num_words()];
        Self { layout, words }
    }

    /// Builds a chromosome from a bit string such as `"0110"`.
    pub fn from_bit_str(layout: Arc<BitLayout>, bits: &str) -> Result<Self> {
        if bits.len() != layout.len_bits() {
            return Err(Error::Contract(format!(
                "bit string has {} bits, layout needs {}",
                bits.len(),
                layout.len_bits()
            )));
        }
        let mut c = Self::zeros(layout);
        for (k, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => c.set_bit(k, true),
                other => return Err(Error::Contract(format!("invalid bit character {other:?}"))),
            }
        }
        Ok(c)
    }

    pub fn layout(&self) -> &Arc<BitLayout> {
        &self.layout
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout) || self.layout == other.layout
    }

    pub fn len_bits(&self) -> usize {
        self.layout.len_bits()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn bit(&self, k: usize) -> bool {
        (self.words[k / 64] >> (k % 64)) & 1 == 1
    }

    #[inline]
    pub fn set_bit(&mut self, k: usize, v: bool) {
        let w = &mut self.words[k / 64];
        if v {
            *w |= 1 << (k % 64);
        } else {
            *w &= !(1 << (k % 64));
        }
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len_bits())
            .map(|k| if self.bit(k) { '1' } else { '0' })
            .collect()
    }

    fn slot_value(&self, gene: usize) -> u32 {
        let (start, width) = self.layout.slot(gene);
        (start..start + width).fold(0, |acc, k| (acc << 1) | self.bit(k) as u32)
    }

    /// Every bit flipped, same layout.
    pub fn complement(&self) -> Self {
        let tail = self.layout.tail_mask();
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail;
        }
        Self {
            layout: Arc::clone(&self.layout),
            words,
        }
    }

    /// `(self AND mask) OR (other AND NOT mask)`, word by word.
    pub(crate) fn blend(&self, other: &Self, mask: &[u64]) -> Self {
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .zip(mask)
            .map(|((a, b), m)| (a & m) | (b & !m))
            .collect();
        Self {
            layout: Arc::clone(&self.layout),
            words,
        }
    }

    /// Uniform random mask sized for this layout, tail bits cleared.
    pub(crate) fn random_mask(layout: &BitLayout, rng: &mut SplitMix64) -> Vec<u64> {
        let mut mask: Vec<u64> = (0..layout.num_words()).map(|_| rng.next_u64()).collect();
        if let Some(last) = mask.last_mut() {
            *last &= layout.tail_mask();
        }
        mask
    }
}

/// Writes each gene's machine index into its slot, MSB first.
pub fn int_to_bits(c: &IntChromosome, layout: &Arc<BitLayout>) -> BitChromosome {
    debug_assert_eq!(c.len(), layout.num_genes());
    let mut b = BitChromosome::zeros(Arc::clone(layout));
    for (i, &g) in c.genes().iter().enumerate() {
        let (start, width) = layout.slot(i);
        for k in 0..width {
            let bit = (g >> (width - 1 - k)) & 1 == 1;
            if bit {
                b.set_bit(start + k, true);
            }
        }
    }
    b
}

/// Reads each slot back as `value mod M_s`.
pub fn bits_to_int(b: &BitChromosome) -> IntChromosome {
    let layout = b.layout();
    let s_count = layout.machines.len();
    let genes = (0..layout.num_genes())
        .map(|i| b.slot_value(i) % layout.machines[i % s_count] as u32)
        .collect();
    IntChromosome { genes }
}

/// In-place variant of [`bits_to_int`] reusing `out`'s allocation.
pub(crate) fn bits_to_genes(b: &BitChromosome, out: &mut Vec<u32>) {
    let layout = b.layout();
    let s_count = layout.machines.len();
    out.clear();
    out.extend((0..layout.num_genes()).map(|i| b.slot_value(i) % layout.machines[i % s_count] as u32));
}

pub fn complement(b: &BitChromosome) -> BitChromosome {
    b.complement()
}
