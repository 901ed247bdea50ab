//! Merge-associative accumulators for phase-space monomials.
//!
//! Accumulators store raw compensated sums of first- and second-order
//! monomials over a block of four complex variables, so batch results can
//! be merged after the fact. For a fixed seed and a fixed merge order the
//! totals are bit-identical regardless of how work was scheduled.

use crate::C64;

/// Number of complex variables per block.
pub const N_VARS: usize = 4;
/// Number of unordered second-order monomials `v_i v_j`, `i <= j`.
pub const N_PAIRS: usize = 10;

/// Index of the pair `(i, j)` with `i <= j` in the packed upper triangle.
pub fn pair_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * N_VARS - i * (i + 1) / 2 + j
}

/// Kahan-compensated complex sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct CompensatedSum {
    sum: C64,
    c: C64,
}

impl CompensatedSum {
    fn add(&mut self, v: C64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(-other.c);
    }
}

/// Sums of monomials of one variable block at one checkpoint.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    first: [CompensatedSum; N_VARS],
    second: [CompensatedSum; N_PAIRS],
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, v: &[C64; N_VARS]) {
        self.count += 1;
        for i in 0..N_VARS {
            self.first[i].add(v[i]);
        }
        for i in 0..N_VARS {
            for j in i..N_VARS {
                self.second[pair_index(i, j)].add(v[i] * v[j]);
            }
        }
    }

    pub fn merge(&mut self, other: &MomentAccumulator) {
        self.count += other.count;
        for i in 0..N_VARS {
            self.first[i].merge(&other.first[i]);
        }
        for i in 0..N_PAIRS {
            self.second[i].merge(&other.second[i]);
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Sample mean `<v_i>`.
    pub fn mean(&self, i: usize) -> C64 {
        self.first[i].sum / self.count as f64
    }

    /// Raw second moment `<v_i v_j>`.
    pub fn raw_second(&self, i: usize, j: usize) -> C64 {
        self.second[pair_index(i, j)].sum / self.count as f64
    }

    /// Central second moment `<v_i v_j> - <v_i><v_j>`.
    pub fn central_second(&self, i: usize, j: usize) -> C64 {
        self.raw_second(i, j) - self.mean(i) * self.mean(j)
    }

    /// Raw sums, for serialization. Layout: count, then first moments,
    /// then packed second moments.
    pub fn raw_sums(&self) -> (u64, [C64; N_VARS], [C64; N_PAIRS]) {
        (
            self.count,
            core::array::from_fn(|i| self.first[i].sum),
            core::array::from_fn(|i| self.second[i].sum),
        )
    }

    /// Rebuild from serialized raw sums (compensation terms are dropped;
    /// subsequent merges remain deterministic).
    pub fn from_raw_sums(count: u64, first: [C64; N_VARS], second: [C64; N_PAIRS]) -> Self {
        let mut acc = MomentAccumulator { count, ..Default::default() };
        for i in 0..N_VARS {
            acc.first[i].sum = first[i];
        }
        for i in 0..N_PAIRS {
            acc.second[i].sum = second[i];
        }
        acc
    }
}

/// Accumulators recorded at one checkpoint time: the witness block
/// `(beta^r, beta^{r+}, A_out, A_out^+)` and the intracavity block
/// `(alpha, alpha^+, beta, beta^+)` used for oracle comparison.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckpointAccumulator {
    pub output: MomentAccumulator,
    pub intracavity: MomentAccumulator,
}

impl CheckpointAccumulator {
    pub fn merge(&mut self, other: &CheckpointAccumulator) {
        self.output.merge(&other.output);
        self.intracavity.merge(&other.intracavity);
    }
}

/// Indices into the output block.
pub mod out_var {
    pub const B_R: usize = 0;
    pub const B_R_PLUS: usize = 1;
    pub const A_OUT: usize = 2;
    pub const A_OUT_PLUS: usize = 3;
}

/// Indices into the intracavity block.
pub mod cav_var {
    pub const ALPHA: usize = 0;
    pub const ALPHA_PLUS: usize = 1;
    pub const BETA: usize = 2;
    pub const BETA_PLUS: usize = 3;
}
