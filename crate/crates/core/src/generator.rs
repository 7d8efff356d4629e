//! Deterministic generation of quasi-block (staircase) 0/1 ILP instances
//! and the canonical elimination partition for them.
//!
//! Variables are laid out in `k` consecutive blocks of `n/k`. Block 1's
//! constraints cover only its own variables; every later block's constraints
//! additionally cover the last `b` variables (the separator) of the previous
//! block. Coefficients come from a splitmix64 stream so that identical
//! parameters produce byte-identical instances on every platform.
//!
//! Bit-exact draw format: all `c_j` in ascending variable order first, then
//! for each constraint (block by block) one draw per support position in
//! ascending variable order. A draw maps the raw 64-bit output into
//! `lo..=hi` by plain modulo reduction, `lo + (out mod (hi - lo + 1))`.
//! Right-hand sides consume no draws: `b_i = floor(num/den * sum_j a_ij)`.

use thiserror::Error;

use crate::graph::OrderedPartition;
use crate::model::{Constraint, IlpInstance, ModelError, StaircaseMeta};

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// splitmix64 state; a full-period 64-bit generator with a one-word state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw in `lo..=hi` by modulo reduction (part of the
    /// bit-exact instance format).
    pub fn next_in_range(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        lo + (self.next_u64() % span) as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorParams {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub b: usize,
    pub seed: u64,
    /// Inclusive range for both `a_ij` and `c_j`.
    pub coeff_range: (i64, i64),
    /// Right-hand-side factor as a rational in (0, 1).
    pub rhs_num: i64,
    pub rhs_den: i64,
}

impl GeneratorParams {
    pub fn new(n: usize, m: usize, k: usize, b: usize, seed: u64) -> Self {
        GeneratorParams {
            n,
            m,
            k,
            b,
            seed,
            coeff_range: (1, 10),
            rhs_num: 3,
            rhs_den: 5,
        }
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        let fail = |msg: String| Err(GeneratorError::InvalidParams(msg));
        if self.k == 0 {
            return fail("k must be >= 1".into());
        }
        if self.n == 0 || !self.n.is_multiple_of(self.k) {
            return fail(format!("k={} does not divide n={}", self.k, self.n));
        }
        if !self.m.is_multiple_of(self.k) {
            return fail(format!("k={} does not divide m={}", self.k, self.m));
        }
        if self.b >= self.n / self.k {
            return fail(format!(
                "separator b={} must be smaller than block size {}",
                self.b,
                self.n / self.k
            ));
        }
        let (lo, hi) = self.coeff_range;
        if lo > hi {
            return fail(format!("empty coefficient range {lo}..={hi}"));
        }
        if lo.checked_abs().is_none() || hi.checked_abs().is_none() || hi.abs() > i64::MAX / 8 {
            return fail("coefficient range too large".into());
        }
        if self.rhs_den <= 0 || self.rhs_num <= 0 || self.rhs_num >= self.rhs_den {
            return fail(format!(
                "rhs factor {}/{} must lie in (0, 1)",
                self.rhs_num, self.rhs_den
            ));
        }
        Ok(())
    }
}

/// Generates the staircase instance described by `params`. Pure function:
/// the serialized result is byte-identical across runs and platforms.
pub fn generate(params: &GeneratorParams) -> Result<IlpInstance, GeneratorError> {
    params.validate()?;
    let meta = StaircaseMeta::new(params.n, params.k, params.b)?;
    let (lo, hi) = params.coeff_range;
    let mut rng = SplitMix64::new(params.seed);

    let objective: Vec<i64> = (0..params.n).map(|_| rng.next_in_range(lo, hi)).collect();

    let per_block = params.m / params.k;
    let mut constraints = Vec::with_capacity(params.m);
    for block_idx in 0..params.k {
        let mut support_vars: Vec<usize> = Vec::new();
        if block_idx > 0 {
            support_vars.extend(meta.separator_range(block_idx - 1));
        }
        support_vars.extend(meta.block_range(block_idx));
        for _ in 0..per_block {
            let support: Vec<(usize, i64)> = support_vars
                .iter()
                .map(|&j| (j, rng.next_in_range(lo, hi)))
                .collect();
            let total: i64 = support.iter().map(|&(_, a)| a).sum();
            let rhs = (params.rhs_num * total).div_euclid(params.rhs_den);
            constraints.push(Constraint::new(support, rhs));
        }
    }

    Ok(IlpInstance::new(
        params.n,
        objective,
        constraints,
        Some(meta),
    )?)
}

/// Canonical elimination partition for a staircase instance: the first
/// elimination block is block 1 minus its separator; each later elimination
/// block is the previous separator plus the block minus its own separator;
/// the last one absorbs the final block whole. Every interior neighborhood
/// then has size exactly `b`.
pub fn staircase_partition(meta: &StaircaseMeta) -> OrderedPartition {
    let k = meta.k();
    if k == 1 {
        return OrderedPartition::new(vec![meta.block_range(0).collect()]);
    }
    let mut blocks = Vec::with_capacity(k);
    blocks.push(
        meta.block_range(0)
            .take(meta.block_size() - meta.b())
            .collect(),
    );
    for i in 1..k {
        let mut block: Vec<usize> = meta.separator_range(i - 1).collect();
        if i < k - 1 {
            block.extend(meta.block_range(i).take(meta.block_size() - meta.b()));
        } else {
            block.extend(meta.block_range(i));
        }
        blocks.push(block);
    }
    OrderedPartition::new(blocks)
}
