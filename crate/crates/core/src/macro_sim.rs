//! Cycle-level simulation of a DS-CIM column and macro.
//!
//! Signed operands are moved to the unsigned domain by flipping the sign bit
//! (`x' = x + 128`), the unsigned dot product is estimated by OR-accumulated
//! stochastic multiplication, and the signed partial sum is recovered as
//!
//! ```text
//! psum = sum(x'w') - 128 * sum(x) - 128 * sum(w')
//! ```
//!
//! The sample streams are held as per-threshold bitsets over cycles
//! (`below[v]` has bit `t` set iff sample `t` is `< v`), so one row's product
//! bitstream over the whole run is a handful of word-wide AND operations.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accumulator::{accumulate, AccumulatorKind};
use crate::error::{Error, Result};
use crate::rng::{LfsrSpec, PrngState, CATALOG};
use crate::sng::{axis_interval, region_of_row, shift_value, ComparatorMode, Shift};

/// Cycles used by the exhaustive sampler: every `(RA, RW)` pair once.
pub const EXHAUSTIVE_CYCLES: usize = 1 << 16;

pub const DEFAULT_PRNG_A: LfsrSpec = CATALOG[0].spec(0x01);
pub const DEFAULT_PRNG_W: LfsrSpec = CATALOG[0].spec(0x11);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    #[default]
    Prng,
    /// Enumerate the whole sampling map, RA in the outer loop and RW inner.
    Exhaustive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Compensation {
    #[default]
    None,
    /// Add the expected contribution of the truncated low bits.
    Midpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacroConfig {
    pub rows: usize,
    pub columns: usize,
    pub group_size: usize,
    pub bitstream_len: usize,
    pub prng_a: LfsrSpec,
    pub prng_w: LfsrSpec,
    pub sampler: SamplerKind,
    pub accumulator: AccumulatorKind,
    pub compensation: Compensation,
    pub cmr: usize,
}

impl Default for MacroConfig {
    fn default() -> Self {
        Self::dscim1()
    }
}

impl MacroConfig {
    /// Accuracy-oriented design: eight OR16 groups per column.
    pub const fn dscim1() -> Self {
        Self {
            rows: 128,
            columns: 32,
            group_size: 16,
            bitstream_len: 256,
            prng_a: DEFAULT_PRNG_A,
            prng_w: DEFAULT_PRNG_W,
            sampler: SamplerKind::Prng,
            accumulator: AccumulatorKind::Direct,
            compensation: Compensation::None,
            cmr: 64,
        }
    }

    /// Efficiency-oriented design: two OR64 groups, latch-cached accumulator.
    pub const fn dscim2() -> Self {
        Self {
            group_size: 64,
            accumulator: AccumulatorKind::Latch4,
            ..Self::dscim1()
        }
    }

    /// One row per group, no shift, exhaustive sampling: reproduces the
    /// integer dot product exactly.
    pub const fn exact() -> Self {
        Self {
            group_size: 1,
            sampler: SamplerKind::Exhaustive,
            bitstream_len: EXHAUSTIVE_CYCLES,
            ..Self::dscim1()
        }
    }

    pub fn with_bitstream_len(self, n: usize) -> Self {
        Self {
            bitstream_len: n,
            ..self
        }
    }

    pub fn with_prngs(self, prng_a: LfsrSpec, prng_w: LfsrSpec) -> Self {
        Self {
            prng_a,
            prng_w,
            ..self
        }
    }

    pub fn with_compensation(self, compensation: Compensation) -> Self {
        Self {
            compensation,
            ..self
        }
    }

    pub fn shift(&self) -> Result<Shift> {
        Shift::for_group_size(self.group_size)
    }

    /// Bitstream cycles actually simulated.
    pub fn cycles(&self) -> usize {
        match self.sampler {
            SamplerKind::Prng => self.bitstream_len,
            SamplerKind::Exhaustive => EXHAUSTIVE_CYCLES,
        }
    }

    /// Maximum unsigned partial sum of a column, `H * 255^2`.
    pub fn full_scale(&self) -> f64 {
        self.rows as f64 * 255.0 * 255.0
    }

    pub fn validate(&self) -> Result<Shift> {
        let shift = self.shift()?;
        if self.rows == 0 || !self.rows.is_multiple_of(self.group_size) {
            return Err(Error::Config(format!(
                "rows ({}) must be a positive multiple of the group size ({})",
                self.rows, self.group_size
            )));
        }
        if self.columns == 0 {
            return Err(Error::Config("columns must be positive".into()));
        }
        if self.bitstream_len == 0 {
            return Err(Error::Config("bitstream length must be at least 1".into()));
        }
        if self.sampler == SamplerKind::Exhaustive && self.bitstream_len != EXHAUSTIVE_CYCLES {
            return Err(Error::Config(format!(
                "exhaustive sampler requires bitstream_len {EXHAUSTIVE_CYCLES}"
            )));
        }
        if !(1..=64).contains(&self.cmr) {
            return Err(Error::Config(format!("cmr {} outside 1..=64", self.cmr)));
        }
        self.prng_a.validate()?;
        self.prng_w.validate()?;
        Ok(shift)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedColumn {
    pub x: Vec<i8>,
    pub w: Vec<i8>,
}

impl SignedColumn {
    pub fn new(x: Vec<i8>, w: Vec<i8>) -> Result<Self> {
        if x.len() != w.len() {
            return Err(Error::Shape(format!(
                "{} activations vs {} weights",
                x.len(),
                w.len()
            )));
        }
        Ok(Self { x, w })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnResult {
    /// Total 1s over all groups and cycles.
    pub count: u64,
    /// Number of groups outputting 1, per cycle.
    pub per_cycle: Vec<u32>,
    pub term_b_est: u64,
    pub term_c: i64,
    pub term_d: i64,
    pub psum_est: i64,
    pub accumulator_activations: u64,
}

/// Inverts the sign bit, i.e. adds 128.
pub fn to_unsigned(x: i8) -> u8 {
    (x as u8) ^ 0x80
}

/// `128 * sum(x)`, computed at runtime from the signed activations.
pub fn term_c(x: &[i8]) -> i64 {
    128 * x.iter().map(|&v| v as i64).sum::<i64>()
}

/// `128 * sum(w + 128)`, a per-column constant.
pub fn term_d(w: &[i8]) -> i64 {
    128 * w.iter().map(|&v| to_unsigned(v) as i64).sum::<i64>()
}

/// Sums of the shifted operands of a column, needed by midpoint compensation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OperandSums {
    pub rows: u64,
    pub sum_a: u64,
    pub sum_w: u64,
}

impl OperandSums {
    pub fn of(col: &SignedColumn, k: Shift) -> Self {
        let shifted = |v: &[i8]| -> u64 {
            v.iter()
                .map(|&e| shift_value(to_unsigned(e), k).shifted as u64)
                .sum()
        };
        Self {
            rows: col.len() as u64,
            sum_a: shifted(&col.x),
            sum_w: shifted(&col.w),
        }
    }
}

/// Scales an OR count back to an estimate of `sum(x'w')`.
///
/// Each sample hits a row with probability `a_s * w_s / 2^16`, so the count
/// estimates `N / 2^16 * sum(a_s w_s)` and the unshifted product carries a
/// further `4^k`. Midpoint compensation adds the mean of the discarded low
/// bits, which are taken as uniform on `0..2^k` with mean `m = (2^k - 1)/2`:
///
/// ```text
/// E[x'w' | a_s, w_s] = 4^k a_s w_s + 2^k m (a_s + w_s) + m^2
/// ```
///
/// Rounds half up.
pub fn rescale(
    count: u64,
    cycles: usize,
    k: Shift,
    compensation: Compensation,
    sums: &OperandSums,
) -> u64 {
    assert!(cycles >= 1, "rescale needs at least one cycle");
    let n = cycles as u128;
    let scale = (1u128 << 16) << (2 * k.get());
    // everything over a common denominator of 4N
    let mut num = 4 * count as u128 * scale;
    if compensation == Compensation::Midpoint {
        let p = 1u128 << k.get();
        num += 2 * n * p * (p - 1) * (sums.sum_a + sums.sum_w) as u128;
        num += n * sums.rows as u128 * (p - 1) * (p - 1);
    }
    let den = 4 * n;
    ((num + den / 2) / den) as u64
}

/// Pre-drawn sample streams of one run, as threshold bitsets over cycles.
#[derive(Clone, Debug)]
pub struct SampleStream {
    cycles: usize,
    words: usize,
    below_a: Vec<u64>,
    below_w: Vec<u64>,
}

impl SampleStream {
    pub fn for_config(cfg: &MacroConfig) -> Result<Self> {
        match cfg.sampler {
            SamplerKind::Exhaustive => Ok(Self::exhaustive()),
            SamplerKind::Prng => {
                let ra: Vec<u8> = PrngState::new(cfg.prng_a)?
                    .take(cfg.bitstream_len)
                    .collect();
                let rw: Vec<u8> = PrngState::new(cfg.prng_w)?
                    .take(cfg.bitstream_len)
                    .collect();
                Ok(Self::from_samples(&ra, &rw))
            }
        }
    }

    pub fn exhaustive() -> Self {
        let ra: Vec<u8> = (0..EXHAUSTIVE_CYCLES).map(|t| (t >> 8) as u8).collect();
        let rw: Vec<u8> = (0..EXHAUSTIVE_CYCLES).map(|t| t as u8).collect();
        Self::from_samples(&ra, &rw)
    }

    /// Streams from explicit per-cycle samples; both axes must be equally long.
    pub fn from_samples(ra: &[u8], rw: &[u8]) -> Self {
        assert_eq!(ra.len(), rw.len(), "sample streams differ in length");
        let cycles = ra.len();
        let words = cycles.div_ceil(64);
        Self {
            cycles,
            words,
            below_a: threshold_table(ra, words),
            below_w: threshold_table(rw, words),
        }
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }

    /// ORs into `out` the cycles whose sample pair lies in `ra x rw`.
    /// Returns `false` if any of those cycles was already set.
    fn or_rectangle(&self, ra: &Range<u16>, rw: &Range<u16>, out: &mut [u64]) -> bool {
        let w = self.words;
        let (a_hi, a_lo) = (
            &self.below_a[ra.end as usize * w..][..w],
            &self.below_a[ra.start as usize * w..][..w],
        );
        let (w_hi, w_lo) = (
            &self.below_w[rw.end as usize * w..][..w],
            &self.below_w[rw.start as usize * w..][..w],
        );
        let mut disjoint = true;
        for i in 0..w {
            let bits = (a_hi[i] & !a_lo[i]) & (w_hi[i] & !w_lo[i]);
            disjoint &= out[i] & bits == 0;
            out[i] |= bits;
        }
        disjoint
    }
}

fn threshold_table(samples: &[u8], words: usize) -> Vec<u64> {
    let mut table = vec![0u64; 257 * words];
    // row v+1 first holds the cycles equal to v, then the prefix OR makes it "< v+1"
    for (t, &s) in samples.iter().enumerate() {
        table[(s as usize + 1) * words + t / 64] |= 1 << (t % 64);
    }
    for v in 1..=256 {
        let (prev, cur) = table.split_at_mut(v * words);
        let prev = &prev[(v - 1) * words..];
        for (c, p) in cur[..words].iter_mut().zip(prev) {
            *c |= *p;
        }
    }
    table
}

/// A configured macro with its sample streams drawn.
#[derive(Clone, Debug)]
pub struct Simulator {
    cfg: MacroConfig,
    shift: Shift,
    stream: SampleStream,
}

impl Simulator {
    pub fn new(cfg: MacroConfig) -> Result<Self> {
        let shift = cfg.validate()?;
        let stream = SampleStream::for_config(&cfg)?;
        Ok(Self { cfg, shift, stream })
    }

    pub fn config(&self) -> &MacroConfig {
        &self.cfg
    }

    pub fn shift(&self) -> Shift {
        self.shift
    }

    fn check_column(&self, col: &SignedColumn) -> Result<()> {
        if col.x.len() != self.cfg.rows || col.w.len() != self.cfg.rows {
            return Err(Error::Shape(format!(
                "column has {} activations and {} weights, macro has {} rows",
                col.x.len(),
                col.w.len(),
                self.cfg.rows
            )));
        }
        Ok(())
    }

    /// OR output bitstream of every group, `groups * words` words.
    fn group_streams(&self, col: &SignedColumn) -> Result<Vec<u64>> {
        let g = self.cfg.group_size;
        let words = self.stream.words;
        let mut out = vec![0u64; (self.cfg.rows / g) * words];
        for (row, (&x, &w)) in col.x.iter().zip(&col.w).enumerate() {
            let a = shift_value(to_unsigned(x), self.shift);
            let b = shift_value(to_unsigned(w), self.shift);
            if a.shifted == 0 || b.shifted == 0 {
                continue;
            }
            let assign = region_of_row(row % g, self.shift)?;
            let ra = axis_interval(a, assign.r_a, ComparatorMode::XorMask);
            let rw = axis_interval(b, assign.r_w, ComparatorMode::XorMask);
            let group = &mut out[(row / g) * words..][..words];
            if !self.stream.or_rectangle(&ra, &rw, group) {
                return Err(Error::Invariant(format!(
                    "row {row} fired in a cycle already claimed within its OR group"
                )));
            }
        }
        Ok(out)
    }

    pub fn simulate_column(&self, col: &SignedColumn) -> Result<ColumnResult> {
        self.check_column(col)?;
        self.finish_column(col, term_d(&col.w))
    }

    fn finish_column(&self, col: &SignedColumn, term_d: i64) -> Result<ColumnResult> {
        let streams = self.group_streams(col)?;
        let cycles = self.stream.cycles;
        let mut per_cycle = vec![0u32; cycles];
        let mut count = 0u64;
        for (i, &word) in streams.iter().enumerate() {
            let base = (i % self.stream.words) * 64;
            let mut bits = word;
            count += bits.count_ones() as u64;
            while bits != 0 {
                per_cycle[base + bits.trailing_zeros() as usize] += 1;
                bits &= bits - 1;
            }
        }
        let acc = accumulate(self.cfg.accumulator, &per_cycle);
        if acc.sum != count {
            return Err(Error::Invariant(format!(
                "accumulated {} but counted {count}",
                acc.sum
            )));
        }
        let sums = OperandSums::of(col, self.shift);
        let term_b_est = rescale(count, cycles, self.shift, self.cfg.compensation, &sums);
        let term_c = term_c(&col.x);
        Ok(ColumnResult {
            count,
            per_cycle,
            term_b_est,
            term_c,
            term_d,
            psum_est: term_b_est as i64 - term_c - term_d,
            accumulator_activations: acc.activations,
        })
    }

    /// `activations` is `vectors x rows`, `weights` is `rows x columns`.
    /// Returns results indexed `[vector][column]`.
    ///
    /// All vectors share the one activation stream and all columns the one
    /// weight stream, as in hardware. At most `cmr` vectors are accepted per
    /// call, at most `columns` weight columns.
    pub fn simulate_macro(
        &self,
        activations: &[Vec<i8>],
        weights: &[Vec<i8>],
    ) -> Result<Vec<Vec<ColumnResult>>> {
        let h = self.cfg.rows;
        if activations.len() > self.cfg.cmr {
            return Err(Error::Shape(format!(
                "{} activation vectors exceed cmr {}",
                activations.len(),
                self.cfg.cmr
            )));
        }
        if let Some((i, v)) = activations.iter().enumerate().find(|(_, v)| v.len() != h) {
            return Err(Error::Shape(format!(
                "activation vector {i} has {} entries, expected {h}",
                v.len()
            )));
        }
        if weights.len() != h {
            return Err(Error::Shape(format!(
                "weight matrix has {} rows, expected {h}",
                weights.len()
            )));
        }
        let n_cols = weights.first().map_or(0, Vec::len);
        if weights.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Shape("weight rows differ in length".into()));
        }
        if n_cols > self.cfg.columns {
            return Err(Error::Shape(format!(
                "{n_cols} weight columns exceed macro width {}",
                self.cfg.columns
            )));
        }

        let columns: Vec<Vec<i8>> = (0..n_cols)
            .map(|c| weights.iter().map(|r| r[c]).collect())
            .collect();
        // per-column LUT
        let d_table: Vec<i64> = columns.iter().map(|w| term_d(w)).collect();

        activations
            .par_iter()
            .map(|x| {
                columns
                    .iter()
                    .zip(&d_table)
                    .map(|(w, &d)| {
                        let col = SignedColumn {
                            x: x.clone(),
                            w: w.clone(),
                        };
                        self.finish_column(&col, d)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect()
    }
}

pub fn simulate_column(cfg: &MacroConfig, col: &SignedColumn) -> Result<ColumnResult> {
    Simulator::new(*cfg)?.simulate_column(col)
}

pub fn simulate_macro(
    cfg: &MacroConfig,
    activations: &[Vec<i8>],
    weights: &[Vec<i8>],
) -> Result<Vec<Vec<ColumnResult>>> {
    Simulator::new(*cfg)?.simulate_macro(activations, weights)
}
