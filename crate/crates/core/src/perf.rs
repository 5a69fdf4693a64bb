//! Analytic latency and accumulator-activation model for OR-MAC replication.
//!
//! Energy is only reported as adder firings and cycles.

use serde::{Deserialize, Serialize};

use crate::accumulator::{activations_for, AccumulatorKind};
use crate::error::{Error, Result};
use crate::macro_sim::MacroConfig;

/// Area relative to a single OR-MAC per column. Only the measured points are
/// known; other ratios have no density figure.
pub const AREA_FACTORS: [(usize, f64); 2] = [(1, 1.0), (64, 2.0)];

pub fn area_factor(cmr: usize) -> Option<f64> {
    AREA_FACTORS
        .iter()
        .find(|(c, _)| *c == cmr)
        .map(|&(_, f)| f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    /// Activation vectors to process, e.g. output pixels of a layer.
    pub outputs: usize,
    pub vector_len: usize,
    pub weight_columns: usize,
}

impl WorkloadSpec {
    pub fn validate(&self) -> Result<()> {
        if self.outputs == 0 || self.vector_len == 0 || self.weight_columns == 0 {
            return Err(Error::Config("workload dimensions must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfReport {
    pub cycles: u64,
    /// Cycles of the same workload with one OR-MAC per column.
    pub baseline_cycles: u64,
    /// `baseline_cycles / cycles`, the raw throughput gain.
    pub speedup: f64,
    pub utilization: f64,
    pub weight_tiles: u64,
    pub accumulator_activations: u64,
    pub activation_ratio: f64,
    /// `cmr / area_factor(cmr)`; absent when the area factor is unknown.
    pub relative_compute_density: Option<f64>,
}

/// Fraction of cycles on which the accumulator adder fires.
pub fn activation_ratio(cycles: usize, kind: AccumulatorKind) -> Result<f64> {
    if cycles == 0 {
        return Err(Error::Config("bitstream length must be at least 1".into()));
    }
    Ok(activations_for(kind, cycles) as f64 / cycles as f64)
}

pub fn latency_model(work: &WorkloadSpec, cfg: &MacroConfig) -> Result<PerfReport> {
    work.validate()?;
    cfg.validate()?;
    let n = cfg.cycles() as u64;
    let tiles =
        (work.vector_len.div_ceil(cfg.rows) * work.weight_columns.div_ceil(cfg.columns)) as u64;
    let batches = work.outputs.div_ceil(cfg.cmr) as u64;
    let cycles = batches * n * tiles;
    let baseline_cycles = work.outputs as u64 * n * tiles;
    let per_output = activations_for(cfg.accumulator, cfg.cycles());
    // one accumulator per (output, weight column, row tile)
    let accumulator_activations = per_output
        * work.outputs as u64
        * work.weight_columns as u64
        * work.vector_len.div_ceil(cfg.rows) as u64;
    Ok(PerfReport {
        cycles,
        baseline_cycles,
        speedup: baseline_cycles as f64 / cycles as f64,
        utilization: work.outputs as f64 / (batches * cfg.cmr as u64) as f64,
        weight_tiles: tiles,
        accumulator_activations,
        activation_ratio: activation_ratio(cfg.cycles(), cfg.accumulator)?,
        relative_compute_density: area_factor(cfg.cmr).map(|a| cfg.cmr as f64 / a),
    })
}
