//! Statistical harness: normalized RMSE, sweeps, PRNG seed search and error
//! model export.
//!
//! Errors are normalized by the full-scale unsigned partial sum `H * 255^2`.
//! Every trial draws its column from a generator keyed by
//! `(master_seed, trial index)`, so results do not depend on scheduling and
//! trial `i` sees the same column at every bitstream length.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::macro_sim::{
    to_unsigned, MacroConfig, SamplerKind, SignedColumn, Simulator, EXHAUSTIVE_CYCLES,
};
use crate::oracles::{
    exact_psum, naive_scim_count, naive_unsigned_estimate, or_saturation_rel_error,
};
use crate::rng::{CatalogEntry, LfsrSpec, LfsrStyle, CATALOG};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputDistribution {
    UniformSigned,
    /// Rounded normal samples clipped to `[-clip, clip]`.
    Gaussian {
        sigma: f64,
        clip: i8,
    },
    /// Uniform operands with each activation zeroed with probability `p_zero`.
    Sparse {
        p_zero: f64,
    },
    /// Columns replayed from a CSV file, one column per line: `H` activations
    /// followed by `H` weights.
    Trace {
        path: PathBuf,
    },
}

impl InputDistribution {
    pub fn label(&self) -> String {
        match self {
            Self::UniformSigned => "uniform_signed".into(),
            Self::Gaussian { sigma, clip } => format!("gaussian(sigma={sigma},clip={clip})"),
            Self::Sparse { p_zero } => format!("sparse(p_zero={p_zero})"),
            Self::Trace { path } => format!("trace({})", path.display()),
        }
    }

    /// Fixed equal-weight mix used to score PRNG configurations.
    pub fn calibration_mix() -> Vec<Self> {
        vec![
            Self::UniformSigned,
            Self::Gaussian {
                sigma: 32.0,
                clip: 127,
            },
            Self::Sparse { p_zero: 0.875 },
        ]
    }
}

/// A distribution ready to produce columns of a given height.
#[derive(Clone, Debug)]
pub struct ColumnSource {
    rows: usize,
    kind: SourceKind,
}

#[derive(Clone, Debug)]
enum SourceKind {
    Uniform,
    Gaussian(Normal<f64>, i8),
    Sparse(f64),
    Trace(Arc<Vec<SignedColumn>>),
}

pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

impl ColumnSource {
    pub fn new(dist: &InputDistribution, rows: usize) -> Result<Self> {
        let kind = match dist {
            InputDistribution::UniformSigned => SourceKind::Uniform,
            InputDistribution::Gaussian { sigma, clip } => {
                if *clip < 0 {
                    return Err(Error::Config(format!("negative clip {clip}")));
                }
                let normal = Normal::new(0.0, *sigma)
                    .map_err(|e| Error::Config(format!("gaussian sigma {sigma}: {e}")))?;
                SourceKind::Gaussian(normal, *clip)
            }
            InputDistribution::Sparse { p_zero } => {
                if !(0.0..=1.0).contains(p_zero) {
                    return Err(Error::Config(format!("p_zero {p_zero} outside [0, 1]")));
                }
                SourceKind::Sparse(*p_zero)
            }
            InputDistribution::Trace { path } => {
                SourceKind::Trace(Arc::new(read_trace(path, rows)?))
            }
        };
        Ok(Self { rows, kind })
    }

    pub fn draw(&self, master_seed: u64, trial: u64) -> SignedColumn {
        let mut rng = trial_rng(master_seed, trial);
        let h = self.rows;
        match &self.kind {
            SourceKind::Uniform => SignedColumn {
                x: (0..h).map(|_| rng.random::<i8>()).collect(),
                w: (0..h).map(|_| rng.random::<i8>()).collect(),
            },
            SourceKind::Gaussian(normal, clip) => {
                let c = *clip as f64;
                let draw = |rng: &mut ChaCha8Rng| normal.sample(rng).round().clamp(-c, c) as i8;
                SignedColumn {
                    x: (0..h).map(|_| draw(&mut rng)).collect(),
                    w: (0..h).map(|_| draw(&mut rng)).collect(),
                }
            }
            SourceKind::Sparse(p_zero) => {
                let x = (0..h)
                    .map(|_| {
                        let v = rng.random::<i8>();
                        if rng.random::<f64>() < *p_zero {
                            0
                        } else {
                            v
                        }
                    })
                    .collect();
                SignedColumn {
                    x,
                    w: (0..h).map(|_| rng.random::<i8>()).collect(),
                }
            }
            SourceKind::Trace(cols) => cols[trial as usize % cols.len()].clone(),
        }
    }

    pub fn columns(&self, master_seed: u64, trials: usize) -> Vec<SignedColumn> {
        (0..trials as u64)
            .map(|t| self.draw(master_seed, t))
            .collect()
    }
}

pub fn read_trace(path: &Path, rows: usize) -> Result<Vec<SignedColumn>> {
    let file = BufReader::new(File::open(path)?);
    let mut cols = Vec::new();
    for (i, line) in file.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Trace {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        let values = line
            .split(',')
            .enumerate()
            .map(|(c, f)| {
                f.trim()
                    .parse::<i8>()
                    .map_err(|e| err(format!("field {}: {:?}: {e}", c + 1, f.trim())))
            })
            .collect::<Result<Vec<i8>>>()?;
        if values.len() != 2 * rows {
            return Err(err(format!(
                "expected {} values, got {}",
                2 * rows,
                values.len()
            )));
        }
        let (x, w) = values.split_at(rows);
        cols.push(SignedColumn {
            x: x.to_vec(),
            w: w.to_vec(),
        });
    }
    if cols.is_empty() {
        return Err(Error::EmptyTrace(path.to_path_buf()));
    }
    Ok(cols)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub rmse_norm: f64,
    pub mean_bias_norm: f64,
    pub max_abs_norm: f64,
    pub trials: usize,
    #[serde(skip)]
    pub raw_errors: Vec<f64>,
}

impl ErrorStats {
    /// Aggregates integer errors `psum_est - psum_exact`. Moments are
    /// accumulated exactly, so the result is independent of trial order.
    pub fn from_errors(errors: &[i64], full_scale: f64) -> Result<Self> {
        if errors.is_empty() {
            return Err(Error::EmptyStats);
        }
        let n = errors.len() as f64;
        let sum: i128 = errors.iter().map(|&e| e as i128).sum();
        let sum_sq: i128 = errors.iter().map(|&e| e as i128 * e as i128).sum();
        let max_abs = errors.iter().map(|e| e.unsigned_abs()).max().unwrap_or(0);
        Ok(Self {
            rmse_norm: (sum_sq as f64 / n).sqrt() / full_scale,
            mean_bias_norm: sum as f64 / n / full_scale,
            max_abs_norm: max_abs as f64 / full_scale,
            trials: errors.len(),
            raw_errors: errors.iter().map(|&e| e as f64 / full_scale).collect(),
        })
    }

    /// Standard deviation of the normalized errors.
    pub fn std_norm(&self) -> f64 {
        let var = self.rmse_norm.powi(2) - self.mean_bias_norm.powi(2);
        var.max(0.0).sqrt()
    }
}

/// Per-trial integer errors of `sim` over pre-drawn columns.
pub fn column_errors(sim: &Simulator, columns: &[SignedColumn]) -> Result<Vec<i64>> {
    columns
        .par_iter()
        .map(|col| Ok(sim.simulate_column(col)?.psum_est - exact_psum(col)))
        .collect()
}

pub fn rmse_eval(
    cfg: &MacroConfig,
    dist: &InputDistribution,
    trials: usize,
    master_seed: u64,
) -> Result<ErrorStats> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let sim = Simulator::new(*cfg)?;
    let columns = ColumnSource::new(dist, cfg.rows)?.columns(master_seed, trials);
    ErrorStats::from_errors(&column_errors(&sim, &columns)?, cfg.full_scale())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// Sparsity, bitstream length, ... depending on the sweep.
    pub param: f64,
    pub stats: ErrorStats,
}

pub const SPARSITY_GRID: [f64; 6] = [0.0, 0.25, 0.5, 0.75, 0.875, 1.0];

pub fn sparsity_sweep(
    cfg: &MacroConfig,
    grid: &[f64],
    trials: usize,
    master_seed: u64,
) -> Result<Vec<SweepPoint>> {
    grid.iter()
        .map(|&p_zero| {
            let stats = rmse_eval(
                cfg,
                &InputDistribution::Sparse { p_zero },
                trials,
                master_seed,
            )?;
            Ok(SweepPoint {
                param: p_zero,
                stats,
            })
        })
        .collect()
}

/// Sparsity sweep of a conventional unsigned S-CIM column: independent
/// per-row generators, OR groups of `group_size`, no remapping. Sparsity
/// zeroes unsigned activations, so the products themselves are zero.
pub fn naive_sparsity_sweep(
    rows: usize,
    group_size: usize,
    cycles: usize,
    grid: &[f64],
    trials: usize,
    master_seed: u64,
) -> Result<Vec<SweepPoint>> {
    let full_scale = rows as f64 * 255.0 * 255.0;
    grid.iter()
        .map(|&p_zero| {
            let source = ColumnSource::new(&InputDistribution::Sparse { p_zero }, rows)?;
            let errors: Vec<i64> = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let col = source.draw(master_seed, t);
                    let operands: Vec<(u8, u8)> = col
                        .x
                        .iter()
                        .zip(&col.w)
                        .map(|(&x, &w)| (if x == 0 { 0 } else { to_unsigned(x) }, to_unsigned(w)))
                        .collect();
                    let exact: i64 = operands.iter().map(|&(a, w)| a as i64 * w as i64).sum();
                    let seed = master_seed ^ t.wrapping_mul(0x9e37_79b9_7f4a_7c15);
                    naive_unsigned_estimate(&operands, group_size, cycles, seed) - exact
                })
                .collect();
            Ok(SweepPoint {
                param: p_zero,
                stats: ErrorStats::from_errors(&errors, full_scale)?,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrngPair {
    pub prng_a: LfsrSpec,
    pub prng_w: LfsrSpec,
}

impl PrngPair {
    pub fn of(cfg: &MacroConfig) -> Self {
        Self {
            prng_a: cfg.prng_a,
            prng_w: cfg.prng_w,
        }
    }

    pub fn apply(&self, cfg: MacroConfig) -> MacroConfig {
        cfg.with_prngs(self.prng_a, self.prng_w)
    }
}

/// RMSE per bitstream length. A length of [`EXHAUSTIVE_CYCLES`] selects the
/// exhaustive sampler. `prngs` overrides the generator pair per length.
pub fn length_sweep(
    template: &MacroConfig,
    lengths: &[usize],
    dist: &InputDistribution,
    trials: usize,
    master_seed: u64,
    prngs: Option<&BTreeMap<usize, PrngPair>>,
) -> Result<Vec<SweepPoint>> {
    lengths
        .iter()
        .map(|&n| {
            let mut cfg = template.with_bitstream_len(n);
            if n == EXHAUSTIVE_CYCLES {
                cfg.sampler = SamplerKind::Exhaustive;
            }
            if let Some(pair) = prngs.and_then(|m| m.get(&n)) {
                cfg = pair.apply(cfg);
            }
            Ok(SweepPoint {
                param: n as f64,
                stats: rmse_eval(&cfg, dist, trials, master_seed)?,
            })
        })
        .collect()
}

/// Generator configurations to search. Each entry pair is combined with
/// every activation seed and every weight seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub pairs: Vec<(CatalogEntry, CatalogEntry)>,
    pub seeds_a: Vec<u8>,
    pub seeds_w: Vec<u8>,
}

impl SearchSpace {
    /// Every catalog polynomial shared by both generators, seeds on a
    /// stride-16 grid starting at 1. Contains the default configuration.
    pub fn default_grid() -> Self {
        let seeds: Vec<u8> = (0..16).map(|i| 1 + 16 * i).collect();
        Self {
            pairs: CATALOG.iter().map(|&e| (e, e)).collect(),
            seeds_a: seeds.clone(),
            seeds_w: seeds,
        }
    }

    /// Every nonzero seed for both generators.
    pub fn full() -> Self {
        Self {
            seeds_a: (1..=255).collect(),
            seeds_w: (1..=255).collect(),
            ..Self::default_grid()
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len() * self.seeds_a.len() * self.seeds_w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Configuration at enumeration index `i`: pair-major, then activation
    /// seed, then weight seed, all ascending in list order.
    pub fn get(&self, i: usize) -> PrngPair {
        let nw = self.seeds_w.len();
        let na = self.seeds_a.len();
        let (pair, rest) = (i / (na * nw), i % (na * nw));
        let (ea, ew) = self.pairs[pair];
        PrngPair {
            prng_a: ea.spec(self.seeds_a[rest / nw]),
            prng_w: ew.spec(self.seeds_w[rest % nw]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSearchSpec {
    pub space: SearchSpace,
    /// Designs scored together, e.g. OR16 and OR64.
    pub designs: Vec<MacroConfig>,
    pub dists: Vec<InputDistribution>,
    pub lengths: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    /// Evaluate only the first `budget` configurations in enumeration order.
    pub budget: Option<usize>,
}

impl SeedSearchSpec {
    pub fn new(designs: Vec<MacroConfig>) -> Self {
        Self {
            space: SearchSpace::default_grid(),
            designs,
            dists: InputDistribution::calibration_mix(),
            lengths: vec![64, 128, 256],
            trials: 64,
            master_seed: 0,
            budget: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthBest {
    pub config: PrngPair,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSearchResult {
    pub best_config: PrngPair,
    /// Mean over lengths of the per-length objective.
    pub objective: f64,
    pub evaluated: usize,
    pub per_length: BTreeMap<usize, LengthBest>,
}

/// Calibration columns per distribution, drawn once per search.
struct Calibration {
    columns: Vec<Vec<SignedColumn>>,
}

impl Calibration {
    fn new(spec: &SeedSearchSpec, rows: usize) -> Result<Self> {
        let columns = spec
            .dists
            .iter()
            .map(|d| Ok(ColumnSource::new(d, rows)?.columns(spec.master_seed, spec.trials)))
            .collect::<Result<_>>()?;
        Ok(Self { columns })
    }
}

/// Mean rmse over designs and distributions at one length.
fn length_objective(
    spec: &SeedSearchSpec,
    calib: &Calibration,
    pair: PrngPair,
    n: usize,
) -> Result<f64> {
    let mut total = 0.0;
    for design in &spec.designs {
        let cfg = pair.apply(design.with_bitstream_len(n));
        let sim = Simulator::new(cfg)?;
        for cols in &calib.columns {
            let errors = cols
                .iter()
                .map(|c| Ok(sim.simulate_column(c)?.psum_est - exact_psum(c)))
                .collect::<Result<Vec<i64>>>()?;
            total += ErrorStats::from_errors(&errors, cfg.full_scale())?.rmse_norm;
        }
    }
    Ok(total / (spec.designs.len() * calib.columns.len()) as f64)
}

/// The value [`seed_search`] minimizes, for one configuration, per length.
/// Equal to averaging [`rmse_eval`] over designs and distributions.
pub fn search_objective(spec: &SeedSearchSpec, pair: PrngPair) -> Result<Vec<f64>> {
    let rows = spec.designs.first().map_or(128, |d| d.rows);
    let calib = Calibration::new(spec, rows)?;
    spec.lengths
        .iter()
        .map(|&n| length_objective(spec, &calib, pair, n))
        .collect()
}

pub fn seed_search(spec: &SeedSearchSpec) -> Result<SeedSearchResult> {
    let total = spec
        .budget
        .map_or(spec.space.len(), |b| b.min(spec.space.len()));
    if total == 0 || spec.designs.is_empty() || spec.dists.is_empty() || spec.lengths.is_empty() {
        return Err(Error::EmptySearchSpace);
    }
    if spec.trials == 0 {
        return Err(Error::Config(
            "calibration trials must be at least 1".into(),
        ));
    }
    let rows = spec.designs[0].rows;
    if spec.designs.iter().any(|d| d.rows != rows) {
        return Err(Error::Config("designs must share the row count".into()));
    }
    let calib = Calibration::new(spec, rows)?;

    let scores: Vec<Vec<f64>> = (0..total)
        .into_par_iter()
        .map(|i| {
            let pair = spec.space.get(i);
            spec.lengths
                .iter()
                .map(|&n| length_objective(spec, &calib, pair, n))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    // strict comparison keeps the earliest index on ties
    let argmin = |f: &dyn Fn(&[f64]) -> f64| -> (usize, f64) {
        scores
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, s)| {
                let v = f(s);
                if v < best.1 {
                    (i, v)
                } else {
                    best
                }
            })
    };
    let (best, objective) = argmin(&|s| s.iter().sum::<f64>() / s.len() as f64);
    let per_length = spec
        .lengths
        .iter()
        .enumerate()
        .map(|(li, &n)| {
            let (i, obj) = argmin(&|s| s[li]);
            (
                n,
                LengthBest {
                    config: spec.space.get(i),
                    objective: obj,
                },
            )
        })
        .collect();
    Ok(SeedSearchResult {
        best_config: spec.space.get(best),
        objective,
        evaluated: total,
        per_length,
    })
}

const fn fib(taps: u8, seed_a: u8, seed_w: u8) -> PrngPair {
    PrngPair {
        prng_a: LfsrSpec::new(LfsrStyle::Fibonacci, taps, seed_a),
        prng_w: LfsrSpec::new(LfsrStyle::Fibonacci, taps, seed_w),
    }
}

/// Per-length winners of [`seed_search`] over [`SearchSpace::default_grid`]
/// with the calibration mix, OR16 and OR64 designs with midpoint
/// compensation, 64 calibration trials, master seed 0.
pub const OPTIMIZED_PRNGS: [(usize, PrngPair); 3] = [
    (64, fib(0xa9, 0x91, 0x81)),
    (128, fib(0xcf, 0x61, 0x31)),
    (256, fib(0x65, 0x91, 0xc1)),
];

pub fn optimized_prngs(bitstream_len: usize) -> Option<PrngPair> {
    OPTIMIZED_PRNGS
        .iter()
        .find(|(n, _)| *n == bitstream_len)
        .map(|&(_, p)| p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaturationRow {
    pub n: u32,
    pub p: f64,
    pub analytic_rel_error: f64,
    pub mc_rel_error: f64,
    /// Binomial standard error of `mc_rel_error`.
    pub std_error: f64,
}

impl SaturationRow {
    pub fn within(&self, sigmas: f64) -> bool {
        (self.mc_rel_error - self.analytic_rel_error).abs() <= sigmas * self.std_error
    }
}

/// Closed-form OR saturation next to a Monte-Carlo estimate over `trials`
/// runs of `cycles` cycles each, for every `(n, p)` pair.
pub fn saturation_curve(
    ns: &[u32],
    ps: &[f64],
    trials: usize,
    cycles: usize,
    master_seed: u64,
) -> Result<Vec<SaturationRow>> {
    if trials == 0 || cycles == 0 {
        return Err(Error::Config("trials and cycles must be positive".into()));
    }
    let points: Vec<(u32, f64)> = ns
        .iter()
        .flat_map(|&n| ps.iter().map(move |&p| (n, p)))
        .collect();
    points
        .par_iter()
        .enumerate()
        .map(|(i, &(n, p))| {
            let point = or_saturation_rel_error(n, p)?;
            let probs = vec![p; n as usize];
            let mut ones = 0u64;
            for t in 0..trials as u64 {
                let seed = master_seed ^ ((i as u64) << 32 | t).wrapping_mul(0x9e37_79b9_7f4a_7c15);
                ones += naive_scim_count(&probs, cycles, seed)?.or_count;
            }
            let samples = (trials * cycles) as f64;
            let q = point.expected_or;
            let (mc_rel_error, std_error) = if point.ideal_sum == 0.0 {
                (0.0, 0.0)
            } else {
                (
                    1.0 - ones as f64 / samples / point.ideal_sum,
                    (q * (1.0 - q) / samples).sqrt() / point.ideal_sum,
                )
            };
            Ok(SaturationRow {
                n,
                p,
                analytic_rel_error: point.rel_error,
                mc_rel_error,
                std_error,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorModelMeta {
    pub config: MacroConfig,
    pub config_hash: String,
    pub distribution: InputDistribution,
    pub trials: usize,
    pub master_seed: u64,
    pub rmse_norm: f64,
    pub mean_bias_norm: f64,
    pub max_abs_norm: f64,
    pub normalization: String,
}

impl ErrorModelMeta {
    pub fn new(
        cfg: &MacroConfig,
        dist: &InputDistribution,
        master_seed: u64,
        stats: &ErrorStats,
    ) -> Self {
        Self {
            config: *cfg,
            config_hash: config_hash(cfg),
            distribution: dist.clone(),
            trials: stats.trials,
            master_seed,
            rmse_norm: stats.rmse_norm,
            mean_bias_norm: stats.mean_bias_norm,
            max_abs_norm: stats.max_abs_norm,
            normalization: format!("(psum_est - psum_exact) / ({} * 255^2)", cfg.rows),
        }
    }
}

/// FNV-1a over the canonical JSON form of the configuration.
pub fn config_hash(cfg: &MacroConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    let hash = json.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    });
    format!("{hash:016x}")
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes one normalized error per line under an `error_norm` header, and
/// the metadata to `<path>.json`.
pub fn export_error_model(stats: &ErrorStats, meta: &ErrorModelMeta, path: &Path) -> Result<()> {
    if stats.raw_errors.is_empty() {
        return Err(Error::EmptyStats);
    }
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "error_norm")?;
    for e in &stats.raw_errors {
        // shortest representation that parses back to the same f64
        writeln!(out, "{e:?}")?;
    }
    out.flush()?;
    let mut side = BufWriter::new(File::create(sidecar_path(path))?);
    serde_json::to_writer_pretty(&mut side, meta)?;
    writeln!(side)?;
    side.flush()?;
    Ok(())
}

pub fn read_error_model(path: &Path) -> Result<(Vec<f64>, ErrorModelMeta)> {
    let mut reader = csv::Reader::from_path(path)?;
    let errors = reader
        .deserialize::<(f64,)>()
        .map(|r| r.map(|(e,)| e).map_err(Error::from))
        .collect::<Result<Vec<f64>>>()?;
    let meta = serde_json::from_reader(BufReader::new(File::open(sidecar_path(path))?))?;
    Ok((errors, meta))
}
