use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use dscim::analysis::{
    export_error_model, length_sweep, naive_sparsity_sweep, rmse_eval, saturation_curve,
    seed_search, sparsity_sweep, ErrorModelMeta, ErrorStats, PrngPair, SearchSpace,
    SeedSearchResult, SeedSearchSpec, SweepPoint, OPTIMIZED_PRNGS, SPARSITY_GRID,
};
use dscim::macro_sim::SignedColumn;
use dscim::macro_sim::{MacroConfig, Simulator};
use dscim::oracles::exact_psum;
use dscim::perf::{latency_model, PerfReport, WorkloadSpec};
use log::info;
use serde::Serialize;

use crate::config::{Mode, OutputFormat, RunConfig};
use crate::error::{CliError, CliResult};
use crate::io::{read_i8_matrix, write_json, write_table};

#[derive(Debug, Args)]
pub struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Master seed for all random draws.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
}

impl Common {
    /// The config file with command-line flags applied on top.
    pub fn run_config(&self) -> CliResult<RunConfig> {
        let mut rc = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(mode) = self.mode {
            rc.mode = mode;
        }
        if let Some(seed) = self.seed {
            rc.master_seed = seed;
        }
        if let Some(format) = self.format {
            rc.format = format;
        }
        if self.trials.is_some() {
            rc.trials = self.trials;
        }
        if rc.trials == Some(0) {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        Ok(rc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Length,
    Sparsity,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate activation vectors against a weight matrix.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// vectors x rows CSV of signed 8-bit activations.
        #[arg(long)]
        activations: PathBuf,
        /// rows x columns CSV of signed 8-bit weights.
        #[arg(long)]
        weights: PathBuf,
    },
    /// Error statistics over bitstream lengths or input sparsity.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: SweepKind,
        #[arg(long, value_delimiter = ',', default_values_t = [64usize, 128, 256])]
        lengths: Vec<usize>,
        /// Add rows for a conventional OR-accumulated column (sparsity only).
        #[arg(long)]
        baseline: bool,
    },
    /// Search generator polynomials and seeds for the lowest error.
    Seedsearch {
        #[command(flatten)]
        common: Common,
        /// Evaluate only the first BUDGET configurations.
        #[arg(long)]
        budget: Option<usize>,
        /// Every catalog pair instead of shared polynomials.
        #[arg(long)]
        full: bool,
        #[arg(long, value_delimiter = ',', default_values_t = [64usize, 128, 256])]
        lengths: Vec<usize>,
    },
    /// OR-accumulation error, closed form and Monte Carlo.
    Saturation {
        #[command(flatten)]
        common: Common,
        #[arg(long = "n", value_delimiter = ',', default_values_t = [1u32, 4, 16, 64])]
        ns: Vec<u32>,
        #[arg(long = "p", value_delimiter = ',',
              default_values_t = [0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0])]
        ps: Vec<f64>,
        #[arg(long, default_value_t = 256)]
        cycles: usize,
    },
    /// Cycle and accumulator activity estimate for a workload.
    Perf {
        #[command(flatten)]
        common: Common,
        /// JSON with `outputs`, `vector_len`, `weight_columns`.
        #[arg(long)]
        workload: PathBuf,
    },
    /// Sample per-column errors and write them with a metadata sidecar.
    Errmodel {
        #[command(flatten)]
        common: Common,
    },
}

pub fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Simulate {
            common,
            activations,
            weights,
        } => simulate(&common, &activations, &weights),
        Command::Sweep {
            common,
            kind,
            lengths,
            baseline,
        } => sweep(&common, kind, &lengths, baseline),
        Command::Seedsearch {
            common,
            budget,
            full,
            lengths,
        } => seedsearch(&common, budget, full, lengths),
        Command::Saturation {
            common,
            ns,
            ps,
            cycles,
        } => saturation(&common, &ns, &ps, cycles),
        Command::Perf { common, workload } => perf(&common, &workload),
        Command::Errmodel { common } => errmodel(&common),
    }
}

#[derive(Debug, Serialize)]
struct SimRow {
    vector: usize,
    column: usize,
    psum_est: i64,
    psum_exact: i64,
    error_norm: f64,
    count: u64,
    accumulator_activations: u64,
}

fn simulate(common: &Common, act_path: &Path, w_path: &Path) -> CliResult<()> {
    let rc = common.run_config()?;
    let cfg = rc.resolve()?;
    let acts = read_i8_matrix(act_path, Some(cfg.rows))?;
    let weights = read_i8_matrix(w_path, None)?;
    if weights.len() != cfg.rows {
        return Err(CliError::Input(format!(
            "{}: {} weight rows, expected {}",
            w_path.display(),
            weights.len(),
            cfg.rows
        )));
    }
    let n_cols = weights[0].len();
    let sim = Simulator::new(cfg)?;
    let mut rows = Vec::with_capacity(acts.len() * n_cols);
    for (batch_idx, batch) in acts.chunks(cfg.cmr).enumerate() {
        let mut per_vector: Vec<Vec<_>> = vec![Vec::with_capacity(n_cols); batch.len()];
        for start in (0..n_cols).step_by(cfg.columns) {
            let end = (start + cfg.columns).min(n_cols);
            let tile: Vec<Vec<i8>> = weights.iter().map(|r| r[start..end].to_vec()).collect();
            let results = sim.simulate_macro(batch, &tile)?;
            for (v, res) in results.into_iter().enumerate() {
                per_vector[v].extend(res);
            }
        }
        for (v, results) in per_vector.into_iter().enumerate() {
            let vector = batch_idx * cfg.cmr + v;
            for (column, r) in results.into_iter().enumerate() {
                let col = SignedColumn::new(
                    acts[vector].clone(),
                    weights.iter().map(|w| w[column]).collect(),
                )?;
                let psum_exact = exact_psum(&col);
                rows.push(SimRow {
                    vector,
                    column,
                    psum_est: r.psum_est,
                    psum_exact,
                    error_norm: (r.psum_est - psum_exact) as f64 / cfg.full_scale(),
                    count: r.count,
                    accumulator_activations: r.accumulator_activations,
                });
            }
        }
    }
    info!("simulated {} outputs", rows.len());
    write_table(&common.out, rc.format, &cfg, &rows)
}

#[derive(Debug, Serialize)]
struct SweepRow {
    design: String,
    param: f64,
    rmse_norm: f64,
    mean_bias_norm: f64,
    max_abs_norm: f64,
    std_norm: f64,
    trials: usize,
}

impl SweepRow {
    fn new(design: &str, p: &SweepPoint) -> Self {
        Self {
            design: design.to_string(),
            param: p.param,
            rmse_norm: p.stats.rmse_norm,
            mean_bias_norm: p.stats.mean_bias_norm,
            max_abs_norm: p.stats.max_abs_norm,
            std_norm: p.stats.std_norm(),
            trials: p.stats.trials,
        }
    }
}

const SWEEP_TRIALS: usize = 2000;

fn sweep(common: &Common, kind: SweepKind, lengths: &[usize], baseline: bool) -> CliResult<()> {
    let rc = common.run_config()?;
    let cfg = rc.resolve()?;
    let trials = rc.trials.unwrap_or(SWEEP_TRIALS);
    let design = format!("or{}", cfg.group_size);
    let mut rows = Vec::new();
    match kind {
        SweepKind::Length => {
            let table: BTreeMap<usize, PrngPair> =
                OPTIMIZED_PRNGS.iter().map(|&(n, pair)| (n, pair)).collect();
            let prngs = rc.uses_optimized_prngs().then_some(&table);
            let points = length_sweep(
                &cfg,
                lengths,
                &rc.distribution,
                trials,
                rc.master_seed,
                prngs,
            )?;
            rows.extend(points.iter().map(|p| SweepRow::new(&design, p)));
        }
        SweepKind::Sparsity => {
            let points = sparsity_sweep(&cfg, &SPARSITY_GRID, trials, rc.master_seed)?;
            rows.extend(points.iter().map(|p| SweepRow::new(&design, p)));
            if baseline {
                let naive = naive_sparsity_sweep(
                    cfg.rows,
                    cfg.group_size,
                    cfg.cycles(),
                    &SPARSITY_GRID,
                    trials,
                    rc.master_seed,
                )?;
                let name = format!("naive_or{}", cfg.group_size);
                rows.extend(naive.iter().map(|p| SweepRow::new(&name, p)));
            }
        }
    }
    write_table(&common.out, rc.format, &cfg, &rows)
}

#[derive(Debug, Serialize)]
struct SeedSearchOutput<'a> {
    config: &'a MacroConfig,
    designs: &'a [MacroConfig],
    lengths: &'a [usize],
    trials: usize,
    master_seed: u64,
    space_size: usize,
    budget: Option<usize>,
    result: SeedSearchResult,
}

fn seedsearch(
    common: &Common,
    budget: Option<usize>,
    full: bool,
    lengths: Vec<usize>,
) -> CliResult<()> {
    let rc = common.run_config()?;
    let cfg = rc.resolve()?;
    let designs = match rc.mode {
        Mode::Custom => vec![cfg],
        Mode::Dscim1 | Mode::Dscim2 => [Mode::Dscim1, Mode::Dscim2]
            .into_iter()
            .map(|mode| RunConfig { mode, ..rc.clone() }.resolve())
            .collect::<CliResult<_>>()?,
    };
    let mut spec = SeedSearchSpec::new(designs);
    if full {
        spec.space = SearchSpace::full();
    }
    spec.lengths = lengths;
    spec.budget = budget;
    spec.master_seed = rc.master_seed;
    if let Some(t) = rc.trials {
        spec.trials = t;
    }
    let result = seed_search(&spec)?;
    info!("evaluated {} configurations", result.evaluated);
    write_json(
        &common.out,
        &SeedSearchOutput {
            config: &cfg,
            designs: &spec.designs,
            lengths: &spec.lengths,
            trials: spec.trials,
            master_seed: spec.master_seed,
            space_size: spec.space.len(),
            budget,
            result,
        },
    )
}

#[derive(Debug, Serialize)]
struct SaturationOut {
    n: u32,
    p: f64,
    analytic_rel_error: f64,
    mc_rel_error: f64,
    std_error: f64,
    within_4se: bool,
}

const SATURATION_TRIALS: usize = 100;

fn saturation(common: &Common, ns: &[u32], ps: &[f64], cycles: usize) -> CliResult<()> {
    let rc = common.run_config()?;
    let cfg = rc.resolve()?;
    let trials = rc.trials.unwrap_or(SATURATION_TRIALS);
    let rows: Vec<SaturationOut> = saturation_curve(ns, ps, trials, cycles, rc.master_seed)
        .map_err(|e| match e {
            dscim::Error::Range { .. } => CliError::Input(e.to_string()),
            e => e.into(),
        })?
        .into_iter()
        .map(|r| SaturationOut {
            n: r.n,
            p: r.p,
            analytic_rel_error: r.analytic_rel_error,
            mc_rel_error: r.mc_rel_error,
            std_error: r.std_error,
            within_4se: r.within(4.0),
        })
        .collect();
    write_table(&common.out, rc.format, &cfg, &rows)
}

#[derive(Debug, Serialize)]
struct PerfOutput<'a> {
    config: &'a MacroConfig,
    workload: &'a WorkloadSpec,
    report: PerfReport,
}

fn perf(common: &Common, workload: &Path) -> CliResult<()> {
    let rc = common.run_config()?;
    let cfg = rc.resolve()?;
    let text = std::fs::read_to_string(workload)
        .map_err(|e| CliError::Input(format!("{}: {e}", workload.display())))?;
    let work: WorkloadSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", workload.display())))?;
    let report = latency_model(&work, &cfg)?;
    write_json(
        &common.out,
        &PerfOutput {
            config: &cfg,
            workload: &work,
            report,
        },
    )
}

fn errmodel(common: &Common) -> CliResult<()> {
    let rc = common.run_config()?;
    let cfg = rc.resolve()?;
    let trials = rc.trials.unwrap_or(SWEEP_TRIALS);
    let stats: ErrorStats = rmse_eval(&cfg, &rc.distribution, trials, rc.master_seed)?;
    let meta = ErrorModelMeta::new(&cfg, &rc.distribution, rc.master_seed, &stats);
    export_error_model(&stats, &meta, &common.out)?;
    Ok(())
}
