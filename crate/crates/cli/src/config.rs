//! Run configuration file and its resolution to a `MacroConfig`.

use std::path::Path;

use dscim::accumulator::AccumulatorKind;
use dscim::analysis::{optimized_prngs, InputDistribution};
use dscim::macro_sim::{Compensation, MacroConfig, SamplerKind, EXHAUSTIVE_CYCLES};
use dscim::rng::LfsrSpec;
use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Dscim1,
    Dscim2,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub rows: Option<usize>,
    pub columns: Option<usize>,
    pub group_size: Option<usize>,
    pub bitstream_len: Option<usize>,
    pub prng_a: Option<LfsrSpec>,
    pub prng_w: Option<LfsrSpec>,
    pub sampler: Option<SamplerKind>,
    pub accumulator: Option<AccumulatorKind>,
    pub compensation: Option<Compensation>,
    pub cmr: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub overrides: Overrides,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub format: OutputFormat,
    /// Falls back to a per-command default when absent.
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default = "default_distribution")]
    pub distribution: InputDistribution,
}

fn default_distribution() -> InputDistribution {
    InputDistribution::UniformSigned
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::default(),
            overrides: Overrides::default(),
            master_seed: 0,
            format: OutputFormat::default(),
            trials: None,
            distribution: default_distribution(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Whether the generator pair comes from the optimized per-length table.
    pub fn uses_optimized_prngs(&self) -> bool {
        self.mode != Mode::Custom
            && self.overrides.prng_a.is_none()
            && self.overrides.prng_w.is_none()
    }

    pub fn resolve(&self) -> CliResult<MacroConfig> {
        let o = &self.overrides;
        let mut cfg = match self.mode {
            Mode::Dscim1 | Mode::Custom => MacroConfig::dscim1(),
            Mode::Dscim2 => MacroConfig::dscim2(),
        };
        if let Some(g) = o.group_size {
            if self.mode != Mode::Custom && g != cfg.group_size {
                warn!(
                    "group_size {g} overrides the {:?} value {}",
                    self.mode, cfg.group_size
                );
            }
            cfg.group_size = g;
        }
        if let Some(acc) = o.accumulator {
            if self.mode == Mode::Dscim2 && acc != AccumulatorKind::Latch4 {
                warn!("accumulator {acc:?} overrides the dscim2 latch-cached accumulator");
            }
            cfg.accumulator = acc;
        }
        cfg.rows = o.rows.unwrap_or(cfg.rows);
        cfg.columns = o.columns.unwrap_or(cfg.columns);
        cfg.cmr = o.cmr.unwrap_or(cfg.cmr);
        cfg.compensation = o.compensation.unwrap_or(cfg.compensation);
        cfg.sampler = o.sampler.unwrap_or(cfg.sampler);
        cfg.bitstream_len = match (o.bitstream_len, cfg.sampler) {
            (Some(n), _) => n,
            (None, SamplerKind::Exhaustive) => EXHAUSTIVE_CYCLES,
            (None, SamplerKind::Prng) => cfg.bitstream_len,
        };
        if self.uses_optimized_prngs() {
            if let Some(pair) = optimized_prngs(cfg.bitstream_len) {
                cfg = pair.apply(cfg);
            }
        }
        cfg.prng_a = o.prng_a.unwrap_or(cfg.prng_a);
        cfg.prng_w = o.prng_w.unwrap_or(cfg.prng_w);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_presets() {
        let d1 = RunConfig::default().resolve().unwrap();
        assert_eq!((d1.group_size, d1.shift().unwrap().get()), (16, 2));
        let d2 = RunConfig {
            mode: Mode::Dscim2,
            ..Default::default()
        }
        .resolve()
        .unwrap();
        assert_eq!(
            (d2.group_size, d2.accumulator),
            (64, AccumulatorKind::Latch4)
        );
        assert_eq!(d2.prng_a, optimized_prngs(256).unwrap().prng_a);
    }

    #[test]
    fn overrides_win() {
        let json = r#"{"mode":"dscim2","overrides":{"accumulator":"direct","bitstream_len":64}}"#;
        let cfg: RunConfig = serde_json::from_str(json).unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.accumulator, AccumulatorKind::Direct);
        assert_eq!(r.prng_w, optimized_prngs(64).unwrap().prng_w);
    }

    #[test]
    fn custom_exhaustive_defaults_length() {
        let json = r#"{"mode":"custom","overrides":{"group_size":1,"sampler":"exhaustive"}}"#;
        let cfg: RunConfig = serde_json::from_str(json).unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.bitstream_len, EXHAUSTIVE_CYCLES);
        assert_eq!(r.prng_a, MacroConfig::dscim1().prng_a);
    }

    #[test]
    fn invalid_configs() {
        let bad: RunConfig =
            serde_json::from_str(r#"{"mode":"custom","overrides":{"group_size":8}}"#).unwrap();
        assert!(matches!(bad.resolve(), Err(CliError::Config(_))));
        assert!(serde_json::from_str::<RunConfig>(r#"{"mode":"dscim3"}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"overrides":{"bogus":1}}"#).is_err());
    }
}
