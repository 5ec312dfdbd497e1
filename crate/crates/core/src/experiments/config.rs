use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dpd::CompensatorStructure;
use crate::error::{Error, Result};
use crate::passband::{CtVolterraModel, ModulationParams};

/// How `S` is evaluated during experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Oversampled passband simulation.
    #[default]
    Oracle,
    /// Analytic discrete-time equivalent.
    Model,
}

/// A compensator entry of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureSpec {
    None,
    Ideal,
    Fitted(CompensatorStructure),
}

impl StructureSpec {
    /// Accepts `none`, `ideal`, `volterra1..3`, `proposed` or an explicit
    /// `volterra(m1,m2,d)` / `proposed(m,d,p)`.
    pub fn parse(s: &str) -> Result<Self> {
        use CompensatorStructure::*;
        Ok(match s.trim() {
            "none" => StructureSpec::None,
            "ideal" => StructureSpec::Ideal,
            "volterra1" => StructureSpec::Fitted(PlainVolterra { m1: 0, m2: 2, d: 5 }),
            "volterra2" => StructureSpec::Fitted(PlainVolterra { m1: 0, m2: 4, d: 5 }),
            "volterra3" => StructureSpec::Fitted(PlainVolterra { m1: 2, m2: 2, d: 5 }),
            "proposed" => StructureSpec::Fitted(ProposedLv { memory: 1, degree: 3, order: 2 }),
            other => StructureSpec::Fitted(other.parse()?),
        })
    }

    /// Short name used in output files.
    pub fn name(&self) -> String {
        use CompensatorStructure::*;
        match *self {
            StructureSpec::None => "none".into(),
            StructureSpec::Ideal => "ideal".into(),
            StructureSpec::Fitted(s) => match s {
                PlainVolterra { m1: 0, m2: 2, d: 5 } => "volterra1".into(),
                PlainVolterra { m1: 0, m2: 4, d: 5 } => "volterra2".into(),
                PlainVolterra { m1: 2, m2: 2, d: 5 } => "volterra3".into(),
                ProposedLv { memory: 1, degree: 3, order: 2 } => "proposed".into(),
                other => other.to_string(),
            },
        }
    }
}

fn default_f_symb() -> f64 {
    2e6
}
fn default_m() -> usize {
    10
}
fn default_l() -> usize {
    1000
}
fn default_n() -> usize {
    4096
}
fn default_seed() -> u64 {
    1
}
fn default_deltas() -> Vec<f64> {
    (1..=10).map(|i| i as f64 * 0.02).collect()
}
fn default_taus() -> Vec<f64> {
    vec![0.2, 0.3, 0.4]
}
fn default_structures() -> Vec<String> {
    ["none", "volterra1", "volterra2", "volterra3", "proposed", "ideal"].map(String::from).to_vec()
}
fn one() -> usize {
    1
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn yes() -> bool {
    true
}

/// Settings shared by the sweep, table and OFDM experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_f_symb")]
    pub f_symb: f64,
    #[serde(rename = "M", default = "default_m")]
    pub carrier_ratio: usize,
    #[serde(rename = "L", default = "default_l")]
    pub oversample: usize,
    #[serde(default = "default_n")]
    pub n_symbols: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_deltas")]
    pub delta_list: Vec<f64>,
    #[serde(rename = "tau_over_T", default = "default_taus")]
    pub tau_over_t: Vec<f64>,
    #[serde(default = "default_structures")]
    pub structures: Vec<String>,
    #[serde(default = "one")]
    pub train_frames: usize,
    #[serde(default = "one")]
    pub validate_frames: usize,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub backend: Backend,
    /// Prune fitted compensators before reporting `n_significant`.
    #[serde(default)]
    pub prune: bool,
    /// Wall-clock seconds per row; disable for byte-identical reruns.
    #[serde(default = "yes")]
    pub record_runtime: bool,
    /// Symbols per frame are `n_symbols / source_upsample`, low-pass
    /// interpolated back to `n_symbols` samples. `1` feeds symbols directly.
    #[serde(default = "one")]
    pub source_upsample: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("defaults deserialize")
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if !self.n_symbols.is_power_of_two() {
            return Err(Error::InvalidConfig(format!("n_symbols must be a power of two, got {}", self.n_symbols)));
        }
        if let Some(d) = self.delta_list.iter().find(|&&d| !(d > 0.0 && d <= 0.2)) {
            return Err(Error::InvalidConfig(format!("delta {d} outside (0, 0.2]")));
        }
        if self.tau_over_t.len() != 3 || self.tau_over_t.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
            return Err(Error::InvalidConfig("tau_over_T needs three fractions in [0, 1]".into()));
        }
        if self.source_upsample == 0 || !self.n_symbols.is_multiple_of(self.source_upsample) {
            return Err(Error::InvalidConfig(format!(
                "source_upsample {} must divide n_symbols {}",
                self.source_upsample, self.n_symbols
            )));
        }
        if self.train_frames == 0 || self.validate_frames == 0 {
            return Err(Error::InvalidConfig("frame counts must be positive".into()));
        }
        self.structure_specs()?;
        Ok(())
    }

    pub fn params(&self) -> Result<ModulationParams> {
        if !(self.f_symb > 0.0 && self.f_symb.is_finite()) {
            return Err(Error::InvalidConfig(format!("f_symb must be positive, got {}", self.f_symb)));
        }
        ModulationParams::from_rates(self.f_symb, self.carrier_ratio, self.oversample)
    }

    pub fn structure_specs(&self) -> Result<Vec<StructureSpec>> {
        self.structures.iter().map(|s| StructureSpec::parse(s)).collect()
    }

    /// The cubic distortion with delays snapped to the simulation grid.
    pub fn distortion(&self, delta: f64) -> Result<CtVolterraModel> {
        let p = self.params()?;
        let t = p.symbol_period();
        let taus = [self.tau_over_t[0] * t, self.tau_over_t[1] * t, self.tau_over_t[2] * t];
        let model = CtVolterraModel::cubic_distortion(delta, taus)?;
        let (snapped, err) = model.snap_to_grid(&p);
        if err > 1e-9 * t {
            log::warn!("delays moved by up to {:.3e} s to land on the sampling grid", err);
        }
        Ok(snapped)
    }
}
