//! Experiment configuration: a TOML file, optionally layered over a preset.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::presets;

/// A scalar or a list of values; lists become grid axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatVariable {
    /// First coordinate of the first state.
    #[default]
    X1,
    /// First coordinate of the last state.
    #[serde(rename = "xT")]
    XT,
    /// First hyperparameter.
    Theta0,
}

impl StatVariable {
    pub fn name(self) -> &'static str {
        match self {
            StatVariable::X1 => "x1",
            StatVariable::XT => "xT",
            StatVariable::Theta0 => "theta0",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Preset the file was layered over, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Replace the desk-scale grids of the preset by the full grids.
    #[serde(default)]
    pub full_grid: bool,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "one")]
    pub replicates: usize,
    pub n_iters: usize,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default = "one")]
    pub thin: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub stat: StatVariable,
    /// Write full trajectories instead of the first and last states.
    #[serde(default)]
    pub save_paths: bool,
    pub model: ModelConfig,
    pub algorithm: AlgorithmConfig,
}

fn default_seed() -> u64 {
    1
}

fn one() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    /// `x_{k+1} = rho x_k + N(0, sigma_x^2)`, `y_k = x_k + N(0, sigma_y^2)`.
    /// Without `sigma_1` the first state has a flat prior.
    NoisyAr {
        horizon: usize,
        #[serde(default = "unit")]
        rho: f64,
        sigma_x: OneOrMany<f64>,
        sigma_y: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma_1: Option<OneOrMany<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        data: Option<PathBuf>,
        #[serde(default = "default_seed")]
        data_seed: u64,
        /// Starting value of the simulated data and of the chains.
        #[serde(default)]
        x1: f64,
    },
    Sv {
        horizon: usize,
        sigma_x: OneOrMany<f64>,
        sigma_y: f64,
        sigma_1: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        data: Option<PathBuf>,
        #[serde(default = "default_seed")]
        data_seed: u64,
    },
    /// Static `N(0, sigma^2 I_dim)` target behind a flat initial measure.
    Mvn { dim: OneOrMany<usize>, sigma: f64 },
    Seir(SeirConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeirConfig {
    pub horizon: usize,
    /// Counts file with `date,count` columns; simulated when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default = "default_seed")]
    pub data_seed: u64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    /// Piecewise-constant `R0` used for simulation: `[[start_day, r0], ...]`.
    #[serde(default = "default_r0_schedule")]
    pub r0_schedule: Vec<(usize, f64)>,
    #[serde(default = "default_e1")]
    pub true_e1: u64,
    #[serde(default = "default_i1")]
    pub true_i1: u64,
    /// Chain start for `E_1`, `I_1` and `R0(rho_1)`.
    #[serde(default = "default_start")]
    pub start: (f64, f64, f64),
    /// Sample `(log sigma, logit p)` alongside the path.
    #[serde(default = "yes")]
    pub estimate_theta: bool,
}

fn default_sigma() -> f64 {
    0.1
}

fn default_p() -> f64 {
    0.1
}

fn default_r0_schedule() -> Vec<(usize, f64)> {
    vec![(0, 2.5), (30, 1.2), (60, 0.8)]
}

fn default_e1() -> u64 {
    300
}

fn default_i1() -> u64 {
    150
}

fn default_start() -> (f64, f64, f64) {
    (100.0, 100.0, 2.0)
}

fn yes() -> bool {
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    /// Conditional particle filter with backward sampling.
    CpfBs,
    /// Crank-Nicolson auxiliary kernel with fixed `beta`.
    Cn,
    /// Crank-Nicolson kernel with `beta` adapted to `alpha_target`.
    AdaptiveCn,
    /// Random-walk auxiliary kernel with fixed scale.
    Rw,
    Am,
    Aswam,
    DpgBs,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectorConfig {
    #[default]
    Bs,
    At,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StabilityConfig {
    #[default]
    Off,
    Project { epsilon: f64 },
    Reject { epsilon: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub kind: AlgorithmKind,
    #[serde(default)]
    pub selector: SelectorConfig,
    pub n_particles: OneOrMany<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_target: Option<OneOrMany<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<OneOrMany<f64>>,
    /// Standard deviation of the fixed random-walk kernel.
    #[serde(default = "unit")]
    pub rw_scale: f64,
    /// AM covariance multiplier; defaults to `2.38^2 / d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub am_scale: Option<f64>,
    #[serde(default)]
    pub stability: StabilityConfig,
}

fn invalid(field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        msg: msg.into(),
    }
}

fn check_positive(field: &str, values: &[f64]) -> Result<(), ConfigError> {
    match values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        Some(v) => Err(invalid(field, format!("must be positive and finite, got {v}"))),
        None => Ok(()),
    }
}

fn check_nonempty<T>(field: &str, values: &[T]) -> Result<(), ConfigError> {
    if values.is_empty() {
        Err(invalid(field, "grid list is empty"))
    } else {
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return Err(invalid("name", "use letters, digits, '-', '_' or '.'"));
        }
        if self.n_iters <= self.burn_in {
            return Err(invalid(
                "n_iters",
                format!("must exceed burn_in ({} <= {})", self.n_iters, self.burn_in),
            ));
        }
        if self.thin == 0 {
            return Err(invalid("thin", "must be at least 1"));
        }
        if self.replicates == 0 {
            return Err(invalid("replicates", "must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(invalid("workers", "must be at least 1"));
        }
        self.validate_model()?;
        self.validate_algorithm()
    }

    fn validate_model(&self) -> Result<(), ConfigError> {
        match &self.model {
            ModelConfig::NoisyAr {
                horizon,
                rho,
                sigma_x,
                sigma_y,
                sigma_1,
                ..
            } => {
                if *horizon == 0 {
                    return Err(invalid("model.horizon", "must be at least 1"));
                }
                if !rho.is_finite() {
                    return Err(invalid("model.rho", "must be finite"));
                }
                check_nonempty("model.sigma_x", &sigma_x.values())?;
                check_positive("model.sigma_x", &sigma_x.values())?;
                check_positive("model.sigma_y", &[*sigma_y])?;
                if let Some(s) = sigma_1 {
                    check_nonempty("model.sigma_1", &s.values())?;
                    check_positive("model.sigma_1", &s.values())?;
                }
            }
            ModelConfig::Sv {
                horizon,
                sigma_x,
                sigma_y,
                sigma_1,
                ..
            } => {
                if *horizon == 0 {
                    return Err(invalid("model.horizon", "must be at least 1"));
                }
                check_nonempty("model.sigma_x", &sigma_x.values())?;
                check_positive("model.sigma_x", &sigma_x.values())?;
                check_positive("model.sigma_y", &[*sigma_y])?;
                check_positive("model.sigma_1", &[*sigma_1])?;
            }
            ModelConfig::Mvn { dim, sigma } => {
                check_nonempty("model.dim", &dim.values())?;
                if dim.values().contains(&0) {
                    return Err(invalid("model.dim", "must be at least 1"));
                }
                check_positive("model.sigma", &[*sigma])?;
            }
            ModelConfig::Seir(s) => {
                if s.horizon == 0 {
                    return Err(invalid("model.horizon", "must be at least 1"));
                }
                check_positive("model.sigma", &[s.sigma])?;
                if !(s.p > 0.0 && s.p < 1.0) {
                    return Err(invalid("model.p", "must lie in (0, 1)"));
                }
                if s.r0_schedule.first().map(|r| r.0) != Some(0) {
                    return Err(invalid("model.r0_schedule", "must start at day 0"));
                }
                if s.start.0 < 0.0 || s.start.1 < 0.0 {
                    return Err(invalid("model.start", "compartment counts must be non-negative"));
                }
            }
        }
        Ok(())
    }

    fn validate_algorithm(&self) -> Result<(), ConfigError> {
        let a = &self.algorithm;
        let ns = a.n_particles.values();
        check_nonempty("algorithm.n_particles", &ns)?;
        if ns.contains(&0) {
            return Err(invalid("algorithm.n_particles", "must be at least 1"));
        }
        if let Some(t) = &a.alpha_target {
            let ts = t.values();
            check_nonempty("algorithm.alpha_target", &ts)?;
            if ts.iter().any(|v| !(*v > 0.0 && *v < 1.0)) {
                return Err(invalid("algorithm.alpha_target", "must lie in (0, 1)"));
            }
        }
        if let Some(b) = &a.beta {
            let bs = b.values();
            check_nonempty("algorithm.beta", &bs)?;
            if bs.iter().any(|v| !(*v > 0.0 && *v <= 1.0)) {
                return Err(invalid("algorithm.beta", "must lie in (0, 1]"));
            }
        }
        check_positive("algorithm.rw_scale", &[a.rw_scale])?;
        if let Some(c) = a.am_scale {
            check_positive("algorithm.am_scale", &[c])?;
        }
        let flat = match &self.model {
            ModelConfig::NoisyAr { sigma_1, .. } => sigma_1.is_none(),
            ModelConfig::Sv { .. } => false,
            ModelConfig::Mvn { .. } | ModelConfig::Seir(_) => true,
        };
        match a.kind {
            AlgorithmKind::CpfBs | AlgorithmKind::Cn | AlgorithmKind::AdaptiveCn if flat => {
                return Err(invalid("algorithm.kind", "needs a Gaussian initial measure"));
            }
            AlgorithmKind::Cn if a.beta.is_none() => {
                return Err(invalid("algorithm.beta", "required for kind = \"cn\""));
            }
            AlgorithmKind::AdaptiveCn | AlgorithmKind::Aswam if a.selector == SelectorConfig::At => {
                return Err(invalid("algorithm.selector", "acceptance-rate adaptation needs \"bs\""));
            }
            _ => {}
        }
        if a.kind == AlgorithmKind::DpgBs && matches!(&self.model, ModelConfig::Seir(s) if s.estimate_theta) {
            return Err(invalid("algorithm.kind", "dpg-bs cannot estimate hyperparameters; set model.estimate_theta = false"));
        }
        if self.stat == StatVariable::Theta0 && !matches!(&self.model, ModelConfig::Seir(s) if s.estimate_theta) {
            return Err(invalid("stat", "theta0 needs a model with estimated hyperparameters"));
        }
        Ok(())
    }
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn parse_table(text: &str, origin: &str) -> Result<toml::Table, ConfigError> {
    text.parse::<toml::Table>().map_err(|e| ConfigError::Parse {
        origin: origin.to_string(),
        msg: e.to_string(),
    })
}

/// Parses a configuration from TOML text.
///
/// A top-level `preset = "<name>"` layers the text over that preset. A
/// `runs` array (as written to manifests) is ignored, so manifests can be fed
/// back in as configurations. Relative data paths are resolved against
/// `base_dir`.
pub fn parse_config(text: &str, origin: &str, base_dir: Option<&Path>) -> Result<ExperimentConfig, ConfigError> {
    let mut table = parse_table(text, origin)?;
    table.remove("runs");
    let preset = table.get("preset").and_then(|v| v.as_str()).map(str::to_string);
    let full = table.get("full_grid").and_then(|v| v.as_bool()).unwrap_or(false);
    let table = match preset {
        Some(name) => {
            let mut base = preset_table(&name, full)?;
            merge(&mut base, table);
            base
        }
        None => table,
    };
    let mut cfg: ExperimentConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| ConfigError::Parse {
        origin: origin.to_string(),
        msg: e.message().to_string(),
    })?;
    if let Some(dir) = base_dir {
        resolve_paths(&mut cfg, dir);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn preset_table(name: &str, full: bool) -> Result<toml::Table, ConfigError> {
    let preset = presets::find(name).ok_or_else(|| invalid("preset", format!("unknown preset {name:?}")))?;
    let mut table = parse_table(preset.desk, name)?;
    if full {
        if let Some(extra) = preset.full {
            merge(&mut table, parse_table(extra, name)?);
        }
    }
    table.insert("preset".into(), toml::Value::String(name.to_string()));
    Ok(table)
}

fn resolve_paths(cfg: &mut ExperimentConfig, dir: &Path) {
    let data = match &mut cfg.model {
        ModelConfig::NoisyAr { data, .. } | ModelConfig::Sv { data, .. } => data,
        ModelConfig::Seir(s) => &mut s.data,
        ModelConfig::Mvn { .. } => return,
    };
    if let Some(p) = data {
        if p.is_relative() {
            *p = dir.join(&*p);
        }
        if let Ok(abs) = std::path::absolute(&*p) {
            *p = abs;
        }
    }
}

/// Loads a configuration from a file, or from a preset when `source` names
/// one and no such file exists.
pub fn load_config(source: &str) -> Result<ExperimentConfig, ConfigError> {
    let path = Path::new(source);
    if !path.exists() {
        if presets::find(source).is_some() {
            return parse_config(&format!("preset = {source:?}"), source, None);
        }
        return Err(ConfigError::Io {
            path: path.to_path_buf(),
            msg: "no such file or preset".into(),
        });
    }
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    parse_config(&text, source, path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(extra: &str) -> String {
        format!(
            r#"
name = "t"
n_iters = 100
burn_in = 10
{extra}
[model]
kind = "noisy-ar"
horizon = 5
sigma_x = 1.0
sigma_y = 1.0
sigma_1 = [10.0, 100.0]
[algorithm]
kind = "cpf-bs"
n_particles = 8
"#
        )
    }

    #[test]
    fn parses_minimal_config() {
        let cfg = parse_config(&minimal(""), "test", None).unwrap();
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.thin, 1);
        assert_eq!(cfg.algorithm.selector, SelectorConfig::Bs);
        let ModelConfig::NoisyAr { sigma_1, rho, .. } = &cfg.model else {
            panic!("wrong model")
        };
        assert_eq!(sigma_1.as_ref().unwrap().values(), vec![10.0, 100.0]);
        assert_eq!(*rho, 1.0);
    }

    #[test]
    fn burn_in_must_be_below_iterations() {
        let text = minimal("").replace("burn_in = 10", "burn_in = 100");
        let err = parse_config(&text, "test", None).unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { field, .. } if field == "n_iters"), "{err}");
    }

    #[test]
    fn unknown_field_is_named() {
        let err = parse_config(&minimal("n_iter = 5"), "test", None).unwrap_err();
        assert!(err.to_string().contains("n_iter"), "{err}");
    }

    #[test]
    fn flat_prior_rejects_cpf_bs() {
        let text = minimal("").replace("sigma_1 = [10.0, 100.0]\n", "");
        let err = parse_config(&text, "test", None).unwrap_err();
        assert!(err.to_string().contains("algorithm.kind"), "{err}");
    }

    #[test]
    fn preset_values_can_be_overridden() {
        let cfg = parse_config("preset = \"fig1\"\nn_iters = 2000\nburn_in = 100", "test", None).unwrap();
        assert_eq!(cfg.n_iters, 2000);
        assert_eq!(cfg.name, "fig1");
        assert_eq!(cfg.preset.as_deref(), Some("fig1"));
    }

    #[test]
    fn every_preset_validates() {
        for p in presets::PRESETS {
            parse_config(&format!("preset = {:?}", p.name), p.name, None).unwrap();
            parse_config(&format!("preset = {:?}\nfull_grid = true", p.name), p.name, None).unwrap();
        }
    }

    #[test]
    fn serialised_config_round_trips() {
        let cfg = parse_config(&minimal(""), "test", None).unwrap();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(parse_config(&text, "again", None).unwrap(), cfg);
    }
}
