//! Grid expansion, run execution and output files.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use diffcpf::adapt::{AmState, RamState, Stability, DEFAULT_ALPHA_TARGET};
use diffcpf::diagnostics::chain_stats;
use diffcpf::drivers::{aai_cpf_run, aai_pg_run, dpg_bs_run, initial_reference, HyperModel, InitScheme, RunConfig, SeirHyper};
use diffcpf::engine::PathSelector;
use diffcpf::fk::{FeynmanKac, Trajectory};
use diffcpf::linalg::Matrix;
use diffcpf::models::{
    make_mvn_static, make_noisy_ar, make_sv, simulate_noisy_ar, simulate_seir, simulate_sv, InitialSpread,
    MvnStaticParams, NoisyArParams, SeirParams, SvParams,
};
use diffcpf::real::logit;
use diffcpf::rng::derive_seed;
use diffcpf::{ChainRecord64, RngStream};

use crate::config::{
    AlgorithmKind, ExperimentConfig, ModelConfig, SeirConfig, SelectorConfig, StabilityConfig, StatVariable,
};
use crate::data::{self, PathColumns};
use crate::error::{CliError, ConfigError, Result};

pub const SEIR_NAMES: [&str; 5] = ["S", "E", "I", "R", "rho"];

/// Values of the grid axes for one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GridPoint {
    pub sigma_1: Option<f64>,
    pub sigma_x: Option<f64>,
    pub dim: Option<usize>,
    pub n_particles: usize,
    pub alpha_target: Option<f64>,
    pub beta: Option<f64>,
}

impl GridPoint {
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if let Some(v) = self.sigma_1 {
            parts.push(format!("sigma_1={v}"));
        }
        if let Some(v) = self.sigma_x {
            parts.push(format!("sigma_x={v}"));
        }
        if let Some(v) = self.dim {
            parts.push(format!("dim={v}"));
        }
        parts.push(format!("n_particles={}", self.n_particles));
        if let Some(v) = self.alpha_target {
            parts.push(format!("alpha_target={v}"));
        }
        if let Some(v) = self.beta {
            parts.push(format!("beta={v}"));
        }
        parts.join("/")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub index: usize,
    pub id: String,
    pub point: GridPoint,
    pub point_index: usize,
    pub replicate: usize,
    pub seed: u64,
}

fn axis<T: Clone>(values: Option<Vec<T>>) -> Vec<Option<T>> {
    match values {
        Some(v) => v.into_iter().map(Some).collect(),
        None => vec![None],
    }
}

/// The cartesian product of all grid axes used by the configured model and
/// algorithm, with replicates innermost.
pub fn expand_grid(cfg: &ExperimentConfig) -> Vec<RunSpec> {
    let (sigma_1, sigma_x, dim) = match &cfg.model {
        ModelConfig::NoisyAr { sigma_1, sigma_x, .. } => {
            (axis(sigma_1.as_ref().map(|s| s.values())), axis(Some(sigma_x.values())), vec![None])
        }
        ModelConfig::Sv { sigma_x, .. } => (vec![None], axis(Some(sigma_x.values())), vec![None]),
        ModelConfig::Mvn { dim, .. } => (vec![None], vec![None], axis(Some(dim.values()))),
        ModelConfig::Seir(_) => (vec![None], vec![None], vec![None]),
    };
    let a = &cfg.algorithm;
    let alphas = match a.kind {
        AlgorithmKind::AdaptiveCn | AlgorithmKind::Aswam => {
            axis(Some(a.alpha_target.as_ref().map_or(vec![DEFAULT_ALPHA_TARGET], |t| t.values())))
        }
        _ => vec![None],
    };
    let betas = match a.kind {
        AlgorithmKind::Cn => axis(a.beta.as_ref().map(|b| b.values())),
        _ => vec![None],
    };
    let mut points = Vec::new();
    for &s1 in &sigma_1 {
        for &sx in &sigma_x {
            for &d in &dim {
                for n in a.n_particles.values() {
                    for &alpha in &alphas {
                        for &beta in &betas {
                            points.push(GridPoint {
                                sigma_1: s1,
                                sigma_x: sx,
                                dim: d,
                                n_particles: n,
                                alpha_target: alpha,
                                beta,
                            });
                        }
                    }
                }
            }
        }
    }
    let mut specs = Vec::with_capacity(points.len() * cfg.replicates);
    for (pi, point) in points.into_iter().enumerate() {
        for rep in 0..cfg.replicates {
            let index = specs.len();
            specs.push(RunSpec {
                index,
                id: format!("{}-{index:04}", cfg.name),
                point: point.clone(),
                point_index: pi,
                replicate: rep,
                seed: derive_seed(cfg.seed, &[pi as u64, rep as u64]),
            });
        }
    }
    specs
}

/// Observations of a simulated or loaded data set.
#[derive(Clone, Debug, PartialEq)]
pub enum Dataset {
    Series(Vec<f64>),
    Counts(Vec<u64>),
    None,
}

/// A simulated data set with its latent path.
pub struct Simulated {
    pub data: Dataset,
    pub truth: Trajectory<f64>,
    pub names: Vec<&'static str>,
}

pub fn seir_params(s: &SeirConfig) -> SeirParams<f64> {
    SeirParams::with_defaults(s.sigma, s.p)
}

fn r0_at(schedule: &[(usize, f64)], k: usize) -> f64 {
    schedule.iter().rev().find(|(start, _)| *start <= k).map_or(schedule[0].1, |r| r.1)
}

/// Simulates the configured model's data at `point`.
pub fn simulate(cfg: &ExperimentConfig, point: &GridPoint) -> Result<Simulated> {
    Ok(match &cfg.model {
        ModelConfig::NoisyAr {
            horizon,
            rho,
            sigma_x,
            sigma_y,
            data_seed,
            x1,
            ..
        } => {
            let params = NoisyArParams {
                rho: *rho,
                sigma_x: point.sigma_x.unwrap_or(sigma_x.values()[0]),
                sigma_y: *sigma_y,
                initial: InitialSpread::Flat,
            };
            let (y, truth) = simulate_noisy_ar(&params, *horizon, *x1, &mut RngStream::new(*data_seed, 0))?;
            Simulated {
                data: Dataset::Series(y),
                truth,
                names: vec!["x"],
            }
        }
        ModelConfig::Sv {
            horizon,
            sigma_x,
            sigma_y,
            sigma_1,
            data_seed,
            ..
        } => {
            let params = SvParams {
                sigma_x: point.sigma_x.unwrap_or(sigma_x.values()[0]),
                sigma_y: *sigma_y,
                sigma_1: *sigma_1,
            };
            let (y, truth) = simulate_sv(&params, *horizon, 0.0, &mut RngStream::new(*data_seed, 0))?;
            Simulated {
                data: Dataset::Series(y),
                truth,
                names: vec!["x"],
            }
        }
        ModelConfig::Mvn { .. } => {
            return Err(ConfigError::Invalid {
                field: "model.kind".into(),
                msg: "the static normal model has no data to simulate".into(),
            }
            .into())
        }
        ModelConfig::Seir(s) => {
            let params = seir_params(s);
            let rho: Vec<f64> = (0..s.horizon)
                .map(|k| logit(r0_at(&s.r0_schedule, k) / params.r0_max))
                .collect();
            let (data, truth) = simulate_seir(
                &params,
                s.horizon,
                s.true_e1,
                s.true_i1,
                rho[0],
                Some(&rho),
                &mut RngStream::new(s.data_seed, 0),
            )?;
            Simulated {
                data: Dataset::Counts(data.counts),
                truth,
                names: SEIR_NAMES.to_vec(),
            }
        }
    })
}

/// Loads the configured data file, or simulates when there is none.
pub fn dataset(cfg: &ExperimentConfig, point: &GridPoint) -> Result<Dataset> {
    let path = match &cfg.model {
        ModelConfig::NoisyAr { data, .. } | ModelConfig::Sv { data, .. } => data.as_ref(),
        ModelConfig::Seir(s) => s.data.as_ref(),
        ModelConfig::Mvn { .. } => return Ok(Dataset::None),
    };
    let data = match (path, &cfg.model) {
        (Some(p), ModelConfig::Seir(_)) => Dataset::Counts(data::read_counts(p)?),
        (Some(p), _) => Dataset::Series(data::read_series(p)?),
        (None, _) => simulate(cfg, point)?.data,
    };
    let (len, horizon) = match (&data, &cfg.model) {
        (Dataset::Series(y), ModelConfig::NoisyAr { horizon, .. } | ModelConfig::Sv { horizon, .. }) => (y.len(), *horizon),
        (Dataset::Counts(c), ModelConfig::Seir(s)) => (c.len(), s.horizon),
        _ => return Ok(data),
    };
    if len != horizon {
        return Err(CliError::data(
            path.cloned().unwrap_or_default(),
            format!("{len} observations but model.horizon = {horizon}"),
        ));
    }
    Ok(data)
}

/// Names of the state coordinates, used as CSV column suffixes.
pub fn state_names(cfg: &ExperimentConfig, point: &GridPoint) -> Vec<String> {
    match &cfg.model {
        ModelConfig::NoisyAr { .. } | ModelConfig::Sv { .. } => vec!["x".into()],
        ModelConfig::Mvn { dim, .. } => (1..=point.dim.unwrap_or(dim.values()[0])).map(|j| j.to_string()).collect(),
        ModelConfig::Seir(_) => SEIR_NAMES.iter().map(|s| s.to_string()).collect(),
    }
}

fn run_config(cfg: &ExperimentConfig, n: usize) -> RunConfig<f64> {
    let mut rc = RunConfig::new(n, cfg.n_iters)
        .with_burn_in(cfg.burn_in)
        .with_thin(cfg.thin)
        .with_selector(match cfg.algorithm.selector {
            SelectorConfig::Bs => PathSelector::BackwardSampling,
            SelectorConfig::At => PathSelector::AncestorTracing,
        });
    rc.stability = match cfg.algorithm.stability {
        StabilityConfig::Off => Stability::Off,
        StabilityConfig::Project { epsilon } => Stability::Project { epsilon },
        StabilityConfig::Reject { epsilon } => Stability::Reject { epsilon },
    };
    rc
}

fn scheme_for<M: FeynmanKac<f64>>(cfg: &ExperimentConfig, point: &GridPoint, model: &M, x1: &[f64]) -> InitScheme<f64> {
    let a = &cfg.algorithm;
    let free = model.initial().domain().to_free(x1);
    let target = point.alpha_target.unwrap_or(DEFAULT_ALPHA_TARGET);
    match a.kind {
        AlgorithmKind::CpfBs | AlgorithmKind::DpgBs => InitScheme::ExactM1,
        AlgorithmKind::Cn => InitScheme::CrankNicolson {
            beta: point.beta.unwrap_or(0.5),
        },
        AlgorithmKind::AdaptiveCn => InitScheme::adaptive_cn(target),
        AlgorithmKind::Rw => InitScheme::RandomWalk {
            cov: Matrix::identity(free.len()).scaled(a.rw_scale * a.rw_scale),
        },
        AlgorithmKind::Am => {
            let state = AmState::new(free);
            InitScheme::Am(match a.am_scale {
                Some(c) => state.with_scale(c),
                None => state,
            })
        }
        AlgorithmKind::Aswam => InitScheme::aswam(free, target),
    }
}

fn sample_fixed<M: FeynmanKac<f64>>(
    cfg: &ExperimentConfig,
    point: &GridPoint,
    model: &M,
    x0: Trajectory<f64>,
    rng: &mut RngStream,
) -> diffcpf::Result<Vec<ChainRecord64>> {
    let rc = run_config(cfg, point.n_particles);
    if cfg.algorithm.kind == AlgorithmKind::DpgBs {
        let free = model.initial().domain().free_dim(model.state_dim());
        return dpg_bs_run(x0, model, &mut RamState::new(free), &rc, rng);
    }
    let mut scheme = scheme_for(cfg, point, model, x0.state(0));
    aai_cpf_run(x0, &mut scheme, model, &rc, rng)
}

/// Runs one chain.
pub fn run_chain(cfg: &ExperimentConfig, spec: &RunSpec, data: &Dataset) -> diffcpf::Result<Vec<ChainRecord64>> {
    let mut rng = RngStream::new(spec.seed, 0);
    let point = &spec.point;
    let series = || match data {
        Dataset::Series(y) => y.clone(),
        _ => Vec::new(),
    };
    match &cfg.model {
        ModelConfig::NoisyAr {
            rho,
            sigma_x,
            sigma_y,
            x1,
            ..
        } => {
            let params = NoisyArParams {
                rho: *rho,
                sigma_x: point.sigma_x.unwrap_or(sigma_x.values()[0]),
                sigma_y: *sigma_y,
                initial: point.sigma_1.map_or(InitialSpread::Flat, |sd| InitialSpread::Gaussian { sd }),
            };
            let model = make_noisy_ar(params, series())?;
            let x0 = initial_reference(&model, &[*x1], 100, &mut rng)?;
            sample_fixed(cfg, point, &model, x0, &mut rng)
        }
        ModelConfig::Sv {
            sigma_x, sigma_y, sigma_1, ..
        } => {
            let params = SvParams {
                sigma_x: point.sigma_x.unwrap_or(sigma_x.values()[0]),
                sigma_y: *sigma_y,
                sigma_1: *sigma_1,
            };
            let model = make_sv(params, series())?;
            let x0 = initial_reference(&model, &[0.0], 100, &mut rng)?;
            sample_fixed(cfg, point, &model, x0, &mut rng)
        }
        ModelConfig::Mvn { dim, sigma } => {
            let d = point.dim.unwrap_or(dim.values()[0]);
            let model = make_mvn_static(MvnStaticParams { dim: d, sigma: *sigma })?;
            sample_fixed(cfg, point, &model, Trajectory::from_flat(d, vec![0.0; d]), &mut rng)
        }
        ModelConfig::Seir(s) => {
            let counts = match data {
                Dataset::Counts(c) => c.clone(),
                _ => Vec::new(),
            };
            let hyper = SeirHyper {
                base: seir_params(s),
                counts,
            };
            let theta0 = vec![s.sigma.ln(), logit(s.p)];
            let model = hyper.build(&theta0)?;
            let (e1, i1, r0) = s.start;
            let params = hyper.base;
            let x1 = vec![
                params.popsize as f64 - e1.round() - i1.round(),
                e1.round(),
                i1.round(),
                0.0,
                logit(r0 / params.r0_max),
            ];
            let x0 = initial_reference(&model, &x1, 100, &mut rng)?;
            if !s.estimate_theta {
                return sample_fixed(cfg, point, &model, x0, &mut rng);
            }
            let mut scheme = scheme_for(cfg, point, &model, x0.state(0));
            let mut ram = RamState::new(2);
            aai_pg_run(theta0, x0, &hyper, &mut ram, &mut scheme, &run_config(cfg, point.n_particles), &mut rng)
        }
    }
}

/// One row of the statistics file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub experiment: String,
    pub replicate: usize,
    pub variable: String,
    pub n: usize,
    pub iact: f64,
    pub neff: f64,
    pub ire: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

pub fn stat_series(records: &[ChainRecord64], stat: StatVariable) -> Vec<f64> {
    records
        .iter()
        .map(|r| match stat {
            StatVariable::X1 => r.trajectory.state(0)[0],
            StatVariable::XT => r.trajectory.state(r.trajectory.len() - 1)[0],
            StatVariable::Theta0 => r.theta.as_ref().map_or(f64::NAN, |t| t[0]),
        })
        .collect()
}

pub fn stats_row(cfg: &ExperimentConfig, spec: &RunSpec, series: &[f64]) -> diffcpf::Result<StatsRow> {
    let s = chain_stats(series, spec.point.n_particles)?;
    Ok(StatsRow {
        experiment: format!("{}:{}", cfg.name, spec.point.label()),
        replicate: spec.replicate,
        variable: cfg.stat.name().to_string(),
        n: s.n,
        iact: s.iact.value,
        neff: s.neff,
        ire: s.ire,
        ci_lo: s.mean_ci.lo,
        ci_hi: s.mean_ci.hi,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub id: String,
    pub label: String,
    pub replicate: usize,
    /// Stored as a string: TOML integers are signed 64-bit.
    #[serde(with = "seed_string")]
    pub seed: u64,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

mod seed_string {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&seed.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

impl RunEntry {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Everything an output directory records about a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub runs: Vec<RunEntry>,
}

pub const MANIFEST: &str = "manifest.toml";
pub const STATS: &str = "stats.csv";

impl Manifest {
    pub fn to_toml(&self) -> String {
        let mut table = toml::Table::try_from(&self.config).expect("config serialises");
        let runs = toml::Value::try_from(&self.runs).expect("runs serialise");
        table.insert("runs".into(), runs);
        toml::to_string(&table).expect("manifest serialises")
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST);
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let config = crate::config::parse_config(&text, &path.display().to_string(), Some(dir))?;
        #[derive(Deserialize)]
        struct Runs {
            #[serde(default)]
            runs: Vec<RunEntry>,
        }
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::data(&path, e))?;
        let mut runs_only = toml::Table::new();
        if let Some(r) = table.get("runs") {
            runs_only.insert("runs".into(), r.clone());
        }
        let runs: Runs = toml::Value::Table(runs_only)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::data(&path, e))?;
        Ok(Self { config, runs: runs.runs })
    }
}

/// Worker count: explicit value, then `DIFFCPF_WORKERS`, then the config,
/// then the number of available CPUs.
pub fn resolve_workers(flag: Option<usize>, cfg: &ExperimentConfig) -> Result<usize> {
    if let Some(w) = flag {
        return positive_workers(w, "--workers");
    }
    if let Ok(v) = std::env::var("DIFFCPF_WORKERS") {
        let w = v.trim().parse().map_err(|_| ConfigError::Invalid {
            field: "DIFFCPF_WORKERS".into(),
            msg: format!("not a positive integer: {v:?}"),
        })?;
        return positive_workers(w, "DIFFCPF_WORKERS");
    }
    Ok(cfg
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
}

fn positive_workers(w: usize, field: &str) -> Result<usize> {
    if w == 0 {
        return Err(ConfigError::Invalid {
            field: field.into(),
            msg: "must be at least 1".into(),
        }
        .into());
    }
    Ok(w)
}

fn chain_columns(cfg: &ExperimentConfig) -> PathColumns {
    if cfg.save_paths {
        PathColumns::All
    } else {
        PathColumns::Ends
    }
}

type Executed = std::result::Result<(std::result::Result<StatsRow, String>, String), String>;

/// Runs and stores one chain. A chain too short for the statistics is kept;
/// the statistics error is returned alongside it.
fn execute(cfg: &ExperimentConfig, spec: &RunSpec, out: &Path) -> Executed {
    let data = dataset(cfg, &spec.point).map_err(|e| e.to_string())?;
    let records = run_chain(cfg, spec, &data).map_err(|e| e.to_string())?;
    let rel = format!("chains/{}.csv", spec.id);
    let names = state_names(cfg, &spec.point);
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    data::write_chain(&out.join(&rel), &records, &names, chain_columns(cfg)).map_err(|e| e.to_string())?;
    let row = stats_row(cfg, spec, &stat_series(&records, cfg.stat)).map_err(|e| format!("statistics: {e}"));
    Ok((row, rel))
}

pub fn write_stats(path: &Path, rows: &[StatsRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::data(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::data(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_stats(path: &Path) -> Result<Vec<StatsRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::data(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(|e| CliError::data(path, e)))
        .collect()
}

/// Summary of a finished grid.
#[derive(Debug)]
pub struct ExperimentOutput {
    pub manifest: Manifest,
    pub stats: Vec<StatsRow>,
    pub out_dir: PathBuf,
}

impl ExperimentOutput {
    pub fn failed(&self) -> usize {
        self.manifest.runs.iter().filter(|r| !r.ok()).count()
    }
}

/// Runs the whole grid on `workers` threads and writes chains, the
/// statistics file and the manifest to `out`. Failed runs are recorded in
/// the manifest and do not stop the others.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path, workers: usize) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let chains = out.join("chains");
    std::fs::create_dir_all(&chains).map_err(|e| CliError::io(&chains, e))?;
    let specs = expand_grid(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::data(out, e))?;
    let results: Vec<_> = pool.install(|| specs.par_iter().map(|s| execute(cfg, s, out)).collect());
    let mut stats = Vec::new();
    let mut runs = Vec::with_capacity(specs.len());
    for (spec, res) in specs.iter().zip(results) {
        let mut entry = RunEntry {
            id: spec.id.clone(),
            label: spec.point.label(),
            replicate: spec.replicate,
            seed: spec.seed,
            status: "ok".into(),
            chain: None,
            error: None,
        };
        match res {
            Ok((row, rel)) => {
                match row {
                    Ok(row) => stats.push(row),
                    Err(msg) => entry.error = Some(msg),
                }
                entry.chain = Some(rel);
            }
            Err(msg) => {
                entry.status = "failed".into();
                entry.error = Some(msg);
            }
        }
        runs.push(entry);
    }
    write_stats(&out.join(STATS), &stats)?;
    let mut stored = cfg.clone();
    // The stored config is complete, so it must not be layered over the
    // preset again when read back.
    stored.preset = None;
    stored.full_grid = false;
    stored.workers = None;
    let manifest = Manifest { config: stored, runs };
    let path = out.join(MANIFEST);
    std::fs::write(&path, manifest.to_toml()).map_err(|e| CliError::io(&path, e))?;
    Ok(ExperimentOutput {
        manifest,
        stats,
        out_dir: out.to_path_buf(),
    })
}

/// Recomputes the statistics file of an output directory from its chains.
pub fn recompute_stats(out: &Path) -> Result<Vec<StatsRow>> {
    let manifest = Manifest::read(out)?;
    let cfg = &manifest.config;
    let specs = expand_grid(cfg);
    let mut rows = Vec::new();
    for (spec, entry) in specs.iter().zip(&manifest.runs) {
        let Some(rel) = entry.chain.as_ref().filter(|_| entry.ok()) else {
            continue;
        };
        let path = out.join(rel);
        let column = match cfg.stat {
            StatVariable::Theta0 => "theta0".to_string(),
            stat => {
                let names = state_names(cfg, &spec.point);
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                let k = match (stat, &cfg.model) {
                    (StatVariable::X1, _) => 0,
                    (_, ModelConfig::NoisyAr { horizon, .. } | ModelConfig::Sv { horizon, .. }) => horizon - 1,
                    (_, ModelConfig::Seir(s)) => s.horizon - 1,
                    (_, ModelConfig::Mvn { .. }) => 0,
                };
                data::state_column(k, 0, &names)
            }
        };
        let series = data::read_chain_column(&path, &column)?;
        if let Ok(row) = stats_row(cfg, spec, &series) {
            rows.push(row);
        }
    }
    write_stats(&out.join(STATS), &rows)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn grid_skips_axes_the_algorithm_ignores() {
        let cfg = parse_config("preset = \"fdi-grid\"\n[algorithm]\nkind = \"dpg-bs\"", "t", None).unwrap();
        let specs = expand_grid(&cfg);
        // sigma_x x n_particles x replicates
        assert_eq!(specs.len(), 2 * 2 * 2);
        assert!(specs.iter().all(|s| s.point.alpha_target.is_none()));
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let cfg = parse_config("preset = \"dgi-grid\"", "t", None).unwrap();
        let a = expand_grid(&cfg);
        let b = expand_grid(&cfg);
        assert_eq!(a, b);
        let mut seeds: Vec<u64> = a.iter().map(|s| s.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), a.len());
    }

    #[test]
    fn r0_schedule_is_piecewise_constant() {
        let s = [(0, 2.5), (30, 1.2), (60, 0.8)];
        assert_eq!(r0_at(&s, 0), 2.5);
        assert_eq!(r0_at(&s, 29), 2.5);
        assert_eq!(r0_at(&s, 30), 1.2);
        assert_eq!(r0_at(&s, 119), 0.8);
    }
}
