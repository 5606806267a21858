use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use diffcpf::drivers::SeirHyper;
use diffcpf::RngStream;
use diffcpf_cli::config::{load_config, ExperimentConfig, ModelConfig};
use diffcpf_cli::error::{CliError, ConfigError, Result};
use diffcpf_cli::predictive::{posterior_predictive, predictive_band};
use diffcpf_cli::runner::{self, Dataset, Manifest, StatsRow};
use diffcpf_cli::{data, presets};

#[derive(Parser)]
#[command(name = "diffcpf", version, about = "Run conditional particle filter experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a data set from the configured model.
    Simulate {
        /// Config file or preset name.
        #[arg(long)]
        config: String,
        /// Overrides the model's data seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every grid point and replicate of an experiment.
    Run {
        /// Config file or preset name.
        #[arg(long)]
        config: String,
        /// Overrides the experiment's root seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "DIFFCPF_WORKERS")]
        workers: Option<usize>,
        /// Output directory; defaults to `runs/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute and print the statistics of an output directory.
    Stats {
        #[arg(long)]
        out: PathBuf,
    },
    /// Posterior predictive counts for the SEIR runs of an output directory.
    Predictive {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// List the built-in presets.
    Presets,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors; bad arguments are
            // configuration errors.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate { config, seed, out } => simulate(load_config(&config)?, seed, &out),
        Command::Run {
            config,
            seed,
            workers,
            out,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let workers = runner::resolve_workers(workers, &cfg)?;
            let out = out.unwrap_or_else(|| Path::new("runs").join(&cfg.name));
            let result = runner::run_experiment(&cfg, &out, workers)?;
            print_stats(&result.stats);
            eprintln!("wrote {}", out.display());
            match result.failed() {
                0 => Ok(()),
                failed => Err(CliError::RunsFailed {
                    failed,
                    total: result.manifest.runs.len(),
                }),
            }
        }
        Command::Stats { out } => {
            print_stats(&runner::recompute_stats(&out)?);
            Ok(())
        }
        Command::Predictive { out, seed } => predictive(&out, seed),
        Command::Presets => {
            for p in presets::PRESETS {
                println!("{}{}", p.name, if p.full.is_some() { " (has full grid)" } else { "" });
            }
            Ok(())
        }
    }
}

fn simulate(mut cfg: ExperimentConfig, seed: Option<u64>, out: &Path) -> Result<()> {
    if let Some(s) = seed {
        match &mut cfg.model {
            ModelConfig::NoisyAr { data_seed, .. } | ModelConfig::Sv { data_seed, .. } => *data_seed = s,
            ModelConfig::Seir(c) => c.data_seed = s,
            ModelConfig::Mvn { .. } => {}
        }
    }
    std::fs::create_dir_all(out).map_err(|e| CliError::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    let point = runner::expand_grid(&cfg).remove(0).point;
    let sim = runner::simulate(&cfg, &point)?;
    match &sim.data {
        Dataset::Series(y) => data::write_series(&out.join("data.csv"), y)?,
        Dataset::Counts(c) => data::write_counts(&out.join("data.csv"), c)?,
        Dataset::None => {}
    }
    data::write_truth(&out.join("truth.csv"), &sim.truth, &sim.names)?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn print_stats(rows: &[StatsRow]) {
    println!("{:<60} {:>4} {:>10} {:>10} {:>12}", "experiment", "rep", "iact", "neff", "ire");
    for r in rows {
        println!(
            "{:<60} {:>4} {:>10.2} {:>10.1} {:>12.1}",
            r.experiment, r.replicate, r.iact, r.neff, r.ire
        );
    }
}

fn predictive(out: &Path, seed: u64) -> Result<()> {
    let manifest = Manifest::read(out)?;
    let cfg = &manifest.config;
    let ModelConfig::Seir(seir) = &cfg.model else {
        return Err(ConfigError::Invalid {
            field: "model.kind".into(),
            msg: "posterior predictive needs a seir experiment".into(),
        }
        .into());
    };
    if !cfg.save_paths {
        return Err(ConfigError::Invalid {
            field: "save_paths".into(),
            msg: "the chains must store full paths".into(),
        }
        .into());
    }
    let dir = out.join("predictive");
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io {
        path: dir.clone(),
        source: e,
    })?;
    let specs = runner::expand_grid(cfg);
    for (spec, entry) in specs.iter().zip(&manifest.runs) {
        let Some(rel) = entry.chain.as_ref().filter(|_| entry.ok()) else {
            continue;
        };
        let observed = match runner::dataset(cfg, &spec.point)? {
            Dataset::Counts(c) => c,
            _ => unreachable!("seir data are counts"),
        };
        let records = data::read_chain(&out.join(rel), seir.horizon, &runner::SEIR_NAMES)?;
        let hyper = SeirHyper {
            base: runner::seir_params(seir),
            counts: observed.clone(),
        };
        let draws = posterior_predictive(&records, &hyper, &mut RngStream::new(seed, spec.index as u64));
        let band = predictive_band(&draws, 0.025, 0.975);
        let path = dir.join(format!("{}.csv", spec.id));
        write_band(&path, &observed, &draws, &band)?;
        let covered = observed
            .iter()
            .zip(&band)
            .filter(|(y, (lo, hi))| (lo..=hi).contains(y))
            .count();
        println!(
            "{}: 95% band covers {covered}/{} observed counts",
            spec.id,
            observed.len()
        );
    }
    Ok(())
}

fn write_band(path: &Path, observed: &[u64], draws: &[Vec<u64>], band: &[(u64, u64)]) -> Result<()> {
    let mut text = String::from("date,count,mean,lo,hi\n");
    for (k, (y, (lo, hi))) in observed.iter().zip(band).enumerate() {
        let mean = draws.iter().map(|d| d[k] as f64).sum::<f64>() / draws.len().max(1) as f64;
        text.push_str(&format!("{},{y},{mean},{lo},{hi}\n", k + 1));
    }
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}
