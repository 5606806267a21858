use std::path::Path;
use std::process::Command;

use diffcpf_cli::config::{parse_config, ModelConfig};
use diffcpf_cli::data;
use diffcpf_cli::error::CliError;
use diffcpf_cli::runner::{expand_grid, read_stats, recompute_stats, run_experiment, Manifest, STATS};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_diffcpf"));
    c.env_remove("DIFFCPF_WORKERS");
    c
}

fn small(preset: &str, extra: &str) -> String {
    format!("preset = \"{preset}\"\nn_iters = 300\nburn_in = 50\n{extra}")
}

#[test]
fn fig1_gives_one_row_per_prior_scale() {
    let cfg = parse_config(&small("fig1", ""), "t", None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&cfg, dir.path(), 2).unwrap();
    assert_eq!(out.failed(), 0);
    assert_eq!(out.stats.len(), 3);
    let labels: Vec<_> = out.stats.iter().map(|r| r.experiment.clone()).collect();
    assert!(labels[0].contains("sigma_1=10/"), "{labels:?}");
    assert!(labels[2].contains("sigma_1=1000/"), "{labels:?}");
    assert!(out.stats.iter().all(|r| r.n == 250 && r.iact >= 1.0));
    assert_eq!(read_stats(&dir.path().join(STATS)).unwrap(), out.stats);
}

#[test]
fn burn_in_not_below_iterations_is_a_config_error() {
    let err = parse_config("preset = \"fig1\"\nn_iters = 100\nburn_in = 100", "t", None).unwrap_err();
    assert!(err.to_string().contains("n_iters"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.toml");
    std::fs::write(&file, "preset = \"fig1\"\nn_iters = 100\nburn_in = 100\n").unwrap();
    let status = bin()
        .args(["run", "--config", file.to_str().unwrap(), "--out"])
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&status.stderr).contains("n_iters"));
}

#[test]
fn worker_count_does_not_change_output() {
    let cfg = parse_config(&small("fdi-grid", "replicates = 1\n"), "t", None).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run_experiment(&cfg, a.path(), 1).unwrap();
    let rb = run_experiment(&cfg, b.path(), 8).unwrap();
    assert_eq!(ra.manifest, rb.manifest);
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&a.path().join(STATS)), read(&b.path().join(STATS)));
    for run in &ra.manifest.runs {
        let rel = run.chain.as_ref().unwrap();
        assert_eq!(read(&a.path().join(rel)), read(&b.path().join(rel)), "{rel}");
    }
}

#[test]
fn grid_covers_every_combination_once() {
    let cfg = parse_config(&small("fdi-grid", ""), "t", None).unwrap();
    let specs = expand_grid(&cfg);
    // sigma_x x n_particles x alpha_target x replicates
    assert_eq!(specs.len(), 2 * 2 * 6 * 2);
    let mut keys: Vec<_> = specs.iter().map(|s| (s.point.label(), s.replicate)).collect();
    keys.sort();
    keys.dedup();
    assert_eq!(keys.len(), specs.len());
    for sx in [0.1, 1.0] {
        for n in [16, 64] {
            for a in [0.05, 0.25, 0.45, 0.65, 0.8, 0.95] {
                let hits = specs
                    .iter()
                    .filter(|s| s.point.sigma_x == Some(sx) && s.point.n_particles == n && s.point.alpha_target == Some(a))
                    .count();
                assert_eq!(hits, 2);
            }
        }
    }
}

#[test]
fn manifest_round_trips_and_reruns_identically() {
    let cfg = parse_config(&small("mvn-grid", "replicates = 1\n"), "t", None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&cfg, dir.path(), 2).unwrap();
    let back = Manifest::read(dir.path()).unwrap();
    assert_eq!(back, out.manifest);

    let again = tempfile::tempdir().unwrap();
    let rerun = run_experiment(&back.config, again.path(), 1).unwrap();
    assert_eq!(rerun.stats, out.stats);

    // the stats subcommand reproduces the file from the chains
    assert_eq!(recompute_stats(dir.path()).unwrap(), out.stats);
}

#[test]
fn simulate_then_run_on_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let st = bin()
        .args(["simulate", "--config", "fig1", "--out"])
        .arg(&sim)
        .status()
        .unwrap();
    assert!(st.success());
    let y = data::read_series(&sim.join("data.csv")).unwrap();
    assert_eq!(y.len(), 50);

    let cfg_path = dir.path().join("cfg.toml");
    std::fs::write(
        &cfg_path,
        "preset = \"fig1\"\nname = \"from-file\"\nn_iters = 200\nburn_in = 20\n[model]\nsigma_1 = 10.0\ndata = \"sim/data.csv\"\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let st = bin()
        .args(["run", "--config", cfg_path.to_str().unwrap(), "--workers", "1", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let m = Manifest::read(&out).unwrap();
    match &m.config.model {
        ModelConfig::NoisyAr { data, .. } => assert!(data.as_ref().unwrap().is_absolute()),
        _ => unreachable!(),
    }
    assert_eq!(m.runs.len(), 1);
}

#[test]
fn bad_data_file_fails_the_run_not_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("short.csv");
    std::fs::write(&data, "t,y\n1,0.5\n2,0.1\n").unwrap();
    let text = format!(
        "{}[model]\ndata = {:?}\n",
        small("fig1", ""),
        data.to_str().unwrap()
    );
    let cfg = parse_config(&text, "t", None).unwrap();
    let out = run_experiment(&cfg, &dir.path().join("o"), 1).unwrap();
    assert_eq!(out.failed(), 3);
    assert!(out.manifest.runs.iter().all(|r| r.error.as_deref().unwrap().contains("horizon")));
    let err = CliError::RunsFailed { failed: 3, total: 3 };
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn seir_predictive_has_one_row_per_day() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("seir.toml");
    std::fs::write(
        &cfg_path,
        "preset = \"seir\"\nn_iters = 120\nburn_in = 20\nthin = 5\n[model]\nhorizon = 30\n[algorithm]\nn_particles = 16\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let st = bin()
        .args(["run", "--config", cfg_path.to_str().unwrap(), "--out"])
        .arg(&out)
        .env("DIFFCPF_WORKERS", "1")
        .output()
        .unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let st = bin().args(["predictive", "--out"]).arg(&out).output().unwrap();
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let m = Manifest::read(&out).unwrap();
    assert!(m.runs[0].ok());
    assert!(m.runs[0].error.as_deref().unwrap().contains("too short"));
    let band = std::fs::read_to_string(out.join("predictive").join(format!("{}.csv", m.runs[0].id))).unwrap();
    assert_eq!(band.lines().count(), 31);
    let chain = data::read_chain(&out.join(m.runs[0].chain.as_ref().unwrap()), 30, &["S", "E", "I", "R", "rho"]).unwrap();
    assert_eq!(chain.len(), 20);
    assert!(chain.iter().all(|r| r.theta.as_ref().map(Vec::len) == Some(2)));
}

#[test]
fn bad_worker_env_is_a_config_error() {
    let st = bin()
        .args(["run", "--config", "fig1"])
        .env("DIFFCPF_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(1));
}
