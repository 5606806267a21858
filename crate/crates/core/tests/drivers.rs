mod common;

use common::{rw_model, sample_mean_sd};
use diffcpf::adapt::RamState;
use diffcpf::diagnostics::iact;
use diffcpf::diagnostics::ks::ks_normal;
use diffcpf::drivers::{aai_cpf_run, aai_pg_run, dpg_bs_run, HyperModel, InitScheme, NoisyArSigmaX, RunConfig};
use diffcpf::fk::{categorical_sample, Trajectory};
use diffcpf::models::{ffbs_sample, kalman_filter, kalman_smoother, InitialSpread, NoisyArParams};
use diffcpf::RngStream;

fn x1_iact(recs: &[diffcpf::ChainRecord64]) -> f64 {
    let chain: Vec<f64> = recs.iter().map(|r| r.trajectory.state(0)[0]).collect();
    iact(&chain).unwrap().value
}

#[test]
fn dpg_step_preserves_smoothing_law() {
    let model = rw_model(6, InitialSpread::Flat, 1.0, 50);
    let filter = kalman_filter(&model);
    let smooth = kalman_smoother(&model);
    let mut rng = RngStream::new(51, 0);
    let cfg = RunConfig::new(4, 1);
    let (mut first, mut last) = (Vec::new(), Vec::new());
    for _ in 0..10_000 {
        let x = ffbs_sample(&model, &filter, &mut rng);
        let mut ram = RamState::new(1).frozen();
        let recs = dpg_bs_run(x, &model, &mut ram, &cfg, &mut rng).unwrap();
        first.push(recs[0].trajectory.state(0)[0]);
        last.push(recs[0].trajectory.state(5)[0]);
    }
    assert!(ks_normal(&first, smooth.means[0], smooth.vars[0].sqrt()).p_value > 1e-3);
    assert!(ks_normal(&last, smooth.means[5], smooth.vars[5].sqrt()).p_value > 1e-3);
}

#[test]
fn pg_step_preserves_joint_posterior() {
    let truth = NoisyArParams::random_walk(0.8, 1.0, InitialSpread::Gaussian { sd: 2.0 });
    let (y, _) = diffcpf::models::simulate_noisy_ar(&truth, 6, 0.0, &mut RngStream::new(52, 0)).unwrap();
    let hyper = NoisyArSigmaX {
        base: truth,
        y,
        prior_mean: 0.0,
        prior_sd: 0.5,
    };
    // exact joint draws: theta from a fine grid, then x given theta
    let grid: Vec<f64> = (0..=4000).map(|i| -2.5 + 5.0 * i as f64 / 4000.0).collect();
    let logp: Vec<f64> = grid
        .iter()
        .map(|&th| kalman_filter(&hyper.build(&[th]).unwrap()).log_likelihood + hyper.log_prior(&[th]))
        .collect();
    let top = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = logp.iter().map(|l| (l - top).exp()).sum();
    let probs: Vec<f64> = logp.iter().map(|l| (l - top).exp() / z).collect();
    let mut rng = RngStream::new(53, 0);
    let cfg = RunConfig::new(4, 1);
    let (mut before, mut after) = (Vec::new(), Vec::new());
    for _ in 0..10_000 {
        let th = grid[categorical_sample(&mut rng, &probs)];
        let model = hyper.build(&[th]).unwrap();
        let x = ffbs_sample(&model, &kalman_filter(&model), &mut rng);
        let mut ram = RamState::new(1).frozen();
        let recs = aai_pg_run(vec![th], x, &hyper, &mut ram, &mut InitScheme::ExactM1, &cfg, &mut rng).unwrap();
        before.push(th);
        after.push(recs[0].theta.as_ref().unwrap()[0]);
    }
    let ks = diffcpf::diagnostics::ks::ks_two_sample(&before, &after);
    assert!(ks.p_value > 1e-3, "p {}", ks.p_value);
}

#[test]
fn dpg_block_tracks_ram_target_under_weak_coupling() {
    let model = rw_model(10, InitialSpread::Flat, 10.0, 54);
    let mut ram = RamState::new(1);
    let cfg = RunConfig::new(8, 8000).with_burn_in(2000);
    let recs = dpg_bs_run(Trajectory::from_scalars(&[0.0; 10]), &model, &mut ram, &cfg, &mut RngStream::new(55, 0)).unwrap();
    let acc = recs.iter().filter(|r| r.block_accepted == Some(true)).count() as f64 / recs.len() as f64;
    assert!((acc - 0.441).abs() < 0.05, "acc {acc}");
}

#[test]
fn adapted_beta_is_near_sweep_optimum() {
    let model = rw_model(20, InitialSpread::Gaussian { sd: 50.0 }, 1.0, 56);
    let x0 = Trajectory::from_scalars(&[0.0; 20]);
    let n = 64;
    let mut scheme = InitScheme::adaptive_cn(0.8);
    aai_cpf_run(x0.clone(), &mut scheme, &model, &RunConfig::new(n, 3000), &mut RngStream::new(57, 0)).unwrap();
    let beta = scheme.summary().beta.unwrap();
    let run = |beta: f64, seed: u64| {
        let mut fixed = InitScheme::CrankNicolson { beta };
        let cfg = RunConfig::new(n, 6500).with_burn_in(500);
        x1_iact(&aai_cpf_run(x0.clone(), &mut fixed, &model, &cfg, &mut RngStream::new(seed, 0)).unwrap())
    };
    let sweep: Vec<f64> = [0.005, 0.01, 0.02, 0.04, 0.08, 0.16, 0.32]
        .iter()
        .enumerate()
        .map(|(i, &b)| run(b, 60 + i as u64))
        .collect();
    let best = sweep.iter().cloned().fold(f64::INFINITY, f64::min);
    let adapted = run(beta, 70);
    assert!(adapted <= 2.0 * best, "beta {beta}: iact {adapted} vs sweep {sweep:?}");
}

#[test]
fn am_and_aswam_agree_with_kalman_on_flat_prior() {
    let model = rw_model(10, InitialSpread::Flat, 1.0, 58);
    let oracle = kalman_smoother(&model).means[0];
    let x0 = Trajectory::from_scalars(&[0.0; 10]);
    for (i, mut scheme) in [InitScheme::am(vec![0.0]), InitScheme::aswam(vec![0.0], 0.8)].into_iter().enumerate() {
        let cfg = RunConfig::new(16, 11_000).with_burn_in(1000);
        let recs = aai_cpf_run(x0.clone(), &mut scheme, &model, &cfg, &mut RngStream::new(59 + i as u64, 0)).unwrap();
        let chain: Vec<f64> = recs.iter().map(|r| r.trajectory.state(0)[0]).collect();
        let (m, sd) = sample_mean_sd(&chain);
        let se = sd * (iact(&chain).unwrap().value / chain.len() as f64).sqrt();
        assert!((m - oracle).abs() < 4.0 * se, "scheme {i}: {m} vs {oracle}");
    }
}
