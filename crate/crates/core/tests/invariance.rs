mod common;

use common::rw_model;
use diffcpf::diagnostics::ks::ks_normal;
use diffcpf::engine::{ai_cpf_step, PathSelector};
use diffcpf::fk::{Domain, Dynamics, FeynmanKac};
use diffcpf::kernels::{CrankNicolsonKernel, InitKernel, RandomWalkKernel};
use diffcpf::linalg::Matrix;
use diffcpf::models::{ffbs_sample, kalman_filter, kalman_smoother, InitialSpread, NoisyAr};
use diffcpf::RngStream;

fn one_step_passes<K: InitKernel<f64>>(model: &NoisyAr<f64>, kernel: &K, selector: PathSelector, seed: u64) {
    let filter = kalman_filter(model);
    let smooth = kalman_smoother(model);
    let t = model.horizon();
    let mut rng = RngStream::new(seed, 0);
    let mut first = Vec::new();
    let mut last = Vec::new();
    for _ in 0..4000 {
        let x = ffbs_sample(model, &filter, &mut rng);
        let (y, _) = ai_cpf_step(&x, kernel, model, selector, 6, &mut rng).unwrap();
        first.push(y.state(0)[0]);
        last.push(y.state(t - 1)[0]);
    }
    for (xs, k) in [(&first, 0), (&last, t - 1)] {
        let ks = ks_normal(xs, smooth.means[k], smooth.vars[k].sqrt());
        assert!(ks.p_value > 1e-3, "{selector:?} time {k}: p {}", ks.p_value);
    }
}

#[test]
fn crank_nicolson_step_preserves_smoothing_law() {
    let model = rw_model(8, InitialSpread::Gaussian { sd: 3.0 }, 1.0, 31);
    let kernel = CrankNicolsonKernel::from_gaussian(model.initial().gaussian().unwrap(), 0.4).unwrap();
    one_step_passes(&model, &kernel, PathSelector::BackwardSampling, 1);
    one_step_passes(&model, &kernel, PathSelector::AncestorTracing, 2);
}

#[test]
fn random_walk_step_preserves_smoothing_law() {
    let model = rw_model(8, InitialSpread::Flat, 1.0, 32);
    let kernel = RandomWalkKernel::new(Matrix::from_diag(&[0.5]), Domain::All).unwrap();
    one_step_passes(&model, &kernel, PathSelector::BackwardSampling, 3);
    one_step_passes(&model, &kernel, PathSelector::AncestorTracing, 4);
}
