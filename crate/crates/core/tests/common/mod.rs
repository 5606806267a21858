#![allow(dead_code)]

use diffcpf::fk::{Dynamics, FeynmanKac, InitialMeasure};
use diffcpf::models::{make_noisy_ar, simulate_noisy_ar, InitialSpread, NoisyAr, NoisyArParams};
use diffcpf::real::normal_log_pdf;
use diffcpf::{Real, RngStream};

/// Noisy random walk with unit noises and data simulated from `x1 = 0`.
pub fn rw_model(t: usize, initial: InitialSpread<f64>, sigma_x: f64, seed: u64) -> NoisyAr<f64> {
    let params = NoisyArParams::random_walk(sigma_x, 1.0, initial);
    let (y, _) = simulate_noisy_ar(&params, t, 0.0, &mut RngStream::new(seed, 0)).unwrap();
    make_noisy_ar(params, y).unwrap()
}

/// Two-step model with a potential coupling both states, so backward
/// weights do not factorise.
pub struct Coupled {
    pub m1: InitialMeasure<f64>,
}

impl Coupled {
    pub fn new() -> Self {
        Self {
            m1: InitialMeasure::Uniform(diffcpf::fk::Domain::All),
        }
    }

    pub fn log_backward_factor(&self, x1: f64, x2: f64) -> f64 {
        normal_log_pdf(x2, 0.5 * x1, 1.0) + 0.3 * x1 * x2
    }
}

impl Dynamics<f64> for Coupled {
    fn horizon(&self) -> usize {
        2
    }
    fn state_dim(&self) -> usize {
        1
    }
    fn sample_transition(&self, _k: usize, prev: &[f64], rng: &mut RngStream, next: &mut [f64]) {
        next[0] = 0.5 * prev[0] + f64::std_normal(rng);
    }
    fn has_transition_density(&self) -> bool {
        true
    }
    fn log_transition_density(&self, _k: usize, prev: &[f64], next: &[f64]) -> Option<f64> {
        Some(normal_log_pdf(next[0], 0.5 * prev[0], 1.0))
    }
    fn log_potential(&self, k: usize, prev: Option<&[f64]>, cur: &[f64]) -> f64 {
        match prev {
            Some(p) if k == 1 => 0.3 * p[0] * cur[0],
            _ => -0.5 * cur[0] * cur[0],
        }
    }
}

impl FeynmanKac<f64> for Coupled {
    fn initial(&self) -> &InitialMeasure<f64> {
        &self.m1
    }
}

/// Exact joint law of `(B_1, B_2)` under backward sampling, row-major in
/// `(i, j)`.
pub fn backward_joint_law(model: &Coupled, x1: &[f64], x2: &[f64], w1: &[f64], w2: &[f64]) -> Vec<f64> {
    let n = x1.len();
    let mut p = vec![0.0; n * n];
    for j in 0..n {
        let v: Vec<f64> = (0..n).map(|i| w1[i] * model.log_backward_factor(x1[i], x2[j]).exp()).collect();
        let z: f64 = v.iter().sum();
        for i in 0..n {
            p[i * n + j] = w2[j] * v[i] / z;
        }
    }
    p
}

pub fn sample_mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}
