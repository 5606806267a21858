use crate::fk::Trajectory;
use crate::models::{InitialSpread, NoisyAr};
use crate::real::Real;
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq)]
pub struct FilterOutput {
    pub filtered_means: Vec<f64>,
    pub filtered_vars: Vec<f64>,
    pub predicted_means: Vec<f64>,
    pub predicted_vars: Vec<f64>,
    /// `log p(y_{1:T})`; with a flat first-state prior the first
    /// observation contributes zero.
    pub log_likelihood: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmootherOutput {
    pub means: Vec<f64>,
    pub vars: Vec<f64>,
}

fn gaussian_loglik(resid: f64, var: f64) -> f64 {
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + resid * resid / var)
}

/// Kalman filter for the scalar noisy AR(1) model. A flat first-state prior
/// is handled in information form: the first filtered law is
/// `N(y_1, sigma_y^2)`.
pub fn kalman_filter<F: Real>(model: &NoisyAr<F>) -> FilterOutput {
    let p = model.params();
    let (rho, q, r) = (p.rho.as_f64(), p.sigma_x.as_f64().powi(2), p.sigma_y.as_f64().powi(2));
    let y: Vec<f64> = model.data().iter().map(|v| v.as_f64()).collect();
    let t = y.len();
    let mut out = FilterOutput {
        filtered_means: Vec::with_capacity(t),
        filtered_vars: Vec::with_capacity(t),
        predicted_means: Vec::with_capacity(t),
        predicted_vars: Vec::with_capacity(t),
        log_likelihood: 0.0,
    };
    for (k, &yk) in y.iter().enumerate() {
        let (mp, pp) = if k == 0 {
            match p.initial {
                InitialSpread::Gaussian { sd } => (0.0, sd.as_f64().powi(2)),
                InitialSpread::Flat => (0.0, f64::INFINITY),
            }
        } else {
            let m = out.filtered_means[k - 1];
            let v = out.filtered_vars[k - 1];
            (rho * m, rho * rho * v + q)
        };
        let (mf, pf) = if pp.is_infinite() {
            (yk, r)
        } else {
            let s = pp + r;
            out.log_likelihood += gaussian_loglik(yk - mp, s);
            let gain = pp / s;
            (mp + gain * (yk - mp), (1.0 - gain) * pp)
        };
        out.predicted_means.push(mp);
        out.predicted_vars.push(pp);
        out.filtered_means.push(mf);
        out.filtered_vars.push(pf);
    }
    out
}

/// Rauch-Tung-Striebel smoother: exact marginal means and variances of
/// `x_k | y_{1:T}`.
pub fn kalman_smoother<F: Real>(model: &NoisyAr<F>) -> SmootherOutput {
    let f = kalman_filter(model);
    let rho = model.params().rho.as_f64();
    let t = f.filtered_means.len();
    let mut means = f.filtered_means.clone();
    let mut vars = f.filtered_vars.clone();
    for k in (0..t - 1).rev() {
        let j = rho * f.filtered_vars[k] / f.predicted_vars[k + 1];
        means[k] = f.filtered_means[k] + j * (means[k + 1] - f.predicted_means[k + 1]);
        vars[k] = f.filtered_vars[k] + j * j * (vars[k + 1] - f.predicted_vars[k + 1]);
    }
    SmootherOutput { means, vars }
}

/// Exact draw of `x_{1:T} | y_{1:T}` by forward filtering, backward
/// sampling.
pub fn ffbs_sample<F: Real>(model: &NoisyAr<F>, filter: &FilterOutput, rng: &mut RngStream) -> Trajectory<F> {
    let rho = model.params().rho.as_f64();
    let t = filter.filtered_means.len();
    let mut x = vec![0.0f64; t];
    x[t - 1] = filter.filtered_means[t - 1] + filter.filtered_vars[t - 1].sqrt() * f64::std_normal(rng);
    for k in (0..t - 1).rev() {
        let (m, v) = (filter.filtered_means[k], filter.filtered_vars[k]);
        let j = rho * v / filter.predicted_vars[k + 1];
        let mean = m + j * (x[k + 1] - rho * m);
        let var = (v - j * rho * v).max(0.0);
        x[k] = mean + var.sqrt() * f64::std_normal(rng);
    }
    let xs: Vec<F> = x.into_iter().map(F::lit).collect();
    Trajectory::from_scalars(&xs)
}
