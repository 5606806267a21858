use crate::error::Result;
use crate::fk::{Dynamics, FeynmanKac, Gaussian, InitialMeasure, Trajectory};
use crate::models::{finite_data, positive};
use crate::real::{normal_log_pdf, Real};
use crate::rng::RngStream;

/// `x_{k+1} = x_k + N(0, sigma_x^2)`, `y_k = exp(x_k) N(0, sigma_y^2)`,
/// `x_1 ~ N(0, sigma_1^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvParams<F> {
    pub sigma_x: F,
    pub sigma_y: F,
    pub sigma_1: F,
}

impl<F: Real> SvParams<F> {
    pub fn validate(&self) -> Result<()> {
        positive("sigma_x", self.sigma_x)?;
        positive("sigma_y", self.sigma_y)?;
        positive("sigma_1", self.sigma_1)
    }
}

#[derive(Clone, Debug)]
pub struct Sv<F> {
    params: SvParams<F>,
    y: Vec<F>,
    m1: InitialMeasure<F>,
}

pub fn make_sv<F: Real>(params: SvParams<F>, y: Vec<F>) -> Result<Sv<F>> {
    params.validate()?;
    finite_data(&y)?;
    let m1 = InitialMeasure::Gaussian(Gaussian::scalar(F::zero(), params.sigma_1)?);
    Ok(Sv { params, y, m1 })
}

impl<F: Real> Sv<F> {
    pub fn params(&self) -> &SvParams<F> {
        &self.params
    }

    pub fn data(&self) -> &[F] {
        &self.y
    }
}

impl<F: Real> Dynamics<F> for Sv<F> {
    fn horizon(&self) -> usize {
        self.y.len()
    }

    fn state_dim(&self) -> usize {
        1
    }

    fn sample_transition(&self, _k: usize, prev: &[F], rng: &mut RngStream, next: &mut [F]) {
        next[0] = prev[0] + self.params.sigma_x * F::std_normal(rng);
    }

    fn has_transition_density(&self) -> bool {
        true
    }

    fn log_transition_density(&self, _k: usize, prev: &[F], next: &[F]) -> Option<F> {
        Some(normal_log_pdf(next[0], prev[0], self.params.sigma_x))
    }

    /// `log N(y_k; 0, sigma_y^2 exp(2 x_k))`.
    fn log_potential(&self, k: usize, _prev: Option<&[F]>, cur: &[F]) -> F {
        let x = cur[0];
        let z = self.y[k] * (-x).exp() / self.params.sigma_y;
        -F::lit(0.5) * (F::lit(2.0) * F::PI()).ln() - self.params.sigma_y.ln() - x - F::lit(0.5) * z * z
    }
}

impl<F: Real> FeynmanKac<F> for Sv<F> {
    fn initial(&self) -> &InitialMeasure<F> {
        &self.m1
    }
}

pub fn simulate_sv<F: Real>(params: &SvParams<F>, t: usize, x1: F, rng: &mut RngStream) -> Result<(Vec<F>, Trajectory<F>)> {
    params.validate()?;
    let mut x = Vec::with_capacity(t);
    let mut y = Vec::with_capacity(t);
    let mut cur = x1;
    for k in 0..t {
        if k > 0 {
            cur += params.sigma_x * F::std_normal(rng);
        }
        x.push(cur);
        y.push(cur.exp() * params.sigma_y * F::std_normal(rng));
    }
    Ok((y, Trajectory::from_scalars(&x)))
}
