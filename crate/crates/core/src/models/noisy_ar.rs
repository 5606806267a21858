use crate::error::Result;
use crate::fk::{Domain, Dynamics, FeynmanKac, Gaussian, InitialMeasure, Trajectory};
use crate::models::{finite_data, positive};
use crate::real::{normal_log_pdf, Real};
use crate::rng::RngStream;

/// Spread of the first state: Gaussian `N(0, sd^2)` or the flat (Lebesgue)
/// measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialSpread<F> {
    Gaussian { sd: F },
    Flat,
}

/// `x_{k+1} = rho x_k + N(0, sigma_x^2)`, `y_k = x_k + N(0, sigma_y^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisyArParams<F> {
    pub rho: F,
    pub sigma_x: F,
    pub sigma_y: F,
    pub initial: InitialSpread<F>,
}

impl<F: Real> NoisyArParams<F> {
    /// The noisy random walk (`rho = 1`).
    pub fn random_walk(sigma_x: F, sigma_y: F, initial: InitialSpread<F>) -> Self {
        Self {
            rho: F::one(),
            sigma_x,
            sigma_y,
            initial,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("sigma_x", self.sigma_x)?;
        positive("sigma_y", self.sigma_y)?;
        if let InitialSpread::Gaussian { sd } = self.initial {
            positive("sigma_1", sd)?;
        }
        if !self.rho.is_finite() {
            return Err(crate::error::invalid("rho", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct NoisyAr<F> {
    params: NoisyArParams<F>,
    y: Vec<F>,
    m1: InitialMeasure<F>,
}

pub fn make_noisy_ar<F: Real>(params: NoisyArParams<F>, y: Vec<F>) -> Result<NoisyAr<F>> {
    params.validate()?;
    finite_data(&y)?;
    let m1 = match params.initial {
        InitialSpread::Gaussian { sd } => InitialMeasure::Gaussian(Gaussian::scalar(F::zero(), sd)?),
        InitialSpread::Flat => InitialMeasure::Uniform(Domain::All),
    };
    Ok(NoisyAr { params, y, m1 })
}

impl<F: Real> NoisyAr<F> {
    pub fn params(&self) -> &NoisyArParams<F> {
        &self.params
    }

    pub fn data(&self) -> &[F] {
        &self.y
    }
}

impl<F: Real> Dynamics<F> for NoisyAr<F> {
    fn horizon(&self) -> usize {
        self.y.len()
    }

    fn state_dim(&self) -> usize {
        1
    }

    fn sample_transition(&self, _k: usize, prev: &[F], rng: &mut RngStream, next: &mut [F]) {
        next[0] = self.params.rho * prev[0] + self.params.sigma_x * F::std_normal(rng);
    }

    fn has_transition_density(&self) -> bool {
        true
    }

    fn log_transition_density(&self, _k: usize, prev: &[F], next: &[F]) -> Option<F> {
        Some(normal_log_pdf(next[0], self.params.rho * prev[0], self.params.sigma_x))
    }

    fn log_potential(&self, k: usize, _prev: Option<&[F]>, cur: &[F]) -> F {
        normal_log_pdf(self.y[k], cur[0], self.params.sigma_y)
    }
}

impl<F: Real> FeynmanKac<F> for NoisyAr<F> {
    fn initial(&self) -> &InitialMeasure<F> {
        &self.m1
    }
}

/// Simulates `T` observations and the latent path started at `x1`.
pub fn simulate_noisy_ar<F: Real>(
    params: &NoisyArParams<F>,
    t: usize,
    x1: F,
    rng: &mut RngStream,
) -> Result<(Vec<F>, Trajectory<F>)> {
    params.validate()?;
    let mut x = Vec::with_capacity(t);
    let mut y = Vec::with_capacity(t);
    let mut cur = x1;
    for k in 0..t {
        if k > 0 {
            cur = params.rho * cur + params.sigma_x * F::std_normal(rng);
        }
        x.push(cur);
        y.push(cur + params.sigma_y * F::std_normal(rng));
    }
    Ok((y, Trajectory::from_scalars(&x)))
}
