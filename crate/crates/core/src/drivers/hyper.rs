use crate::error::Result;
use crate::fk::FeynmanKac;
use crate::models::{make_noisy_ar, make_seir, NoisyAr, NoisyArParams, SeirModel, SeirParams};
use crate::real::{logistic, normal_log_pdf, Real};

/// A family of models indexed by hyperparameters `theta`.
///
/// `theta` lives in unconstrained coordinates (e.g. `log sigma`); the prior
/// is a density in those coordinates.
pub trait HyperModel<F: Real>: Send + Sync {
    type Model: FeynmanKac<F>;

    fn dim(&self) -> usize;

    fn log_prior(&self, theta: &[F]) -> F;

    /// Deterministic in `theta`.
    fn build(&self, theta: &[F]) -> Result<Self::Model>;
}

/// Noisy AR(1) with unknown `theta = log sigma_x` and a Gaussian prior on it.
#[derive(Clone, Debug)]
pub struct NoisyArSigmaX<F> {
    pub base: NoisyArParams<F>,
    pub y: Vec<F>,
    pub prior_mean: F,
    pub prior_sd: F,
}

impl<F: Real> HyperModel<F> for NoisyArSigmaX<F> {
    type Model = NoisyAr<F>;

    fn dim(&self) -> usize {
        1
    }

    fn log_prior(&self, theta: &[F]) -> F {
        normal_log_pdf(theta[0], self.prior_mean, self.prior_sd)
    }

    fn build(&self, theta: &[F]) -> Result<NoisyAr<F>> {
        let mut p = self.base;
        p.sigma_x = theta[0].exp();
        make_noisy_ar(p, self.y.clone())
    }
}

/// SEIR with `theta = (log sigma, logit p)` and priors
/// `log sigma ~ N(-2, 0.3^2)`, `logit p ~ N(0, 10^2)`.
#[derive(Clone, Debug)]
pub struct SeirHyper<F> {
    pub base: SeirParams<F>,
    pub counts: Vec<u64>,
}

impl<F: Real> SeirHyper<F> {
    pub fn params_at(&self, theta: &[F]) -> SeirParams<F> {
        let mut p = self.base;
        p.sigma = theta[0].exp();
        p.p = logistic(theta[1]);
        p
    }
}

impl<F: Real> HyperModel<F> for SeirHyper<F> {
    type Model = SeirModel<F>;

    fn dim(&self) -> usize {
        2
    }

    fn log_prior(&self, theta: &[F]) -> F {
        normal_log_pdf(theta[0], F::lit(-2.0), F::lit(0.3)) + normal_log_pdf(theta[1], F::zero(), F::lit(10.0))
    }

    fn build(&self, theta: &[F]) -> Result<SeirModel<F>> {
        make_seir(self.params_at(theta), self.counts.clone())
    }
}
