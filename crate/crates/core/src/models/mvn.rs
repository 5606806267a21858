use crate::error::{invalid, Result};
use crate::fk::{Domain, Dynamics, FeynmanKac, InitialMeasure};
use crate::models::positive;
use crate::real::Real;
use crate::rng::RngStream;

/// Static model with `T = 1`, flat `M1` and `G_1(x) = N(x; 0, sigma^2 I_d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MvnStaticParams<F> {
    pub dim: usize,
    /// Standard deviation of each coordinate.
    pub sigma: F,
}

#[derive(Clone, Debug)]
pub struct MvnStatic<F> {
    params: MvnStaticParams<F>,
    m1: InitialMeasure<F>,
}

pub fn make_mvn_static<F: Real>(params: MvnStaticParams<F>) -> Result<MvnStatic<F>> {
    if params.dim == 0 {
        return Err(invalid("dim", "must be at least 1"));
    }
    positive("sigma", params.sigma)?;
    Ok(MvnStatic {
        params,
        m1: InitialMeasure::Uniform(Domain::All),
    })
}

impl<F: Real> MvnStatic<F> {
    pub fn params(&self) -> &MvnStaticParams<F> {
        &self.params
    }
}

impl<F: Real> Dynamics<F> for MvnStatic<F> {
    fn horizon(&self) -> usize {
        1
    }

    fn state_dim(&self) -> usize {
        self.params.dim
    }

    fn sample_transition(&self, _k: usize, prev: &[F], _rng: &mut RngStream, next: &mut [F]) {
        next.copy_from_slice(prev);
    }

    fn has_transition_density(&self) -> bool {
        true
    }

    fn log_potential(&self, _k: usize, _prev: Option<&[F]>, cur: &[F]) -> F {
        let s2 = self.params.sigma * self.params.sigma;
        let r2: F = cur.iter().map(|&v| v * v).sum();
        let d = F::lit(self.params.dim as f64);
        -F::lit(0.5) * r2 / s2 - F::lit(0.5) * d * (F::lit(2.0) * F::PI() * s2).ln()
    }
}

impl<F: Real> FeynmanKac<F> for MvnStatic<F> {
    fn initial(&self) -> &InitialMeasure<F> {
        &self.m1
    }
}
