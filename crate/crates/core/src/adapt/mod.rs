//! On-line adaptation of the auxiliary kernels and of random-walk
//! Metropolis proposals.
//!
//! Updates take the step size `eta` explicitly; [`StepSchedule`] produces
//! the usual decaying sequence. AM, ASWAM and the DGI scale rule share the
//! schedule `min(0.5, j^-0.66)` by default. When adaptive initialisation is
//! combined with an adaptive hyperparameter block, both clocks advance once
//! per iteration with independent schedules.

mod ram;
mod stability;

pub use ram::RamState;
pub use stability::{is_stable, project_stability, Stability};

use crate::engine::{AdaptData, PathSelector};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::real::{logistic, Real};

/// Default target for `1 - V_1(reference)`.
pub const DEFAULT_ALPHA_TARGET: f64 = 0.8;
pub const DELTA_BOUND: f64 = 30.0;
pub const SCALE_BOUND: f64 = 15.0;

/// `eta_j = min(eta_max, j^-gamma)`.
pub fn step_size(j: u64, gamma: f64, eta_max: f64) -> f64 {
    assert!(j >= 1, "step index starts at 1");
    eta_max.min((j as f64).powf(-gamma))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepSchedule {
    /// `min(eta_max, j^-gamma)`.
    Decay { gamma: f64, eta_max: f64 },
    /// The same step at every iteration; `Constant(0.0)` freezes adaptation.
    Constant(f64),
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule::Decay {
            gamma: 0.66,
            eta_max: 0.5,
        }
    }
}

impl StepSchedule {
    pub fn eta(&self, j: u64) -> f64 {
        match *self {
            StepSchedule::Decay { gamma, eta_max } => step_size(j, gamma, eta_max),
            StepSchedule::Constant(eta) => eta,
        }
    }
}

fn require_backward(data: &AdaptData<impl Real>, rule: &'static str) -> Result<()> {
    if data.selector == PathSelector::BackwardSampling {
        Ok(())
    } else {
        Err(Error::SelectorMismatch { rule })
    }
}

/// Adaptive Metropolis mean/covariance recursion fed with the selected
/// first state.
#[derive(Clone, Debug, PartialEq)]
pub struct AmState<F> {
    pub mean: Vec<F>,
    pub cov: Matrix<F>,
    pub scale: F,
}

impl<F: Real> AmState<F> {
    /// `mean` start, identity covariance and `c = 2.38^2 / d`.
    pub fn new(mean: Vec<F>) -> Self {
        let d = mean.len();
        Self {
            cov: Matrix::identity(d),
            scale: F::lit(2.38 * 2.38 / d as f64),
            mean,
        }
    }

    pub fn with_scale(mut self, c: F) -> Self {
        self.scale = c;
        self
    }

    /// `mu* = (1-eta) mu + eta x`, `Sigma* = (1-eta) Sigma + eta (x-mu)(x-mu)'`
    /// with the pre-update `mu`.
    pub fn update(&mut self, x: &[F], eta: F) {
        if eta == F::zero() {
            return;
        }
        let diff: Vec<F> = x.iter().zip(&self.mean).map(|(&a, &m)| a - m).collect();
        let keep = F::one() - eta;
        for (m, &xi) in self.mean.iter_mut().zip(x) {
            *m = keep * *m + eta * xi;
        }
        self.cov = self.cov.scaled(keep).add(&Matrix::outer(&diff, &diff).scaled(eta));
        self.cov.symmetrize();
    }

    pub fn kernel_cov(&self) -> Matrix<F> {
        self.cov.scaled(self.scale)
    }
}

/// Rao-Blackwellised adaptive Metropolis with adaptive log-scale `delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct AswamState<F> {
    pub mean: Vec<F>,
    pub cov: Matrix<F>,
    pub delta: F,
    pub alpha_target: F,
}

impl<F: Real> AswamState<F> {
    pub fn new(mean: Vec<F>, alpha_target: F) -> Self {
        let d = mean.len();
        Self {
            mean,
            cov: Matrix::identity(d),
            delta: F::zero(),
            alpha_target,
        }
    }

    /// Weighted update using every first-step particle with its backward
    /// weight. `points` are the particles in the coordinates being adapted
    /// (`N * d` values); the weights come from `data`.
    pub fn update_with_points(&mut self, data: &AdaptData<F>, points: &[F], eta: F) -> Result<()> {
        require_backward(data, "aswam")?;
        let d = self.mean.len();
        let w = &data.first_weights;
        if points.len() != w.len() * d {
            return Err(Error::DimensionMismatch {
                expected: w.len() * d,
                got: points.len(),
            });
        }
        if eta == F::zero() {
            return Ok(());
        }
        let keep = F::one() - eta;
        let mut wmean = vec![F::zero(); d];
        let mut wcov = Matrix::zeros(d, d);
        for (i, &wi) in w.iter().enumerate() {
            if wi == F::zero() {
                continue;
            }
            let x = &points[i * d..(i + 1) * d];
            let diff: Vec<F> = x.iter().zip(&self.mean).map(|(&a, &m)| a - m).collect();
            for (acc, &xi) in wmean.iter_mut().zip(x) {
                *acc += wi * xi;
            }
            wcov = wcov.add(&Matrix::outer(&diff, &diff).scaled(wi));
        }
        for (m, wm) in self.mean.iter_mut().zip(wmean) {
            *m = keep * *m + eta * wm;
        }
        self.cov = self.cov.scaled(keep).add(&wcov.scaled(eta));
        self.cov.symmetrize();
        let bound = F::lit(DELTA_BOUND);
        self.delta = (self.delta + eta * (data.alpha() - self.alpha_target)).max(-bound).min(bound);
        Ok(())
    }

    pub fn update(&mut self, data: &AdaptData<F>, eta: F) -> Result<()> {
        let points = data.first_particles.clone();
        self.update_with_points(data, &points, eta)
    }

    /// `e^delta Sigma`.
    pub fn kernel_cov(&self) -> Matrix<F> {
        self.cov.scaled(self.delta.exp())
    }
}

/// Adaptive scaling of the Crank-Nicolson `beta = logistic(varsigma)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DgiScaleState<F> {
    pub varsigma: F,
    pub alpha_target: F,
}

impl<F: Real> DgiScaleState<F> {
    /// Starts at `beta = 0.5`.
    pub fn new(alpha_target: F) -> Self {
        Self {
            varsigma: F::zero(),
            alpha_target,
        }
    }

    pub fn update(&mut self, data: &AdaptData<F>, eta: F) -> Result<()> {
        require_backward(data, "dgi-scale")?;
        self.shift(eta * (data.alpha() - self.alpha_target));
        Ok(())
    }

    fn shift(&mut self, by: F) {
        let bound = F::lit(SCALE_BOUND);
        self.varsigma = (self.varsigma + by).max(-bound).min(bound);
    }

    pub fn beta(&self) -> F {
        logistic(self.varsigma)
    }
}
