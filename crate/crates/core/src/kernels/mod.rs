//! `M1`-reversible auxiliary kernels `Q`.
//!
//! * [`ExactM1Kernel`] ignores its input and draws from a Gaussian `M1`;
//!   using it in the auxiliary-initialisation step gives the standard CPF.
//! * [`CrankNicolsonKernel`] is the autoregressive kernel reversible with
//!   respect to a Gaussian `M1`.
//! * [`RandomWalkKernel`] is a Gaussian random walk with Metropolis-Hastings
//!   rejection for uniform (possibly improper, possibly constrained) `M1`.
//!
//! When `M1` has a pointwise-evaluable density but no convenient reversible
//! kernel, rewrite the model with `M1 = 1` and `G1(x) = M1(x) G1(x)` and use
//! the random-walk kernel.

mod crank_nicolson;
mod random_walk;
mod reversibility;

pub use crank_nicolson::{exact_m1_kernel, CrankNicolsonKernel, ExactM1Kernel};
pub use random_walk::RandomWalkKernel;
pub use reversibility::{reversibility_test, ProjectionTest, ReversibilityReport, StationaryStart};

use crate::error::Result;
use crate::real::Real;
use crate::rng::RngStream;

pub trait InitKernel<F: Real>: Send + Sync {
    /// Draws `Z ~ Q(x, .)`.
    fn sample(&self, x: &[F], rng: &mut RngStream) -> Result<Vec<F>>;

    /// True when `Q(x, .) = M1` for every `x`.
    fn is_exact_m1_draw(&self) -> bool {
        false
    }
}

/// Any of the shipped kernels.
#[derive(Clone, Debug)]
pub enum Kernel<F> {
    ExactM1(ExactM1Kernel<F>),
    CrankNicolson(CrankNicolsonKernel<F>),
    RandomWalk(RandomWalkKernel<F>),
}

impl<F: Real> InitKernel<F> for Kernel<F> {
    fn sample(&self, x: &[F], rng: &mut RngStream) -> Result<Vec<F>> {
        match self {
            Kernel::ExactM1(k) => k.sample(x, rng),
            Kernel::CrankNicolson(k) => k.sample(x, rng),
            Kernel::RandomWalk(k) => k.sample(x, rng),
        }
    }

    fn is_exact_m1_draw(&self) -> bool {
        match self {
            Kernel::ExactM1(k) => k.is_exact_m1_draw(),
            Kernel::CrankNicolson(k) => k.is_exact_m1_draw(),
            Kernel::RandomWalk(k) => k.is_exact_m1_draw(),
        }
    }
}
