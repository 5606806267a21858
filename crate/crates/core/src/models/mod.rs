//! Experiment models as Feynman-Kac models with bootstrap proposals, data
//! simulators and a Kalman oracle for the linear-Gaussian case.

mod kalman;
mod mvn;
mod noisy_ar;
mod seir;
mod sv;

pub use kalman::{ffbs_sample, kalman_filter, kalman_smoother, FilterOutput, SmootherOutput};
pub use mvn::{make_mvn_static, MvnStatic, MvnStaticParams};
pub use noisy_ar::{make_noisy_ar, simulate_noisy_ar, InitialSpread, NoisyAr, NoisyArParams};
pub use seir::{
    make_seir, negbin_log_pmf, seir_initial_block_proposal, simulate_seir, SeirConstraint, SeirData, SeirModel,
    SeirParams, SEIR_DIM,
};
pub use sv::{make_sv, simulate_sv, Sv, SvParams};

use crate::error::{invalid, Result};
use crate::real::Real;

pub(crate) fn positive<F: Real>(name: &'static str, v: F) -> Result<()> {
    if v > F::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {v}")))
    }
}

pub(crate) fn finite_data<F: Real>(y: &[F]) -> Result<()> {
    if y.is_empty() {
        return Err(invalid("data", "at least one observation is required"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(invalid("data", "observations must be finite"));
    }
    Ok(())
}
