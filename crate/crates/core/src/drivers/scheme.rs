use crate::adapt::{is_stable, project_stability, AmState, AswamState, DgiScaleState, Stability};
use crate::engine::{AdaptData, PathSelector};
use crate::error::{Error, Result};
use crate::fk::{Domain, InitialMeasure};
use crate::kernels::{exact_m1_kernel, CrankNicolsonKernel, Kernel, RandomWalkKernel};
use crate::linalg::Matrix;
use crate::real::Real;

/// The auxiliary kernel family and its adaptation rule.
#[derive(Clone, Debug, PartialEq)]
pub enum InitScheme<F> {
    /// `Q = M1`: the standard CPF.
    ExactM1,
    /// Crank-Nicolson kernel with fixed `beta`.
    CrankNicolson { beta: F },
    /// Crank-Nicolson kernel with `beta` tuned towards a target `alpha`.
    AdaptiveCn(DgiScaleState<F>),
    /// Random walk with a fixed proposal covariance (in free coordinates).
    RandomWalk { cov: Matrix<F> },
    /// Random walk with adaptive Metropolis covariance.
    Am(AmState<F>),
    /// Random walk with Rao-Blackwellised covariance and adaptive scale.
    Aswam(AswamState<F>),
}

/// Adaptation telemetry.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AdaptSummary<F> {
    pub beta: Option<F>,
    pub log_scale: Option<F>,
    pub cov_trace: Option<F>,
}

impl<F: Real> InitScheme<F> {
    /// AM started at `x1` (free coordinates) with identity covariance.
    pub fn am(x1_free: Vec<F>) -> Self {
        InitScheme::Am(AmState::new(x1_free))
    }

    /// ASWAM started at `x1` (free coordinates), identity covariance, `delta = 0`.
    pub fn aswam(x1_free: Vec<F>, alpha_target: F) -> Self {
        InitScheme::Aswam(AswamState::new(x1_free, alpha_target))
    }

    /// Adaptive Crank-Nicolson started at `beta = 0.5`.
    pub fn adaptive_cn(alpha_target: F) -> Self {
        InitScheme::AdaptiveCn(DgiScaleState::new(alpha_target))
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self, InitScheme::AdaptiveCn(_) | InitScheme::Am(_) | InitScheme::Aswam(_))
    }

    /// Acceptance-rate driven rules need backward-sampling weights.
    pub fn check_selector(&self, selector: PathSelector) -> Result<()> {
        match (self, selector) {
            (InitScheme::AdaptiveCn(_), PathSelector::AncestorTracing) => Err(Error::SelectorMismatch { rule: "dgi-scale" }),
            (InitScheme::Aswam(_), PathSelector::AncestorTracing) => Err(Error::SelectorMismatch { rule: "aswam" }),
            _ => Ok(()),
        }
    }

    /// The kernel for the current adaptation state.
    pub fn kernel(&self, m1: &InitialMeasure<F>) -> Result<Kernel<F>> {
        Ok(match self {
            InitScheme::ExactM1 => Kernel::ExactM1(exact_m1_kernel(m1)?),
            InitScheme::CrankNicolson { beta } => Kernel::CrankNicolson(CrankNicolsonKernel::from_gaussian(m1.gaussian()?, *beta)?),
            InitScheme::AdaptiveCn(s) => {
                Kernel::CrankNicolson(CrankNicolsonKernel::from_gaussian(m1.gaussian()?, s.beta())?)
            }
            InitScheme::RandomWalk { cov } => Kernel::RandomWalk(RandomWalkKernel::new(cov.clone(), m1.domain())?),
            InitScheme::Am(s) => Kernel::RandomWalk(RandomWalkKernel::new(s.kernel_cov(), m1.domain())?),
            InitScheme::Aswam(s) => Kernel::RandomWalk(RandomWalkKernel::new(s.kernel_cov(), m1.domain())?),
        })
    }

    /// Applies the adaptation rule with step `eta`.
    pub fn adapt(&mut self, data: &AdaptData<F>, domain: &Domain<F>, eta: F, stability: Stability<F>) -> Result<()> {
        match self {
            InitScheme::ExactM1 | InitScheme::CrankNicolson { .. } | InitScheme::RandomWalk { .. } => Ok(()),
            InitScheme::AdaptiveCn(s) => s.update(data, eta),
            InitScheme::Am(s) => {
                let prev = s.clone();
                s.update(&domain.to_free(data.selected()), eta);
                stabilise(&mut s.cov, None, &prev.cov, F::zero(), stability);
                Ok(())
            }
            InitScheme::Aswam(s) => {
                let prev = s.clone();
                let points: Vec<F> = (0..data.num_particles()).flat_map(|i| domain.to_free(data.particle(i))).collect();
                s.update_with_points(data, &points, eta)?;
                stabilise(&mut s.cov, Some(&mut s.delta), &prev.cov, prev.delta, stability);
                Ok(())
            }
        }
    }

    pub fn summary(&self) -> AdaptSummary<F> {
        match self {
            InitScheme::ExactM1 => AdaptSummary::default(),
            InitScheme::CrankNicolson { beta } => AdaptSummary {
                beta: Some(*beta),
                ..Default::default()
            },
            InitScheme::AdaptiveCn(s) => AdaptSummary {
                beta: Some(s.beta()),
                ..Default::default()
            },
            InitScheme::RandomWalk { cov } => AdaptSummary {
                cov_trace: Some(cov.trace()),
                ..Default::default()
            },
            InitScheme::Am(s) => AdaptSummary {
                cov_trace: Some(s.cov.trace()),
                ..Default::default()
            },
            InitScheme::Aswam(s) => AdaptSummary {
                log_scale: Some(s.delta),
                cov_trace: Some(s.cov.trace()),
                ..Default::default()
            },
        }
    }
}

fn stabilise<F: Real>(cov: &mut Matrix<F>, delta: Option<&mut F>, prev_cov: &Matrix<F>, prev_delta: F, mode: Stability<F>) {
    match mode {
        Stability::Off => {}
        Stability::Project { epsilon } => {
            let d = delta.as_ref().map_or(F::zero(), |v| **v);
            let (c, d) = project_stability(cov, d, epsilon);
            *cov = c;
            if let Some(slot) = delta {
                *slot = d;
            }
        }
        Stability::Reject { epsilon } => {
            let d = delta.as_ref().map_or(F::zero(), |v| **v);
            if !is_stable(cov, d, epsilon) {
                *cov = prev_cov.clone();
                if let Some(slot) = delta {
                    *slot = prev_delta;
                }
            }
        }
    }
}
