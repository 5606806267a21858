//! Iterated samplers built on the auxiliary-initialisation CPF.

mod dpg;
mod hyper;
mod scheme;

pub use dpg::{dpg_bs_run, ConditionedTail};
pub use hyper::{HyperModel, NoisyArSigmaX, SeirHyper};
pub use scheme::{AdaptSummary, InitScheme};

pub use crate::models::seir_initial_block_proposal;

use crate::adapt::{RamState, Stability, StepSchedule};
use crate::engine::{ai_cpf_step, PathSelector};
use crate::error::{invalid, Error, Result};
use crate::fk::{log_path_weight, simulate_prior_trajectory, Dynamics, FeynmanKac, Trajectory};
use crate::real::Real;
use crate::rng::RngStream;

/// Iteration counts and algorithm switches shared by the drivers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig<F> {
    pub n_particles: usize,
    pub n_iters: usize,
    /// Iterations discarded before records are emitted.
    pub burn_in: usize,
    /// Keep every `thin`-th post burn-in iteration.
    pub thin: usize,
    pub selector: PathSelector,
    pub schedule: StepSchedule,
    pub stability: Stability<F>,
}

impl<F: Real> RunConfig<F> {
    pub fn new(n_particles: usize, n_iters: usize) -> Self {
        Self {
            n_particles,
            n_iters,
            burn_in: 0,
            thin: 1,
            selector: PathSelector::BackwardSampling,
            schedule: StepSchedule::default(),
            stability: Stability::Off,
        }
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn with_thin(mut self, thin: usize) -> Self {
        self.thin = thin;
        self
    }

    pub fn with_selector(mut self, selector: PathSelector) -> Self {
        self.selector = selector;
        self
    }

    pub fn with_schedule(mut self, schedule: StepSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(invalid("n_particles", "must be at least 1"));
        }
        if self.thin == 0 {
            return Err(invalid("thin", "must be at least 1"));
        }
        Ok(())
    }

    /// Number of records a run emits: `floor((n_iters - burn_in) / thin)`.
    pub fn n_records(&self) -> usize {
        self.n_iters.saturating_sub(self.burn_in) / self.thin
    }

    fn keeps(&self, j: usize) -> bool {
        j > self.burn_in && (j - self.burn_in) % self.thin == 0
    }
}

/// Output of one iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainRecord<F> {
    /// One-based iteration index.
    pub iter: usize,
    pub trajectory: Trajectory<F>,
    pub theta: Option<Vec<F>>,
    /// `1 - V_1(reference)` of the trajectory update.
    pub alpha: F,
    /// Acceptance probability of the Metropolis block, if any.
    pub block_alpha: Option<F>,
    pub block_accepted: Option<bool>,
    pub adapt: AdaptSummary<F>,
}

fn check_reference<F: Real, M: FeynmanKac<F> + ?Sized>(model: &M, x: &Trajectory<F>) -> Result<()> {
    if x.len() != model.horizon() || x.dim() != model.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.horizon() * model.state_dim(),
            got: x.as_flat().len(),
        });
    }
    if !model.initial().domain().contains(x.state(0)) || !has_positive_weight(model, x) {
        return Err(invalid("reference", "initial trajectory has zero posterior density"));
    }
    Ok(())
}

fn has_positive_weight<F: Real, M: Dynamics<F> + ?Sized>(model: &M, x: &Trajectory<F>) -> bool {
    (0..x.len()).all(|k| {
        let prev = (k > 0).then(|| x.state(k - 1));
        model.log_potential(k, prev, x.state(k)) > F::neg_infinity()
    })
}

/// Simulates the dynamics from `x1` until a trajectory with positive
/// potentials is found, trying at most `tries` times.
pub fn initial_reference<F: Real, M: FeynmanKac<F> + ?Sized>(
    model: &M,
    x1: &[F],
    tries: usize,
    rng: &mut RngStream,
) -> Result<Trajectory<F>> {
    if !model.initial().domain().contains(x1) {
        return Err(Error::StartOutsideDomain);
    }
    for _ in 0..tries {
        let x = simulate_prior_trajectory(model, x1, rng);
        if has_positive_weight(model, &x) {
            return Ok(x);
        }
    }
    Err(Error::InitialisationFailed { tries })
}

/// Iterated (adaptive) auxiliary-initialisation CPF.
pub fn aai_cpf_run<F: Real, M: FeynmanKac<F> + ?Sized>(
    x0: Trajectory<F>,
    scheme: &mut InitScheme<F>,
    model: &M,
    cfg: &RunConfig<F>,
    rng: &mut RngStream,
) -> Result<Vec<ChainRecord<F>>> {
    cfg.validate()?;
    scheme.check_selector(cfg.selector)?;
    check_reference(model, &x0)?;
    let domain = model.initial().domain();
    let mut records = Vec::with_capacity(cfg.n_records());
    let mut x = x0;
    let mut kernel = scheme.kernel(model.initial())?;
    for j in 1..=cfg.n_iters {
        let (next, data) = ai_cpf_step(&x, &kernel, model, cfg.selector, cfg.n_particles, rng)?;
        x = next;
        if scheme.is_adaptive() {
            let eta = F::lit(cfg.schedule.eta(j as u64));
            if eta != F::zero() {
                scheme.adapt(&data, &domain, eta, cfg.stability)?;
                kernel = scheme.kernel(model.initial())?;
            }
        }
        if cfg.keeps(j) {
            records.push(ChainRecord {
                iter: j,
                trajectory: x.clone(),
                theta: None,
                alpha: data.alpha(),
                block_alpha: None,
                block_accepted: None,
                adapt: scheme.summary(),
            });
        }
    }
    Ok(records)
}

/// One random-walk Metropolis step driven by a RAM factor.
///
/// `propose` maps the increment `S u` to a candidate. Returns the new state,
/// the acceptance probability and whether the move was accepted.
pub(crate) fn ram_mh_step<F: Real>(
    current: &[F],
    current_log_target: F,
    ram: &mut RamState<F>,
    n: u64,
    rng: &mut RngStream,
    propose: impl Fn(&[F], &[F]) -> Vec<F>,
    log_target: impl Fn(&[F]) -> Result<F>,
) -> Result<(Vec<F>, F, F, bool)> {
    let u: Vec<F> = (0..ram.dim()).map(|_| F::std_normal(rng)).collect();
    let candidate = propose(current, &ram.step(&u));
    let lt = log_target(&candidate)?;
    if lt.is_nan() {
        return Err(Error::NonFiniteTarget("proposal log-target".into()));
    }
    let log_ratio = lt - current_log_target;
    let alpha = if log_ratio >= F::zero() {
        F::one()
    } else {
        log_ratio.exp()
    };
    let accept = F::std_uniform(rng) < alpha;
    ram.update(&u, alpha, n);
    Ok(if accept {
        (candidate, lt, alpha, true)
    } else {
        (current.to_vec(), current_log_target, alpha, false)
    })
}

/// Adaptive particle Gibbs: a RAM-adapted Metropolis update of `theta`
/// given the trajectory, then an auxiliary-initialisation CPF update of the
/// trajectory given `theta`.
///
/// The `theta` target is `log_prior(theta) + log gamma_theta(x)`, where
/// `gamma_theta` collects the potentials and transition densities (the
/// initial measure does not depend on `theta`).
pub fn aai_pg_run<F: Real, H: HyperModel<F>>(
    theta0: Vec<F>,
    x0: Trajectory<F>,
    hyper: &H,
    ram: &mut RamState<F>,
    scheme: &mut InitScheme<F>,
    cfg: &RunConfig<F>,
    rng: &mut RngStream,
) -> Result<Vec<ChainRecord<F>>> {
    cfg.validate()?;
    scheme.check_selector(cfg.selector)?;
    if theta0.len() != hyper.dim() || ram.dim() != hyper.dim() {
        return Err(Error::DimensionMismatch {
            expected: hyper.dim(),
            got: theta0.len(),
        });
    }
    let mut model = hyper.build(&theta0)?;
    check_reference(&model, &x0)?;
    let domain = model.initial().domain();
    let target = |theta: &[F], x: &Trajectory<F>| -> Result<F> {
        let lp = hyper.log_prior(theta);
        if lp == F::neg_infinity() {
            return Ok(lp);
        }
        let m = match hyper.build(theta) {
            Ok(m) => m,
            Err(Error::InvalidParameter { .. }) => return Ok(F::neg_infinity()),
            Err(e) => return Err(e),
        };
        let lw = log_path_weight(&m, x).ok_or(Error::MissingTransitionDensity)?;
        Ok(lp + lw)
    };
    let mut theta = theta0;
    let mut x = x0;
    let mut kernel = scheme.kernel(model.initial())?;
    let mut records = Vec::with_capacity(cfg.n_records());
    for j in 1..=cfg.n_iters {
        let current = target(&theta, &x)?;
        if current.is_nan() {
            return Err(Error::NonFiniteTarget("current log-target".into()));
        }
        let (next_theta, _, block_alpha, accepted) = ram_mh_step(
            &theta,
            current,
            ram,
            j as u64,
            rng,
            |t, s| t.iter().zip(s).map(|(&a, &b)| a + b).collect(),
            |t| target(t, &x),
        )?;
        if accepted {
            theta = next_theta;
            model = hyper.build(&theta)?;
        }
        let (next, data) = ai_cpf_step(&x, &kernel, &model, cfg.selector, cfg.n_particles, rng)?;
        x = next;
        if scheme.is_adaptive() {
            let eta = F::lit(cfg.schedule.eta(j as u64));
            if eta != F::zero() {
                scheme.adapt(&data, &domain, eta, cfg.stability)?;
                kernel = scheme.kernel(model.initial())?;
            }
        }
        if cfg.keeps(j) {
            records.push(ChainRecord {
                iter: j,
                trajectory: x.clone(),
                theta: Some(theta.clone()),
                alpha: data.alpha(),
                block_alpha: Some(block_alpha),
                block_accepted: Some(accepted),
                adapt: scheme.summary(),
            });
        }
    }
    Ok(records)
}
