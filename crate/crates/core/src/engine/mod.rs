//! Conditional particle filter sweeps and path selection.

mod select;

pub use select::{pick_path_at, pick_path_bs};

use crate::error::{Error, Result};
use crate::fk::{multinomial_resample, normalize_weights, Dynamics, FeynmanKac, ParticleSystem, Trajectory};
use crate::kernels::{exact_m1_kernel, InitKernel};
use crate::real::Real;
use crate::rng::RngStream;

/// How the output trajectory is picked from a particle system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PathSelector {
    AncestorTracing,
    BackwardSampling,
}

/// What the adaptation rules see from one sweep: the selected first-step
/// index, the first-step weights and the first-step particles.
///
/// With backward sampling `first_weights` are the time-1 backward weights
/// `V_1`; with ancestor tracing they are the filter weights `W_1`. Slot 0 is
/// the reference.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptData<F> {
    pub b1: usize,
    pub first_weights: Vec<F>,
    pub first_particles: Vec<F>,
    pub dim: usize,
    pub selector: PathSelector,
}

impl<F: Real> AdaptData<F> {
    pub fn num_particles(&self) -> usize {
        self.first_weights.len()
    }

    pub fn particle(&self, i: usize) -> &[F] {
        &self.first_particles[i * self.dim..(i + 1) * self.dim]
    }

    pub fn selected(&self) -> &[F] {
        self.particle(self.b1)
    }

    /// `1 - V_1(reference)`: probability that the reference's first state is
    /// not retained.
    pub fn alpha(&self) -> F {
        F::one() - self.first_weights[0]
    }
}

/// Runs the forward conditional particle filter.
///
/// `first_particles` holds `N * d` values; slot 0 must already equal the
/// reference's first state. For `k >= 1`, slot 0 is pinned to the reference
/// state and to ancestor 0.
pub fn forward_cpf<F: Real, M: Dynamics<F> + ?Sized>(
    reference: &Trajectory<F>,
    first_particles: &[F],
    model: &M,
    rng: &mut RngStream,
) -> Result<ParticleSystem<F>> {
    let d = model.state_dim();
    let t = model.horizon();
    if reference.len() != t {
        return Err(Error::DimensionMismatch {
            expected: t,
            got: reference.len(),
        });
    }
    if first_particles.is_empty() || first_particles.len() % d != 0 {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: first_particles.len(),
        });
    }
    let n = first_particles.len() / d;
    let mut ps = ParticleSystem::with_capacity(t, n, d);

    let mut log_w: Vec<F> = (0..n)
        .map(|i| model.log_potential(0, None, &first_particles[i * d..(i + 1) * d]))
        .collect();
    let (mut w, _) = normalize_weights(&log_w).map_err(|e| at_step(e, 0))?;
    ps.push_step(first_particles, &w);

    let mut prev = first_particles.to_vec();
    let mut cur = vec![F::zero(); n * d];
    let mut anc = vec![0usize; n];
    for k in 1..t {
        multinomial_resample(rng, &w, &mut anc[1..]);
        anc[0] = 0;
        cur[..d].copy_from_slice(reference.state(k));
        for i in 1..n {
            let p = &prev[anc[i] * d..(anc[i] + 1) * d];
            model.sample_transition(k, p, rng, &mut cur[i * d..(i + 1) * d]);
        }
        for (i, lw) in log_w.iter_mut().enumerate() {
            let p = &prev[anc[i] * d..(anc[i] + 1) * d];
            *lw = model.log_potential(k, Some(p), &cur[i * d..(i + 1) * d]);
        }
        w = normalize_weights(&log_w).map_err(|e| at_step(e, k))?.0;
        ps.push_ancestors(&anc);
        ps.push_step(&cur, &w);
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(ps)
}

fn at_step(e: Error, k: usize) -> Error {
    match e {
        Error::AllWeightsZero { .. } => Error::AllWeightsZero {
            context: format!("filter weights at time index {k}"),
        },
        Error::NonFiniteTarget(_) => Error::NonFiniteTarget(format!("filter weights at time index {k}")),
        other => other,
    }
}

/// Selects a trajectory and returns it together with the adaptation data.
pub fn select_path<F: Real, M: Dynamics<F> + ?Sized>(
    ps: &ParticleSystem<F>,
    model: &M,
    selector: PathSelector,
    rng: &mut RngStream,
) -> Result<(Trajectory<F>, AdaptData<F>)> {
    let (b, data) = match selector {
        PathSelector::AncestorTracing => pick_path_at(ps, rng),
        PathSelector::BackwardSampling => pick_path_bs(ps, model, rng)?,
    };
    Ok((ps.path(&b), data))
}

/// One auxiliary-initialisation CPF step from `reference`.
///
/// Draws `X0 ~ Q(x_1, .)`, then `N - 1` fresh first-step particles from
/// `Q(X0, .)` next to the reference in slot 0, runs the forward filter and
/// selects a path. With `N = 1` the reference is returned unchanged.
pub fn ai_cpf_step<F, M, K>(
    reference: &Trajectory<F>,
    kernel: &K,
    model: &M,
    selector: PathSelector,
    n: usize,
    rng: &mut RngStream,
) -> Result<(Trajectory<F>, AdaptData<F>)>
where
    F: Real,
    M: Dynamics<F> + ?Sized,
    K: InitKernel<F> + ?Sized,
{
    if selector == PathSelector::BackwardSampling && model.horizon() > 1 && !model.has_transition_density() {
        return Err(Error::MissingTransitionDensity);
    }
    let d = model.state_dim();
    let x1 = reference.state(0);
    if n <= 1 {
        return Ok((
            reference.clone(),
            AdaptData {
                b1: 0,
                first_weights: vec![F::one()],
                first_particles: x1.to_vec(),
                dim: d,
                selector,
            },
        ));
    }
    let mut first = Vec::with_capacity(n * d);
    first.extend_from_slice(x1);
    if kernel.is_exact_m1_draw() {
        for _ in 1..n {
            first.extend(kernel.sample(x1, rng)?);
        }
    } else {
        let x0 = kernel.sample(x1, rng)?;
        for _ in 1..n {
            first.extend(kernel.sample(&x0, rng)?);
        }
    }
    let ps = forward_cpf(reference, &first, model, rng)?;
    select_path(&ps, model, selector, rng)
}

/// Classic CPF with backward sampling: the auxiliary step with `Q = M1`.
pub fn cpf_bs_step<F: Real, M: FeynmanKac<F> + ?Sized>(
    reference: &Trajectory<F>,
    model: &M,
    n: usize,
    rng: &mut RngStream,
) -> Result<(Trajectory<F>, AdaptData<F>)> {
    let kernel = exact_m1_kernel(model.initial())?;
    ai_cpf_step(reference, &kernel, model, PathSelector::BackwardSampling, n, rng)
}
