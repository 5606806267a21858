use crate::fk::measure::InitialMeasure;
use crate::fk::Trajectory;
use crate::real::Real;
use crate::rng::RngStream;

/// Markov transitions `M_2..M_T` and potentials `G_1..G_T` of a
/// Feynman-Kac model, with potentials depending on two consecutive states.
///
/// Time indices are zero-based: `k = 0` is the first time step, and
/// `sample_transition(k, ..)` draws `x_k` given `x_{k-1}` for `k >= 1`.
pub trait Dynamics<F: Real>: Send + Sync {
    /// Number of time steps `T`.
    fn horizon(&self) -> usize;

    fn state_dim(&self) -> usize;

    fn sample_transition(&self, k: usize, prev: &[F], rng: &mut RngStream, next: &mut [F]);

    /// Whether [`Dynamics::log_transition_density`] is available.
    fn has_transition_density(&self) -> bool {
        false
    }

    /// `log M_k(prev, next)` with respect to the model's dominating measure.
    fn log_transition_density(&self, _k: usize, _prev: &[F], _next: &[F]) -> Option<F> {
        None
    }

    /// `log G_k(x_{k-1}, x_k)`; `prev` is `None` at `k = 0`.
    ///
    /// Returns `-inf` exactly where the potential vanishes, never NaN.
    fn log_potential(&self, k: usize, prev: Option<&[F]>, cur: &[F]) -> F;
}

/// A full Feynman-Kac model: dynamics plus the initial measure `M1`.
pub trait FeynmanKac<F: Real>: Dynamics<F> {
    fn initial(&self) -> &InitialMeasure<F>;
}

impl<F: Real, M: Dynamics<F> + ?Sized> Dynamics<F> for &M {
    fn horizon(&self) -> usize {
        (**self).horizon()
    }
    fn state_dim(&self) -> usize {
        (**self).state_dim()
    }
    fn sample_transition(&self, k: usize, prev: &[F], rng: &mut RngStream, next: &mut [F]) {
        (**self).sample_transition(k, prev, rng, next)
    }
    fn has_transition_density(&self) -> bool {
        (**self).has_transition_density()
    }
    fn log_transition_density(&self, k: usize, prev: &[F], next: &[F]) -> Option<F> {
        (**self).log_transition_density(k, prev, next)
    }
    fn log_potential(&self, k: usize, prev: Option<&[F]>, cur: &[F]) -> F {
        (**self).log_potential(k, prev, cur)
    }
}

impl<F: Real, M: FeynmanKac<F> + ?Sized> FeynmanKac<F> for &M {
    fn initial(&self) -> &InitialMeasure<F> {
        (**self).initial()
    }
}

/// Unnormalised log-density `log M1(x_1) + sum_k log G_k + sum_k log M_k`
/// of a trajectory. Requires transition densities.
pub fn log_joint_density<F: Real, M: FeynmanKac<F> + ?Sized>(model: &M, traj: &Trajectory<F>) -> Option<F> {
    let mut total = model.initial().log_density(traj.state(0));
    total += log_path_weight(model, traj)?;
    Some(total)
}

/// `sum_k log G_k + sum_{k>=1} log M_k` along a trajectory (no `M1` term).
pub fn log_path_weight<F: Real, M: Dynamics<F> + ?Sized>(model: &M, traj: &Trajectory<F>) -> Option<F> {
    let mut total = model.log_potential(0, None, traj.state(0));
    for k in 1..traj.len() {
        if total == F::neg_infinity() {
            return Some(total);
        }
        let (prev, cur) = (traj.state(k - 1), traj.state(k));
        total += model.log_transition_density(k, prev, cur)?;
        total += model.log_potential(k, Some(prev), cur);
    }
    Some(total)
}

/// Runs the model dynamics forward from `x1`.
pub fn simulate_prior_trajectory<F: Real, M: Dynamics<F> + ?Sized>(
    model: &M,
    x1: &[F],
    rng: &mut RngStream,
) -> Trajectory<F> {
    let d = model.state_dim();
    assert_eq!(x1.len(), d, "initial state has wrong dimension");
    let t = model.horizon();
    let mut values = Vec::with_capacity(t * d);
    values.extend_from_slice(x1);
    let mut next = vec![F::zero(); d];
    for k in 1..t {
        let prev = &values[(k - 1) * d..k * d];
        model.sample_transition(k, prev, rng, &mut next);
        values.extend_from_slice(&next);
    }
    Trajectory::from_flat(d, values)
}
