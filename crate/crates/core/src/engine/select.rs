use crate::engine::{AdaptData, PathSelector};
use crate::error::{Error, Result};
use crate::fk::{categorical_sample, normalize_weights, Dynamics, ParticleSystem};
use crate::real::Real;
use crate::rng::RngStream;

fn first_step_data<F: Real>(ps: &ParticleSystem<F>, b1: usize, weights: Vec<F>, selector: PathSelector) -> AdaptData<F> {
    AdaptData {
        b1,
        first_weights: weights,
        first_particles: ps.particles_at(0).to_vec(),
        dim: ps.dim(),
        selector,
    }
}

/// Ancestor tracing: `B_T ~ Categ(W_T)`, then `B_k = A_k(B_{k+1})`.
pub fn pick_path_at<F: Real>(ps: &ParticleSystem<F>, rng: &mut RngStream) -> (Vec<usize>, AdaptData<F>) {
    let t = ps.horizon();
    let mut b = vec![0usize; t];
    b[t - 1] = categorical_sample(rng, ps.weights(t - 1));
    for k in (0..t - 1).rev() {
        b[k] = ps.ancestor(k, b[k + 1]);
    }
    let data = first_step_data(ps, b[0], ps.weights(0).to_vec(), PathSelector::AncestorTracing);
    (b, data)
}

/// Backward sampling: `B_T ~ Categ(W_T)`, then `B_k ~ Categ(V_k)` with
/// `V_k(i) ∝ W_k(i) M_{k+1}(X_k(i), X_{k+1}(B_{k+1})) G_{k+1}(X_k(i), X_{k+1}(B_{k+1}))`.
pub fn pick_path_bs<F: Real, M: Dynamics<F> + ?Sized>(
    ps: &ParticleSystem<F>,
    model: &M,
    rng: &mut RngStream,
) -> Result<(Vec<usize>, AdaptData<F>)> {
    let t = ps.horizon();
    let n = ps.num_particles();
    if t > 1 && !model.has_transition_density() {
        return Err(Error::MissingTransitionDensity);
    }
    let mut b = vec![0usize; t];
    b[t - 1] = categorical_sample(rng, ps.weights(t - 1));
    let mut v = ps.weights(0).to_vec();
    let mut log_v = vec![F::zero(); n];
    for k in (0..t - 1).rev() {
        let next = ps.particle(k + 1, b[k + 1]);
        let w = ps.weights(k);
        for (i, lv) in log_v.iter_mut().enumerate() {
            *lv = if w[i] > F::zero() {
                let cur = ps.particle(k, i);
                let m = model
                    .log_transition_density(k + 1, cur, next)
                    .ok_or(Error::MissingTransitionDensity)?;
                w[i].ln() + m + model.log_potential(k + 1, Some(cur), next)
            } else {
                F::neg_infinity()
            };
        }
        v = normalize_weights(&log_v)
            .map_err(|e| match e {
                Error::AllWeightsZero { .. } => Error::AllWeightsZero {
                    context: format!("backward weights at time index {k}"),
                },
                other => other,
            })?
            .0;
        b[k] = categorical_sample(rng, &v);
    }
    let data = first_step_data(ps, b[0], v, PathSelector::BackwardSampling);
    Ok((b, data))
}
