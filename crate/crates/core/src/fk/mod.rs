//! Feynman-Kac models, trajectories, particle storage and weights.

mod measure;
mod model;
mod particles;
mod weights;

pub use measure::{Constraint, Domain, Gaussian, InitialMeasure};
pub use model::{log_joint_density, log_path_weight, simulate_prior_trajectory, Dynamics, FeynmanKac};
pub use particles::ParticleSystem;
pub use weights::{categorical_sample, multinomial_resample, normalize_weights};

/// A latent path `x_{1:T}` stored time-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<F> {
    dim: usize,
    values: Vec<F>,
}

impl<F: Copy> Trajectory<F> {
    pub fn from_flat(dim: usize, values: Vec<F>) -> Self {
        assert!(dim > 0 && values.len() % dim == 0, "trajectory length must be a multiple of dim");
        Self { dim, values }
    }

    pub fn from_states(states: &[Vec<F>]) -> Self {
        let dim = states.first().map_or(1, Vec::len);
        let values = states.iter().flat_map(|s| s.iter().copied()).collect();
        Self::from_flat(dim, values)
    }

    /// A scalar-state trajectory.
    pub fn from_scalars(xs: &[F]) -> Self {
        Self::from_flat(1, xs.to_vec())
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self, k: usize) -> &[F] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn state_mut(&mut self, k: usize) -> &mut [F] {
        &mut self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn states(&self) -> impl Iterator<Item = &[F]> {
        self.values.chunks(self.dim)
    }

    pub fn as_flat(&self) -> &[F] {
        &self.values
    }

    /// The path from time `k` on.
    pub fn tail(&self, k: usize) -> Self {
        Self::from_flat(self.dim, self.values[k * self.dim..].to_vec())
    }

    /// Scalar series of coordinate `j`.
    pub fn coordinate(&self, j: usize) -> Vec<F> {
        self.states().map(|s| s[j]).collect()
    }
}
