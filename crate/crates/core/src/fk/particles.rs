use crate::fk::Trajectory;
use crate::real::Real;

/// Particles, normalised weights and ancestor indices of one conditional
/// particle filter sweep.
///
/// Slots and times are zero-based; slot 0 carries the reference trajectory,
/// so `ancestor(k, 0) == 0` for every `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleSystem<F> {
    horizon: usize,
    n: usize,
    dim: usize,
    particles: Vec<F>,
    weights: Vec<F>,
    ancestors: Vec<usize>,
}

impl<F: Real> ParticleSystem<F> {
    pub(crate) fn with_capacity(horizon: usize, n: usize, dim: usize) -> Self {
        Self {
            horizon,
            n,
            dim,
            particles: Vec::with_capacity(horizon * n * dim),
            weights: Vec::with_capacity(horizon * n),
            ancestors: Vec::with_capacity(horizon.saturating_sub(1) * n),
        }
    }

    /// Assembles a particle system from flat buffers (time-major).
    pub fn from_parts(
        horizon: usize,
        n: usize,
        dim: usize,
        particles: Vec<F>,
        weights: Vec<F>,
        ancestors: Vec<usize>,
    ) -> Self {
        assert_eq!(particles.len(), horizon * n * dim);
        assert_eq!(weights.len(), horizon * n);
        assert_eq!(ancestors.len(), horizon.saturating_sub(1) * n);
        Self {
            horizon,
            n,
            dim,
            particles,
            weights,
            ancestors,
        }
    }

    pub(crate) fn push_step(&mut self, particles: &[F], weights: &[F]) {
        self.particles.extend_from_slice(particles);
        self.weights.extend_from_slice(weights);
    }

    pub(crate) fn push_ancestors(&mut self, ancestors: &[usize]) {
        self.ancestors.extend_from_slice(ancestors);
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn particle(&self, k: usize, i: usize) -> &[F] {
        let start = (k * self.n + i) * self.dim;
        &self.particles[start..start + self.dim]
    }

    /// All particles at time `k`, `n * dim` values.
    pub fn particles_at(&self, k: usize) -> &[F] {
        let start = k * self.n * self.dim;
        &self.particles[start..start + self.n * self.dim]
    }

    pub fn weights(&self, k: usize) -> &[F] {
        &self.weights[k * self.n..(k + 1) * self.n]
    }

    /// Ancestor slot at time `k` of particle `i` at time `k + 1`.
    pub fn ancestor(&self, k: usize, i: usize) -> usize {
        self.ancestors[k * self.n + i]
    }

    pub fn ancestors(&self, k: usize) -> &[usize] {
        &self.ancestors[k * self.n..(k + 1) * self.n]
    }

    /// The trajectory `(X_1^{(b_1)}, ..., X_T^{(b_T)})`.
    pub fn path(&self, indices: &[usize]) -> Trajectory<F> {
        assert_eq!(indices.len(), self.horizon);
        let mut values = Vec::with_capacity(self.horizon * self.dim);
        for (k, &b) in indices.iter().enumerate() {
            values.extend_from_slice(self.particle(k, b));
        }
        Trajectory::from_flat(self.dim, values)
    }

    /// Checks the simplex invariant on every weight row.
    pub fn weights_are_normalised(&self) -> bool {
        let tol = F::simplex_tolerance(self.n);
        (0..self.horizon).all(|k| {
            let w = self.weights(k);
            let s: F = w.iter().copied().sum();
            w.iter().all(|&v| v >= F::zero()) && (s - F::one()).abs() <= tol
        })
    }
}
