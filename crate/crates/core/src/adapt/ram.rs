use crate::linalg::Matrix;
use crate::real::Real;

/// Robust adaptive Metropolis shape factor.
#[derive(Clone, Debug, PartialEq)]
pub struct RamState<F> {
    /// Lower-triangular factor with positive diagonal.
    pub s: Matrix<F>,
    pub alpha_target: F,
    pub eta_max: F,
    pub gamma: F,
    /// Multiplies every step; `0` freezes the adaptation.
    pub eta_scale: F,
}

impl<F: Real> RamState<F> {
    /// `S_0 = I`, target 0.441, `eta_max = 0.5`, `gamma = 0.66`.
    pub fn new(d: usize) -> Self {
        Self::with_factor(Matrix::identity(d))
    }

    pub fn with_factor(s: Matrix<F>) -> Self {
        Self {
            s,
            alpha_target: F::lit(0.441),
            eta_max: F::lit(0.5),
            gamma: F::lit(0.66),
            eta_scale: F::one(),
        }
    }

    pub fn frozen(mut self) -> Self {
        self.eta_scale = F::zero();
        self
    }

    pub fn dim(&self) -> usize {
        self.s.rows()
    }

    /// `eta_n = min(eta_max, d n^-gamma)`.
    pub fn eta(&self, n: u64) -> F {
        let d = F::lit(self.dim() as f64);
        self.eta_max.min(d * F::lit(n as f64).powf(-self.gamma)) * self.eta_scale
    }

    /// Proposal increment `S u`.
    pub fn step(&self, u: &[F]) -> Vec<F> {
        crate::linalg::lower_mul_vec(&self.s, u)
    }

    /// Replaces `S` by the lower Cholesky factor of
    /// `S (I + eta (alpha - alpha*) u u' / |u|^2) S'`.
    pub fn update(&mut self, u: &[F], alpha: F, n: u64) {
        let eta = self.eta(n);
        self.update_with_eta(u, alpha, eta);
    }

    pub fn update_with_eta(&mut self, u: &[F], alpha: F, eta: F) {
        let norm2: F = u.iter().map(|&v| v * v).sum();
        let coef = eta * (alpha - self.alpha_target);
        if coef == F::zero() || norm2 == F::zero() || !norm2.is_finite() {
            return;
        }
        let d = self.dim();
        let m = Matrix::identity(d).add(&Matrix::outer(u, u).scaled(coef / norm2));
        let mut target = self.s.matmul(&m).matmul(&self.s.transpose());
        target.symmetrize();
        if let Ok(l) = target.cholesky() {
            self.s = l;
        }
    }

    /// The defining product for the next factor, for checking.
    pub fn target_product(&self, u: &[F], alpha: F, eta: F) -> Matrix<F> {
        let norm2: F = u.iter().map(|&v| v * v).sum();
        let coef = eta * (alpha - self.alpha_target);
        let m = Matrix::identity(self.dim()).add(&Matrix::outer(u, u).scaled(coef / norm2));
        self.s.matmul(&m).matmul(&self.s.transpose())
    }
}
