use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::linalg::{lower_mul_vec, Matrix};
use crate::real::Real;
use crate::rng::RngStream;

/// A constraint set with its own proposal coordinates.
///
/// Random-walk proposals move the *free* coordinates; `from_free` rebuilds a
/// full state (rounding integer coordinates if needed) and `contains` is the
/// indicator of the set.
pub trait Constraint<F>: Debug + Send + Sync {
    fn state_dim(&self) -> usize;
    fn free_dim(&self) -> usize;
    fn contains(&self, x: &[F]) -> bool;
    fn to_free(&self, x: &[F]) -> Vec<F>;
    fn from_free(&self, z: &[F]) -> Vec<F>;
}

#[derive(Clone, Debug)]
pub enum Domain<F> {
    /// The whole of `R^d`.
    All,
    /// Axis-aligned box; infinite bounds are allowed.
    Box { lower: Vec<F>, upper: Vec<F> },
    Custom(Arc<dyn Constraint<F>>),
}

impl<F: Real> Domain<F> {
    pub fn boxed(lower: Vec<F>, upper: Vec<F>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(invalid("domain", "box lower bounds must be below upper bounds"));
        }
        Ok(Domain::Box { lower, upper })
    }

    pub fn contains(&self, x: &[F]) -> bool {
        match self {
            Domain::All => x.iter().all(|v| !v.is_nan()),
            Domain::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&v, (&l, &u))| v >= l && v <= u),
            Domain::Custom(c) => c.contains(x),
        }
    }

    /// Dimension of the proposal coordinates for a state of dimension `d`.
    pub fn free_dim(&self, d: usize) -> usize {
        match self {
            Domain::Custom(c) => c.free_dim(),
            _ => d,
        }
    }

    pub fn to_free(&self, x: &[F]) -> Vec<F> {
        match self {
            Domain::Custom(c) => c.to_free(x),
            _ => x.to_vec(),
        }
    }

    pub fn from_free(&self, z: &[F]) -> Vec<F> {
        match self {
            Domain::Custom(c) => c.from_free(z),
            _ => z.to_vec(),
        }
    }
}

/// A Gaussian distribution with its Cholesky factor cached.
#[derive(Clone, Debug, PartialEq)]
pub struct Gaussian<F> {
    mean: Vec<F>,
    cov: Matrix<F>,
    chol: Matrix<F>,
}

impl<F: Real> Gaussian<F> {
    pub fn new(mean: Vec<F>, cov: Matrix<F>) -> Result<Self> {
        if !cov.is_square() || cov.rows() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                got: cov.rows(),
            });
        }
        let scale = cov.frobenius_norm().max(F::one());
        if cov.max_asymmetry() > F::lit(1e-10) * scale {
            return Err(Error::NotPositiveDefinite);
        }
        let chol = cov.cholesky()?;
        Ok(Self { mean, cov, chol })
    }

    /// Univariate `N(mean, sd^2)`.
    pub fn scalar(mean: F, sd: F) -> Result<Self> {
        if !(sd > F::zero()) {
            return Err(invalid("sd", "standard deviation must be positive"));
        }
        Self::new(vec![mean], Matrix::from_diag(&[sd * sd]))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[F] {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix<F> {
        &self.cov
    }

    pub fn chol(&self) -> &Matrix<F> {
        &self.chol
    }

    pub fn sample(&self, rng: &mut RngStream) -> Vec<F> {
        let z: Vec<F> = (0..self.dim()).map(|_| F::std_normal(rng)).collect();
        lower_mul_vec(&self.chol, &z)
            .into_iter()
            .zip(&self.mean)
            .map(|(a, &m)| a + m)
            .collect()
    }

    pub fn log_density(&self, x: &[F]) -> F {
        let diff: Vec<F> = x.iter().zip(&self.mean).map(|(&a, &m)| a - m).collect();
        let z = self.chol.solve_lower(&diff);
        let quad: F = z.iter().map(|&v| v * v).sum();
        let d = F::lit(self.dim() as f64);
        -F::lit(0.5) * (quad + d * (F::lit(2.0) * F::PI()).ln() + self.chol.log_det_from_cholesky())
    }
}

/// The initial measure `M1` of a Feynman-Kac model.
#[derive(Clone, Debug)]
pub enum InitialMeasure<F> {
    Gaussian(Gaussian<F>),
    /// The (possibly improper) uniform measure `1(x in D) dx`.
    Uniform(Domain<F>),
}

impl<F: Real> InitialMeasure<F> {
    pub fn domain(&self) -> Domain<F> {
        match self {
            InitialMeasure::Gaussian(_) => Domain::All,
            InitialMeasure::Uniform(d) => d.clone(),
        }
    }

    pub fn is_proper_gaussian(&self) -> bool {
        matches!(self, InitialMeasure::Gaussian(_))
    }

    pub fn gaussian(&self) -> Result<&Gaussian<F>> {
        match self {
            InitialMeasure::Gaussian(g) => Ok(g),
            InitialMeasure::Uniform(_) => Err(Error::ImproperM1),
        }
    }

    /// Draws from a normalised `M1`; uniform measures are rejected.
    pub fn sample(&self, rng: &mut RngStream) -> Result<Vec<F>> {
        self.gaussian().map(|g| g.sample(rng))
    }

    /// `log M1(x)` up to the measure's normalisation (0 or `-inf` for uniform).
    pub fn log_density(&self, x: &[F]) -> F {
        match self {
            InitialMeasure::Gaussian(g) => g.log_density(x),
            InitialMeasure::Uniform(d) => {
                if d.contains(x) {
                    F::zero()
                } else {
                    F::neg_infinity()
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_measure_cannot_be_sampled() {
        let m1: InitialMeasure<f64> = InitialMeasure::Uniform(Domain::All);
        let mut rng = RngStream::new(1, 0);
        assert_eq!(m1.sample(&mut rng), Err(Error::ImproperM1));
    }

    #[test]
    fn gaussian_rejects_non_spd() {
        let cov = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(Gaussian::new(vec![0.0, 0.0], cov).is_err());
        let asym = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]);
        assert!(Gaussian::new(vec![0.0, 0.0], asym).is_err());
    }

    #[test]
    fn gaussian_log_density_closed_form() {
        let g = Gaussian::scalar(1.0f64, 2.0).unwrap();
        let expected = -0.5 * (0.25f64 * 9.0) - 2f64.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((g.log_density(&[4.0]) - expected).abs() < 1e-12);
    }

    #[test]
    fn box_domain_membership() {
        let d = Domain::boxed(vec![0.0, f64::NEG_INFINITY], vec![1.0, 0.0]).unwrap();
        assert!(d.contains(&[0.5, -100.0]));
        assert!(!d.contains(&[1.5, -1.0]));
        assert!(!d.contains(&[0.5, 0.1]));
        assert!(Domain::boxed(vec![1.0], vec![0.0]).is_err());
    }
}
