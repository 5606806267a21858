use crate::error::{invalid, Result};
use crate::fk::{Gaussian, InitialMeasure};
use crate::kernels::InitKernel;
use crate::linalg::{lower_mul_vec, Matrix};
use crate::real::Real;
use crate::rng::RngStream;

/// `Z = sqrt(1 - beta^2) (x - mu) + beta W + mu`, `W ~ N(0, Sigma)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrankNicolsonKernel<F> {
    mean: Vec<F>,
    cov: Matrix<F>,
    chol: Matrix<F>,
    beta: F,
    persistence: F,
}

impl<F: Real> CrankNicolsonKernel<F> {
    pub fn new(mean: Vec<F>, cov: Matrix<F>, beta: F) -> Result<Self> {
        let g = Gaussian::new(mean, cov)?;
        Self::from_gaussian(&g, beta)
    }

    pub fn from_gaussian(g: &Gaussian<F>, beta: F) -> Result<Self> {
        if !(beta > F::zero() && beta <= F::one()) {
            return Err(invalid("beta", format!("must lie in (0, 1], got {beta}")));
        }
        Ok(Self {
            mean: g.mean().to_vec(),
            cov: g.cov().clone(),
            chol: g.chol().clone(),
            beta,
            persistence: (F::one() - beta * beta).sqrt(),
        })
    }

    pub fn beta(&self) -> F {
        self.beta
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

    /// The autoregression with the Gaussian innovation `w` supplied.
    pub fn transform(&self, x: &[F], w: &[F]) -> Vec<F> {
        x.iter()
            .zip(w)
            .zip(&self.mean)
            .map(|((&xi, &wi), &mi)| self.persistence * (xi - mi) + self.beta * wi + mi)
            .collect()
    }

    pub fn cn_sample(&self, x: &[F], rng: &mut RngStream) -> Vec<F> {
        let z: Vec<F> = (0..self.mean.len()).map(|_| F::std_normal(rng)).collect();
        let w = lower_mul_vec(&self.chol, &z);
        self.transform(x, &w)
    }
}

impl<F: Real> InitKernel<F> for CrankNicolsonKernel<F> {
    fn sample(&self, x: &[F], rng: &mut RngStream) -> Result<Vec<F>> {
        Ok(self.cn_sample(x, rng))
    }
}

/// `Q(x, .) = M1` for a Gaussian `M1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactM1Kernel<F> {
    m1: Gaussian<F>,
}

impl<F: Real> ExactM1Kernel<F> {
    pub fn new(m1: Gaussian<F>) -> Self {
        Self { m1 }
    }

    pub fn measure(&self) -> &Gaussian<F> {
        &self.m1
    }
}

impl<F: Real> InitKernel<F> for ExactM1Kernel<F> {
    fn sample(&self, _x: &[F], rng: &mut RngStream) -> Result<Vec<F>> {
        Ok(self.m1.sample(rng))
    }

    fn is_exact_m1_draw(&self) -> bool {
        true
    }
}

/// The kernel that turns the auxiliary-initialisation step into a standard CPF.
pub fn exact_m1_kernel<F: Real>(m1: &InitialMeasure<F>) -> Result<ExactM1Kernel<F>> {
    Ok(ExactM1Kernel::new(m1.gaussian()?.clone()))
}
