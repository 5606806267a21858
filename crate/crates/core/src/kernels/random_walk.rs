use crate::error::{Error, Result};
use crate::fk::Domain;
use crate::kernels::InitKernel;
use crate::linalg::{lower_mul_vec, Matrix};
use crate::real::Real;
use crate::rng::RngStream;

/// Gaussian random walk `N(y; x, C)` with Metropolis-Hastings rejection
/// against the indicator `1(y in D)`.
///
/// The walk moves the domain's free coordinates; for custom domains the
/// proposal is mapped back to a full state (possibly rounded) before the
/// indicator is evaluated.
#[derive(Clone, Debug)]
pub struct RandomWalkKernel<F> {
    cov: Matrix<F>,
    chol: Matrix<F>,
    domain: Domain<F>,
}

impl<F: Real> RandomWalkKernel<F> {
    pub fn new(cov: Matrix<F>, domain: Domain<F>) -> Result<Self> {
        if !cov.is_square() {
            return Err(Error::DimensionMismatch {
                expected: cov.rows(),
                got: cov.cols(),
            });
        }
        let chol = cov.cholesky_jittered()?;
        Ok(Self { cov, chol, domain })
    }

    pub fn cov(&self) -> &Matrix<F> {
        &self.cov
    }

    pub fn chol(&self) -> &Matrix<F> {
        &self.chol
    }

    pub fn domain(&self) -> &Domain<F> {
        &self.domain
    }

    /// Full-state proposal `from_free(to_free(x) + chol u)`.
    pub fn propose(&self, x: &[F], rng: &mut RngStream) -> Vec<F> {
        let mut z = self.domain.to_free(x);
        let u: Vec<F> = (0..z.len()).map(|_| F::std_normal(rng)).collect();
        let step = lower_mul_vec(&self.chol, &u);
        z.iter_mut().zip(step).for_each(|(a, b)| *a += b);
        self.domain.from_free(&z)
    }

    /// Accept/reject a given proposal. `M1` is an indicator, so the
    /// acceptance probability is either zero or one.
    pub fn accept_proposal(&self, x: &[F], proposal: Vec<F>) -> (Vec<F>, bool) {
        if self.domain.contains(&proposal) {
            (proposal, true)
        } else {
            (x.to_vec(), false)
        }
    }

    pub fn rw_mh_sample(&self, x: &[F], rng: &mut RngStream) -> Result<(Vec<F>, bool)> {
        if !self.domain.contains(x) {
            return Err(Error::StartOutsideDomain);
        }
        let proposal = self.propose(x, rng);
        Ok(self.accept_proposal(x, proposal))
    }
}

impl<F: Real> InitKernel<F> for RandomWalkKernel<F> {
    fn sample(&self, x: &[F], rng: &mut RngStream) -> Result<Vec<F>> {
        self.rw_mh_sample(x, rng).map(|(y, _)| y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::ks::ks_two_sample;

    #[test]
    fn unconstrained_walk_always_accepts() {
        let k = RandomWalkKernel::new(Matrix::from_diag(&[2.0f64]), Domain::All).unwrap();
        let mut rng = RngStream::new(1, 0);
        let mut x = vec![0.0];
        for _ in 0..10_000 {
            let (y, acc) = k.rw_mh_sample(&x, &mut rng).unwrap();
            assert!(acc);
            x = y;
        }
    }

    #[test]
    fn forced_proposal_outside_box_is_rejected() {
        let dom = Domain::boxed(vec![0.0f64], vec![1.0]).unwrap();
        let k = RandomWalkKernel::new(Matrix::from_diag(&[0.04]), dom).unwrap();
        let (y, acc) = k.accept_proposal(&[0.5], vec![2.0]);
        assert_eq!(y, vec![0.5]);
        assert!(!acc);
    }

    #[test]
    fn start_outside_domain_is_an_error() {
        let dom = Domain::boxed(vec![0.0f64], vec![1.0]).unwrap();
        let k = RandomWalkKernel::new(Matrix::from_diag(&[0.04]), dom).unwrap();
        let mut rng = RngStream::new(1, 0);
        assert_eq!(k.rw_mh_sample(&[1.5], &mut rng).unwrap_err(), Error::StartOutsideDomain);
    }

    #[test]
    fn box_chain_occupancy_is_uniform() {
        // Oracle: the uniform law on [0,1] puts mass 1/2 on [0, 0.5].
        let dom = Domain::boxed(vec![0.0f64], vec![1.0]).unwrap();
        let k = RandomWalkKernel::new(Matrix::from_diag(&[0.04]), dom).unwrap();
        let mut rng = RngStream::new(77, 0);
        let mut x = vec![0.3];
        let n = 1_000_000;
        let batches = 200;
        let per = n / batches;
        let mut batch_means = Vec::with_capacity(batches);
        for _ in 0..batches {
            let mut hits = 0usize;
            for _ in 0..per {
                x = k.sample(&x, &mut rng).unwrap();
                hits += usize::from(x[0] <= 0.5);
            }
            batch_means.push(hits as f64 / per as f64);
        }
        let mean = batch_means.iter().sum::<f64>() / batches as f64;
        let var = batch_means.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
        let se = (var / batches as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * se, "occupancy {mean} (se {se})");
    }

    #[test]
    fn unconstrained_increments_are_symmetric() {
        let cov = Matrix::from_rows(&[vec![1.0f64, 0.3], vec![0.3, 0.5]]);
        let k = RandomWalkKernel::new(cov, Domain::All).unwrap();
        let mut rng = RngStream::new(12, 0);
        let x = [1.0, -2.0];
        let n = 20_000;
        let inc: Vec<f64> = (0..n)
            .map(|_| {
                let y = k.sample(&x, &mut rng).unwrap();
                (y[0] - x[0]) + 0.7 * (y[1] - x[1])
            })
            .collect();
        let (a, b) = inc.split_at(n / 2);
        let flipped: Vec<f64> = b.iter().map(|v| -v).collect();
        assert!(ks_two_sample(a, &flipped).p_value > 0.001);
    }
}
