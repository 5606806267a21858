use crate::diagnostics::ks::ks_two_sample;
use crate::error::Result;
use crate::kernels::InitKernel;
use crate::real::Real;
use crate::rng::RngStream;

/// Source of (approximately) `M1`-distributed starting points.
pub enum StationaryStart<'a, F> {
    /// Exact draws from `M1`.
    Exact(&'a dyn Fn(&mut RngStream) -> Vec<F>),
    /// A single chain of the kernel itself: `burn_in` steps, then `thin`
    /// steps between consecutive pairs.
    BurnIn { start: Vec<F>, burn_in: usize, thin: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionTest {
    pub name: &'static str,
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReversibilityReport {
    pub n_pairs: usize,
    pub projections: Vec<ProjectionTest>,
}

impl ReversibilityReport {
    pub fn passes(&self, alpha: f64) -> bool {
        self.projections.iter().all(|p| p.p_value >= alpha)
    }

    pub fn min_p_value(&self) -> f64 {
        self.projections.iter().map(|p| p.p_value).fold(1.0, f64::min)
    }

    pub fn projection(&self, name: &str) -> Option<&ProjectionTest> {
        self.projections.iter().find(|p| p.name == name)
    }
}

type Projection = fn(f64, f64, f64, f64) -> f64;

// Arguments: (u.x0, u.x1, v.x0, v.x1), with u and v orthonormal directions.
const PROJECTIONS: [(&str, Projection, bool); 4] = [
    ("difference", |a, b, _, _| b - a, false),
    ("weighted-sum", |a, b, _, _| a + 2.0 * b, false),
    ("product", |a, b, _, _| a * b * b, false),
    ("cross-product", |_, b, c, _| c * b, true),
];

/// Compares the joint law of `(X0, X1)` with that of `(X1, X0)` where
/// `X0 ~ M1` and `X1 ~ Q(X0, .)`.
///
/// Pairs are split in two halves; for each projection `f` the values
/// `f(X0, X1)` of the first half are compared with `f(X1, X0)` of the second
/// half by a two-sample Kolmogorov-Smirnov test. Under detailed balance both
/// samples have the same law.
pub fn reversibility_test<F: Real, K: InitKernel<F> + ?Sized>(
    kernel: &K,
    start: StationaryStart<'_, F>,
    n_pairs: usize,
    rng: &mut RngStream,
) -> Result<ReversibilityReport> {
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(n_pairs);
    match start {
        StationaryStart::Exact(draw) => {
            for _ in 0..n_pairs {
                let x0 = draw(rng);
                let x1 = kernel.sample(&x0, rng)?;
                pairs.push((to_f64(&x0), to_f64(&x1)));
            }
        }
        StationaryStart::BurnIn { start, burn_in, thin } => {
            let mut x = start;
            for _ in 0..burn_in {
                x = kernel.sample(&x, rng)?;
            }
            for _ in 0..n_pairs {
                let x1 = kernel.sample(&x, rng)?;
                pairs.push((to_f64(&x), to_f64(&x1)));
                x = x1;
                for _ in 0..thin {
                    x = kernel.sample(&x, rng)?;
                }
            }
        }
    }
    let d = pairs.first().map_or(1, |p| p.0.len());
    let (u, v) = directions(d);
    let dot = |w: &[f64], x: &[f64]| w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    let half = n_pairs / 2;
    let mut projections = Vec::new();
    for (name, f, needs_two_dims) in PROJECTIONS {
        if needs_two_dims && d < 2 {
            continue;
        }
        let forward: Vec<f64> = pairs[..half]
            .iter()
            .map(|(x0, x1)| f(dot(&u, x0), dot(&u, x1), dot(&v, x0), dot(&v, x1)))
            .collect();
        let swapped: Vec<f64> = pairs[half..]
            .iter()
            .map(|(x0, x1)| f(dot(&u, x1), dot(&u, x0), dot(&v, x1), dot(&v, x0)))
            .collect();
        let ks = ks_two_sample(&forward, &swapped);
        projections.push(ProjectionTest {
            name,
            statistic: ks.statistic,
            p_value: ks.p_value,
        });
    }
    Ok(ReversibilityReport { n_pairs, projections })
}

fn to_f64<F: Real>(x: &[F]) -> Vec<f64> {
    x.iter().map(|v| v.as_f64()).collect()
}

fn directions(d: usize) -> (Vec<f64>, Vec<f64>) {
    let s = (d as f64).sqrt();
    let u = vec![1.0 / s; d];
    let mut v = vec![0.0; d];
    if d >= 2 {
        // alternate signs, then orthogonalise against u
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = if i % 2 == 0 { 1.0 } else { -1.0 };
        }
        let proj: f64 = v.iter().zip(&u).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(&u).for_each(|(a, b)| *a -= proj * b);
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
    }
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fk::{Domain, Gaussian};
    use crate::kernels::{CrankNicolsonKernel, RandomWalkKernel};
    use crate::linalg::Matrix;

    struct Broken {
        beta: f64,
    }

    impl InitKernel<f64> for Broken {
        fn sample(&self, x: &[f64], rng: &mut RngStream) -> Result<Vec<f64>> {
            Ok(vec![0.9 * x[0] + self.beta * f64::std_normal(rng)])
        }
    }

    #[test]
    fn crank_nicolson_is_reversible_in_two_dims() {
        let g = Gaussian::new(vec![1.0, -1.0], Matrix::from_rows(&[vec![2.0, 0.6], vec![0.6, 1.0]])).unwrap();
        let k = CrankNicolsonKernel::from_gaussian(&g, 0.5).unwrap();
        let draw = |rng: &mut RngStream| g.sample(rng);
        let mut rng = RngStream::new(3, 0);
        let rep = reversibility_test(&k, StationaryStart::Exact(&draw), 40_000, &mut rng).unwrap();
        assert_eq!(rep.projections.len(), 4);
        assert!(rep.passes(0.001), "{rep:?}");
    }

    #[test]
    fn broken_kernel_fails_difference_projection() {
        let g = Gaussian::scalar(2.0, 1.0).unwrap();
        let draw = |rng: &mut RngStream| g.sample(rng);
        let mut rng = RngStream::new(4, 0);
        let rep = reversibility_test(&Broken { beta: 0.5 }, StationaryStart::Exact(&draw), 20_000, &mut rng).unwrap();
        assert!(rep.projection("difference").unwrap().p_value < 1e-6);
    }

    #[test]
    fn box_walk_from_burn_in() {
        let dom = Domain::boxed(vec![0.0], vec![1.0]).unwrap();
        let k = RandomWalkKernel::new(Matrix::from_diag(&[0.04]), dom).unwrap();
        let mut rng = RngStream::new(5, 0);
        let start = StationaryStart::BurnIn {
            start: vec![0.2],
            burn_in: 1000,
            thin: 30,
        };
        let rep = reversibility_test(&k, start, 20_000, &mut rng).unwrap();
        assert!(rep.passes(0.001), "{rep:?}");
    }
}
