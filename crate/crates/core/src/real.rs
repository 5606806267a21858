use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating point scalar used throughout the crate: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Draws from the standard normal distribution.
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draws from the uniform distribution on `[0, 1)`.
    fn std_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// Tolerance used when checking that a weight vector sums to one.
    fn simplex_tolerance(n: usize) -> Self {
        Self::epsilon() * Self::lit(4.0 * (n.max(1) as f64))
    }
}

impl Real for f32 {
    #[inline]
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    #[inline]
    fn std_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f32>()
    }
}

impl Real for f64 {
    #[inline]
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    #[inline]
    fn std_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f64>()
    }
}

/// `log(1 + exp(x))`-free logistic function.
pub fn logistic<F: Real>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

pub fn logit<F: Real>(p: F) -> F {
    (p / (F::one() - p)).ln()
}

/// `log(sum(exp(xs)))`, returning `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp<F: Real>(xs: &[F]) -> F {
    let max = xs.iter().copied().fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() {
        return max;
    }
    let s: F = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}

/// Log-density of `N(mean, sd^2)` at `x`.
pub fn normal_log_pdf<F: Real>(x: F, mean: F, sd: F) -> F {
    let z = (x - mean) / sd;
    -F::lit(0.5) * z * z - sd.ln() - F::lit(0.5) * (F::lit(2.0) * F::PI()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_matches_logit_inverse() {
        for &x in &[-30.0, -2.0, 0.0, 0.2, 5.0, 40.0] {
            let p = logistic(x);
            assert!(p > 0.0 && p <= 1.0);
            if x.abs() < 20.0 {
                assert!((logit(p) - x).abs() < 1e-9);
            }
        }
        assert!((logistic(0.2f64) - 0.549_833_997_312_478).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_handles_neg_infinity() {
        assert_eq!(log_sum_exp::<f64>(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        let v = log_sum_exp(&[0.0f64, 0.0]);
        assert!((v - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn normal_log_pdf_at_mode() {
        let v = normal_log_pdf(0.0f64, 0.0, 1.0);
        assert!((v + 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-15);
    }
}
