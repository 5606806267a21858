use crate::error::{Error, Result};
use crate::real::Real;
use crate::rng::RngStream;

/// Normalises log-weights into probabilities.
///
/// Returns the probability vector and `log(mean(exp(log_weights)))`.
/// Computed by max-subtraction, so adding a constant to every entry does not
/// change the probabilities.
pub fn normalize_weights<F: Real>(log_weights: &[F]) -> Result<(Vec<F>, F)> {
    assert!(!log_weights.is_empty(), "normalize_weights needs at least one weight");
    if log_weights.iter().any(|w| w.is_nan()) {
        return Err(Error::NonFiniteTarget("log weight is NaN".into()));
    }
    let max = log_weights.iter().copied().fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() {
        return Err(Error::AllWeightsZero {
            context: format!("{} particles", log_weights.len()),
        });
    }
    if max == F::infinity() {
        return Err(Error::NonFiniteTarget("log weight is +inf".into()));
    }
    let mut probs: Vec<F> = log_weights.iter().map(|&w| (w - max).exp()).collect();
    let total: F = probs.iter().copied().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    let n = F::lit(log_weights.len() as f64);
    Ok((probs, max + total.ln() - n.ln()))
}

/// Draws an index `i` with probability `probs[i]` (zero-based).
pub fn categorical_sample<F: Real>(rng: &mut RngStream, probs: &[F]) -> usize {
    debug_assert!(!probs.is_empty());
    let total: F = probs.iter().copied().sum();
    let u = F::std_uniform(rng) * total;
    let mut acc = F::zero();
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > F::zero() {
            acc += p;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

/// Fills `out` with i.i.d. categorical draws from `probs`.
///
/// Uses one uniform per draw and a binary search on the cumulative sums, so
/// each draw has the same law as [`categorical_sample`].
pub fn multinomial_resample<F: Real>(rng: &mut RngStream, probs: &[F], out: &mut [usize]) {
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = F::zero();
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        cumulative.push(acc);
        if p > F::zero() {
            last_positive = i;
        }
    }
    for slot in out.iter_mut() {
        let u = F::std_uniform(rng) * acc;
        let idx = cumulative.partition_point(|&c| c <= u);
        *slot = idx.min(last_positive);
    }
}
