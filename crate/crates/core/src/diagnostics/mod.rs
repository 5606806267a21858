//! Chain-quality statistics for scalar MCMC output.

pub mod ks;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Shortest chain for which an IACT estimate is attempted.
pub const MIN_CHAIN_LEN: usize = 100;

/// Integrated autocorrelation time estimate.
///
/// `divergent` is set when the chain is constant (then `value` is `+inf`) or
/// when the positive-sequence sum did not terminate by lag `n/2` (then
/// `value` holds the truncated sum).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IactEstimate {
    pub value: f64,
    pub divergent: bool,
}

impl IactEstimate {
    pub fn finite(&self) -> Option<f64> {
        (!self.divergent).then_some(self.value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanCi {
    pub lo: f64,
    pub hi: f64,
    /// The interval has zero width (constant chain).
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainStats {
    pub n: usize,
    pub mean: f64,
    pub iact: IactEstimate,
    pub neff: f64,
    pub ire: f64,
    pub acf: Vec<f64>,
    pub mean_ci: MeanCi,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Biased (divide by `n`) autocovariances at lags `0..=max_lag`, via FFT.
fn autocovariance(chain: &[f64], max_lag: usize) -> Vec<f64> {
    let n = chain.len();
    let m = mean(chain);
    let len = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = chain
        .iter()
        .map(|&x| Complex::new(x - m, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(len)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    let scale = 1.0 / (len as f64 * n as f64);
    buf.iter().take(max_lag.min(n - 1) + 1).map(|c| c.re * scale).collect()
}

/// Sample autocorrelations at lags `0..=max_lag` (fewer if the chain is
/// shorter). A constant chain yields `[1, 0, 0, ...]`.
pub fn acf(chain: &[f64], max_lag: usize) -> Vec<f64> {
    if chain.is_empty() {
        return Vec::new();
    }
    let gamma = autocovariance(chain, max_lag);
    if gamma[0] <= 0.0 {
        let mut out = vec![0.0; gamma.len()];
        out[0] = 1.0;
        return out;
    }
    let mut out: Vec<f64> = gamma.iter().map(|g| g / gamma[0]).collect();
    out[0] = 1.0;
    out
}

/// IACT `1 + 2 sum_k rho_k`, truncated by Geyer's initial positive sequence
/// rule on the pair sums `rho_{2m} + rho_{2m+1}`.
pub fn iact(chain: &[f64]) -> Result<IactEstimate> {
    let n = chain.len();
    if n < MIN_CHAIN_LEN {
        return Err(Error::ChainTooShort { len: n, min: MIN_CHAIN_LEN });
    }
    let half = n / 2;
    let gamma = autocovariance(chain, half + 1);
    if gamma[0] <= 0.0 || !gamma[0].is_finite() {
        return Ok(IactEstimate {
            value: f64::INFINITY,
            divergent: true,
        });
    }
    let rho: Vec<f64> = gamma.iter().map(|g| g / gamma[0]).collect();
    let mut sum = 0.0f64;
    let mut m = 0;
    while 2 * m + 1 < rho.len() && 2 * m + 1 <= half {
        let pair = rho[2 * m] + rho[2 * m + 1];
        if pair <= 0.0 {
            return Ok(IactEstimate {
                value: (2.0 * sum - 1.0).max(1.0 / n as f64),
                divergent: false,
            });
        }
        sum += pair;
        m += 1;
    }
    Ok(IactEstimate {
        value: 2.0 * sum - 1.0,
        divergent: true,
    })
}

/// Effective sample size `n / IACT`.
pub fn neff(n: usize, iact: f64) -> f64 {
    n as f64 / iact
}

/// Inverse relative efficiency `IACT * N`.
pub fn ire(iact: f64, n_particles: usize) -> f64 {
    iact * n_particles as f64
}

/// `mean +- z sd sqrt(IACT / n)`.
pub fn mean_ci(chain: &[f64], level: f64) -> Result<MeanCi> {
    if !(0.0..1.0).contains(&level) || level == 0.0 {
        return Err(crate::error::invalid("level", "must lie in (0, 1)"));
    }
    let est = iact(chain)?;
    let m = mean(chain);
    if est.value.is_infinite() {
        return Ok(MeanCi {
            lo: m,
            hi: m,
            degenerate: true,
        });
    }
    let n = chain.len() as f64;
    let var = chain.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    let half = z * (var * est.value / n).sqrt();
    Ok(MeanCi {
        lo: m - half,
        hi: m + half,
        degenerate: half == 0.0,
    })
}

/// All statistics for one scalar chain produced with `n_particles`.
pub fn chain_stats(chain: &[f64], n_particles: usize) -> Result<ChainStats> {
    let est = iact(chain)?;
    Ok(ChainStats {
        n: chain.len(),
        mean: mean(chain),
        iact: est,
        neff: neff(chain.len(), est.value),
        ire: ire(est.value, n_particles),
        acf: acf(chain, 50),
        mean_ci: mean_ci(chain, 0.95)?,
    })
}
