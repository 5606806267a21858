//! Posterior predictive simulation of SEIR case counts.

use diffcpf::drivers::SeirHyper;
use diffcpf::models::SeirParams;
use diffcpf::{ChainRecord64, RngStream};

const INFECTED: usize = 2;

/// Draws one count series per record from the observation model, using the
/// record's infected path and, when present, its hyperparameters.
///
/// Returns `records.len()` rows of length `T`.
pub fn posterior_predictive(records: &[ChainRecord64], hyper: &SeirHyper<f64>, rng: &mut RngStream) -> Vec<Vec<u64>> {
    records
        .iter()
        .map(|r| {
            let params: SeirParams<f64> = r.theta.as_deref().map_or(hyper.base, |t| hyper.params_at(t));
            r.trajectory
                .states()
                .map(|x| params.sample_count(x[INFECTED], rng))
                .collect()
        })
        .collect()
}

/// Pointwise `(lo, hi)` empirical quantiles of predictive draws.
pub fn predictive_band(draws: &[Vec<u64>], lo: f64, hi: f64) -> Vec<(u64, u64)> {
    let t = draws.first().map_or(0, Vec::len);
    (0..t)
        .map(|k| {
            let mut col: Vec<u64> = draws.iter().map(|d| d[k]).collect();
            col.sort_unstable();
            let at = |q: f64| col[((q * (col.len() - 1) as f64).round() as usize).min(col.len() - 1)];
            (at(lo), at(hi))
        })
        .collect()
}
