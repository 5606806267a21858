use std::sync::Arc;

use rand_distr::{Binomial, Distribution, Gamma, Poisson};
use statrs::function::factorial::ln_binomial;
use statrs::function::gamma::ln_gamma;

use crate::adapt::RamState;
use crate::error::{invalid, Error, Result};
use crate::fk::{Constraint, Domain, Dynamics, FeynmanKac, InitialMeasure, Trajectory};
use crate::models::positive;
use crate::real::{logistic, normal_log_pdf, Real};
use crate::rng::RngStream;

/// State layout `(S, E, I, R, rho)`.
pub const SEIR_DIM: usize = 5;
const S: usize = 0;
const E: usize = 1;
const I: usize = 2;
const R: usize = 3;
const RHO: usize = 4;

/// Discrete-time stochastic SEIR with a random-walk transformed
/// reproduction number `R0 = r0_max * logistic(rho)` and negative binomial
/// case counts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeirParams<F> {
    pub popsize: u64,
    pub r0_max: F,
    /// Incubation rate; `1/a` is the mean incubation period.
    pub a: F,
    /// Recovery rate.
    pub gamma: F,
    /// Sampling effort: expected fraction of removals observed.
    pub e: F,
    /// Standard deviation of the `rho` increments.
    pub sigma: F,
    /// Failure probability of the count distribution.
    pub p: F,
}

impl<F: Real> SeirParams<F> {
    /// Population 1638469, `R0max = 10`, `a = 1/3`, `gamma = 1/7`,
    /// `e = 0.15`, with the given `sigma` and `p`.
    pub fn with_defaults(sigma: F, p: F) -> Self {
        Self {
            popsize: 1_638_469,
            r0_max: F::lit(10.0),
            a: F::lit(1.0 / 3.0),
            gamma: F::lit(1.0 / 7.0),
            e: F::lit(0.15),
            sigma,
            p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.popsize == 0 {
            return Err(invalid("popsize", "must be positive"));
        }
        positive("r0_max", self.r0_max)?;
        positive("a", self.a)?;
        positive("gamma", self.gamma)?;
        positive("sigma", self.sigma)?;
        if !(self.e > F::zero() && self.e <= F::one()) {
            return Err(invalid("e", "must lie in (0, 1]"));
        }
        if !(self.p > F::zero() && self.p < F::one()) {
            return Err(invalid("p", "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// `p_gamma = 1 - exp(-gamma)`.
    pub fn p_gamma(&self) -> f64 {
        -(-self.gamma.as_f64()).exp_m1()
    }

    /// `R0 = r0_max * logistic(rho)`.
    pub fn r0(&self, rho: F) -> F {
        self.r0_max * logistic(rho)
    }

    /// Negative binomial size `e p_gamma p/(1-p) I`, so the mean count is
    /// `e p_gamma I`.
    pub fn count_size(&self, infected: f64) -> f64 {
        let p = self.p.as_f64();
        self.e.as_f64() * self.p_gamma() * p / (1.0 - p) * infected
    }

    /// Infection rate `1 - exp(-beta I / N)` in log form:
    /// returns `(log p, log(1 - p))`.
    fn log_infection_prob(&self, rho: F, infected: f64) -> (f64, f64) {
        let beta = self.r0(rho).as_f64() * self.p_gamma();
        let rate = beta * infected / self.popsize as f64;
        ((-(-rate).exp_m1()).ln(), -rate)
    }

    /// Draws a case count given `I_k`.
    pub fn sample_count(&self, infected: f64, rng: &mut RngStream) -> u64 {
        let r = self.count_size(infected);
        if r <= 0.0 {
            return 0;
        }
        let p = self.p.as_f64();
        let lambda = Gamma::new(r, (1.0 - p) / p).expect("valid gamma parameters").sample(rng);
        if lambda <= 0.0 {
            return 0;
        }
        Poisson::new(lambda).map_or(lambda.round() as u64, |d| d.sample(rng) as u64)
    }
}

/// `log NB(y; r, p)` with pmf `Gamma(y+r)/(Gamma(r) y!) p^r (1-p)^y`.
/// A zero size is the point mass at zero.
pub fn negbin_log_pmf(y: u64, r: f64, p: f64) -> f64 {
    if r <= 0.0 {
        return if y == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let yf = y as f64;
    let mut out = ln_gamma(yf + r) - ln_gamma(r) - ln_gamma(yf + 1.0) + r * p.ln();
    if y > 0 {
        out += yf * (1.0 - p).ln();
    }
    out
}

fn log_binomial_pmf(n: u64, k: u64, log_p: f64, log_q: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let mut out = ln_binomial(n, k);
    if k > 0 {
        out += k as f64 * log_p;
    }
    if n > k {
        out += (n - k) as f64 * log_q;
    }
    out
}

fn count<F: Real>(x: F) -> Option<u64> {
    let v = x.as_f64();
    (v >= 0.0 && v.fract() == 0.0 && v.is_finite()).then_some(v as u64)
}

/// The set `S + E + I = N`, `S, E, I >= 0` integers, `R = 0`, `rho` free.
/// Proposals move `(rho, E, I)`; `E` and `I` are rounded and `S` is
/// recomputed.
#[derive(Clone, Copy, Debug)]
pub struct SeirConstraint {
    pub popsize: u64,
}

impl<F: Real> Constraint<F> for SeirConstraint {
    fn state_dim(&self) -> usize {
        SEIR_DIM
    }

    fn free_dim(&self) -> usize {
        3
    }

    fn contains(&self, x: &[F]) -> bool {
        if x.len() != SEIR_DIM || !x[RHO].is_finite() || x[R] != F::zero() {
            return false;
        }
        match (count(x[S]), count(x[E]), count(x[I])) {
            (Some(s), Some(e), Some(i)) => s + e + i == self.popsize,
            _ => false,
        }
    }

    fn to_free(&self, x: &[F]) -> Vec<F> {
        vec![x[RHO], x[E], x[I]]
    }

    fn from_free(&self, z: &[F]) -> Vec<F> {
        let e = z[1].round();
        let i = z[2].round();
        let s = F::lit(self.popsize as f64) - e - i;
        vec![s, e, i, F::zero(), z[0]]
    }
}

/// Case counts `y_{1:T}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeirData {
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct SeirModel<F> {
    params: SeirParams<F>,
    y: Vec<u64>,
    m1: InitialMeasure<F>,
    log_pa: (f64, f64),
    log_pg: (f64, f64),
}

pub fn make_seir<F: Real>(params: SeirParams<F>, y: Vec<u64>) -> Result<SeirModel<F>> {
    params.validate()?;
    if y.is_empty() {
        return Err(invalid("data", "at least one observation is required"));
    }
    let rates = |rate: f64| ((-(-rate).exp_m1()).ln(), -rate);
    Ok(SeirModel {
        m1: InitialMeasure::Uniform(Domain::Custom(Arc::new(SeirConstraint {
            popsize: params.popsize,
        }))),
        log_pa: rates(params.a.as_f64()),
        log_pg: rates(params.gamma.as_f64()),
        params,
        y,
    })
}

impl<F: Real> SeirModel<F> {
    pub fn params(&self) -> &SeirParams<F> {
        &self.params
    }

    pub fn data(&self) -> &[u64] {
        &self.y
    }

    /// Checks `S + E + I + R = N` with nonnegative integer compartments.
    pub fn check_counts(&self, x: &[F]) -> Result<()> {
        let c: Option<Vec<u64>> = x[..4].iter().map(|&v| count(v)).collect();
        match c {
            Some(c) if c.iter().sum::<u64>() == self.params.popsize => Ok(()),
            _ => Err(Error::InvalidCounts(format!("{:?}", &x[..4]))),
        }
    }
}

fn step<F: Real>(params: &SeirParams<F>, prev: &[F], rng: &mut RngStream, next: &mut [F]) {
    let s = count(prev[S]).expect("susceptible count");
    let e = count(prev[E]).expect("exposed count");
    let i = count(prev[I]).expect("infected count");
    let pg = params.p_gamma();
    let beta = params.r0(prev[RHO]).as_f64() * pg;
    let p_beta = -(-beta * i as f64 / params.popsize as f64).exp_m1();
    let p_a = -(-params.a.as_f64()).exp_m1();
    let binom = |n: u64, p: f64, rng: &mut RngStream| Binomial::new(n, p).expect("binomial parameters").sample(rng);
    let de = binom(s, p_beta, rng);
    let di = binom(e, p_a, rng);
    let dr = binom(i, pg, rng);
    next[S] = F::lit((s - de) as f64);
    next[E] = F::lit((e + de - di) as f64);
    next[I] = F::lit((i + di - dr) as f64);
    next[R] = prev[R] + F::lit(dr as f64);
    next[RHO] = prev[RHO] + params.sigma * F::std_normal(rng);
}

impl<F: Real> Dynamics<F> for SeirModel<F> {
    fn horizon(&self) -> usize {
        self.y.len()
    }

    fn state_dim(&self) -> usize {
        SEIR_DIM
    }

    fn sample_transition(&self, _k: usize, prev: &[F], rng: &mut RngStream, next: &mut [F]) {
        step(&self.params, prev, rng, next);
    }

    fn has_transition_density(&self) -> bool {
        true
    }

    /// Product of the three binomial pmfs and the Gaussian `rho` increment.
    fn log_transition_density(&self, _k: usize, prev: &[F], next: &[F]) -> Option<F> {
        let parse = |x: &[F]| -> Option<[i64; 4]> {
            Some([
                count(x[S])? as i64,
                count(x[E])? as i64,
                count(x[I])? as i64,
                count(x[R])? as i64,
            ])
        };
        let (Some(a), Some(b)) = (parse(prev), parse(next)) else {
            return Some(F::neg_infinity());
        };
        let de = a[0] - b[0];
        let di = a[1] + de - b[1];
        let dr = b[3] - a[3];
        if de < 0 || di < 0 || dr < 0 || de > a[0] || di > a[1] || dr > a[2] || b[2] != a[2] + di - dr {
            return Some(F::neg_infinity());
        }
        let (lpb, lqb) = self.params.log_infection_prob(prev[RHO], a[2] as f64);
        let mut out = log_binomial_pmf(a[0] as u64, de as u64, lpb, lqb);
        out += log_binomial_pmf(a[1] as u64, di as u64, self.log_pa.0, self.log_pa.1);
        out += log_binomial_pmf(a[2] as u64, dr as u64, self.log_pg.0, self.log_pg.1);
        let out = F::lit(out) + normal_log_pdf(next[RHO] - prev[RHO], F::zero(), self.params.sigma);
        Some(if out.is_nan() { F::neg_infinity() } else { out })
    }

    fn log_potential(&self, k: usize, _prev: Option<&[F]>, cur: &[F]) -> F {
        let infected = cur[I].as_f64().max(0.0);
        let r = self.params.count_size(infected);
        F::lit(negbin_log_pmf(self.y[k], r, self.params.p.as_f64()))
    }
}

impl<F: Real> FeynmanKac<F> for SeirModel<F> {
    fn initial(&self) -> &InitialMeasure<F> {
        &self.m1
    }
}

/// Simulates counts and the latent path from `E_1`, `I_1` (with `R_1 = 0`).
///
/// With `rho_path` given, `rho_k` follows it instead of the random walk.
pub fn simulate_seir<F: Real>(
    params: &SeirParams<F>,
    t: usize,
    e1: u64,
    i1: u64,
    rho1: F,
    rho_path: Option<&[F]>,
    rng: &mut RngStream,
) -> Result<(SeirData, Trajectory<F>)> {
    params.validate()?;
    if e1 + i1 > params.popsize {
        return Err(Error::InvalidCounts(format!("E1 + I1 = {} exceeds population", e1 + i1)));
    }
    if let Some(path) = rho_path {
        if path.len() != t {
            return Err(Error::DimensionMismatch {
                expected: t,
                got: path.len(),
            });
        }
    }
    let first_rho = rho_path.map_or(rho1, |p| p[0]);
    let mut x = vec![
        F::lit((params.popsize - e1 - i1) as f64),
        F::lit(e1 as f64),
        F::lit(i1 as f64),
        F::zero(),
        first_rho,
    ];
    let mut states = Vec::with_capacity(t);
    let mut counts = Vec::with_capacity(t);
    let mut next = vec![F::zero(); SEIR_DIM];
    for k in 0..t {
        if k > 0 {
            step(params, &x, rng, &mut next);
            if let Some(path) = rho_path {
                next[RHO] = path[k];
            }
            x.copy_from_slice(&next);
        }
        counts.push(params.sample_count(x[I].as_f64(), rng));
        states.push(x.clone());
    }
    Ok((SeirData { counts }, Trajectory::from_states(&states)))
}

/// Random-walk proposal for the initial block `(rho_1, E_1, I_1)` using the
/// RAM factor, followed by rounding and recomputation of `S_1`.
///
/// Returns the candidate state and the standard normal draw `u`.
pub fn seir_initial_block_proposal<F: Real>(
    current: &[F],
    ram: &RamState<F>,
    rng: &mut RngStream,
    popsize: u64,
) -> (Vec<F>, Vec<F>) {
    let u: Vec<F> = (0..3).map(|_| F::std_normal(rng)).collect();
    let step = ram.step(&u);
    (seir_block_move(current, &step, popsize), u)
}

/// The deterministic part of [`seir_initial_block_proposal`].
pub fn seir_block_move<F: Real>(current: &[F], step: &[F], popsize: u64) -> Vec<F> {
    let c = SeirConstraint { popsize };
    let mut z = Constraint::<F>::to_free(&c, current);
    z.iter_mut().zip(step).for_each(|(a, &b)| *a += b);
    c.from_free(&z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params() -> SeirParams<f64> {
        SeirParams::with_defaults(0.05, 0.1)
    }

    #[test]
    fn no_infected_no_cases() {
        let m = make_seir(params(), vec![0, 3]).unwrap();
        let x = [1000.0, 5.0, 0.0, 0.0, 0.0];
        assert_eq!(m.log_potential(0, None, &x), 0.0);
        assert_eq!(m.log_potential(1, None, &x), f64::NEG_INFINITY);
        let mut rng = RngStream::new(1, 0);
        assert_eq!(params().sample_count(0.0, &mut rng), 0);
    }

    #[test]
    fn negbin_mean_and_normalisation() {
        let p = params();
        let infected = 400.0;
        let r = p.count_size(infected);
        let (mut total, mut mean) = (0.0, 0.0);
        for y in 0..5000u64 {
            let w = negbin_log_pmf(y, r, 0.1).exp();
            total += w;
            mean += y as f64 * w;
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(mean, 0.15 * p.p_gamma() * infected, epsilon = 1e-6);
    }

    #[test]
    fn conservation_over_long_simulation() {
        let mut p = params();
        p.popsize = 100_000;
        let mut rng = RngStream::new(2, 0);
        let (_, x) = simulate_seir(&p, 10_000, 50, 20, 0.0, None, &mut rng).unwrap();
        let m = make_seir(p, vec![0]).unwrap();
        for s in x.states() {
            m.check_counts(s).unwrap();
        }
    }

    #[test]
    fn infection_draw_mean() {
        // beta = 0.3 through R0 = beta / p_gamma
        let mut p = params();
        p.popsize = 100_000;
        let beta = 0.3;
        let r0 = beta / p.p_gamma();
        let rho = crate::real::logit(r0 / p.r0_max);
        let prev = [1000.0, 0.0, 100.0, 98_900.0, rho];
        let mut rng = RngStream::new(3, 0);
        let mut next = [0.0; 5];
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            step(&p, &prev, &mut rng, &mut next);
            sum += 1000.0 - next[0];
        }
        let pb = 1.0 - (-0.0003f64).exp();
        let se = (1000.0 * pb * (1.0 - pb) / n as f64).sqrt();
        assert!((sum / n as f64 - 1000.0 * pb).abs() < 3.0 * se);
    }

    #[test]
    fn transition_density_matches_binomial_product() {
        let mut p = params();
        p.popsize = 1000;
        let m = make_seir(p, vec![0, 0]).unwrap();
        let prev = [900.0, 40.0, 60.0, 0.0, 0.5];
        let next = [890.0, 38.0, 64.0, 8.0, 0.45];
        let (de, di, dr) = (10u64, 12u64, 8u64);
        let pg = 1.0 - (-1.0f64 / 7.0).exp();
        let pa = 1.0 - (-1.0f64 / 3.0).exp();
        let beta = 10.0 * logistic(0.5) * pg;
        let pb = 1.0 - (-beta * 60.0 / 1000.0).exp();
        let lb = |n: u64, k: u64, q: f64| ln_binomial(n, k) + k as f64 * q.ln() + (n - k) as f64 * (1.0 - q).ln();
        let expect = lb(900, de, pb) + lb(40, di, pa) + lb(60, dr, pg) + normal_log_pdf(-0.05, 0.0, 0.05);
        assert_abs_diff_eq!(m.log_transition_density(1, &prev, &next).unwrap(), expect, epsilon = 1e-9);
        let bad = [890.0, 38.0, 65.0, 8.0, 0.45];
        assert_eq!(m.log_transition_density(1, &prev, &bad).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn constraint_membership() {
        let c = SeirConstraint { popsize: 100 };
        assert!(Constraint::<f64>::contains(&c, &[90.0, 6.0, 4.0, 0.0, 0.3]));
        assert!(!Constraint::<f64>::contains(&c, &[90.0, 6.0, 4.0, 1.0, 0.3]));
        assert!(!Constraint::<f64>::contains(&c, &[103.0, -3.0, 0.0, 0.0, 0.3]));
        assert!(!Constraint::<f64>::contains(&c, &[90.0, 6.5, 3.5, 0.0, 0.3]));
    }

    #[test]
    fn zero_step_reproduces_current() {
        let cur = [1000.0 - 30.0 - 12.0, 30.0, 12.0, 0.0, -0.4];
        let cand = seir_block_move(&cur, &[0.0, 0.0, 0.0], 1000);
        assert_eq!(cand, cur.to_vec());
    }

    #[test]
    fn negative_rounded_exposed_is_rejected() {
        let cur = [1000.0 - 2.0 - 12.0, 2.0, 12.0, 0.0, 0.0];
        let cand = seir_block_move(&cur, &[0.0, -5.2, 0.0], 1000);
        assert_eq!(cand[1], -3.0);
        let c = SeirConstraint { popsize: 1000 };
        assert!(!Constraint::<f64>::contains(&c, &cand));
    }

    #[test]
    fn rounding_bias_is_small() {
        let cur = [1000.0 - 40.0 - 12.0, 40.0, 12.0, 0.0, 0.0];
        let ram = RamState::with_factor(crate::linalg::Matrix::from_diag(&[0.1, 3.0, 2.0]));
        let mut rng = RngStream::new(5, 0);
        let n = 100_000;
        let (mut rounded, mut raw) = (0.0, 0.0);
        for _ in 0..n {
            let (cand, u) = seir_initial_block_proposal(&cur, &ram, &mut rng, 1000);
            rounded += cand[1];
            raw += 40.0 + 3.0 * u[1];
        }
        assert!(((rounded - raw) / n as f64).abs() < 0.5);
    }
}
