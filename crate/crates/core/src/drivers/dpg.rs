use crate::adapt::RamState;
use crate::drivers::{check_reference, ram_mh_step, ChainRecord, RunConfig};
use crate::engine::{forward_cpf, pick_path_bs, AdaptData};
use crate::error::{Error, Result};
use crate::fk::{Dynamics, FeynmanKac, Trajectory};
use crate::real::Real;
use crate::rng::RngStream;

/// The model restricted to `x_{2:T}` with `x_1` held fixed.
///
/// Time `k` of the tail is time `k + 1` of the original model; the first
/// potential is `G_2(x_1, x_2)` and the first particles come from
/// `M_2(x_1, .)`.
pub struct ConditionedTail<'a, F, M: ?Sized> {
    pub model: &'a M,
    pub x1: &'a [F],
}

impl<F: Real, M: Dynamics<F> + ?Sized> Dynamics<F> for ConditionedTail<'_, F, M> {
    fn horizon(&self) -> usize {
        self.model.horizon() - 1
    }

    fn state_dim(&self) -> usize {
        self.model.state_dim()
    }

    fn sample_transition(&self, k: usize, prev: &[F], rng: &mut RngStream, next: &mut [F]) {
        self.model.sample_transition(k + 1, prev, rng, next)
    }

    fn has_transition_density(&self) -> bool {
        self.model.has_transition_density()
    }

    fn log_transition_density(&self, k: usize, prev: &[F], next: &[F]) -> Option<F> {
        self.model.log_transition_density(k + 1, prev, next)
    }

    fn log_potential(&self, k: usize, prev: Option<&[F]>, cur: &[F]) -> F {
        let prev = if k == 0 { Some(self.x1) } else { prev };
        self.model.log_potential(k + 1, prev, cur)
    }
}

/// `log M1(x1) + log G1(x1) + log M2(x1, x2) + log G2(x1, x2)`.
fn log_dpg_target<F: Real, M: FeynmanKac<F> + ?Sized>(model: &M, x1: &[F], x2: Option<&[F]>) -> Result<F> {
    let mut out = model.initial().log_density(x1);
    if out == F::neg_infinity() {
        return Ok(out);
    }
    out += model.log_potential(0, None, x1);
    if let Some(x2) = x2 {
        if out == F::neg_infinity() {
            return Ok(out);
        }
        out += model
            .log_transition_density(1, x1, x2)
            .ok_or(Error::MissingTransitionDensity)?;
        out += model.log_potential(1, Some(x1), x2);
    }
    Ok(out)
}

/// Particle Gibbs treating `x_1` as a parameter: CPF-BS for `x_{2:T}` given
/// `x_1`, then one RAM-adapted random-walk Metropolis step for `x_1`.
///
/// The walk moves the free coordinates of the initial measure's domain, so
/// constrained initial states (e.g. SEIR) are proposed by rounding and
/// recomputing dependent coordinates.
pub fn dpg_bs_run<F: Real, M: FeynmanKac<F> + ?Sized>(
    x0: Trajectory<F>,
    model: &M,
    ram: &mut RamState<F>,
    cfg: &RunConfig<F>,
    rng: &mut RngStream,
) -> Result<Vec<ChainRecord<F>>> {
    cfg.validate()?;
    check_reference(model, &x0)?;
    let domain = model.initial().domain();
    let d = model.state_dim();
    let t = model.horizon();
    if ram.dim() != domain.free_dim(d) {
        return Err(Error::DimensionMismatch {
            expected: domain.free_dim(d),
            got: ram.dim(),
        });
    }
    if t > 1 && !model.has_transition_density() {
        return Err(Error::MissingTransitionDensity);
    }
    let n = cfg.n_particles;
    let mut x = x0;
    let mut records = Vec::with_capacity(cfg.n_records());
    for j in 1..=cfg.n_iters {
        let mut alpha = F::zero();
        if t > 1 {
            let tail_ref = x.tail(1);
            let x1 = x.state(0).to_vec();
            let tail = ConditionedTail { model, x1: &x1 };
            let mut first = Vec::with_capacity(n * d);
            first.extend_from_slice(tail_ref.state(0));
            let mut buf = vec![F::zero(); d];
            for _ in 1..n {
                model.sample_transition(1, &x1, rng, &mut buf);
                first.extend_from_slice(&buf);
            }
            let ps = forward_cpf(&tail_ref, &first, &tail, rng)?;
            let (b, data): (Vec<usize>, AdaptData<F>) = pick_path_bs(&ps, &tail, rng)?;
            alpha = data.alpha();
            let new_tail = ps.path(&b);
            let mut flat = x1;
            flat.extend_from_slice(new_tail.as_flat());
            x = Trajectory::from_flat(d, flat);
        }
        let x2 = (t > 1).then(|| x.state(1).to_vec());
        let x1 = x.state(0).to_vec();
        let current = log_dpg_target(model, &x1, x2.as_deref())?;
        let (new_x1, _, block_alpha, accepted) = ram_mh_step(
            &x1,
            current,
            ram,
            j as u64,
            rng,
            |cur, step| {
                let mut z = domain.to_free(cur);
                z.iter_mut().zip(step).for_each(|(a, &b)| *a += b);
                domain.from_free(&z)
            },
            |cand| {
                if !domain.contains(cand) {
                    return Ok(F::neg_infinity());
                }
                log_dpg_target(model, cand, x2.as_deref())
            },
        )?;
        if accepted {
            x.state_mut(0).copy_from_slice(&new_x1);
        }
        if cfg.keeps(j) {
            records.push(ChainRecord {
                iter: j,
                trajectory: x.clone(),
                theta: None,
                alpha,
                block_alpha: Some(block_alpha),
                block_accepted: Some(accepted),
                adapt: Default::default(),
            });
        }
    }
    Ok(records)
}
