//! Conditional particle filters with auxiliary-variable diffuse
//! initialisation, their adaptive variants, and particle Gibbs drivers.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`). Aliases for `f64` are provided at the crate root.
//!
//! ```
//! use diffcpf::drivers::{aai_cpf_run, initial_reference, InitScheme, RunConfig};
//! use diffcpf::models::{make_noisy_ar, simulate_noisy_ar, InitialSpread, NoisyArParams};
//! use diffcpf::RngStream;
//!
//! let params = NoisyArParams::random_walk(1.0, 1.0, InitialSpread::Gaussian { sd: 100.0 });
//! let mut rng = RngStream::new(7, 0);
//! let (y, _) = simulate_noisy_ar(&params, 20, 0.0, &mut rng).unwrap();
//! let model = make_noisy_ar(params, y).unwrap();
//! let x0 = initial_reference(&model, &[0.0], 100, &mut rng).unwrap();
//! let mut scheme = InitScheme::adaptive_cn(0.8);
//! let records = aai_cpf_run(x0, &mut scheme, &model, &RunConfig::new(16, 200), &mut rng).unwrap();
//! assert_eq!(records.len(), 200);
//! ```

pub mod adapt;
pub mod diagnostics;
pub mod drivers;
pub mod engine;
pub mod error;
pub mod fk;
pub mod kernels;
pub mod linalg;
pub mod models;
pub mod real;
pub mod rng;

pub use error::{Error, Result};
pub use real::Real;
pub use rng::RngStream;

pub type Trajectory64 = fk::Trajectory<f64>;
pub type ParticleSystem64 = fk::ParticleSystem<f64>;
pub type Matrix64 = linalg::Matrix<f64>;
pub type InitialMeasure64 = fk::InitialMeasure<f64>;
pub type Domain64 = fk::Domain<f64>;
pub type AdaptData64 = engine::AdaptData<f64>;
pub type ChainRecord64 = drivers::ChainRecord<f64>;
pub type InitScheme64 = drivers::InitScheme<f64>;
pub type RunConfig64 = drivers::RunConfig<f64>;
pub type NoisyAr64 = models::NoisyAr<f64>;
pub type SeirModel64 = models::SeirModel<f64>;

pub type Trajectory32 = fk::Trajectory<f32>;
pub type ChainRecord32 = drivers::ChainRecord<f32>;
