mod common;

use common::rw_model;
use diffcpf::engine::{ai_cpf_step, forward_cpf, PathSelector};
use diffcpf::fk::{normalize_weights, FeynmanKac, Trajectory};
use diffcpf::kernels::{exact_m1_kernel, Kernel, RandomWalkKernel};
use diffcpf::linalg::Matrix;
use diffcpf::fk::Domain;
use diffcpf::models::InitialSpread;
use diffcpf::RngStream;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalised_weights_sum_to_one(logs in prop::collection::vec(-50.0f64..50.0, 1..40)) {
        let (w, _) = normalize_weights(&logs).unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(w.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn weights_ignore_constant_shift(logs in prop::collection::vec(-20.0f64..20.0, 1..20), c in -300.0f64..300.0) {
        let (a, _) = normalize_weights(&logs).unwrap();
        let shifted: Vec<f64> = logs.iter().map(|l| l + c).collect();
        let (b, _) = normalize_weights(&shifted).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn reference_stays_pinned(seed in 0u64..1000, n in 2usize..12, t in 1usize..10) {
        let model = rw_model(t, InitialSpread::Gaussian { sd: 2.0 }, 1.0, seed);
        let mut rng = RngStream::new(seed, 1);
        let reference = Trajectory::from_scalars(&(0..t).map(|k| k as f64 * 0.1).collect::<Vec<_>>());
        let kernel = exact_m1_kernel(model.initial()).unwrap();
        let mut first = reference.state(0).to_vec();
        for _ in 1..n {
            first.push(model.initial().sample(&mut rng).unwrap()[0]);
        }
        let ps = forward_cpf(&reference, &first, &model, &mut rng).unwrap();
        prop_assert!(ps.weights_are_normalised());
        for k in 0..t {
            prop_assert_eq!(ps.particle(k, 0), reference.state(k));
            if k + 1 < t {
                prop_assert_eq!(ps.ancestor(k, 0), 0);
            }
        }
        let (out, data) = ai_cpf_step(&reference, &kernel, &model, PathSelector::BackwardSampling, n, &mut rng).unwrap();
        prop_assert_eq!(out.len(), t);
        prop_assert!((0.0..=1.0).contains(&data.alpha()));
        prop_assert_eq!(data.particle(0), reference.state(0));
    }

    #[test]
    fn box_walk_output_stays_in_box(seed in 0u64..1000, x in 0.0f64..1.0) {
        let dom = Domain::boxed(vec![0.0], vec![1.0]).unwrap();
        let kernel = Kernel::RandomWalk(RandomWalkKernel::new(Matrix::from_diag(&[4.0]), dom.clone()).unwrap());
        let mut rng = RngStream::new(seed, 2);
        let mut state = vec![x];
        for _ in 0..50 {
            state = diffcpf::kernels::InitKernel::sample(&kernel, &state, &mut rng).unwrap();
            prop_assert!(dom.contains(&state));
        }
    }

    #[test]
    fn same_seed_same_output(seed in 0u64..1000) {
        let model = rw_model(6, InitialSpread::Flat, 1.0, seed);
        let reference = Trajectory::from_scalars(&[0.0; 6]);
        let kernel = RandomWalkKernel::new(Matrix::from_diag(&[1.0]), Domain::All).unwrap();
        let a = ai_cpf_step(&reference, &kernel, &model, PathSelector::BackwardSampling, 5, &mut RngStream::new(seed, 3)).unwrap();
        let b = ai_cpf_step(&reference, &kernel, &model, PathSelector::BackwardSampling, 5, &mut RngStream::new(seed, 3)).unwrap();
        prop_assert_eq!(a.0, b.0);
    }
}
