use diffcpf::fk::{Domain, Gaussian};
use diffcpf::kernels::{reversibility_test, CrankNicolsonKernel, RandomWalkKernel, StationaryStart};
use diffcpf::linalg::Matrix;
use diffcpf::RngStream;

#[test]
fn crank_nicolson_is_reversible_for_several_betas() {
    let g = Gaussian::new(vec![0.5, 2.0], Matrix::from_rows(&[vec![1.0, -0.3], vec![-0.3, 0.5]])).unwrap();
    let draw = |rng: &mut RngStream| g.sample(rng);
    for (i, beta) in [0.1, 0.5, 1.0].into_iter().enumerate() {
        let k = CrankNicolsonKernel::from_gaussian(&g, beta).unwrap();
        let rep = reversibility_test(&k, StationaryStart::Exact(&draw), 20_000, &mut RngStream::new(40 + i as u64, 0)).unwrap();
        assert!(rep.passes(1e-3), "beta {beta}: {rep:?}");
    }
}

#[test]
fn two_dimensional_box_walk_is_reversible() {
    let dom = Domain::boxed(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
    let k = RandomWalkKernel::new(Matrix::from_diag(&[0.05, 0.2]), dom).unwrap();
    let start = StationaryStart::BurnIn {
        start: vec![0.5, 0.0],
        burn_in: 500,
        thin: 40,
    };
    let rep = reversibility_test(&k, start, 20_000, &mut RngStream::new(44, 0)).unwrap();
    assert!(rep.passes(1e-3), "{rep:?}");
}
