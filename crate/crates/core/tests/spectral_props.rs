use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wegnerlab::disorder::DensityModel;
use wegnerlab::hamiltonian::{HamiltonianMatrix, PeriodicPotential};
use wegnerlab::lattice::{BoundaryCondition, BoxGeometry};
use wegnerlab::model::AlloyModel;
use wegnerlab::spectral::{
    counting_function, eigenvalues, random_symmetric, site_diagonal_projection, trace_projection, Interval,
    Provenance,
};
use wegnerlab::toeplitz::ConvolutionVector;

fn model(a1: f64, bc: BoundaryCondition) -> AlloyModel {
    AlloyModel {
        alpha: ConvolutionVector::one_dim(&[(0, 1.0), (1, a1)]).unwrap(),
        density: DensityModel::triangle(-0.5, 1.0).unwrap(),
        v0: PeriodicPotential::zero(),
        bc,
    }
}

#[test]
fn counting_function_is_monotone() {
    for i in 0..100u64 {
        let m = model(-0.4 + 0.008 * i as f64, BoundaryCondition::Periodic);
        let g = m.geometry(12).unwrap();
        let s = m.spectrum(&g, 5, i, "").unwrap();
        let mut prev = 0.0;
        for k in 0..50 {
            let n = counting_function(&s, -1.0 + 0.15 * k as f64);
            assert!(n >= prev);
            prev = n;
        }
        assert_eq!(counting_function(&s, f64::INFINITY), 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn site_projections_sum_to_the_trace(a1 in -0.9..0.9f64, seed in any::<u64>(), lo in -1.0..3.0f64, w in 0.0..3.0f64) {
        let m = model(a1, BoundaryCondition::Dirichlet);
        let g = m.geometry(9).unwrap();
        let omega = m.sample(&g, seed, 0);
        let h = m.hamiltonian(&g, &omega).unwrap();
        let iv = Interval::new(lo, lo + w);
        let s = eigenvalues(&h, &Provenance::default()).unwrap();
        let total: f64 = (0..h.dim()).map(|j| site_diagonal_projection(&h, &iv, j).unwrap()).sum();
        prop_assert!((total - trace_projection(&s, &iv) as f64).abs() <= 1e-9);
    }

    #[test]
    fn rank_one_shift_moves_eigenvalues_by_at_most_t(n in 2usize..=10, seed in any::<u64>(), t in 0.0..1.0f64, j in 0usize..10) {
        let j = j % n;
        let m = random_symmetric(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let g = BoxGeometry::new(1, n, BoundaryCondition::Dirichlet).unwrap();
        let h = HamiltonianMatrix::from_dense(g, &m).unwrap();
        let mut shift = vec![0.0; n];
        shift[j] = t;
        let a = eigenvalues(&h, &Provenance::default()).unwrap();
        let b = eigenvalues(&h.with_diagonal_added(&shift).unwrap(), &Provenance::default()).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            prop_assert!(*y >= x - 1e-12 && *y <= x + t + 1e-12);
        }
    }
}
