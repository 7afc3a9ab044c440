use proptest::prelude::*;

use wegnerlab::disorder::{sample_omega, sample_values, transform, DensityModel, DisorderSample};
use wegnerlab::lattice::{BoundaryCondition, BoxGeometry, Site};
use wegnerlab::toeplitz::{build_truncation, ConvolutionVector};

/// Kolmogorov-Smirnov distance between samples and a continuous CDF.
fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn sampled_couplings_follow_the_density() {
    let sites: Vec<Site> = (0..100_000).map(|i| Site::new(&[i]).unwrap()).collect();
    for density in [
        DensityModel::triangle(0.0, 1.0).unwrap(),
        DensityModel::trapezoid(-1.0, 2.0, 0.5).unwrap(),
        DensityModel::uniform(2.5).unwrap(),
        DensityModel::piecewise_linear(vec![(0.0, 0.0), (0.2, 2.0), (0.6, 1.0), (1.0, 0.0)]).unwrap(),
    ] {
        let xs = sample_values(&density, &sites, 99, 3);
        let d = ks_statistic(xs, |x| density.cdf(x));
        assert!(d < 0.01, "KS distance {d} for {density:?}");
    }
}

fn with_values(sample: &DisorderSample, omega: Vec<f64>) -> DisorderSample {
    DisorderSample {
        omega,
        ..sample.clone()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn transform_is_linear(
        a1 in -0.9..0.9f64,
        a2 in -0.9..0.9f64,
        l in 1usize..=8,
        s in 0.1..3.0f64,
        t in -3.0..3.0f64,
        seed in any::<u64>(),
    ) {
        let alpha = ConvolutionVector::one_dim(&[(0, 1.0), (1, a1), (-2, a2)]).unwrap();
        let g = BoxGeometry::new(1, l, BoundaryCondition::Periodic).unwrap();
        let a = build_truncation(&alpha, &g);
        let density = DensityModel::triangle(0.0, 1.0).unwrap();
        let x = sample_omega(&density, a.sites(), seed, 0);
        let y = sample_omega(&density, a.sites(), seed, 1);
        let combo: Vec<f64> = x.omega.iter().zip(&y.omega).map(|(p, q)| s * p + t * q).collect();
        let lhs = transform(&a, &with_values(&x, combo)).unwrap();
        let tx = transform(&a, &x).unwrap();
        let ty = transform(&a, &y).unwrap();
        for i in 0..lhs.len() {
            prop_assert!((lhs[i] - (s * tx[i] + t * ty[i])).abs() <= 1e-12);
        }
    }
}
