mod common;

use std::f64::consts::PI;

use common::{radial_integral, rel};
use pcnls::radial_spectral::{
    apply_multiplier, dst_forward, dst_inverse, l2_norm, lebesgue_norm, sample_real, RadialField, RadialGrid,
};
use pcnls::Complex64;
use proptest::prelude::*;

fn gaussian(grid: RadialGrid) -> RadialField {
    sample_real(grid, |r| (-r * r / 2.0).exp()).unwrap()
}

fn rel_l2(a: &RadialField, b: &RadialField) -> f64 {
    l2_norm(&a.try_sub(b).unwrap()) / l2_norm(b)
}

#[test]
fn gaussian_l2_norm_matches_quadrature() {
    let oracle = radial_integral(|r| (-r * r).exp(), 12.0).sqrt();
    assert!(rel(oracle, PI.powf(0.75)) < 1e-13);
    let f = gaussian(RadialGrid::new(32.0, 1024).unwrap());
    assert!((l2_norm(&f) - oracle).abs() < 1e-8);
}

#[test]
fn gaussian_l3_norm_matches_quadrature() {
    let oracle = radial_integral(|r| (-1.5 * r * r).exp(), 12.0).powf(1.0 / 3.0);
    assert!(rel(oracle, (2.0 * PI / 3.0).sqrt()) < 1e-13);
    let f = gaussian(RadialGrid::desk());
    assert!(rel(lebesgue_norm(&f, 3.0).unwrap(), oracle) < 1e-10);
    assert!(rel(lebesgue_norm(&f, 2.0).unwrap(), l2_norm(&f)) < 1e-12);
}

#[test]
fn round_trip_and_parseval_over_grid_matrix() {
    for (radius, m) in [(8.0, 64), (16.0, 128), (32.0, 1024), (32.0, 2048), (64.0, 4096)] {
        let grid = RadialGrid::new(radius, m).unwrap();
        let f = sample_real(grid, |r| (-r * r / 2.0).exp() * (1.0 + 0.3 * r.cos())).unwrap();
        let c = dst_forward(&f);
        let back = dst_inverse(&c);
        assert!(rel_l2(&back, &f) < 1e-12, "R={radius}, M={m}");
        assert!(rel(l2_norm(&f).powi(2), c.energy()) < 1e-10);
    }
}

#[test]
fn refinement_changes_norm_negligibly() {
    let coarse = gaussian(RadialGrid::new(32.0, 1024).unwrap());
    let fine = gaussian(RadialGrid::new(32.0, 2048).unwrap());
    assert!(rel(l2_norm(&coarse), l2_norm(&fine)) < 1e-8);
}

#[test]
fn multiplier_square_root_semigroup() {
    let f = gaussian(RadialGrid::new(32.0, 512).unwrap());
    let twice = f
        .apply_real_multiplier(f64::sqrt)
        .unwrap()
        .apply_real_multiplier(f64::sqrt)
        .unwrap();
    let once = f.apply_real_multiplier(|k| k).unwrap();
    assert!(rel_l2(&twice, &once) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn multiplier_composition_is_elementwise_product(a in 0.1f64..3.0, b in -2.0f64..2.0, width in 0.3f64..3.0) {
        let grid = RadialGrid::new(16.0, 256).unwrap();
        let f = sample_real(grid, |r| (-r * r / (2.0 * width)).exp()).unwrap();
        let c = dst_forward(&f);
        let m1 = |k: f64| Complex64::new((-a * k).exp(), b * k);
        let m2 = |k: f64| Complex64::from_polar(1.0, b * k * k);
        let composed = apply_multiplier(&apply_multiplier(&c, m2).unwrap(), m1).unwrap();
        let product = apply_multiplier(&c, |k| m1(k) * m2(k)).unwrap();
        for (x, y) in composed.coeffs().iter().zip(product.coeffs()) {
            prop_assert!((x - y).norm() <= 1e-15 * x.norm().max(1e-300) * 4.0);
        }
    }

    #[test]
    fn round_trip_random_samples(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let grid = RadialGrid::new(10.0, 128).unwrap();
        let samples: Vec<Complex64> = (0..grid.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let f = RadialField::from_samples(grid, samples).unwrap();
        prop_assert!(rel_l2(&dst_inverse(&dst_forward(&f)), &f) < 1e-12);
    }
}
