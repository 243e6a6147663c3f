mod common;

use pcnls::radial_spectral::{l2_norm, sample_function, sample_real, weighted_l2, Interpolation, RadialField, RadialGrid};
use pcnls::transforms::{
    conj_fourier_final_data, free_propagate, kernel_propagate, pow_minus_three_halves, pseudo_conformal, vector_field_j,
};
use pcnls::Complex64;

fn gaussian(grid: RadialGrid) -> RadialField {
    sample_real(grid, |r| (-r * r / 2.0).exp()).unwrap()
}

fn rel_l2(a: &RadialField, b: &RadialField) -> f64 {
    l2_norm(&a.try_sub(b).unwrap()) / l2_norm(b)
}

/// Closed-form free evolution of `e^{-r^2/2}`.
fn evolved_gaussian(grid: RadialGrid, t: f64) -> RadialField {
    let z = Complex64::new(1.0, t);
    let amp = pow_minus_three_halves(z);
    sample_function(grid, |r| amp * (-r * r / (2.0 * z)).exp()).unwrap()
}

fn schwartz(grid: RadialGrid) -> RadialField {
    sample_function(grid, |r| {
        Complex64::new((-r * r / 2.0).exp() * (1.0 + 0.5 * r * r), 0.4 * (-(r * r) / 3.0).exp())
    })
    .unwrap()
}

/// Schwartz data vanishing to high order at the origin. Fractional powers of
/// `|x|` or `|k|` then stay smooth, so neither side leaks a power-law tail into
/// the box boundary or past the Nyquist wavenumber.
fn flat_at_origin(grid: RadialGrid) -> RadialField {
    sample_function(grid, |r| {
        let r2 = r * r;
        Complex64::new(r2 * r2, 0.25 * r2 * r2 * r2) * (-r2 / 2.0).exp()
    })
    .unwrap()
}

#[test]
fn spectral_and_kernel_propagators_agree() {
    let grid = RadialGrid::desk();
    let f = gaussian(grid);
    for t in [0.25, 0.5, 1.0] {
        let spectral = free_propagate(&f, t);
        let kernel = kernel_propagate(&f, t).unwrap();
        let exact = evolved_gaussian(grid, t);
        let e1 = rel_l2(&spectral, &kernel);
        let e2 = rel_l2(&spectral, &exact);
        println!("t={t}: spectral-kernel {e1:.3e}, spectral-exact {e2:.3e}");
        assert!(e1 < 1e-6);
        assert!(e2 < 1e-8);
    }
}

#[test]
fn kernel_group_law() {
    let grid = RadialGrid::new(32.0, 1024).unwrap();
    let f = gaussian(grid);
    let two_steps = kernel_propagate(&kernel_propagate(&f, 0.4).unwrap(), 0.6).unwrap();
    let one_step = kernel_propagate(&f, 1.0).unwrap();
    let e = rel_l2(&two_steps, &one_step);
    println!("group law {e:.3e}");
    assert!(e < 1e-5);
    assert_eq!(l2_norm(&kernel_propagate(&RadialField::zeros(grid), 1.0).unwrap()), 0.0);
}

#[test]
fn spectral_propagator_is_unitary_group() {
    let grid = RadialGrid::desk();
    let f = schwartz(grid);
    for t in [-3.0, -0.1, 0.7, 2.5, 10.0] {
        let g = free_propagate(&f, t);
        assert!(common::rel(l2_norm(&g), l2_norm(&f)) < 1e-12);
    }
    let ab = free_propagate(&free_propagate(&f, 0.3), 1.1);
    assert!(rel_l2(&ab, &free_propagate(&f, 1.4)) < 1e-10);
}

#[test]
fn vector_field_two_presentations() {
    let grid = RadialGrid::desk();
    let t = 1.0;
    let s = 0.5;
    // Evolved data keeps the Fourier side of M(-t) f flat at zero frequency.
    let f = free_propagate(&flat_at_origin(grid), t);
    let conj_route = vector_field_j(&f, t, s).unwrap();
    let back = free_propagate(&f, -t).multiply_by(|r| Complex64::new(r.powf(s), 0.0));
    let group_route = free_propagate(&back, t);
    let e = rel_l2(&conj_route, &group_route);
    println!("J presentations {e:.3e}");
    assert!(e < 1e-5);
}

#[test]
fn vector_field_norm_through_unitarity() {
    let grid = RadialGrid::desk();
    let f = flat_at_origin(grid);
    for (t, s) in [(1.0, 0.5), (0.5, 1.0), (2.0, 0.5)] {
        let lhs = l2_norm(&vector_field_j(&free_propagate(&f, t), t, s).unwrap());
        let rhs = weighted_l2(&f, s);
        println!("t={t} s={s}: {lhs} vs {rhs}");
        assert!(common::rel(lhs, rhs) < 1e-6);
    }
}

#[test]
fn pseudo_conformal_involution_and_norm() {
    let grid = RadialGrid::desk();
    let f = schwartz(grid);
    for t in [0.5, 2.0] {
        for interp in [Interpolation::Cubic, Interpolation::BandLimited] {
            let once = pseudo_conformal(&f, t, interp).unwrap();
            let twice = pseudo_conformal(&once.field, 1.0 / t, interp).unwrap();
            let e = rel_l2(&twice.field, &f);
            let n = common::rel(l2_norm(&once.field), l2_norm(&f));
            println!("t={t} {interp:?}: involution {e:.3e}, norm {n:.3e}, loss {:.3e}", once.loss.relative());
            assert!(e < 1e-3);
            assert!(n < 1e-3);
        }
    }
}

#[test]
fn pseudo_conformal_intertwines_propagator() {
    let grid = RadialGrid::desk();
    let f = gaussian(grid);
    for t in [0.5, 2.0] {
        let lhs = pseudo_conformal(&free_propagate(&f, 1.0 / t), t, Interpolation::Cubic).unwrap();
        let rhs = free_propagate(&conj_fourier_final_data(&f), t);
        let e = rel_l2(&lhs.field, &rhs);
        println!("TS=SF t={t}: {e:.3e}");
        assert!(e < 1e-3);
    }
}

#[test]
fn pseudo_conformal_commutes_with_vector_field() {
    let grid = RadialGrid::desk();
    let u = free_propagate(&schwartz(grid), 0.3);
    for tau in [0.5, 2.0] {
        for s in [0.5, 1.0] {
            let lhs = pseudo_conformal(&u, tau, Interpolation::Cubic)
                .unwrap()
                .field
                .apply_real_multiplier(|k| k.powf(s))
                .unwrap();
            let rhs = pseudo_conformal(&vector_field_j(&u, 1.0 / tau, s).unwrap(), tau, Interpolation::Cubic)
                .unwrap()
                .field;
            let e = rel_l2(&lhs, &rhs);
            println!("commutation tau={tau} s={s}: {e:.3e}");
            assert!(e < 1e-3);
        }
    }
}
