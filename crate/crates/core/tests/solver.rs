use pcnls::norms::mass;
use pcnls::radial_spectral::{l2_norm, sample_function, sample_real, RadialField, RadialGrid};
use pcnls::solver::{
    energy_increment_check, evolve, evolve_to, linear_high_part, picard_lwp, run_high_low_pipeline, step_autonomous,
    step_nonautonomous, Direction, Equation, PicardConfig, PicardOutcome, SolverConfig,
};
use pcnls::transforms::free_propagate;
use pcnls::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian(grid: RadialGrid) -> RadialField {
    sample_real(grid, |r| (-r * r / 2.0).exp()).unwrap()
}

fn rel_l2(a: &RadialField, b: &RadialField) -> f64 {
    l2_norm(&a.try_sub(b).unwrap()) / l2_norm(b)
}

fn config(grid: RadialGrid, dt: f64) -> SolverConfig {
    SolverConfig {
        grid,
        dt,
        ..Default::default()
    }
}

fn random_bump(grid: RadialGrid, seed: u64) -> RadialField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b, c) = (rng.gen_range(0.3..2.0), rng.gen_range(0.5..3.0), rng.gen_range(-1.0..1.0));
    sample_function(grid, |r| Complex64::new(a, c) * (-r * r / b).exp()).unwrap()
}

#[test]
fn one_step_preserves_mass() {
    let grid = RadialGrid::new(32.0, 1024).unwrap();
    let u = gaussian(grid).scale(Complex64::new(2.0, 1.0));
    let m0 = mass(&u);
    let a = step_autonomous(&u, 1e-2).unwrap();
    let b = step_nonautonomous(&u, 0.5, -1e-2).unwrap();
    assert!((mass(&a) - m0).abs() / m0 < 1e-13);
    assert!((mass(&b) - m0).abs() / m0 < 1e-13);
}

#[test]
fn disabled_nonlinearity_is_free_flow() {
    let grid = RadialGrid::new(32.0, 256).unwrap();
    let u = gaussian(grid);
    let mut cfg = config(grid, 0.1);
    cfg.nonlinear = false;
    let lin = free_propagate(&u, 0.1);
    let full = step_autonomous(&u, 0.1).unwrap();
    assert!(rel_l2(&full, &lin) > 1e-3);
    let lin_stepped = evolve(&cfg, Equation::default(), &u, (0.0, 0.1)).unwrap().final_field;
    assert!(rel_l2(&lin_stepped, &lin) < 1e-13);
}

#[test]
fn forward_then_backward_is_identity() {
    let grid = RadialGrid::new(32.0, 1024).unwrap();
    let u = gaussian(grid);
    for dt in [1e-3, 1e-2] {
        let there = step_autonomous(&u, dt).unwrap();
        let back = step_autonomous(&there, -dt).unwrap();
        assert!(rel_l2(&back, &u) < 1e-11, "autonomous dt = {dt}");
        let there = step_nonautonomous(&u, 1.0, dt).unwrap();
        let back = step_nonautonomous(&there, 1.0 + dt, -dt).unwrap();
        assert!(rel_l2(&back, &u) < 1e-11, "nonautonomous dt = {dt}");
    }
}

#[test]
fn free_evolution_matches_propagator() {
    let grid = RadialGrid::new(32.0, 1024).unwrap();
    let u = gaussian(grid);
    let mut cfg = config(grid, 1e-2);
    cfg.nonlinear = false;
    let ev = evolve(&cfg, Equation::default(), &u, (0.0, 1.0)).unwrap();
    assert!(rel_l2(&ev.final_field, &free_propagate(&u, 1.0)) < 1e-10);
}

#[test]
fn trace_times_follow_direction() {
    let grid = RadialGrid::new(32.0, 256).unwrap();
    let u = gaussian(grid);
    let fwd = evolve(&config(grid, 0.01), Equation::PseudoConformal, &u, (0.5, 0.7)).unwrap();
    assert!(fwd.energy.records().windows(2).all(|w| w[1].t > w[0].t));
    let bcfg = SolverConfig {
        direction: Direction::Backward,
        ..config(grid, 0.01)
    };
    let bwd = evolve(&bcfg, Equation::PseudoConformal, &u, (0.7, 0.5)).unwrap();
    assert!(bwd.energy.records().windows(2).all(|w| w[1].t < w[0].t));
    assert!(evolve(&config(grid, 0.01), Equation::PseudoConformal, &u, (0.7, 0.5)).is_err());
    assert!(evolve(&bcfg, Equation::PseudoConformal, &u, (0.5, -0.1)).is_err());
}

#[test]
fn strang_is_second_order() {
    let grid = RadialGrid::new(32.0, 512).unwrap();
    let u = gaussian(grid).scale(Complex64::new(2.0, 0.0));
    let run = |dt| evolve(&config(grid, dt), Equation::default(), &u, (0.0, 0.5)).unwrap().final_field;
    let reference = run(1e-4);
    let errs: Vec<f64> = [4e-3, 2e-3, 1e-3].iter().map(|&dt| rel_l2(&run(dt), &reference)).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}, errors {errs:?}");
    }
}

#[test]
fn energy_drift_is_second_order() {
    let grid = RadialGrid::new(32.0, 512).unwrap();
    let u = gaussian(grid).scale(Complex64::new(2.0, 0.0));
    let drift = |dt| {
        let s = evolve(&config(grid, dt), Equation::default(), &u, (0.0, 0.5))
            .unwrap()
            .energy
            .summary();
        let e = s.energy.unwrap();
        e.max - e.min
    };
    let (a, b) = (drift(2e-2), drift(1e-2));
    assert!((3.2..=4.8).contains(&(a / b)), "drifts {a:e} {b:e}");
}

#[test]
fn pseudo_conformal_energy_with_history_is_conserved() {
    let grid = RadialGrid::new(32.0, 1024).unwrap();
    let u = gaussian(grid);
    let ev = evolve(&config(grid, 1e-3), Equation::default(), &u, (0.0, 1.0)).unwrap();
    let p: Vec<f64> = ev.energy.records().iter().map(|r| r.p.unwrap()).collect();
    let drift = p.iter().map(|x| (x - p[0]).abs()).fold(0.0, f64::max) / p[0];
    assert!(drift < 1e-4, "drift {drift:e}");
}

#[test]
fn nonautonomous_step_is_first_order_in_dt() {
    let grid = RadialGrid::new(32.0, 512).unwrap();
    let u = gaussian(grid);
    let dts = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
    let dev: Vec<f64> = dts
        .iter()
        .map(|&dt| l2_norm(&step_nonautonomous(&u, 1.0, dt).unwrap().try_sub(&u).unwrap()))
        .collect();
    for (w, d) in dts.windows(2).zip(dev.windows(2)) {
        let slope = (d[0] / d[1]).ln() / (w[0] / w[1]).ln();
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    }
}

#[test]
fn evolve_to_hits_requested_times() {
    let grid = RadialGrid::new(32.0, 256).unwrap();
    let u = gaussian(grid);
    let cfg = config(grid, 0.05);
    let at = evolve_to(&cfg, Equation::default(), &u, 0.0, &[0.1, 0.1, 0.25]).unwrap();
    assert_eq!(at[0], at[1]);
    let direct = evolve(&cfg, Equation::default(), &u, (0.0, 0.25)).unwrap();
    assert_eq!(at[2], direct.final_field);
    assert!(evolve_to(&cfg, Equation::default(), &u, 0.0, &[0.2, 0.1]).is_err());
}

#[test]
fn pipeline_on_zero_data() {
    let grid = RadialGrid::new(32.0, 256).unwrap();
    let z = RadialField::zeros(grid);
    let cfg = SolverConfig { stride: 10, ..config(grid, 0.05) };
    let run = run_high_low_pipeline(&z, 1e-2, 0.25, 2.0, &cfg).unwrap();
    let rep = &run.report;
    assert!(rep.flags.bootstrap_held && rep.flags.completed);
    assert_eq!(rep.sup_cal_e, 0.0);
    assert!(rep.energy.records().iter().all(|r| r.mass == 0.0 && r.cal_e == Some(0.0)));
    let inc = energy_increment_check(&run).unwrap();
    assert!(inc.error_term.iter().all(|&(_, e)| e == 0.0));
}

#[test]
fn pipeline_with_degenerate_threshold() {
    let grid = RadialGrid::new(32.0, 512).unwrap();
    let u = gaussian(grid);
    let cfg = SolverConfig { stride: 10, ..config(grid, 0.02) };
    let run = run_high_low_pipeline(&u, 1e3, 0.5, 2.0, &cfg).unwrap();
    assert_eq!(run.report.decomposition.n0, 2.0);
    assert!(run.report.flags.completed);
    assert!(run.report.sup_cal_e.is_finite());
}

#[test]
fn pipeline_keeps_linear_part_spectral() {
    let grid = RadialGrid::new(32.0, 512).unwrap();
    let u = gaussian(grid);
    let cfg = SolverConfig { stride: 5, ..config(grid, 0.02) };
    let run = run_high_low_pipeline(&u, 1e-2, 0.5, 1.5, &cfg).unwrap();
    for snap in &run.snapshots {
        let v = snap.u.try_sub(&snap.w).unwrap();
        let d = l2_norm(&v.try_sub(&linear_high_part(&run, snap.t)).unwrap());
        assert!(d <= 1e-14 * l2_norm(&v).max(1.0), "t = {} diff {d:e}", snap.t);
    }
    assert!(run.report.segments.iter().all(|s| s.lo < s.hi));
    assert!((run.report.segments.last().unwrap().lo - 0.5).abs() < 1e-15);
}

#[test]
fn increment_identity_picks_negative_exponent() {
    let grid = RadialGrid::new(32.0, 1024).unwrap();
    let u = gaussian(grid);
    let cfg = SolverConfig { stride: 20, ..config(grid, 1e-3) };
    let run = run_high_low_pipeline(&u, 1e-2, 0.5, 2.0, &cfg).unwrap();
    let inc = energy_increment_check(&run).unwrap();
    assert_eq!(inc.winning_exponent, Some(-0.5), "{:e} {:e} floor {:e}", inc.residual_minus_half, inc.residual_plus_half, inc.floor);
    assert!(inc.residual_as_printed > 10.0 * inc.floor);
}

#[test]
fn picard_zero_data() {
    let grid = RadialGrid::new(32.0, 256).unwrap();
    let rep = picard_lwp(&RadialField::zeros(grid), 1.0, 0.5, 0.25, &PicardConfig::default()).unwrap();
    assert_eq!(rep.outcome, PicardOutcome::Converged);
    assert_eq!(rep.differences.len(), 1);
}

#[test]
fn picard_fixed_point_matches_solver() {
    let grid = RadialGrid::new(32.0, 1024).unwrap();
    let u = gaussian(grid).scale(Complex64::new(0.5, 0.0));
    let rep = picard_lwp(&u, 1.0, 0.5, 0.25, &PicardConfig::default()).unwrap();
    assert_eq!(rep.outcome, PicardOutcome::Converged);
    assert!(rep.contracting());
    // geometric decay: each difference at most a tenth of the previous
    assert!(rep.ratios.iter().all(|&r| r < 0.1), "{:?}", rep.ratios);
    let cfg = config(grid, 1e-4);
    let n = rep.times.len();
    let fwd = evolve_to(&cfg, Equation::default(), &u, 1.0, &[rep.times[n - 1]]).unwrap();
    let bcfg = SolverConfig {
        direction: Direction::Backward,
        ..cfg
    };
    let bwd = evolve_to(&bcfg, Equation::default(), &u, 1.0, &[rep.times[0]]).unwrap();
    assert!(rel_l2(&rep.iterate[n - 1], &fwd[0]) < 1e-4);
    assert!(rel_l2(&rep.iterate[0], &bwd[0]) < 1e-4);
}

#[test]
fn picard_factor_shrinks_with_window() {
    let grid = RadialGrid::new(32.0, 512).unwrap();
    let u = gaussian(grid).scale(Complex64::new(0.5, 0.0));
    let cfg = PicardConfig::default();
    let a = picard_lwp(&u, 1.0, 0.5, 0.25, &cfg).unwrap().contraction_factor().unwrap();
    let b = picard_lwp(&u, 1.0, 0.5, 0.125, &cfg).unwrap().contraction_factor().unwrap();
    assert!(b < a);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mass_is_conserved_over_many_steps(seed in any::<u64>()) {
        let grid = RadialGrid::new(32.0, 256).unwrap();
        let u = random_bump(grid, seed);
        let ev = evolve(&config(grid, 1e-3), Equation::default(), &u, (0.0, 1.0)).unwrap();
        let s = ev.energy.summary();
        prop_assert!(s.mass.unwrap().drift < 1e-10);
    }

    #[test]
    fn steps_are_reversible(seed in any::<u64>(), dt in 1e-4f64..2e-2) {
        let grid = RadialGrid::new(32.0, 256).unwrap();
        let u = random_bump(grid, seed);
        let back = step_autonomous(&step_autonomous(&u, dt).unwrap(), -dt).unwrap();
        prop_assert!(rel_l2(&back, &u) < 1e-11);
    }
}
