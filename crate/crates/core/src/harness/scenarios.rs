//! The six scenarios. Each returns its checks and the artifacts to write.

use serde::Serialize;

use super::corpus::{corpus, CorpusKind};
use super::manifest::Manifest;
use super::oracles::{brute_force_threshold, equation_equivalence, sampled_density, ThresholdScan};
use super::{Artifact, Check};
use crate::error::Result;
use crate::lp_decomp::{full_band, project_dyadic, square_function_ratio, threshold_candidates};
use crate::norms::{
    criticality, local_smoothing_functional, sobolev_norm, strichartz_norm, weighted_norm, EnergySummary,
    SpaceTimeTrace,
};
use crate::radial_spectral::{l2_norm, RadialField, RadialGrid};
use crate::solver::{
    energy_increment_check, evolve, evolve_to, picard_lwp, run_high_low_pipeline, Direction, Equation, PicardConfig,
    PicardReport, SolverConfig,
};
use crate::transforms::{conj_fourier_final_data, free_propagate, kernel_propagate, pseudo_conformal, vector_field_j};
use crate::Complex64;

type Outcome = (Vec<Check>, Vec<Artifact>);

/// `||a - b|| / ||b||`, or the absolute difference when `b = 0`.
fn rel_diff(a: &RadialField, b: &RadialField) -> Result<f64> {
    let d = l2_norm(&a.try_sub(b)?);
    let n = l2_norm(b);
    Ok(if n == 0.0 { d } else { d / n })
}

fn solver_config(m: &Manifest, grid: RadialGrid, dt: f64) -> SolverConfig {
    SolverConfig {
        grid,
        dt,
        seed: m.seed,
        interpolation: m.interpolation,
        ..Default::default()
    }
}

#[derive(Serialize)]
struct ConserveReport {
    summary: EnergySummary,
    steps: usize,
    dt: f64,
    order_errors: [f64; 2],
    order_ratio: f64,
}

pub fn conserve(m: &Manifest) -> Result<Outcome> {
    let grid = m.grid.build()?;
    let u0 = m.data.build(grid, m.seed)?;
    let cfg = &m.conserve;
    let span = (0.0, cfg.t_end);
    let ev = evolve(&solver_config(m, grid, m.dt), Equation::Autonomous { p: 1.0 }, &u0, span)?;
    let summary = ev.energy.summary();
    let drift = |c: &Option<crate::norms::ColumnSummary>| c.as_ref().map_or(f64::NAN, |c| c.drift);

    let final_at = |dt: f64| -> Result<RadialField> {
        Ok(evolve(&solver_config(m, grid, dt), Equation::Autonomous { p: 1.0 }, &u0, span)?.final_field)
    };
    let reference = final_at(m.dt / cfg.reference_refinement as f64)?;
    let coarse = rel_diff(&ev.final_field, &reference)?;
    let fine = rel_diff(&final_at(m.dt / 2.0)?, &reference)?;
    let [lo, hi] = cfg.order_window;
    let order = if coarse == 0.0 && fine == 0.0 {
        Check::flag("splitting_order", true, 0.0, format!("in [{lo}, {hi}]")).with_detail("both runs exact")
    } else {
        Check::within("splitting_order", coarse / fine, lo, hi)
            .with_detail(format!("errors {coarse:.3e} (dt), {fine:.3e} (dt/2)"))
    };

    let checks = vec![
        Check::at_most("mass_drift", drift(&summary.mass), cfg.tol_mass),
        Check::at_most("energy_drift", drift(&summary.energy), cfg.tol_energy),
        Check::at_most("p_drift", drift(&summary.p), cfg.tol_p),
        order,
    ];
    let mut csv = Vec::new();
    ev.energy.write_csv(&mut csv)?;
    let report = ConserveReport {
        summary,
        steps: ev.steps,
        dt: m.dt,
        order_errors: [coarse, fine],
        order_ratio: coarse / fine,
    };
    let artifacts = vec![
        Artifact {
            file_name: "conserve_energy.csv".into(),
            contents: csv,
        },
        Artifact::json("conserve.json", &report)?,
    ];
    Ok((checks, artifacts))
}

#[derive(Serialize)]
struct Residual {
    name: String,
    t: f64,
    s: Option<f64>,
    value: f64,
}

pub fn transform_id(m: &Manifest) -> Result<Outcome> {
    let grid = m.grid.build()?;
    let f = m.data.build(grid, m.seed)?;
    let cfg = &m.transform;
    let interp = m.interpolation;
    let mut checks = Vec::new();
    let mut residuals = Vec::new();
    let mut push = |checks: &mut Vec<Check>, name: String, t: f64, s: Option<f64>, value: f64| {
        checks.push(Check::at_most(name.clone(), value, cfg.tol));
        residuals.push(Residual { name, t, s, value });
    };

    for &t in &cfg.times {
        let once = pseudo_conformal(&f, t, interp)?;
        let twice = pseudo_conformal(&once.field, 1.0 / t, interp)?;
        push(&mut checks, format!("involution_t{t}"), t, None, rel_diff(&twice.field, &f)?);

        let lhs = pseudo_conformal(&free_propagate(&f, 1.0 / t), t, interp)?;
        let rhs = free_propagate(&conj_fourier_final_data(&f), t);
        push(&mut checks, format!("ts_sf_t{t}"), t, None, rel_diff(&lhs.field, &rhs)?);

        for &s in &cfg.s_values {
            let lhs = pseudo_conformal(&f, t, interp)?
                .field
                .apply_real_multiplier(|k| k.powf(s))?;
            let rhs = pseudo_conformal(&vector_field_j(&f, 1.0 / t, s)?, t, interp)?.field;
            push(&mut checks, format!("commutation_t{t}_s{s}"), t, Some(s), rel_diff(&lhs, &rhs)?);
        }
    }

    let samples = equation_equivalence(
        &f,
        &solver_config(m, grid, m.dt),
        &cfg.equivalence_times,
        cfg.fd_step,
        interp,
    )?;
    let worst = samples.iter().map(|s| s.ratio()).fold(0.0, f64::max);
    let max_res = samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    checks.push(
        Check::at_most("equation_equivalence", worst, cfg.equivalence_factor)
            .with_detail(format!("residual / floor; max residual {max_res:.3e}")),
    );

    #[derive(Serialize)]
    struct Report<'a> {
        residuals: &'a [Residual],
        equivalence: &'a [super::oracles::EquivalenceSample],
    }
    let artifacts = vec![Artifact::json(
        "transform_id.json",
        &Report {
            residuals: &residuals,
            equivalence: &samples,
        },
    )?];
    Ok((checks, artifacts))
}

pub fn highlow(m: &Manifest) -> Result<Outcome> {
    let cfg = &m.highlow;
    let grid = cfg.grid.build()?;
    let u0 = m.data.build(grid, m.seed)?;
    let config = SolverConfig {
        stride: cfg.stride,
        ..solver_config(m, grid, cfg.dt)
    };
    let run = run_high_low_pipeline(&u0, cfg.delta0, cfg.t0, cfg.t_final, &config)?;
    let report = &run.report;
    let increment = energy_increment_check(&run)?;

    let candidates = threshold_candidates(&grid);
    let scan: ThresholdScan = match m.data.profile() {
        Some(f) => brute_force_threshold(&|r| f(r).powi(2), grid.radius(), &candidates, cfg.delta0),
        None => brute_force_threshold(&sampled_density(&u0), grid.radius(), &candidates, cfg.delta0),
    };
    let oracle_n0 = scan.minimal.unwrap_or(f64::NAN);

    let records = report.energy.records();
    let cal_e_finite = records.iter().all(|r| r.cal_e.is_some_and(f64::is_finite));
    let held = report.flags.bootstrap_held;
    let checks = vec![
        Check::flag("completed", report.flags.completed, report.steps as f64, "true"),
        Check::flag(
            "n0_matches_oracle",
            report.decomposition.n0 == oracle_n0,
            report.decomposition.n0,
            format!("== {oracle_n0}"),
        ),
        Check::flag("cal_e_finite", cal_e_finite, report.sup_cal_e, "finite on [t0, T0]"),
        Check::flag(
            "truncation",
            report.flags.truncation_ok,
            report.max_boundary_ratio,
            format!("<= {:e}", config.boundary_tol),
        ),
        Check::flag("bootstrap_reported", report.margin.is_finite(), report.margin, "margin reported").with_detail(
            format!(
                "sup calE <= 2 calE(T0) {}; sup/calE(T0) = {:.6}",
                if held { "held" } else { "did not hold" },
                report.growth
            ),
        ),
        Check::flag(
            "increment_match",
            increment.winning_exponent.is_some(),
            increment.residual_minus_half.min(increment.residual_plus_half),
            format!("<= {} x floor {:.3e}", increment.match_factor, increment.floor),
        )
        .with_detail(match increment.winning_exponent {
            Some(e) => format!(
                "exponent {e:+}; residuals {:.3e} (-1/2), {:.3e} (+1/2)",
                increment.residual_minus_half, increment.residual_plus_half
            ),
            None => format!(
                "no unique match; residuals {:.3e} (-1/2), {:.3e} (+1/2)",
                increment.residual_minus_half, increment.residual_plus_half
            ),
        }),
    ];
    let mut csv = Vec::new();
    report.energy.write_csv(&mut csv)?;
    let artifacts = vec![
        Artifact::json("highlow_report.json", report)?,
        Artifact {
            file_name: "highlow_energy.csv".into(),
            contents: csv,
        },
        Artifact::json("highlow_increment.json", &increment)?,
        Artifact::json("highlow_threshold_oracle.json", &scan)?,
    ];
    Ok((checks, artifacts))
}

pub fn lwp(m: &Manifest) -> Result<Outcome> {
    let cfg = &m.lwp;
    let grid = m.grid.build()?;
    let u = m.data.build(grid, m.seed)?.scale(Complex64::new(cfg.amplitude, 0.0));
    let config = PicardConfig {
        panels: cfg.panels,
        ..Default::default()
    };
    let full = picard_lwp(&u, cfg.t0, cfg.s, cfg.half_width, &config)?;
    let half = picard_lwp(&u, cfg.t0, cfg.s, cfg.half_width / 2.0, &config)?;

    let solver = solver_config(m, grid, cfg.solver_dt);
    let (first, last) = (full.times[0], *full.times.last().expect("nodes"));
    let forward = evolve_to(&solver, Equation::Autonomous { p: 1.0 }, &u, cfg.t0, &[last])?;
    let backward = evolve_to(
        &SolverConfig {
            direction: Direction::Backward,
            ..solver
        },
        Equation::Autonomous { p: 1.0 },
        &u,
        cfg.t0,
        &[first],
    )?;
    let agreement = rel_diff(full.iterate.last().expect("nodes"), &forward[0])?
        .max(rel_diff(&full.iterate[0], &backward[0])?);

    let target = 2f64.powf((1.0 + 2.0 * cfg.s) / 4.0);
    let measured = match (full.contraction_factor(), half.contraction_factor()) {
        (Some(a), Some(b)) if b > 0.0 => a / b,
        _ => f64::NAN,
    };
    let fmt_ratios = |r: &PicardReport| {
        r.ratios
            .iter()
            .take(6)
            .map(|x| format!("{x:.3e}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let below_one = full.outcome == crate::solver::PicardOutcome::Converged && full.ratios.iter().all(|&r| r < 1.0);
    let checks = vec![
        Check::flag(
            "ratios_below_one",
            below_one,
            full.ratios.iter().copied().fold(0.0, f64::max),
            "< 1",
        )
        .with_detail(format!("{:?} after {} iterations", full.outcome, full.differences.len())),
        Check::flag(
            "ratios_decreasing",
            full.ratios_decreasing(),
            full.ratios.windows(2).filter(|w| w[1] > w[0]).count() as f64,
            "0 increases",
        )
        .with_detail(format!("ratios {}", fmt_ratios(&full))),
        Check::at_most("fixed_point_vs_solver", agreement, cfg.agreement_tol),
        Check::flag(
            "contraction_scaling",
            (measured / target - 1.0).abs() <= cfg.scaling_tol,
            measured,
            format!("{target:.4} +- {:.0}%", 100.0 * cfg.scaling_tol),
        )
        .with_detail(format!("ratio(T)/ratio(T/2), T = {}", cfg.half_width)),
    ];

    #[derive(Serialize)]
    struct Report<'a> {
        full: &'a PicardReport,
        half: &'a PicardReport,
        solver_agreement: f64,
        scaling_measured: f64,
        scaling_target: f64,
    }
    let artifacts = vec![Artifact::json(
        "lwp.json",
        &Report {
            full: &full,
            half: &half,
            solver_agreement: agreement,
            scaling_measured: measured,
            scaling_target: target,
        },
    )?];
    Ok((checks, artifacts))
}

/// `(q, r)` pairs of the Strichartz audit and the matching `H^s`,
/// `s = 3/2 - 2/q - 3/r`, on the right side.
const STRICHARTZ_PAIRS: [(f64, f64); 3] = [(4.0, 3.0), (8.0, 4.0), (2.0, f64::INFINITY)];

#[derive(Clone, Debug, Serialize)]
struct AuditRow {
    seed: u64,
    kind: CorpusKind,
    intervals: usize,
    strichartz: [f64; 3],
    local_smoothing: f64,
    square_function: f64,
    weighted_half: f64,
    reconstruction: f64,
}

fn audit_row(grid: RadialGrid, seed: u64, cfg: &super::manifest::NormsSpec) -> Result<AuditRow> {
    let kind = CorpusKind::rotation(seed);
    let phi = corpus(grid, seed, kind);
    let trace = SpaceTimeTrace::sample(0.0, cfg.t_window, cfg.time_samples, |t| free_propagate(&phi, t))?;
    let mut strichartz = [0.0; 3];
    for (slot, &(q, r)) in strichartz.iter_mut().zip(&STRICHARTZ_PAIRS) {
        let s = 1.5 - 2.0 / q - 3.0 / r;
        *slot = strichartz_norm(&trace, q, r)? / sobolev_norm(&phi, s);
    }
    let local_smoothing = local_smoothing_functional(&trace, 0.5)?.value / l2_norm(&phi);
    let sum = full_band(&grid)
        .into_iter()
        .map(|n| project_dyadic(&phi, n))
        .try_fold(RadialField::zeros(grid), |acc, p| acc.try_add(&p))?;
    Ok(AuditRow {
        seed,
        kind,
        intervals: grid.intervals(),
        strichartz,
        local_smoothing,
        square_function: square_function_ratio(&phi),
        weighted_half: weighted_norm(&phi, 0.5),
        reconstruction: rel_diff(&sum, &phi)?,
    })
}

fn column_max(rows: &[AuditRow], f: impl Fn(&AuditRow) -> f64) -> f64 {
    rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
}

fn column_min(rows: &[AuditRow], f: impl Fn(&AuditRow) -> f64) -> f64 {
    rows.iter().map(f).fold(f64::INFINITY, f64::min)
}

pub fn norms(m: &Manifest) -> Result<Outcome> {
    use rayon::prelude::*;
    let cfg = &m.norms;
    let coarse = m.grid.build()?;
    let fine = coarse.refined();
    let seeds: Vec<u64> = (0..cfg.corpora).map(|i| m.seed.wrapping_add(i)).collect();
    let rows_for = |grid: RadialGrid| -> Result<Vec<AuditRow>> {
        seeds.par_iter().map(|&s| audit_row(grid, s, cfg)).collect()
    };
    let rows_c = rows_for(coarse)?;
    let rows_f = rows_for(fine)?;

    let mut checks = Vec::new();
    let c = criticality(3, 1.0)?;
    checks.push(Check::flag("criticality_s_c", c.s_c == -0.5, c.s_c, "== -0.5"));
    checks.push(Check::flag("criticality_gamma", c.gamma == 1.0, c.gamma, "== 1"));

    let bandlimited = |r: &&AuditRow| r.kind == CorpusKind::RandomBandlimited;
    let recon = rows_c
        .iter()
        .chain(&rows_f)
        .filter(bandlimited)
        .map(|r| r.reconstruction)
        .fold(0.0, f64::max);
    checks.push(Check::at_most("lp_reconstruction", recon, cfg.reconstruction_tol));

    let all_finite = rows_c.iter().chain(&rows_f).all(|r| r.weighted_half.is_finite());
    checks.push(Check::flag(
        "weighted_half_finite",
        all_finite,
        column_max(&rows_c, |r| r.weighted_half),
        "finite",
    ));

    let (sq_lo, sq_hi) = (column_min(&rows_c, |r| r.square_function), column_max(&rows_c, |r| r.square_function));
    let (sq_lo_f, sq_hi_f) = (column_min(&rows_f, |r| r.square_function), column_max(&rows_f, |r| r.square_function));
    let sq_change = ((sq_hi_f / sq_hi) - 1.0).abs().max(((sq_lo_f / sq_lo) - 1.0).abs());
    checks.push(
        Check::flag(
            "square_function_stable",
            sq_lo.is_finite() && sq_hi.is_finite() && sq_change <= cfg.square_function_tol,
            sq_change,
            format!("<= {}", cfg.square_function_tol),
        )
        .with_detail(format!("envelope [{sq_lo:.4}, {sq_hi:.4}] -> [{sq_lo_f:.4}, {sq_hi_f:.4}]")),
    );

    let mut growth_check = |name: &str, f: &dyn Fn(&AuditRow) -> f64| {
        let (a, b) = (column_max(&rows_c, f), column_max(&rows_f, f));
        let growth = b / a - 1.0;
        checks.push(
            Check::flag(
                name,
                a.is_finite() && b.is_finite() && growth <= cfg.refinement_growth_tol,
                growth,
                format!("<= {}", cfg.refinement_growth_tol),
            )
            .with_detail(format!("max {a:.4e} (M = {}), {b:.4e} (M = {})", coarse.intervals(), fine.intervals())),
        );
    };
    for (i, &(q, r)) in STRICHARTZ_PAIRS.iter().enumerate() {
        growth_check(&format!("strichartz_q{q}_r{r}"), &|row| row.strichartz[i]);
    }
    growth_check("local_smoothing", &|row| row.local_smoothing);

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record([
        "seed",
        "kind",
        "M",
        "strichartz_4_3",
        "strichartz_8_4",
        "strichartz_2_inf",
        "local_smoothing",
        "square_function",
        "weighted_half",
        "reconstruction",
    ])?;
    for r in rows_c.iter().chain(&rows_f) {
        let kind = match r.kind {
            CorpusKind::GaussianMix => "gaussian_mix".to_string(),
            CorpusKind::ShellBump { j } => format!("shell_bump({j})"),
            CorpusKind::RandomBandlimited => "random_bandlimited".to_string(),
        };
        let e = |x: f64| format!("{x:.17e}");
        csv.write_record([
            r.seed.to_string(),
            kind,
            r.intervals.to_string(),
            e(r.strichartz[0]),
            e(r.strichartz[1]),
            e(r.strichartz[2]),
            e(r.local_smoothing),
            e(r.square_function),
            e(r.weighted_half),
            e(r.reconstruction),
        ])?;
    }
    let csv = csv.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    let artifacts = vec![Artifact {
        file_name: "norms_audit.csv".into(),
        contents: csv,
    }];
    Ok((checks, artifacts))
}

pub fn oracle(m: &Manifest) -> Result<Outcome> {
    let grid = m.grid.build()?;
    let f = m.data.build(grid, m.seed)?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for &t in &m.oracle.times {
        let e = rel_diff(&kernel_propagate(&f, t)?, &free_propagate(&f, t))?;
        checks.push(Check::at_most(format!("kernel_vs_spectral_t{t}"), e, m.oracle.tol));
        rows.push((t, e));
    }
    Ok((checks, vec![Artifact::json("oracle.json", &rows)?]))
}
