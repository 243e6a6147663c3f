use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::radial_spectral::{radial_derivative, RadialField, FOUR_PI};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criticality {
    /// `d/2 - 2/p`
    pub s_c: f64,
    /// `(2 - d + sqrt(d^2 + 12d + 4)) / (2d)`
    pub gamma: f64,
}

pub fn criticality(d: u32, p: f64) -> Result<Criticality> {
    if d == 0 {
        return Err(invalid("d", "dimension must be >= 1"));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(invalid("p", format!("must be positive, got {p}")));
    }
    let d = d as f64;
    Ok(Criticality {
        s_c: d / 2.0 - 2.0 / p,
        gamma: (2.0 - d + (d * d + 12.0 * d + 4.0).sqrt()) / (2.0 * d),
    })
}

/// Inputs of an inequality audit in three dimensions.
#[derive(Clone, Debug)]
pub enum AuditInput<'a> {
    /// `|| u/|x| ||_{L^p} <= C ||grad u||_{L^p}`, `1 < p < 3`.
    Hardy { field: &'a RadialField, p: f64 },
    /// `|| |grad|^{s1} u ||_{p1} <= C || |grad|^{s2} u ||_{p2}^theta ||u||_{p3}^{1-theta}`
    /// with `s1 = theta s2` and `1/p1 = theta/p2 + (1-theta)/p3`.
    GagliardoNirenberg {
        field: &'a RadialField,
        s1: f64,
        s2: f64,
        theta: f64,
        p1: f64,
        p2: f64,
        p3: f64,
    },
    /// `|| |x|^beta u ||_{L^{q'}} <= C || |x|^{-alpha} |grad|^s u ||_{L^p}` for radial `u`.
    RadialSobolev {
        field: &'a RadialField,
        alpha: f64,
        beta: f64,
        s: f64,
        p: f64,
        q: f64,
    },
    /// `sum_{N1 <= N} (N1/N)^a a_N b_{N1} <= C ||a|| ||b||`, sequences indexed by
    /// `N = 2^i`, `i = 0, 1, ...`.
    Schur { a: &'a [f64], b: &'a [f64], exponent: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, an empirical lower bound on the constant.
    pub ratio: f64,
}

fn require(ok: bool, relation: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Constraint(relation.to_string()))
    }
}

fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn recip(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

/// `|| |x|^w f ||_{L^p}` for physical values `f`, `p` in `[1, inf]`.
fn weighted_lebesgue(field: &RadialField, values: &[num_complex::Complex64], w: f64, p: f64) -> f64 {
    let grid = field.grid();
    if p.is_infinite() {
        return grid
            .nodes()
            .zip(values)
            .map(|(r, f)| r.powf(w) * f.norm())
            .fold(0.0, f64::max);
    }
    (FOUR_PI
        * grid.spacing()
        * grid
            .nodes()
            .zip(values)
            .map(|(r, f)| r * r * (r.powf(w) * f.norm()).powf(p))
            .sum::<f64>())
    .powf(1.0 / p)
}

fn lifted_values(field: &RadialField, s: f64) -> Result<Vec<num_complex::Complex64>> {
    if s == 0.0 {
        return Ok(field.values());
    }
    Ok(field.apply_real_multiplier(|k| k.powf(s))?.values())
}

fn report(name: &str, lhs: f64, rhs: f64) -> AuditReport {
    AuditReport {
        name: name.to_string(),
        lhs,
        rhs,
        ratio: if rhs == 0.0 { 0.0 } else { lhs / rhs },
    }
}

const REL_TOL: f64 = 1e-12;

pub fn inequality_audit(input: &AuditInput<'_>) -> Result<AuditReport> {
    match *input {
        AuditInput::Hardy { field, p } => {
            require(p > 1.0 && p < 3.0, "hardy: 1 < p < d = 3")?;
            let inv_r: Vec<_> = field
                .values()
                .into_iter()
                .zip(field.grid().nodes())
                .map(|(f, r)| f / r)
                .collect();
            let lhs = weighted_lebesgue(field, &inv_r, 0.0, p);
            let rhs = weighted_lebesgue(field, &radial_derivative(field), 0.0, p);
            Ok(report("hardy", lhs, rhs))
        }
        AuditInput::GagliardoNirenberg {
            field,
            s1,
            s2,
            theta,
            p1,
            p2,
            p3,
        } => {
            require(theta > 0.0 && theta <= 1.0, "gagliardo_nirenberg: 0 < theta <= 1")?;
            require(s1 > 0.0 && s1 <= s2, "gagliardo_nirenberg: 0 < s1 <= s2")?;
            require((s1 - theta * s2).abs() <= REL_TOL * s2, "gagliardo_nirenberg: s1 = theta s2")?;
            require(
                [p1, p2, p3].iter().all(|&p| p > 1.0),
                "gagliardo_nirenberg: 1 < p1, p2, p3 <= inf",
            )?;
            require(
                (recip(p1) - theta * recip(p2) - (1.0 - theta) * recip(p3)).abs() <= REL_TOL,
                "gagliardo_nirenberg: 1/p1 = theta/p2 + (1-theta)/p3",
            )?;
            let lhs = weighted_lebesgue(field, &lifted_values(field, s1)?, 0.0, p1);
            let top = weighted_lebesgue(field, &lifted_values(field, s2)?, 0.0, p2);
            let base = if theta == 1.0 {
                1.0
            } else {
                weighted_lebesgue(field, &field.values(), 0.0, p3).powf(1.0 - theta)
            };
            Ok(report("gagliardo_nirenberg", lhs, top.powf(theta) * base))
        }
        AuditInput::RadialSobolev {
            field,
            alpha,
            beta,
            s,
            p,
            q,
        } => {
            let d = 3.0;
            let (pc, qc) = (conjugate(p), conjugate(q));
            require((1.0..=f64::INFINITY).contains(&p), "radial_sobolev: 1 <= p <= inf")?;
            require((1.0..=f64::INFINITY).contains(&q), "radial_sobolev: 1 <= q <= inf")?;
            require(s > 0.0 && s < d, "radial_sobolev: 0 < s < d")?;
            require(alpha > -d * recip(pc), "radial_sobolev: alpha > -d/p'")?;
            require(beta > -d * recip(qc), "radial_sobolev: beta > -d/q'")?;
            let sum = recip(p) + recip(q);
            require(
                sum >= 1.0 - REL_TOL && sum <= 1.0 + s + REL_TOL,
                "radial_sobolev: 1 <= 1/p + 1/q <= 1 + s",
            )?;
            require(
                (alpha + beta - d + s + d * recip(pc) + d * recip(qc)).abs() <= REL_TOL,
                "radial_sobolev: alpha + beta - d + s = -d/p' - d/q'",
            )?;
            let equalities = [p == 1.0, p.is_infinite(), q == 1.0, q.is_infinite(), (sum - 1.0 - s).abs() <= REL_TOL]
                .iter()
                .filter(|&&e| e)
                .count();
            require(equalities <= 1, "radial_sobolev: at most one endpoint equality")?;
            let lhs = weighted_lebesgue(field, &field.values(), beta, qc);
            let rhs = weighted_lebesgue(field, &lifted_values(field, s)?, -alpha, p);
            Ok(report("radial_sobolev", lhs, rhs))
        }
        AuditInput::Schur { a, b, exponent } => {
            require(exponent > 0.0, "schur: a > 0")?;
            require(a.len() == b.len(), "schur: sequences share the dyadic index set")?;
            let mut lhs = 0.0;
            for (i, &an) in a.iter().enumerate() {
                for (i1, &bn) in b.iter().enumerate().take(i + 1) {
                    lhs += 2f64.powf(exponent * (i1 as f64 - i as f64)) * an * bn;
                }
            }
            let l2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
            Ok(report("schur", lhs, l2(a) * l2(b)))
        }
    }
}
