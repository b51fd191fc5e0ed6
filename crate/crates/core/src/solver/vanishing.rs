//! Solutions η = f^k β that vanish to order k on Z = f^{-1}(0).

use serde::Serialize;

use super::{dispatch, finish, support_reports, Ctx, SolveOptions, SolveReport, SolveResult};
use crate::cauchy::cauchy_transform;
use crate::error::{Error, Result};
use crate::field::{sample, support_info, QForm, ScalarField, SupportInfo};
use crate::zeroset::{line_distance, separation, PolynomialF};
use crate::C64;

/// Levels ε of the sweep max{|η| : |f| < ε}.
pub const VANISHING_EPS: [f64; 3] = [0.05, 0.1, 0.2];

/// Level used for the near-Z check.
pub const NEAR_LEVEL: f64 = 0.02;

#[derive(Clone, Debug, Serialize)]
pub struct VanishingReport {
    pub k: u32,
    /// min over variables of the separation between supp ω and Z.
    pub delta: f64,
    pub eps: Vec<f64>,
    /// max{|η| : |f| < ε} per level.
    pub level_max: Vec<f64>,
    /// Least-squares slope of log level_max against log ε, over the positive entries.
    pub slope: Option<f64>,
    /// max{|η| : |f| < 0.02} / max|η|.
    pub near_zero_set: f64,
    /// Coefficients whose support stays at least δ/2 from Z along coordinate lines.
    pub coefficients_away: usize,
    pub coefficients: usize,
}

fn union_support(omega: &QForm, tau: f64) -> SupportInfo {
    let grid = omega.grid();
    let mut mask = vec![false; grid.len()];
    let mut radius = vec![0.0f64; grid.n()];
    let total = omega.sup_norm();
    for (_, c) in omega.iter() {
        if c.is_zero() {
            continue;
        }
        // per-coefficient threshold relative to the whole form
        let rel = tau * total / c.sup_norm();
        let s = support_info(c, rel);
        for (m, b) in mask.iter_mut().zip(&s.mask) {
            *m |= *b;
        }
        for (r, x) in radius.iter_mut().zip(&s.radius_per_axis) {
            *r = r.max(*x);
        }
    }
    SupportInfo { mask, radius_per_axis: radius, distance_to_set: None }
}

/// max{|η| : |f| < ε} for each ε.
pub fn vanishing_profile(eta: &QForm, f: &PolynomialF, eps: &[f64]) -> Result<Vec<f64>> {
    let fv = sample(|z| f.eval(z), eta.grid())?;
    let mut out = vec![0.0f64; eps.len()];
    for (_, c) in eta.iter() {
        for (v, fz) in c.values().iter().zip(fv.values()) {
            for (o, &e) in out.iter_mut().zip(eps) {
                if fz.norm() < e {
                    *o = o.max(v.norm());
                }
            }
        }
    }
    Ok(out)
}

fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).filter(|(_, &v)| v > 0.0).map(|(a, b)| (a.ln(), b.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(n, d), (x, y)| (n + (x - mx) * (y - my), d + (x - mx) * (x - mx)));
    (den > 0.0).then(|| num / den)
}

/// ω with supp ω away from Z: solve for f^{−k}ω and multiply back by f^k.
pub fn solve_vanishing(omega: &QForm, f: &PolynomialF, k: u32, opts: &SolveOptions) -> Result<SolveResult> {
    opts.validate()?;
    let grid = omega.grid().clone();
    let n = grid.n();
    if f.n() != n || omega.dim() != n {
        return Err(Error::Domain(format!("polynomial in {} variables, form in {} of {n}", f.n(), omega.dim())));
    }
    let q = omega.q();
    if q == 0 {
        return Err(Error::Domain("nothing to solve for a (0,0)-form".into()));
    }
    if k == 0 {
        let mut res = super::solve(omega, opts)?;
        res.report.notes.push("k = 0: plain solve".into());
        return Ok(res);
    }
    let fk = sample(|z| f.eval(z).powu(k), &grid)?;
    if omega.sup_norm() == 0.0 {
        let res = finish(omega, QForm::with_dim(&grid, n, q - 1)?, Ctx::new(opts, Some(f)), SolveReport::default())?;
        return Ok(res);
    }
    let sup = union_support(omega, opts.tol_support);
    let mut delta = f64::INFINITY;
    for axis in 0..n {
        delta = delta.min(separation(f, axis, &sup, &grid)?);
    }

    // f^{-k} ω, zero wherever ω is negligible
    let thr = opts.tol_support * omega.sup_norm();
    let divided = omega.map_coeffs(|c| {
        let vals = c
            .values()
            .iter()
            .zip(fk.values())
            .map(|(v, d)| if v.norm() <= thr { C64::new(0.0, 0.0) } else { v / d })
            .collect();
        ScalarField::from_values(&grid, vals).expect("finite off Z")
    });

    let mut ctx = Ctx::new(opts, Some(f));
    let beta = if q == n {
        let phi = divided.coeff_or_zero(&[]);
        let axes: Vec<usize> = (0..n).collect();
        let d = ctx.decompose(&phi, &axes)?;
        let mut b = QForm::with_dim(&grid, n, n - 1)?;
        for (j, part) in d.parts.iter().enumerate() {
            if part.is_zero() {
                continue;
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            b.accumulate(vec![j], C64::new(sign, 0.0), &cauchy_transform(part, j)?);
        }
        b
    } else {
        ctx.enter()?;
        let b = dispatch(&divided, &mut ctx)?;
        ctx.leave();
        b
    };
    let eta = beta.map_coeffs(|c| c.mul(&fk));

    let report = SolveReport { solver: format!("vanishing({})", super::route(n, q)), ..Default::default() };
    let mut res = finish(omega, eta, ctx, report)?;
    let h: Vec<f64> = (0..n).map(|a| grid.hmax(a)).collect();
    let dist = |z: &[C64]| line_distance(f, z, &h);
    res.report.support = support_reports(&res.solution, opts.tol_support, Some(&dist));

    let level_max = vanishing_profile(&res.solution, f, &VANISHING_EPS)?;
    let near = vanishing_profile(&res.solution, f, &[NEAR_LEVEL])?[0];
    let max = res.solution.sup_norm();
    let away = res
        .report
        .support
        .iter()
        .filter(|s| s.max_modulus == 0.0 || s.distance_to_zero_set.is_some_and(|d| d >= 0.5 * delta))
        .count();
    res.report.vanishing = Some(VanishingReport {
        k,
        delta,
        eps: VANISHING_EPS.to_vec(),
        slope: loglog_slope(&VANISHING_EPS, &level_max),
        level_max,
        near_zero_set: if max > 0.0 { near / max } else { 0.0 },
        coefficients_away: away,
        coefficients: res.solution.len(),
    });
    Ok(res)
}
