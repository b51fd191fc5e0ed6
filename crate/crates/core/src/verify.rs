//! Property suites with pinned tolerances, one per verified claim.
//!
//! Every suite builds its own data from seeded generators, runs the production code path and
//! returns named checks. The CLI `verify` command and the acceptance tests print the same
//! records.

use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::cauchy::{cauchy_transform, moment_table_within, CenterField, MomentTable};
use crate::conditions::{check_structure, structure_geometries, StructureOptions};
use crate::corona_ops::{decompose, k_full, stage_geometry, DecomposeOptions};
use crate::error::{Error, Result};
use crate::field::{dbar_fd_order, form_dbar, FdOrder, GridSpec, QForm, ScalarField};
use crate::solver::{closedness, solve, solve_1d_punctured, solve_vanishing, SolveOptions, SolveResult};
use crate::testdata::{
    annulus_profile, bump_field, exact_form, exact_form_discrete, mass_bump, polynomial, AnalyticField, Bump, Factor,
    plateau_profile, Poly2, Product, SHARPNESS,
};
use crate::zeroset::{corona_geometry, disc_family, PolynomialF};
use crate::C64;

const PAD: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// One measured quantity against its limit.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit, bound: Bound::AtMost, pass: value <= limit }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit, bound: Bound::AtLeast, pass: value >= limit }
    }

    /// A yes/no property, recorded as 1 or 0 against 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        let tag = if self.pass { "ok  " } else { "FAIL" };
        write!(f, "{tag} {}: {:.4e} {op} {:.4e}", self.name, self.value, self.limit)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Suite {
    CauchyInversion,
    NormBound,
    MomentEquivalence,
    CoronaMoments,
    Decomposition,
    Structure,
    Solve01,
    Solve0n,
    Solve0n1,
    GeneralQ,
    Vanishing,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::CauchyInversion,
        Suite::NormBound,
        Suite::MomentEquivalence,
        Suite::CoronaMoments,
        Suite::Decomposition,
        Suite::Structure,
        Suite::Solve01,
        Suite::Solve0n,
        Suite::Solve0n1,
        Suite::GeneralQ,
        Suite::Vanishing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CauchyInversion => "cauchy-inversion",
            Suite::NormBound => "norm-bound",
            Suite::MomentEquivalence => "moment-equivalence",
            Suite::CoronaMoments => "corona-moments",
            Suite::Decomposition => "decomposition",
            Suite::Structure => "structure",
            Suite::Solve01 => "solve-01",
            Suite::Solve0n => "solve-0n",
            Suite::Solve0n1 => "solve-0n1",
            Suite::GeneralQ => "general-q",
            Suite::Vanishing => "vanishing",
        }
    }

    /// Acceptance criterion number.
    pub fn number(self) -> usize {
        Suite::ALL.iter().position(|&s| s == self).unwrap() + 1
    }

    /// Wall-clock budget in seconds.
    pub fn budget(self) -> f64 {
        match self {
            Suite::CauchyInversion => 5.0,
            Suite::NormBound | Suite::MomentEquivalence => 10.0,
            Suite::CoronaMoments => 60.0,
            Suite::Decomposition | Suite::Solve01 => 120.0,
            Suite::Structure | Suite::Solve0n | Suite::Vanishing => 300.0,
            Suite::Solve0n1 | Suite::GeneralQ => 600.0,
        }
    }

    pub fn parse(name: &str) -> Result<Vec<Suite>> {
        if name == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::ALL
            .iter()
            .find(|s| s.name() == name)
            .map(|&s| vec![s])
            .ok_or_else(|| Error::Parse(format!("unknown suite {name}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub criterion: usize,
    pub checks: Vec<Check>,
    pub seconds: f64,
    pub pass: bool,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Runs one suite. Errors from the code under test become failed checks rather than aborting.
pub fn run(suite: Suite, seed: u64) -> SuiteReport {
    let t0 = Instant::now();
    let mut checks = match run_checks(suite, seed) {
        Ok(c) => c,
        Err(e) => vec![Check::holds(format!("runs without error ({}: {e})", e.class()), false)],
    };
    let seconds = t0.elapsed().as_secs_f64();
    checks.push(Check::at_most("runtime seconds", seconds, suite.budget()));
    let pass = checks.iter().all(|c| c.pass);
    SuiteReport { suite: suite.name(), criterion: suite.number(), checks, seconds, pass }
}

fn run_checks(suite: Suite, seed: u64) -> Result<Vec<Check>> {
    match suite {
        Suite::CauchyInversion => cauchy_inversion(seed),
        Suite::NormBound => norm_bound(seed),
        Suite::MomentEquivalence => moment_equivalence(),
        Suite::CoronaMoments => corona_moments(seed),
        Suite::Decomposition => decomposition(seed),
        Suite::Structure => structure(seed),
        Suite::Solve01 => solve_01_suite(seed),
        Suite::Solve0n => solve_0n_suite(seed),
        Suite::Solve0n1 => solve_0n1_suite(seed),
        Suite::GeneralQ => general_q(seed),
        Suite::Vanishing => vanishing(seed),
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rel_sup(a: &ScalarField, b: &ScalarField) -> f64 {
    a.sub(b).sup_norm() / b.sup_norm()
}

/// ‖∂̄G(φ) − φ‖_∞ / ‖φ‖_∞ for a smooth bump, n = 1.
pub fn inversion_residual(res: usize, seed: u64) -> Result<f64> {
    let g = GridSpec::uniform(1, res, PAD)?;
    let phi = bump_field(1, 0.5, seed).sample(&g)?;
    let u = cauchy_transform(&phi, 0)?;
    Ok(rel_sup(&dbar_fd_order(&u, 0, FdOrder::Fourth), &phi))
}

fn cauchy_inversion(seed: u64) -> Result<Vec<Check>> {
    let e512 = inversion_residual(512, seed)?;
    let e1024 = inversion_residual(1024, seed)?;
    Ok(vec![
        Check::at_most("relative sup residual, res 512", e512, 2e-2),
        Check::at_least("residual reduction 512 -> 1024", e512 / e1024, 1.7),
    ])
}

fn norm_bound(seed: u64) -> Result<Vec<Check>> {
    let g = GridSpec::uniform(1, 128, PAD)?;
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let s = seed.wrapping_add(i);
        let radius = 0.3 + 0.05 * (i % 8) as f64;
        let phi = bump_field(1, radius, s).sample(&g)?;
        let u = cauchy_transform(&phi, 0)?;
        worst = worst.max(u.lr_norm(2.0)? / phi.lr_norm(2.0)?);
    }
    Ok(vec![Check::at_most("max ||G(phi)||_2 / ||phi||_2 over 10 fields", worst, 2.1)])
}

fn f_z() -> Result<PolynomialF> {
    polynomial("z1")
}

fn moment_equivalence() -> Result<Vec<Check>> {
    let g = GridSpec::uniform(1, 512, PAD)?;
    let profile = AnalyticField::single(Product::new(c(1.0, 0.0), vec![annulus_profile()]));
    let u0 = profile.sample(&g)?;
    let phi = profile.dbar(0)?.sample(&g)?;
    let f = f_z()?;
    let sup = crate::field::support_info(&phi, 1e-6);
    let discs = disc_family(&f, 0, &sup, &g)?;
    let opts = SolveOptions { l_max: 12, ..Default::default() };
    let centers: Vec<CenterField> = vec![vec![Some(c(0.0, 0.0))]];
    let table = crate::cauchy::moment_table(&phi, 0, &centers, 12)?;
    let mut checks = vec![Check::at_most("max normalized moment, l <= 12, outer and puncture 0", table.worst().0, 1e-6)];
    let solved = solve_1d_punctured(&phi, Some(&discs), &opts)?;
    let u = solved.solution.coeff_or_zero(&[0]);
    checks.push(Check::at_most("reconstruction ||u - u0||_inf / ||u0||_inf", rel_sup(&u, &u0), 1e-3));

    let m = mass_bump(1, 0.4).sample(&g)?;
    let obstructed = matches!(solve_1d_punctured(&m, None, &opts), Err(Error::MomentObstruction { .. }));
    checks.push(Check::holds("mass bump raises MomentObstruction", obstructed));
    let geom = corona_geometry(&m, 0, None)?;
    let gm = cauchy_transform(&m, 0)?;
    let pts = g.plane_points(0);
    let corona = ScalarField::from_values(
        &g,
        gm.values().iter().zip(&pts).map(|(v, z)| if geom.outer.contains(*z) { *v } else { c(0.0, 0.0) }).collect(),
    )?;
    checks.push(Check::at_least("corona mass ||G(m)||_2 on the outer corona / ||m||_2", corona.lr_norm(2.0)? / m.lr_norm(2.0)?, 0.1));
    Ok(checks)
}

/// max over l ≤ l_max of |[Kφ] − [φ]| / ‖φ‖_2, outer and punctured families separately.
fn preservation(phi: &ScalarField, kphi: &ScalarField, k: usize, centers: &[CenterField], l_max: usize) -> Result<(f64, f64)> {
    let limit = 0.5 * phi.grid().hmax(k);
    let a = moment_table_within(phi, k, centers, l_max, limit)?;
    let b = moment_table_within(kphi, k, centers, l_max, limit)?;
    let norm = a.norm;
    let diff = |x: &MomentTable, y: &MomentTable| {
        let outer = x.outer.iter().zip(&y.outer).map(|(p, q)| sup_diff(p.values(), q.values())).fold(0.0, f64::max);
        let punct = x
            .punctured
            .iter()
            .map(|(key, p)| sup_diff(p.values(), y.punctured[key].values()))
            .fold(0.0, f64::max);
        (outer / norm, punct / norm)
    };
    Ok(diff(&a, &b))
}

fn sup_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn preservation_case(phi: &ScalarField, f: Option<&PolynomialF>) -> Result<(f64, f64, bool)> {
    let opts = DecomposeOptions { zero_set: f.cloned(), ..Default::default() };
    let geom = stage_geometry(phi, 0, &opts)?;
    let kphi = k_full(phi, 0, &geom)?;
    let (o, p) = preservation(phi, &kphi, 0, &geom.all_puncture_centers(), 8)?;
    Ok((o, p, geom.max_punctures() > 0))
}

fn off_center_bump(n: usize, center: C64, radius: f64, other_radius: f64, seed: u64) -> AnalyticField {
    let mut factors = vec![Factor::new(
        Bump::disc(center, radius, SHARPNESS),
        Poly2::new(vec![(0, 0, c(1.0, 0.0)), (1, 0, c(0.3, -0.2)), (0, 1, c(0.1, 0.25))]),
    )];
    for k in 1..n {
        let b = bump_field(1, other_radius, seed.wrapping_add(k as u64));
        factors.push(b.terms[0].factors[0].clone());
    }
    AnalyticField::single(Product::new(c(1.0, 0.0), factors))
}

fn corona_moments(seed: u64) -> Result<Vec<Check>> {
    let tol = 1e-5;
    let mut checks = Vec::new();

    let g = GridSpec::uniform(1, 256, PAD)?;
    let (o, _, _) = preservation_case(&bump_field(1, 0.5, seed).sample(&g)?, None)?;
    checks.push(Check::at_most("n=1 outer", o, tol));

    let phi = off_center_bump(1, c(0.5, 0.2), 0.2, 0.0, seed).sample(&g)?;
    let (o, p, has) = preservation_case(&phi, Some(&f_z()?))?;
    checks.push(Check::holds("n=1 punctured case has an inner corona", has));
    checks.push(Check::at_most("n=1 punctured, outer moments", o, tol));
    checks.push(Check::at_most("n=1 punctured, punctured moments", p, tol));

    let g = GridSpec::uniform(1, 512, PAD)?;
    let phi = off_center_bump(1, c(0.5, 0.2), 0.2, 0.0, seed).sample(&g)?;
    let pair = polynomial("pair")?;
    let sup = crate::field::support_info(&phi, 1e-6);
    let fam = disc_family(&pair, 0, &sup, &g)?;
    let merged = fam.per_line[0].len() == 1 && fam.per_line[0][0].members.len() == 2;
    checks.push(Check::holds("two roots merged into one disc", merged));
    let (o, p, _) = preservation_case(&phi, Some(&pair))?;
    checks.push(Check::at_most("n=1 merged pair, outer moments", o, tol));
    checks.push(Check::at_most("n=1 merged pair, punctured moments", p, tol));

    let g = GridSpec::uniform(2, 48, PAD)?;
    let (o, _, _) = preservation_case(&bump_field(2, 0.5, seed).sample(&g)?, None)?;
    checks.push(Check::at_most("n=2 outer", o, tol));

    // inner coronas need the n=1 resolution in z_1; z_2 only moves the puncture from line to line
    let g = GridSpec::new(2, vec![256, 256, 8, 8], vec![(-1.0 - PAD, 1.0 + PAD); 4])?;
    let phi = off_center_bump(2, c(0.5, 0.2), 0.2, 0.5, seed).sample(&g)?;
    let shifted = PolynomialF::new(2, [(vec![1, 0], c(1.0, 0.0)), (vec![0, 1], c(-0.05, 0.0))])?;
    let (o, p, has) = preservation_case(&phi, Some(&shifted))?;
    checks.push(Check::holds("n=2 punctured case has inner coronas", has));
    checks.push(Check::at_most("n=2 punctured, outer moments", o, tol));
    checks.push(Check::at_most("n=2 punctured, punctured moments", p, tol));
    Ok(checks)
}

fn decomposition(seed: u64) -> Result<Vec<Check>> {
    let g = GridSpec::uniform(2, 48, PAD)?;
    let phi = bump_field(2, 0.5, seed).sample(&g)?;
    let d = decompose(&phi, &DecomposeOptions::default())?;
    Ok(vec![
        Check::at_most("telescoping ||phi - sum phi_i|| / ||phi||", d.telescoping_error(&phi), 1e-12),
        Check::at_most("annihilation max |[phi_1]_1(l)|, l <= 8", d.max_stage_moment(), 1e-5),
        Check::holds("parts supported in support and coronas", d.supports_contained(&phi, 0.0)),
    ])
}

fn structure(seed: u64) -> Result<Vec<Check>> {
    let g = GridSpec::uniform(2, 48, PAD)?;
    let (w, _) = exact_form(&g, 2, &[0.5, 0.8], seed)?;
    let phi = w.coeff_or_zero(&[]);
    let opts = StructureOptions { l_max: 4, k_max: 8, ..Default::default() };
    let dopts = DecomposeOptions::default();
    let report = check_structure(&phi, &structure_geometries(&phi, &dopts)?, &opts)?;
    let mut checks = vec![Check::at_most("exact form: worst structure integral", report.worst().map_or(0.0, |e| e.value), opts.tolerance)];
    let d = decompose(&phi, &dopts)?;
    let last = d.parts.last().expect("n parts");
    let t = moment_table_within(last, 1, &[], 8, 0.0)?;
    checks.push(Check::at_most("exact form: [phi_n]_n moments, l <= 8", t.worst().0, 1e-5));

    let m = mass_bump(2, 0.4).sample(&g)?;
    let report = check_structure(&m, &structure_geometries(&m, &dopts)?, &opts)?;
    let first = report.first_failure().map(|e| (e.spec.mu.clone(), e.spec.l.clone(), e.spec.k));
    checks.push(Check::holds("mass bump fails", !report.pass));
    checks.push(Check::holds("mass bump first failure at mu=0, l=0, k=0", first == Some((vec![0], vec![0], 0))));
    Ok(checks)
}

fn support_tail(r: &SolveResult) -> f64 {
    r.report.support.iter().map(|s| s.tail_outside_polydisc).fold(0.0, f64::max)
}

fn solve_01_suite(seed: u64) -> Result<Vec<Check>> {
    let g = GridSpec::uniform(2, 48, PAD)?;
    let (w, t) = exact_form(&g, 1, &[0.5, 0.5], seed)?;
    let r = solve(&w, &SolveOptions::default())?;
    let f = r.solution.coeff_or_zero(&[0, 1]);
    let expected = t.coeff_or_zero(&[0, 1]);
    Ok(vec![
        Check::at_most("recovery ||f - g||_inf / ||g||_inf", rel_sup(&f, &expected), 2e-2),
        Check::at_most("support tail outside the polydisc", support_tail(&r), 1e-6),
        Check::at_most("norm ratio ||f||_2 / ||omega||_2", r.report.norm_ratio, 2.1),
    ])
}

fn residual_of(r: &SolveResult) -> f64 {
    r.report.residual.as_ref().map_or(f64::INFINITY, |x| x.relative)
}

fn solve_0n_suite(seed: u64) -> Result<Vec<Check>> {
    let g = GridSpec::uniform(2, 48, PAD)?;
    let (w, _) = exact_form(&g, 2, &[0.5, 0.5], seed)?;
    let r = solve(&w, &SolveOptions::default())?;
    Ok(vec![
        Check::at_most("relative residual", residual_of(&r), 2e-2),
        Check::at_most("support tail outside the polydisc", support_tail(&r), 1e-6),
    ])
}

fn structural_checks(w: &QForm, r: &SolveResult) -> Vec<Check> {
    let beta = &r.solution;
    let dd = form_dbar(&form_dbar(beta));
    let scale = form_dbar(beta).sup_norm().max(f64::MIN_POSITIVE);
    vec![
        Check::at_most("input closedness", closedness(w), 1e-12),
        Check::at_most("dbar dbar of the solution, relative", dd.sup_norm() / scale, 1e-12),
        Check::at_most("telescoping over all decompositions", r.report.telescoping, 1e-12),
        Check::holds("decomposition parts stay in support and coronas", r.report.supports_contained),
    ]
}

fn solve_0n1_suite(seed: u64) -> Result<Vec<Check>> {
    let g = GridSpec::uniform(3, 12, PAD)?;
    let (w, _) = exact_form_discrete(&g, 2, &[0.5, 0.5, 0.5], seed)?;
    let r = solve(&w, &SolveOptions::default())?;
    let mut checks = structural_checks(&w, &r);
    checks.push(Check::at_most("relative residual", residual_of(&r), 0.3));
    Ok(checks)
}

fn general_q(seed: u64) -> Result<Vec<Check>> {
    let g = GridSpec::uniform(4, 6, PAD)?;
    let (w, _) = exact_form_discrete(&g, 2, &[0.5; 4], seed)?;
    let r = solve(&w, &SolveOptions::default())?;
    let mut checks = structural_checks(&w, &r);
    checks.push(Check::holds("solver is the general recursion", r.report.solver == "general"));
    // reported, not judged
    checks.push(Check::at_most("relative residual (reported)", residual_of(&r), f64::INFINITY));
    Ok(checks)
}

fn vanishing(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let g = GridSpec::uniform(1, 256, PAD)?;
    let profile = AnalyticField::single(Product::new(c(1.0, 0.0), vec![plateau_profile()]));
    let w = QForm::top(profile.dbar(0)?.sample(&g)?);
    for k in [1u32, 2] {
        let r = solve_vanishing(&w, &f_z()?, k, &SolveOptions::default())?;
        let slope = r.report.vanishing.as_ref().and_then(|v| v.slope).unwrap_or(f64::NAN);
        checks.push(Check::at_most(format!("n=1 log-log slope deviation, k={k}"), (slope - k as f64).abs(), 0.2));
    }

    let g = GridSpec::uniform(2, 48, PAD)?;
    let (w, _) = exact_form(&g, 2, &[0.85, 0.1], seed)?;
    let r = solve_vanishing(&w, &polynomial("hyperbola")?, 1, &SolveOptions::default())?;
    let v = r.report.vanishing.clone().expect("vanishing report");
    checks.push(Check::at_most("n=2 relative residual", residual_of(&r), 5e-2));
    checks.push(Check::at_most("n=2 max|eta| on {|f| < 0.02} / max|eta|", v.near_zero_set, 1e-3));
    checks.push(Check::at_least(
        "n=2 coefficients at least delta/2 from Z",
        v.coefficients_away as f64,
        v.coefficients.saturating_sub(1) as f64,
    ));
    Ok(checks)
}
