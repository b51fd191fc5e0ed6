//! ∂̄ solvers for (0,q)-forms on the polydisc and on the polydisc minus a hypersurface.
//!
//! Every solver works on a form in its first `dim` variables; further grid variables are
//! parameters, so recursive steps run once on the full arrays instead of slice by slice.

mod residual;
mod star;
mod vanishing;

pub use residual::{jump_mask, residual, support_reports, tail_outside_polydisc, CoefficientSupport, ResidualReport};
pub use star::{check_star, check_star_with, StarEntry, StarReport, RESOLUTION_TOL, STAR_THRESHOLD};
pub use vanishing::{solve_vanishing, vanishing_profile, VanishingReport, VANISHING_EPS};

use serde::Serialize;

use crate::cauchy::{cauchy_transform, moment_table};
use crate::conditions::{check_structure, StructureOptions, StructureReport};
use crate::corona_ops::{decompose_axes, DecomposeOptions, Decomposition, StageMoments};
use crate::error::{Error, Result};
use crate::field::{dbar_fd_order, form_dbar_order, FdOrder, QForm, ScalarField};
use crate::zeroset::{CoronaGeometry, CoronaOptions, DiscFamily, PolynomialF};
use crate::C64;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Moment truncation for the input checks, at least 4.
    pub l_max: usize,
    /// Normalized moment tolerance for input checks.
    pub tol_moment: f64,
    /// Relative support threshold, also the tolerance for tails outside the promised region.
    pub tol_support: f64,
    /// [`closedness`] above this is not closed.
    pub tol_closed: f64,
    pub r: f64,
    pub max_depth: usize,
    pub structure: StructureOptions,
    /// Evaluate the structure conditions before a top-degree solve.
    pub check_structure: bool,
    pub check_star: bool,
    pub star_threshold: f64,
    pub corona: CoronaOptions,
    /// Moment order used when reporting decomposition stages.
    pub stage_l_max: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            l_max: 8,
            tol_moment: 1e-6,
            tol_support: 1e-6,
            tol_closed: 5e-2,
            r: 2.0,
            max_depth: 16,
            structure: StructureOptions::default(),
            check_structure: true,
            check_star: true,
            star_threshold: STAR_THRESHOLD,
            corona: CoronaOptions::default(),
            stage_l_max: 8,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.l_max < 4 {
            return Err(Error::Domain(format!("l_max {} < 4", self.l_max)));
        }
        let tols = [self.tol_moment, self.tol_support, self.tol_closed, self.structure.tolerance];
        if tols.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        if !(self.r >= 1.0) {
            return Err(Error::Domain(format!("L^r exponent {} < 1", self.r)));
        }
        Ok(())
    }

    fn decompose_options(&self, zero_set: Option<&PolynomialF>) -> DecomposeOptions {
        DecomposeOptions { corona: self.corona, l_max: self.stage_l_max, zero_set: zero_set.cloned() }
    }
}

/// Moment verdict of a one-variable solve.
#[derive(Clone, Debug, Serialize)]
pub struct MomentSummary {
    pub l_max: usize,
    pub worst: f64,
    /// 0 for the outer moments, else the puncture index.
    pub worst_puncture: usize,
    pub worst_order: usize,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureSummary {
    pub pass: bool,
    pub entries: usize,
    pub worst: f64,
    pub worst_spec: String,
    pub tolerance: f64,
}

impl From<&StructureReport> for StructureSummary {
    fn from(r: &StructureReport) -> Self {
        let w = r.worst();
        Self {
            pass: r.pass,
            entries: r.entries.len(),
            worst: w.map_or(0.0, |e| e.value),
            worst_spec: w.map_or_else(String::new, |e| e.spec.to_string()),
            tolerance: r.tolerance,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SolveReport {
    pub solver: String,
    pub n: usize,
    pub q: usize,
    pub residual: Option<ResidualReport>,
    pub support: Vec<CoefficientSupport>,
    /// ‖β‖_r / ‖ω‖_r.
    pub norm_ratio: f64,
    pub closedness: Option<f64>,
    pub moments: Option<MomentSummary>,
    pub structure: Option<StructureSummary>,
    pub star: Option<StarReport>,
    /// Every corona decomposition run on the way, in execution order.
    pub stages: Vec<StageMoments>,
    /// Largest relative telescoping error ‖φ − Σφ_i‖_∞/‖φ‖_∞ over those decompositions.
    pub telescoping: f64,
    /// Every part of every decomposition vanishes exactly outside the support of its input
    /// joined with the coronas used.
    pub supports_contained: bool,
    pub unreliable_geometry: bool,
    pub depth: usize,
    pub vanishing: Option<VanishingReport>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub solution: QForm,
    pub report: SolveReport,
}

impl SolveResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("report serializes")
    }
}

/// State threaded through the recursion: geometries for the residual mask and stage reports.
struct Ctx<'a> {
    opts: &'a SolveOptions,
    zero_set: Option<&'a PolynomialF>,
    geoms: Vec<CoronaGeometry>,
    stages: Vec<StageMoments>,
    telescoping: f64,
    supports_contained: bool,
    depth: usize,
    max_depth_seen: usize,
}

impl<'a> Ctx<'a> {
    fn new(opts: &'a SolveOptions, zero_set: Option<&'a PolynomialF>) -> Self {
        Self { opts, zero_set, geoms: Vec::new(), stages: Vec::new(), telescoping: 0.0, supports_contained: true, depth: 0, max_depth_seen: 0 }
    }

    fn decompose(&mut self, phi: &ScalarField, axes: &[usize]) -> Result<Decomposition> {
        let d = decompose_axes(phi, axes, &self.opts.decompose_options(self.zero_set))?;
        self.telescoping = self.telescoping.max(d.telescoping_error(phi));
        self.supports_contained &= d.supports_contained(phi, 0.0);
        self.stages.extend(d.residual_report.iter().cloned());
        self.geoms.extend(d.geometries.iter().cloned());
        Ok(d)
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        self.max_depth_seen = self.max_depth_seen.max(self.depth);
        if self.depth > self.opts.max_depth {
            return Err(Error::Depth(self.opts.max_depth));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }
}

/// Points at least two cells from the boundary on every axis of the first `dim` variables.
fn interior(grid: &crate::field::GridSpec, dim: usize) -> Vec<bool> {
    let res = grid.res();
    (0..grid.len())
        .map(|flat| {
            let idx = grid.unravel(flat);
            (0..2 * dim).all(|a| idx[a] >= 2 && idx[a] + 2 < res[a])
        })
        .collect()
}

fn interior_sup(f: &ScalarField, keep: &[bool]) -> f64 {
    f.values().iter().zip(keep).filter(|(_, &k)| k).map(|(v, _)| v.norm()).fold(0.0, f64::max)
}

/// Cancellation ratio of ∂̄ω: the largest interior coefficient of the discrete ∂̄ω over the
/// largest single term ∂̄_k ω_J entering it, minimized over second- and fourth-order stencils.
/// Rounding level for data closed under either stencil, O(h²) or better for sampled smooth
/// closed forms, order one otherwise. 0 for top-degree or zero forms.
pub fn closedness(omega: &QForm) -> f64 {
    let dim = omega.dim();
    if omega.q() == dim || omega.sup_norm() == 0.0 {
        return 0.0;
    }
    let keep = interior(omega.grid(), dim);
    let ratio = |order: FdOrder| {
        let mut scale: f64 = 0.0;
        for (j, f) in omega.iter() {
            for &k in j {
                scale = scale.max(interior_sup(&dbar_fd_order(f, k, order), &keep));
            }
        }
        if scale == 0.0 {
            return 0.0;
        }
        let d = form_dbar_order(omega, order);
        d.iter().map(|(_, f)| interior_sup(f, &keep)).fold(0.0, f64::max) / scale
    };
    ratio(FdOrder::Second).min(ratio(FdOrder::Fourth))
}

fn require_closed(omega: &QForm, opts: &SolveOptions) -> Result<f64> {
    let c = closedness(omega);
    if c > opts.tol_closed {
        return Err(Error::NotClosed { value: c, tol: opts.tol_closed });
    }
    Ok(c)
}

fn require_star(omega: &QForm, opts: &SolveOptions, report: &mut SolveReport) -> Result<()> {
    if !opts.check_star {
        return Ok(());
    }
    let star = check_star_with(omega, opts.r, opts.star_threshold)?;
    if !star.certified {
        report.notes.push("condition (*) not certified: grid too small to coarsen or coefficient unresolved".into());
    }
    let err = star.to_error();
    report.star = Some(star);
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn zero(grid: &crate::field::GridSpec, dim: usize, q: usize) -> Result<QForm> {
    QForm::with_dim(grid, dim, q)
}

/// f = G_0(ω_{dz̄_0}) for a closed (0,1)-form.
fn core_01(omega: &QForm) -> Result<QForm> {
    let dim = omega.dim();
    let mut out = zero(omega.grid(), dim, 0)?;
    let key: Vec<usize> = (1..dim).collect();
    if let Some(c) = omega.get(&key) {
        if !c.is_zero() {
            out.insert((0..dim).collect(), cauchy_transform(c, 0)?)?;
        }
    }
    Ok(out)
}

/// η = Σ_j (−1)^j G_j(φ_j) dẑ̄_j from the corona decomposition of the top coefficient.
fn core_0n(omega: &QForm, ctx: &mut Ctx) -> Result<QForm> {
    let dim = omega.dim();
    let mut out = zero(omega.grid(), dim, dim - 1)?;
    let Some(phi) = omega.get(&[]) else { return Ok(out) };
    if phi.is_zero() {
        return Ok(out);
    }
    let axes: Vec<usize> = (0..dim).collect();
    let d = ctx.decompose(phi, &axes)?;
    for (j, part) in d.parts.iter().enumerate() {
        if part.is_zero() {
            continue;
        }
        let f = cauchy_transform(part, j)?;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.accumulate(vec![j], C64::new(sign, 0.0), &f);
    }
    Ok(out)
}

/// (0,dim−1) forms, dim ≥ 3: γ from the split of ω_last, then ξ from the (dim−1)-variable
/// problem ∂̄'ξ = ψ with z_last as a parameter; β = γ + ξ ∧ dz̄_last.
fn core_0n1(omega: &QForm, ctx: &mut Ctx) -> Result<QForm> {
    let dim = omega.dim();
    let last = dim - 1;
    let mut gamma = zero(omega.grid(), dim, dim - 2)?;
    let mut psi = zero(omega.grid(), dim - 1, dim - 2)?;
    for j in 0..last {
        if let Some(c) = omega.get(&[j]) {
            psi.insert(vec![j], c.clone())?;
        }
    }
    if let Some(w_last) = omega.get(&[last]).filter(|c| !c.is_zero()) {
        let axes: Vec<usize> = (0..last).collect();
        let d = ctx.decompose(w_last, &axes)?;
        for (j, part) in d.parts.iter().enumerate() {
            if part.is_zero() {
                continue;
            }
            let u = cauchy_transform(part, j)?;
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            gamma.accumulate(vec![j, last], C64::new(s, 0.0), &u);
            let du = dbar_fd_order(&u, last, FdOrder::Fourth);
            let s2 = if (j + last).is_multiple_of(2) { 1.0 } else { -1.0 };
            psi.accumulate(vec![j], C64::new(s2, 0.0), &du);
        }
    }
    let xi = dispatch(&psi, ctx)?;
    Ok(gamma.add(&xi.wedge_next()?))
}

/// Hörmander split ω = g ∧ dz̄_last + h for 1 < q < dim − 1.
fn core_general(omega: &QForm, ctx: &mut Ctx) -> Result<QForm> {
    let (_, h) = omega.split_last()?;
    let h = h.expect("q < dim leaves a dz̄_last-free part");
    let big_h = dispatch(&h, ctx)?.lift()?;
    let rest = omega.sub(&form_dbar_order(&big_h, FdOrder::Fourth));
    let (g, _) = rest.split_last()?;
    let g = g.expect("q >= 1 leaves a dz̄_last part");
    let big_g = dispatch(&g, ctx)?.wedge_next()?;
    Ok(big_g.add(&big_h))
}

fn dispatch(omega: &QForm, ctx: &mut Ctx) -> Result<QForm> {
    ctx.enter()?;
    let (dim, q) = (omega.dim(), omega.q());
    let out = match q {
        0 => Err(Error::Domain("nothing to solve for a (0,0)-form".into())),
        _ if omega.iter().all(|(_, c)| c.is_zero()) => zero(omega.grid(), dim, q - 1),
        _ if q == dim => core_0n(omega, ctx),
        1 => core_01(omega),
        _ if q == dim - 1 => core_0n1(omega, ctx),
        _ => core_general(omega, ctx),
    };
    ctx.leave();
    out
}

fn solver_name(dim: usize, q: usize) -> &'static str {
    match q {
        _ if q == dim => "0n",
        1 => "01",
        _ if q == dim - 1 => "0n1",
        _ => "general",
    }
}

fn finish(omega: &QForm, beta: QForm, ctx: Ctx, mut report: SolveReport) -> Result<SolveResult> {
    let opts = ctx.opts;
    let mask = jump_mask(omega.grid(), &ctx.geoms, FdOrder::Fourth);
    report.residual = Some(residual(&beta, omega, &mask, opts.r)?);
    report.support = support_reports(&beta, opts.tol_support, None);
    let wn = omega.lr_norm(opts.r)?;
    report.norm_ratio = if wn > 0.0 { beta.lr_norm(opts.r)? / wn } else { 0.0 };
    report.unreliable_geometry = ctx.geoms.iter().any(|g| g.unreliable());
    report.stages = ctx.stages;
    report.telescoping = ctx.telescoping;
    report.supports_contained = ctx.supports_contained;
    report.depth = ctx.max_depth_seen;
    report.n = omega.grid().n();
    report.q = omega.q();
    Ok(SolveResult { solution: beta, report })
}

fn require_support(result: &SolveResult, tol: f64) -> Result<()> {
    let tail = result.report.support.iter().map(|s| s.tail_outside_polydisc).fold(0.0, f64::max);
    if tail > tol {
        return Err(Error::SupportLeak { tail, tol });
    }
    Ok(())
}

fn check_form(omega: &QForm, dim: Option<usize>, q: Option<usize>) -> Result<()> {
    if let Some(d) = dim {
        if omega.dim() != d {
            return Err(Error::Domain(format!("expected a form in {d} variables, got {}", omega.dim())));
        }
    }
    if let Some(q) = q {
        if omega.q() != q {
            return Err(Error::Domain(format!("expected degree {q}, got {}", omega.q())));
        }
    }
    Ok(())
}

/// One variable with punctures: u = G(φ) after the moment conditions are verified.
pub fn solve_1d_punctured(phi: &ScalarField, discs: Option<&DiscFamily>, opts: &SolveOptions) -> Result<SolveResult> {
    opts.validate()?;
    if phi.grid().n() != 1 {
        return Err(Error::Domain("solve_1d_punctured needs n = 1".into()));
    }
    let centers: Vec<Vec<Option<C64>>> = match discs {
        Some(d) => {
            let count = d.max_discs();
            (1..=count).map(|j| vec![d.per_line[0].get(j - 1).map(|c| c.center)]).collect()
        }
        None => Vec::new(),
    };
    let table = moment_table(phi, 0, &centers, opts.l_max)?;
    let (worst, wj, wl) = table.worst();
    if let Some((j, l, value)) = table.first_violation(opts.tol_moment) {
        return Err(Error::MomentObstruction { puncture: j, order: l, value });
    }
    let omega = QForm::top(phi.clone());
    let mut u = zero(phi.grid(), 1, 0)?;
    if !phi.is_zero() {
        u.insert(vec![0], cauchy_transform(phi, 0)?)?;
    }
    let ctx = Ctx::new(opts, None);
    let report = SolveReport {
        solver: "1d_punctured".into(),
        moments: Some(MomentSummary {
            l_max: opts.l_max,
            worst,
            worst_puncture: wj,
            worst_order: wl,
            tolerance: opts.tol_moment,
        }),
        ..Default::default()
    };
    let mut res = finish(&omega, u, ctx, report)?;
    if let Some(d) = discs {
        let centers: Vec<C64> = d.per_line[0].iter().map(|c| c.center).collect();
        let dist = move |z: &[C64]| centers.iter().map(|c| (z[0] - c).norm()).fold(f64::INFINITY, f64::min);
        res.report.support = support_reports(&res.solution, opts.tol_support, Some(&dist));
    }
    Ok(res)
}

/// Closed (0,1)-form in dim ≥ 2 variables: f = G_1(ω_1), checked for compact support.
pub fn solve_01(omega: &QForm, opts: &SolveOptions) -> Result<SolveResult> {
    opts.validate()?;
    check_form(omega, None, Some(1))?;
    let closed = require_closed(omega, opts)?;
    let mut ctx = Ctx::new(opts, None);
    ctx.enter()?;
    let beta = core_01(omega)?;
    ctx.leave();
    let report = SolveReport { solver: "01".into(), closedness: Some(closed), ..Default::default() };
    let res = finish(omega, beta, ctx, report)?;
    if omega.dim() >= 2 {
        require_support(&res, opts.tol_support)?;
    }
    Ok(res)
}

/// Top-degree forms: structure conditions, decomposition, η = Σ(−1)^j G_j(φ_j) dẑ̄_j.
pub fn solve_0n(omega: &QForm, opts: &SolveOptions) -> Result<SolveResult> {
    opts.validate()?;
    if omega.q() != omega.dim() {
        return Err(Error::Domain(format!("solve_0n needs q = dim, got q = {}", omega.q())));
    }
    let mut report = SolveReport { solver: "0n".into(), ..Default::default() };
    let phi = omega.coeff_or_zero(&[]);
    if opts.check_structure && !phi.is_zero() && omega.dim() == omega.grid().n() {
        let geoms = structure_geometries_for(&phi, opts)?;
        let s = check_structure(&phi, &geoms, &opts.structure)?;
        report.structure = Some(StructureSummary::from(&s));
        if let Some(e) = s.to_error() {
            return Err(e);
        }
    }
    let mut ctx = Ctx::new(opts, None);
    let beta = dispatch(omega, &mut ctx)?;
    let res = finish(omega, beta, ctx, report)?;
    require_support(&res, opts.tol_support)?;
    Ok(res)
}

fn structure_geometries_for(phi: &ScalarField, opts: &SolveOptions) -> Result<Vec<CoronaGeometry>> {
    crate::conditions::structure_geometries(phi, &opts.decompose_options(None))
}

/// (0,dim−1)-forms with dim ≥ 3.
pub fn solve_0n1(omega: &QForm, opts: &SolveOptions) -> Result<SolveResult> {
    opts.validate()?;
    let dim = omega.dim();
    if dim < 3 || omega.q() != dim - 1 {
        return Err(Error::Domain(format!("solve_0n1 needs q = dim − 1 and dim >= 3, got q = {}, dim = {dim}", omega.q())));
    }
    let closed = require_closed(omega, opts)?;
    let mut report = SolveReport { solver: "0n1".into(), closedness: Some(closed), ..Default::default() };
    let mut last_only = QForm::with_dim(omega.grid(), dim, dim - 1)?;
    if let Some(c) = omega.get(&[dim - 1]) {
        last_only.insert(vec![dim - 1], c.clone())?;
    }
    require_star(&last_only, opts, &mut report)?;
    let mut ctx = Ctx::new(opts, None);
    let beta = dispatch(omega, &mut ctx)?;
    finish(omega, beta, ctx, report)
}

/// Any closed (0,q)-form; q = 1, dim − 1 and dim route to the dedicated solvers.
pub fn solve_general(omega: &QForm, opts: &SolveOptions) -> Result<SolveResult> {
    opts.validate()?;
    let (dim, q) = (omega.dim(), omega.q());
    if q == 0 {
        return Err(Error::Domain("nothing to solve for a (0,0)-form".into()));
    }
    if q == dim {
        return solve_0n(omega, opts);
    }
    if q == 1 {
        return solve_01(omega, opts);
    }
    if q == dim - 1 {
        return solve_0n1(omega, opts);
    }
    let closed = require_closed(omega, opts)?;
    let mut report = SolveReport { solver: "general".into(), closedness: Some(closed), ..Default::default() };
    require_star(omega, opts, &mut report)?;
    let mut ctx = Ctx::new(opts, None);
    let beta = dispatch(omega, &mut ctx)?;
    finish(omega, beta, ctx, report)
}

/// Route by degree. One-variable top forms go through the punctured solver without punctures.
pub fn solve(omega: &QForm, opts: &SolveOptions) -> Result<SolveResult> {
    if omega.dim() == 1 && omega.q() == 1 {
        return solve_1d_punctured(&omega.coeff_or_zero(&[]), None, opts);
    }
    solve_general(omega, opts)
}

/// Names of the solver a form would be routed to.
pub fn route(dim: usize, q: usize) -> &'static str {
    if dim == 1 && q == 1 {
        return "1d_punctured";
    }
    solver_name(dim, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;

    #[test]
    fn routing_table() {
        assert_eq!(route(1, 1), "1d_punctured");
        assert_eq!(route(2, 2), "0n");
        assert_eq!(route(2, 1), "01");
        assert_eq!(route(3, 2), "0n1");
        assert_eq!(route(4, 2), "general");
        assert_eq!(route(5, 3), "general");
    }

    #[test]
    fn options_reject_small_lmax() {
        let o = SolveOptions { l_max: 3, ..Default::default() };
        assert!(matches!(o.validate(), Err(Error::Domain(_))));
        let o = SolveOptions { tol_moment: 0.0, ..Default::default() };
        assert!(o.validate().is_err());
    }

    #[test]
    fn zero_forms_solve_to_zero() {
        let g = GridSpec::uniform(2, 12, 0.1).unwrap();
        for q in 1..=2 {
            let w = QForm::new(&g, q).unwrap();
            let r = solve(&w, &SolveOptions::default()).unwrap();
            assert_eq!(r.solution.q(), q - 1);
            assert_eq!(r.solution.sup_norm(), 0.0);
        }
    }
}
