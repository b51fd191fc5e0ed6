//! Corona operators K^(k)_m and the decomposition φ = φ_1 + … + φ_n.

use serde::Serialize;

use crate::cauchy::{cauchy_transform, moment_table_within, CenterField};
use crate::error::{Error, Result};
use crate::field::{support_info, ScalarField};
use crate::zeroset::{corona_geometry_with, disc_family, CoronaGeometry, CoronaOptions, PolynomialF};
use crate::C64;

fn check_grid(phi: &ScalarField, k: usize, geom: &CoronaGeometry) -> Result<()> {
    if geom.k != k || &geom.grid != phi.grid() {
        return Err(Error::Geometry(format!("geometry for axis {} does not match field axis {k}", geom.k)));
    }
    Ok(())
}

/// Support radius of φ in variable k must not exceed the radius the geometry was built for.
fn check_radius(phi: &ScalarField, k: usize, geom: &CoronaGeometry) -> Result<()> {
    let r = support_info(phi, 1e-6).radius_per_axis[k];
    let slack = 2.0 * geom.grid.hmax(k);
    if r > geom.support_radius + slack {
        return Err(Error::Geometry(format!(
            "support radius {r:.4} exceeds geometry radius {:.4} on axis {k}",
            geom.support_radius
        )));
    }
    Ok(())
}

/// A_0 · 1_{C_0}(z_k) · z_k · G_k(φ), with the corona weights folded in.
pub fn k_outer(phi: &ScalarField, k: usize, geom: &CoronaGeometry) -> Result<ScalarField> {
    check_grid(phi, k, geom)?;
    check_radius(phi, k, geom)?;
    let g = cauchy_transform(phi, k)?;
    let mut out = ScalarField::zeros(phi.grid());
    add_outer(&g, geom, &mut out);
    Ok(out)
}

/// A_j · 1_{C_j}(z_k) · (z_k − c_j) · G_k(φ) on every line carrying puncture j (1-based).
pub fn k_inner(phi: &ScalarField, k: usize, j: usize, geom: &CoronaGeometry) -> Result<ScalarField> {
    check_grid(phi, k, geom)?;
    let lines = geom.grid.lines(k);
    let thr = 1e-12 * phi.sup_norm();
    let mut plane = vec![C64::new(0.0, 0.0); lines.plane_len()];
    for (line, list) in geom.inner.iter().enumerate() {
        if list.len() < j {
            lines.gather(phi.values(), line, &mut plane);
            if plane.iter().any(|v| v.norm() > thr) {
                return Err(Error::Geometry(format!("puncture {j} missing on a line where the field is nonzero")));
            }
        }
    }
    let g = cauchy_transform(phi, k)?;
    let mut out = ScalarField::zeros(phi.grid());
    add_inner(&g, geom, Some(j), &mut out);
    Ok(out)
}

/// Σ_m K^(k)_m φ from one Cauchy transform.
pub fn k_full(phi: &ScalarField, k: usize, geom: &CoronaGeometry) -> Result<ScalarField> {
    check_grid(phi, k, geom)?;
    check_radius(phi, k, geom)?;
    let g = cauchy_transform(phi, k)?;
    let mut out = ScalarField::zeros(phi.grid());
    add_outer(&g, geom, &mut out);
    add_inner(&g, geom, None, &mut out);
    Ok(out)
}

fn add_outer(g: &ScalarField, geom: &CoronaGeometry, out: &mut ScalarField) {
    let lines = geom.grid.lines(geom.k);
    let pts = geom.grid.plane_points(geom.k);
    let c = &geom.outer;
    let factors: Vec<(usize, C64)> =
        c.points.iter().zip(&c.weights).map(|(&p, &w)| (p, c.normalizer * w * pts[p])).collect();
    let gv = g.values();
    let ov = out.values_mut();
    for line in 0..lines.count() {
        let base = lines.base(line);
        for &(p, f) in &factors {
            let i = base + p * lines.inner;
            ov[i] += f * gv[i];
        }
    }
}

fn add_inner(g: &ScalarField, geom: &CoronaGeometry, only: Option<usize>, out: &mut ScalarField) {
    let lines = geom.grid.lines(geom.k);
    let pts = geom.grid.plane_points(geom.k);
    let gv = g.values();
    let ov = out.values_mut();
    for (line, list) in geom.inner.iter().enumerate() {
        let base = lines.base(line);
        for (j, c) in list.iter().enumerate() {
            if only.is_some_and(|o| o != j + 1) {
                continue;
            }
            for (&p, &w) in c.points.iter().zip(&c.weights) {
                let i = base + p * lines.inner;
                ov[i] += c.normalizer * w * (pts[p] - c.center) * gv[i];
            }
        }
    }
}

/// Parts φ_i with Σ φ_i = φ, built along the listed variables in order.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// One part per listed variable.
    pub parts: Vec<ScalarField>,
    pub axes: Vec<usize>,
    /// Geometry of stage i (applied to K^(i−1)…K^(1)φ), for every variable but the last.
    pub geometries: Vec<CoronaGeometry>,
    pub residual_report: Vec<StageMoments>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageMoments {
    /// 1-based variable.
    pub axis: usize,
    pub max_outer: f64,
    pub max_punctured: f64,
    pub worst_order: usize,
    pub max_inner_normalizer: f64,
    pub unreliable: bool,
}

impl Decomposition {
    pub fn telescoping_error(&self, phi: &ScalarField) -> f64 {
        let mut sum = ScalarField::zeros(phi.grid());
        for p in &self.parts {
            sum.add_assign(p);
        }
        let scale = phi.sup_norm();
        if scale == 0.0 {
            return sum.sup_norm();
        }
        sum.sub(phi).sup_norm() / scale
    }

    pub fn max_stage_moment(&self) -> f64 {
        self.residual_report.iter().map(|s| s.max_outer.max(s.max_punctured)).fold(0.0, f64::max)
    }

    /// True when every part vanishes outside supp φ ∪ (coronas of all stages).
    pub fn supports_contained(&self, phi: &ScalarField, tau: f64) -> bool {
        let grid = phi.grid();
        let base = support_info(phi, tau).mask;
        let mut allowed = base.clone();
        for geom in &self.geometries {
            let lines = grid.lines(geom.k);
            for (flat, a) in allowed.iter_mut().enumerate() {
                if *a {
                    continue;
                }
                let (line, p) = lines.locate(flat);
                let pts_p = pts_of(grid, geom.k, p);
                if geom.outer.contains(pts_p) || geom.inner[line].iter().any(|c| c.contains(pts_p)) {
                    *a = true;
                }
            }
        }
        let thr = tau * phi.sup_norm();
        self.parts
            .iter()
            .all(|part| part.values().iter().zip(&allowed).all(|(v, &a)| a || v.norm() <= thr))
    }
}

fn pts_of(grid: &crate::field::GridSpec, k: usize, p: usize) -> C64 {
    let ry = grid.res()[2 * k + 1];
    C64::new(grid.coord(2 * k, p / ry), grid.coord(2 * k + 1, p % ry))
}

#[derive(Clone, Debug)]
pub struct DecomposeOptions {
    pub corona: CoronaOptions,
    pub l_max: usize,
    pub zero_set: Option<PolynomialF>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self { corona: CoronaOptions::default(), l_max: 8, zero_set: None }
    }
}

/// φ_i = K^(i−1)…K^(1)φ − K^(i)…K^(1)φ for i < n and φ_n = K^(n−1)…K^(1)φ over all variables.
pub fn decompose(phi: &ScalarField, opts: &DecomposeOptions) -> Result<Decomposition> {
    let axes: Vec<usize> = (0..phi.grid().n()).collect();
    decompose_axes(phi, &axes, opts)
}

/// The decomposition restricted to the listed variables; each stage geometry is rebuilt from
/// the current stage's measured support.
pub fn decompose_axes(phi: &ScalarField, axes: &[usize], opts: &DecomposeOptions) -> Result<Decomposition> {
    if axes.is_empty() {
        return Err(Error::Domain("decomposition needs at least one variable".into()));
    }
    let mut parts = Vec::with_capacity(axes.len());
    let mut geometries = Vec::new();
    let mut report = Vec::new();
    let mut current = phi.clone();
    for &k in &axes[..axes.len() - 1] {
        let geom = stage_geometry(&current, k, opts)?;
        let next = k_full(&current, k, &geom)?;
        let part = current.sub(&next);
        report.push(stage_moments(&part, k, &geom, opts.l_max)?);
        parts.push(part);
        geometries.push(geom);
        current = next;
    }
    parts.push(current);
    Ok(Decomposition { parts, axes: axes.to_vec(), geometries, residual_report: report })
}

pub fn stage_geometry(phi: &ScalarField, k: usize, opts: &DecomposeOptions) -> Result<CoronaGeometry> {
    let discs = match &opts.zero_set {
        Some(f) if !phi.is_zero() => {
            let sup = support_info(phi, opts.corona.tau);
            Some(disc_family(f, k, &sup, phi.grid())?)
        }
        _ => None,
    };
    corona_geometry_with(phi, k, discs.as_ref(), &opts.corona)
}

fn stage_moments(part: &ScalarField, k: usize, geom: &CoronaGeometry, l_max: usize) -> Result<StageMoments> {
    let centers: Vec<CenterField> = geom.all_puncture_centers();
    let t = moment_table_within(part, k, &centers, l_max, 0.5 * part.grid().hmax(k))?;
    let scale = if t.norm > 0.0 { 1.0 / t.norm } else { 0.0 };
    let max_outer = t.outer.iter().map(|f| f.sup_norm() * scale).fold(0.0, f64::max);
    let max_punctured = t.punctured.values().map(|f| f.sup_norm() * scale).fold(0.0, f64::max);
    Ok(StageMoments {
        axis: k + 1,
        max_outer,
        max_punctured,
        worst_order: t.worst().2,
        max_inner_normalizer: geom.max_inner_normalizer(),
        unreliable: geom.unreliable(),
    })
}
