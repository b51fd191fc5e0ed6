//! Recomputed residuals and support reports for returned solutions.

use serde::Serialize;

use crate::error::Result;
use crate::field::{form_dbar_order, support_info, FdOrder, GridSpec, QForm, ScalarField};
use crate::zeroset::CoronaGeometry;
use crate::C64;

/// Relative discrete L^r norms of ∂̄β − ω.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub r: f64,
    /// Fourth-order ∂̄, excluding stencils that straddle a corona boundary.
    pub relative: f64,
    /// Fourth-order ∂̄ over the whole grid.
    pub unmasked: f64,
    /// Second-order ∂̄ over the whole grid.
    pub second_order: f64,
    pub masked_fraction: f64,
}

/// Corona membership of every grid point for one geometry.
fn membership(geom: &CoronaGeometry) -> Vec<bool> {
    let grid = &geom.grid;
    let lines = grid.lines(geom.k);
    let mut m = vec![false; grid.len()];
    for line in 0..lines.count() {
        let base = lines.base(line);
        for &p in &geom.outer.points {
            m[base + p * lines.inner] = true;
        }
        for c in &geom.inner[line] {
            for &p in &c.points {
                m[base + p * lines.inner] = true;
            }
        }
    }
    m
}

/// Points whose difference stencil along some real axis sees a corona indicator switch.
pub fn jump_mask(grid: &GridSpec, geoms: &[CoronaGeometry], order: FdOrder) -> Vec<bool> {
    let reach = match order {
        FdOrder::Second | FdOrder::SecondZeroExtended => 1,
        FdOrder::Fourth | FdOrder::FourthZeroExtended => 2,
    };
    let mut out = vec![false; grid.len()];
    let res = grid.res();
    for geom in geoms {
        let m = membership(geom);
        for axis in 0..grid.axes() {
            let n = res[axis];
            let post: usize = res[axis + 1..].iter().product();
            let pre: usize = res[..axis].iter().product();
            for p in 0..pre {
                for s in 0..post {
                    let at = |i: usize| p * n * post + i * post + s;
                    for i in 0..n {
                        let lo = i.saturating_sub(reach);
                        let hi = (i + reach).min(n - 1);
                        let first = m[at(lo)];
                        if (lo..=hi).any(|j| m[at(j)] != first) {
                            out[at(i)] = true;
                        }
                    }
                }
            }
        }
    }
    out
}

fn lr_masked(f: &QForm, mask: Option<&[bool]>, r: f64) -> f64 {
    let dv = f.grid().cell_volume();
    let mut s = 0.0;
    for (_, c) in f.iter() {
        for (i, v) in c.values().iter().enumerate() {
            if mask.is_some_and(|m| m[i]) {
                continue;
            }
            s += v.norm().powf(r);
        }
    }
    (s * dv).powf(1.0 / r)
}

/// ‖∂̄β − ω‖_r / ‖ω‖_r in the three variants; 0 when ω = 0 and β = 0.
pub fn residual(beta: &QForm, omega: &QForm, mask: &[bool], r: f64) -> Result<ResidualReport> {
    let norm = omega.lr_norm(r)?;
    let diff = |order| form_dbar_order(beta, order).sub(omega);
    let d4 = diff(FdOrder::Fourth);
    let d2 = diff(FdOrder::Second);
    let rel = |x: f64| if norm > 0.0 { x / norm } else { x };
    let masked = mask.iter().filter(|&&b| b).count() as f64 / mask.len().max(1) as f64;
    Ok(ResidualReport {
        r,
        relative: rel(lr_masked(&d4, Some(mask), r)),
        unmasked: rel(lr_masked(&d4, None, r)),
        second_order: rel(lr_masked(&d2, None, r)),
        masked_fraction: masked,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientSupport {
    /// Complement multi-index, 1-based.
    pub index: Vec<usize>,
    pub radius_per_axis: Vec<f64>,
    /// max |c| outside the closed unit polydisc, relative to max |solution|.
    pub tail_outside_polydisc: f64,
    pub max_modulus: f64,
    /// Smallest distance from the support to the zero set, when one is given.
    pub distance_to_zero_set: Option<f64>,
}

pub fn support_reports(
    beta: &QForm,
    tau: f64,
    dist: Option<&dyn Fn(&[C64]) -> f64>,
) -> Vec<CoefficientSupport> {
    let grid = beta.grid();
    let total = beta.sup_norm();
    beta.iter()
        .map(|(j, c)| {
            let mut info = support_info(c, tau);
            if let Some(d) = dist {
                info = info.with_distance(grid, d);
            }
            CoefficientSupport {
                index: j.iter().map(|i| i + 1).collect(),
                radius_per_axis: info.radius_per_axis.clone(),
                tail_outside_polydisc: tail_outside_polydisc(c, total),
                max_modulus: c.sup_norm(),
                distance_to_zero_set: info.distance_to_set,
            }
        })
        .collect()
}

/// max |φ| outside {|z_k| ≤ 1 ∀k} divided by `scale`.
pub fn tail_outside_polydisc(phi: &ScalarField, scale: f64) -> f64 {
    if scale == 0.0 {
        return 0.0;
    }
    let grid = phi.grid();
    let n = grid.n();
    let coords: Vec<Vec<f64>> = (0..grid.axes()).map(|a| grid.coords(a)).collect();
    let mut worst = 0.0f64;
    for (flat, v) in phi.values().iter().enumerate() {
        if v.norm() <= worst {
            continue;
        }
        let idx = grid.unravel(flat);
        let outside = (0..n).any(|k| {
            let x = coords[2 * k][idx[2 * k]];
            let y = coords[2 * k + 1][idx[2 * k + 1]];
            x * x + y * y > 1.0
        });
        if outside {
            worst = v.norm();
        }
    }
    worst / scale
}
