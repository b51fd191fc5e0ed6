use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::discs::DiscFamily;
use crate::cauchy::CenterField;
use crate::error::{Error, Result};
use crate::field::{support_info, GridSpec, ScalarField};
use crate::C64;

/// Exponent windows for the lattice-balancing weights of the coronas.
///
/// On a lattice the sums Σ_{p∈C} u_p^d over an annulus do not vanish for d ≠ 0, which breaks the
/// exact moment preservation of the corona operators. Each corona therefore carries real
/// weights w_p, the nearest perturbation of a base profile with Σ w_p u_p^d = 0 for
/// every d ≠ 0 in [−neg, pos]. The window shrinks until the constraint rank times `budget` fits
/// in the number of corona points, cutting neg first: the positive exponents govern how fast the
/// Cauchy transform of a balanced density decays outside the corona, so pos takes whatever
/// the point budget leaves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoronaOptions {
    pub outer_neg: usize,
    pub outer_pos: usize,
    pub inner_neg: usize,
    pub inner_pos: usize,
    pub balance: bool,
    /// Support threshold relative to max|φ| used to measure the slice support radius.
    pub tau: f64,
    /// Corona points required per real balancing constraint, outer and inner coronas.
    pub outer_budget: f64,
    pub inner_budget: f64,
    /// Radial sin² profile across the annulus instead of flat weights.
    pub smooth: bool,
}

impl Default for CoronaOptions {
    fn default() -> Self {
        Self { outer_neg: 16, outer_pos: 96, inner_neg: 12, inner_pos: 32, balance: true, tau: 1e-6, outer_budget: 2.0, inner_budget: 3.0, smooth: true }
    }
}

/// An annulus of variable k together with its lattice points and weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Corona {
    pub center: C64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Inner coronas include their boundary circles; the outer corona does not.
    pub closed: bool,
    /// Plane indices (ix·ry + iy) of the lattice points inside.
    pub points: Vec<usize>,
    pub weights: Vec<f64>,
    /// Analytic area of the annulus.
    pub area: f64,
    /// A_m: ±π over the weighted lattice area (sign − for inner coronas).
    pub normalizer: f64,
    pub window: (usize, usize),
    pub max_weight_shift: f64,
}

impl Corona {
    pub fn contains(&self, z: C64) -> bool {
        let d = (z - self.center).norm();
        if self.closed {
            d >= self.inner_radius && d <= self.outer_radius
        } else {
            d > self.inner_radius && d < self.outer_radius
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct CoronaGeometry {
    pub k: usize,
    pub grid: GridSpec,
    /// r: max |z_k| over the support of the field the geometry was built for.
    pub support_radius: f64,
    /// δ = (1 − r)/3.
    pub delta: f64,
    pub outer: Corona,
    /// Per line of variable k, one inner corona per exclusion disc (same order as the discs).
    pub inner: Vec<Vec<Corona>>,
    pub discs: Option<DiscFamily>,
}

impl CoronaGeometry {
    pub fn max_punctures(&self) -> usize {
        self.inner.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Center of the j-th puncture (1-based) on every line.
    pub fn puncture_centers(&self, j: usize) -> CenterField {
        self.inner.iter().map(|c| c.get(j - 1).map(|c| c.center)).collect()
    }

    pub fn all_puncture_centers(&self) -> Vec<CenterField> {
        (1..=self.max_punctures()).map(|j| self.puncture_centers(j)).collect()
    }

    pub fn max_inner_normalizer(&self) -> f64 {
        self.inner.iter().flatten().map(|c| c.normalizer.abs()).fold(0.0, f64::max)
    }

    /// max |A_j| · h > 1: inner operators too large to trust at this resolution.
    pub fn unreliable(&self) -> bool {
        self.max_inner_normalizer() * self.grid.hmax(self.k) > 1.0
    }
}

/// Outer corona {r+δ < |z_k| < r+2δ}, δ = (1−r)/3, and inner coronas {δ_j ≤ |z_k − c_j| ≤ 2δ_j},
/// δ_j = r_j/3, for every exclusion disc.
pub fn corona_geometry(phi: &ScalarField, k: usize, discs: Option<&DiscFamily>) -> Result<CoronaGeometry> {
    corona_geometry_with(phi, k, discs, &CoronaOptions::default())
}

pub fn corona_geometry_with(
    phi: &ScalarField,
    k: usize,
    discs: Option<&DiscFamily>,
    opts: &CoronaOptions,
) -> Result<CoronaGeometry> {
    let grid = phi.grid();
    let r = support_info(phi, opts.tau).radius_per_axis[k];
    if r >= 1.0 {
        return Err(Error::SupportNotCompact { axis: k, radius: r });
    }
    let delta = (1.0 - r) / 3.0;
    let pts = grid.plane_points(k);
    let cell = grid.cell_area(k);
    let outer = build_corona(
        &pts,
        C64::new(0.0, 0.0),
        r + delta,
        r + 2.0 * delta,
        false,
        cell,
        if opts.balance { (opts.outer_neg, opts.outer_pos) } else { (0, 0) },
        opts.outer_budget,
        opts.smooth,
    );
    let mut inner = vec![Vec::new(); grid.lines(k).count()];
    if let Some(d) = discs {
        if d.k != k || d.per_line.len() != inner.len() {
            return Err(Error::Geometry("disc family does not match the grid axis".into()));
        }
        for (line, list) in d.per_line.iter().enumerate() {
            inner[line] = list
                .iter()
                .map(|disc| {
                    let dj = disc.radius / 3.0;
                    build_corona(
                        &pts,
                        disc.center,
                        dj,
                        2.0 * dj,
                        true,
                        cell,
                        if opts.balance { (opts.inner_neg, opts.inner_pos) } else { (0, 0) },
                        opts.inner_budget,
                        opts.smooth,
                    )
                })
                .collect();
        }
    }
    Ok(CoronaGeometry {
        k,
        grid: grid.clone(),
        support_radius: r,
        delta,
        outer,
        inner,
        discs: discs.cloned(),
    })
}

fn build_corona(pts: &[C64], center: C64, a: f64, b: f64, closed: bool, cell: f64, window: (usize, usize), budget: f64, smooth: bool) -> Corona {
    let mut c = Corona {
        center,
        inner_radius: a,
        outer_radius: b,
        closed,
        points: Vec::new(),
        weights: Vec::new(),
        area: PI * (b * b - a * a),
        normalizer: 0.0,
        window: (0, 0),
        max_weight_shift: 0.0,
    };
    c.points = (0..pts.len()).filter(|&p| c.contains(pts[p])).collect();
    if c.points.is_empty() {
        return c;
    }
    let u: Vec<C64> = c.points.iter().map(|&p| pts[p] - center).collect();
    let base: Vec<f64> = if smooth {
        u.iter().map(|z| (PI * (z.norm() - a) / (b - a)).sin().powi(2)).collect()
    } else {
        vec![1.0; u.len()]
    };
    let (w, used) = balance_weights(&u, &base, 0.5 * (a + b), window, budget);
    let total: f64 = w.iter().sum();
    c.max_weight_shift = w.iter().zip(&base).fold(0.0, |m, (x, b)| m.max((x - b).abs()));
    c.weights = w;
    c.window = used;
    let sign = if closed { -1.0 } else { 1.0 };
    c.normalizer = if total.abs() > 0.0 { sign * PI / (total * cell) } else { 0.0 };
    c
}

/// Negative exponents kept while positive ones are cut.
const NEG_FLOOR: usize = 8;

/// Weights closest to `base` in the norm Σ (w_p − b_p)²/b_p with Σ w_p (u_p/ρ)^d = 0 for
/// d ∈ [−neg, pos], d ≠ 0. The correction is proportional to b_p, so it vanishes where b does.
pub fn balance_weights(u: &[C64], base: &[f64], rho: f64, window: (usize, usize), budget: f64) -> (Vec<f64>, (usize, usize)) {
    let p = u.len();
    let fallback = base.to_vec();
    let (mut neg, mut pos) = window;
    // rank at most 2(neg + pos): cap pos by the point budget before the SVD loop
    let budget = budget.max(1.0);
    if 2.0 * budget * (neg + pos) as f64 > p as f64 {
        neg = neg.min(NEG_FLOOR);
        pos = pos.min(((p as f64 / (2.0 * budget)) as usize).saturating_sub(neg));
    }
    while neg + pos > 0 {
        let exps: Vec<i32> = (-(neg as i32)..=pos as i32).filter(|&d| d != 0).collect();
        let rows = 2 * exps.len();
        let mut c = DMatrix::<f64>::zeros(rows, p);
        for (col, z) in u.iter().enumerate() {
            let v = z / rho;
            let inv = 1.0 / v;
            let mut up = C64::new(1.0, 0.0);
            let mut pows_pos = Vec::with_capacity(pos);
            for _ in 0..pos {
                up *= v;
                pows_pos.push(up);
            }
            let mut dn = C64::new(1.0, 0.0);
            let mut pows_neg = Vec::with_capacity(neg);
            for _ in 0..neg {
                dn *= inv;
                pows_neg.push(dn);
            }
            for (i, &d) in exps.iter().enumerate() {
                let z = if d > 0 { pows_pos[d as usize - 1] } else { pows_neg[(-d) as usize - 1] };
                c[(2 * i, col)] = z.re;
                c[(2 * i + 1, col)] = z.im;
            }
        }
        let bc = DMatrix::from_fn(rows, p, |r, col| c[(r, col)] * base[col]);
        let gram = &bc * c.transpose();
        let y = &c * DVector::from_column_slice(base);
        let svd = gram.svd(true, true);
        let smax = svd.singular_values.max();
        let eps = smax * 1e-12;
        let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
        if budget * rank as f64 <= p as f64 {
            let lambda = match svd.solve(&y, eps) {
                Ok(l) => l,
                Err(_) => return (fallback, (0, 0)),
            };
            let corr = c.transpose() * lambda;
            let w: Vec<f64> = (0..p).map(|i| base[i] * (1.0 - corr[i])).collect();
            return (w, (neg, pos));
        }
        if neg > NEG_FLOOR {
            neg = neg * 2 / 3;
        } else {
            neg = neg * 2 / 3;
            pos = pos * 2 / 3;
        }
    }
    (fallback, (0, 0))
}
