use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{LineField, ScalarField};
use crate::C64;

/// Relative threshold below which samples do not count as support for proximity checks.
pub const PROXIMITY_TAU: f64 = 1e-6;

/// Puncture centers of variable k, one optional center per line.
pub type CenterField = Vec<Option<C64>>;

/// [φ]_k(l) = (1/π) Σ φ ζ_k^l h², one value per line of variable k.
pub fn moment(phi: &ScalarField, k: usize, l: usize) -> LineField {
    let grid = phi.grid();
    let weights: Vec<C64> = grid.plane_points(k).iter().map(|z| z.powu(l as u32)).collect();
    let scale = grid.cell_area(k) / PI;
    let values = reduce_lines(phi, k, &weights).into_iter().map(|v| v * scale).collect();
    LineField::new(grid, k, values)
}

/// Σ_p w_p φ(line, p) for every line of variable k.
fn reduce_lines(phi: &ScalarField, k: usize, weights: &[C64]) -> Vec<C64> {
    let l = phi.grid().lines(k);
    let v = phi.values();
    let mut out = vec![C64::new(0.0, 0.0); l.count()];
    let plane = l.plane_len();
    for o in 0..l.outer {
        let acc = &mut out[o * l.inner..(o + 1) * l.inner];
        for (p, &w) in weights.iter().enumerate() {
            let base = (o * plane + p) * l.inner;
            for (a, x) in acc.iter_mut().zip(&v[base..base + l.inner]) {
                *a += w * x;
            }
        }
    }
    out
}

/// [φ,j]_k(l) = (1/π) Σ φ (ζ_k − c)^{−l−1} h² with the center c read per line.
pub fn punctured_moment(phi: &ScalarField, k: usize, centers: &CenterField, l: usize) -> Result<LineField> {
    let t = moment_table(phi, k, std::slice::from_ref(centers), l)?;
    Ok(t.punctured[&(1, l)].clone())
}

/// Outer and punctured moments of order 0..=l_max in variable k.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub k: usize,
    pub l_max: usize,
    pub outer: Vec<LineField>,
    /// Keyed by (puncture index starting at 1, order).
    pub punctured: BTreeMap<(usize, usize), LineField>,
    /// ‖φ‖_2 used to normalize.
    pub norm: f64,
}

impl MomentTable {
    /// Largest normalized modulus and its (puncture, order); puncture 0 is the outer family.
    pub fn worst(&self) -> (f64, usize, usize) {
        let scale = if self.norm > 0.0 { 1.0 / self.norm } else { 0.0 };
        let mut best = (0.0, 0, 0);
        for (l, f) in self.outer.iter().enumerate() {
            let v = f.sup_norm() * scale;
            if v > best.0 {
                best = (v, 0, l);
            }
        }
        for (&(j, l), f) in &self.punctured {
            let v = f.sup_norm() * scale;
            if v > best.0 {
                best = (v, j, l);
            }
        }
        best
    }

    /// First entry, in (order, puncture) order, whose normalized modulus exceeds tol.
    pub fn first_violation(&self, tol: f64) -> Option<(usize, usize, f64)> {
        let scale = if self.norm > 0.0 { 1.0 / self.norm } else { 0.0 };
        for l in 0..=self.l_max {
            let v = self.outer[l].sup_norm() * scale;
            if v > tol {
                return Some((0, l, v));
            }
            for (&(j, ll), f) in &self.punctured {
                if ll == l {
                    let v = f.sup_norm() * scale;
                    if v > tol {
                        return Some((j, l, v));
                    }
                }
            }
        }
        None
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.first_violation(tol).is_none()
    }
}

/// Batched outer and punctured moments. Each line is gathered once. Support within 3h of a
/// puncture is an error.
pub fn moment_table(phi: &ScalarField, k: usize, punctures: &[CenterField], l_max: usize) -> Result<MomentTable> {
    moment_table_within(phi, k, punctures, l_max, 3.0 * phi.grid().hmax(k))
}

/// [`moment_table`] with an explicit proximity limit. Fields built by the corona operators carry
/// mass on inner coronas, which may sit closer than 3h to their centers by construction.
pub fn moment_table_within(
    phi: &ScalarField,
    k: usize,
    punctures: &[CenterField],
    l_max: usize,
    limit: f64,
) -> Result<MomentTable> {
    let grid = phi.grid();
    let lines = grid.lines(k);
    let pts = grid.plane_points(k);
    let scale = grid.cell_area(k) / PI;
    let nl = lines.count();
    let mut outer = vec![vec![C64::new(0.0, 0.0); nl]; l_max + 1];
    let mut punct = vec![vec![vec![C64::new(0.0, 0.0); nl]; l_max + 1]; punctures.len()];
    let thr = PROXIMITY_TAU * phi.sup_norm();
    let mut plane = vec![C64::new(0.0, 0.0); lines.plane_len()];
    for line in 0..nl {
        lines.gather(phi.values(), line, &mut plane);
        if plane.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
            continue;
        }
        for (p, &v) in plane.iter().enumerate() {
            if v.re == 0.0 && v.im == 0.0 {
                continue;
            }
            let mut zl = C64::new(1.0, 0.0);
            for row in outer.iter_mut() {
                row[line] += v * zl;
                zl *= pts[p];
            }
        }
        for (j, centers) in punctures.iter().enumerate() {
            let Some(c) = centers[line] else { continue };
            for (p, &v) in plane.iter().enumerate() {
                if v.norm() <= thr {
                    if v.re == 0.0 && v.im == 0.0 {
                        continue;
                    }
                } else {
                    let d = (pts[p] - c).norm();
                    if d < limit {
                        return Err(Error::PunctureTooClose { axis: k, distance: d, limit });
                    }
                }
                let inv = 1.0 / (pts[p] - c);
                let mut t = inv;
                for row in punct[j].iter_mut() {
                    row[line] += v * t;
                    t *= inv;
                }
            }
        }
    }
    let to_line = |vals: Vec<C64>| LineField::new(grid, k, vals.into_iter().map(|v| v * scale).collect());
    let mut punctured = BTreeMap::new();
    for (j, rows) in punct.into_iter().enumerate() {
        for (l, vals) in rows.into_iter().enumerate() {
            punctured.insert((j + 1, l), to_line(vals));
        }
    }
    Ok(MomentTable {
        k,
        l_max,
        outer: outer.into_iter().map(to_line).collect(),
        punctured,
        norm: phi.lr_norm(2.0)?,
    })
}
