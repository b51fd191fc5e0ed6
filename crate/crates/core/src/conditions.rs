//! Obstruction integrals J^(0)_{μ,l} and J^(j)_{μ,l} and the structure-condition verdict.
//!
//! A J integral is evaluated as a chain of per-variable contractions, one variable at a time in
//! order. Variable i with m_i = 0 is integrated against ζ_i^{l_i} and its value is then constant
//! in z_i. Variable i with m_i > 0 is integrated against (ζ_i − c)^{−l_i−1} and re-expanded as
//! 1_{C_{m_i}}(z_i)(z_i − c)^{l_i+1}. Because the field keeps the full grid shape, the line of
//! variable i is indexed by (z_1, …, z_{i−1}, ζ_{i+1}, …, ζ_n), which is exactly the argument of
//! the center c_{m_i,i}. Each contraction costs one pass over the grid.

use std::fmt;

use serde::Serialize;

use crate::cauchy::{moment_table, CenterField, PROXIMITY_TAU};
use crate::corona_ops::{decompose, stage_geometry, DecomposeOptions};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::zeroset::CoronaGeometry;
use crate::C64;

/// (μ, l, k, j): corona choice per leading variable, orders per leading variable, trailing order
/// k in the last variable, and j = 0 for J^(0) or the puncture index of the last variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MultiIndexSpec {
    pub mu: Vec<usize>,
    pub l: Vec<usize>,
    pub k: usize,
    pub j: usize,
}

impl MultiIndexSpec {
    pub fn new(mu: Vec<usize>, l: Vec<usize>, k: usize, j: usize) -> Result<Self> {
        if mu.len() != l.len() {
            return Err(Error::Domain(format!("μ has {} entries but l has {}", mu.len(), l.len())));
        }
        Ok(Self { mu, l, k, j })
    }

    /// I(μ), 0-based.
    pub fn collapsed(&self) -> Vec<usize> {
        self.mu.iter().enumerate().filter(|(_, &m)| m == 0).map(|(i, _)| i).collect()
    }
}

impl fmt::Display for MultiIndexSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J^({})_(mu={:?}, l={:?})(k={})", self.j, self.mu, self.l, self.k)
    }
}

/// How to read the exponent of the ζ_j − c factor for m_j > 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum ExponentReading {
    /// (ζ − c)^{−l−1}, matching the series expansion of the punctured moment.
    #[default]
    Denominator,
    /// (ζ − c)^{+l+1} as literally displayed. For comparison only.
    RawDisplay,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureEntry {
    pub spec: MultiIndexSpec,
    /// sup over the z-grid of |J|, divided by ‖φ‖_r.
    pub value: f64,
    pub raw: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub l_max: usize,
    pub k_max: usize,
    pub r: f64,
    pub tolerance: f64,
    pub norm: f64,
    pub entries: Vec<StructureEntry>,
    pub pass: bool,
}

impl StructureReport {
    pub fn worst(&self) -> Option<&StructureEntry> {
        self.entries.iter().max_by(|a, b| a.value.total_cmp(&b.value))
    }

    pub fn first_failure(&self) -> Option<&StructureEntry> {
        self.entries.iter().find(|e| !e.pass)
    }

    pub fn to_error(&self) -> Option<Error> {
        self.first_failure()
            .map(|e| Error::StructureObstruction { spec: e.spec.to_string(), value: e.value })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug)]
pub struct StructureOptions {
    pub l_max: usize,
    pub k_max: usize,
    pub tolerance: f64,
    pub r: f64,
    pub reading: ExponentReading,
}

impl Default for StructureOptions {
    fn default() -> Self {
        Self { l_max: 4, k_max: 8, tolerance: 1e-6, r: 2.0, reading: ExponentReading::Denominator }
    }
}

fn check_geoms(phi: &ScalarField, geoms: &[CoronaGeometry]) -> Result<()> {
    let n = phi.grid().n();
    if geoms.len() < n.saturating_sub(1) {
        return Err(Error::Geometry(format!("need geometries for {} variables, got {}", n - 1, geoms.len())));
    }
    for (i, g) in geoms.iter().enumerate() {
        if g.k != i || &g.grid != phi.grid() {
            return Err(Error::Geometry(format!("geometry {i} does not match the field")));
        }
    }
    Ok(())
}

/// One contraction over the leading variable i. Returns a field of the same shape.
fn contract(
    field: &ScalarField,
    i: usize,
    m: usize,
    l: usize,
    geom: &CoronaGeometry,
    reading: ExponentReading,
) -> Result<ScalarField> {
    let grid = field.grid();
    let lines = grid.lines(i);
    let pts = grid.plane_points(i);
    let scale = grid.cell_area(i) / std::f64::consts::PI;
    let mut out = ScalarField::zeros(grid);
    let mut plane = vec![C64::new(0.0, 0.0); lines.plane_len()];
    let mut res = vec![C64::new(0.0, 0.0); lines.plane_len()];
    let thr = PROXIMITY_TAU * field.sup_norm();
    let limit = 3.0 * grid.hmax(i);
    for line in 0..lines.count() {
        lines.gather(field.values(), line, &mut plane);
        if plane.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
            continue;
        }
        if m == 0 {
            let s: C64 = plane.iter().zip(&pts).map(|(v, z)| v * z.powu(l as u32)).sum::<C64>() * scale;
            res.iter_mut().for_each(|r| *r = s);
        } else {
            res.iter_mut().for_each(|r| *r = C64::new(0.0, 0.0));
            let Some(c) = geom.inner[line].get(m - 1) else { continue };
            let e = l as i32 + 1;
            let mut s = C64::new(0.0, 0.0);
            for (v, z) in plane.iter().zip(&pts) {
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                let d = z - c.center;
                if v.norm() > thr && d.norm() < limit {
                    return Err(Error::PunctureTooClose { axis: i, distance: d.norm(), limit });
                }
                s += v * match reading {
                    ExponentReading::Denominator => d.powi(-e),
                    ExponentReading::RawDisplay => d.powi(e),
                };
            }
            s *= scale;
            for &p in &c.points {
                res[p] = s * (pts[p] - c.center).powi(e);
            }
        }
        lines.scatter(out.values_mut(), line, &res);
    }
    Ok(out)
}

/// Contraction over the first n−1 variables for (μ, l); the result still carries ζ_n.
fn prefix(phi: &ScalarField, mu: &[usize], l: &[usize], geoms: &[CoronaGeometry], reading: ExponentReading) -> Result<ScalarField> {
    let mut f = phi.clone();
    for (i, (&m, &li)) in mu.iter().zip(l).enumerate() {
        f = contract(&f, i, m, li, &geoms[i], reading)?;
    }
    Ok(f)
}

fn last_centers(phi: &ScalarField, geoms: &[CoronaGeometry], j: usize) -> Result<Option<CenterField>> {
    if j == 0 {
        return Ok(None);
    }
    let n = phi.grid().n();
    match geoms.get(n - 1) {
        Some(g) => Ok(Some(g.puncture_centers(j))),
        None => Err(Error::Geometry(format!("puncture {j} of the last variable needs its geometry"))),
    }
}

fn spec_len_ok(phi: &ScalarField, spec: &MultiIndexSpec) -> Result<()> {
    let n = phi.grid().n();
    if spec.mu.len() + 1 != n || spec.l.len() + 1 != n {
        return Err(Error::Domain(format!("{spec} does not fit n = {n}")));
    }
    Ok(())
}

/// J^(0)_{μ,l}(φ)(k) as a field over the grid (constant in collapsed variables).
pub fn j_outer(phi: &ScalarField, spec: &MultiIndexSpec, geoms: &[CoronaGeometry]) -> Result<ScalarField> {
    let spec = MultiIndexSpec { j: 0, ..spec.clone() };
    j_field(phi, &spec, geoms, ExponentReading::Denominator)
}

/// J^(j)_{μ,l}(φ)(k) for the j-th puncture (1-based) of the last variable.
pub fn j_inner(phi: &ScalarField, j: usize, spec: &MultiIndexSpec, geoms: &[CoronaGeometry]) -> Result<ScalarField> {
    if j == 0 {
        return Err(Error::Domain("inner J needs a puncture index >= 1".into()));
    }
    let spec = MultiIndexSpec { j, ..spec.clone() };
    j_field(phi, &spec, geoms, ExponentReading::Denominator)
}

pub fn j_field(phi: &ScalarField, spec: &MultiIndexSpec, geoms: &[CoronaGeometry], reading: ExponentReading) -> Result<ScalarField> {
    spec_len_ok(phi, spec)?;
    check_geoms(phi, geoms)?;
    let n = phi.grid().n();
    let f = prefix(phi, &spec.mu, &spec.l, geoms, reading)?;
    let centers: Vec<CenterField> = last_centers(phi, geoms, spec.j)?.into_iter().collect();
    let t = moment_table(&f, n - 1, &centers, spec.k)?;
    let line = if spec.j == 0 { &t.outer[spec.k] } else { &t.punctured[&(1, spec.k)] };
    Ok(line.expand())
}

/// Geometries the J integrals refer to: the decomposition stages for the leading variables and
/// the geometry of the last part for the last variable.
pub fn structure_geometries(phi: &ScalarField, opts: &DecomposeOptions) -> Result<Vec<CoronaGeometry>> {
    let n = phi.grid().n();
    let d = decompose(phi, opts)?;
    let mut geoms = d.geometries;
    let last = &d.parts[n - 1];
    if !last.is_zero() {
        geoms.push(stage_geometry(last, n - 1, opts)?);
    }
    Ok(geoms)
}

/// All J fields for μ ∈ M_{n−1}, l ≤ l_max componentwise, k ≤ k_max and every puncture of the
/// last variable. The verdict passes iff every normalized sup is ≤ tolerance.
pub fn check_structure(phi: &ScalarField, geoms: &[CoronaGeometry], opts: &StructureOptions) -> Result<StructureReport> {
    check_geoms(phi, geoms)?;
    let n = phi.grid().n();
    let norm = phi.lr_norm(opts.r)?;
    let scale = if norm > 0.0 { 1.0 / norm } else { 0.0 };
    let lead = n - 1;
    let caps: Vec<usize> = geoms[..lead].iter().map(|g| g.max_punctures()).collect();
    let last_punctures = geoms.get(lead).map_or(0, |g| g.max_punctures());
    let centers: Vec<CenterField> = (1..=last_punctures).map(|j| geoms[lead].puncture_centers(j)).collect();

    let mut entries = Vec::new();
    for mu in product(&caps) {
        for l in product(&vec![opts.l_max; lead]) {
            let f = prefix(phi, &mu, &l, geoms, opts.reading)?;
            let t = moment_table(&f, lead, &centers, opts.k_max)?;
            for k in 0..=opts.k_max {
                let mut push = |j: usize, raw: f64| {
                    let value = raw * scale;
                    entries.push(StructureEntry {
                        spec: MultiIndexSpec { mu: mu.clone(), l: l.clone(), k, j },
                        value,
                        raw,
                        pass: value <= opts.tolerance,
                    });
                };
                push(0, t.outer[k].sup_norm());
                for j in 1..=last_punctures {
                    push(j, t.punctured[&(j, k)].sup_norm());
                }
            }
        }
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(StructureReport { l_max: opts.l_max, k_max: opts.k_max, r: opts.r, tolerance: opts.tolerance, norm, entries, pass })
}

/// Every tuple t with t_i ≤ caps_i, in lexicographic order.
fn product(caps: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &c in caps {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=c).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_enumerates_in_order() {
        assert_eq!(product(&[1, 2]), vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![1, 2]]);
        assert_eq!(product(&[]), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn collapsed_set_reads_zero_entries() {
        let s = MultiIndexSpec::new(vec![0, 2, 0], vec![1, 1, 1], 0, 0).unwrap();
        assert_eq!(s.collapsed(), vec![0, 2]);
        assert!(MultiIndexSpec::new(vec![0], vec![], 0, 0).is_err());
    }
}
