use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::C64;

/// Complex samples over the full tensor grid, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<C64>,
}

impl ScalarField {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self { values: vec![C64::new(0.0, 0.0); grid.len()], grid: grid.clone() }
    }

    pub fn from_values(grid: &GridSpec, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Sample { index });
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub(crate) fn from_raw(grid: &GridSpec, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::from_raw(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    /// self += c * other
    pub fn axpy(&mut self, c: C64, other: &Self) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_raw(
            &self.grid,
            self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        )
    }

    /// Restriction to the even-index samples of `coarse`, a [`GridSpec::coarsened`] grid.
    pub fn subsample(&self, coarse: &GridSpec) -> Self {
        let mut values = Vec::with_capacity(coarse.len());
        for flat in 0..coarse.len() {
            let idx: Vec<usize> = coarse.unravel(flat).into_iter().map(|i| 2 * i).collect();
            values.push(self.values[self.grid.ravel(&idx)]);
        }
        Self { grid: coarse.clone(), values }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn lr_norm(&self, r: f64) -> Result<f64> {
        lr_norm(self, r)
    }
}

/// Values of a function of the other variables, one per line of variable k.
#[derive(Clone, Debug, PartialEq)]
pub struct LineField {
    grid: GridSpec,
    k: usize,
    values: Vec<C64>,
}

impl LineField {
    pub fn new(grid: &GridSpec, k: usize, values: Vec<C64>) -> Self {
        assert_eq!(values.len(), grid.lines(k).count());
        Self { grid: grid.clone(), k, values }
    }

    pub fn constant(grid: &GridSpec, k: usize, c: C64) -> Self {
        Self::new(grid, k, vec![c; grid.lines(k).count()])
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn axis(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Broadcast to a full field constant along variable k.
    pub fn expand(&self) -> ScalarField {
        let l = self.grid.lines(self.k);
        let mut out = vec![C64::new(0.0, 0.0); self.grid.len()];
        for (line, &v) in self.values.iter().enumerate() {
            for p in 0..l.plane_len() {
                out[l.base(line) + p * l.inner] = v;
            }
        }
        ScalarField::from_raw(&self.grid, out)
    }
}

/// Sample a pointwise function on every grid point.
pub fn sample(f: impl Fn(&[C64]) -> C64, grid: &GridSpec) -> Result<ScalarField> {
    let axes = grid.axes();
    let coords: Vec<Vec<f64>> = (0..axes).map(|a| grid.coords(a)).collect();
    let mut idx = vec![0usize; axes];
    let mut z = vec![C64::new(0.0, 0.0); grid.n()];
    let mut values = Vec::with_capacity(grid.len());
    for flat in 0..grid.len() {
        for (k, zk) in z.iter_mut().enumerate() {
            *zk = C64::new(coords[2 * k][idx[2 * k]], coords[2 * k + 1][idx[2 * k + 1]]);
        }
        let v = f(&z);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Sample { index: flat });
        }
        values.push(v);
        for a in (0..axes).rev() {
            idx[a] += 1;
            if idx[a] < grid.res()[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    Ok(ScalarField::from_raw(grid, values))
}

/// Riemann-sum L^r norm (Σ|φ|^r h^{2n})^{1/r}.
pub fn lr_norm(phi: &ScalarField, r: f64) -> Result<f64> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::Domain(format!("L^r exponent {r} must be finite and >= 1")));
    }
    let dv = phi.grid().cell_volume();
    let s: f64 = if r == 2.0 {
        phi.values().iter().map(|v| v.norm_sqr()).sum()
    } else {
        phi.values().iter().map(|v| v.norm().powf(r)).sum()
    };
    Ok((s * dv).powf(1.0 / r))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportInfo {
    pub mask: Vec<bool>,
    pub radius_per_axis: Vec<f64>,
    pub distance_to_set: Option<f64>,
}

impl SupportInfo {
    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Minimum of `dist` over the support points; infinity for an empty mask.
    pub fn with_distance(mut self, grid: &GridSpec, dist: impl Fn(&[C64]) -> f64) -> Self {
        let d = self
            .mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| dist(&grid.point(i)))
            .fold(f64::INFINITY, f64::min);
        self.distance_to_set = Some(d);
        self
    }
}

/// Support mask |φ| > τ·max|φ| and per-variable max modulus over the mask.
pub fn support_info(phi: &ScalarField, tau: f64) -> SupportInfo {
    let grid = phi.grid();
    let max = phi.sup_norm();
    let thr = tau * max;
    let mask: Vec<bool> = phi.values().iter().map(|v| max > 0.0 && v.norm() > thr).collect();
    let mut radius = vec![0.0f64; grid.n()];
    for k in 0..grid.n() {
        let l = grid.lines(k);
        let pts = grid.plane_points(k);
        let mut hit = vec![false; l.plane_len()];
        for (flat, &m) in mask.iter().enumerate() {
            if m {
                hit[l.locate(flat).1] = true;
            }
        }
        radius[k] = hit
            .iter()
            .zip(&pts)
            .filter(|(&h, _)| h)
            .fold(0.0, |r, (_, z)| r.max(z.norm()));
    }
    SupportInfo { mask, radius_per_axis: radius, distance_to_set: None }
}

/// Max over masked-out points of |φ|, relative to max|φ|: the part of φ living outside `keep`.
pub fn tail_outside(phi: &ScalarField, keep: impl Fn(&[C64]) -> bool) -> f64 {
    let max = phi.sup_norm();
    if max == 0.0 {
        return 0.0;
    }
    let grid = phi.grid();
    let mut worst = 0.0f64;
    for (i, v) in phi.values().iter().enumerate() {
        if v.norm() > worst && !keep(&grid.point(i)) {
            worst = v.norm();
        }
    }
    worst / max
}
