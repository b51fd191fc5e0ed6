use crate::error::{Error, Result};
use crate::C64;

/// Smallest admissible number of samples per real axis.
pub const MIN_RES: usize = 6;

/// Uniform tensor grid over 2n real axes ordered (x1, y1, ..., xn, yn), row-major with the
/// last axis fastest. Variable k (0-based) owns real axes 2k and 2k+1.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    n: usize,
    res: Vec<usize>,
    extent: Vec<(f64, f64)>,
}

impl GridSpec {
    pub fn new(n: usize, res: Vec<usize>, extent: Vec<(f64, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Grid("complex dimension must be at least 1".into()));
        }
        if res.len() != 2 * n || extent.len() != 2 * n {
            return Err(Error::Grid(format!(
                "expected {} axes, got res {} extent {}",
                2 * n,
                res.len(),
                extent.len()
            )));
        }
        for (a, (&r, &(lo, hi))) in res.iter().zip(&extent).enumerate() {
            if r < MIN_RES {
                return Err(Error::Grid(format!("axis {a}: res {r} < {MIN_RES}")));
            }
            if !(lo.is_finite() && hi.is_finite()) || lo > -1.0 || hi < 1.0 {
                return Err(Error::Grid(format!(
                    "axis {a}: extent [{lo}, {hi}] must contain [-1, 1]"
                )));
            }
        }
        Ok(Self { n, res, extent })
    }

    /// Same resolution on every axis, extent [-1-pad, 1+pad].
    pub fn uniform(n: usize, res: usize, pad: f64) -> Result<Self> {
        if !(pad >= 0.0) {
            return Err(Error::Grid(format!("pad {pad} must be >= 0")));
        }
        let l = 1.0 + pad;
        Self::new(n, vec![res; 2 * n], vec![(-l, l); 2 * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn axes(&self) -> usize {
        2 * self.n
    }

    pub fn res(&self) -> &[usize] {
        &self.res
    }

    pub fn extent(&self) -> &[(f64, f64)] {
        &self.extent
    }

    pub fn h(&self, axis: usize) -> f64 {
        let (lo, hi) = self.extent[axis];
        (hi - lo) / (self.res[axis] - 1) as f64
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.extent[axis].0 + i as f64 * self.h(axis)
    }

    pub fn coords(&self, axis: usize) -> Vec<f64> {
        (0..self.res[axis]).map(|i| self.coord(axis, i)).collect()
    }

    pub fn len(&self) -> usize {
        self.res.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Area of one cell in the plane of variable k.
    pub fn cell_area(&self, k: usize) -> f64 {
        self.h(2 * k) * self.h(2 * k + 1)
    }

    /// Volume element h^{2n} of the Riemann sums.
    pub fn cell_volume(&self) -> f64 {
        (0..self.axes()).map(|a| self.h(a)).product()
    }

    /// Largest spacing among the real axes of variable k.
    pub fn hmax(&self, k: usize) -> f64 {
        self.h(2 * k).max(self.h(2 * k + 1))
    }

    pub fn lines(&self, k: usize) -> Lines {
        Lines {
            outer: self.res[..2 * k].iter().product(),
            rx: self.res[2 * k],
            ry: self.res[2 * k + 1],
            inner: self.res[2 * k + 2..].iter().product(),
        }
    }

    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes()];
        for a in (0..self.axes()).rev() {
            idx[a] = flat % self.res[a];
            flat /= self.res[a];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.res).fold(0, |acc, (&i, &r)| acc * r + i)
    }

    /// Complex coordinates of a multi-index.
    pub fn point_of(&self, idx: &[usize]) -> Vec<C64> {
        (0..self.n)
            .map(|k| C64::new(self.coord(2 * k, idx[2 * k]), self.coord(2 * k + 1, idx[2 * k + 1])))
            .collect()
    }

    pub fn point(&self, flat: usize) -> Vec<C64> {
        self.point_of(&self.unravel(flat))
    }

    /// Complex coordinates of every sample of variable k, in plane order (ix major).
    pub fn plane_points(&self, k: usize) -> Vec<C64> {
        let xs = self.coords(2 * k);
        let ys = self.coords(2 * k + 1);
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                out.push(C64::new(x, y));
            }
        }
        out
    }

    /// Coordinates of the other variables on line `line` of variable k; entry k is zero.
    pub fn line_point(&self, k: usize, line: usize) -> Vec<C64> {
        let l = self.lines(k);
        let (o, s) = (line / l.inner, line % l.inner);
        let mut idx = vec![0; self.axes()];
        let mut rest = o;
        for a in (0..2 * k).rev() {
            idx[a] = rest % self.res[a];
            rest /= self.res[a];
        }
        let mut rest = s;
        for a in (2 * k + 2..self.axes()).rev() {
            idx[a] = rest % self.res[a];
            rest /= self.res[a];
        }
        let mut p = self.point_of(&idx);
        p[k] = C64::new(0.0, 0.0);
        p
    }

    /// Every other sample on each axis; None if an axis would drop below [`MIN_RES`].
    /// The coarse extent may end one fine cell short of the original.
    pub fn coarsened(&self) -> Option<Self> {
        let res: Vec<usize> = self.res.iter().map(|r| r.div_ceil(2)).collect();
        if res.iter().any(|&r| r < MIN_RES) {
            return None;
        }
        let extent = self
            .extent
            .iter()
            .enumerate()
            .map(|(a, &(lo, _))| (lo, lo + 2.0 * self.h(a) * (res[a] - 1) as f64))
            .collect();
        Some(Self { n: self.n, res, extent })
    }

    /// Same grid restricted to the first `m` variables.
    pub fn leading(&self, m: usize) -> Result<Self> {
        Self::new(m, self.res[..2 * m].to_vec(), self.extent[..2 * m].to_vec())
    }
}

/// Layout of the planes of one complex variable: every grid point is
/// `((o * rx + ix) * ry + iy) * inner + s`, and a line is the pair (o, s).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lines {
    pub outer: usize,
    pub rx: usize,
    pub ry: usize,
    pub inner: usize,
}

impl Lines {
    pub fn count(&self) -> usize {
        self.outer * self.inner
    }

    pub fn plane_len(&self) -> usize {
        self.rx * self.ry
    }

    pub fn base(&self, line: usize) -> usize {
        let (o, s) = (line / self.inner, line % self.inner);
        o * self.rx * self.ry * self.inner + s
    }

    pub fn index(&self, line: usize, ix: usize, iy: usize) -> usize {
        self.base(line) + (ix * self.ry + iy) * self.inner
    }

    /// Line and in-plane position of a flat index.
    pub fn locate(&self, flat: usize) -> (usize, usize) {
        let s = flat % self.inner;
        let rest = flat / self.inner;
        let p = rest % (self.rx * self.ry);
        let o = rest / (self.rx * self.ry);
        (o * self.inner + s, p)
    }

    pub fn gather(&self, src: &[C64], line: usize, buf: &mut [C64]) {
        let b = self.base(line);
        for (p, v) in buf.iter_mut().enumerate() {
            *v = src[b + p * self.inner];
        }
    }

    pub fn scatter(&self, dst: &mut [C64], line: usize, buf: &[C64]) {
        let b = self.base(line);
        for (p, v) in buf.iter().enumerate() {
            dst[b + p * self.inner] = *v;
        }
    }
}
