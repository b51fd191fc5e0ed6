//! (0,q)-forms stored by complement multi-index.
//!
//! A coefficient stored under J multiplies dẑ̄_J, the increasing wedge of the dz̄_i with
//! i in the active variables and i ∉ J. With this convention
//! ∂̄(Σ_j (−1)^j f_j dẑ̄_j) = (Σ_j ∂̄_j f_j) dz̄_0 ∧ … ∧ dz̄_{m−1} (0-based j), which is the sign
//! pattern the solvers rely on. Index sets are 0-based in memory and 1-based in files and reports.

use std::collections::BTreeMap;

use super::fd::{dbar_fd_order, FdOrder};
use super::grid::GridSpec;
use super::scalar::ScalarField;
use crate::error::{Error, Result};
use crate::C64;

pub type MultiIndex = Vec<usize>;

/// Increasing complement of `set` in 0..dim.
pub fn complement(set: &[usize], dim: usize) -> MultiIndex {
    (0..dim).filter(|i| !set.contains(i)).collect()
}

/// Sign of the permutation sorting the concatenation (a, b) of two disjoint sets.
pub fn concat_sign(a: &[usize], b: &[usize]) -> f64 {
    let inversions: usize = a.iter().map(|x| b.iter().filter(|y| *y < x).count()).sum();
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// (−1)^{σ(J)}: dẑ̄_J ∧ dz̄_J = pairing_sign(J) · dz̄_0 ∧ … ∧ dz̄_{dim−1}.
pub fn pairing_sign(j: &[usize], dim: usize) -> f64 {
    concat_sign(&complement(j, dim), j)
}

/// All increasing subsets of 0..dim with `size` elements, in lexicographic order.
pub fn subsets(dim: usize, size: usize) -> Vec<MultiIndex> {
    fn rec(start: usize, dim: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(i + 1, dim, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= dim {
        rec(0, dim, size, &mut Vec::new(), &mut out);
    }
    out
}

/// A (0,q)-form in the first `dim` variables of its grid; remaining variables are parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct QForm {
    grid: GridSpec,
    dim: usize,
    q: usize,
    coeffs: BTreeMap<MultiIndex, ScalarField>,
}

impl QForm {
    pub fn new(grid: &GridSpec, q: usize) -> Result<Self> {
        Self::with_dim(grid, grid.n(), q)
    }

    pub fn with_dim(grid: &GridSpec, dim: usize, q: usize) -> Result<Self> {
        if dim == 0 || dim > grid.n() || q > dim {
            return Err(Error::Domain(format!(
                "invalid form degree q={q} in {dim} of {} variables",
                grid.n()
            )));
        }
        Ok(Self { grid: grid.clone(), dim, q, coeffs: BTreeMap::new() })
    }

    /// φ dz̄_0 ∧ … ∧ dz̄_{n−1}.
    pub fn top(phi: ScalarField) -> Self {
        let grid = phi.grid().clone();
        let mut f = Self::new(&grid, grid.n()).expect("top degree is valid");
        f.coeffs.insert(Vec::new(), phi);
        f
    }

    /// A function viewed as a (0,0)-form.
    pub fn function(phi: ScalarField) -> Self {
        let grid = phi.grid().clone();
        let mut f = Self::new(&grid, 0).expect("degree 0 is valid");
        f.coeffs.insert((0..grid.n()).collect(), phi);
        f
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn insert(&mut self, j: MultiIndex, field: ScalarField) -> Result<()> {
        if j.len() != self.dim - self.q
            || j.windows(2).any(|w| w[0] >= w[1])
            || j.iter().any(|&i| i >= self.dim)
        {
            return Err(Error::Domain(format!(
                "complement index {j:?} invalid for q={} in dimension {}",
                self.q, self.dim
            )));
        }
        if field.grid() != &self.grid {
            return Err(Error::Grid("coefficient grid differs from form grid".into()));
        }
        self.coeffs.insert(j, field);
        Ok(())
    }

    /// Add into the coefficient at J, creating it if missing.
    pub fn accumulate(&mut self, j: MultiIndex, c: C64, field: &ScalarField) {
        match self.coeffs.get_mut(&j) {
            Some(f) => f.axpy(c, field),
            None => {
                let mut f = ScalarField::zeros(&self.grid);
                f.axpy(c, field);
                self.coeffs.insert(j, f);
            }
        }
    }

    pub fn get(&self, j: &[usize]) -> Option<&ScalarField> {
        self.coeffs.get(j)
    }

    pub fn coeff_or_zero(&self, j: &[usize]) -> ScalarField {
        self.coeffs.get(j).cloned().unwrap_or_else(|| ScalarField::zeros(&self.grid))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &ScalarField)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, f| m.max(f.sup_norm()))
    }

    /// (Σ_J ‖ω_J‖_r^r)^{1/r}.
    pub fn lr_norm(&self, r: f64) -> Result<f64> {
        let mut s = 0.0;
        for f in self.coeffs.values() {
            s += f.lr_norm(r)?.powf(r);
        }
        Ok(s.powf(1.0 / r))
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        for f in out.coeffs.values_mut() {
            *f = f.scale(c);
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v = f(v);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.q), (other.dim, other.q));
        let mut out = self.clone();
        for (j, f) in &other.coeffs {
            out.accumulate(j.clone(), C64::new(1.0, 0.0), f);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Coefficient of the increasing dz̄_I, I ⊂ 0..dim with |I| = q.
    pub fn increasing_coeff(&self, i: &[usize]) -> Option<&ScalarField> {
        self.coeffs.get(&complement(i, self.dim))
    }

    /// Split ω = g ∧ dz̄_last + h with last = dim−1; both parts live in dim−1 variables.
    /// h is None for q = dim (no dz̄_last-free part) and g is None for q = 0.
    pub fn split_last(&self) -> Result<(Option<QForm>, Option<QForm>)> {
        let last = self.dim - 1;
        if self.dim < 2 {
            return Err(Error::Domain("cannot split a form in one variable".into()));
        }
        let g = if self.q >= 1 {
            let mut g = QForm::with_dim(&self.grid, last, self.q - 1)?;
            for (j, f) in &self.coeffs {
                if !j.contains(&last) {
                    g.coeffs.insert(j.clone(), f.clone());
                }
            }
            Some(g)
        } else {
            None
        };
        let h = if self.q < self.dim && self.q <= last {
            let mut h = QForm::with_dim(&self.grid, last, self.q)?;
            for (j, f) in &self.coeffs {
                if j.contains(&last) {
                    let jj: Vec<usize> = j.iter().copied().filter(|&i| i != last).collect();
                    h.coeffs.insert(jj, f.clone());
                }
            }
            Some(h)
        } else {
            None
        };
        Ok((g, h))
    }

    /// View a form in dim variables as a form in dim+1 variables without dz̄_dim.
    pub fn lift(&self) -> Result<QForm> {
        let mut out = QForm::with_dim(&self.grid, self.dim + 1, self.q)?;
        for (j, f) in &self.coeffs {
            let mut jj = j.clone();
            jj.push(self.dim);
            out.coeffs.insert(jj, f.clone());
        }
        Ok(out)
    }

    /// ω ∧ dz̄_dim as a form in dim+1 variables.
    pub fn wedge_next(&self) -> Result<QForm> {
        let mut out = QForm::with_dim(&self.grid, self.dim + 1, self.q + 1)?;
        for (j, f) in &self.coeffs {
            out.coeffs.insert(j.clone(), f.clone());
        }
        Ok(out)
    }
}

/// ∂̄ of a form over its active variables using second-order differences.
pub fn form_dbar(omega: &QForm) -> QForm {
    form_dbar_order(omega, FdOrder::Second)
}

/// ∂̄(ω_J dz̄_I) = Σ_{k∉I} ∂̄_k ω_J dz̄_k ∧ dz̄_I; moving dz̄_k into place costs (−1)^{#{i∈I : i<k}}.
/// A top-degree input has no higher degree to land in and yields the empty form of the same degree.
pub fn form_dbar_order(omega: &QForm, order: FdOrder) -> QForm {
    let dim = omega.dim;
    if omega.q == dim {
        return QForm::with_dim(&omega.grid, dim, dim).expect("valid degree");
    }
    let mut out = QForm::with_dim(&omega.grid, dim, omega.q + 1).expect("valid degree");
    for (j, f) in &omega.coeffs {
        let i_set = complement(j, dim);
        for &k in j {
            let before = i_set.iter().filter(|&&i| i < k).count();
            let sign = if before % 2 == 0 { 1.0 } else { -1.0 };
            let d = dbar_fd_order(f, k, order);
            let jj: Vec<usize> = j.iter().copied().filter(|&i| i != k).collect();
            out.accumulate(jj, C64::new(sign, 0.0), &d);
        }
    }
    out
}
