//! Smooth compactly supported test data with exact ∂̄.
//!
//! Fields are finite sums of separable products Π_k b_k(z_k) where each factor is a bump times
//! a polynomial in z and z̄, so every ∂̄_k is available in closed form. Forms built from them
//! give ω = ∂̄T sampled exactly rather than through finite differences.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{complement, sample, GridSpec, MultiIndex, QForm, ScalarField};
use crate::zeroset::PolynomialF;
use crate::C64;

/// Support shape of a one-variable bump.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    /// s = |z − c|²/R².
    Disc { center: C64, radius: f64 },
    /// s = ((|z − c| − m)/w)².
    Annulus { center: C64, mid: f64, half_width: f64 },
    /// 1 on |z − c| ≤ inner, 0 from |z − c| ≥ outer, smooth in between; sharpness unused.
    Plateau { center: C64, inner: f64, outer: f64 },
}

/// Smooth step from 1 at t ≤ 0 to 0 at t ≥ 1, and its derivative.
fn smooth_step(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (1.0, 0.0);
    }
    if t >= 1.0 {
        return (0.0, 0.0);
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    let s = a / (a + b);
    let ds = a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / ((a + b) * (a + b));
    (1.0 - s, -ds)
}

/// exp(−a·s/(1−s)) for s < 1, else 0; C^∞ with compact support.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub shape: Shape,
    pub sharpness: f64,
}

impl Bump {
    pub fn disc(center: C64, radius: f64, sharpness: f64) -> Self {
        Self { shape: Shape::Disc { center, radius }, sharpness }
    }

    pub fn annulus(center: C64, mid: f64, half_width: f64, sharpness: f64) -> Self {
        Self { shape: Shape::Annulus { center, mid, half_width }, sharpness }
    }

    pub fn plateau(center: C64, inner: f64, outer: f64) -> Self {
        Self { shape: Shape::Plateau { center, inner, outer }, sharpness: 0.0 }
    }

    /// (s, ∂̄s)
    fn s(&self, z: C64) -> (f64, C64) {
        match self.shape {
            Shape::Plateau { .. } => unreachable!("plateau bumps are evaluated directly"),
            Shape::Disc { center, radius } => {
                let u = z - center;
                (u.norm_sqr() / (radius * radius), u / (radius * radius))
            }
            Shape::Annulus { center, mid, half_width } => {
                let u = z - center;
                let r = u.norm();
                let t = (r - mid) / half_width;
                let ds = if r > 0.0 { (2.0 * t / half_width) * u / (2.0 * r) } else { C64::new(0.0, 0.0) };
                (t * t, ds)
            }
        }
    }

    /// (value, ∂̄ value) of a plateau bump.
    fn plateau_eval(&self, z: C64) -> Option<(f64, C64)> {
        let Shape::Plateau { center, inner, outer } = self.shape else { return None };
        let u = z - center;
        let r = u.norm();
        let w = outer - inner;
        let (v, dv) = smooth_step((r - inner) / w);
        let d = if r > 0.0 { u * (dv / (w * 2.0 * r)) } else { C64::new(0.0, 0.0) };
        Some((v, d))
    }

    pub fn value(&self, z: C64) -> f64 {
        if let Some((v, _)) = self.plateau_eval(z) {
            return v;
        }
        let (s, _) = self.s(z);
        if s >= 1.0 {
            0.0
        } else {
            (-self.sharpness * s / (1.0 - s)).exp()
        }
    }

    pub fn dbar(&self, z: C64) -> C64 {
        if let Some((_, d)) = self.plateau_eval(z) {
            return d;
        }
        let (s, ds) = self.s(z);
        if s >= 1.0 {
            return C64::new(0.0, 0.0);
        }
        let b = (-self.sharpness * s / (1.0 - s)).exp();
        ds * (-self.sharpness * b / ((1.0 - s) * (1.0 - s)))
    }

    /// Largest |z| on the support.
    pub fn outer_radius(&self) -> f64 {
        match self.shape {
            Shape::Disc { center, radius } => center.norm() + radius,
            Shape::Annulus { center, mid, half_width } => center.norm() + mid + half_width,
            Shape::Plateau { center, outer, .. } => center.norm() + outer,
        }
    }
}

/// Σ c z^p z̄^q.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly2 {
    pub terms: Vec<(u32, u32, C64)>,
}

impl Poly2 {
    pub fn one() -> Self {
        Self { terms: vec![(0, 0, C64::new(1.0, 0.0))] }
    }

    pub fn new(terms: Vec<(u32, u32, C64)>) -> Self {
        Self { terms }
    }

    pub fn value(&self, z: C64) -> C64 {
        self.terms.iter().map(|&(p, q, c)| c * z.powu(p) * z.conj().powu(q)).sum()
    }

    pub fn dbar(&self, z: C64) -> C64 {
        self.terms
            .iter()
            .filter(|t| t.1 > 0)
            .map(|&(p, q, c)| c * q as f64 * z.powu(p) * z.conj().powu(q - 1))
            .sum()
    }
}

/// Bump times polynomial in one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub bump: Option<Bump>,
    pub poly: Poly2,
}

impl Factor {
    pub fn new(bump: Bump, poly: Poly2) -> Self {
        Self { bump: Some(bump), poly }
    }

    pub fn bump(bump: Bump) -> Self {
        Self::new(bump, Poly2::one())
    }

    /// A factor without compact support, e.g. a polynomial weight.
    pub fn poly(poly: Poly2) -> Self {
        Self { bump: None, poly }
    }

    pub fn value(&self, z: C64) -> C64 {
        let b = self.bump.map_or(1.0, |b| b.value(z));
        if b == 0.0 {
            return C64::new(0.0, 0.0);
        }
        b * self.poly.value(z)
    }

    pub fn dbar(&self, z: C64) -> C64 {
        match self.bump {
            Some(b) => b.dbar(z) * self.poly.value(z) + b.value(z) * self.poly.dbar(z),
            None => self.poly.dbar(z),
        }
    }
}

/// c · Π_k factor_k(z_k), with ∂̄ already applied to the variables in `derived`.
#[derive(Clone, Debug, PartialEq)]
pub struct Product {
    pub coef: C64,
    pub factors: Vec<Factor>,
    pub derived: Vec<bool>,
}

impl Product {
    pub fn new(coef: C64, factors: Vec<Factor>) -> Self {
        let n = factors.len();
        Self { coef, factors, derived: vec![false; n] }
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        let mut v = self.coef;
        for (k, f) in self.factors.iter().enumerate() {
            v *= if self.derived[k] { f.dbar(z[k]) } else { f.value(z[k]) };
            if v.re == 0.0 && v.im == 0.0 {
                break;
            }
        }
        v
    }

    pub fn dbar(&self, k: usize) -> Result<Self> {
        if self.derived[k] {
            return Err(Error::Domain("second ∂̄ in one variable is not tracked".into()));
        }
        let mut out = self.clone();
        out.derived[k] = true;
        Ok(out)
    }
}

/// Sum of products.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct AnalyticField {
    pub terms: Vec<Product>,
}

impl AnalyticField {
    pub fn single(p: Product) -> Self {
        Self { terms: vec![p] }
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    pub fn dbar(&self, k: usize) -> Result<Self> {
        Ok(Self { terms: self.terms.iter().map(|t| t.dbar(k)).collect::<Result<_>>()? })
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<ScalarField> {
        sample(|z| self.eval(z), grid)
    }
}

/// A (0,q)-form with analytic coefficients, same complement convention as [`QForm`].
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticForm {
    pub dim: usize,
    pub q: usize,
    pub coeffs: BTreeMap<MultiIndex, AnalyticField>,
}

impl AnalyticForm {
    pub fn new(dim: usize, q: usize) -> Self {
        Self { dim, q, coeffs: BTreeMap::new() }
    }

    /// Exact ∂̄ with the same wedge signs as the finite-difference form_dbar.
    pub fn dbar(&self) -> Result<Self> {
        if self.q >= self.dim {
            return Err(Error::Domain("∂̄ of a top-degree form".into()));
        }
        let mut out = Self::new(self.dim, self.q + 1);
        for (j, f) in &self.coeffs {
            let i_set = complement(j, self.dim);
            for &k in j {
                let before = i_set.iter().filter(|&&i| i < k).count();
                let sign = if before % 2 == 0 { 1.0 } else { -1.0 };
                let mut d = f.dbar(k)?;
                for t in d.terms.iter_mut() {
                    t.coef *= sign;
                }
                let jj: Vec<usize> = j.iter().copied().filter(|&i| i != k).collect();
                out.coeffs.entry(jj).or_default().terms.extend(d.terms);
            }
        }
        Ok(out)
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<QForm> {
        let mut f = QForm::with_dim(grid, self.dim, self.q)?;
        for (j, a) in &self.coeffs {
            f.insert(j.clone(), a.sample(grid)?)?;
        }
        Ok(f)
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Sharpness used by the canonical generators.
pub const SHARPNESS: f64 = 4.0;

/// A smooth bump in every variable, centered near the origin, mildly perturbed by the seed.
pub fn bump_field(n: usize, radius: f64, seed: u64) -> AnalyticField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors = (0..n)
        .map(|_| {
            let center = c(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05));
            let p = Poly2::new(vec![
                (0, 0, c(1.0, 0.0)),
                (1, 0, c(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3))),
                (0, 1, c(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3))),
            ]);
            Factor::new(Bump::disc(center, radius, SHARPNESS), p)
        })
        .collect();
    AnalyticField::single(Product::new(c(1.0, 0.0), factors))
}

/// A positive bump: nonzero integral, the canonical moment obstruction.
pub fn mass_bump(n: usize, radius: f64) -> AnalyticField {
    let factors = (0..n).map(|k| Factor::bump(Bump::disc(c(0.05 * k as f64, 0.0), radius, SHARPNESS))).collect();
    AnalyticField::single(Product::new(c(1.0, 0.0), factors))
}

/// u_0 supported in the annulus 0.5 < |z| < 0.8 times a non-radial polynomial.
pub fn annulus_profile() -> Factor {
    Factor::new(
        Bump::annulus(c(0.0, 0.0), 0.65, 0.15, SHARPNESS),
        Poly2::new(vec![(0, 0, c(1.0, 0.0)), (1, 0, c(0.15, 0.0)), (0, 1, c(0.15, 0.0)), (0, 2, c(0.0, 0.05)), (2, 0, c(0.0, -0.05))]),
    )
}

/// ∂̄_1 ⋯ ∂̄_n of the annulus profile in every variable: all outer and puncture-0 moments vanish
/// in each variable.
pub fn annulus_moment_free(n: usize) -> Result<AnalyticField> {
    let mut p = Product::new(c(1.0, 0.0), vec![annulus_profile(); n]);
    for k in 0..n {
        p = p.dbar(k)?;
    }
    Ok(AnalyticField::single(p))
}

/// χ(|z|)·g(z): 1 on |z| ≤ 0.5, 0 from |z| = 0.8, g holomorphic with nonzero Taylor
/// coefficients. Its ∂̄ lives in the annulus and has vanishing outer moments, while the
/// primitive stays nonzero and holomorphic near 0.
pub fn plateau_profile() -> Factor {
    Factor::new(
        Bump::plateau(c(0.0, 0.0), 0.5, 0.8),
        Poly2::new(vec![(0, 0, c(1.0, 0.0)), (1, 0, c(0.8, 0.3)), (2, 0, c(-0.5, 0.6))]),
    )
}

/// A (0,q−1)-form T in `dim` variables with one smooth product coefficient per complement index;
/// per-variable supports are disc bumps of the given radii.
pub fn smooth_form(dim: usize, q_minus_1: usize, radii: &[f64], seed: u64) -> AnalyticForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = AnalyticForm::new(dim, q_minus_1);
    for j in crate::field::subsets(dim, dim - q_minus_1) {
        let factors = (0..dim)
            .map(|k| {
                let center = c(rng.random_range(-0.04..0.04), rng.random_range(-0.04..0.04));
                let radius = radii[k] * rng.random_range(0.9..1.0);
                let p = Poly2::new(vec![
                    (0, 0, c(1.0, 0.0)),
                    (1, 0, c(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4))),
                    (0, 1, c(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4))),
                ]);
                Factor::new(Bump::disc(center, radius, SHARPNESS), p)
            })
            .collect();
        let coef = c(rng.random_range(0.5..1.0), rng.random_range(-0.5..0.5));
        t.coeffs.insert(j, AnalyticField::single(Product::new(coef, factors)));
    }
    t
}

/// (ω, T) with ω = ∂̄T exactly, ω of degree q in all n variables.
pub fn exact_form(grid: &GridSpec, q: usize, radii: &[f64], seed: u64) -> Result<(QForm, QForm)> {
    let n = grid.n();
    if q == 0 || q > n {
        return Err(Error::Domain(format!("exact forms need 1 <= q <= n, got q={q}")));
    }
    let t = smooth_form(n, q - 1, radii, seed);
    let omega = t.dbar()?;
    Ok((omega.sample(grid)?, t.sample(grid)?))
}

/// Like [`exact_form`] but ω = ∂̄T through zero-extended second-order differences: ω is closed
/// to rounding under second-order stencils at interior points, and its support grows by one
/// cell only, which keeps it off the boundary even on very coarse grids.
pub fn exact_form_discrete(grid: &GridSpec, q: usize, radii: &[f64], seed: u64) -> Result<(QForm, QForm)> {
    let n = grid.n();
    if q == 0 || q > n {
        return Err(Error::Domain(format!("exact forms need 1 <= q <= n, got q={q}")));
    }
    let t = smooth_form(n, q - 1, radii, seed).sample(grid)?;
    Ok((crate::field::form_dbar_order(&t, crate::field::FdOrder::SecondZeroExtended), t))
}

/// Standard test polynomials.
pub fn polynomial(name: &str) -> Result<PolynomialF> {
    let one = c(1.0, 0.0);
    match name {
        "z1" => PolynomialF::new(1, [(vec![1], one)]),
        "z1-2d" => PolynomialF::new(2, [(vec![1, 0], one)]),
        "pair" => PolynomialF::new(1, [(vec![2], one), (vec![0], c(-0.0004, 0.0))]),
        "hyperbola" => PolynomialF::new(2, [(vec![1, 1], one), (vec![0, 0], c(-0.25, 0.0))]),
        other => Err(Error::Parse(format!("unknown polynomial {other}"))),
    }
}
