use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// A polynomial f in n complex variables; Z = f^{-1}(0).
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialF {
    n: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    n: usize,
    terms: Vec<TermJson>,
}

impl PolynomialF {
    /// Duplicate exponents are summed and zero coefficients dropped.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, C64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("polynomial dimension must be >= 1".into()));
        }
        let mut map: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::Parse(format!("exponent {e:?} has length != {n}")));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Parse("non-finite coefficient".into()));
            }
            *map.entry(e).or_insert(C64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| c.norm() > 0.0);
        if map.is_empty() {
            return Err(Error::Parse("polynomial has no nonzero term".into()));
        }
        Ok(Self { n, terms: map })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: PolyJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(p.n, p.terms.into_iter().map(|t| (t.exp, C64::new(t.re, t.im))))
    }

    pub fn to_json(&self) -> String {
        let p = PolyJson {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson { exp: e.clone(), re: c.re, im: c.im })
                .collect(),
        };
        serde_json::to_string_pretty(&p).expect("serializable")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C64)> {
        self.terms.iter()
    }

    /// N_k = max exponent of z_k.
    pub fn degree(&self, k: usize) -> usize {
        self.terms.keys().map(|e| e[k] as usize).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|k| self.degree(k)).collect()
    }

    pub fn coefficient_scale(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(z).fold(*c, |acc, (&p, &zi)| acc * zi.powu(p)))
            .sum()
    }

    /// Coefficients in z_k (index = power) with the other variables fixed to `a`.
    pub fn restrict(&self, k: usize, a: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.degree(k) + 1];
        for (e, c) in &self.terms {
            let mut v = *c;
            for (i, (&p, &ai)) in e.iter().zip(a).enumerate() {
                if i != k {
                    v *= ai.powu(p);
                }
            }
            out[e[k] as usize] += v;
        }
        out
    }
}

pub fn eval_f(f: &PolynomialF, z: &[C64]) -> C64 {
    f.eval(z)
}

/// Roots of f on the line through `a` in direction k lying in |z| ≤ 1 + h, sorted by (re, im).
pub fn line_roots(f: &PolynomialF, k: usize, a: &[C64], h: f64) -> Result<Vec<C64>> {
    let coeffs = f.restrict(k, a);
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let zero_tol = 1e-14 * f.coefficient_scale().max(scale);
    if scale <= zero_tol {
        return Err(Error::DegenerateLine { axis: k });
    }
    let mut deg = coeffs.len() - 1;
    while coeffs[deg].norm() <= zero_tol {
        deg -= 1;
    }
    let mut roots = poly_roots(&coeffs[..=deg]);
    roots.retain(|z| z.norm() <= 1.0 + h);
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Shortest distance from z to Z measured along the coordinate lines through z, counting roots
/// with |root| ≤ 1 + h_k on line k. Infinite if no line meets Z; degenerate lines are skipped.
pub fn line_distance(f: &PolynomialF, z: &[C64], h: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..z.len() {
        if let Ok(roots) = line_roots(f, k, z, h[k]) {
            for r in roots {
                best = best.min((r - z[k]).norm());
            }
        }
    }
    best
}

/// All roots of Σ c_i z^i (c_last ≠ 0): closed forms up to degree 2, companion eigenvalues above,
/// each polished by Newton steps.
pub fn poly_roots(c: &[C64]) -> Vec<C64> {
    let d = c.len() - 1;
    let mut roots = match d {
        0 => return Vec::new(),
        1 => vec![-c[0] / c[1]],
        2 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = (b * b - 4.0 * a * cc).sqrt();
            let q = if (b.conj() * disc).re >= 0.0 { -0.5 * (b + disc) } else { -0.5 * (b - disc) };
            if q.norm() == 0.0 {
                vec![C64::new(0.0, 0.0); 2]
            } else {
                vec![q / a, cc / q]
            }
        }
        _ => {
            let lead = c[d];
            let mut m = DMatrix::<C64>::zeros(d, d);
            for i in 1..d {
                m[(i, i - 1)] = C64::new(1.0, 0.0);
            }
            for i in 0..d {
                m[(i, d - 1)] = -c[i] / lead;
            }
            match m.clone().schur().eigenvalues() {
                Some(ev) => ev.iter().copied().collect(),
                None => m.diagonal().iter().copied().collect(),
            }
        }
    };
    for z in roots.iter_mut() {
        for _ in 0..3 {
            let (mut p, mut dp) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            for &ci in c.iter().rev() {
                dp = dp * *z + p;
                p = p * *z + ci;
            }
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            *z -= step;
        }
    }
    roots
}
