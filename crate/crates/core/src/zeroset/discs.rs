use super::poly::{line_roots, PolynomialF};
use crate::error::{Error, Result};
use crate::field::{GridSpec, SupportInfo};
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct Disc {
    pub center: C64,
    pub radius: f64,
    /// Roots covered by this disc.
    pub members: Vec<C64>,
}

/// Exclusion discs around the roots of f on every line of variable k.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscFamily {
    pub k: usize,
    pub delta: f64,
    pub n_k: usize,
    pub per_line: Vec<Vec<Disc>>,
    /// True when δ_k is within a factor 2 of the 3h resolution floor.
    pub grid_limited: bool,
}

impl DiscFamily {
    pub fn max_discs(&self) -> usize {
        self.per_line.iter().map(Vec::len).max().unwrap_or(0)
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn lex(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Start from D(c_j, δ/(3N)); repeatedly replace every connected component of the intersection
/// graph by one disc of radius δ centered at its lexicographically smallest root. Discs come out
/// sorted by center, so puncture indices do not depend on the order of the roots.
pub fn merge_discs(centers: &[C64], delta: f64, n_k: usize) -> Vec<Disc> {
    let r0 = delta / (3.0 * n_k.max(1) as f64);
    let mut discs: Vec<Disc> = centers.iter().map(|&c| Disc { center: c, radius: r0, members: vec![c] }).collect();
    discs.sort_by(|a, b| lex(&a.center, &b.center));
    loop {
        let m = discs.len();
        let mut sets = DisjointSets::new(m);
        let mut merged = false;
        for a in 0..m {
            for b in a + 1..m {
                if (discs[a].center - discs[b].center).norm() <= discs[a].radius + discs[b].radius {
                    sets.union(a, b);
                    merged = true;
                }
            }
        }
        if !merged {
            break;
        }
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); m];
        for i in 0..m {
            let r = sets.find(i);
            groups[r].push(i);
        }
        let mut next = Vec::new();
        for g in groups.into_iter().filter(|g| !g.is_empty()) {
            if g.len() == 1 {
                next.push(discs[g[0]].clone());
                continue;
            }
            let mut members: Vec<C64> = g.iter().flat_map(|&i| discs[i].members.clone()).collect();
            members.sort_by(lex);
            let center = members[0];
            next.push(Disc { center, radius: delta, members });
        }
        next.sort_by(|a, b| lex(&a.center, &b.center));
        discs = next;
    }
    discs
}

/// Roots on every line of variable k. Lines on which f vanishes identically are an error only
/// where the support mask has points; elsewhere they carry no roots.
pub fn all_line_roots(f: &PolynomialF, k: usize, grid: &GridSpec, mask: &[bool]) -> Result<Vec<Vec<C64>>> {
    let lines = grid.lines(k);
    let h = grid.hmax(k);
    let slice_hit = slice_masks(grid, k, mask);
    (0..lines.count())
        .map(|line| match line_roots(f, k, &grid.line_point(k, line), h) {
            Ok(r) => Ok(r),
            Err(Error::DegenerateLine { .. }) if !slice_hit[line].iter().any(|&b| b) => Ok(Vec::new()),
            Err(e) => Err(e),
        })
        .collect()
}

/// Per line of variable k, the in-plane support mask.
pub fn slice_masks(grid: &GridSpec, k: usize, mask: &[bool]) -> Vec<Vec<bool>> {
    let lines = grid.lines(k);
    let mut out = vec![vec![false; lines.plane_len()]; lines.count()];
    for (flat, &m) in mask.iter().enumerate() {
        if m {
            let (line, p) = lines.locate(flat);
            out[line][p] = true;
        }
    }
    out
}

fn separation_from_roots(grid: &GridSpec, k: usize, mask: &[bool], roots: &[Vec<C64>]) -> Result<f64> {
    if !mask.iter().any(|&b| b) {
        return Err(Error::Domain("separation needs a nonempty support".into()));
    }
    let pts = grid.plane_points(k);
    let slices = slice_masks(grid, k, mask);
    let mut delta = f64::INFINITY;
    for (line, hit) in slices.iter().enumerate() {
        for (p, _) in hit.iter().enumerate().filter(|(_, &b)| b) {
            for c in &roots[line] {
                delta = delta.min((pts[p] - c).norm());
            }
        }
    }
    let limit = 3.0 * grid.hmax(k);
    if delta <= limit {
        return Err(Error::SupportTouchesZ { axis: k, delta, limit });
    }
    Ok(delta.min(1.0))
}

/// δ_k: smallest distance between a slice support and the roots on the same line.
pub fn separation(f: &PolynomialF, k: usize, support: &SupportInfo, grid: &GridSpec) -> Result<f64> {
    let roots = all_line_roots(f, k, grid, &support.mask)?;
    separation_from_roots(grid, k, &support.mask, &roots)
}

/// Roots, separation and merged discs for variable k in one pass.
pub fn disc_family(f: &PolynomialF, k: usize, support: &SupportInfo, grid: &GridSpec) -> Result<DiscFamily> {
    let roots = all_line_roots(f, k, grid, &support.mask)?;
    let delta = separation_from_roots(grid, k, &support.mask, &roots)?;
    let n_k = f.degree(k);
    let per_line = roots.iter().map(|r| merge_discs(r, delta, n_k)).collect();
    Ok(DiscFamily {
        k,
        delta,
        n_k,
        per_line,
        grid_limited: delta < 6.0 * grid.hmax(k),
    })
}
