use super::grid::GridSpec;
use super::scalar::ScalarField;
use crate::C64;

/// Accuracy of the finite-difference ∂̄.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FdOrder {
    /// Centered second order, one-sided second order at the boundary.
    #[default]
    Second,
    /// Centered fourth order; second order within two cells of the boundary.
    Fourth,
    /// Centered second order everywhere, values beyond the grid taken as zero. Suited to data
    /// supported away from the boundary: the stencil reaches one cell.
    SecondZeroExtended,
    /// Centered fourth order everywhere, values beyond the grid taken as zero.
    FourthZeroExtended,
}

/// Derivative along one real axis.
pub fn diff_axis(grid: &GridSpec, values: &[C64], axis: usize, order: FdOrder) -> Vec<C64> {
    let res = grid.res();
    let n = res[axis];
    let pre: usize = res[..axis].iter().product();
    let post: usize = res[axis + 1..].iter().product();
    let h = grid.h(axis);
    let mut out = vec![C64::new(0.0, 0.0); values.len()];
    let stencil = |i: usize| -> Vec<(usize, f64)> {
        let c2 = 1.0 / (2.0 * h);
        let c4 = 1.0 / (12.0 * h);
        let zero_extended = |taps: &[(i64, f64)]| -> Vec<(usize, f64)> {
            taps.iter()
                .map(|&(d, c)| (i as i64 + d, c))
                .filter(|&(j, _)| j >= 0 && j < n as i64)
                .map(|(j, c)| (j as usize, c))
                .collect()
        };
        if order == FdOrder::SecondZeroExtended {
            zero_extended(&[(-1, -c2), (1, c2)])
        } else if order == FdOrder::FourthZeroExtended {
            zero_extended(&[(-2, c4), (-1, -8.0 * c4), (1, 8.0 * c4), (2, -c4)])
        } else if i == 0 {
            vec![(0, -3.0 * c2), (1, 4.0 * c2), (2, -c2)]
        } else if i == n - 1 {
            vec![(n - 1, 3.0 * c2), (n - 2, -4.0 * c2), (n - 3, c2)]
        } else if order == FdOrder::Fourth && i >= 2 && i + 2 < n {
            vec![(i - 2, c4), (i - 1, -8.0 * c4), (i + 1, 8.0 * c4), (i + 2, -c4)]
        } else {
            vec![(i - 1, -c2), (i + 1, c2)]
        }
    };
    let stencils: Vec<Vec<(usize, f64)>> = (0..n).map(stencil).collect();
    for p in 0..pre {
        let block = p * n * post;
        for (i, st) in stencils.iter().enumerate() {
            let dst = block + i * post;
            for &(j, c) in st {
                let src = block + j * post;
                for s in 0..post {
                    out[dst + s] += values[src + s] * c;
                }
            }
        }
    }
    out
}

/// ½(∂_x + i∂_y) in variable k.
pub fn dbar_fd_order(phi: &ScalarField, k: usize, order: FdOrder) -> ScalarField {
    let grid = phi.grid();
    let mut dx = diff_axis(grid, phi.values(), 2 * k, order);
    let dy = diff_axis(grid, phi.values(), 2 * k + 1, order);
    for (a, b) in dx.iter_mut().zip(&dy) {
        *a = 0.5 * (*a + C64::new(0.0, 1.0) * b);
    }
    ScalarField::from_raw(grid, dx)
}

/// Centered second-order ∂̄ in variable k, one-sided at the boundary.
pub fn dbar_fd(phi: &ScalarField, k: usize) -> ScalarField {
    dbar_fd_order(phi, k, FdOrder::Second)
}

/// ½(∂_x − i∂_y) in variable k.
pub fn del_fd(phi: &ScalarField, k: usize, order: FdOrder) -> ScalarField {
    let grid = phi.grid();
    let mut dx = diff_axis(grid, phi.values(), 2 * k, order);
    let dy = diff_axis(grid, phi.values(), 2 * k + 1, order);
    for (a, b) in dx.iter_mut().zip(&dy) {
        *a = 0.5 * (*a - C64::new(0.0, 1.0) * b);
    }
    ScalarField::from_raw(grid, dx)
}
