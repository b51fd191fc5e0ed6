use crate::error::{Error, Result};
use crate::field::{GridSpec, MIN_RES};
use crate::C64;
use std::f64::consts::PI;

const SUBCELLS: usize = 16;

/// Samples of 1/(πw) at lattice offsets w = dx·hx + i·dy·hy, |dx| < rx, |dy| < ry.
///
/// The origin cell holds its exact average (0). Diagonal neighbours hold 16×16 sub-cell
/// averages. Axial neighbours hold the point value plus 1/(4πw), which is the first-order
/// contribution −(hx·hy/π)∂φ of the origin cell written as a centered difference.
#[derive(Clone, Debug)]
pub struct CauchyKernelTable {
    pub rx: usize,
    pub ry: usize,
    pub hx: f64,
    pub hy: f64,
    values: Vec<C64>,
}

impl CauchyKernelTable {
    pub fn new(grid: &GridSpec, k: usize) -> Result<Self> {
        let (rx, ry) = (grid.res()[2 * k], grid.res()[2 * k + 1]);
        if rx < MIN_RES || ry < MIN_RES {
            return Err(Error::Grid(format!("res {rx}x{ry} below {MIN_RES}")));
        }
        let (hx, hy) = (grid.h(2 * k), grid.h(2 * k + 1));
        let (wx, wy) = (2 * rx - 1, 2 * ry - 1);
        let mut values = vec![C64::new(0.0, 0.0); wx * wy];
        for ix in 0..wx {
            let dx = ix as isize - (rx as isize - 1);
            for iy in 0..wy {
                let dy = iy as isize - (ry as isize - 1);
                values[ix * wy + iy] = entry(dx, dy, hx, hy);
            }
        }
        Ok(Self { rx, ry, hx, hy, values })
    }

    pub fn width(&self) -> (usize, usize) {
        (2 * self.rx - 1, 2 * self.ry - 1)
    }

    pub fn at(&self, dx: isize, dy: isize) -> C64 {
        let ix = (dx + self.rx as isize - 1) as usize;
        let iy = (dy + self.ry as isize - 1) as usize;
        self.values[ix * (2 * self.ry - 1) + iy]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

fn entry(dx: isize, dy: isize, hx: f64, hy: f64) -> C64 {
    let w = C64::new(dx as f64 * hx, dy as f64 * hy);
    match (dx.abs(), dy.abs()) {
        (0, 0) => C64::new(0.0, 0.0),
        (1, 0) | (0, 1) => 1.25 / (PI * w),
        (1, 1) => {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..SUBCELLS {
                let sx = (a as f64 + 0.5) / SUBCELLS as f64 - 0.5;
                for b in 0..SUBCELLS {
                    let sy = (b as f64 + 0.5) / SUBCELLS as f64 - 0.5;
                    let v = C64::new((dx as f64 + sx) * hx, (dy as f64 + sy) * hy);
                    acc += 1.0 / (PI * v);
                }
            }
            acc / (SUBCELLS * SUBCELLS) as f64
        }
        _ => 1.0 / (PI * w),
    }
}
