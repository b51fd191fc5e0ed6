use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::kernel::CauchyKernelTable;
use crate::error::Result;
use crate::field::{Lines, ScalarField};
use crate::C64;

/// Below this many samples per axis the convolution is evaluated directly.
pub const DIRECT_BELOW: usize = 32;

/// G_k(φ) = φ ∗_k 1/(πz): per-line convolution in variable k.
pub fn cauchy_transform(phi: &ScalarField, k: usize) -> Result<ScalarField> {
    let grid = phi.grid();
    let table = CauchyKernelTable::new(grid, k)?;
    let lines = grid.lines(k);
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    let cell = table.hx * table.hy;
    let mut plane = vec![C64::new(0.0, 0.0); lines.plane_len()];
    let mut result = vec![C64::new(0.0, 0.0); lines.plane_len()];
    let mut fft = if table.rx.min(table.ry) >= DIRECT_BELOW { Some(FftConv::new(&table)) } else { None };
    for line in 0..lines.count() {
        lines.gather(phi.values(), line, &mut plane);
        if plane.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
            continue;
        }
        match fft.as_mut() {
            Some(conv) => conv.apply(&plane, &mut result),
            None => direct(&table, &lines, &plane, &mut result, cell),
        }
        lines.scatter(&mut out, line, &result);
    }
    Ok(ScalarField::from_raw(grid, out))
}

fn direct(table: &CauchyKernelTable, lines: &Lines, plane: &[C64], result: &mut [C64], cell: f64) {
    let (rx, ry) = (lines.rx, lines.ry);
    result.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
    let wy = 2 * ry - 1;
    let kv = table.values();
    for (s, &v) in plane.iter().enumerate() {
        if v.re == 0.0 && v.im == 0.0 {
            continue;
        }
        let (sx, sy) = (s / ry, s % ry);
        let v = v * cell;
        for px in 0..rx {
            let row = (px + rx - 1 - sx) * wy + ry - 1 - sy;
            let dst = &mut result[px * ry..(px + 1) * ry];
            for (py, d) in dst.iter_mut().enumerate() {
                *d += kv[row + py] * v;
            }
        }
    }
}

/// Zero-padded 2D FFT convolution with a precomputed kernel spectrum.
struct FftConv {
    rx: usize,
    ry: usize,
    nx: usize,
    ny: usize,
    fx: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    ix: Arc<dyn Fft<f64>>,
    iy: Arc<dyn Fft<f64>>,
    /// Kernel spectrum in transposed (ny × nx) layout, scaled by cell area / (nx·ny).
    spectrum: Vec<C64>,
    a: Vec<C64>,
    b: Vec<C64>,
    scratch: Vec<C64>,
}

impl FftConv {
    fn new(table: &CauchyKernelTable) -> Self {
        let (rx, ry) = (table.rx, table.ry);
        let nx = (2 * rx - 1).next_power_of_two();
        let ny = (2 * ry - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fx = planner.plan_fft_forward(nx);
        let fy = planner.plan_fft_forward(ny);
        let ix = planner.plan_fft_inverse(nx);
        let iy = planner.plan_fft_inverse(ny);
        let scratch_len = [&fx, &fy, &ix, &iy]
            .iter()
            .map(|f| f.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        let mut conv = Self {
            rx,
            ry,
            nx,
            ny,
            fx,
            fy,
            ix,
            iy,
            spectrum: Vec::new(),
            a: vec![C64::new(0.0, 0.0); nx * ny],
            b: vec![C64::new(0.0, 0.0); nx * ny],
            scratch: vec![C64::new(0.0, 0.0); scratch_len],
        };
        let (wx, wy) = table.width();
        let kv = table.values();
        for x in 0..wx {
            conv.a[x * ny..x * ny + wy].copy_from_slice(&kv[x * wy..(x + 1) * wy]);
        }
        conv.fy.process_with_scratch(&mut conv.a[..wx * ny], &mut conv.scratch);
        transpose(&conv.a, &mut conv.b, nx, ny, nx);
        conv.fx.process_with_scratch(&mut conv.b, &mut conv.scratch);
        let scale = table.hx * table.hy / (nx * ny) as f64;
        conv.spectrum = conv.b.iter().map(|v| v * scale).collect();
        conv
    }

    fn apply(&mut self, plane: &[C64], result: &mut [C64]) {
        let (rx, ry, nx, ny) = (self.rx, self.ry, self.nx, self.ny);
        let zero = C64::new(0.0, 0.0);
        self.a[..rx * ny].iter_mut().for_each(|v| *v = zero);
        for x in 0..rx {
            self.a[x * ny..x * ny + ry].copy_from_slice(&plane[x * ry..(x + 1) * ry]);
        }
        self.fy.process_with_scratch(&mut self.a[..rx * ny], &mut self.scratch);
        self.b.iter_mut().for_each(|v| *v = zero);
        transpose(&self.a, &mut self.b, nx, ny, rx);
        self.fx.process_with_scratch(&mut self.b, &mut self.scratch);
        for (v, s) in self.b.iter_mut().zip(&self.spectrum) {
            *v *= s;
        }
        self.ix.process_with_scratch(&mut self.b, &mut self.scratch);
        for x in 0..rx {
            let src = x + rx - 1;
            for y in 0..ny {
                self.a[x * ny + y] = self.b[y * nx + src];
            }
        }
        self.iy.process_with_scratch(&mut self.a[..rx * ny], &mut self.scratch);
        for x in 0..rx {
            result[x * ry..(x + 1) * ry].copy_from_slice(&self.a[x * ny + ry - 1..x * ny + 2 * ry - 1]);
        }
    }
}

/// b (ny × nx) ← aᵀ for the first `rows` rows of a (nx × ny).
fn transpose(a: &[C64], b: &mut [C64], nx: usize, ny: usize, rows: usize) {
    for x in 0..rows {
        for y in 0..ny {
            b[y * nx + x] = a[x * ny + y];
        }
    }
}
