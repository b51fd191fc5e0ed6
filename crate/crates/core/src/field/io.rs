//! CFLD1 binary fields and CSV dumps.
//!
//! CFLD1 layout, little-endian throughout: magic `CFLD`, u32 version (1), u32 n, u32 q,
//! u32 axes (2n), u32 res per axis, f64 (min, max) per axis, u32 coefficient count, then per
//! coefficient a u32 index length, the 1-based u32 complement indices and `res`-product
//! (re, im) f64 pairs in row-major order.

use std::io::{Read, Write};

use super::form::QForm;
use super::grid::GridSpec;
use super::scalar::ScalarField;
use crate::error::{Error, Result};
use crate::C64;

pub const MAGIC: &[u8; 4] = b"CFLD";
pub const VERSION: u32 = 1;

fn put_u32(w: &mut impl Write, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn put_f64(w: &mut impl Write, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn get_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    Ok(u32::from_le_bytes(b))
}

fn get_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|e| Error::Format(format!("truncated data: {e}")))?;
    Ok(f64::from_le_bytes(b))
}

pub fn write_cfld(w: &mut impl Write, form: &QForm) -> Result<()> {
    if form.dim() != form.grid().n() {
        return Err(Error::Format("only forms over all grid variables can be written".into()));
    }
    let g = form.grid();
    w.write_all(MAGIC)?;
    put_u32(w, VERSION)?;
    put_u32(w, g.n() as u32)?;
    put_u32(w, form.q() as u32)?;
    put_u32(w, g.axes() as u32)?;
    for &r in g.res() {
        put_u32(w, r as u32)?;
    }
    for &(lo, hi) in g.extent() {
        put_f64(w, lo)?;
        put_f64(w, hi)?;
    }
    put_u32(w, form.len() as u32)?;
    let mut buf = Vec::with_capacity(g.len() * 16);
    for (j, f) in form.iter() {
        put_u32(w, j.len() as u32)?;
        for &i in j {
            put_u32(w, i as u32 + 1)?;
        }
        buf.clear();
        for v in f.values() {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_cfld(r: &mut impl Read) -> Result<QForm> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|e| Error::Format(format!("missing magic: {e}")))?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let version = get_u32(r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n = get_u32(r)? as usize;
    let q = get_u32(r)? as usize;
    let axes = get_u32(r)? as usize;
    if n == 0 || n > 16 || axes != 2 * n {
        return Err(Error::Format(format!("inconsistent header n={n} axes={axes}")));
    }
    let res = (0..axes).map(|_| get_u32(r).map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
    let mut extent = Vec::with_capacity(axes);
    for _ in 0..axes {
        extent.push((get_f64(r)?, get_f64(r)?));
    }
    let grid = GridSpec::new(n, res, extent).map_err(|e| Error::Format(e.to_string()))?;
    let mut form = QForm::new(&grid, q).map_err(|e| Error::Format(e.to_string()))?;
    let count = get_u32(r)? as usize;
    let mut bytes = vec![0u8; grid.len() * 16];
    for _ in 0..count {
        let len = get_u32(r)? as usize;
        if len > n {
            return Err(Error::Format(format!("index length {len} > n")));
        }
        let mut j = Vec::with_capacity(len);
        for _ in 0..len {
            let i = get_u32(r)? as usize;
            if i == 0 || i > n {
                return Err(Error::Format(format!("index entry {i} outside 1..{n}")));
            }
            j.push(i - 1);
        }
        r.read_exact(&mut bytes).map_err(|e| Error::Format(format!("truncated values: {e}")))?;
        let values = bytes
            .chunks_exact(16)
            .map(|c| {
                C64::new(
                    f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                )
            })
            .collect();
        let field = ScalarField::from_values(&grid, values)?;
        form.insert(j, field).map_err(|e| Error::Format(e.to_string()))?;
    }
    Ok(form)
}

pub fn save_cfld(path: &std::path::Path, form: &QForm) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_cfld(&mut w, form)?;
    w.flush()?;
    Ok(())
}

pub fn load_cfld(path: &std::path::Path) -> Result<QForm> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    read_cfld(&mut r)
}

/// Column names of a field dump: x1, y1, …, xn, yn, re, im.
pub fn column_names(grid: &GridSpec) -> Vec<String> {
    (0..grid.n())
        .flat_map(|k| [format!("x{}", k + 1), format!("y{}", k + 1)])
        .chain(["re".to_string(), "im".to_string()])
        .collect()
}

/// Rows of real coordinates followed by re, im, for the points matching every (axis, index) pin.
pub fn slice_rows(field: &ScalarField, fixed: &[(usize, usize)]) -> Result<Vec<Vec<f64>>> {
    let g = field.grid();
    for &(a, i) in fixed {
        if a >= g.axes() || i >= g.res()[a] {
            return Err(Error::Domain(format!("bad slice: axis {a} index {i}")));
        }
    }
    let mut rows = Vec::new();
    for (flat, v) in field.values().iter().enumerate() {
        let idx = g.unravel(flat);
        if fixed.iter().any(|&(a, i)| idx[a] != i) {
            continue;
        }
        let mut row: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| g.coord(a, i)).collect();
        row.push(v.re);
        row.push(v.im);
        rows.push(row);
    }
    Ok(rows)
}

/// One row per grid point: real coordinates, re, im. `fixed` pins real axes to sample indices.
pub fn write_csv(w: &mut impl Write, field: &ScalarField, fixed: &[(usize, usize)]) -> Result<()> {
    let rows = slice_rows(field, fixed)?;
    writeln!(w, "{}", column_names(field.grid()).join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}
