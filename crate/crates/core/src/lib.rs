//! Constructive solutions of the compactly supported ∂̄-equation on the unit polydisc and on
//! the polydisc minus a complex hypersurface.
//!
//! The pipeline: per-variable Cauchy transforms ([`cauchy`]), the zero set of a polynomial and
//! its exclusion discs ([`zeroset`]), corona operators that move a density onto annuli while
//! preserving its moments ([`corona_ops`]), the obstruction integrals ([`conditions`]) and the
//! solvers built on top of them ([`solver`]).

pub mod cauchy;
pub mod conditions;
pub mod corona_ops;
pub mod error;
pub mod field;
pub mod solver;
pub mod testdata;
pub mod verify;
pub mod zeroset;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use field::{GridSpec, QForm, ScalarField};
