//! Grids, sampled fields, forms and their finite-difference calculus.

mod fd;
mod form;
mod grid;
pub mod io;
mod scalar;

pub use fd::{dbar_fd, dbar_fd_order, del_fd, diff_axis, FdOrder};
pub use form::{complement, concat_sign, form_dbar, form_dbar_order, pairing_sign, subsets, MultiIndex, QForm};
pub use grid::{GridSpec, Lines, MIN_RES};
pub use scalar::{lr_norm, sample, support_info, tail_outside, LineField, ScalarField, SupportInfo};
