//! The hypersurface Z = f^{-1}(0), its per-line roots and exclusion discs, and corona geometry.

mod discs;
mod geometry;
mod poly;

pub use discs::{all_line_roots, disc_family, merge_discs, separation, slice_masks, Disc, DiscFamily};
pub use geometry::{balance_weights, corona_geometry, corona_geometry_with, Corona, CoronaGeometry, CoronaOptions};
pub use poly::{eval_f, line_distance, line_roots, poly_roots, PolynomialF};
