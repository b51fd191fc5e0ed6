//! The per-variable Cauchy transform and the moment functionals.

mod kernel;
mod moments;
mod transform;

pub use kernel::CauchyKernelTable;
pub use moments::{moment, moment_table, moment_table_within, punctured_moment, CenterField, MomentTable, PROXIMITY_TAU};
pub use transform::{cauchy_transform, DIRECT_BELOW};
