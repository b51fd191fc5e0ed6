//! Fixed inputs for the benchmarks in `benches/`.

use dbar_core::testdata::{bump_field, exact_form};
use dbar_core::{GridSpec, QForm, ScalarField};

pub const SEED: u64 = 42;

/// A smooth bump on a one-variable grid of `res` samples per axis.
pub fn bump_1d(res: usize) -> ScalarField {
    let g = GridSpec::uniform(1, res, 0.05).expect("valid grid");
    bump_field(1, 0.5, SEED).sample(&g).expect("finite samples")
}

/// A smooth bump in two variables.
pub fn bump_2d(res: usize) -> ScalarField {
    let g = GridSpec::uniform(2, res, 0.05).expect("valid grid");
    bump_field(2, 0.5, SEED).sample(&g).expect("finite samples")
}

/// ω = ∂̄T of degree q in two variables.
pub fn exact_2d(res: usize, q: usize) -> QForm {
    let g = GridSpec::uniform(2, res, 0.05).expect("valid grid");
    exact_form(&g, q, &[0.5, 0.5], SEED).expect("exact form").0
}
