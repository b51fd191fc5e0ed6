use std::f64::consts::PI;

use dbar_core::conditions::{
    check_structure, j_field, j_inner, j_outer, structure_geometries, ExponentReading, MultiIndexSpec, StructureOptions,
};
use dbar_core::corona_ops::DecomposeOptions;
use dbar_core::testdata::{exact_form, mass_bump};
use dbar_core::{Error, GridSpec, ScalarField, C64};

fn grid() -> GridSpec {
    GridSpec::uniform(2, 32, 0.05).unwrap()
}

fn spec(mu: usize, l: usize, k: usize) -> MultiIndexSpec {
    MultiIndexSpec::new(vec![mu], vec![l], k, 0).unwrap()
}

#[test]
fn zero_field_passes_with_zero_entries() {
    let g = grid();
    let z = ScalarField::zeros(&g);
    let geoms = structure_geometries(&z, &DecomposeOptions::default()).unwrap();
    let r = check_structure(&z, &geoms, &StructureOptions::default()).unwrap();
    assert!(r.pass);
    assert!(r.entries.iter().all(|e| e.value == 0.0));
    assert!(r.to_error().is_none());
}

#[test]
fn collapsed_integral_of_a_product_is_the_product_of_masses() {
    let g = grid();
    let phi = mass_bump(2, 0.4).sample(&g).unwrap();
    let geoms = structure_geometries(&phi, &DecomposeOptions::default()).unwrap();
    let j = j_outer(&phi, &spec(0, 0, 0), &geoms).unwrap();
    let total: C64 = phi.values().iter().sum();
    let want = total * g.cell_area(0) * g.cell_area(1) / (PI * PI);
    // constant over the grid
    for v in j.values() {
        assert!((v - want).norm() <= 1e-12 * want.norm(), "{v} vs {want}");
    }
}

#[test]
fn exact_data_has_vanishing_integrals() {
    let g = GridSpec::uniform(2, 48, 0.05).unwrap();
    let (w, _) = exact_form(&g, 2, &[0.5, 0.8], 7).unwrap();
    let phi = w.coeff_or_zero(&[]);
    let geoms = structure_geometries(&phi, &DecomposeOptions::default()).unwrap();
    let norm = phi.lr_norm(2.0).unwrap();
    for (mu, l, k) in [(0, 0, 0), (0, 2, 1), (1, 0, 0), (1, 3, 4)] {
        let j = j_outer(&phi, &spec(mu, l, k), &geoms).unwrap();
        assert!(j.sup_norm() / norm <= 1e-6, "({mu},{l},{k}): {}", j.sup_norm() / norm);
    }
    let r = check_structure(&phi, &geoms, &StructureOptions::default()).unwrap();
    assert!(r.pass, "{:?}", r.worst());
}

#[test]
fn mass_bump_fails_first_at_the_origin_index() {
    let g = grid();
    let phi = mass_bump(2, 0.4).sample(&g).unwrap();
    let geoms = structure_geometries(&phi, &DecomposeOptions::default()).unwrap();
    let opts = StructureOptions { l_max: 2, k_max: 2, ..Default::default() };
    let r = check_structure(&phi, &geoms, &opts).unwrap();
    assert!(!r.pass);
    let first = r.first_failure().unwrap();
    assert_eq!((first.spec.mu.clone(), first.spec.l.clone(), first.spec.k, first.spec.j), (vec![0], vec![0], 0, 0));
    assert!(matches!(r.to_error(), Some(Error::StructureObstruction { .. })));
    // the same integral appears in the report, normalized by the L^2 norm
    let j = j_outer(&phi, &spec(0, 0, 0), &geoms).unwrap();
    assert!((first.value - j.sup_norm() / r.norm).abs() <= 1e-12 * first.value);
}

#[test]
fn entries_cover_every_index() {
    let g = grid();
    let phi = mass_bump(2, 0.4).sample(&g).unwrap();
    let geoms = structure_geometries(&phi, &DecomposeOptions::default()).unwrap();
    let opts = StructureOptions { l_max: 2, k_max: 3, ..Default::default() };
    let r = check_structure(&phi, &geoms, &opts).unwrap();
    // no zero set: μ ∈ {0}, l ≤ 2, k ≤ 3, one outer entry each
    assert_eq!(r.entries.len(), 3 * 4);
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 12);
    assert_eq!(v["l_max"], 2);
}

#[test]
fn readings_agree_when_there_is_no_puncture() {
    let g = grid();
    let phi = mass_bump(2, 0.4).sample(&g).unwrap();
    let geoms = structure_geometries(&phi, &DecomposeOptions::default()).unwrap();
    let s = spec(0, 1, 1);
    let a = j_field(&phi, &s, &geoms, ExponentReading::Denominator).unwrap();
    let b = j_field(&phi, &s, &geoms, ExponentReading::RawDisplay).unwrap();
    assert_eq!(a, b);
}

#[test]
fn malformed_specs_are_rejected() {
    let g = grid();
    let phi = mass_bump(2, 0.4).sample(&g).unwrap();
    let geoms = structure_geometries(&phi, &DecomposeOptions::default()).unwrap();
    let long = MultiIndexSpec::new(vec![0, 0], vec![0, 0], 0, 0).unwrap();
    assert!(matches!(j_outer(&phi, &long, &geoms), Err(Error::Domain(_))));
    assert!(matches!(j_inner(&phi, 0, &spec(0, 0, 0), &geoms), Err(Error::Domain(_))));
    assert!(matches!(check_structure(&phi, &[], &StructureOptions::default()), Err(Error::Geometry(_))));
}

#[test]
fn spec_display() {
    assert_eq!(spec(1, 2, 3).to_string(), "J^(0)_(mu=[1], l=[2])(k=3)");
}
