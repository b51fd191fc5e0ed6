use dbar_core::cauchy::moment;
use dbar_core::corona_ops::{decompose, k_full, k_inner, k_outer, stage_geometry, DecomposeOptions};
use dbar_core::testdata::{annulus_moment_free, bump_field, polynomial, AnalyticField, Bump, Factor, Poly2, Product, SHARPNESS};
use dbar_core::zeroset::{corona_geometry, corona_geometry_with, CoronaOptions};
use dbar_core::{Error, GridSpec, ScalarField, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn radial_bump(radius: f64) -> AnalyticField {
    AnalyticField::single(Product::new(c(1.0, 0.0), vec![Factor::bump(Bump::disc(c(0.0, 0.0), radius, SHARPNESS))]))
}

/// A bump centered at 0.5 + 0.2i, well away from the root of f = z.
fn off_center(g: &GridSpec) -> ScalarField {
    let f = Factor::new(Bump::disc(c(0.5, 0.2), 0.2, SHARPNESS), Poly2::new(vec![(0, 0, c(1.0, 0.0)), (1, 0, c(0.3, -0.2))]));
    AnalyticField::single(Product::new(c(1.0, 0.0), vec![f])).sample(g).unwrap()
}

#[test]
fn operators_of_zero_are_zero() {
    let g = GridSpec::uniform(1, 32, 0.05).unwrap();
    let z = ScalarField::zeros(&g);
    let geom = corona_geometry(&z, 0, None).unwrap();
    assert!(k_outer(&z, 0, &geom).unwrap().is_zero());
    assert!(k_full(&z, 0, &geom).unwrap().is_zero());
}

#[test]
fn outer_operator_of_a_radial_bump_is_flat() {
    // outside the support G(φ) = M/(πz), so z·G(φ) is the constant M/π
    let g = GridSpec::uniform(1, 256, 0.05).unwrap();
    let phi = radial_bump(0.4).sample(&g).unwrap();
    let flat = CoronaOptions { balance: false, smooth: false, ..CoronaOptions::default() };
    let geom = corona_geometry_with(&phi, 0, None, &flat).unwrap();
    let k0 = k_outer(&phi, 0, &geom).unwrap();
    let mass = moment(&phi, 0, 0).values()[0];
    let want = mass * geom.outer.normalizer;
    for &p in &geom.outer.points {
        assert!((k0.values()[p] - want).norm() <= 1e-2 * want.norm(), "{} vs {want}", k0.values()[p]);
    }
    let inside: usize = k0.values().iter().enumerate().filter(|(i, v)| v.norm() > 0.0 && !geom.outer.points.contains(i)).count();
    assert_eq!(inside, 0);
}

#[test]
fn outer_operator_preserves_the_mass() {
    let g = GridSpec::uniform(1, 256, 0.05).unwrap();
    let phi = bump_field(1, 0.5, 3).sample(&g).unwrap();
    let geom = corona_geometry(&phi, 0, None).unwrap();
    let k0 = k_outer(&phi, 0, &geom).unwrap();
    let (a, b) = (moment(&phi, 0, 0).values()[0], moment(&k0, 0, 0).values()[0]);
    assert!((a - b).norm() <= 1e-6 * a.norm(), "{a} vs {b}");
}

#[test]
fn inner_operator_lives_on_its_corona() {
    let g = GridSpec::uniform(1, 256, 0.05).unwrap();
    let phi = off_center(&g);
    let opts = DecomposeOptions { zero_set: Some(polynomial("z1").unwrap()), ..Default::default() };
    let geom = stage_geometry(&phi, 0, &opts).unwrap();
    assert_eq!(geom.max_punctures(), 1);
    let corona = &geom.inner[0][0];
    let k1 = k_inner(&phi, 0, 1, &geom).unwrap();
    assert!(k1.sup_norm() > 0.0);
    for (i, v) in k1.values().iter().enumerate() {
        if v.norm() > 0.0 {
            assert!(corona.points.contains(&i));
        }
    }
}

#[test]
fn one_variable_decomposition_is_the_field_itself() {
    let g = GridSpec::uniform(1, 64, 0.05).unwrap();
    let phi = bump_field(1, 0.5, 1).sample(&g).unwrap();
    let d = decompose(&phi, &DecomposeOptions::default()).unwrap();
    assert_eq!(d.parts.len(), 1);
    assert_eq!(d.parts[0], phi);
    assert!(d.geometries.is_empty());
    assert_eq!(d.telescoping_error(&phi), 0.0);
}

#[test]
fn two_variable_decomposition_telescopes() {
    let g = GridSpec::uniform(2, 32, 0.05).unwrap();
    let phi = bump_field(2, 0.5, 5).sample(&g).unwrap();
    let d = decompose(&phi, &DecomposeOptions::default()).unwrap();
    assert_eq!(d.parts.len(), 2);
    assert_eq!(d.geometries.len(), 1);
    assert!(d.telescoping_error(&phi) <= 1e-12);
    assert!(d.supports_contained(&phi, 0.0));
    assert_eq!(d.residual_report.len(), 1);
    assert_eq!(d.residual_report[0].axis, 1);
}

#[test]
fn first_part_has_no_outer_moments() {
    let g = GridSpec::uniform(2, 48, 0.05).unwrap();
    let phi = bump_field(2, 0.5, 9).sample(&g).unwrap();
    let d = decompose(&phi, &DecomposeOptions::default()).unwrap();
    assert!(d.max_stage_moment() <= 1e-5, "{}", d.max_stage_moment());
    // φ itself is far from moment free, so the part is a real correction
    assert!(moment(&phi, 0, 0).sup_norm() > 1e-3 * phi.lr_norm(2.0).unwrap());
}

#[test]
fn moment_free_data_is_left_alone() {
    let g = GridSpec::uniform(1, 512, 0.05).unwrap();
    let phi = annulus_moment_free(1).unwrap().sample(&g).unwrap();
    let geom = corona_geometry(&phi, 0, None).unwrap();
    let k = k_full(&phi, 0, &geom).unwrap();
    let rel = k.sup_norm() / phi.sup_norm();
    assert!(rel <= 1e-4, "{rel}");
}

#[test]
fn geometry_must_match_axis_and_support() {
    let g = GridSpec::uniform(2, 40, 0.05).unwrap();
    let phi = bump_field(2, 0.5, 1).sample(&g).unwrap();
    let geom = corona_geometry(&phi, 0, None).unwrap();
    assert!(matches!(k_outer(&phi, 1, &geom), Err(Error::Geometry(_))));

    let small = bump_field(2, 0.3, 1).sample(&g).unwrap();
    let narrow = corona_geometry(&small, 0, None).unwrap();
    assert!(matches!(k_full(&phi, 0, &narrow), Err(Error::Geometry(_))));

    let other = GridSpec::uniform(2, 42, 0.05).unwrap();
    let moved = bump_field(2, 0.5, 1).sample(&other).unwrap();
    assert!(matches!(k_full(&moved, 0, &geom), Err(Error::Geometry(_))));
}

#[test]
fn missing_puncture_is_rejected() {
    let g = GridSpec::uniform(1, 64, 0.05).unwrap();
    let phi = bump_field(1, 0.4, 1).sample(&g).unwrap();
    let geom = corona_geometry(&phi, 0, None).unwrap();
    assert!(matches!(k_inner(&phi, 0, 1, &geom), Err(Error::Geometry(_))));
}
