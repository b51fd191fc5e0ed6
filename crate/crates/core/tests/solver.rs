use dbar_core::field::{sample, QForm};
use dbar_core::solver::{check_star, closedness, residual, solve, solve_01, solve_vanishing, SolveOptions};
use dbar_core::testdata::{bump_field, exact_form, mass_bump, polynomial, AnalyticField, Bump, Factor, Product, SHARPNESS};
use dbar_core::zeroset::PolynomialF;
use dbar_core::{Error, GridSpec, ScalarField, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rel_sup(a: &ScalarField, b: &ScalarField) -> f64 {
    a.sub(b).sup_norm() / b.sup_norm()
}

#[test]
fn one_variable_recovers_a_compact_primitive() {
    let g = GridSpec::uniform(1, 256, 0.05).unwrap();
    let u0 = bump_field(1, 0.5, 11);
    let phi = u0.dbar(0).unwrap().sample(&g).unwrap();
    let r = solve(&QForm::top(phi), &SolveOptions::default()).unwrap();
    assert_eq!(r.report.solver, "1d_punctured");
    assert_eq!(r.solution.q(), 0);
    let u = r.solution.coeff_or_zero(&[0]);
    let err = rel_sup(&u, &u0.sample(&g).unwrap());
    assert!(err <= 1e-2, "{err}");
    let m = r.report.moments.as_ref().unwrap();
    assert!(m.worst <= 1e-6);
    assert!(r.report.support[0].radius_per_axis[0] < 0.6);
}

#[test]
fn mass_bump_is_a_moment_obstruction() {
    let g = GridSpec::uniform(1, 64, 0.05).unwrap();
    let phi = mass_bump(1, 0.4).sample(&g).unwrap();
    match solve(&QForm::top(phi), &SolveOptions::default()) {
        Err(e @ Error::MomentObstruction { puncture: 0, order: 0, .. }) => assert_eq!(e.exit_code(), 20),
        other => panic!("{other:?}"),
    }
}

#[test]
fn zero_form_in_one_variable() {
    let g = GridSpec::uniform(1, 16, 0.05).unwrap();
    let r = solve(&QForm::new(&g, 1).unwrap(), &SolveOptions::default()).unwrap();
    assert_eq!(r.solution.sup_norm(), 0.0);
}

#[test]
fn open_form_is_rejected() {
    let g = GridSpec::uniform(2, 24, 0.05).unwrap();
    let mut w = QForm::new(&g, 1).unwrap();
    // φ dz̄_1 with φ depending on z̄_2: ∂̄_2 φ ≠ 0
    w.insert(vec![1], bump_field(2, 0.5, 1).sample(&g).unwrap()).unwrap();
    assert!(closedness(&w) > 0.1);
    assert!(matches!(solve(&w, &SolveOptions::default()), Err(Error::NotClosed { .. })));
}

#[test]
fn closed_01_form_is_recovered() {
    let g = GridSpec::uniform(2, 48, 0.05).unwrap();
    let (w, t) = exact_form(&g, 1, &[0.5, 0.5], 42).unwrap();
    let r = solve_01(&w, &SolveOptions::default()).unwrap();
    let f = r.solution.coeff_or_zero(&[0, 1]);
    let err = rel_sup(&f, &t.coeff_or_zero(&[0, 1]));
    assert!(err <= 5e-2, "{err}");
    assert!(r.report.closedness.unwrap() <= 5e-2);
}

#[test]
fn top_form_residual_and_sign() {
    let g = GridSpec::uniform(2, 48, 0.05).unwrap();
    let (w, _) = exact_form(&g, 2, &[0.5, 0.5], 42).unwrap();
    let r = solve(&w, &SolveOptions::default()).unwrap();
    assert_eq!(r.report.solver, "0n");
    assert!(r.report.structure.as_ref().unwrap().pass);
    let res = r.report.residual.as_ref().unwrap();
    assert!(res.relative <= 5e-2, "{}", res.relative);
    // flipping either coefficient's sign must break the equation
    let none = vec![false; g.len()];
    for key in [vec![0usize], vec![1]] {
        let mut flipped = QForm::new(&g, 1).unwrap();
        for (j, c) in r.solution.iter() {
            let s = if *j == key { -1.0 } else { 1.0 };
            flipped.insert(j.clone(), c.scale(C64::new(s, 0.0))).unwrap();
        }
        assert!(residual(&flipped, &w, &none, 2.0).unwrap().unmasked > 0.3);
    }
}

#[test]
fn wide_support_is_not_compact() {
    let g = GridSpec::uniform(2, 16, 0.05).unwrap();
    let w = QForm::top(sample(|_| c(1.0, 0.0), &g).unwrap());
    assert!(matches!(solve(&w, &SolveOptions::default()), Err(Error::SupportNotCompact { .. })));
}

#[test]
fn star_condition_accepts_smooth_data() {
    let g = GridSpec::uniform(2, 48, 0.05).unwrap();
    let (w, _) = exact_form(&g, 1, &[0.5, 0.5], 3).unwrap();
    let s = check_star(&w, 2.0).unwrap();
    assert!(s.pass && s.certified, "{}", s.max_ratio);
    assert!(s.max_ratio < 1.1);
}

#[test]
fn star_condition_flags_a_jump() {
    let g = GridSpec::uniform(2, 64, 0.05).unwrap();
    // flat in z_1 around the cut, so the jump dominates ∂̄_1
    let flat = Factor::bump(Bump::plateau(c(0.0, 0.0), 0.5, 0.8));
    let smooth = Factor::bump(Bump::disc(c(0.0, 0.0), 0.5, SHARPNESS));
    let b = AnalyticField::single(Product::new(c(1.0, 0.0), vec![flat, smooth]));
    // cut x_1 to the sample range [i0, i1], i0 even and i1 odd, so the coarsened grid sees the
    // same cut and the coefficient itself stays resolved
    let (i0, i1) = (26usize, 37usize);
    let vals = (0..g.len())
        .map(|flat| {
            let i = g.unravel(flat)[0];
            if (i0..=i1).contains(&i) { b.eval(&g.point(flat)) } else { c(0.0, 0.0) }
        })
        .collect();
    let jump = ScalarField::from_values(&g, vals).unwrap();
    let mut w = QForm::new(&g, 1).unwrap();
    // coefficient of dz̄_2, differentiated in z̄_1 across the jump
    w.insert(vec![0], jump).unwrap();
    let s = check_star(&w, 2.0).unwrap();
    assert!(s.certified);
    assert!(!s.pass, "{s:?}");
    assert!(s.max_ratio > 1.2 && s.max_ratio < 1.5, "{}", s.max_ratio);
    assert!(matches!(s.to_error(), Some(Error::StarCondition { .. })));
}

#[test]
fn vanishing_of_order_zero_is_the_plain_solve() {
    let g = GridSpec::uniform(1, 96, 0.05).unwrap();
    let w = QForm::top(bump_field(1, 0.4, 1).dbar(0).unwrap().sample(&g).unwrap());
    let f = PolynomialF::new(1, [(vec![1], c(1.0, 0.0)), (vec![0], c(-0.9, 0.0))]).unwrap();
    let a = solve_vanishing(&w, &f, 0, &SolveOptions::default()).unwrap();
    let b = solve(&w, &SolveOptions::default()).unwrap();
    assert_eq!(a.solution, b.solution);
}

#[test]
fn vanishing_needs_support_off_the_zero_set() {
    let g = GridSpec::uniform(1, 64, 0.05).unwrap();
    let w = QForm::top(bump_field(1, 0.4, 1).dbar(0).unwrap().sample(&g).unwrap());
    let f = polynomial("z1").unwrap();
    assert!(matches!(solve_vanishing(&w, &f, 1, &SolveOptions::default()), Err(Error::SupportTouchesZ { .. })));
    let f2 = polynomial("hyperbola").unwrap();
    assert!(matches!(solve_vanishing(&w, &f2, 1, &SolveOptions::default()), Err(Error::Domain(_))));
}

#[test]
fn report_serializes() {
    let g = GridSpec::uniform(1, 64, 0.05).unwrap();
    let w = QForm::top(bump_field(1, 0.4, 1).dbar(0).unwrap().sample(&g).unwrap());
    let r = solve(&w, &SolveOptions::default()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["solver"], "1d_punctured");
    assert_eq!(v["n"], 1);
    assert!(v["residual"]["relative"].is_number());
}
