use std::f64::consts::PI;

use dbar_core::field::io::{read_cfld, write_cfld, write_csv};
use dbar_core::field::{dbar_fd, dbar_fd_order, form_dbar, sample, support_info, FdOrder};
use dbar_core::testdata::{bump_field, smooth_form};
use dbar_core::{Error, GridSpec, QForm, ScalarField, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn interior_max(phi: &ScalarField, margin: usize, f: impl Fn(&[C64], C64) -> f64) -> f64 {
    let g = phi.grid();
    let mut worst: f64 = 0.0;
    for (flat, v) in phi.values().iter().enumerate() {
        let idx = g.unravel(flat);
        if idx.iter().zip(g.res()).any(|(&i, &r)| i < margin || i + margin >= r) {
            continue;
        }
        worst = worst.max(f(&g.point(flat), *v));
    }
    worst
}

#[test]
fn zero_function_samples_to_zero() {
    let g = GridSpec::uniform(2, 8, 0.1).unwrap();
    assert!(sample(|_| c(0.0, 0.0), &g).unwrap().is_zero());
}

#[test]
fn first_sample_is_the_lower_corner() {
    let g = GridSpec::new(1, vec![9, 9], vec![(-1.0, 1.0); 2]).unwrap();
    let phi = sample(|z| z[0], &g).unwrap();
    assert_eq!(phi.values()[0], c(-1.0, -1.0));
    // vertex grid: the center sample is the origin
    assert_eq!(phi.values()[4 * 9 + 4], c(0.0, 0.0));
}

#[test]
fn non_finite_samples_are_rejected() {
    let g = GridSpec::new(1, vec![9, 9], vec![(-1.0, 1.0); 2]).unwrap();
    let r = sample(|z| c(1.0, 0.0) / z[0], &g);
    assert!(matches!(r, Err(Error::Sample { index: 40 })));
}

fn classic_bump(z: C64, rho: f64) -> f64 {
    let s = z.norm_sqr();
    if s < rho * rho {
        (1.0 / (s - rho * rho)).exp()
    } else {
        0.0
    }
}

#[test]
fn classic_bump_is_supported_in_its_disc() {
    let g = GridSpec::uniform(1, 101, 0.0).unwrap();
    let phi = sample(|z| c(classic_bump(z[0], 0.5), 0.0), &g).unwrap();
    for (flat, v) in phi.values().iter().enumerate() {
        let z = g.point(flat)[0];
        if z.norm() >= 0.5 {
            assert_eq!(*v, c(0.0, 0.0));
        }
    }
    // scalar evaluation at (0.2, -0.1), sample index (60, 45)
    let expected = (1.0f64 / (0.04 + 0.01 - 0.25)).exp();
    let got = phi.values()[60 * 101 + 45].re;
    assert!((got - expected).abs() <= 1e-14 * expected, "{got} vs {expected}");
    // flat to all orders at the edge: one cell inside the circle the value is below e^{-24}
    let edge = phi.values()[(50 + 24) * 101 + 50].re;
    assert!(edge > 0.0 && edge < (-24.0f64).exp());
}

#[test]
fn dbar_of_holomorphic_sample_is_second_order_small() {
    let mut errs = Vec::new();
    for res in [33, 65] {
        let g = GridSpec::uniform(1, res, 0.0).unwrap();
        let phi = sample(|z| z[0] * z[0], &g).unwrap();
        let d = dbar_fd(&phi, 0);
        errs.push(interior_max(&d, 1, |_, v| v.norm()));
    }
    // z^2 is quadratic: centered differences are exact up to rounding
    assert!(errs.iter().all(|&e| e < 1e-12), "{errs:?}");
    let g = GridSpec::uniform(1, 33, 0.0).unwrap();
    let phi = sample(|z| (z[0] * 2.0).exp(), &g).unwrap();
    let e2 = interior_max(&dbar_fd(&phi, 0), 1, |_, v| v.norm());
    let g = GridSpec::uniform(1, 65, 0.0).unwrap();
    let phi = sample(|z| (z[0] * 2.0).exp(), &g).unwrap();
    let e1 = interior_max(&dbar_fd(&phi, 0), 1, |_, v| v.norm());
    assert!(e2 / e1 > 3.5, "second order: {e2} -> {e1}");
}

#[test]
fn dbar_of_conjugate_is_one() {
    let g = GridSpec::uniform(1, 24, 0.05).unwrap();
    let phi = sample(|z| z[0].conj(), &g).unwrap();
    for order in [FdOrder::Second, FdOrder::Fourth] {
        let d = dbar_fd_order(&phi, 0, order);
        let err = interior_max(&d, 2, |_, v| (v - c(1.0, 0.0)).norm());
        assert!(err < 1e-12, "{order:?}: {err}");
    }
}

#[test]
fn dbar_of_modulus_squared_is_z() {
    let g = GridSpec::uniform(1, 24, 0.05).unwrap();
    let phi = sample(|z| c(z[0].norm_sqr(), 0.0), &g).unwrap();
    let d = dbar_fd(&phi, 0);
    let err = interior_max(&d, 1, |z, v| (v - z[0]).norm());
    assert!(err < 1e-12, "{err}");
}

#[test]
fn lr_norm_examples() {
    let g = GridSpec::uniform(1, 16, 0.0).unwrap();
    assert_eq!(ScalarField::zeros(&g).lr_norm(2.0).unwrap(), 0.0);

    let g = GridSpec::uniform(1, 801, 0.05).unwrap();
    let disc = sample(|z| c(if z[0].norm() < 1.0 { 1.0 } else { 0.0 }, 0.0), &g).unwrap();
    let n = disc.lr_norm(2.0).unwrap();
    assert!((n - PI.sqrt()).abs() < 2e-3, "{n}");

    let phi = bump_field(1, 0.5, 3).sample(&GridSpec::uniform(1, 40, 0.05).unwrap()).unwrap();
    let s = c(-2.0, 1.5);
    for r in [1.0, 2.0, 3.5] {
        let a = phi.scale(s).lr_norm(r).unwrap();
        let b = s.norm() * phi.lr_norm(r).unwrap();
        assert!((a - b).abs() <= 1e-13 * b, "r={r}");
    }
    assert!(phi.lr_norm(0.5).is_err());
}

#[test]
fn support_examples() {
    let g = GridSpec::uniform(1, 64, 0.05).unwrap();
    let s = support_info(&ScalarField::zeros(&g), 1e-6);
    assert!(s.is_empty());
    assert_eq!(s.radius_per_axis, vec![0.0]);

    let one = sample(|_| c(1.0, 0.0), &g).unwrap();
    assert_eq!(support_info(&one, 1e-6).count(), g.len());

    let g = GridSpec::uniform(2, 48, 0.05).unwrap();
    let phi = sample(|z| c(classic_bump(z[0], 0.5) * classic_bump(z[1], 0.3), 0.0), &g).unwrap();
    let s = support_info(&phi, 1e-12);
    let h = g.hmax(0);
    assert!((s.radius_per_axis[0] - 0.5).abs() <= 2.0 * h, "{:?}", s.radius_per_axis);
    assert!((s.radius_per_axis[1] - 0.3).abs() <= 2.0 * h, "{:?}", s.radius_per_axis);
}

#[test]
fn form_dbar_product_rule() {
    let g = GridSpec::uniform(2, 40, 0.05).unwrap();
    assert_eq!(form_dbar(&QForm::new(&g, 0).unwrap()).sup_norm(), 0.0);

    let bump = bump_field(2, 0.6, 11);
    let b = bump.sample(&g).unwrap();
    let zbar = sample(|z| z[0].conj(), &g).unwrap();
    let phi = zbar.mul(&b);
    let w = form_dbar(&QForm::function(phi));
    assert_eq!(w.q(), 1);
    let d1 = bump.dbar(0).unwrap().sample(&g).unwrap();
    let d2 = bump.dbar(1).unwrap().sample(&g).unwrap();
    // dz̄_1 has complement {2}, dz̄_2 has complement {1}
    let want1 = b.add(&zbar.mul(&d1));
    let want2 = zbar.mul(&d2);
    let e1 = w.coeff_or_zero(&[1]).sub(&want1).sup_norm() / want1.sup_norm();
    let e2 = w.coeff_or_zero(&[0]).sub(&want2).sup_norm() / want2.sup_norm();
    assert!(e1 < 5e-2 && e2 < 5e-2, "{e1} {e2}");
}

#[test]
fn dbar_squared_vanishes() {
    let g = GridSpec::uniform(3, 10, 0.05).unwrap();
    let t = smooth_form(3, 1, &[0.6; 3], 5).sample(&g).unwrap();
    let w = form_dbar(&t);
    let ww = form_dbar(&w);
    assert_eq!(ww.q(), 3);
    assert!(ww.sup_norm() <= 1e-12 * w.sup_norm(), "{}", ww.sup_norm());
}

fn cfld_bytes(form: &QForm) -> Vec<u8> {
    let mut buf = Vec::new();
    write_cfld(&mut buf, form).unwrap();
    buf
}

#[test]
fn cfld_header_layout() {
    let g = GridSpec::new(1, vec![6, 7], vec![(-1.0, 1.0), (-1.5, 1.0)]).unwrap();
    let w = QForm::top(sample(|z| z[0], &g).unwrap());
    let b = cfld_bytes(&w);
    assert_eq!(&b[..4], b"CFLD");
    let u32_at = |o: usize| u32::from_le_bytes(b[o..o + 4].try_into().unwrap());
    assert_eq!((u32_at(4), u32_at(8), u32_at(12), u32_at(16)), (1, 1, 1, 2));
    assert_eq!((u32_at(20), u32_at(24)), (6, 7));
    let f64_at = |o: usize| f64::from_le_bytes(b[o..o + 8].try_into().unwrap());
    assert_eq!([f64_at(28), f64_at(36), f64_at(44), f64_at(52)], [-1.0, 1.0, -1.5, 1.0]);
    // one coefficient, empty complement index, then 42 complex values
    assert_eq!((u32_at(60), u32_at(64)), (1, 0));
    assert_eq!(b.len(), 68 + 42 * 16);
    assert_eq!(f64_at(68), -1.0);
}

#[test]
fn cfld_round_trip_is_bit_exact() {
    let g = GridSpec::uniform(2, 6, 0.05).unwrap();
    let t = smooth_form(2, 1, &[0.7, 0.7], 9).sample(&g).unwrap();
    let mut special = t.coeff_or_zero(&[0]);
    special.values_mut()[0] = c(-0.0, f64::MIN_POSITIVE);
    special.values_mut()[1] = c(f64::MAX, -1e-300);
    let mut w = t.clone();
    w.insert(vec![0], special).unwrap();
    let bytes = cfld_bytes(&w);
    let back = read_cfld(&mut bytes.as_slice()).unwrap();
    assert_eq!(cfld_bytes(&back), bytes);
    for ((ja, a), (jb, b)) in w.iter().zip(back.iter()) {
        assert_eq!(ja, jb);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }
}

#[test]
fn cfld_rejects_damaged_input() {
    let g = GridSpec::uniform(1, 6, 0.05).unwrap();
    let bytes = cfld_bytes(&QForm::top(sample(|z| z[0], &g).unwrap()));
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(read_cfld(&mut bad.as_slice()), Err(Error::Format(_))));
    let mut bad = bytes.clone();
    bad[4] = 2;
    assert!(matches!(read_cfld(&mut bad.as_slice()), Err(Error::Format(_))));
    let short = &bytes[..bytes.len() - 3];
    assert!(matches!(read_cfld(&mut &short[..]), Err(Error::Format(_))));
}

#[test]
fn csv_dumps() {
    let g = GridSpec::uniform(1, 6, 0.0).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &ScalarField::zeros(&g), &[]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x1,y1,re,im");
    assert_eq!(lines.len(), 37);
    assert!(lines[1..].iter().all(|l| l.ends_with(",0,0")));

    let g = GridSpec::uniform(2, 7, 0.0).unwrap();
    let phi = sample(|z| z[0] + z[1], &g).unwrap();
    let mut buf = Vec::new();
    // z_2 = 0 is sample 3 on both of its real axes
    write_csv(&mut buf, &phi, &[(2, 3), (3, 3)]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 1 + 49);
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!((v[2], v[3]), (0.0, 0.0));
        assert_eq!((v[4], v[5]), (v[0], v[1]));
    }
    assert!(write_csv(&mut Vec::new(), &phi, &[(4, 0)]).is_err());
    assert!(write_csv(&mut Vec::new(), &phi, &[(0, 7)]).is_err());
}
