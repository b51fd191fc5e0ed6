use dbar_core::cauchy::cauchy_transform;
use dbar_core::field::io::{read_cfld, write_cfld};
use dbar_core::field::{complement, concat_sign, pairing_sign, subsets, QForm};
use dbar_core::zeroset::merge_discs;
use dbar_core::{GridSpec, ScalarField, C64};
use proptest::prelude::*;

fn values(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b)), len)
}

fn field(g: &GridSpec, v: Vec<C64>) -> ScalarField {
    ScalarField::from_values(g, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transform_is_linear(a in values(144), b in values(144), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let g = GridSpec::uniform(1, 12, 0.05).unwrap();
        let (fa, fb) = (field(&g, a), field(&g, b));
        let (cs, ct) = (C64::new(s, 0.0), C64::new(0.0, t));
        let mut mix = fa.scale(cs);
        mix.axpy(ct, &fb);
        let lhs = cauchy_transform(&mix, 0).unwrap();
        let mut rhs = cauchy_transform(&fa, 0).unwrap().scale(cs);
        rhs.axpy(ct, &cauchy_transform(&fb, 0).unwrap());
        let scale = lhs.sup_norm().max(1e-300);
        prop_assert!(lhs.sub(&rhs).sup_norm() <= 1e-12 * scale);
    }

    #[test]
    fn cfld_round_trip_is_exact(v in values(6 * 7 * 6 * 6), q in 0usize..=2) {
        let g = GridSpec::new(2, vec![6, 7, 6, 6], vec![(-1.0, 1.0), (-1.5, 1.0), (-1.0, 1.2), (-1.0, 1.0)]).unwrap();
        let mut w = QForm::new(&g, q).unwrap();
        for (i, j) in subsets(2, 2 - q).into_iter().enumerate() {
            let rot: Vec<C64> = v.iter().map(|z| z * C64::new(0.0, 1.0).powu(i as u32)).collect();
            w.insert(j, field(&g, rot)).unwrap();
        }
        let mut buf = Vec::new();
        write_cfld(&mut buf, &w).unwrap();
        let back = read_cfld(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(&back, &w);
        let mut again = Vec::new();
        write_cfld(&mut again, &back).unwrap();
        prop_assert_eq!(again, buf);
    }

    #[test]
    fn merging_ignores_input_order(pts in prop::collection::vec((-0.9f64..0.9, -0.9f64..0.9), 1..8), delta in 0.01f64..0.5, seed in any::<u64>()) {
        let centers: Vec<C64> = pts.iter().map(|&(a, b)| C64::new(a, b)).collect();
        let mut shuffled = centers.clone();
        // deterministic Fisher-Yates from the seed
        let mut s = seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a = merge_discs(&centers, delta, centers.len());
        let b = merge_discs(&shuffled, delta, centers.len());
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.center, y.center);
            prop_assert_eq!(x.radius, y.radius);
            let mut mx = x.members.clone();
            let mut my = y.members.clone();
            let key = |z: &C64| (z.re.to_bits(), z.im.to_bits());
            mx.sort_by_key(key);
            my.sort_by_key(key);
            prop_assert_eq!(mx, my);
        }
        prop_assert_eq!(a.iter().map(|d| d.members.len()).sum::<usize>(), centers.len());
    }

    #[test]
    fn merged_discs_are_disjoint(pts in prop::collection::vec((-0.9f64..0.9, -0.9f64..0.9), 1..8), delta in 0.01f64..0.5) {
        let centers: Vec<C64> = pts.iter().map(|&(a, b)| C64::new(a, b)).collect();
        let d = merge_discs(&centers, delta, centers.len());
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                prop_assert!((d[i].center - d[j].center).norm() > d[i].radius + d[j].radius);
            }
        }
    }

    #[test]
    fn concat_sign_is_antisymmetric(dim in 1usize..7, mask in any::<u8>()) {
        let a: Vec<usize> = (0..dim).filter(|i| mask >> i & 1 == 1).collect();
        let b = complement(&a, dim);
        let swap = if (a.len() * b.len()).is_multiple_of(2) { 1.0 } else { -1.0 };
        prop_assert_eq!(concat_sign(&a, &b), swap * concat_sign(&b, &a));
        prop_assert_eq!(pairing_sign(&a, dim), concat_sign(&b, &a));
    }

    #[test]
    fn ravel_inverts_unravel(n in 1usize..=3, r in 6usize..9, pick in any::<u32>()) {
        let g = GridSpec::uniform(n, r, 0.0).unwrap();
        let flat = pick as usize % g.len();
        let idx = g.unravel(flat);
        prop_assert_eq!(idx.len(), 2 * n);
        prop_assert_eq!(g.ravel(&idx), flat);
    }
}
