use proptest::prelude::*;

use pqkt::algebra::{project_2form_type, TypePart, EPS};
use pqkt::catalog;
use pqkt::conformal::{conformal_point, rescale, transport_checks};
use pqkt::frame::{build_adapted_frame, PIVOT};
use pqkt::jet::JetSpace;
use pqkt::poly::PolyField;
use pqkt::report::format_f64;
use pqkt::structures::{nijenhuis, verify_algebra, ParaHermitianStructure};
use pqkt::tensor::{Real, Tensor};

const D: usize = 8;

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.5..0.5f64, D)
}

fn model() -> impl Strategy<Value = ParaHermitianStructure> {
    (0u64..1000, 0..3usize).prop_map(|(seed, k)| match k {
        0 => catalog::pushforward_model(2, seed),
        1 => catalog::frame_deformed_model(2, seed),
        _ => catalog::quadratic_conformal(2),
    })
}

fn poly(d: usize) -> impl Strategy<Value = PolyField> {
    prop::collection::vec((prop::collection::vec(0u32..=1, d), -1.0..1.0f64), 1..6).prop_map(move |terms| {
        let mut p = PolyField::zero(d);
        for (mut e, c) in terms {
            // allow one squared variable
            e[0] += e[1];
            p.add_term(e, c);
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn jets_match_finite_differences(p in poly(4), x in prop::collection::vec(-0.5..0.5f64, 4)) {
        let space = JetSpace::new(4, 2).unwrap();
        let jet = p.eval_jet(&space, &x, 2).unwrap();
        prop_assert!((jet.value() - p.eval(&x)).abs() < 1e-12);
        let h = 1e-4;
        let shift = |i: usize, s: f64| {
            let mut y = x.clone();
            y[i] += s;
            y
        };
        for i in 0..4 {
            let fd = (p.eval(&shift(i, h)) - p.eval(&shift(i, -h))) / (2.0 * h);
            prop_assert!((jet.gradient()[i] - fd).abs() < 1e-6);
            let fd2 = (p.eval(&shift(i, h)) - 2.0 * p.eval(&x) + p.eval(&shift(i, -h))) / (h * h);
            let mut e = [0u8; 4];
            e[i] = 2;
            prop_assert!((jet.derivative(&e) - fd2).abs() < 1e-5);
        }
    }

    #[test]
    fn type_projections_split_and_are_idempotent(v in prop::collection::vec(-1.0..1.0f64, D * D * D), a in 0..3usize) {
        let (_, j) = pqkt::structures::flat_data(2);
        let raw = Tensor::from_vec(D, 3, v);
        let p = raw.sub(&raw.swap(0, 1));
        let parts: Vec<Real> = [TypePart::P11, TypePart::P20, TypePart::P02]
            .iter()
            .map(|&t| project_2form_type(&p, &j[a], EPS[a], t))
            .collect();
        let sum = parts[0].add(&parts[1]).add(&parts[2]);
        prop_assert!(sum.max_abs_diff(&p) < 1e-12);
        for (part, t) in parts.iter().zip([TypePart::P11, TypePart::P20, TypePart::P02]) {
            prop_assert!(project_2form_type(part, &j[a], EPS[a], t).max_abs_diff(part) < 1e-12);
        }
    }

    #[test]
    fn adapted_frames_are_orthonormal(m in model(), x in point(), seed in 0u64..100) {
        let space = JetSpace::new(D, 1).unwrap();
        let s = m.jets(&space, &x, 1).unwrap();
        let (g, j) = (s.g_val(), s.j_val());
        let f = build_adapted_frame(&g, &j, PIVOT, seed).unwrap();
        prop_assert!(f.gram_residual(&g) < 1e-10);
        prop_assert!(f.adapted_residual(&j) < 1e-10);
    }

    #[test]
    fn frame_trace_is_the_metric_trace(m in model(), x in point(), v in prop::collection::vec(-1.0..1.0f64, D * D * D)) {
        let space = JetSpace::new(D, 1).unwrap();
        let s = m.jets(&space, &x, 1).unwrap();
        let f = build_adapted_frame(&s.g_val(), &s.j_val(), PIVOT, 1).unwrap();
        let t = Tensor::from_vec(D, 3, v);
        let coord = t.trace(0, 2, &s.ginv_val());
        prop_assert!(f.trace(&t, 0, 2).max_abs_diff(&coord) < 1e-10);
    }

    #[test]
    fn structure_algebra_holds_pointwise(m in model(), x in point()) {
        let space = JetSpace::new(D, 1).unwrap();
        let s = m.jets(&space, &x, 1).unwrap();
        for (id, r) in verify_algebra(&s.g_val(), &s.j_val()) {
            prop_assert!(r < 1e-12, "{} {:e}", id, r);
        }
    }

    #[test]
    fn nijenhuis_tensor_is_skew(m in model(), x in point()) {
        let space = JetSpace::new(D, 1).unwrap();
        let s = m.jets(&space, &x, 1).unwrap();
        let (j, dj) = (s.j_val(), s.dj_val().unwrap());
        for a in 0..3 {
            let n = nijenhuis(&j[a], &dj[a]);
            prop_assert!(n.add(&n.swap(0, 1)).max_abs() < 1e-13);
        }
    }

    #[test]
    fn transport_laws_hold_for_random_factors(c in prop::collection::vec(-0.1..0.1f64, 6), x in point()) {
        let mut f = PolyField::constant(D, 1.0);
        let mono = |idx: &[usize]| {
            let mut e = vec![0u32; D];
            for &i in idx {
                e[i] += 1;
            }
            e
        };
        f.add_term(mono(&[0]), c[0]);
        f.add_term(mono(&[5]), c[1]);
        f.add_term(mono(&[1, 2]), c[2]);
        f.add_term(mono(&[3, 3]), c[3]);
        f.add_term(mono(&[4, 7]), c[4]);
        f.add_term(mono(&[6]), c[5]);
        let m = rescale(&catalog::flat_model(2), f);
        let space = JetSpace::new(D, 2).unwrap();
        let cp = conformal_point(&m, &space, &x, 2).unwrap().unwrap();
        for ch in transport_checks(&cp).unwrap() {
            prop_assert!(ch.value.max_abs() < 1e-12, "{} {:e}", ch.id, ch.value.max_abs());
        }
    }

    #[test]
    fn report_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let s = format_f64(x);
        let back: f64 = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, x);
    }
}
