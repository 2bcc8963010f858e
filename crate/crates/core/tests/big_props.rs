mod common;

use common::*;
use gcrf::big::{check_axiom_v, courant_bracket, pairing_g, BigSection};
use gcrf::domain::CoordinateDomain;
use gcrf::jet::C64;
use gcrf::tensor::{lie_bracket, OneFormField, VectorField};
use proptest::prelude::*;

fn section(m: usize) -> impl Strategy<Value = BigSection> {
    (proptest::collection::vec(expr_strategy(m), m), proptest::collection::vec(expr_strategy(m), m))
        .prop_map(|(x, a)| BigSection::real(VectorField(x), OneFormField(a)))
}

fn complex_section(m: usize) -> impl Strategy<Value = BigSection> {
    (section(m), section(m)).prop_map(|(re, im)| BigSection::complex(re.x_re, im.x_re, re.a_re, im.a_re))
}

#[test]
fn axiom_v_holds_on_random_polynomial_triples() {
    let mut r = rng(2024);
    for trial in 0..50 {
        let m = 2 + trial % 3;
        let domain = CoordinateDomain::cube(m, -1.0, 1.0);
        let (a, b, c) = (random_poly_section(&mut r, m), random_poly_section(&mut r, m), random_poly_section(&mut r, m));
        let res = check_axiom_v(&a, &b, &c, &points(&domain, trial as u64, 10)).unwrap();
        assert!(res < 1e-9, "trial {trial}: residual {res:e}");
    }
}

#[test]
fn axiom_v_collapses_for_equal_and_constant_sections() {
    let domain = CoordinateDomain::cube(3, -1.0, 1.0);
    let pts = points(&domain, 1, 10);
    let mut r = rng(5);
    let a = random_poly_section(&mut r, 3);
    assert!(check_axiom_v(&a, &a, &a, &pts).unwrap() < 1e-12);
    let (e0, e4) = (BigSection::basis(3, 0), BigSection::basis(3, 4));
    assert_eq!(check_axiom_v(&e0, &e4, &e0, &pts).unwrap(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bracket_is_complex_bilinear(a in complex_section(3), b in complex_section(3), re in -2.0f64..2.0, im in -2.0f64..2.0, p in point_strategy(3)) {
        let z = C64::new(re, im);
        let lhs = courant_bracket(&a.scale_c(z), &b).jet(&p).unwrap().val;
        let rhs = courant_bracket(&a, &b).jet(&p).unwrap().val * z;
        let scale = rhs.iter().map(|v| v.norm()).fold(1.0, f64::max);
        prop_assert!((lhs - rhs).iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-12 * scale);
    }

    #[test]
    fn anchor_of_bracket_is_lie_bracket(a in section(3), b in section(3), p in point_strategy(3)) {
        let br = courant_bracket(&a, &b);
        let lie = lie_bracket(&a.x_re, &b.x_re);
        for (u, v) in eval_vec(&br.x_re.0, &p).iter().zip(eval_vec(&lie.0, &p)) {
            prop_assert_eq!(*u, v);
        }
    }

    #[test]
    fn bracket_is_antisymmetric(a in section(3), b in section(3), p in point_strategy(3)) {
        let s = courant_bracket(&a, &b).add(&courant_bracket(&b, &a)).jet(&p).unwrap().val;
        prop_assert!(s.iter().map(|v| v.norm()).fold(0.0, f64::max) < 1e-10);
    }

    #[test]
    fn pairing_is_symmetric(a in complex_section(3), b in complex_section(3), p in point_strategy(3)) {
        let d = pairing_g(&a, &b, &p).unwrap() - pairing_g(&b, &a, &p).unwrap();
        prop_assert!(d.norm() < 1e-12);
    }

    #[test]
    fn axiom_v_on_random_smooth_sections(a in section(3), b in section(3), c in section(3), p in point_strategy(3)) {
        let res = check_axiom_v(&a, &b, &c, &[p]).unwrap();
        prop_assert!(res < 1e-9, "residual {res:e}");
    }
}

#[test]
fn bracket_of_function_multiple_obeys_anchor_rule() {
    // [A, fB] = f[A,B] + (Xf)B − g(A,B) df
    let m = 3;
    let mut r = rng(99);
    let domain = CoordinateDomain::cube(m, -1.0, 1.0);
    for p in points(&domain, 8, 10) {
        let a = random_poly_section(&mut r, m);
        let b = random_poly_section(&mut r, m);
        let f = random_expr(&mut r, m, 3);
        let lhs = courant_bracket(&a, &b.scale(&f)).jet(&p).unwrap().val;
        let xf = gcrf::tensor::pair(&gcrf::tensor::differential(&f, m), &a.x_re);
        let fv = gcrf::expr::eval_value(&f, &p).unwrap();
        let xfv = gcrf::expr::eval_value(&xf, &p).unwrap();
        let gab = pairing_g(&a, &b, &p).unwrap();
        let df = BigSection::real(VectorField::zeros(m), gcrf::tensor::differential(&f, m)).jet(&p).unwrap().val;
        let rhs = courant_bracket(&a, &b).jet(&p).unwrap().val * C64::new(fv, 0.0)
            + b.jet(&p).unwrap().val * C64::new(xfv, 0.0)
            - df * gab;
        let err = (lhs - rhs).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err:e}");
    }
}
