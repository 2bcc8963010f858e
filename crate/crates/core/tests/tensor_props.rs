mod common;

use common::*;
use gcrf::contact::three_form_matrix;
use gcrf::domain::CoordinateDomain;
use gcrf::expr::ScalarExpr;
use gcrf::tensor::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn fields(m: usize) -> impl Strategy<Value = Vec<ScalarExpr>> {
    proptest::collection::vec(expr_strategy(m), m)
}

fn two_form_from(entries: Vec<ScalarExpr>, m: usize) -> TwoFormField {
    let mut it = entries.into_iter();
    let mut t = ExprMatrix::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let e = it.next().unwrap();
            t[(j, i)] = e.neg();
            t[(i, j)] = e;
        }
    }
    TwoFormField(t)
}

fn sup(m: &ExprMatrix, p: &[f64]) -> f64 {
    m.eval_values(p).unwrap().amax()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn d_squared_vanishes(f in expr_strategy(3), a in fields(3), p in point_strategy(3)) {
        let ddf = exterior_derivative(&differential(&f, 3));
        prop_assert!(sup(&ddf.0, &p) < 1e-10);
        let dda = exterior_derivative(&exterior_derivative(&OneFormField(a)));
        prop_assert!(sup(&three_form_matrix(&dda), &p) < 1e-10);
    }

    #[test]
    fn cartan_formula_on_one_forms(x in fields(3), a in fields(3), p in point_strategy(3)) {
        let (x, a) = (VectorField(x), OneFormField(a));
        let lhs = lie_derivative(&x, &a);
        let rhs = interior_product(&x, &exterior_derivative(&a)).add(&differential(&pair(&a, &x), 3));
        let diff = eval_vec(&lhs.sub(&rhs).0, &p);
        prop_assert!(max_abs(diff) < 1e-10);
    }

    #[test]
    fn cartan_formula_on_two_forms(x in fields(3), t in fields(3), p in point_strategy(3)) {
        let (x, t) = (VectorField(x), two_form_from(t, 3));
        let lhs = lie_derivative(&x, &t);
        let rhs = interior_product(&x, &exterior_derivative(&t)).add(&exterior_derivative(&interior_product(&x, &t)));
        prop_assert!(sup(&lhs.sub(&rhs).0, &p) < 1e-10);
    }

    #[test]
    fn lie_bracket_is_antisymmetric_and_matches_derivation(x in fields(3), y in fields(3), f in expr_strategy(3), p in point_strategy(3)) {
        let (x, y) = (VectorField(x), VectorField(y));
        let xy = lie_bracket(&x, &y);
        let yx = lie_bracket(&y, &x);
        prop_assert!(max_abs(eval_vec(&xy.add(&yx).0, &p)) < 1e-10);
        // [X,Y]f = X(Yf) − Y(Xf)
        let df = differential(&f, 3);
        let yf = pair(&df, &y);
        let xf = pair(&df, &x);
        let lhs = pair(&df, &xy);
        let rhs = pair(&differential(&yf, 3), &x).sub(&pair(&differential(&xf, 3), &y));
        prop_assert!(max_abs(eval_vec(&[lhs.sub(&rhs)], &p)) < 1e-9);
    }
}

#[test]
fn schouten_vanishes_exactly_when_the_jacobiator_does() {
    let domain = CoordinateDomain::cube(3, -1.0, 1.0);
    let pts = points(&domain, 3, 20);
    for (p_field, poisson) in bivector_cases(7) {
        let s = pts.iter().map(|q| schouten_sup(&p_field, q)).fold(0.0, f64::max);
        let j = pts.iter().map(|q| jacobiator_fd(&p_field, q)).fold(0.0, f64::max);
        assert_eq!(s < 1e-10, j < 1e-7, "schouten {s:e} vs jacobiator {j:e}");
        assert_eq!(s < 1e-10, poisson);
    }
}

#[test]
fn christoffel_symbols_are_symmetric_and_metric_for_catalog_metrics() {
    for (name, gamma, domain) in catalog_metrics() {
        let conn = levi_civita(&gamma);
        let ng = conn.covariant_derivative_metric();
        for p in points(&domain, 11, 30) {
            for k in 0..domain.dim {
                let ch = conn.christoffel[k].eval_values(&p).unwrap();
                assert!((&ch - ch.transpose()).amax() < 1e-12, "{name}");
                assert!(ng[k].eval_values(&p).unwrap().amax() < 1e-9, "{name}: ∇γ ≠ 0 at {p:?}");
            }
        }
    }
}

#[test]
fn covariant_derivative_of_constant_f_vanishes_for_euclidean_metric() {
    let f = EndField(ExprMatrix::from_constants(&DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])));
    let conn = levi_civita(&MetricField::euclidean(2));
    for nf in covariant_derivative_end(&conn, &f) {
        assert!(nf.0.is_structurally_zero());
    }
}

/// `(∇_Z F)Y = ∇_Z(FY) − F∇_Z Y` with the right-hand side from finite
/// differences along the curve `p + sZ`.
#[test]
fn covariant_derivative_obeys_leibniz_along_curves() {
    let m = 3;
    let mut r = rng(19);
    let gamma = MetricField(
        common::parse_rows(&[&["exp(0.4*x3)", "0", "0"], &["0", "1 + 0.25*x1^2", "0.1*x2"], &["0", "0.1*x2", "2"]], m),
    );
    let conn = levi_civita(&gamma);
    let domain = CoordinateDomain::cube(m, -1.0, 1.0);
    for p in points(&domain, 5, 10) {
        let f = EndField(ExprMatrix::from_fn(m, m, |_, _| random_poly(&mut r, m, 2, 2)));
        let y = VectorField((0..m).map(|_| random_poly(&mut r, m, 2, 2)).collect());
        let z: Vec<f64> = (0..m).map(|_| r.gen_range(-1.0..1.0)).collect();
            let nf: Vec<DMatrix<f64>> = covariant_derivative_end(&conn, &f).iter().map(|e| e.0.eval_values(&p).unwrap()).collect();
        let yv = DMatrix::from_vec(m, 1, eval_vec(&y.0, &p));
        let lhs = (0..m).fold(DMatrix::zeros(m, 1), |acc, k| acc + &nf[k] * &yv * z[k]);

        let fy = f.apply(&y);
        let along = |v: &VectorField| {
            let h = 1e-4;
            let shifted = |s: f64| {
                let q: Vec<f64> = p.iter().zip(&z).map(|(a, b)| a + s * b).collect();
                DMatrix::from_vec(m, 1, eval_vec(&v.0, &q))
            };
            let deriv = (shifted(h) - shifted(-h)) / (2.0 * h);
            let chr: Vec<DMatrix<f64>> = conn.christoffel.iter().map(|c| c.eval_values(&p).unwrap()).collect();
            let val = shifted(0.0);
            let conn_term = DMatrix::from_fn(m, 1, |i, _| {
                (0..m).map(|k| (0..m).map(|l| chr[i][(k, l)] * z[k] * val[(l, 0)]).sum::<f64>()).sum()
            });
            deriv + conn_term
        };
        let fp = f.0.eval_values(&p).unwrap();
        let rhs = along(&fy) - fp * along(&y);
        let err = (&lhs - &rhs).amax() / lhs.amax().max(1.0);
        assert!(err < 1e-5, "relative error {err:e}");
    }
}
