//! Random fields shared by the property tests and the acceptance harness.
#![allow(dead_code)]

use gcrf::big::BigSection;
use gcrf::domain::CoordinateDomain;
use gcrf::expr::ScalarExpr;
use gcrf::report::RunOptions;
use gcrf::tensor::{BivectorField, ExprMatrix, OneFormField, TwoFormField, VectorField};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

pub fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

pub fn quick(samples: usize) -> RunOptions {
    RunOptions { samples, timing: false, ..Default::default() }
}

fn coeff<R: Rng>(r: &mut R) -> f64 {
    // two decimals keep printed forms short and exactly re-parsable
    (r.gen_range(-150..=150) as f64) / 100.0
}

/// Random smooth expression built from coordinates, constants, `+ − ×`,
/// squares, `sin`, `cos` and a damped `exp`.
pub fn random_expr<R: Rng>(r: &mut R, m: usize, depth: usize) -> ScalarExpr {
    if depth == 0 || r.gen_bool(0.25) {
        return if r.gen_bool(0.7) { ScalarExpr::var(r.gen_range(0..m)) } else { ScalarExpr::constant(coeff(r)) };
    }
    let a = random_expr(r, m, depth - 1);
    match r.gen_range(0..7) {
        0 => a.add(&random_expr(r, m, depth - 1)),
        1 => a.sub(&random_expr(r, m, depth - 1)),
        2 | 3 => a.mul(&random_expr(r, m, depth - 1)),
        4 => a.sin(),
        5 => a.cos(),
        _ => a.mul(&ScalarExpr::constant(0.3)).exp(),
    }
}

/// Random polynomial with up to `terms` monomials of total degree ≤ `deg`.
pub fn random_poly<R: Rng>(r: &mut R, m: usize, deg: usize, terms: usize) -> ScalarExpr {
    let mut acc = ScalarExpr::zero();
    for _ in 0..r.gen_range(1..=terms) {
        let mut mono = ScalarExpr::constant(coeff(r));
        for _ in 0..r.gen_range(0..=deg) {
            mono = mono.mul(&ScalarExpr::var(r.gen_range(0..m)));
        }
        acc = acc.add(&mono);
    }
    acc
}

pub fn random_vector<R: Rng>(r: &mut R, m: usize) -> VectorField {
    VectorField((0..m).map(|_| random_expr(r, m, 2)).collect())
}

pub fn random_one_form<R: Rng>(r: &mut R, m: usize) -> OneFormField {
    OneFormField((0..m).map(|_| random_expr(r, m, 2)).collect())
}

pub fn random_two_form<R: Rng>(r: &mut R, m: usize) -> TwoFormField {
    let upper: Vec<Vec<ScalarExpr>> = (0..m).map(|_| (0..m).map(|_| random_expr(r, m, 2)).collect()).collect();
    TwoFormField(ExprMatrix::from_fn(m, m, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => upper[i][j].clone(),
        std::cmp::Ordering::Greater => upper[j][i].neg(),
        std::cmp::Ordering::Equal => ScalarExpr::zero(),
    }))
}

/// Real section with polynomial components.
pub fn random_poly_section<R: Rng>(r: &mut R, m: usize) -> BigSection {
    BigSection::real(
        VectorField((0..m).map(|_| random_poly(r, m, 2, 3)).collect()),
        OneFormField((0..m).map(|_| random_poly(r, m, 2, 3)).collect()),
    )
}

/// Linear bivector `P^{ij} = c^{ij}_k x^k` from antisymmetric coefficients.
pub fn linear_bivector(m: usize, c: &dyn Fn(usize, usize, usize) -> f64) -> BivectorField {
    BivectorField(ExprMatrix::from_fn(m, m, |i, j| {
        let mut acc = ScalarExpr::zero();
        for k in 0..m {
            let v = c(i, j, k);
            if v != 0.0 {
                acc = acc.add(&ScalarExpr::var(k).mul(&ScalarExpr::constant(v)));
            }
        }
        acc
    }))
}

pub fn points(domain: &CoordinateDomain, seed: u64, count: usize) -> Vec<Vec<f64>> {
    let mut s = domain.sampler(seed);
    (0..count).map(|_| s.next_point()).collect()
}

/// Proptest strategy mirroring [`random_expr`].
pub fn expr_strategy(m: usize) -> impl Strategy<Value = ScalarExpr> {
    let leaf = prop_oneof![
        (0..m).prop_map(ScalarExpr::var),
        (-150i32..=150).prop_map(|c| ScalarExpr::constant(c as f64 / 100.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            inner.prop_map(|a| a.mul(&ScalarExpr::constant(0.3)).exp()),
        ]
    })
}

pub fn point_strategy(m: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, m)
}

/// Five-point central difference of `f` along coordinate `i`.
pub fn five_point(f: &dyn Fn(&[f64]) -> f64, p: &[f64], i: usize, h: f64) -> f64 {
    let at = |s: f64| {
        let mut q = p.to_vec();
        q[i] += s;
        f(&q)
    };
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

/// Every metric carried by a catalog fixture, with its domain.
pub fn catalog_metrics() -> Vec<(String, gcrf::tensor::MetricField, CoordinateDomain)> {
    let mut out = Vec::new();
    for name in gcrf::catalog::list() {
        let def = gcrf::catalog::get(name).unwrap().definition;
        if let Some(g) = &def.metric {
            out.push((name.to_string(), g.gamma.clone(), def.domain.clone()));
        }
        if let Some(s) = &def.sasaki {
            out.push((format!("{name} (record metric)"), s.plus.gamma.clone(), def.domain.clone()));
        }
    }
    out
}

/// Catalog fixtures carrying a generalized F-structure.
pub fn catalog_structures() -> Vec<(&'static str, gcrf::genstruct::GeneralizedF)> {
    gcrf::catalog::list()
        .into_iter()
        .filter_map(|n| gcrf::catalog::get(n).unwrap().definition.phi.map(|p| (n, p)))
        .collect()
}

pub fn eval_vec(v: &[ScalarExpr], p: &[f64]) -> Vec<f64> {
    v.iter().map(|e| gcrf::expr::eval_value(e, p).unwrap()).collect()
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a, b| a.max(b.abs()))
}

pub fn parse_rows(rows: &[&[&str]], m: usize) -> ExprMatrix {
    ExprMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| gcrf::expr::parse_expr(s, m).unwrap()).collect()).collect())
}

/// Random constant orthogonal matrix.
pub fn random_orthogonal<R: Rng>(r: &mut R, m: usize) -> nalgebra::DMatrix<f64> {
    let a = nalgebra::DMatrix::from_fn(m, m, |_, _| r.gen_range(-1.0..1.0));
    a.qr().q()
}

/// Random compatible quadruple `(γ, ψ, F₊, F₋)` on the cube: `γ = CᵀC` for a
/// unipotent polynomial `C`, and `F± = C⁻¹ Q± K± Q±ᵀ C` with `K±` a block
/// rotation of the given rank, so each `F±` is `γ`-skew with `F³ + F = 0`.
pub fn random_quadruple<R: Rng>(r: &mut R, m: usize, ranks: (usize, usize)) -> gcrf::genmetric::MetricQuadruple {
    use gcrf::tensor::{EndField, MetricField};
    let c = ExprMatrix::from_fn(m, m, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => random_poly(r, m, 1, 2).mul(&ScalarExpr::constant(0.5)),
        std::cmp::Ordering::Equal => ScalarExpr::one(),
        std::cmp::Ordering::Greater => ScalarExpr::zero(),
    });
    let cinv = c.inverse();
    let gamma = MetricField(c.transpose().matmul(&c));
    let mut f_of_rank = |rank: usize| {
        let q = random_orthogonal(r, m);
        let mut k = nalgebra::DMatrix::zeros(m, m);
        for b in 0..rank / 2 {
            k[(2 * b + 1, 2 * b)] = 1.0;
            k[(2 * b, 2 * b + 1)] = -1.0;
        }
        let j0 = ExprMatrix::from_constants(&(&q * k * q.transpose()));
        EndField(cinv.matmul(&j0).matmul(&c))
    };
    let fp = f_of_rank(ranks.0);
    let fm = f_of_rank(ranks.1);
    let psi = TwoFormField(ExprMatrix::from_fn(m, m, |_, _| ScalarExpr::zero()));
    let upper = ExprMatrix::from_fn(m, m, |i, j| if i < j { random_poly(r, m, 1, 2).mul(&ScalarExpr::constant(0.5)) } else { ScalarExpr::zero() });
    let psi = TwoFormField(psi.0.add(&upper).sub(&upper.transpose()));
    gcrf::genmetric::MetricQuadruple { gamma, psi, fp, fm, domain: CoordinateDomain::cube(m, -1.0, 1.0) }
}

/// Catalog fixtures carrying both a generalized F-structure and a metric.
pub fn catalog_metric_structures() -> Vec<(&'static str, gcrf::genmetric::GeneralizedMetric, gcrf::genstruct::GeneralizedF)> {
    gcrf::catalog::list()
        .into_iter()
        .filter_map(|n| {
            let d = gcrf::catalog::get(n).unwrap().definition;
            match (d.metric, d.phi) {
                (Some(g), Some(p)) => Some((n, g, p)),
                _ => None,
            }
        })
        .collect()
}

/// Jacobiator `{x_i,{x_j,x_k}} + cyc` of a bivector evaluated with central
/// differences of its numeric values only.
pub fn jacobiator_fd(p_field: &BivectorField, at: &[f64]) -> f64 {
    let m = at.len();
    let val = |q: &[f64]| p_field.0.eval_values(q).unwrap();
    let h = 1e-4;
    let dp: Vec<nalgebra::DMatrix<f64>> = (0..m)
        .map(|l| {
            let mut a = at.to_vec();
            let mut b = at.to_vec();
            a[l] += h;
            b[l] -= h;
            (val(&a) - val(&b)) / (2.0 * h)
        })
        .collect();
    let p0 = val(at);
    let inner = |i: usize, j: usize, k: usize| (0..m).map(|l| p0[(i, l)] * dp[l][(j, k)]).sum::<f64>();
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                worst = worst.max((inner(i, j, k) + inner(j, k, i) + inner(k, i, j)).abs());
            }
        }
    }
    worst
}

pub fn schouten_sup(p_field: &BivectorField, at: &[f64]) -> f64 {
    let s = gcrf::tensor::schouten_bracket(p_field, p_field);
    gcrf::contact::three_form_matrix(&gcrf::tensor::ThreeForm(s.0)).eval_values(at).unwrap().amax()
}

/// Structure constants of a Lie algebra moved to a random basis.
pub fn lie_poisson(c: &dyn Fn(usize, usize, usize) -> f64, m: usize, r: &mut impl rand::Rng) -> BivectorField {
    let basis = nalgebra::DMatrix::from_fn(m, m, |i, j| if i == j { 2.0 } else { 0.0 } + r.gen_range(-0.5..0.5));
    let inv = basis.clone().try_inverse().unwrap();
    let coeff = |a: usize, b: usize, k: usize| {
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    s += basis[(a, i)] * basis[(b, j)] * c(i, j, l) * inv[(l, k)];
                }
            }
        }
        s
    };
    linear_bivector(m, &coeff)
}

pub fn so3(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (1, 0, 2) | (2, 1, 0) | (0, 2, 1) => -1.0,
        _ => 0.0,
    }
}

pub fn sl2(i: usize, j: usize, k: usize) -> f64 {
    // [h,e]=2e, [h,f]=−2f, [e,f]=h
    match (i, j, k) {
        (0, 1, 1) => 2.0,
        (1, 0, 1) => -2.0,
        (0, 2, 2) => -2.0,
        (2, 0, 2) => 2.0,
        (1, 2, 0) => 1.0,
        (2, 1, 0) => -1.0,
        _ => 0.0,
    }
}

/// Five Lie–Poisson bivectors on R³ and five generic linear ones, tagged
/// with whether they are Poisson.
pub fn bivector_cases(seed: u64) -> Vec<(BivectorField, bool)> {
    let mut r = rng(seed);
    let mut cases: Vec<(BivectorField, bool)> = vec![];
    for (c, count) in [(so3 as fn(usize, usize, usize) -> f64, 3), (sl2, 2)] {
        for _ in 0..count {
            cases.push((lie_poisson(&c, 3, &mut r), true));
        }
    }
    for _ in 0..5 {
        let table: Vec<f64> = (0..27).map(|_| r.gen_range(-1.0..1.0)).collect();
        let c = move |i: usize, j: usize, k: usize| match i.cmp(&j) {
            std::cmp::Ordering::Less => table[(i * 3 + j) * 3 + k],
            std::cmp::Ordering::Greater => -table[(j * 3 + i) * 3 + k],
            _ => 0.0,
        };
        cases.push((linear_bivector(3, &c), false));
    }
    cases
}
