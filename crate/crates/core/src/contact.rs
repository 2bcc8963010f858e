//! Almost contact metric structures, their product lifts to `M × R`, the
//! cosymplectic criterion and generalized Sasakian conditions.

use crate::domain::CoordinateDomain;
use crate::expr::ScalarExpr;
use crate::genmetric::MetricQuadruple;
use crate::genstruct::{precheck, AlmostContact, StructError};
use crate::jet::sup_norm;
use crate::report::{combine, run_sampled, CheckError, CheckReport, RunOptions};
use crate::tensor::{
    exterior_derivative, interior_product, pullback_three, pullback_two, wedge_one_two, BivectorField, EndField,
    ExprMatrix, LieDerivative, MetricField, OneFormField, ThreeForm, TwoFormField, VectorField,
};

/// Sign in front of `i(Z)[ξ ∧ d(L_Z Ψ)ᶜ]` in the dψ condition, as obtained
/// from the two pieces of the product condition it is built from.
pub const DPSI_CONDITION_SIGN: f64 = 1.0;

#[derive(Clone, Debug)]
pub struct AlmostContactMetric {
    pub f: EndField,
    pub z: VectorField,
    pub xi: OneFormField,
    pub gamma: MetricField,
    pub domain: CoordinateDomain,
}

/// Which metric the product carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductMetric {
    /// `e^t(γ + dt²)`.
    Conformal,
    /// `γ + dt²`.
    Plain,
}

/// Almost Hermitian data on `M × R`, the last coordinate being `t`.
#[derive(Clone, Debug)]
pub struct ProductLift {
    pub j: EndField,
    pub gamma: MetricField,
    pub omega: TwoFormField,
    pub domain: CoordinateDomain,
}

impl AlmostContactMetric {
    pub fn new(f: EndField, z: VectorField, xi: OneFormField, gamma: MetricField, domain: CoordinateDomain) -> Result<Self, StructError> {
        let s = AlmostContactMetric { f, z, xi, gamma, domain };
        s.validate()?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    /// Metric compatibility plus the almost contact identities.
    pub fn validate(&self) -> Result<(), StructError> {
        let m = self.dim();
        if self.f.dim() != m || self.z.dim() != m || self.xi.dim() != m || self.gamma.dim() != m {
            return Err(StructError::Shape(format!("almost contact metric data must have dimension {m}")));
        }
        self.as_almost_contact().validate()?;
        let f = &self.f.0;
        let g = &self.gamma.0;
        let zc = ExprMatrix::column_vector(&self.z.0);
        let xc = ExprMatrix::column_vector(&self.xi.0);
        let checks = [
            ("γ(FX,FY)=γ(X,Y)−ξ(X)ξ(Y)", f.transpose().matmul(g).matmul(f).sub(g).add(&xc.matmul(&xc.transpose()))),
            ("ξ=♭γZ", g.matmul(&zc).sub(&xc)),
        ];
        for (name, mat) in checks {
            precheck(&self.domain, name, &mat.compile(), |j| j.val.clone())?;
        }
        Ok(())
    }

    /// The same data as `(P, θ, F, Z, ξ)` with `P = 0`, `θ = 0`.
    pub fn as_almost_contact(&self) -> AlmostContact {
        let m = self.dim();
        AlmostContact {
            p: BivectorField::zeros(m),
            theta: TwoFormField::zeros(m),
            f: self.f.clone(),
            z: vec![self.z.clone()],
            xi: vec![self.xi.clone()],
            domain: self.domain.clone(),
        }
    }

    /// `Ξ(X,Y) = γ(FX, Y)`.
    pub fn fundamental_form(&self) -> TwoFormField {
        TwoFormField(self.f.0.transpose().matmul(&self.gamma.0))
    }

    pub fn check_normality(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        self.as_almost_contact().check_normality(opts)
    }

    /// `J = F + dt⊗Z − ξ⊗∂t`, `Γ = e^t(γ + dt²)` and `ω = e^t(Ξ − ξ∧dt)`.
    pub fn product_lift(&self) -> ProductLift {
        self.lift_with(1.0, ProductMetric::Conformal)
    }

    /// `J = F + s(dt⊗Z − ξ⊗∂t)` with the chosen product metric; `ω` is the
    /// Kähler form `Γ(J·,·)`.
    pub fn lift_with(&self, s: f64, metric: ProductMetric) -> ProductLift {
        let m = self.dim();
        let n = m + 1;
        let sc = ScalarExpr::constant(s);
        let j = ExprMatrix::from_fn(n, n, |i, k| match (i < m, k < m) {
            (true, true) => self.f.0[(i, k)].clone(),
            (true, false) => self.z.0[i].mul(&sc),
            (false, true) => self.xi.0[k].mul(&sc).neg(),
            (false, false) => ScalarExpr::zero(),
        });
        let factor = match metric {
            ProductMetric::Conformal => ScalarExpr::var(m).exp(),
            ProductMetric::Plain => ScalarExpr::one(),
        };
        let gamma = ExprMatrix::from_fn(n, n, |i, k| match (i < m, k < m) {
            (true, true) => self.gamma.0[(i, k)].clone(),
            _ if i == k => ScalarExpr::one(),
            _ => ScalarExpr::zero(),
        })
        .scale(&factor);
        let omega = j.transpose().matmul(&gamma);
        ProductLift { j: EndField(j), gamma: MetricField(gamma), omega: TwoFormField(omega), domain: self.domain.with_factors(1) }
    }

    /// `dξ = 0`, `dΞ = 0` and normality.
    pub fn check_cosymplectic(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let dxi = exterior_derivative(&self.xi).0.compile();
        let dfund = three_form_matrix(&exterior_derivative(&self.fundamental_form())).compile();
        let a = run_sampled("dxi", &self.domain, opts, |p| Ok(sup_norm(&dxi.eval(p)?.val)))?;
        let b = run_sampled("dfundamental", &self.domain, opts, |p| Ok(sup_norm(&dfund.eval(p)?.val)))?;
        let c = self.check_normality(opts)?;
        Ok(combine("cosymplectic", &[a, b, c]))
    }

    /// The same criterion read on `M × R` with `Γ̄ = γ + dt²`: the lifts
    /// `J± = F ∓ (dt⊗Z − ξ⊗∂t)` must form a generalized Kähler pair with `ψ = 0`.
    pub fn check_cosymplectic_product(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let plus = self.lift_with(-1.0, ProductMetric::Plain);
        let minus = self.lift_with(1.0, ProductMetric::Plain);
        let q = MetricQuadruple {
            gamma: plus.gamma,
            psi: TwoFormField::zeros(self.dim() + 1),
            fp: plus.j,
            fm: minus.j,
            domain: plus.domain,
        };
        let mut r = combine("cosymplectic-product", &[q.check_invariants(opts)?, q.check_gualtieri_kahler(opts)?]);
        r.check = "cosymplectic-product".into();
        Ok(r)
    }
}

/// Three-form components laid out as an `n × n²` matrix for compilation.
pub fn three_form_matrix(w: &ThreeForm) -> ExprMatrix {
    let n = w.0.n;
    ExprMatrix::from_fn(n, n * n, |i, jk| w.0.get(i, jk / n, jk % n).clone())
}

/// Two almost contact metric records sharing `γ`, and the forms `ψ`, `κ`.
#[derive(Clone, Debug)]
pub struct SasakiInput {
    pub plus: AlmostContactMetric,
    pub minus: AlmostContactMetric,
    pub psi: TwoFormField,
    pub kappa: OneFormField,
}

/// Direct conditions on `M` and the generalized Kähler conditions on `M × R`.
#[derive(Clone, Debug)]
pub struct SasakiReport {
    pub direct: CheckReport,
    pub product: CheckReport,
}

impl SasakiReport {
    pub fn agree(&self) -> bool {
        self.direct.pass == self.product.pass
    }

    pub fn combined(&self) -> CheckReport {
        let mut r = combine("generalized-sasakian", &[self.direct.clone(), self.product.clone()]);
        r.pass = r.pass && self.agree();
        r
    }
}

impl SasakiInput {
    pub fn new(plus: AlmostContactMetric, minus: AlmostContactMetric, psi: TwoFormField, kappa: OneFormField) -> Result<Self, StructError> {
        let m = plus.dim();
        if minus.dim() != m || psi.dim() != m || kappa.dim() != m {
            return Err(StructError::Shape(format!("Sasaki data must have dimension {m}")));
        }
        precheck(&plus.domain, "shared metric", &plus.gamma.0.sub(&minus.gamma.0).compile(), |j| j.val.clone())?;
        Ok(SasakiInput { plus, minus, psi, kappa })
    }

    /// `ψ + dκ`.
    pub fn psi_total(&self) -> TwoFormField {
        self.psi.add(&exterior_derivative(&self.kappa))
    }

    /// Residual matrices of the four direct conditions for one record.
    fn direct_terms(&self, acm: &AlmostContactMetric, sign: f64) -> Vec<(String, ExprMatrix)> {
        let total = self.psi_total();
        let z = &acm.z;
        let f = &acm.f;
        let lie_c = pullback_two(&total.lie(z), f);
        let first = interior_product(z, &total);
        let second = pullback_two(&total, f).add(&lie_c.lie(z));
        // i(Z)(ξ∧w) = w − ξ∧i(Z)w for a three-form w
        let w = exterior_derivative(&lie_c);
        let contracted = w.sub(&wedge_one_two(&acm.xi, &interior_product(z, &w)));
        let third = pullback_three(&exterior_derivative(&self.psi), f)
            .sub(&contracted.scale(&ScalarExpr::constant(DPSI_CONDITION_SIGN)));
        let fourth = acm
            .fundamental_form()
            .sub(&exterior_derivative(&acm.xi))
            .add(&lie_c.scale(&ScalarExpr::constant(sign)));
        let tag = if sign > 0.0 { "+" } else { "-" };
        vec![
            (format!("i(Z)Ψ=0{tag}"), ExprMatrix::column_vector(&first.0)),
            (format!("Ψᶜ=−L_Z(L_ZΨ)ᶜ{tag}"), second.0),
            (format!("dψᶜ{tag}"), three_form_matrix(&third)),
            (format!("Ξ=dξ∓(L_ZΨ)ᶜ{tag}"), fourth.0),
        ]
    }

    /// Both records must be normal; otherwise the input is rejected with the
    /// normality residual.
    pub fn check_generalized_sasakian(&self, opts: &RunOptions) -> Result<SasakiReport, CheckError> {
        for (name, acm) in [("plus", &self.plus), ("minus", &self.minus)] {
            let n = acm.check_normality(opts)?;
            if !n.pass {
                return Err(CheckError::Precondition {
                    check: "generalized-sasakian".into(),
                    reason: format!("{name} record is not normal: residual {:.3e} at {:?}", n.residual, n.point),
                });
            }
        }
        let mut parts = Vec::new();
        for (acm, s) in [(&self.plus, 1.0), (&self.minus, -1.0)] {
            for (name, mat) in self.direct_terms(acm, s) {
                let cm = mat.compile();
                parts.push(run_sampled(&name, &acm.domain, opts, |p| Ok(sup_norm(&cm.eval(p)?.val)))?);
            }
        }
        let direct = combine("sasaki-direct", &parts);
        let product = self.check_product(opts)?;
        Ok(SasakiReport { direct, product })
    }

    /// Generalized Kähler conditions for `Γ = e^t(γ + dt²)`,
    /// `Ψ = e^t(ψ + κ∧dt)` and the lifts `J±` of the two records.
    pub fn check_product(&self, opts: &RunOptions) -> Result<CheckReport, CheckError> {
        let m = self.plus.dim();
        let n = m + 1;
        let plus = self.plus.product_lift();
        let minus = self.minus.product_lift();
        let et = ScalarExpr::var(m).exp();
        let psi = ExprMatrix::from_fn(n, n, |i, k| match (i < m, k < m) {
            (true, true) => self.psi.0[(i, k)].clone(),
            (true, false) => self.kappa.0[i].clone(),
            (false, true) => self.kappa.0[k].neg(),
            (false, false) => ScalarExpr::zero(),
        })
        .scale(&et);
        let q = MetricQuadruple { gamma: plus.gamma, psi: TwoFormField(psi), fp: plus.j, fm: minus.j, domain: plus.domain };
        let mut r = combine("sasaki-product", &[q.check_invariants(opts)?, q.check_gualtieri_kahler(opts)?]);
        r.check = "sasaki-product".into();
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn mat(rows: &[&[&str]], n: usize) -> ExprMatrix {
        ExprMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| parse_expr(s, n).unwrap()).collect()).collect())
    }

    fn v(src: &[&str]) -> Vec<ScalarExpr> {
        src.iter().map(|s| parse_expr(s, 3).unwrap()).collect()
    }

    fn quick() -> RunOptions {
        RunOptions { samples: 12, timing: false, ..Default::default() }
    }

    fn heisenberg(sign: f64) -> AlmostContactMetric {
        let s = ScalarExpr::constant(sign);
        let f = mat(&[&["0", "-1", "0"], &["1", "0", "0"], &["0", "-x2", "0"]], 3).scale(&s);
        let g = mat(&[&["1 + x2^2", "0", "-x2"], &["0", "1", "0"], &["-x2", "0", "1"]], 3);
        AlmostContactMetric::new(
            EndField(f),
            VectorField(v(&["0", "0", "1"])).scale(&s),
            OneFormField(v(&["-x2", "0", "1"])).scale(&s),
            MetricField(g),
            CoordinateDomain::cube(3, -1.0, 1.0),
        )
        .unwrap()
    }

    fn flat_cosymplectic() -> AlmostContactMetric {
        AlmostContactMetric::new(
            EndField(mat(&[&["0", "-1", "0"], &["1", "0", "0"], &["0", "0", "0"]], 3)),
            VectorField(v(&["0", "0", "1"])),
            OneFormField(v(&["0", "0", "1"])),
            MetricField::euclidean(3),
            CoordinateDomain::cube(3, -1.0, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn fundamental_form_of_heisenberg_is_dxi() {
        let h = heisenberg(1.0);
        let fund = h.fundamental_form();
        let dxi = exterior_derivative(&h.xi);
        let p = [0.3, 0.4, -0.2];
        assert!((fund.0.eval_values(&p).unwrap() - dxi.0.eval_values(&p).unwrap()).norm() < 1e-14);
        let iz = interior_product(&h.z, &fund);
        assert!(iz.0.iter().all(|e| crate::expr::eval_value(e, &p).unwrap().abs() < 1e-14));
    }

    #[test]
    fn lift_properties() {
        let h = heisenberg(1.0);
        let lift = h.product_lift();
        let p = [0.3, 0.4, -0.2, 0.7];
        let j = lift.j.0.eval_values(&p).unwrap();
        assert!((&j * &j + nalgebra::DMatrix::identity(4, 4)).norm() < 1e-12);
        let g = lift.gamma.0.eval_values(&p).unwrap();
        assert!((j.transpose() * &g * &j - &g).norm() < 1e-12);
        // ω = e^t(Ξ − ξ∧dt)
        let mut expect = nalgebra::DMatrix::zeros(4, 4);
        let fund = h.fundamental_form().0.eval_values(&p[..3]).unwrap();
        expect.view_mut((0, 0), (3, 3)).copy_from(&fund);
        let xi = ExprMatrix::column_vector(&h.xi.0).eval_values(&p[..3]).unwrap();
        for i in 0..3 {
            expect[(i, 3)] = -xi[(i, 0)];
            expect[(3, i)] = xi[(i, 0)];
        }
        expect *= p[3].exp();
        assert!((lift.omega.0.eval_values(&p).unwrap() - expect).norm() < 1e-12);
        let dw = three_form_matrix(&exterior_derivative(&lift.omega));
        assert!(dw.eval_values(&p).unwrap().norm() < 1e-12);
    }

    #[test]
    fn normality_and_cosymplectic() {
        let h = heisenberg(1.0);
        assert!(h.check_normality(&quick()).unwrap().pass);
        assert!(!h.check_cosymplectic(&quick()).unwrap().pass);
        let c = flat_cosymplectic();
        assert!(c.check_cosymplectic(&quick()).unwrap().pass);
        assert!(c.check_cosymplectic_product(&quick()).unwrap().pass);
        assert!(!h.check_cosymplectic_product(&quick()).unwrap().pass);
    }

    #[test]
    fn heisenberg_sasaki_pair() {
        let s = SasakiInput::new(heisenberg(1.0), heisenberg(-1.0), TwoFormField::zeros(3), OneFormField::zeros(3)).unwrap();
        let r = s.check_generalized_sasakian(&quick()).unwrap();
        assert!(r.direct.pass && r.product.pass, "{} {}", r.direct, r.product);
        let broken = SasakiInput { psi: TwoFormField::from_terms(3, &[(0, 1, parse_expr("x3", 3).unwrap())]), ..s.clone() };
        let r = broken.check_generalized_sasakian(&quick()).unwrap();
        assert!(!r.direct.pass && !r.product.pass);
        // basic ψ compensated by dκ
        let psi = TwoFormField::from_terms(3, &[(0, 1, parse_expr("1 + x1^2", 3).unwrap())]);
        let kappa = OneFormField(v(&["0", "-(x1 + x1^3/3)", "0"]));
        let ok = SasakiInput { psi: psi.clone(), kappa, ..s.clone() };
        let r = ok.check_generalized_sasakian(&quick()).unwrap();
        assert!(r.direct.pass && r.product.pass, "{} {}", r.direct, r.product);
        let bad = SasakiInput { psi, ..s };
        let r = bad.check_generalized_sasakian(&quick()).unwrap();
        assert!(!r.direct.pass && !r.product.pass);
    }
}
