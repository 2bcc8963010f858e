//! Sections of the big tangent bundle `TM ⊕ T*M`, the neutral pairing and
//! the Courant bracket.
//!
//! Complex sections carry real and imaginary parts as separate real
//! expression fields; brackets expand bilinearly over them.

use crate::expr::ScalarExpr;
use crate::jet::{JetMat, C64, I};
use crate::point;
use crate::tensor::{differential, lie_bracket, pair, ExprMatrix, LieDerivative, OneFormField, VectorField};
use crate::expr::EvalError;

#[derive(Clone, Debug)]
pub struct BigSection {
    pub x_re: VectorField,
    pub x_im: VectorField,
    pub a_re: OneFormField,
    pub a_im: OneFormField,
}

impl BigSection {
    pub fn real(x: VectorField, a: OneFormField) -> Self {
        let n = x.dim();
        BigSection { x_re: x, x_im: VectorField::zeros(n), a_re: a, a_im: OneFormField::zeros(n) }
    }

    pub fn complex(x_re: VectorField, x_im: VectorField, a_re: OneFormField, a_im: OneFormField) -> Self {
        BigSection { x_re, x_im, a_re, a_im }
    }

    pub fn zeros(n: usize) -> Self {
        Self::real(VectorField::zeros(n), OneFormField::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.x_re.dim()
    }

    /// Constant basis section: `e_i` for `i < m`, `dx^{i-m}` otherwise.
    pub fn basis(n: usize, i: usize) -> Self {
        if i < n {
            Self::real(VectorField::basis(n, i), OneFormField::zeros(n))
        } else {
            Self::real(VectorField::zeros(n), OneFormField::basis(n, i - n))
        }
    }

    pub fn re(&self) -> (VectorField, OneFormField) {
        (self.x_re.clone(), self.a_re.clone())
    }

    pub fn im(&self) -> (VectorField, OneFormField) {
        (self.x_im.clone(), self.a_im.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        BigSection {
            x_re: self.x_re.add(&o.x_re),
            x_im: self.x_im.add(&o.x_im),
            a_re: self.a_re.add(&o.a_re),
            a_im: self.a_im.add(&o.a_im),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        BigSection {
            x_re: self.x_re.sub(&o.x_re),
            x_im: self.x_im.sub(&o.x_im),
            a_re: self.a_re.sub(&o.a_re),
            a_im: self.a_im.sub(&o.a_im),
        }
    }

    /// Multiplication by a real scalar field.
    pub fn scale(&self, f: &ScalarExpr) -> Self {
        BigSection {
            x_re: self.x_re.scale(f),
            x_im: self.x_im.scale(f),
            a_re: self.a_re.scale(f),
            a_im: self.a_im.scale(f),
        }
    }

    /// Multiplication by a complex constant.
    pub fn scale_c(&self, z: C64) -> Self {
        let (re, im) = (ScalarExpr::constant(z.re), ScalarExpr::constant(z.im));
        BigSection {
            x_re: self.x_re.scale(&re).sub(&self.x_im.scale(&im)),
            x_im: self.x_re.scale(&im).add(&self.x_im.scale(&re)),
            a_re: self.a_re.scale(&re).sub(&self.a_im.scale(&im)),
            a_im: self.a_re.scale(&im).add(&self.a_im.scale(&re)),
        }
    }

    /// Stacked `(X, α)` real and imaginary columns.
    fn stacked(&self) -> (Vec<ScalarExpr>, Vec<ScalarExpr>) {
        let mut re = self.x_re.0.clone();
        re.extend(self.a_re.0.iter().cloned());
        let mut im = self.x_im.0.clone();
        im.extend(self.a_im.0.iter().cloned());
        (re, im)
    }

    pub fn compile(&self) -> CompiledSection {
        let (re, im) = self.stacked();
        CompiledSection { re: ExprMatrix::column_vector(&re).compile(), im: ExprMatrix::column_vector(&im).compile() }
    }

    pub fn jet(&self, p: &[f64]) -> Result<JetMat, EvalError> {
        self.compile().eval(p)
    }
}

/// A section compiled for jet evaluation.
#[derive(Clone, Debug)]
pub struct CompiledSection {
    re: crate::jet::CompiledMatrix,
    im: crate::jet::CompiledMatrix,
}

impl CompiledSection {
    pub fn eval(&self, p: &[f64]) -> Result<JetMat, EvalError> {
        Ok(self.re.eval(p)?.add(&self.im.eval(p)?.scale(I)))
    }
}

/// `g(A, B) = ½(α(Y) + β(X))` at `p`.
pub fn pairing_g(a: &BigSection, b: &BigSection, p: &[f64]) -> Result<C64, EvalError> {
    Ok(point::pairing(&a.jet(p)?.val, &b.jet(p)?.val))
}

fn real_bracket(a: (&VectorField, &OneFormField), b: (&VectorField, &OneFormField)) -> (VectorField, OneFormField) {
    let n = a.0.dim();
    let (x, al) = a;
    let (y, be) = b;
    let half = ScalarExpr::constant(0.5);
    let f = pair(al, y).sub(&pair(be, x)).mul(&half);
    (lie_bracket(x, y), be.lie(x).sub(&al.lie(y)).add(&differential(&f, n)))
}

/// Courant bracket `([X,Y], L_Xβ − L_Yα + ½d(α(Y) − β(X)))`, complex bilinear.
pub fn courant_bracket(a: &BigSection, b: &BigSection) -> BigSection {
    let (rr_x, rr_a) = real_bracket((&a.x_re, &a.a_re), (&b.x_re, &b.a_re));
    let (ii_x, ii_a) = real_bracket((&a.x_im, &a.a_im), (&b.x_im, &b.a_im));
    let (ri_x, ri_a) = real_bracket((&a.x_re, &a.a_re), (&b.x_im, &b.a_im));
    let (ir_x, ir_a) = real_bracket((&a.x_im, &a.a_im), (&b.x_re, &b.a_re));
    BigSection { x_re: rr_x.sub(&ii_x), x_im: ri_x.add(&ir_x), a_re: rr_a.sub(&ii_a), a_im: ri_a.add(&ir_a) }
}

/// Residual of the Courant-algebroid compatibility of anchor, bracket and
/// pairing, maximised over `points`:
/// `X g(B,C) − g([A,B],C) − g(B,[A,C]) − ½(Z g(A,B) + Y g(A,C))`.
pub fn check_axiom_v(a: &BigSection, b: &BigSection, c: &BigSection, points: &[Vec<f64>]) -> Result<f64, EvalError> {
    let (ca, cb, cc) = (a.compile(), b.compile(), c.compile());
    let mut worst: f64 = 0.0;
    for p in points {
        worst = worst.max(axiom_v_at(&ca.eval(p)?, &cb.eval(p)?, &cc.eval(p)?).norm());
    }
    Ok(worst)
}

/// Pointwise axiom residual from section jets.
pub fn axiom_v_at(a: &JetMat, b: &JetMat, c: &JetMat) -> C64 {
    let m = a.nvars();
    let anchor = |s: &JetMat| s.val.rows(0, m).into_owned();
    let deriv = |f: &JetMat, v: &crate::jet::CMat| f.derivative_along(v)[(0, 0)];
    let gbc = point::pairing_jet(b, c);
    let gab = point::pairing_jet(a, b);
    let gac = point::pairing_jet(a, c);
    let ab = point::courant(a, b);
    let ac = point::courant(a, c);
    deriv(&gbc, &anchor(a))
        - point::pairing(&ab, &c.val)
        - point::pairing(&b.val, &ac)
        - 0.5 * (deriv(&gab, &anchor(c)) + deriv(&gac, &anchor(b)))
}
