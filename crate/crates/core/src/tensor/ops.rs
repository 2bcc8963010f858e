use super::*;
use crate::expr::partial;

/// `[X,Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    let n = x.dim();
    VectorField(
        (0..n)
            .map(|i| {
                let mut acc = ScalarExpr::zero();
                for j in 0..n {
                    acc = acc.add(&x.0[j].mul(&partial(&y.0[i], j)));
                    acc = acc.sub(&y.0[j].mul(&partial(&x.0[i], j)));
                }
                acc
            })
            .collect(),
    )
}

/// Differential of a function.
pub fn differential(f: &ScalarExpr, n: usize) -> OneFormField {
    OneFormField((0..n).map(|i| partial(f, i)).collect())
}

pub trait Exterior {
    type Output;
    fn exterior(&self) -> Self::Output;
}

impl Exterior for OneFormField {
    type Output = TwoFormField;
    fn exterior(&self) -> TwoFormField {
        let n = self.dim();
        TwoFormField(ExprMatrix::from_fn(n, n, |i, j| {
            if i == j {
                ScalarExpr::zero()
            } else {
                partial(&self.0[j], i).sub(&partial(&self.0[i], j))
            }
        }))
    }
}

impl Exterior for TwoFormField {
    type Output = ThreeForm;
    fn exterior(&self) -> ThreeForm {
        let n = self.dim();
        let t = &self.0;
        let d: Vec<ExprMatrix> = (0..n).map(|k| t.partial(k)).collect();
        ThreeForm(Tensor3::from_fn(n, |i, j, k| {
            if i == j || j == k || i == k {
                ScalarExpr::zero()
            } else {
                d[i][(j, k)].add(&d[j][(k, i)]).add(&d[k][(i, j)])
            }
        }))
    }
}

pub fn exterior_derivative<T: Exterior>(w: &T) -> T::Output {
    w.exterior()
}

pub trait LieDerivative: Sized {
    fn lie(&self, x: &VectorField) -> Self;
}

impl LieDerivative for OneFormField {
    fn lie(&self, x: &VectorField) -> Self {
        let n = self.dim();
        OneFormField(
            (0..n)
                .map(|i| {
                    let mut acc = ScalarExpr::zero();
                    for j in 0..n {
                        acc = acc.add(&x.0[j].mul(&partial(&self.0[i], j)));
                        acc = acc.add(&self.0[j].mul(&partial(&x.0[j], i)));
                    }
                    acc
                })
                .collect(),
        )
    }
}

fn lie_covariant2(t: &ExprMatrix, x: &VectorField) -> ExprMatrix {
    let n = t.nrows();
    let dx: Vec<Vec<ScalarExpr>> = (0..n).map(|k| (0..n).map(|i| partial(&x.0[k], i)).collect()).collect();
    ExprMatrix::from_fn(n, n, |i, j| {
        let mut acc = ScalarExpr::zero();
        for k in 0..n {
            acc = acc.add(&x.0[k].mul(&partial(&t[(i, j)], k)));
            acc = acc.add(&t[(k, j)].mul(&dx[k][i]));
            acc = acc.add(&t[(i, k)].mul(&dx[k][j]));
        }
        acc
    })
}

impl LieDerivative for TwoFormField {
    fn lie(&self, x: &VectorField) -> Self {
        TwoFormField(lie_covariant2(&self.0, x))
    }
}

impl LieDerivative for MetricField {
    fn lie(&self, x: &VectorField) -> Self {
        MetricField(lie_covariant2(&self.0, x))
    }
}

pub fn lie_derivative<T: LieDerivative>(x: &VectorField, t: &T) -> T {
    t.lie(x)
}

pub trait Interior {
    type Output;
    fn interior(&self, x: &VectorField) -> Self::Output;
}

impl Interior for TwoFormField {
    type Output = OneFormField;
    fn interior(&self, x: &VectorField) -> OneFormField {
        OneFormField(self.0.transpose().mat_vec(&x.0))
    }
}

impl Interior for MetricField {
    type Output = OneFormField;
    fn interior(&self, x: &VectorField) -> OneFormField {
        OneFormField(self.0.transpose().mat_vec(&x.0))
    }
}

impl Interior for ThreeForm {
    type Output = TwoFormField;
    fn interior(&self, x: &VectorField) -> TwoFormField {
        let n = self.0.n;
        TwoFormField(ExprMatrix::from_fn(n, n, |j, k| {
            let mut acc = ScalarExpr::zero();
            for i in 0..n {
                let c = self.0.get(i, j, k);
                if !c.is_zero() {
                    acc = acc.add(&x.0[i].mul(c));
                }
            }
            acc
        }))
    }
}

/// Contraction in the first slot.
pub fn interior_product<T: Interior>(x: &VectorField, w: &T) -> T::Output {
    w.interior(x)
}

/// Pairing `α(X)`.
pub fn pair(a: &OneFormField, x: &VectorField) -> ScalarExpr {
    let mut acc = ScalarExpr::zero();
    for (ai, xi) in a.0.iter().zip(&x.0) {
        acc = acc.add(&ai.mul(xi));
    }
    acc
}

pub fn wedge(a: &OneFormField, b: &OneFormField) -> TwoFormField {
    let n = a.dim();
    TwoFormField(ExprMatrix::from_fn(n, n, |i, j| a.0[i].mul(&b.0[j]).sub(&a.0[j].mul(&b.0[i]))))
}

/// `(α∧θ)(X,Y,Z) = Σ_cyc α(X)θ(Y,Z)`.
pub fn wedge_one_two(a: &OneFormField, t: &TwoFormField) -> ThreeForm {
    let n = a.dim();
    let m = &t.0;
    ThreeForm(Tensor3::from_fn(n, |i, j, k| {
        a.0[i].mul(&m[(j, k)]).add(&a.0[j].mul(&m[(k, i)])).add(&a.0[k].mul(&m[(i, j)]))
    }))
}

pub fn vector_wedge(x: &VectorField, y: &VectorField) -> BivectorField {
    let n = x.dim();
    BivectorField(ExprMatrix::from_fn(n, n, |i, j| x.0[i].mul(&y.0[j]).sub(&x.0[j].mul(&y.0[i]))))
}

/// Schouten–Nijenhuis bracket of bivectors,
/// `[P,Q]^{ijk} = Σ_cyc (P^{il} ∂_l Q^{jk} + Q^{il} ∂_l P^{jk})`,
/// so that `[P,P](df,dg,dh)` is twice the Jacobiator of `{f,g} = P(df,dg)`.
pub fn schouten_bracket(p: &BivectorField, q: &BivectorField) -> TriVector {
    let n = p.dim();
    let dp: Vec<ExprMatrix> = (0..n).map(|l| p.0.partial(l)).collect();
    let dq: Vec<ExprMatrix> = (0..n).map(|l| q.0.partial(l)).collect();
    let term = |i: usize, j: usize, k: usize| {
        let mut acc = ScalarExpr::zero();
        for l in 0..n {
            let a = &p.0[(i, l)];
            if !a.is_zero() {
                acc = acc.add(&a.mul(&dq[l][(j, k)]));
            }
            let b = &q.0[(i, l)];
            if !b.is_zero() {
                acc = acc.add(&b.mul(&dp[l][(j, k)]));
            }
        }
        acc
    };
    TriVector(Tensor3::from_fn(n, |i, j, k| {
        if i == j || j == k || i == k {
            ScalarExpr::zero()
        } else {
            term(i, j, k).add(&term(j, k, i)).add(&term(k, i, j))
        }
    }))
}

pub fn sharp(p: &BivectorField, a: &OneFormField) -> VectorField {
    VectorField(p.sharp().mat_vec(&a.0))
}

pub fn flat(t: &TwoFormField, x: &VectorField) -> OneFormField {
    OneFormField(t.flat().mat_vec(&x.0))
}

/// `P(α, β) = α_i P^{ij} β_j`.
pub fn bivector_pair(p: &BivectorField, a: &OneFormField, b: &OneFormField) -> ScalarExpr {
    pair(b, &sharp(p, a))
}

/// `{α,β}_P = L_{♯Pα}β − L_{♯Pβ}α − d(P(α,β))`.
pub fn one_form_p_bracket(a: &OneFormField, b: &OneFormField, p: &BivectorField) -> OneFormField {
    let n = a.dim();
    let pa = sharp(p, a);
    let pb = sharp(p, b);
    b.lie(&pa).sub(&a.lie(&pb)).sub(&differential(&bivector_pair(p, a, b), n))
}

/// Evaluates a three-form on three vector fields.
pub fn three_form_on(w: &ThreeForm, x: &VectorField, y: &VectorField, z: &VectorField) -> ScalarExpr {
    let n = w.0.n;
    let mut acc = ScalarExpr::zero();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = w.0.get(i, j, k);
                if !c.is_zero() {
                    acc = acc.add(&c.mul(&x.0[i]).mul(&y.0[j]).mul(&z.0[k]));
                }
            }
        }
    }
    acc
}

/// Evaluates a trivector on three one-forms.
pub fn trivector_on(w: &TriVector, a: &OneFormField, b: &OneFormField, c: &OneFormField) -> ScalarExpr {
    three_form_on(&ThreeForm(w.0.clone()), &VectorField(a.0.clone()), &VectorField(b.0.clone()), &VectorField(c.0.clone()))
}

/// Pullback of a two-form through an endomorphism: `λ^c(X,Y) = λ(FX, FY)`.
pub fn pullback_two(t: &TwoFormField, f: &EndField) -> TwoFormField {
    TwoFormField(f.0.transpose().matmul(&t.0).matmul(&f.0))
}

/// Pullback of a three-form through an endomorphism in all slots.
pub fn pullback_three(w: &ThreeForm, f: &EndField) -> ThreeForm {
    let n = w.0.n;
    let m = &f.0;
    // contract one slot at a time
    let step1 = Tensor3::from_fn(n, |a, j, k| {
        ScalarExpr::sum((0..n).map(|i| m[(i, a)].mul(w.0.get(i, j, k))).collect::<Vec<_>>().iter())
    });
    let step2 = Tensor3::from_fn(n, |a, b, k| {
        ScalarExpr::sum((0..n).map(|j| m[(j, b)].mul(step1.get(a, j, k))).collect::<Vec<_>>().iter())
    });
    ThreeForm(Tensor3::from_fn(n, |a, b, c| {
        ScalarExpr::sum((0..n).map(|k| m[(k, c)].mul(step2.get(a, b, k))).collect::<Vec<_>>().iter())
    }))
}

impl ThreeForm {
    pub fn add(&self, o: &ThreeForm) -> ThreeForm {
        ThreeForm(Tensor3 { n: self.0.n, data: self.0.data.iter().zip(&o.0.data).map(|(a, b)| a.add(b)).collect() })
    }
    pub fn sub(&self, o: &ThreeForm) -> ThreeForm {
        ThreeForm(Tensor3 { n: self.0.n, data: self.0.data.iter().zip(&o.0.data).map(|(a, b)| a.sub(b)).collect() })
    }
    pub fn scale(&self, s: &ScalarExpr) -> ThreeForm {
        ThreeForm(Tensor3 { n: self.0.n, data: self.0.data.iter().map(|a| a.mul(s)).collect() })
    }
}
