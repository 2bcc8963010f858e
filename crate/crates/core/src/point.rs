//! Pointwise calculus on jets: brackets, exterior and Lie derivatives and the
//! Levi-Civita connection evaluated from first-order data at one point.

use crate::jet::{c, CMat, JetMat, C64};

/// Dense complex rank-3 array indexed `(i, j, k)`.
#[derive(Clone, Debug)]
pub struct Arr3 {
    pub n: usize,
    pub data: Vec<C64>,
}

impl Arr3 {
    pub fn zeros(n: usize) -> Self {
        Arr3 { n, data: vec![c(0.0); n * n * n] }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: C64) {
        self.data[(i * self.n + j) * self.n + k] = v;
    }

    /// `w(x, y, z)`.
    pub fn eval(&self, x: &CMat, y: &CMat, z: &CMat) -> C64 {
        let n = self.n;
        let mut acc = c(0.0);
        for i in 0..n {
            if x[(i, 0)] == c(0.0) {
                continue;
            }
            for j in 0..n {
                if y[(j, 0)] == c(0.0) {
                    continue;
                }
                let xy = x[(i, 0)] * y[(j, 0)];
                for k in 0..n {
                    acc += xy * z[(k, 0)] * self.get(i, j, k);
                }
            }
        }
        acc
    }

    /// Contraction of the first two slots, `w(x, y, ·)` as a column.
    pub fn contract2(&self, x: &CMat, y: &CMat) -> CMat {
        let n = self.n;
        CMat::from_fn(n, 1, |k, _| {
            let mut acc = c(0.0);
            for i in 0..n {
                for j in 0..n {
                    acc += x[(i, 0)] * y[(j, 0)] * self.get(i, j, k);
                }
            }
            acc
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `[X,Y]` from column jets of the two fields.
pub fn lie_bracket(x: &JetMat, y: &JetMat) -> CMat {
    y.derivative_along(&x.val) - x.derivative_along(&y.val)
}

/// `(dα)_ij = ∂iα_j − ∂jα_i` from a column jet.
pub fn d1(a: &JetMat) -> CMat {
    let n = a.nvars();
    CMat::from_fn(n, n, |i, j| a.d[i][(j, 0)] - a.d[j][(i, 0)])
}

/// `(dθ)_ijk = ∂iθ_jk + ∂jθ_ki + ∂kθ_ij` from a matrix jet.
pub fn d2(t: &JetMat) -> Arr3 {
    let n = t.nvars();
    let mut out = Arr3::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.set(i, j, k, t.d[i][(j, k)] + t.d[j][(k, i)] + t.d[k][(i, j)]);
            }
        }
    }
    out
}

/// Jacobian `∂_j X^i` as a matrix.
fn jacobian(x: &JetMat) -> CMat {
    let n = x.nvars();
    CMat::from_fn(x.val.nrows(), n, |i, j| x.d[j][(i, 0)])
}

/// `(L_Xα)_i = X^j∂_jα_i + α_j∂_iX^j`.
pub fn lie1(x: &JetMat, a: &JetMat) -> CMat {
    a.derivative_along(&x.val) + jacobian(x).transpose() * &a.val
}

/// Lie derivative of a covariant two-tensor.
pub fn lie2(x: &JetMat, t: &JetMat) -> CMat {
    let jx = jacobian(x);
    t.derivative_along(&x.val) + jx.transpose() * &t.val + &t.val * jx
}

/// Courant bracket of two big-bundle sections given as `2m`-column jets.
pub fn courant(a: &JetMat, b: &JetMat) -> CMat {
    let m = a.nvars();
    let x = a.block(0, 0, m, 1);
    let al = a.block(m, 0, m, 1);
    let y = b.block(0, 0, m, 1);
    let be = b.block(m, 0, m, 1);
    let v = lie_bracket(&x, &y);
    // ½ d(α(Y) − β(X))
    let half_d = CMat::from_fn(m, 1, |i, _| {
        let mut s = c(0.0);
        for j in 0..m {
            s += al.d[i][(j, 0)] * y.val[(j, 0)] + al.val[(j, 0)] * y.d[i][(j, 0)]
                - be.d[i][(j, 0)] * x.val[(j, 0)]
                - be.val[(j, 0)] * x.d[i][(j, 0)];
        }
        s * 0.5
    });
    let f = lie1(&x, &be) - lie1(&y, &al) + half_d;
    let mut out = CMat::zeros(2 * m, 1);
    out.view_mut((0, 0), (m, 1)).copy_from(&v);
    out.view_mut((m, 0), (m, 1)).copy_from(&f);
    out
}

/// Neutral pairing `½(α(Y) + β(X))`, complex bilinear.
pub fn pairing(a: &CMat, b: &CMat) -> C64 {
    let m = a.nrows() / 2;
    let mut s = c(0.0);
    for i in 0..m {
        s += a[(m + i, 0)] * b[(i, 0)] + b[(m + i, 0)] * a[(i, 0)];
    }
    s * 0.5
}

/// Pairing as a 1x1 jet.
pub fn pairing_jet(a: &JetMat, b: &JetMat) -> JetMat {
    let val = CMat::from_element(1, 1, pairing(&a.val, &b.val));
    let d = (0..a.nvars())
        .map(|k| CMat::from_element(1, 1, pairing(&a.d[k], &b.val) + pairing(&a.val, &b.d[k])))
        .collect();
    JetMat { val, d }
}

/// Christoffel symbols `Γ^k_ij` as `out[k][(i, j)]` from a metric jet.
pub fn christoffel(gamma: &JetMat) -> Option<Vec<CMat>> {
    let n = gamma.nvars();
    let inv = gamma.val.clone().try_inverse()?;
    let first = |i: usize, j: usize, l: usize| {
        (gamma.d[i][(j, l)] + gamma.d[j][(i, l)] - gamma.d[l][(i, j)]) * 0.5
    };
    Some(
        (0..n)
            .map(|k| {
                CMat::from_fn(n, n, |i, j| {
                    let mut s = c(0.0);
                    for l in 0..n {
                        s += inv[(k, l)] * first(i, j, l);
                    }
                    s
                })
            })
            .collect(),
    )
}

/// `∇_{∂k}F` for each `k` from jets of `γ` and `F`.
pub fn nabla_end(chr: &[CMat], f: &JetMat) -> Vec<CMat> {
    let n = f.nvars();
    (0..n)
        .map(|k| {
            let gk = CMat::from_fn(n, n, |i, l| chr[i][(k, l)]);
            &f.d[k] + &gk * &f.val - &f.val * &gk
        })
        .collect()
}

/// `∇_{∂k}Y` for a column jet `Y`.
pub fn nabla_vector(chr: &[CMat], y: &JetMat) -> Vec<CMat> {
    let n = y.nvars();
    (0..n)
        .map(|k| {
            let gk = CMat::from_fn(n, n, |i, l| chr[i][(k, l)]);
            &y.d[k] + gk * &y.val
        })
        .collect()
}

/// Matrix pullback `λ(F·, F·)` of a two-tensor at a point.
pub fn pullback2(t: &CMat, f: &CMat) -> CMat {
    f.transpose() * t * f
}

/// Largest entry modulus.
pub fn sup(m: &CMat) -> f64 {
    crate::jet::sup_norm(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::tensor::{self, Exterior, ExprMatrix, LieDerivative, OneFormField, TwoFormField, VectorField};

    fn col(src: &[&str], n: usize) -> Vec<crate::expr::ScalarExpr> {
        src.iter().map(|s| parse_expr(s, n).unwrap()).collect()
    }

    fn jet_col(v: &[crate::expr::ScalarExpr], p: &[f64]) -> JetMat {
        ExprMatrix::column_vector(v).compile().eval(p).unwrap()
    }

    #[test]
    fn pointwise_matches_symbolic() {
        let n = 3;
        let p = [0.3, -0.7, 1.2];
        let x = col(&["x1*x2", "sin(x3)", "x1^2"], n);
        let a = col(&["x3", "exp(x1)*x2", "x2^3"], n);
        let th = TwoFormField::from_terms(
            n,
            &[(0, 1, parse_expr("x3*x1", n).unwrap()), (1, 2, parse_expr("cos(x1)", n).unwrap())],
        );
        let xj = jet_col(&x, &p);
        let aj = jet_col(&a, &p);
        let tj = th.0.compile().eval(&p).unwrap();

        let sym = OneFormField(a.clone()).exterior().0.eval_values(&p).unwrap();
        assert!((d1(&aj) - sym.map(c)).norm() < 1e-12);

        let sym = OneFormField(a.clone()).lie(&VectorField(x.clone()));
        let v = ExprMatrix::column_vector(&sym.0).eval_values(&p).unwrap();
        assert!((lie1(&xj, &aj) - v.map(c)).norm() < 1e-12);

        let sym = th.lie(&VectorField(x.clone())).0.eval_values(&p).unwrap();
        assert!((lie2(&xj, &tj) - sym.map(c)).norm() < 1e-12);

        let d3 = tensor::exterior_derivative(&th);
        let dd = d2(&tj);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let s = crate::expr::eval_value(d3.0.get(i, j, k), &p).unwrap();
                    assert!((dd.get(i, j, k).re - s).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn courant_on_line_example() {
        // [(x∂x, 0), (0, dx)] = (0, ½dx)
        let p = [0.8];
        let a = jet_col(&col(&["x1", "0"], 1), &p);
        let b = jet_col(&col(&["0", "1"], 1), &p);
        let r = courant(&a, &b);
        assert!(r[(0, 0)].norm() < 1e-15);
        assert!((r[(1, 0)].re - 0.5).abs() < 1e-15);
    }
}
