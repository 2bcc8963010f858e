//! Coordinate tensor fields and the classical operators on them.
//!
//! Component conventions: a two-form `θ` stores `θ(∂i, ∂j)` at `(i, j)`, a
//! bivector `P` stores `P(dx^i, dx^j)`, an endomorphism `A` stores `A^i_j`
//! so that `A ∂j = Σ_i A^i_j ∂i`. Musical maps contract the first slot:
//! `♭θ X = i(X)θ`, `♯P α = i(α)P`.
//!
//! Wedge and exterior derivative carry no normalising factors:
//! `(α∧β)(X,Y) = α(X)β(Y) − α(Y)β(X)`,
//! `dξ(X,Y) = Xξ(Y) − Yξ(X) − ξ([X,Y])`,
//! `dθ(X,Y,Z) = Σ_cyc Xθ(Y,Z) − Σ_cyc θ([X,Y],Z)`.

mod connection;
mod matrix;
mod ops;

pub use connection::{covariant_derivative_end, levi_civita, Connection};
pub use matrix::ExprMatrix;
pub use ops::*;

use crate::expr::ScalarExpr;

#[derive(Clone, Debug)]
pub struct VectorField(pub Vec<ScalarExpr>);

#[derive(Clone, Debug)]
pub struct OneFormField(pub Vec<ScalarExpr>);

#[derive(Clone, Debug)]
pub struct TwoFormField(pub ExprMatrix);

#[derive(Clone, Debug)]
pub struct BivectorField(pub ExprMatrix);

#[derive(Clone, Debug)]
pub struct EndField(pub ExprMatrix);

#[derive(Clone, Debug)]
pub struct MetricField(pub ExprMatrix);

/// Dense rank-3 array of expressions indexed `(i, j, k)`.
#[derive(Clone, Debug)]
pub struct Tensor3 {
    pub n: usize,
    pub data: Vec<ScalarExpr>,
}

impl Tensor3 {
    pub fn from_fn<F: FnMut(usize, usize, usize) -> ScalarExpr>(n: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Tensor3 { n, data }
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &ScalarExpr {
        &self.data[(i * self.n + j) * self.n + k]
    }
}

#[derive(Clone, Debug)]
pub struct ThreeForm(pub Tensor3);

#[derive(Clone, Debug)]
pub struct TriVector(pub Tensor3);

macro_rules! vec_field {
    ($t:ident) => {
        impl $t {
            pub fn zeros(n: usize) -> Self {
                $t(vec![ScalarExpr::zero(); n])
            }
            pub fn dim(&self) -> usize {
                self.0.len()
            }
            /// Coordinate basis element with a 1 in slot `i`.
            pub fn basis(n: usize, i: usize) -> Self {
                let mut v = vec![ScalarExpr::zero(); n];
                v[i] = ScalarExpr::one();
                $t(v)
            }
            pub fn add(&self, o: &Self) -> Self {
                $t(self.0.iter().zip(&o.0).map(|(a, b)| a.add(b)).collect())
            }
            pub fn sub(&self, o: &Self) -> Self {
                $t(self.0.iter().zip(&o.0).map(|(a, b)| a.sub(b)).collect())
            }
            pub fn scale(&self, s: &ScalarExpr) -> Self {
                $t(self.0.iter().map(|a| a.mul(s)).collect())
            }
        }
    };
}

vec_field!(VectorField);
vec_field!(OneFormField);

macro_rules! mat_field {
    ($t:ident) => {
        impl $t {
            pub fn zeros(n: usize) -> Self {
                $t(ExprMatrix::zeros(n, n))
            }
            pub fn dim(&self) -> usize {
                self.0.nrows()
            }
            pub fn matrix(&self) -> &ExprMatrix {
                &self.0
            }
            pub fn add(&self, o: &Self) -> Self {
                $t(self.0.add(&o.0))
            }
            pub fn sub(&self, o: &Self) -> Self {
                $t(self.0.sub(&o.0))
            }
            pub fn scale(&self, s: &ScalarExpr) -> Self {
                $t(self.0.scale(s))
            }
        }
    };
}

mat_field!(TwoFormField);
mat_field!(BivectorField);
mat_field!(EndField);
mat_field!(MetricField);

impl TwoFormField {
    /// Sum of `c · dx^i ∧ dx^j` terms.
    pub fn from_terms(n: usize, terms: &[(usize, usize, ScalarExpr)]) -> Self {
        let mut m = ExprMatrix::zeros(n, n);
        for (i, j, c) in terms {
            m[(*i, *j)] = m[(*i, *j)].add(c);
            m[(*j, *i)] = m[(*j, *i)].sub(c);
        }
        TwoFormField(m)
    }

    /// Matrix of `♭θ` acting on column vectors: `(♭θ X)_j = X^i θ_ij`.
    pub fn flat(&self) -> ExprMatrix {
        self.0.transpose()
    }
}

impl BivectorField {
    /// Sum of `c · ∂i ∧ ∂j` terms.
    pub fn from_terms(n: usize, terms: &[(usize, usize, ScalarExpr)]) -> Self {
        let mut m = ExprMatrix::zeros(n, n);
        for (i, j, c) in terms {
            m[(*i, *j)] = m[(*i, *j)].add(c);
            m[(*j, *i)] = m[(*j, *i)].sub(c);
        }
        BivectorField(m)
    }

    /// Matrix of `♯P` acting on column covectors: `(♯P α)^j = α_i P^{ij}`.
    pub fn sharp(&self) -> ExprMatrix {
        self.0.transpose()
    }
}

impl MetricField {
    pub fn euclidean(n: usize) -> Self {
        MetricField(ExprMatrix::identity(n))
    }
}

impl EndField {
    pub fn identity(n: usize) -> Self {
        EndField(ExprMatrix::identity(n))
    }

    pub fn compose(&self, o: &EndField) -> EndField {
        EndField(self.0.matmul(&o.0))
    }

    pub fn apply(&self, v: &VectorField) -> VectorField {
        VectorField(self.0.mat_vec(&v.0))
    }
}
