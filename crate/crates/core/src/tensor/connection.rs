use super::*;

/// Levi-Civita connection of a metric field.
#[derive(Clone, Debug)]
pub struct Connection {
    pub gamma: MetricField,
    /// Symbolic inverse metric `γ^{ij}`.
    pub inv: ExprMatrix,
    /// `christoffel[k][(i, j)] = Γ^k_{ij}`.
    pub christoffel: Vec<ExprMatrix>,
}

pub fn levi_civita(gamma: &MetricField) -> Connection {
    let n = gamma.dim();
    let g = &gamma.0;
    let inv = g.inverse();
    let dg: Vec<ExprMatrix> = (0..n).map(|l| g.partial(l)).collect();
    // first-kind symbols Γ_{ijl} = ½(∂i γ_jl + ∂j γ_il − ∂l γ_ij)
    let first = |i: usize, j: usize, l: usize| {
        dg[i][(j, l)].add(&dg[j][(i, l)]).sub(&dg[l][(i, j)]).scale_half()
    };
    let christoffel = (0..n)
        .map(|k| {
            ExprMatrix::from_fn(n, n, |i, j| {
                let mut acc = ScalarExpr::zero();
                for l in 0..n {
                    let a = &inv[(k, l)];
                    if a.is_zero() {
                        continue;
                    }
                    let f = first(i, j, l);
                    if !f.is_zero() {
                        acc = acc.add(&a.mul(&f));
                    }
                }
                acc
            })
        })
        .collect();
    Connection { gamma: gamma.clone(), inv, christoffel }
}

trait Half {
    fn scale_half(&self) -> ScalarExpr;
}

impl Half for ScalarExpr {
    fn scale_half(&self) -> ScalarExpr {
        self.mul(&ScalarExpr::constant(0.5))
    }
}

impl Connection {
    pub fn dim(&self) -> usize {
        self.gamma.dim()
    }

    /// `(∇_k γ)_{ij}`, identically zero for a metric connection.
    pub fn covariant_derivative_metric(&self) -> Vec<ExprMatrix> {
        let n = self.dim();
        let g = &self.gamma.0;
        (0..n)
            .map(|k| {
                let dk = g.partial(k);
                ExprMatrix::from_fn(n, n, |i, j| {
                    let mut acc = dk[(i, j)].clone();
                    for l in 0..n {
                        acc = acc.sub(&self.christoffel[l][(k, i)].mul(&g[(l, j)]));
                        acc = acc.sub(&self.christoffel[l][(k, j)].mul(&g[(i, l)]));
                    }
                    acc
                })
            })
            .collect()
    }
}

/// `∇_{∂k} F` for every coordinate `k`, as endomorphisms:
/// `(∇_k F)^i_j = ∂_k F^i_j + Γ^i_{kl} F^l_j − F^i_l Γ^l_{kj}`.
pub fn covariant_derivative_end(conn: &Connection, f: &EndField) -> Vec<EndField> {
    let n = conn.dim();
    let m = &f.0;
    (0..n)
        .map(|k| {
            let dk = m.partial(k);
            // Γ_k as matrix: (Γ_k)^i_l = Γ^i_{kl}
            let gk = ExprMatrix::from_fn(n, n, |i, l| conn.christoffel[i][(k, l)].clone());
            EndField(dk.add(&gk.matmul(m)).sub(&m.matmul(&gk)))
        })
        .collect()
}
