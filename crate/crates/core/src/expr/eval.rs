use super::{Func, Node, ScalarExpr};
use std::collections::HashMap;
use thiserror::Error;

/// Value and gradient of a scalar expression at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub gradient: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: String },
    #[error("expression references coordinate {index} but the point has dimension {dim}")]
    Dimension { index: usize, dim: usize },
}

#[derive(Clone, Debug)]
enum Op {
    Const(f64),
    Var(usize),
    Neg(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Pow(usize, i32),
    Func(Func, usize),
}

/// A batch of expressions flattened into a single instruction list.
///
/// Shared subtrees are evaluated once. `eval` fills values and gradients for
/// every instruction and the outputs are read back by position.
#[derive(Clone, Debug)]
pub struct Tape {
    ops: Vec<Op>,
    exprs: Vec<ScalarExpr>,
    outputs: Vec<usize>,
    max_var: usize,
}

impl Tape {
    pub fn compile(exprs: &[ScalarExpr]) -> Tape {
        let mut ops = Vec::new();
        let mut nodes = Vec::new();
        let mut index: HashMap<*const Node, usize> = HashMap::new();
        let mut consts: HashMap<u64, usize> = HashMap::new();
        let mut outputs = Vec::with_capacity(exprs.len());
        let mut max_var = 0;
        for e in exprs {
            let o = emit(e, &mut ops, &mut nodes, &mut index, &mut consts, &mut max_var);
            outputs.push(o);
        }
        Tape { ops, exprs: nodes, outputs, max_var }
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    /// Evaluates all outputs. `values[k]` and `grads[k*n..(k+1)*n]` hold the
    /// k-th output, with `n = p.len()`.
    pub fn eval(&self, p: &[f64], values: &mut Vec<f64>, grads: &mut Vec<f64>) -> Result<(), EvalError> {
        let n = p.len();
        if self.max_var > n {
            return Err(EvalError::Dimension { index: self.max_var - 1, dim: n });
        }
        let m = self.ops.len();
        let mut v = vec![0.0; m];
        let mut g = vec![0.0; m * n];
        for (k, op) in self.ops.iter().enumerate() {
            let (head, tail) = g.split_at_mut(k * n);
            let gk = &mut tail[..n];
            let val = match *op {
                Op::Const(c) => c,
                Op::Var(i) => {
                    gk[i] = 1.0;
                    p[i]
                }
                Op::Neg(a) => {
                    for j in 0..n {
                        gk[j] = -head[a * n + j];
                    }
                    -v[a]
                }
                Op::Add(a, b) => {
                    for j in 0..n {
                        gk[j] = head[a * n + j] + head[b * n + j];
                    }
                    v[a] + v[b]
                }
                Op::Sub(a, b) => {
                    for j in 0..n {
                        gk[j] = head[a * n + j] - head[b * n + j];
                    }
                    v[a] - v[b]
                }
                Op::Mul(a, b) => {
                    for j in 0..n {
                        gk[j] = head[a * n + j] * v[b] + v[a] * head[b * n + j];
                    }
                    v[a] * v[b]
                }
                Op::Div(a, b) => {
                    if v[b] == 0.0 {
                        return Err(self.domain(k, "division by zero"));
                    }
                    let q = v[a] / v[b];
                    for j in 0..n {
                        gk[j] = (head[a * n + j] - q * head[b * n + j]) / v[b];
                    }
                    q
                }
                Op::Pow(a, e) => {
                    if e < 0 && v[a] == 0.0 {
                        return Err(self.domain(k, "negative power of zero"));
                    }
                    let d = e as f64 * v[a].powi(e - 1);
                    for j in 0..n {
                        gk[j] = d * head[a * n + j];
                    }
                    v[a].powi(e)
                }
                Op::Func(f, a) => {
                    let x = v[a];
                    let (val, d) = match f {
                        Func::Sin => (x.sin(), x.cos()),
                        Func::Cos => (x.cos(), -x.sin()),
                        Func::Tan => {
                            let t = x.tan();
                            (t, 1.0 + t * t)
                        }
                        Func::Exp => {
                            let e = x.exp();
                            (e, e)
                        }
                        Func::Log => {
                            if x <= 0.0 {
                                return Err(self.domain(k, "logarithm of a non-positive number"));
                            }
                            (x.ln(), 1.0 / x)
                        }
                        Func::Sqrt => {
                            if x <= 0.0 {
                                return Err(self.domain(k, "square root of a non-positive number"));
                            }
                            let s = x.sqrt();
                            (s, 0.5 / s)
                        }
                    };
                    for j in 0..n {
                        gk[j] = d * head[a * n + j];
                    }
                    val
                }
            };
            if !val.is_finite() || gk.iter().any(|x| !x.is_finite()) {
                return Err(self.domain(k, "non-finite value"));
            }
            v[k] = val;
        }
        values.clear();
        grads.clear();
        for &o in &self.outputs {
            values.push(v[o]);
            grads.extend_from_slice(&g[o * n..(o + 1) * n]);
        }
        Ok(())
    }

    /// Values only, skipping gradient bookkeeping of the caller.
    pub fn eval_values(&self, p: &[f64]) -> Result<Vec<f64>, EvalError> {
        let mut v = Vec::new();
        let mut g = Vec::new();
        self.eval(p, &mut v, &mut g)?;
        Ok(v)
    }

    fn domain(&self, k: usize, reason: &str) -> EvalError {
        let mut expr = self.exprs[k].to_string();
        if expr.len() > 120 {
            expr.truncate(117);
            expr.push_str("...");
        }
        EvalError::Domain { expr, reason: reason.to_string() }
    }
}

fn emit(
    e: &ScalarExpr,
    ops: &mut Vec<Op>,
    nodes: &mut Vec<ScalarExpr>,
    index: &mut HashMap<*const Node, usize>,
    consts: &mut HashMap<u64, usize>,
    max_var: &mut usize,
) -> usize {
    if let Some(&k) = index.get(&e.ptr()) {
        return k;
    }
    if let Node::Const(c) = e.node() {
        if let Some(&k) = consts.get(&c.to_bits()) {
            return k;
        }
    }
    let op = match e.node() {
        Node::Const(c) => Op::Const(*c),
        Node::Var(i) => {
            *max_var = (*max_var).max(i + 1);
            Op::Var(*i)
        }
        Node::Neg(a) => Op::Neg(emit(a, ops, nodes, index, consts, max_var)),
        Node::Add(a, b) => {
            let (x, y) = (emit(a, ops, nodes, index, consts, max_var), emit(b, ops, nodes, index, consts, max_var));
            Op::Add(x, y)
        }
        Node::Sub(a, b) => {
            let (x, y) = (emit(a, ops, nodes, index, consts, max_var), emit(b, ops, nodes, index, consts, max_var));
            Op::Sub(x, y)
        }
        Node::Mul(a, b) => {
            let (x, y) = (emit(a, ops, nodes, index, consts, max_var), emit(b, ops, nodes, index, consts, max_var));
            Op::Mul(x, y)
        }
        Node::Div(a, b) => {
            let (x, y) = (emit(a, ops, nodes, index, consts, max_var), emit(b, ops, nodes, index, consts, max_var));
            Op::Div(x, y)
        }
        Node::Pow(a, n) => Op::Pow(emit(a, ops, nodes, index, consts, max_var), *n),
        Node::Func(f, a) => Op::Func(*f, emit(a, ops, nodes, index, consts, max_var)),
    };
    ops.push(op);
    nodes.push(e.clone());
    let k = ops.len() - 1;
    index.insert(e.ptr(), k);
    if let Node::Const(c) = e.node() {
        consts.insert(c.to_bits(), k);
    }
    k
}

/// Value and full gradient at `p`.
pub fn eval_jet(e: &ScalarExpr, p: &[f64]) -> Result<Jet1, EvalError> {
    let tape = Tape::compile(std::slice::from_ref(e));
    let mut v = Vec::new();
    let mut g = Vec::new();
    tape.eval(p, &mut v, &mut g)?;
    Ok(Jet1 { value: v[0], gradient: g })
}

pub fn eval_value(e: &ScalarExpr, p: &[f64]) -> Result<f64, EvalError> {
    eval_jet(e, p).map(|j| j.value)
}
