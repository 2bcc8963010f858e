//! Closed-form scalar expressions over coordinates.
//!
//! Trees are immutable and reference counted, so subexpressions are shared
//! freely between fields. Construction goes through folding constructors
//! that drop additive zeros and multiplicative ones.

mod diff;
mod eval;
mod parse;

use std::fmt;
use std::ops;
use std::sync::Arc;

pub use diff::partial;
pub use eval::{eval_jet, eval_value, EvalError, Jet1, Tape};
pub use parse::{parse_expr, parse_expr_with_factors, ParseError};

/// Elementary functions admitted by the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub(crate) fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
        }
    }
}

#[derive(Debug)]
pub enum Node {
    Const(f64),
    /// Zero-based coordinate index.
    Var(usize),
    Neg(ScalarExpr),
    Add(ScalarExpr, ScalarExpr),
    Sub(ScalarExpr, ScalarExpr),
    Mul(ScalarExpr, ScalarExpr),
    Div(ScalarExpr, ScalarExpr),
    Pow(ScalarExpr, i32),
    Func(Func, ScalarExpr),
}

#[derive(Clone, Debug)]
pub struct ScalarExpr(Arc<Node>);

impl ScalarExpr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn ptr(&self) -> *const Node {
        Arc::as_ptr(&self.0)
    }

    pub fn constant(c: f64) -> Self {
        ScalarExpr(Arc::new(Node::Const(c)))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// Coordinate with zero-based index `i`.
    pub fn var(i: usize) -> Self {
        ScalarExpr(Arc::new(Node::Var(i)))
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    /// Largest coordinate index referenced plus one (0 for constants).
    pub fn max_var(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![self.clone()];
        let mut seen = std::collections::HashSet::new();
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr()) {
                continue;
            }
            match e.node() {
                Node::Const(_) => {}
                Node::Var(i) => best = best.max(i + 1),
                Node::Neg(a) | Node::Pow(a, _) | Node::Func(_, a) => stack.push(a.clone()),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
            }
        }
        best
    }

    pub fn neg(&self) -> Self {
        match self.node() {
            Node::Const(c) => Self::constant(-c),
            Node::Neg(a) => a.clone(),
            _ => ScalarExpr(Arc::new(Node::Neg(self.clone()))),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Self::constant(a + b),
            (Some(a), _) if a == 0.0 => o.clone(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => {
                if let Node::Neg(b) = o.node() {
                    return ScalarExpr(Arc::new(Node::Sub(self.clone(), b.clone())));
                }
                ScalarExpr(Arc::new(Node::Add(self.clone(), o.clone())))
            }
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Self::constant(a - b),
            (Some(a), _) if a == 0.0 => o.neg(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => {
                if let Node::Neg(b) = o.node() {
                    return self.add(b);
                }
                ScalarExpr(Arc::new(Node::Sub(self.clone(), o.clone())))
            }
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Self::constant(a * b),
            (Some(a), _) | (_, Some(a)) if a == 0.0 => Self::zero(),
            (Some(a), _) if a == 1.0 => o.clone(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            (Some(a), _) if a == -1.0 => o.neg(),
            (_, Some(b)) if b == -1.0 => self.neg(),
            _ => match (self.node(), o.node()) {
                (Node::Neg(a), Node::Neg(b)) => a.mul(b),
                (Node::Neg(a), _) => a.mul(o).neg(),
                (_, Node::Neg(b)) => self.mul(b).neg(),
                _ => ScalarExpr(Arc::new(Node::Mul(self.clone(), o.clone()))),
            },
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => Self::constant(a / b),
            (Some(a), _) if a == 0.0 => Self::zero(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => ScalarExpr(Arc::new(Node::Div(self.clone(), o.clone()))),
        }
    }

    pub fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        if n == 1 {
            return self.clone();
        }
        if let Some(c) = self.as_const() {
            let v = c.powi(n);
            if v.is_finite() {
                return Self::constant(v);
            }
        }
        ScalarExpr(Arc::new(Node::Pow(self.clone(), n)))
    }

    pub fn func(f: Func, a: &Self) -> Self {
        if let Some(c) = a.as_const() {
            let v = f.apply(c);
            if v.is_finite() {
                return Self::constant(v);
            }
        }
        ScalarExpr(Arc::new(Node::Func(f, a.clone())))
    }

    pub fn sin(&self) -> Self {
        Self::func(Func::Sin, self)
    }
    pub fn cos(&self) -> Self {
        Self::func(Func::Cos, self)
    }
    pub fn tan(&self) -> Self {
        Self::func(Func::Tan, self)
    }
    pub fn exp(&self) -> Self {
        Self::func(Func::Exp, self)
    }
    pub fn ln(&self) -> Self {
        Self::func(Func::Log, self)
    }
    pub fn sqrt(&self) -> Self {
        Self::func(Func::Sqrt, self)
    }

    /// Sum of a list, folding zeros.
    pub fn sum<'a, I: IntoIterator<Item = &'a ScalarExpr>>(items: I) -> Self {
        items.into_iter().fold(Self::zero(), |acc, e| acc.add(e))
    }

    /// Renders the expression, printing indices `>= base_dim` as product factors `t1, t2, ...`.
    pub fn display_with_factors(&self, base_dim: usize) -> String {
        let mut s = String::new();
        write_expr(self, &mut s, 0, Some(base_dim));
        s
    }
}

impl From<f64> for ScalarExpr {
    fn from(c: f64) -> Self {
        ScalarExpr::constant(c)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl ops::$tr<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, o: ScalarExpr) -> ScalarExpr {
                ScalarExpr::$inner(&self, &o)
            }
        }
        impl<'a> ops::$tr<&'a ScalarExpr> for &'a ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, o: &'a ScalarExpr) -> ScalarExpr {
                ScalarExpr::$inner(self, o)
            }
        }
        impl<'a> ops::$tr<&'a ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, o: &'a ScalarExpr) -> ScalarExpr {
                ScalarExpr::$inner(&self, o)
            }
        }
        impl ops::$tr<f64> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, o: f64) -> ScalarExpr {
                ScalarExpr::$inner(&self, &ScalarExpr::constant(o))
            }
        }
        impl<'a> ops::$tr<f64> for &'a ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, o: f64) -> ScalarExpr {
                ScalarExpr::$inner(self, &ScalarExpr::constant(o))
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl ops::Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::neg(&self)
    }
}

impl<'a> ops::Neg for &'a ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::neg(self)
    }
}

fn prec(n: &Node) -> u8 {
    match n {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(..) => 3,
        Node::Pow(..) => 4,
        Node::Const(c) if *c < 0.0 => 3,
        _ => 5,
    }
}

fn write_const(c: f64, out: &mut String) {
    if c == std::f64::consts::PI {
        out.push_str("PI");
    } else if c == std::f64::consts::E {
        out.push_str("E");
    } else if c < 0.0 {
        out.push('-');
        write_const(-c, out);
    } else {
        out.push_str(&format!("{}", c));
    }
}

fn write_expr(e: &ScalarExpr, out: &mut String, min_prec: u8, factors: Option<usize>) {
    let p = prec(e.node());
    let paren = p < min_prec;
    if paren {
        out.push('(');
    }
    match e.node() {
        Node::Const(c) => write_const(*c, out),
        Node::Var(i) => match factors {
            Some(base) if *i >= base => out.push_str(&format!("t{}", i - base + 1)),
            _ => out.push_str(&format!("x{}", i + 1)),
        },
        Node::Neg(a) => {
            out.push('-');
            write_expr(a, out, 4, factors);
        }
        Node::Add(a, b) => {
            write_expr(a, out, 1, factors);
            out.push_str(" + ");
            write_expr(b, out, 2, factors);
        }
        Node::Sub(a, b) => {
            write_expr(a, out, 1, factors);
            out.push_str(" - ");
            write_expr(b, out, 2, factors);
        }
        Node::Mul(a, b) => {
            write_expr(a, out, 2, factors);
            out.push('*');
            write_expr(b, out, 3, factors);
        }
        Node::Div(a, b) => {
            write_expr(a, out, 2, factors);
            out.push('/');
            write_expr(b, out, 3, factors);
        }
        Node::Pow(a, n) => {
            write_expr(a, out, 5, factors);
            if *n < 0 {
                out.push_str(&format!("^(-{})", -(*n as i64)));
            } else {
                out.push_str(&format!("^{}", n));
            }
        }
        Node::Func(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_expr(a, out, 0, factors);
            out.push(')');
        }
    }
    if paren {
        out.push(')');
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(self, &mut s, 0, None);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_drops_neutral_elements() {
        let x = ScalarExpr::var(0);
        assert!((&x * &ScalarExpr::zero()).is_zero());
        assert_eq!((&x + &ScalarExpr::zero()).ptr(), x.ptr());
        assert_eq!((&x * &ScalarExpr::one()).ptr(), x.ptr());
        assert_eq!(x.neg().neg().ptr(), x.ptr());
        assert_eq!((ScalarExpr::constant(2.0) * 3.0).as_const(), Some(6.0));
    }

    #[test]
    fn display_round_trips_precedence() {
        let x = ScalarExpr::var(0);
        let y = ScalarExpr::var(1);
        let e = (&x - &(&y + &x)) * y.powi(2);
        assert_eq!(e.to_string(), "(x1 - (x2 + x1))*x2^2");
        let n = (&x / &(&y * &x)).neg();
        assert_eq!(n.to_string(), "-(x1/(x2*x1))");
    }

    #[test]
    fn factor_display() {
        let t = ScalarExpr::var(3);
        assert_eq!(t.exp().display_with_factors(3), "exp(t1)");
    }
}
