use super::{Func, Node, ScalarExpr};
use std::collections::HashMap;

/// Exact symbolic partial derivative with respect to the zero-based coordinate `i`.
pub fn partial(e: &ScalarExpr, i: usize) -> ScalarExpr {
    let mut memo = HashMap::new();
    go(e, i, &mut memo)
}

fn go(e: &ScalarExpr, i: usize, memo: &mut HashMap<*const Node, ScalarExpr>) -> ScalarExpr {
    if let Some(d) = memo.get(&e.ptr()) {
        return d.clone();
    }
    let d = match e.node() {
        Node::Const(_) => ScalarExpr::zero(),
        Node::Var(j) => {
            if *j == i {
                ScalarExpr::one()
            } else {
                ScalarExpr::zero()
            }
        }
        Node::Neg(a) => go(a, i, memo).neg(),
        Node::Add(a, b) => go(a, i, memo).add(&go(b, i, memo)),
        Node::Sub(a, b) => go(a, i, memo).sub(&go(b, i, memo)),
        Node::Mul(a, b) => {
            let da = go(a, i, memo);
            let db = go(b, i, memo);
            da.mul(b).add(&a.mul(&db))
        }
        Node::Div(a, b) => {
            let da = go(a, i, memo);
            let db = go(b, i, memo);
            if db.is_zero() {
                da.div(b)
            } else {
                da.mul(b).sub(&a.mul(&db)).div(&b.powi(2))
            }
        }
        Node::Pow(a, n) => {
            let da = go(a, i, memo);
            if da.is_zero() {
                ScalarExpr::zero()
            } else {
                ScalarExpr::constant(*n as f64).mul(&a.powi(n - 1)).mul(&da)
            }
        }
        Node::Func(f, a) => {
            let da = go(a, i, memo);
            if da.is_zero() {
                ScalarExpr::zero()
            } else {
                let outer = match f {
                    Func::Sin => a.cos(),
                    Func::Cos => a.sin().neg(),
                    Func::Tan => ScalarExpr::one().add(&e.powi(2)),
                    Func::Exp => e.clone(),
                    Func::Log => ScalarExpr::one().div(a),
                    Func::Sqrt => ScalarExpr::constant(0.5).div(e),
                };
                outer.mul(&da)
            }
        }
    };
    memo.insert(e.ptr(), d.clone());
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{eval_value, parse_expr};

    #[test]
    fn elementary_rules() {
        let e = parse_expr("x1^2", 1).unwrap();
        assert_eq!(partial(&e, 0).to_string(), "2*x1");
        let s = parse_expr("sin(x1)", 1).unwrap();
        assert_eq!(partial(&s, 0).to_string(), "cos(x1)");
        assert!(partial(&s, 1).is_zero());
    }

    #[test]
    fn chain_rule_matches_values() {
        let e = parse_expr("sqrt(1 + x1^2)*log(2 + x2) / (3 + tan(x1*x2))", 2).unwrap();
        let p = [0.3, 0.7];
        let h = 1e-5;
        for i in 0..2 {
            let d = eval_value(&partial(&e, i), &p).unwrap();
            let mut a = p;
            let mut b = p;
            a[i] += h;
            b[i] -= h;
            let fd = (eval_value(&e, &a).unwrap() - eval_value(&e, &b).unwrap()) / (2.0 * h);
            assert!((d - fd).abs() < 1e-8, "{} vs {}", d, fd);
        }
    }
}
