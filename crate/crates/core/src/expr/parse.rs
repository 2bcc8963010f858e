use super::{Func, ScalarExpr};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("coordinate {name} at position {pos} is out of range (dimension {dim})")]
    IndexOutOfRange { name: String, pos: usize, dim: usize },
}

/// Parses an expression over coordinates `x1..x{dim}`.
pub fn parse_expr(src: &str, dim: usize) -> Result<ScalarExpr, ParseError> {
    parse_expr_with_factors(src, dim, 0)
}

/// Parses an expression over `x1..x{dim}` and product factors `t1..t{factors}`;
/// factor `ta` becomes coordinate index `dim + a - 1`.
pub fn parse_expr_with_factors(
    src: &str,
    dim: usize,
    factors: usize,
) -> Result<ScalarExpr, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, dim, factors };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
    factors: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                let r = self.term()?;
                acc = acc.add(&r);
            } else if self.eat(b'-') {
                let r = self.term()?;
                acc = acc.sub(&r);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                let r = self.unary()?;
                acc = acc.mul(&r);
            } else if self.eat(b'/') {
                let r = self.unary()?;
                acc = acc.div(&r);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ScalarExpr, ParseError> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut base = self.primary()?;
        while self.eat(b'^') {
            let n = self.int_exponent()?;
            base = base.powi(n);
        }
        Ok(base)
    }

    fn int_exponent(&mut self) -> Result<i32, ParseError> {
        let parens = self.eat(b'(');
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer exponent"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let mut n: i32 = text.parse().map_err(|_| ParseError::Syntax {
            pos: start,
            msg: "exponent too large".into(),
        })?;
        if neg {
            n = -n;
        }
        if parens && !self.eat(b')') {
            return Err(self.err("expected ')' after exponent"));
        }
        Ok(n)
    }

    fn primary(&mut self) -> Result<ScalarExpr, ParseError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<ScalarExpr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(ScalarExpr::constant)
            .map_err(|_| ParseError::Syntax { pos: start, msg: format!("bad number '{}'", text) })
    }

    fn ident(&mut self) -> Result<ScalarExpr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "PI" => return Ok(ScalarExpr::constant(std::f64::consts::PI)),
            "E" => return Ok(ScalarExpr::constant(std::f64::consts::E)),
            _ => {}
        }
        if let Some(f) = Func::from_name(name) {
            if !self.eat(b'(') {
                return Err(self.err("expected '(' after function name"));
            }
            let a = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(ScalarExpr::func(f, &a));
        }
        let (kind, digits) = name.split_at(1);
        let index: Option<usize> = if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            digits.parse().ok()
        } else {
            None
        };
        match (kind, index) {
            ("x", Some(i)) if i >= 1 => {
                if i > self.dim {
                    return Err(ParseError::IndexOutOfRange { name: name.into(), pos: start, dim: self.dim });
                }
                Ok(ScalarExpr::var(i - 1))
            }
            ("t", Some(a)) if (1..=9).contains(&a) && digits.len() == 1 => {
                if a > self.factors {
                    return Err(ParseError::IndexOutOfRange {
                        name: name.into(),
                        pos: start,
                        dim: self.factors,
                    });
                }
                Ok(ScalarExpr::var(self.dim + a - 1))
            }
            _ => Err(ParseError::Syntax { pos: start, msg: format!("unknown identifier '{}'", name) }),
        }
    }
}
