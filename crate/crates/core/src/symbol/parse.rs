//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' exponent)?
//! exponent:= ['+' | '-'] INTEGER | '(' ['+' | '-'] INTEGER ')'
//! primary := NUMBER | 'x' | FUNC '(' expr ')' | '(' expr ')'
//! ```
//!
//! Error offsets are 1-based byte positions.

use crate::error::{Error, Result};

use super::expr::{Func, Node, SymbolExpr};

const MAX_EXPONENT: i64 = 1024;

pub fn parse(text: &str) -> Result<SymbolExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let node = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error_here(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(SymbolExpr::new(node))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error_here(&self, message: impl Into<String>) -> Error {
        Error::Syntax { offset: self.pos + 1, message: message.into() }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.peek() {
            Some(b) if b == c => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => Err(self.error_here(format!("expected `{}`, found `{}`", c as char, b as char))),
            None => Err(self.error_here(format!("expected `{}`, found end of input", c as char))),
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let k = self.exponent()?;
        if self.peek() == Some(b'^') {
            return Err(self.error_here("chained exponents need parentheses"));
        }
        Ok(Node::Pow(Box::new(base), k))
    }

    fn exponent(&mut self) -> Result<i32> {
        let parenthesized = self.peek() == Some(b'(');
        if parenthesized {
            self.pos += 1;
        }
        let negative = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error_here("integer exponent expected"));
        }
        if matches!(self.src.get(self.pos), Some(b'.' | b'e' | b'E')) {
            return Err(Error::Syntax { offset: start + 1, message: "exponent must be an integer".into() });
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let magnitude: i64 = digits.parse().unwrap_or(i64::MAX);
        if magnitude > MAX_EXPONENT {
            return Err(Error::Syntax { offset: start + 1, message: format!("exponent exceeds {MAX_EXPONENT}") });
        }
        if parenthesized {
            self.expect(b')')?;
        }
        Ok(if negative { -(magnitude as i32) } else { magnitude as i32 })
    }

    fn primary(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.error_here("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(c) => Err(self.error_here(format!("unexpected `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut mantissa = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            mantissa += digits(self);
        }
        if mantissa == 0 {
            return Err(Error::Syntax { offset: start + 1, message: "malformed number".into() });
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
                return Err(Error::Syntax { offset: save + 1, message: "malformed exponent in number".into() });
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text
            .parse()
            .map_err(|_| Error::Syntax { offset: start + 1, message: format!("malformed number `{text}`") })?;
        if !value.is_finite() {
            return Err(Error::Syntax { offset: start + 1, message: "number out of range".into() });
        }
        Ok(Node::Const(value))
    }

    fn identifier(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if name == "x" {
            return Ok(Node::Var);
        }
        let Some(func) = Func::from_name(name) else {
            return Err(Error::UnknownIdentifier { name: name.to_string(), offset: start + 1 });
        };
        self.expect(b'(')?;
        let arg = self.expr()?;
        self.expect(b')')?;
        Ok(Node::Call(func, Box::new(arg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(s: &str) -> Node {
        parse(s).unwrap().root().clone()
    }

    fn c(v: f64) -> Box<Node> {
        Box::new(Node::Const(v))
    }

    #[test]
    fn literal_structure() {
        assert_eq!(node("x"), Node::Var);
        assert_eq!(node("0.5*x+1"), Node::Add(Box::new(Node::Mul(c(0.5), Box::new(Node::Var))), c(1.0)));
        assert_eq!(node("x^2+1"), Node::Add(Box::new(Node::Pow(Box::new(Node::Var), 2)), c(1.0)));
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(node("1.5e-3"), Node::Const(1.5e-3));
        assert_eq!(node("2E2"), Node::Const(200.0));
        assert_eq!(node(".25"), Node::Const(0.25));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let f = parse("-x^2").unwrap();
        assert_eq!(f.eval(3.0).unwrap(), -9.0);
        assert_eq!(parse("x^-1").unwrap().eval(4.0).unwrap(), 0.25);
        assert_eq!(parse("x^(-2)").unwrap().eval(2.0).unwrap(), 0.25);
    }

    #[test]
    fn double_caret_offset() {
        assert_eq!(parse("x^^2").unwrap_err(), Error::Syntax { offset: 3, message: "integer exponent expected".into() });
    }

    #[test]
    fn rejects_fractional_exponent() {
        assert!(matches!(parse("x^2.5"), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse("x^2^3"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(parse("2*sqrt(x)").unwrap_err(), Error::UnknownIdentifier { name: "sqrt".into(), offset: 3 });
        assert!(matches!(parse("y+1"), Err(Error::UnknownIdentifier { .. })));
    }

    #[test]
    fn malformed_inputs() {
        for s in ["", "x+", "(x", "sin x", "1..2", "x)", "3e", "2 3"] {
            assert!(matches!(parse(s), Err(Error::Syntax { .. })), "{s:?}");
        }
    }
}
