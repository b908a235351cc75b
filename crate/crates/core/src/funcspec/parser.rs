//! Recursive-descent parser for the function language.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := number | 's' | '(' expr ')'
//!         | 'exp' '(' number '*' 's' ')'
//!         | 'blaschke' '(' number (',' number)? ')'
//! number := ['+'|'-'] real [ 'i' | ('+'|'-') real 'i' ]
//! ```
//!
//! A complex literal `a+bi` is one token only when written without spaces,
//! so `1+2i*s` reads as `(1+2i)*s`; write `1+(2i)*s` for the other grouping.

use num_complex::Complex64;

use super::ast::Expr;
use crate::error::{Error, Result};

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<u8> {
        self.src.get(self.pos + offset).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", ch as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::add(lhs, self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::mul(lhs, self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::div(lhs, self.factor()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() => self.keyword(),
            Some(c) if c.is_ascii_digit() || matches!(c, b'.' | b'+' | b'-') => {
                Ok(Expr::Const(self.number()?))
            }
            Some(c) => Err(self.error(format!("unexpected character '{}'", c as char))),
        }
    }

    fn keyword(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match word {
            "s" => Ok(Expr::Var),
            "exp" => {
                self.expect(b'(')?;
                let at = self.pos;
                let c = self.number()?;
                if c.im != 0.0 {
                    return Err(Error::HinfViolation {
                        subterm: String::from_utf8_lossy(&self.src[start..self.pos]).into_owned(),
                        reason: format!("exp coefficient must be real, got {c} at byte {at}"),
                    });
                }
                self.expect(b'*')?;
                self.skip_ws();
                if self.peek() != Some(b's')
                    || self.peek_at(1).is_some_and(|c| c.is_ascii_alphanumeric())
                {
                    return Err(self.error("expected 's' in exp(c*s)"));
                }
                self.pos += 1;
                self.expect(b')')?;
                Ok(Expr::Exp(c.re))
            }
            "blaschke" => {
                self.expect(b'(')?;
                let first = self.number()?;
                self.skip_ws();
                let a = if self.peek() == Some(b',') {
                    self.pos += 1;
                    let second = self.number()?;
                    if first.im != 0.0 || second.im != 0.0 {
                        return Err(self.error("two-argument blaschke(re, im) takes real numbers"));
                    }
                    Complex64::new(first.re, second.re)
                } else {
                    first
                };
                self.expect(b')')?;
                Ok(Expr::Blaschke(a))
            }
            _ => {
                self.pos = start;
                Err(self.error(format!("unknown identifier '{word}'")))
            }
        }
    }

    fn sign(&mut self) -> f64 {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1.0
            }
            Some(b'+') => {
                self.pos += 1;
                1.0
            }
            _ => 1.0,
        }
    }

    /// Unsigned real literal starting exactly at the cursor, if any.
    fn real_literal(&mut self) -> Option<f64> {
        let start = self.pos;
        let mut digits = 0;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            digits += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
                digits += 1;
            }
        }
        if digits == 0 {
            self.pos = start;
            return None;
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == exp_start {
                self.pos = mark;
            }
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
    }

    fn imaginary_unit_follows(&self) -> bool {
        self.peek() == Some(b'i') && !self.peek_at(1).is_some_and(|c| c.is_ascii_alphanumeric())
    }

    fn number(&mut self) -> Result<Complex64> {
        self.skip_ws();
        let start = self.pos;
        let sign = self.sign();
        let Some(mag) = self.real_literal() else {
            self.pos = start;
            return Err(self.error("expected a number"));
        };
        let re = sign * mag;
        if self.imaginary_unit_follows() {
            self.pos += 1;
            return Ok(Complex64::new(0.0, re));
        }
        // `a+bi` / `a-bi` without intervening spaces.
        if matches!(self.peek(), Some(b'+' | b'-')) {
            let mark = self.pos;
            let isign = self.sign();
            if let Some(im) = self.real_literal() {
                if self.imaginary_unit_follows() {
                    self.pos += 1;
                    return Ok(Complex64::new(re, isign * im));
                }
            }
            self.pos = mark;
        }
        Ok(Complex64::new(re, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Expr {
        Expr::constant(re)
    }

    #[test]
    fn grammar_readings() {
        assert_eq!(parse_expr("1").unwrap(), c(1.0));
        assert_eq!(
            parse_expr("(1+s)/(1-s)").unwrap(),
            Expr::div(Expr::add(c(1.0), Expr::Var), Expr::sub(c(1.0), Expr::Var))
        );
        // mul/div bind tighter and everything is left-associative.
        assert_eq!(
            parse_expr("1-s-2*s/3").unwrap(),
            Expr::sub(
                Expr::sub(c(1.0), Expr::Var),
                Expr::div(Expr::mul(c(2.0), Expr::Var), c(3.0))
            )
        );
        assert_eq!(parse_expr(" exp( 2 * s ) ").unwrap(), Expr::Exp(2.0));
        assert_eq!(
            parse_expr("blaschke(-1)").unwrap(),
            Expr::Blaschke(Complex64::new(-1.0, 0.0))
        );
        assert_eq!(
            parse_expr("blaschke(-1, 2.5)").unwrap(),
            Expr::Blaschke(Complex64::new(-1.0, 2.5))
        );
        assert_eq!(
            parse_expr("blaschke(-1-2i)").unwrap(),
            Expr::Blaschke(Complex64::new(-1.0, -2.0))
        );
    }

    #[test]
    fn number_forms() {
        assert_eq!(parse_expr("2.5e-3").unwrap(), c(2.5e-3));
        assert_eq!(parse_expr("-1").unwrap(), c(-1.0));
        assert_eq!(parse_expr("3i").unwrap(), Expr::Const(Complex64::new(0.0, 3.0)));
        assert_eq!(parse_expr("1+2i").unwrap(), Expr::Const(Complex64::new(1.0, 2.0)));
        assert_eq!(
            parse_expr("1 + 2i").unwrap(),
            Expr::add(c(1.0), Expr::Const(Complex64::new(0.0, 2.0)))
        );
        assert_eq!(parse_expr("1-2").unwrap(), Expr::sub(c(1.0), c(2.0)));
        assert_eq!(parse_expr("(0-1)/(s-1)").unwrap(), Expr::div(
            Expr::sub(c(0.0), c(1.0)),
            Expr::sub(Expr::Var, c(1.0))
        ));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let cases = [
            ("", 0),
            ("1+", 2),
            ("(1+s", 4),
            ("1 $ 2", 2),
            ("foo(s)", 0),
            ("exp(2*t)", 6),
            ("1 2", 2),
            ("blaschke(-1", 11),
        ];
        for (text, offset) in cases {
            match parse_expr(text) {
                Err(Error::Syntax { offset: o, .. }) => assert_eq!(o, offset, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn complex_exp_coefficient_is_a_violation() {
        assert!(matches!(parse_expr("exp(1+2i*s)"), Err(Error::HinfViolation { .. })));
    }
}
