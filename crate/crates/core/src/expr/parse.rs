//! Recursive-descent parser for right-hand sides such as `y'^3 + 3*x*y'`.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' ['-'] integer)?
//! atom   := integer | ident | "y'" | '(' expr ')' | '-' factor
//! ident  := letter (letter|digit)*
//! ```

use num_bigint::BigInt;

use super::{Expr, ExprError, Poly, Symbol};

pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
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

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.factor()?;
            acc = if c == b'*' {
                acc * rhs
            } else {
                acc.checked_div(&rhs)
                    .map_err(|_| ExprError::ZeroDenominatorLiteral { offset: at })?
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            let at = self.pos;
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            self.skip_ws();
            let n = self.integer()?;
            let e: i32 = n
                .try_into()
                .map_err(|_| ExprError::Syntax { offset: at, message: "exponent too large".into() })?;
            let e = if neg { -e } else { e };
            return base
                .pow(e)
                .map_err(|_| ExprError::ZeroDenominatorLiteral { offset: at });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Expr::from_poly(Poly::constant(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if self.src.get(self.pos) == Some(&b'\'') {
                    if name != "y" {
                        return Err(self.error("only y' may carry a prime"));
                    }
                    self.pos += 1;
                    if self.src.get(self.pos) == Some(&b'\'') {
                        return Err(self.error("higher derivatives of y are not coordinates"));
                    }
                    return Ok(Expr::p());
                }
                Ok(Expr::sym(symbol_for(name)))
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(digits.parse().expect("digits parse"))
    }
}

fn symbol_for(name: &str) -> Symbol {
    match name {
        "x" => Symbol::X,
        "y" => Symbol::Y,
        "p" => Symbol::P,
        "u1" => Symbol::U1,
        "u2" => Symbol::U2,
        "u3" => Symbol::U3,
        "t1" => Symbol::T1,
        "v1" => Symbol::V1,
        "v3" => Symbol::V3,
        other => Symbol::free(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_forms() {
        assert!(parse_expr("0").unwrap().is_zero());
        let e = parse_expr("y'^3 + 3*x*y'").unwrap();
        let p = Expr::p();
        let expected = &(&p * &p) * &p + Expr::int(3) * Expr::x() * p.clone();
        assert_eq!(e, expected);
        let e = parse_expr("-3*y'/(2*x)").unwrap();
        assert_eq!(e, Expr::int(-3) * p / (Expr::int(2) * Expr::x()));
    }

    #[test]
    fn p_and_prime_agree() {
        assert_eq!(parse_expr("p^2").unwrap(), parse_expr("y' ^ 2").unwrap());
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(parse_expr("-x^2").unwrap(), -(Expr::x() * Expr::x()));
        assert_eq!(parse_expr("2*-x").unwrap(), Expr::int(-2) * Expr::x());
    }

    #[test]
    fn free_constants() {
        let e = parse_expr("(y' + b)^3").unwrap();
        assert!(e.symbols().contains(&Symbol::free("b")));
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(
            parse_expr("x + * y"),
            Err(ExprError::Syntax { offset: 4, message: "unexpected character".into() })
        );
        assert_eq!(parse_expr("1/0"), Err(ExprError::ZeroDenominatorLiteral { offset: 1 }));
        assert_eq!(parse_expr("x/(y - y)"), Err(ExprError::ZeroDenominatorLiteral { offset: 1 }));
        assert!(matches!(parse_expr("(x"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("x y"), Err(ExprError::Syntax { offset: 2, .. })));
    }
}
