use std::fmt;

use super::{Expr, ExprError};

/// `a + b·r` in the quadratic extension by `r` with `r² = radicand`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadExtExpr {
    pub a: Expr,
    pub b: Expr,
    pub radicand: Expr,
}

impl QuadExtExpr {
    pub fn new(a: Expr, b: Expr, radicand: Expr) -> Self {
        QuadExtExpr { a, b, radicand }
    }

    pub fn from_base(a: Expr, radicand: &Expr) -> Self {
        QuadExtExpr::new(a, Expr::zero(), radicand.clone())
    }

    /// The generator `r` itself.
    pub fn root(radicand: &Expr) -> Self {
        QuadExtExpr::new(Expr::zero(), Expr::one(), radicand.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn same_field(&self, other: &Self) {
        assert_eq!(self.radicand, other.radicand, "quadratic extensions differ");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_field(other);
        QuadExtExpr::new(&self.a + &other.a, &self.b + &other.b, self.radicand.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_field(other);
        QuadExtExpr::new(&self.a - &other.a, &self.b - &other.b, self.radicand.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_field(other);
        let a = &(&self.a * &other.a) + &(&(&self.b * &other.b) * &self.radicand);
        let b = &(&self.a * &other.b) + &(&self.b * &other.a);
        QuadExtExpr::new(a, b, self.radicand.clone())
    }

    pub fn scale(&self, k: &Expr) -> Self {
        QuadExtExpr::new(&self.a * k, &self.b * k, self.radicand.clone())
    }

    /// `a² − b²ρ`; the element is invertible iff this is nonzero.
    pub fn norm(&self) -> Expr {
        &(&self.a * &self.a) - &(&(&self.b * &self.b) * &self.radicand)
    }

    pub fn inverse(&self) -> Result<Self, ExprError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(ExprError::NotInvertible);
        }
        let inv = n.inverse()?;
        Ok(QuadExtExpr::new(&self.a * &inv, -(&self.b * &inv), self.radicand.clone()))
    }
}

impl fmt::Display for QuadExtExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "({})*r", self.b),
            (false, false) => write!(f, "{} + ({})*r", self.a, self.b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn root_squares_to_radicand() {
        let rho = parse_expr("-2*x*y'").unwrap();
        let r = QuadExtExpr::root(&rho);
        let sq = r.mul(&r);
        assert_eq!(sq, QuadExtExpr::from_base(rho.clone(), &rho));
    }

    #[test]
    fn inverse_round_trip() {
        let rho = parse_expr("x + 1").unwrap();
        let z = QuadExtExpr::new(parse_expr("y").unwrap(), parse_expr("2").unwrap(), rho.clone());
        let prod = z.mul(&z.inverse().unwrap());
        assert_eq!(prod, QuadExtExpr::from_base(Expr::one(), &rho));
    }

    #[test]
    fn zero_norm_is_not_invertible() {
        let rho = parse_expr("x^2").unwrap();
        let z = QuadExtExpr::new(parse_expr("x").unwrap(), Expr::one(), rho);
        assert_eq!(z.inverse(), Err(ExprError::NotInvertible));
    }
}
