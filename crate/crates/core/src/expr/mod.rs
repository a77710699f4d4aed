//! Exact rational functions over ℚ in a fixed symbol universe.

mod gcd;
mod parse;
mod poly;
mod quad;
mod symbol;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use gcd::gcd as poly_gcd;
pub use parse::parse_expr;
pub use poly::{Monomial, Poly};
pub use quad::QuadExtExpr;
pub use symbol::{JetFn, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("division by zero at byte {offset}")]
    ZeroDenominatorLiteral { offset: usize },
    #[error("pole at evaluation point")]
    Pole,
    #[error("unbound symbol {0}")]
    Unbound(Symbol),
    #[error("element is not invertible")]
    NotInvertible,
}

/// A canonical reduced fraction `numerator / denominator` of integer
/// polynomials.
///
/// The numerator and denominator are coprime, the denominator has a positive
/// leading coefficient, and zero is stored as `0 / 1`. Equality is equality
/// of canonical forms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn int(n: i64) -> Self {
        Expr::from_poly(Poly::constant(BigInt::from(n)))
    }

    /// `n / d`; panics when `d == 0`.
    pub fn rational(n: i64, d: i64) -> Self {
        Expr::from_fraction(Poly::constant(BigInt::from(n)), Poly::constant(BigInt::from(d)))
            .expect("nonzero denominator")
    }

    pub fn from_bigrational(q: &BigRational) -> Self {
        Expr::from_fraction(Poly::constant(q.numer().clone()), Poly::constant(q.denom().clone()))
            .expect("rational has nonzero denominator")
    }

    pub fn sym(s: Symbol) -> Self {
        Expr::from_poly(Poly::var(s))
    }

    pub fn x() -> Self {
        Expr::sym(Symbol::X)
    }
    pub fn y() -> Self {
        Expr::sym(Symbol::Y)
    }
    pub fn p() -> Self {
        Expr::sym(Symbol::P)
    }
    pub fn u1() -> Self {
        Expr::sym(Symbol::U1)
    }
    pub fn u2() -> Self {
        Expr::sym(Symbol::U2)
    }
    pub fn u3() -> Self {
        Expr::sym(Symbol::U3)
    }
    pub fn fjet(i: u16, j: u16, k: u16) -> Self {
        Expr::sym(Symbol::fjet(i, j, k))
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            num: p,
            den: Poly::one(),
        }
    }

    /// Canonicalize `num / den`.
    pub fn from_fraction(num: Poly, den: Poly) -> Result<Self, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Expr::zero());
        }
        let (num, den) = if den.is_one() {
            (num, den)
        } else {
            let (_, n, d) = gcd::cofactors(&num, &den);
            (n, d)
        };
        Ok(Expr::fix_sign(num, den))
    }

    fn fix_sign(num: Poly, den: Poly) -> Self {
        if den.leading_coeff_sign_negative() {
            Expr {
                num: num.neg(),
                den: den.neg(),
            }
        } else {
            Expr { num, den }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The value as a rational constant, if the expression has no symbols.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(BigRational::new(n, d))
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut s = self.num.symbols();
        s.extend(self.den.symbols());
        s
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.num.contains(s) || self.den.contains(s)
    }

    /// Maximum total degree of numerator and denominator.
    pub fn degree(&self) -> u32 {
        self.num.total_degree().max(self.den.total_degree())
    }

    pub fn checked_div(&self, rhs: &Expr) -> Result<Expr, ExprError> {
        if rhs.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(self * &rhs.inverse_unchecked())
    }

    pub fn inverse(&self) -> Result<Expr, ExprError> {
        if self.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(self.inverse_unchecked())
    }

    fn inverse_unchecked(&self) -> Expr {
        Expr::fix_sign(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i32) -> Result<Expr, ExprError> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let e = e as u32;
        Ok(Expr::fix_sign(self.num.pow(e), self.den.pow(e)))
    }

    /// Partial derivative by the quotient rule. Jet symbols depend on
    /// x, y and p through index bumps; every other symbol is independent.
    pub fn partial(&self, s: &Symbol) -> Expr {
        let dn = self.num.partial(s);
        if self.den.is_constant() {
            return Expr::from_fraction(dn, self.den.clone()).expect("nonzero denominator");
        }
        let dd = self.den.partial(s);
        if dd.is_zero() {
            return Expr::from_fraction(dn, self.den.clone()).expect("nonzero denominator");
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Expr::from_fraction(num, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// Simultaneous substitution of symbols by expressions.
    pub fn substitute(&self, subs: &BTreeMap<Symbol, Expr>) -> Result<Expr, ExprError> {
        if subs.is_empty() || !self.symbols().iter().any(|s| subs.contains_key(s)) {
            return Ok(self.clone());
        }
        let mut exps: HashMap<Symbol, u32> = HashMap::new();
        for p in [&self.num, &self.den] {
            for (m, _) in p.terms() {
                for (s, e) in m.factors() {
                    if subs.contains_key(s) {
                        let entry = exps.entry(s.clone()).or_insert(0);
                        *entry = (*entry).max(*e);
                    }
                }
            }
        }
        let n = substitute_poly(&self.num, subs, &exps);
        let d = substitute_poly(&self.den, subs, &exps);
        Expr::from_fraction(n, d)
    }

    pub fn substitute_one(&self, s: Symbol, value: &Expr) -> Result<Expr, ExprError> {
        let mut m = BTreeMap::new();
        m.insert(s, value.clone());
        self.substitute(&m)
    }

    /// Replace every jet of `func` by the matching partial derivative of `value`.
    pub fn substitute_jet_fn(&self, func: JetFn, value: &Expr) -> Expr {
        let jets: Vec<Symbol> = self
            .symbols()
            .into_iter()
            .filter(|s| matches!(s, Symbol::Jet(g, ..) if *g == func))
            .collect();
        if jets.is_empty() {
            return self.clone();
        }
        let mut subs = BTreeMap::new();
        for s in jets {
            if let Symbol::Jet(_, i, j, k) = s {
                subs.insert(s.clone(), jet_of(value, i, j, k));
            }
        }
        self.substitute(&subs).expect("jet substitution keeps denominators nonzero")
    }

    /// Replace every jet of `f` by the matching partial of a concrete right-hand side.
    pub fn instantiate_jets(&self, f_concrete: &Expr) -> Expr {
        self.substitute_jet_fn(JetFn::F, f_concrete)
    }

    /// Evaluate at an exact rational point.
    pub fn eval(&self, point: &BTreeMap<Symbol, BigRational>) -> Result<BigRational, ExprError> {
        let lookup = |s: &Symbol| point.get(s).cloned();
        let d = self.den.eval(&lookup).map_err(ExprError::Unbound)?;
        let n = self.num.eval(&lookup).map_err(ExprError::Unbound)?;
        if d.is_zero() {
            return Err(ExprError::Pole);
        }
        Ok(n / d)
    }

    /// Coefficients of `self` as a polynomial in `s`, if the denominator is
    /// free of `s`.
    pub fn coefficients_in(&self, s: &Symbol) -> Option<Vec<Expr>> {
        if self.den.contains(s) {
            return None;
        }
        Some(
            self.num
                .coefficients_in(s)
                .into_iter()
                .map(|c| Expr::from_fraction(c, self.den.clone()).expect("nonzero denominator"))
                .collect(),
        )
    }

    /// Sign of a nonzero constant expression.
    pub fn sign(&self) -> Option<i32> {
        let q = self.as_rational()?;
        Some(if q.is_zero() {
            0
        } else if q.is_positive() {
            1
        } else {
            -1
        })
    }
}

/// ∂x^i ∂y^j ∂p^k of `value`.
pub fn jet_of(value: &Expr, i: u16, j: u16, k: u16) -> Expr {
    let mut e = value.clone();
    for _ in 0..i {
        e = e.partial(&Symbol::X);
    }
    for _ in 0..j {
        e = e.partial(&Symbol::Y);
    }
    for _ in 0..k {
        e = e.partial(&Symbol::P);
    }
    e
}

/// `p` with symbols substituted, scaled by the product of substituted
/// denominators raised to their maximal exponents.
fn substitute_poly(p: &Poly, subs: &BTreeMap<Symbol, Expr>, exps: &HashMap<Symbol, u32>) -> Poly {
    let mut num_pows: HashMap<(Symbol, u32), Poly> = HashMap::new();
    let mut den_pows: HashMap<(Symbol, u32), Poly> = HashMap::new();
    let pow_of = |cache: &mut HashMap<(Symbol, u32), Poly>, s: &Symbol, base: &Poly, e: u32| {
        cache
            .entry((s.clone(), e))
            .or_insert_with(|| base.pow(e))
            .clone()
    };
    let mut acc = Poly::zero();
    for (m, c) in p.terms() {
        let mut kept = Vec::new();
        let mut t = Poly::one();
        let mut seen: Vec<&Symbol> = Vec::new();
        for (s, e) in m.factors() {
            if let Some(v) = subs.get(s) {
                seen.push(s);
                let max = exps[s];
                t = t.mul(&pow_of(&mut num_pows, s, v.numerator(), *e));
                t = t.mul(&pow_of(&mut den_pows, s, v.denominator(), max - e));
            } else {
                kept.push((s.clone(), *e));
            }
        }
        for (s, max) in exps {
            if !seen.contains(&s) {
                t = t.mul(&pow_of(&mut den_pows, s, subs[s].denominator(), *max));
            }
        }
        acc = acc.add(&t.mul_term(&Monomial::from_factors(kept), c));
    }
    acc
}

fn wrap(p: &Poly) -> String {
    let atomic = match p.terms() {
        [(m, c)] if m.is_one() => !c.is_negative(),
        [(m, c)] => c.is_one() && m.factors().len() == 1 && m.factors()[0].1 == 1,
        _ => false,
    };
    if atomic {
        p.to_string()
    } else {
        format!("({p})")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
        }
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::sym(s)
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return Expr::from_poly(self.num.add(&rhs.num));
            }
            return Expr::from_fraction(self.num.add(&rhs.num), self.den.clone())
                .expect("nonzero denominator");
        }
        let (_, d1, d2) = gcd::cofactors(&self.den, &rhs.den);
        let num = self.num.mul(&d2).add(&rhs.num.mul(&d1));
        let den = self.den.mul(&d2);
        Expr::from_fraction(num, den).expect("nonzero denominator")
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Expr::from_poly(self.num.mul(&rhs.num));
        }
        let (_, n1, d2) = gcd::cofactors(&self.num, &rhs.den);
        let (_, n2, d1) = gcd::cofactors(&rhs.num, &self.den);
        Expr::fix_sign(n1.mul(&n2), d1.mul(&d2))
    }
}

impl Div for &Expr {
    type Output = Expr;
    /// Panics on division by the zero expression; use [`Expr::checked_div`]
    /// for a fallible version.
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("division by zero expression")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn gcd_cancellation() {
        let x = Expr::x();
        let y = Expr::y();
        let prod = (&x + &y) * (&x - &y);
        assert_eq!(prod, e("x^2 - y^2"));
        assert_eq!(&prod / &(&x - &y), &x + &y);
    }

    #[test]
    fn power() {
        assert_eq!(e("y'^3").pow(2).unwrap(), e("y'^6"));
        assert_eq!(e("x").pow(-2).unwrap(), e("1/x^2"));
        assert!(Expr::zero().pow(-1).is_err());
    }

    #[test]
    fn partials() {
        assert_eq!(e("y'^3").partial(&Symbol::P), e("3*y'^2"));
        assert_eq!(Expr::fjet(0, 0, 1).partial(&Symbol::Y), Expr::fjet(0, 1, 1));
        assert_eq!(e("1/x").partial(&Symbol::X), e("-1/x^2"));
    }

    #[test]
    fn jet_instantiation() {
        let f = e("y'^3");
        assert_eq!(Expr::fjet(0, 0, 1).substitute_jet_fn(JetFn::F, &f), e("3*y'^2"));
        let f = e("-3*y'/(2*x)");
        assert_eq!(Expr::fjet(0, 1, 0).substitute_jet_fn(JetFn::F, &f), Expr::zero());
        let jet_free = e("x + y");
        assert_eq!(jet_free.substitute_jet_fn(JetFn::F, &f), jet_free);
    }

    #[test]
    fn evaluation() {
        let pt = |pairs: &[(Symbol, i64)]| {
            pairs
                .iter()
                .map(|(s, v)| (s.clone(), BigRational::from_integer(BigInt::from(*v))))
                .collect::<BTreeMap<_, _>>()
        };
        assert_eq!(e("x + y").eval(&pt(&[(Symbol::X, 1), (Symbol::Y, 2)])).unwrap(), BigRational::from_integer(3.into()));
        assert_eq!(e("1/x").eval(&pt(&[(Symbol::X, 0)])), Err(ExprError::Pole));
        assert_eq!(
            e("y'^3 + 3*x*y'").eval(&pt(&[(Symbol::X, 1), (Symbol::P, 2)])).unwrap(),
            BigRational::from_integer(14.into())
        );
        assert_eq!(e("x + y").eval(&pt(&[(Symbol::X, 1)])), Err(ExprError::Unbound(Symbol::Y)));
    }

    #[test]
    fn simultaneous_substitution() {
        let mut subs = BTreeMap::new();
        subs.insert(Symbol::U1, e("u1*v1"));
        subs.insert(Symbol::U3, &(&e("u1*v3") + &(&Expr::u3() / &Expr::sym(Symbol::V1))) + &Expr::zero());
        let r = e("u3/u1").substitute(&subs).unwrap();
        assert_eq!(r, e("v3/v1 + u3/(u1*v1^2)"));
    }

    #[test]
    fn canonical_denominator_sign_and_rendering() {
        let r = e("-3*y'/(2*x)");
        assert_eq!(r.to_string(), "(-3*y')/(2*x)");
        let r = e("1/(-x)");
        assert_eq!(r.to_string(), "(-1)/x");
        assert_eq!(e("x/(2*x)").to_string(), "1/2");
        assert_eq!(e("0").to_string(), "0");
    }
}
