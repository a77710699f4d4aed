//! Sparse multivariate polynomials over ℤ with a graded-lexicographic term order.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::symbol::Symbol;

/// A power product of symbols, stored sorted by symbol with positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: SmallVec<[(Symbol, u32); 4]>,
    degree: u32,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(s: Symbol, e: u32) -> Self {
        if e == 0 {
            return Monomial::one();
        }
        let mut factors = SmallVec::new();
        factors.push((s, e));
        Monomial { factors, degree: e }
    }

    pub fn from_factors(mut v: Vec<(Symbol, u32)>) -> Self {
        v.retain(|(_, e)| *e > 0);
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut factors: SmallVec<[(Symbol, u32); 4]> = SmallVec::new();
        for (s, e) in v {
            match factors.last_mut() {
                Some((ls, le)) if *ls == s => *le += e,
                _ => factors.push((s, e)),
            }
        }
        let degree = factors.iter().map(|(_, e)| e).sum();
        Monomial { factors, degree }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.factors
    }

    pub fn exponent(&self, s: &Symbol) -> u32 {
        self.factors
            .binary_search_by(|(t, _)| t.cmp(s))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.factors, &other.factors);
        let mut out: SmallVec<[(Symbol, u32); 4]> = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        Monomial {
            factors: out,
            degree: self.degree + other.degree,
        }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out: SmallVec<[(Symbol, u32); 4]> = SmallVec::new();
        let mut j = 0;
        for (s, e) in &self.factors {
            if j < other.factors.len() && other.factors[j].0 < *s {
                return None;
            }
            if j < other.factors.len() && other.factors[j].0 == *s {
                let oe = other.factors[j].1;
                j += 1;
                match e.cmp(&oe) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((s.clone(), e - oe)),
                }
            } else {
                out.push((s.clone(), *e));
            }
        }
        if j < other.factors.len() {
            return None;
        }
        Some(Monomial {
            factors: out,
            degree: self.degree - other.degree,
        })
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for (s, e) in &self.factors {
            let oe = other.exponent(s);
            if oe > 0 {
                out.push((s.clone(), (*e).min(oe)));
            }
        }
        Monomial::from_factors(out)
    }

    fn without(&self, s: &Symbol) -> (Monomial, u32) {
        let e = self.exponent(s);
        if e == 0 {
            return (self.clone(), 0);
        }
        let factors: SmallVec<_> = self.factors.iter().filter(|(t, _)| t != s).cloned().collect();
        (
            Monomial {
                factors,
                degree: self.degree - e,
            },
            e,
        )
    }
}

impl Ord for Monomial {
    /// Graded lexicographic, with smaller symbols more significant.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree.cmp(&other.degree) {
            Ordering::Equal => {}
            o => return o,
        }
        let (a, b) = (&self.factors, &other.factors);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match a[i].1.cmp(&b[j].1) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    o => return o,
                },
            }
        }
        (a.len() - i).cmp(&(b.len() - j))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial over ℤ. Terms are sorted by descending monomial order and
/// carry nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Monomial, BigInt)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn var(s: Symbol) -> Self {
        Poly {
            terms: vec![(Monomial::var(s, 1), BigInt::one())],
        }
    }

    pub fn term(m: Monomial, c: BigInt) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub(crate) fn from_unsorted(terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(BigInt::zero) += c;
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading(&self) -> Option<&(Monomial, BigInt)> {
        self.terms.first()
    }

    pub fn leading_coeff_sign_negative(&self) -> bool {
        self.terms.first().map(|(_, c)| c.is_negative()).unwrap_or(false)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, s: &Symbol) -> u32 {
        self.terms.iter().map(|(m, _)| m.exponent(s)).max().unwrap_or(0)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms
            .iter()
            .flat_map(|(m, _)| m.factors().iter().map(|(s, _)| s.clone()))
            .collect()
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.terms.iter().any(|(m, _)| m.exponent(s) > 0)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let sign = |c: &BigInt| if negate { -c } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0.clone(), sign(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), sign(c))));
        Poly { terms: out }
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        // Multiplying by a monomial preserves the term order.
        Poly {
            terms: self.terms.iter().map(|(tm, tc)| (tm.mul(m), tc * c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        self.mul_term(&Monomial::one(), c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].0, &other.terms[0].1);
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Gcd of the integer coefficients (nonnegative; zero for the zero polynomial).
    pub fn integer_content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Gcd of all terms viewed as monomials.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_scalar_exact(&self, c: &BigInt) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, tc)| (m.clone(), tc / c)).collect(),
        }
    }

    pub fn div_monomial_exact(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(tm, c)| (tm.div(m).expect("monomial divides every term"), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient `self / d` over ℤ, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading()?;
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if d.terms.len() == 1 {
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                let q = m.div(lm)?;
                let (qc, r) = c.div_rem(lc);
                if !r.is_zero() {
                    return None;
                }
                terms.push((q, qc));
            }
            return Some(Poly { terms });
        }
        if self.total_degree() < d.total_degree() {
            return None;
        }
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((rm, rc)) = rem.leading().cloned() {
            let qm = rm.div(lm)?;
            let (qc, r) = rc.div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            rem = rem.sub(&d.mul_term(&qm, &qc));
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    /// Partial derivative; jet symbols depend on x, y, p through index bumps.
    pub fn partial(&self, s: &Symbol) -> Poly {
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            for (idx, (f, e)) in m.factors().iter().enumerate() {
                let inner = if f == s {
                    None
                } else if let Some(b) = f.jet_bump(s) {
                    Some(b)
                } else {
                    continue;
                };
                let mut factors: Vec<(Symbol, u32)> = m.factors().to_vec();
                factors[idx].1 -= 1;
                if let Some(b) = inner {
                    factors.push((b, 1));
                }
                out.push((Monomial::from_factors(factors), c * BigInt::from(*e)));
            }
        }
        Poly::from_unsorted(out)
    }

    /// Coefficients of `self` as a polynomial in `s`, indexed by exponent.
    pub fn coefficients_in(&self, s: &Symbol) -> Vec<Poly> {
        let deg = self.degree_in(s) as usize;
        let mut buckets: Vec<Vec<(Monomial, BigInt)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let (rest, e) = m.without(s);
            buckets[e as usize].push((rest, c.clone()));
        }
        // Removing one symbol can reorder terms, so re-sort each bucket.
        buckets
            .into_iter()
            .map(|mut b| {
                b.sort_by(|x, y| y.0.cmp(&x.0));
                Poly { terms: b }
            })
            .collect()
    }

    pub fn from_coefficients_in(s: &Symbol, coeffs: &[Poly]) -> Poly {
        let mut out = Vec::new();
        for (e, c) in coeffs.iter().enumerate() {
            let v = Monomial::var(s.clone(), e as u32);
            for (m, k) in &c.terms {
                out.push((m.mul(&v), k.clone()));
            }
        }
        Poly::from_unsorted(out)
    }

    pub fn eval(&self, point: &dyn Fn(&Symbol) -> Option<BigRational>) -> Result<BigRational, Symbol> {
        let mut acc = BigRational::zero();
        let mut cache: HashMap<&Symbol, BigRational> = HashMap::new();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (s, e) in m.factors() {
                let v = match cache.get(s) {
                    Some(v) => v.clone(),
                    None => {
                        let v = point(s).ok_or_else(|| s.clone())?;
                        cache.insert(s, v.clone());
                        v
                    }
                };
                t *= num_traits::pow(v, *e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn map_coefficients(&self, f: impl Fn(&BigInt) -> BigInt) -> Poly {
        Poly::from_unsorted(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial, first: bool) -> fmt::Result {
    for (i, (s, e)) in m.factors().iter().enumerate() {
        if !(first && i == 0) {
            write!(f, "*")?;
        }
        if *e == 1 {
            write!(f, "{s}")?;
        } else {
            write!(f, "{s}^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let abs = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write_monomial(f, m, true)?;
            } else {
                write!(f, "{abs}")?;
                write_monomial(f, m, false)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(Symbol::X)
    }
    fn y() -> Poly {
        Poly::var(Symbol::Y)
    }

    #[test]
    fn grlex_order() {
        let x2 = Monomial::var(Symbol::X, 2);
        let xy = Monomial::from_factors(vec![(Symbol::X, 1), (Symbol::Y, 1)]);
        let y2 = Monomial::var(Symbol::Y, 2);
        let x = Monomial::var(Symbol::X, 1);
        assert!(x2 > xy && xy > y2 && y2 > x && x > Monomial::one());
    }

    #[test]
    fn difference_of_squares() {
        let p = x().add(&y()).mul(&x().sub(&y()));
        assert_eq!(p, x().mul(&x()).sub(&y().mul(&y())));
        assert_eq!(p.div_exact(&x().sub(&y())), Some(x().add(&y())));
        assert_eq!(p.div_exact(&x().add(&Poly::one())), None);
    }

    #[test]
    fn jet_bump_partial() {
        let f1 = Poly::var(Symbol::fjet(0, 0, 1));
        assert_eq!(f1.partial(&Symbol::Y), Poly::var(Symbol::fjet(0, 1, 1)));
        assert_eq!(f1.partial(&Symbol::U1), Poly::zero());
        let p3 = Poly::var(Symbol::P).pow(3);
        assert_eq!(p3.partial(&Symbol::P), Poly::var(Symbol::P).pow(2).scale(&BigInt::from(3)));
    }

    #[test]
    fn display() {
        let p = x().pow(2).scale(&BigInt::from(3)).sub(&y()).add(&Poly::constant(BigInt::from(-2)));
        assert_eq!(p.to_string(), "3*x^2 - y - 2");
    }
}
