#![allow(dead_code)]

use std::collections::BTreeMap;

use affode::expr::{Expr, Symbol};
use affode::forms::{Chart, DiffForm};
use affode::jet::OdeInput;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Polynomial in the given symbols, total degree ≤ `deg`, integer
/// coefficients in [-c, c].
pub fn random_poly<R: Rng>(rng: &mut R, vars: &[Symbol], deg: u32, c: i64) -> Expr {
    let mut out = Expr::zero();
    let mut monomials = vec![Expr::one()];
    for _ in 0..deg {
        let mut next = Vec::new();
        for m in &monomials {
            for v in vars {
                next.push(m * &Expr::sym(v.clone()));
            }
        }
        monomials.extend(next);
    }
    monomials.sort_by_key(|m| m.to_string());
    monomials.dedup();
    for m in monomials {
        let k = rng.random_range(-c..=c);
        out = out + Expr::int(k) * m;
    }
    out
}

/// Polynomial or, one time in four, a quotient by a nonvanishing-at-zero
/// denominator.
pub fn random_expr<R: Rng>(rng: &mut R, vars: &[Symbol]) -> Expr {
    let num = random_poly(rng, vars, 2, 3);
    if rng.random_range(0..4) == 0 {
        let den = random_poly(rng, vars, 1, 2) + Expr::int(5);
        num.checked_div(&den).unwrap_or(num)
    } else {
        num
    }
}

pub fn random_form<R: Rng>(rng: &mut R, chart: &Chart, degree: usize) -> DiffForm {
    let vars: Vec<Symbol> = chart.coords().to_vec();
    let one = |rng: &mut R| {
        let comps: Vec<(Symbol, Expr)> = vars.iter().map(|s| (s.clone(), random_expr(rng, &vars))).collect();
        DiffForm::one_form(chart, &comps).unwrap()
    };
    match degree {
        0 => DiffForm::scalar(chart, random_expr(rng, &vars)),
        1 => one(rng),
        _ => {
            let a = one(rng);
            let b = one(rng);
            a.wedge(&b).unwrap()
        }
    }
}

/// Rational in (-3, 3) with denominator up to 7, bounded away from zero.
pub fn random_nonzero<R: Rng>(rng: &mut R) -> BigRational {
    loop {
        let d = rng.random_range(1..=7);
        let n = rng.random_range(-3 * d..=3 * d);
        let r = q(n, d);
        if r.abs() >= q(1, 4) {
            return r;
        }
    }
}

/// Exact finite-difference oracle for derivatives of a concrete f.
pub struct Fd<'a> {
    pub f: &'a Expr,
    pub frees: BTreeMap<Symbol, BigRational>,
    pub h: BigRational,
}

impl Fd<'_> {
    pub fn eval(&self, pt: &[BigRational; 3]) -> Option<BigRational> {
        let mut m = self.frees.clone();
        m.insert(Symbol::X, pt[0].clone());
        m.insert(Symbol::Y, pt[1].clone());
        m.insert(Symbol::P, pt[2].clone());
        self.f.eval(&m).ok()
    }

    /// Nested central differences along the listed axes (0 = x, 1 = y, 2 = p).
    pub fn d(&self, pt: &[BigRational; 3], axes: &[usize]) -> Option<BigRational> {
        match axes.split_first() {
            None => self.eval(pt),
            Some((&a, rest)) => {
                let mut plus = pt.clone();
                let mut minus = pt.clone();
                plus[a] += &self.h;
                minus[a] -= &self.h;
                let two_h = &self.h * BigInt::from(2);
                Some((self.d(&plus, rest)? - self.d(&minus, rest)?) / two_h)
            }
        }
    }

    /// I = f_y + (2/9) f_p² − (1/3)(f_xp + p f_yp + f f_pp).
    pub fn relative_invariant(&self, pt: &[BigRational; 3]) -> Option<f64> {
        let (f, fy, fp) = (self.eval(pt)?, self.d(pt, &[1])?, self.d(pt, &[2])?);
        let d_fp = self.d(pt, &[0, 2])? + &pt[2] * self.d(pt, &[1, 2])? + &f * self.d(pt, &[2, 2])?;
        let v = fy + q(2, 9) * &fp * &fp - q(1, 3) * d_fp;
        v.to_f64()
    }

    /// I1 = −(1/3) f_py − (1/18) f_p f_pp + (1/6)(f_xpp + p f_ypp + f f_ppp).
    pub fn i1(&self, pt: &[BigRational; 3]) -> Option<f64> {
        let f = self.eval(pt)?;
        let (fp, fpp, fpy) = (self.d(pt, &[2])?, self.d(pt, &[2, 2])?, self.d(pt, &[1, 2])?);
        let d_fpp =
            self.d(pt, &[0, 2, 2])? + &pt[2] * self.d(pt, &[1, 2, 2])? + &f * self.d(pt, &[2, 2, 2])?;
        let v = q(-1, 3) * fpy - q(1, 18) * fp * fpp + q(1, 6) * d_fpp;
        v.to_f64()
    }
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Exact value of `e` at a point of (x, y, p) plus free constants.
pub fn eval_at(e: &Expr, frees: &BTreeMap<Symbol, BigRational>, pt: &[BigRational; 3]) -> Option<BigRational> {
    let mut m = frees.clone();
    m.insert(Symbol::X, pt[0].clone());
    m.insert(Symbol::Y, pt[1].clone());
    m.insert(Symbol::P, pt[2].clone());
    e.eval(&m).ok()
}

pub fn free_symbols(ode: &OdeInput) -> Vec<Symbol> {
    ode.f().symbols().into_iter().filter(|s| s.is_free()).collect()
}

pub fn nonzero(v: &BigRational) -> bool {
    !v.is_zero()
}
