//! Multivariate polynomial gcd over ℤ by recursive primitive remainder sequences.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use num_traits::ToPrimitive;

use super::poly::{Monomial, Poly};
use super::symbol::Symbol;

/// Normalize so that the leading coefficient is positive.
pub fn normalize_sign(p: Poly) -> Poly {
    if p.leading_coeff_sign_negative() {
        p.neg()
    } else {
        p
    }
}

/// Greatest common divisor with positive leading coefficient.
/// `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return normalize_sign(b.clone());
    }
    if b.is_zero() {
        return normalize_sign(a.clone());
    }
    if let Some(c) = a.as_constant() {
        return Poly::constant(c.gcd(&b.integer_content()));
    }
    if let Some(c) = b.as_constant() {
        return Poly::constant(c.gcd(&a.integer_content()));
    }

    let (ma, mb) = (a.monomial_content(), b.monomial_content());
    let mg = ma.gcd(&mb);
    let (ca, cb) = (a.integer_content(), b.integer_content());
    let cg = ca.gcd(&cb);
    let a = a.div_monomial_exact(&ma).div_scalar_exact(&ca);
    let b = b.div_monomial_exact(&mb).div_scalar_exact(&cb);

    let core = primitive_gcd(&a, &b);
    normalize_sign(core.mul_term(&mg, &cg))
}

/// Gcd of two polynomials with unit integer content and no monomial factor.
fn primitive_gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.len() < b.len() || (a.len() == b.len() && a.total_degree() < b.total_degree()) {
        if b.div_exact(a).is_some() {
            return normalize_sign(a.clone());
        }
    } else if a.div_exact(b).is_some() {
        return normalize_sign(b.clone());
    }

    let sa = a.symbols();
    let sb = b.symbols();
    if let Some(v) = sa.difference(&sb).next() {
        let c = content_in(a, v);
        return gcd(&c, b);
    }
    if let Some(v) = sb.difference(&sa).next() {
        let c = content_in(b, v);
        return gcd(a, &c);
    }
    let mut vars: Vec<Symbol> = sa.iter().cloned().collect();
    vars.sort_by_key(|s| (a.degree_in(s).max(b.degree_in(s)), s.clone()));
    for w in &vars {
        let (ua, ub) = (a.coefficients_in(w), b.coefficients_in(w));
        if coprime_in(&ua, &ub, w, &sa) {
            return gcd(&content(&ua), &content(&ub));
        }
    }
    let v = vars[0].clone();
    if let Some(g) = heuristic_gcd(a, b, &v) {
        return g;
    }

    let ua = a.coefficients_in(&v);
    let ub = b.coefficients_in(&v);
    let (ca, cb) = (content(&ua), content(&ub));
    let cg = gcd(&ca, &cb);
    let pa = divide_all(&ua, &ca);
    let pb = divide_all(&ub, &cb);
    let r1 = subresultant_last(pa, pb);
    let g = Poly::from_coefficients_in(&v, &r1);
    let g = primitive_part_in(&g, &v);
    normalize_sign(g.mul(&cg))
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms().iter().map(|(_, c)| c.abs()).max().unwrap_or_default()
}

fn evaluate_at(p: &Poly, v: &Symbol, xi: &BigInt) -> Poly {
    Poly::from_unsorted(p.terms().iter().map(|(m, c)| {
        let rest: Vec<(Symbol, u32)> = m.factors().iter().filter(|(s, _)| s != v).cloned().collect();
        (Monomial::from_factors(rest), c * xi.pow(m.exponent(v)))
    }))
}

fn symmetric_mod(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn xi_adic(mut gamma: Poly, v: &Symbol, xi: &BigInt) -> Poly {
    let mut terms = Vec::new();
    let mut i = 0;
    while !gamma.is_zero() {
        let digit = gamma.map_coefficients(|c| symmetric_mod(c, xi));
        let vi = Monomial::var(v.clone(), i);
        terms.extend(digit.terms().iter().map(|(m, c)| (m.mul(&vi), c.clone())));
        gamma = gamma.sub(&digit).div_scalar_exact(xi);
        i += 1;
    }
    Poly::from_unsorted(terms)
}

/// Heuristic gcd: evaluate `v` at a large integer, take the gcd of the
/// images and lift it back ξ-adically; accepted only if it divides both.
fn heuristic_gcd(a: &Poly, b: &Poly, v: &Symbol) -> Option<Poly> {
    let mut xi: BigInt = max_norm(a).min(max_norm(b)) * 2 + 29;
    for _ in 0..6 {
        if xi.bits() * u64::from(a.degree_in(v).max(b.degree_in(v))) > 4096 {
            return None;
        }
        let gamma = gcd(&evaluate_at(a, v, &xi), &evaluate_at(b, v, &xi));
        if !gamma.is_zero() {
            let g = xi_adic(gamma, v, &xi);
            let content = g.integer_content();
            let g = normalize_sign(g.div_scalar_exact(&content));
            if !g.is_constant() && a.div_exact(&g).is_some() && b.div_exact(&g).is_some() {
                return Some(g);
            }
        }
        xi = xi * 73_794 / 27_011;
    }
    None
}

const PRIME: u64 = 2_147_483_647;

fn mod_prime(c: &BigInt) -> u64 {
    c.mod_floor(&BigInt::from(PRIME)).to_u64().expect("reduced below the prime")
}

fn pow_mod(mut b: u64, mut e: u32) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % PRIME;
        }
        b = b * b % PRIME;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, (PRIME - 2) as u32)
}

fn image(p: &Poly, point: &[(Symbol, u64)]) -> u64 {
    let mut acc = 0;
    for (m, c) in p.terms() {
        let mut t = mod_prime(c);
        for (s, e) in m.factors() {
            let x = point.iter().find(|(q, _)| q == s).map_or(0, |(_, x)| *x);
            t = t * pow_mod(x, *e) % PRIME;
        }
        acc = (acc + t) % PRIME;
    }
    acc
}

fn univariate_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let lb_inv = inv_mod(*b.last().unwrap());
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let k = a.last().unwrap() * lb_inv % PRIME;
            for (i, bc) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] + PRIME - k * bc % PRIME) % PRIME;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Whether the coefficient lists (in `v`) have no common factor of positive
/// degree in `v`, decided by a modular image at a fixed point. A `false`
/// answer is inconclusive.
fn coprime_in(ua: &[Poly], ub: &[Poly], v: &Symbol, symbols: &BTreeSet<Symbol>) -> bool {
    for round in 0..2u64 {
        let point: Vec<(Symbol, u64)> = symbols
            .iter()
            .filter(|s| *s != v)
            .enumerate()
            .map(|(i, s)| (s.clone(), (1_000_003 * (i as u64 + 1) + 7919 * round + 12_345) % PRIME))
            .collect();
        let ia: Vec<u64> = ua.iter().map(|c| image(c, &point)).collect();
        let ib: Vec<u64> = ub.iter().map(|c| image(c, &point)).collect();
        if ia.last() == Some(&0) || ib.last() == Some(&0) {
            continue;
        }
        if univariate_gcd_degree(ia, ib) == 0 {
            return true;
        }
    }
    false
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `v`.
pub fn content_in(p: &Poly, v: &Symbol) -> Poly {
    content(&p.coefficients_in(v))
}

fn primitive_part_in(p: &Poly, v: &Symbol) -> Poly {
    let coeffs = p.coefficients_in(v);
    let c = content(&coeffs);
    Poly::from_coefficients_in(v, &divide_all(&coeffs, &c))
}

fn content(coeffs: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn divide_all(coeffs: &[Poly], c: &Poly) -> Vec<Poly> {
    if c.is_one() {
        return coeffs.to_vec();
    }
    coeffs
        .iter()
        .map(|p| p.div_exact(c).expect("content divides every coefficient"))
        .collect()
}

fn pow_poly(p: &Poly, e: usize) -> Poly {
    p.pow(e as u32)
}

/// Last nonzero member of the subresultant remainder sequence of two dense
/// univariate polynomials (index = exponent) with polynomial coefficients.
fn subresultant_last(pa: Vec<Poly>, pb: Vec<Poly>) -> Vec<Poly> {
    let (mut f1, mut f2) = if pa.len() >= pb.len() { (pa, pb) } else { (pb, pa) };
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        let delta = f1.len() - f2.len();
        let r = pseudo_remainder(&f1, &f2);
        if r.is_empty() {
            return f2;
        }
        if r.len() == 1 {
            return vec![Poly::one()];
        }
        let divisor = g.mul(&pow_poly(&h, delta));
        let r: Vec<Poly> = r
            .iter()
            .map(|c| c.div_exact(&divisor).expect("subresultant division is exact"))
            .collect();
        f1 = std::mem::replace(&mut f2, r);
        g = f1.last().expect("nonzero").clone();
        h = if delta == 0 {
            h
        } else {
            pow_poly(&g, delta)
                .div_exact(&pow_poly(&h, delta - 1))
                .expect("subresultant division is exact")
        };
    }
}

/// Pseudo-remainder of dense univariate polynomials (index = exponent),
/// trimmed of leading zeros. Empty means zero.
fn pseudo_remainder(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let mut r: Vec<Poly> = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = c.mul(lb);
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = r[i + shift].sub(&bc.mul(&lr));
        }
        debug_assert!(r[dr].is_zero());
        trim(&mut r);
    }
    r
}

fn trim(r: &mut Vec<Poly>) {
    while r.last().map(|c| c.is_zero()).unwrap_or(false) {
        r.pop();
    }
}

/// Cofactors `(a / g, b / g)` for `g = gcd(a, b)`.
pub fn cofactors(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
    let g = gcd(a, b);
    if g.is_one() || g.is_zero() {
        return (g, a.clone(), b.clone());
    }
    let qa = a.div_exact(&g).expect("gcd divides a");
    let qb = b.div_exact(&g).expect("gcd divides b");
    (g, qa, qb)
}
