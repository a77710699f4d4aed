mod common;

use affode::expr::{parse_expr, poly_gcd, Expr, Symbol};
use affode::forms::{Chart, DiffForm, MatrixForm};
use affode::jet::{is_linearizable, relative_invariant, LinearizabilityWitness, OdeInput};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

const XYP: [Symbol; 3] = [Symbol::X, Symbol::Y, Symbol::P];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Degree ≤ 2 polynomial in x, y, p from a coefficient vector.
fn poly_from(coeffs: &[i64]) -> Expr {
    let mut monomials = vec![Expr::one()];
    for s in XYP {
        monomials.push(Expr::sym(s));
    }
    for (i, a) in XYP.iter().enumerate() {
        for b in &XYP[i..] {
            monomials.push(Expr::sym(a.clone()) * Expr::sym(b.clone()));
        }
    }
    monomials.iter().zip(coeffs).map(|(m, &c)| Expr::int(c) * m).fold(Expr::zero(), |a, b| a + b)
}

fn poly_strategy() -> impl Strategy<Value = Expr> {
    prop::collection::vec(-3i64..=3, 10).prop_map(|c| poly_from(&c))
}

fn rational_strategy() -> impl Strategy<Value = Expr> {
    (poly_strategy(), prop::collection::vec(-2i64..=2, 4)).prop_map(|(n, d)| {
        let den = poly_from(&[d[0] + 5, d[1], d[2], d[3]]);
        n.checked_div(&den).unwrap_or(n)
    })
}

fn formal_strategy() -> impl Strategy<Value = Expr> {
    (poly_strategy(), -3i64..=3, -3i64..=3).prop_map(|(e, a, b)| {
        e * Expr::fjet(0, 0, 1) + Expr::int(a) * Expr::fjet(1, 0, 0) * Expr::p() + Expr::int(b) * Expr::fjet(0, 1, 2)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_laws(a in rational_strategy(), b in rational_strategy(), c in rational_strategy()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a + &(-&a)).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inverse().unwrap()).is_one());
        }
    }

    #[test]
    fn partials_commute(e in formal_strategy(), r in rational_strategy()) {
        let e = e * r;
        for (u, w) in [(Symbol::X, Symbol::Y), (Symbol::Y, Symbol::P), (Symbol::X, Symbol::P)] {
            prop_assert_eq!(e.partial(&u).partial(&w), e.partial(&w).partial(&u));
        }
    }

    #[test]
    fn product_rule(a in rational_strategy(), b in rational_strategy()) {
        for s in XYP {
            prop_assert_eq!((&a * &b).partial(&s), &a.partial(&s) * &b + &a * &b.partial(&s));
        }
    }

    #[test]
    fn instantiation_commutes_with_partials(e in formal_strategy(), f in poly_strategy()) {
        for s in XYP {
            prop_assert_eq!(e.partial(&s).instantiate_jets(&f), e.instantiate_jets(&f).partial(&s));
        }
    }

    #[test]
    fn render_then_parse(e in rational_strategy()) {
        prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn gcd_of_multiples(a in poly_strategy(), b in poly_strategy(), g in poly_strategy()) {
        prop_assume!(!a.is_zero() && !b.is_zero() && !g.is_zero());
        let (pa, pb, pg) = (a.numerator().mul(g.numerator()), b.numerator().mul(g.numerator()), g.numerator().clone());
        let d = poly_gcd(&pa, &pb);
        prop_assert!(pa.div_exact(&d).is_some());
        prop_assert!(pb.div_exact(&d).is_some());
        prop_assert!(d.div_exact(&pg).is_some(), "gcd {} misses the common factor {}", d, pg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), degree in 0usize..3) {
        let a = random_form(&mut rng(seed), &Chart::base3(), degree);
        prop_assert!(a.exterior_derivative().exterior_derivative().is_zero());
    }

    #[test]
    fn graded_leibniz(seed in any::<u64>(), degree in 0usize..3) {
        let mut r = rng(seed);
        let chart = Chart::base3();
        let a = random_form(&mut r, &chart, degree);
        let b = random_form(&mut r, &chart, 1);
        let sign = if degree % 2 == 0 { Expr::one() } else { -Expr::one() };
        let lhs = a.wedge(&b).unwrap().exterior_derivative();
        let rhs = &a.exterior_derivative().wedge(&b).unwrap()
            + &a.wedge(&b.exterior_derivative()).unwrap().scale(&sign);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn asl_curvature_stays_asl(seed in any::<u64>()) {
        let mut r = rng(seed);
        let chart = Chart::base3();
        let mut one = || random_form(&mut r, &chart, 1);
        let z = DiffForm::zero(&chart, 1);
        let d11 = one();
        let w = MatrixForm::new([
            [z.clone(), z.clone(), z],
            [one(), d11.clone(), one()],
            [one(), one(), -&d11],
        ]);
        prop_assert!(w.is_asl_shaped());
        prop_assert!(w.curvature().unwrap().is_asl_shaped());
    }

    #[test]
    fn cubic_invariant_iff_residuals(seed in any::<u64>(), family in 0u8..3) {
        let mut r = rng(seed);
        let xy = [Symbol::X, Symbol::Y];
        let p = Expr::p();
        let f = match family {
            0 => random_poly(&mut r, &[Symbol::Y], 2, 3) * p.pow(3).unwrap(),
            1 => random_poly(&mut r, &[Symbol::X], 2, 3) + random_poly(&mut r, &[Symbol::X], 1, 3) * &p,
            _ => {
                let c: Vec<Expr> = (0..4).map(|_| random_poly(&mut r, &xy, 2, 3)).collect();
                &c[0] * &p.pow(3).unwrap() + &c[1] * &p * &p + &c[2] * &p + &c[3]
            }
        };
        let ode = OdeInput::concrete(f).unwrap();
        let lin = is_linearizable(&ode).unwrap();
        let residuals_zero = matches!(&lin.witness, LinearizabilityWitness::Residuals(r) if r.all_zero());
        prop_assert_eq!(relative_invariant(&ode).is_zero(), residuals_zero);
    }
}
