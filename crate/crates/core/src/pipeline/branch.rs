use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::invariants::{extract_invariants, ExtractedInvariants};
use super::{base_forms, PiVariant, PipelineError};
use crate::expr::{Expr, QuadExtExpr, Symbol};
use crate::forms::Chart;
use crate::jet::{is_linearizable, relative_invariant, JetError, Linearizability, OdeInput};
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterReport {
    pub s1: usize,
    pub s2: usize,
    pub s3: usize,
    pub dim_g1: usize,
    pub involutive: bool,
}

fn tableau(tag: &str) -> Vec<Vec<Expr>> {
    let v = |k: usize| Expr::sym(Symbol::free(&format!("{tag}{k}")));
    vec![
        vec![v(1), Expr::zero()],
        vec![Expr::int(2) * v(2), Expr::zero()],
        vec![-v(3), v(1)],
    ]
}

/// Reduced Cartan characters of the reduced structure equations, from generic
/// ranks of the tableau `L[v]` with symbolic `v`.
pub fn cartan_characters() -> CharacterReport {
    let l1 = tableau("va");
    let mut stacked = l1.clone();
    stacked.extend(tableau("vb"));
    let s1 = linalg::rank(&l1);
    let s12 = linalg::rank(&stacked);
    let s2 = s12 - s1;
    let s3 = 2 - s12;
    let dim_g1 = 1;
    CharacterReport {
        s1,
        s2,
        s3,
        dim_g1,
        involutive: dim_g1 == s1 + 2 * s2 + 3 * s3,
    }
}

/// The three reduced forms on (x, y, p) in the extension by `r`, `r² = ε I`,
/// with `u1 = 1/r` (so `u1² I = ε`) and `u3 = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EStructure3 {
    pub epsilon: i32,
    /// `ε I`
    pub radicand: Expr,
    /// Row `i` holds the dx, dy, dp coefficients of θ^(i+1).
    pub coefficients: [[QuadExtExpr; 3]; 3],
    pub determinant: QuadExtExpr,
}

impl EStructure3 {
    pub fn is_coframe(&self) -> bool {
        !self.determinant.is_zero()
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

fn det3(m: &[[QuadExtExpr; 3]; 3]) -> QuadExtExpr {
    let minor = |a: usize, b: usize, c: usize, d: usize| m[1][a].mul(&m[2][b]).sub(&m[1][c].mul(&m[2][d]));
    m[0][0]
        .mul(&minor(1, 2, 2, 1))
        .sub(&m[0][1].mul(&minor(0, 2, 2, 0)))
        .add(&m[0][2].mul(&minor(0, 1, 1, 0)))
}

pub fn reduce_nonvanishing_branch(ode: &OdeInput, epsilon: i32) -> Result<EStructure3, PipelineError> {
    if ode.is_formal() {
        return Err(JetError::FormalInput.into());
    }
    if epsilon != 1 && epsilon != -1 {
        return Err(PipelineError::PreconditionViolated(format!("sign must be ±1, got {epsilon}")));
    }
    let rel = relative_invariant(ode);
    if rel.is_zero() {
        return Err(PipelineError::InvariantVanishes);
    }
    let radicand = Expr::int(epsilon as i64) * &rel;
    if let Some(q) = radicand.as_rational() {
        if q.is_negative() {
            return Err(PipelineError::PreconditionViolated(format!(
                "sign {epsilon} disagrees with the constant invariant {rel}"
            )));
        }
    }
    // u1 = 1/r = r/(εI), u1² = 1/(εI), 1/u1 = r
    let (u1, u1_sq, inv_u1) = match radicand.as_rational().and_then(|q| rational_sqrt(&q)) {
        Some(s) => {
            let r = Expr::from_bigrational(&s);
            let base = |e: Expr| QuadExtExpr::from_base(e, &radicand);
            (base(r.inverse()?), base((&r * &r).inverse()?), base(r))
        }
        None => (
            QuadExtExpr::new(Expr::zero(), radicand.inverse()?, radicand.clone()),
            QuadExtExpr::from_base(radicand.inverse()?, &radicand),
            QuadExtExpr::root(&radicand),
        ),
    };
    let chart = Chart::base3();
    let omegas = base_forms(ode, &chart, true);
    let scales = [u1, u1_sq, inv_u1];
    let coords = [Symbol::X, Symbol::Y, Symbol::P];
    let coefficients: [[QuadExtExpr; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let c = omegas[i].coefficient(&coords[j..=j]).expect("base coords");
            scales[i].scale(&c)
        })
    });
    let determinant = det3(&coefficients);
    Ok(EStructure3 {
        epsilon,
        radicand,
        coefficients,
        determinant,
    })
}

/// Counts of the sign of an expression over a deterministic rational grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SignProbe {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
    pub poles: usize,
}

impl SignProbe {
    /// `Some(±1)` when every sample was nonzero with one sign.
    pub fn definite_sign(&self) -> Option<i32> {
        match (self.positive, self.negative, self.zero) {
            (p, 0, 0) if p > 0 => Some(1),
            (0, n, 0) if n > 0 => Some(-1),
            _ => None,
        }
    }
}

const GRID: [(i64, i64); 6] = [(-5, 2), (-1, 1), (-1, 3), (1, 2), (4, 3), (3, 1)];

/// Evaluate at every (x, y, p) of a fixed nonzero grid; free constants cycle
/// through the same values.
pub fn sign_probe(e: &Expr) -> SignProbe {
    let q = |(n, d): (i64, i64)| BigRational::new(BigInt::from(n), BigInt::from(d));
    let frees: Vec<Symbol> = e.symbols().into_iter().filter(|s| matches!(s, Symbol::Free(_))).collect();
    let mut probe = SignProbe::default();
    let mut k = 0usize;
    for &x in &GRID {
        for &y in &GRID {
            for &p in &GRID {
                let mut point = BTreeMap::from([(Symbol::X, q(x)), (Symbol::Y, q(y)), (Symbol::P, q(p))]);
                for (n, s) in frees.iter().enumerate() {
                    point.insert(s.clone(), q(GRID[(k + 2 * n + 1) % GRID.len()]));
                }
                k += 1;
                match e.eval(&point) {
                    Ok(v) if v.is_zero() => probe.zero += 1,
                    Ok(v) if v.is_positive() => probe.positive += 1,
                    Ok(_) => probe.negative += 1,
                    Err(_) => probe.poles += 1,
                }
            }
        }
    }
    probe
}

#[derive(Debug, Clone)]
pub enum BranchVerdict {
    /// I ≡ 0.
    Flat {
        invariants: Box<ExtractedInvariants>,
        linearizability: Linearizability,
    },
    /// I ≢ 0 of constant sign on the probe grid.
    NonVanishing {
        epsilon: i32,
        structure: Box<EStructure3>,
    },
    /// I ≢ 0 but zero or of both signs on the probe grid.
    MixedSignal { relative: Expr, probe: SignProbe },
}

pub fn classify(ode: &OdeInput, variant: PiVariant) -> Result<BranchVerdict, PipelineError> {
    if ode.is_formal() {
        return Err(JetError::FormalInput.into());
    }
    let rel = relative_invariant(ode);
    if rel.is_zero() {
        return Ok(BranchVerdict::Flat {
            invariants: Box::new(extract_invariants(ode, variant)?),
            linearizability: is_linearizable(ode)?,
        });
    }
    let probe = sign_probe(&rel);
    Ok(match probe.definite_sign() {
        Some(epsilon) => BranchVerdict::NonVanishing {
            epsilon,
            structure: Box::new(reduce_nonvanishing_branch(ode, epsilon)?),
        },
        None => BranchVerdict::MixedSignal { relative: rel, probe },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn characters() {
        let c = cartan_characters();
        assert_eq!((c.s1, c.s2, c.s3, c.dim_g1, c.involutive), (2, 0, 0, 1, false));
    }

    #[test]
    fn unit_invariant_gives_contact_coframe() {
        let ode = OdeInput::parse("y").unwrap();
        let e = reduce_nonvanishing_branch(&ode, 1).unwrap();
        assert_eq!(e.coefficients[0][1], QuadExtExpr::from_base(Expr::one(), &Expr::one()));
        assert_eq!(e.coefficients[2][0], QuadExtExpr::from_base(Expr::one(), &Expr::one()));
        assert!(e.is_coframe());
    }

    #[test]
    fn vanishing_invariant_rejected() {
        let ode = OdeInput::parse("0").unwrap();
        assert_eq!(reduce_nonvanishing_branch(&ode, 1), Err(PipelineError::InvariantVanishes));
    }

    #[test]
    fn mixed_sign_case() {
        let ode = OdeInput::parse("p^3 + x").unwrap();
        let e = reduce_nonvanishing_branch(&ode, 1).unwrap();
        assert!(e.is_coframe());
        assert_eq!(e.radicand, parse_expr("-2*x*p").unwrap());
        match classify(&ode, PiVariant::Theta3).unwrap() {
            BranchVerdict::MixedSignal { probe, .. } => {
                assert!(probe.positive > 0 && probe.negative > 0)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn classify_branches() {
        let flat = classify(&OdeInput::parse("0").unwrap(), PiVariant::Theta3).unwrap();
        assert!(matches!(flat, BranchVerdict::Flat { ref linearizability, .. } if linearizability.linearizable));
        let nv = classify(&OdeInput::parse("y").unwrap(), PiVariant::Theta3).unwrap();
        assert!(matches!(nv, BranchVerdict::NonVanishing { epsilon: 1, .. }));
    }
}
