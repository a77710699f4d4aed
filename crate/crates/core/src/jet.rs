//! ODE-level scalar invariants: total derivative, relative invariant, cubic
//! decomposition and the linearizability test.

use std::fmt;

use thiserror::Error;

use crate::expr::{parse_expr, Expr, ExprError, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("concrete right-hand side may only use x, y, y' and free constants, found {0}")]
    ForbiddenSymbol(Symbol),
    #[error("operation needs a concrete right-hand side")]
    FormalInput,
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Concrete,
    Formal,
}

/// The right-hand side `f` of `y'' = f(x, y, y')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdeInput {
    f: Expr,
    mode: Mode,
}

impl OdeInput {
    /// `f` as the formal jet symbol.
    pub fn formal() -> Self {
        OdeInput {
            f: Expr::fjet(0, 0, 0),
            mode: Mode::Formal,
        }
    }

    pub fn concrete(f: Expr) -> Result<Self, JetError> {
        if let Some(s) = f
            .symbols()
            .into_iter()
            .find(|s| !(s.is_base_coord() || matches!(s, Symbol::Free(_))))
        {
            return Err(JetError::ForbiddenSymbol(s));
        }
        Ok(OdeInput {
            f,
            mode: Mode::Concrete,
        })
    }

    pub fn parse(text: &str) -> Result<Self, JetError> {
        OdeInput::concrete(parse_expr(text)?)
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_formal(&self) -> bool {
        self.mode == Mode::Formal
    }

    /// `∂x^i ∂y^j ∂p^k f`, a jet symbol in formal mode.
    pub fn jet(&self, i: u16, j: u16, k: u16) -> Expr {
        match self.mode {
            Mode::Formal => Expr::fjet(i, j, k),
            Mode::Concrete => crate::expr::jet_of(&self.f, i, j, k),
        }
    }

    /// Specialize a formal expression to this input; identity in formal mode.
    pub fn instantiate(&self, e: &Expr) -> Expr {
        match self.mode {
            Mode::Formal => e.clone(),
            Mode::Concrete => e.instantiate_jets(&self.f),
        }
    }
}

impl fmt::Display for OdeInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.f)
    }
}

/// `∂x g + p ∂y g + f ∂p g`
pub fn total_derivative(g: &Expr, ode: &OdeInput) -> Expr {
    let gp = g.partial(&Symbol::P);
    let mut out = g.partial(&Symbol::X) + Expr::p() * g.partial(&Symbol::Y);
    if !gp.is_zero() {
        out = out + ode.f() * &gp;
    }
    out
}

/// `f_y + (2/9) f_p² − (1/3) 𝔇(f_p)`
pub fn relative_invariant(ode: &OdeInput) -> Expr {
    let fp = ode.jet(0, 0, 1);
    ode.jet(0, 1, 0) + Expr::rational(2, 9) * &fp * &fp
        - Expr::rational(1, 3) * total_derivative(&fp, ode)
}

/// `f = A p³ + 3B p² + 3C p + D`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicCoefficients {
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
    pub d: Expr,
}

impl CubicCoefficients {
    pub fn reconstruct(&self) -> Expr {
        let p = Expr::p();
        let three = Expr::int(3);
        &self.a * &p * &p * &p + &three * &self.b * &p * &p + &three * &self.c * &p + self.d.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotCubic {
    /// p occurs in the denominator.
    RationalInP,
    /// Polynomial in p of this degree (> 3).
    Degree(usize),
}

impl fmt::Display for NotCubic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotCubic::RationalInP => write!(f, "y' occurs in a denominator"),
            NotCubic::Degree(d) => write!(f, "degree {d} in y'"),
        }
    }
}

pub fn cubic_decompose(ode: &OdeInput) -> Result<Result<CubicCoefficients, NotCubic>, JetError> {
    if ode.is_formal() {
        return Err(JetError::FormalInput);
    }
    let Some(cs) = ode.f().coefficients_in(&Symbol::P) else {
        return Ok(Err(NotCubic::RationalInP));
    };
    if cs.len() > 4 {
        return Ok(Err(NotCubic::Degree(cs.len() - 1)));
    }
    let get = |k: usize| cs.get(k).cloned().unwrap_or_default();
    let third = Expr::rational(1, 3);
    Ok(Ok(CubicCoefficients {
        a: get(3),
        b: &third * &get(2),
        c: &third * &get(1),
        d: get(0),
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureResiduals {
    pub r1: Expr,
    pub r2: Expr,
    pub r3: Expr,
}

impl ClosureResiduals {
    pub fn all_zero(&self) -> bool {
        self.r1.is_zero() && self.r2.is_zero() && self.r3.is_zero()
    }

    pub fn as_array(&self) -> [&Expr; 3] {
        [&self.r1, &self.r2, &self.r3]
    }
}

/// `D_y − C_x − 2(BD − C²)`, `C_y − B_x − (AD − BC)`, `B_y − A_x − 2(AC − B²)`
pub fn closure_residuals(c: &CubicCoefficients) -> ClosureResiduals {
    let (x, y) = (Symbol::X, Symbol::Y);
    let two = Expr::int(2);
    ClosureResiduals {
        r1: c.d.partial(&y) - c.c.partial(&x) - &two * (&c.b * &c.d - &c.c * &c.c),
        r2: c.c.partial(&y) - c.b.partial(&x) - (&c.a * &c.d - &c.b * &c.c),
        r3: c.b.partial(&y) - c.a.partial(&x) - &two * (&c.a * &c.c - &c.b * &c.b),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearizabilityWitness {
    Residuals(ClosureResiduals),
    NotCubic(NotCubic),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linearizability {
    pub linearizable: bool,
    pub witness: LinearizabilityWitness,
}

/// Equivalence to `y'' = 0`: cubic in p and all closure residuals zero.
pub fn is_linearizable(ode: &OdeInput) -> Result<Linearizability, JetError> {
    Ok(match cubic_decompose(ode)? {
        Err(nc) => Linearizability {
            linearizable: false,
            witness: LinearizabilityWitness::NotCubic(nc),
        },
        Ok(c) => {
            let r = closure_residuals(&c);
            Linearizability {
                linearizable: r.all_zero(),
                witness: LinearizabilityWitness::Residuals(r),
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Extracted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariant {
    pub value: Expr,
    pub provenance: Provenance,
}

impl Invariant {
    fn closed(value: Expr) -> Self {
        Invariant {
            value,
            provenance: Provenance::ClosedForm,
        }
    }
}

/// Printed closed-form expressions kept for cross-checking extracted values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedForms {
    /// `−(1/3) f_py − (1/18) f_p f_pp + (1/6) 𝔇(f_pp)`
    pub i1: Expr,
    /// Printed θ²∧θ¹ coefficient of dΩ²: `−f_pppp / (6 u1⁵)`.
    pub i2_printed: Expr,
    /// Printed θ³∧θ¹ coefficient of dΩ², depends on u1 and u3.
    pub i3_printed: Expr,
    /// The four vanishing conditions in the order printed.
    pub vanishing_conditions: [Expr; 4],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantSet {
    /// The relative invariant I.
    pub relative: Expr,
    pub i1: Invariant,
    pub i2: Invariant,
    pub i3: Invariant,
    pub closed: ClosedForms,
}

pub fn closed_forms(ode: &OdeInput) -> ClosedForms {
    let j = |i, k, l| ode.jet(i, k, l);
    let r = Expr::rational;
    let (fp, fpp, fppp) = (j(0, 0, 1), j(0, 0, 2), j(0, 0, 3));
    let fpy = j(0, 1, 1);
    let fppy = j(0, 1, 2);
    let d_fpp = total_derivative(&fpp, ode);
    let d_fppp = total_derivative(&fppp, ode);
    let u1 = Expr::u1();
    let u3 = Expr::u3();

    let i1 = r(-1, 3) * &fpy - r(1, 18) * &fp * &fpp + r(1, 6) * &d_fpp;
    let i2_printed = r(-1, 6) * j(0, 0, 4) / u1.pow(5).expect("u1 nonzero");
    let bracket =
        r(1, 6) * &fppy - r(1, 6) * &d_fppp - r(1, 9) * &fp * &fppp + r(1, 18) * &fpp * &fpp;
    let i3_printed = bracket / (&u1 * &u1)
        + Expr::int(2) * &u3 / &u1
            * (r(-1, 18) * &fp * &fpp + r(1, 6) * &d_fpp - r(1, 3) * &fpy);
    let line1 = r(1, 6) * &fppp;
    let line2 = r(-1, 6) * (Expr::int(2) * &fpy + r(1, 3) * &fp * &fpp - &d_fpp);
    let line3 = relative_invariant(ode);
    let line4 = r(-1, 18) * (&fpp * &fpp - Expr::int(2) * &fp * &fppp) - r(1, 6) * (&fppy - &d_fppp);
    ClosedForms {
        i1,
        i2_printed,
        i3_printed,
        vanishing_conditions: [line1, line2, line3, line4],
    }
}

/// I together with the printed closed forms of I1, I2, I3.
pub fn closed_form_invariants(ode: &OdeInput) -> InvariantSet {
    let closed = closed_forms(ode);
    InvariantSet {
        relative: relative_invariant(ode),
        i1: Invariant::closed(closed.i1.clone()),
        i2: Invariant::closed(closed.i2_printed.clone()),
        i3: Invariant::closed(closed.i3_printed.clone()),
        closed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ode(s: &str) -> OdeInput {
        OdeInput::parse(s).unwrap()
    }

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn total_derivative_examples() {
        let o = ode("p^3");
        assert_eq!(total_derivative(&e("y"), &o), e("p"));
        assert_eq!(total_derivative(&e("p"), &o), e("p^3"));
        assert_eq!(total_derivative(&e("3*p^2"), &o), e("6*p^4"));
        let f = OdeInput::formal();
        assert_eq!(total_derivative(&e("p"), &f), Expr::fjet(0, 0, 0));
    }

    #[test]
    fn relative_invariant_examples() {
        assert!(relative_invariant(&ode("0")).is_zero());
        assert_eq!(relative_invariant(&ode("y")), Expr::one());
        assert!(relative_invariant(&ode("p^3")).is_zero());
        assert!(relative_invariant(&ode("y*p^3")).is_zero());
        assert_eq!(relative_invariant(&ode("p^3 + x")), e("-2*x*p"));
    }

    #[test]
    fn cubic_examples() {
        let c = cubic_decompose(&ode("p^3 + 3*x*p")).unwrap().unwrap();
        assert_eq!((c.a.clone(), c.b.clone(), c.c.clone(), c.d.clone()), (e("1"), e("0"), e("x"), e("0")));
        assert_eq!(c.reconstruct(), e("p^3 + 3*x*p"));
        assert_eq!(cubic_decompose(&ode("p^4")).unwrap(), Err(NotCubic::Degree(4)));
        assert_eq!(cubic_decompose(&ode("1/p")).unwrap(), Err(NotCubic::RationalInP));
        let c = cubic_decompose(&ode("-3*p/(2*x)")).unwrap().unwrap();
        assert_eq!(c.c, e("-1/(2*x)"));
        assert_eq!(cubic_decompose(&OdeInput::formal()), Err(JetError::FormalInput));
    }

    #[test]
    fn linearizability_examples() {
        for s in ["0", "x", "-3*p/(2*x)", "p^3 + (3/(2*y))*p^2"] {
            assert!(is_linearizable(&ode(s)).unwrap().linearizable, "{s}");
        }
        let v = is_linearizable(&ode("p^3 + x")).unwrap();
        assert!(!v.linearizable);
        match v.witness {
            LinearizabilityWitness::Residuals(r) => assert_eq!(r.r2, e("-x")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn closed_form_i1() {
        assert!(closed_form_invariants(&ode("0")).i1.value.is_zero());
        assert!(closed_form_invariants(&ode("-3*p/(2*x)")).i1.value.is_zero());
        assert_eq!(closed_form_invariants(&ode("p^3 + x")).i1.value, e("x"));
        let formal = closed_form_invariants(&OdeInput::formal());
        let c = formal.closed;
        assert_eq!(c.vanishing_conditions[1], c.i1);
    }

    #[test]
    fn concrete_rejects_bundle_symbols() {
        assert!(matches!(OdeInput::parse("u1"), Err(JetError::ForbiddenSymbol(_))));
    }
}
