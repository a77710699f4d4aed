//! The 𝔞𝔰𝔩(2)-valued Cartan connection built from the prolonged coframe, its
//! curvature, equivariance, and the normalization that singles it out.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{Expr, JetFn, Symbol};
use crate::forms::{Chart, CoframeBasis, DiffForm, FormError, MatrixForm};
use crate::jet::{relative_invariant, OdeInput};
use crate::linalg::{self, ExprMatrix};
use crate::pipeline::{
    base_forms, build_stage_coframe, extract_invariants, PiVariant,
    PipelineError, StageCoframe, StageTag,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectionError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("normalization system is inconsistent: {0}")]
    LinearSolveInconsistent(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// An element of the structure group H, rows (1,0,0), (0,v1,−v3), (0,0,1/v1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElementH {
    pub v1: Expr,
    pub v3: Expr,
}

impl GroupElementH {
    pub fn new(v1: Expr, v3: Expr) -> Self {
        GroupElementH { v1, v3 }
    }

    /// Symbolic (v1, v3).
    pub fn symbolic() -> Self {
        GroupElementH::new(Expr::sym(Symbol::V1), Expr::sym(Symbol::V3))
    }

    /// The fibre coordinate (u1, u3) of the bundle.
    pub fn fibre() -> Self {
        GroupElementH::new(Expr::u1(), Expr::u3())
    }

    pub fn identity() -> Self {
        GroupElementH::new(Expr::one(), Expr::zero())
    }

    pub fn matrix(&self) -> ExprMatrix {
        let z = Expr::zero;
        vec![
            vec![Expr::one(), z(), z()],
            vec![z(), self.v1.clone(), -&self.v3],
            vec![z(), z(), Expr::one() / &self.v1],
        ]
    }

    /// Closed-form inverse, rows (1,0,0), (0,1/v1,v3), (0,0,v1).
    pub fn inverse_matrix(&self) -> ExprMatrix {
        let z = Expr::zero;
        vec![
            vec![Expr::one(), z(), z()],
            vec![z(), Expr::one() / &self.v1, self.v3.clone()],
            vec![z(), z(), self.v1.clone()],
        ]
    }

    /// `self · other`, which is `(v1 w1, v1 w3 + v3 / w1)`.
    pub fn product(&self, other: &GroupElementH) -> GroupElementH {
        GroupElementH::new(
            &self.v1 * &other.v1,
            &self.v1 * &other.v3 + &self.v3 / &other.v1,
        )
    }

    pub fn determinant(&self) -> Expr {
        linalg::determinant(&self.matrix())
    }
}

/// Rows (0,0,0), (θ³, Ω¹, −Ω²), (θ¹, θ², −Ω¹).
pub fn connection_from(cf: &StageCoframe) -> MatrixForm {
    let z = DiffForm::zero(cf.chart(), 1);
    let (om1, om2) = (cf.group_form(1), cf.group_form(2));
    MatrixForm::new([
        [z.clone(), z.clone(), z],
        [cf.theta(3).clone(), om1.clone(), -om2],
        [cf.theta(1).clone(), cf.theta(2).clone(), -om1],
    ])
}

pub fn build_connection(ode: &OdeInput, variant: PiVariant) -> Result<MatrixForm, ConnectionError> {
    let cf = build_stage_coframe(ode, StageTag::Prolonged, variant)?;
    Ok(connection_from(&cf))
}

#[derive(Debug, Clone)]
pub struct CurvatureResult {
    pub k: MatrixForm,
    /// Entries expressed in the coframe (θ¹, θ², θ³, Ω¹, Ω²).
    pub basis: CoframeBasis,
    pub asl_shaped: bool,
    /// Comparison with the invariant-only form; `None` in formal mode.
    pub matched: Option<bool>,
}

/// `K = dω + ω∧ω`. In concrete mode the relative invariant must vanish and K
/// is compared with the shape carrying only I1, I2, I3.
pub fn connection_curvature(
    ode: &OdeInput,
    variant: PiVariant,
) -> Result<CurvatureResult, ConnectionError> {
    let rel = relative_invariant(ode);
    if !ode.is_formal() && !rel.is_zero() {
        return Err(ConnectionError::PreconditionViolated(format!(
            "curvature comparison needs a vanishing relative invariant, got {rel}"
        )));
    }
    let cf = build_stage_coframe(ode, StageTag::Prolonged, variant)?;
    let omega = connection_from(&cf);
    let k = omega.curvature()?;
    let matched = if ode.is_formal() {
        None
    } else {
        let inv = extract_invariants(ode, variant)?;
        let w = |a: usize, b: usize| cf.theta(a).wedge(cf.theta(b)).expect("same chart");
        let (i1, i2, i3) = (&inv.set.i1.value, &inv.set.i2.value, &inv.set.i3.value);
        let z = DiffForm::zero(cf.chart(), 2);
        let expected = MatrixForm::new([
            [z.clone(), z.clone(), z.clone()],
            [z.clone(), w(3, 1).scale(i1), -&(&w(2, 1).scale(i2) + &w(3, 1).scale(i3))],
            [z.clone(), z, w(3, 1).scale(&-i1)],
        ]);
        Some(k == expected)
    };
    Ok(CurvatureResult {
        asl_shaped: k.is_asl_shaped(),
        k,
        basis: cf.basis,
        matched,
    })
}

/// `u1 → u1 v1`, `u3 → u1 v3 + u3 / v1`: right multiplication by T on the fibre.
pub fn right_action(t: &GroupElementH) -> BTreeMap<Symbol, Expr> {
    let image = GroupElementH::fibre().product(t);
    BTreeMap::from([(Symbol::U1, image.v1), (Symbol::U3, image.v3)])
}

/// `T⁻¹ a T`
pub fn adjoint_inverse(t: &GroupElementH, a: &MatrixForm) -> MatrixForm {
    a.sandwich(&t.inverse_matrix(), &t.matrix())
}

/// Left Maurer–Cartan form of H in the fibre coordinates (u1, u3), on Bundle5.
pub fn maurer_cartan_h() -> MatrixForm {
    let c = Chart::bundle5();
    let (u1, u3) = (Expr::u1(), Expr::u3());
    let du1 = DiffForm::d_coord(&c, &Symbol::U1).expect("fibre coordinate");
    let du3 = DiffForm::d_coord(&c, &Symbol::U3).expect("fibre coordinate");
    let a = du1.scale(&(Expr::one() / &u1));
    let b = -&(&du1.scale(&(&u3 / (&u1 * &u1))) + &du3.scale(&(Expr::one() / &u1)));
    let z = DiffForm::zero(&c, 1);
    MatrixForm::new([
        [z.clone(), z.clone(), z.clone()],
        [z.clone(), a.clone(), b],
        [z.clone(), z, -&a],
    ])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivarianceReport {
    /// Φ*θ¹ = v1 θ¹, Φ*θ² = v1² θ², Φ*θ³ = θ³/v1 + v3 θ¹.
    pub theta: [bool; 3],
    /// Φ*ω = T⁻¹ ω T.
    pub connection: bool,
    /// Φ*ω_H = T⁻¹ ω_H T.
    pub maurer_cartan: bool,
    /// Φ*K = T⁻¹ K T.
    pub curvature: bool,
}

impl EquivarianceReport {
    pub fn holds(&self) -> bool {
        self.theta.iter().all(|&b| b) && self.connection && self.maurer_cartan && self.curvature
    }
}

pub fn equivariance_check_with(
    ode: &OdeInput,
    variant: PiVariant,
    t: &GroupElementH,
) -> Result<EquivarianceReport, ConnectionError> {
    let cf = build_stage_coframe(ode, StageTag::Prolonged, variant)?;
    let subs = right_action(t);
    let pull = |f: &DiffForm| f.pullback(&subs);
    let (v1, v3) = (&t.v1, &t.v3);
    let theta = [
        pull(cf.theta(1))? == cf.theta(1).scale(v1),
        pull(cf.theta(2))? == cf.theta(2).scale(&(v1 * v1)),
        pull(cf.theta(3))? == &cf.theta(3).scale(&(Expr::one() / v1)) + &cf.theta(1).scale(v3),
    ];
    let omega = connection_from(&cf);
    let connection = omega.pullback(&subs)? == adjoint_inverse(t, &omega);
    let mc = maurer_cartan_h();
    let maurer_cartan = mc.pullback(&subs)? == adjoint_inverse(t, &mc);
    let k = omega.curvature()?;
    let curvature = k.pullback(&subs)? == adjoint_inverse(t, &k);
    Ok(EquivarianceReport {
        theta,
        connection,
        maurer_cartan,
        curvature,
    })
}

/// Equivariance under a symbolic element (v1, v3) of H.
pub fn equivariance_check(
    ode: &OdeInput,
    variant: PiVariant,
) -> Result<EquivarianceReport, ConnectionError> {
    equivariance_check_with(ode, variant, &GroupElementH::symbolic())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalFieldReport {
    /// dω_H + ω_H∧ω_H = 0
    pub flat: bool,
    /// h⁻¹ dh = ω_H for the fibre element h.
    pub left_invariant: bool,
    /// The du1, du3 part of ω equals ω_H.
    pub vertical_restriction: bool,
}

impl FundamentalFieldReport {
    pub fn holds(&self) -> bool {
        self.flat && self.left_invariant && self.vertical_restriction
    }
}

pub fn fundamental_field_check(
    ode: &OdeInput,
    variant: PiVariant,
) -> Result<FundamentalFieldReport, ConnectionError> {
    let mc = maurer_cartan_h();
    let c = Chart::bundle5();
    let h = GroupElementH::fibre();
    let hinv_dh = MatrixForm::left_mul(&h.inverse_matrix(), &MatrixForm::differential_of(&c, &h.matrix()));
    let omega = build_connection(ode, variant)?;
    let vertical = omega.map(|f| f.components_along(&[Symbol::U1, Symbol::U3]));
    Ok(FundamentalFieldReport {
        flat: mc.curvature()?.is_zero(),
        left_invariant: hinv_dh == mc,
        vertical_restriction: vertical == mc,
    })
}

/// Unknown coefficient functions of the normalization ansatz.
fn unknown(func: JetFn) -> Expr {
    Expr::sym(Symbol::Jet(func, 0, 0, 0))
}

fn has_unknown_jets(e: &Expr) -> bool {
    e.symbols()
        .iter()
        .any(|s| matches!(s, Symbol::Jet(g, ..) if *g != JetFn::F))
}

/// `η` on (x, y, p) with rows (0,0,0), (η¹, η¹₁, η¹₂), (η², η²₁, η²₂), where
/// η¹ = dx, η² = dy − p dx, η²₁ = dp − f dx + μ η², η¹₁ = −μ dx + δ η²,
/// η¹₂ = δ dx + ν η², η²₂ = −η¹₁.
pub fn ansatz_eta(ode: &OdeInput, mu: &Expr, delta: &Expr, nu: &Expr) -> MatrixForm {
    let c = Chart::base3();
    let [w1, w2, dx] = base_forms(ode, &c, false);
    let pi = &w2 + &w1.scale(mu);
    let e11 = &dx.scale(&-mu) + &w1.scale(delta);
    let e12 = &dx.scale(delta) + &w1.scale(nu);
    let z = DiffForm::zero(&c, 1);
    MatrixForm::new([
        [z.clone(), z.clone(), z],
        [dx, e11.clone(), e12],
        [w1, pi, -&e11],
    ])
}

#[derive(Debug, Clone)]
pub struct NormalizationSolution {
    pub mu: Expr,
    pub delta: Expr,
    pub nu: Expr,
    /// R¹₁₁₃, R¹₁₂₃, R²₁₁₃, R²₁₂₃ in terms of the unknowns.
    pub r: [Expr; 4],
    /// Θ¹ and Θ² vanish for the ansatz.
    pub torsion_free: bool,
    pub eta: MatrixForm,
    /// Matches the printed solved η.
    pub eta_matches_printed: bool,
    /// `h⁻¹ η h + h⁻¹ dh` on (x, y, p, u1, u3).
    pub w: MatrixForm,
}

/// Solve equations that are linear in the order-0 jet of one unknown at a
/// time; solved unknowns are substituted together with all their jets.
fn triangular_solve(
    mut eqs: Vec<Expr>,
    unknowns: &[JetFn],
) -> Result<BTreeMap<JetFn, Expr>, ConnectionError> {
    let mut solved = BTreeMap::new();
    while solved.len() < unknowns.len() {
        let mut step = None;
        'search: for e in &eqs {
            for &u in unknowns.iter().filter(|u| !solved.contains_key(*u)) {
                let s = Symbol::Jet(u, 0, 0, 0);
                let Some(cs) = e.coefficients_in(&s) else { continue };
                if cs.len() != 2 {
                    continue;
                }
                let others = e.symbols().into_iter().any(|t| {
                    t != s && matches!(t, Symbol::Jet(g, ..) if g != JetFn::F)
                });
                if others || has_unknown_jets(&cs[1]) {
                    continue;
                }
                step = Some((u, -&cs[0] / &cs[1]));
                break 'search;
            }
        }
        let Some((u, value)) = step else {
            return Err(ConnectionError::LinearSolveInconsistent(
                "no equation isolates a remaining unknown".into(),
            ));
        };
        eqs = eqs
            .into_iter()
            .map(|e| e.substitute_jet_fn(u, &value))
            .filter(|e| !e.is_zero())
            .collect();
        solved.insert(u, value);
    }
    if let Some(e) = eqs.first() {
        return Err(ConnectionError::LinearSolveInconsistent(format!("leftover equation {e} = 0")));
    }
    Ok(solved)
}

pub fn normalize_connection(ode: &OdeInput) -> Result<NormalizationSolution, ConnectionError> {
    let (mu, delta, nu) = (unknown(JetFn::Mu), unknown(JetFn::Delta), unknown(JetFn::Nu));
    let eta = ansatz_eta(ode, &mu, &delta, &nu);
    let theta = eta.curvature()?;
    let c = Chart::base3();
    let basis = CoframeBasis::new(
        &c,
        vec![eta.entry(1, 0).clone(), eta.entry(2, 0).clone(), eta.entry(2, 1).clone()],
    )?;
    let torsion_free = theta.entry(1, 0).is_zero() && theta.entry(2, 0).is_zero();
    let t11 = basis.express(theta.entry(1, 1))?;
    let t21 = basis.express(theta.entry(2, 1))?;
    let r = [t11.coeff(&[0, 2]), t11.coeff(&[1, 2]), t21.coeff(&[0, 2]), t21.coeff(&[1, 2])];
    let mut eqs: Vec<Expr> = r.to_vec();
    if !torsion_free {
        for k in [(1, 0), (2, 0)] {
            eqs.extend(basis.express(theta.entry(k.0, k.1))?.entries().into_iter().map(|(_, e)| e));
        }
    }
    let sol = triangular_solve(eqs, &[JetFn::Mu, JetFn::Delta, JetFn::Nu])?;
    let (mu_v, delta_v, nu_v) = (sol[&JetFn::Mu].clone(), sol[&JetFn::Delta].clone(), sol[&JetFn::Nu].clone());
    let eta_solved = ansatz_eta(ode, &mu_v, &delta_v, &nu_v);

    let printed = {
        let [w1, w2, dx] = base_forms(ode, &c, false);
        let (fp, fpp, fppp) = (ode.jet(0, 0, 1), ode.jet(0, 0, 2), ode.jet(0, 0, 3));
        let sixth = Expr::rational(1, 6);
        [
            &dx.scale(&(Expr::rational(1, 3) * &fp)) + &w1.scale(&(&sixth * &fpp)),
            &dx.scale(&(&sixth * &fpp)) + &w1.scale(&(&sixth * &fppp)),
            &w2 - &w1.scale(&(Expr::rational(1, 3) * &fp)),
        ]
    };
    let eta_matches_printed = eta_solved.entry(1, 0) == &DiffForm::d_coord(&c, &Symbol::X)?
        && eta_solved.entry(1, 1) == &printed[0]
        && eta_solved.entry(1, 2) == &printed[1]
        && eta_solved.entry(2, 1) == &printed[2];
    let w = lift(&eta_solved)?;
    Ok(NormalizationSolution {
        mu: mu_v,
        delta: delta_v,
        nu: nu_v,
        r,
        torsion_free,
        eta: eta_solved,
        eta_matches_printed,
        w,
    })
}

/// `h⁻¹ η h + h⁻¹ dh` with h the fibre element (u1, u3).
pub fn lift(eta: &MatrixForm) -> Result<MatrixForm, ConnectionError> {
    let c = Chart::bundle5();
    let h = GroupElementH::fibre();
    let eta5 = eta.embed(&c)?;
    let dh = MatrixForm::differential_of(&c, &h.matrix());
    Ok(eta5
        .sandwich(&h.inverse_matrix(), &h.matrix())
        .add(&MatrixForm::left_mul(&h.inverse_matrix(), &dh)))
}

#[derive(Debug, Clone)]
pub struct UniquenessReport {
    /// Built ω equals the lifted w entrywise.
    pub equal: bool,
    /// (row, col, ω − w) for differing entries.
    pub residuals: Vec<(usize, usize, DiffForm)>,
    /// curvature(w) = h⁻¹ (dη + η∧η) h.
    pub curvature_identity: bool,
}

impl UniquenessReport {
    pub fn holds(&self) -> bool {
        self.equal && self.curvature_identity
    }
}

pub fn uniqueness_check(ode: &OdeInput, variant: PiVariant) -> Result<UniquenessReport, ConnectionError> {
    let rel = relative_invariant(ode);
    if !ode.is_formal() && !rel.is_zero() {
        return Err(ConnectionError::PreconditionViolated(format!(
            "uniqueness is stated for a vanishing relative invariant, got {rel}"
        )));
    }
    let omega = build_connection(ode, variant)?;
    let sol = normalize_connection(ode)?;
    let mut residuals = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            let diff = omega.entry(i, j) - sol.w.entry(i, j);
            if !diff.is_zero() {
                residuals.push((i, j, diff));
            }
        }
    }
    let h = GroupElementH::fibre();
    let c = Chart::bundle5();
    let k_eta = sol.eta.curvature()?.embed(&c)?;
    let curvature_identity = sol.w.curvature()? == k_eta.sandwich(&h.inverse_matrix(), &h.matrix());
    Ok(UniquenessReport {
        equal: residuals.is_empty(),
        residuals,
        curvature_identity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    const V: PiVariant = PiVariant::Theta3;

    #[test]
    fn group_law() {
        let s = GroupElementH::fibre();
        let t = GroupElementH::symbolic();
        let st = s.product(&t);
        assert_eq!(linalg::mat_mul(&s.matrix(), &t.matrix()), st.matrix());
        assert!(s.determinant().is_one());
        assert_eq!(linalg::mat_mul(&s.matrix(), &s.inverse_matrix()), linalg::identity(3));
    }

    #[test]
    fn free_particle_connection() {
        let ode = OdeInput::parse("0").unwrap();
        let w = build_connection(&ode, V).unwrap();
        assert!(w.is_asl_shaped());
        assert_eq!(
            w.entry(2, 0).coefficient(&[Symbol::Y]).unwrap(),
            Expr::u1()
        );
        let k = connection_curvature(&ode, V).unwrap();
        assert!(k.k.is_zero());
        assert_eq!(k.matched, Some(true));
    }

    #[test]
    fn formal_curvature_shape() {
        let k = connection_curvature(&OdeInput::formal(), V).unwrap();
        assert!(k.asl_shaped);
        assert_eq!(k.matched, None);
    }

    #[test]
    fn equivariance_formal() {
        let r = equivariance_check(&OdeInput::formal(), V).unwrap();
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn fundamental_field_formal() {
        assert!(fundamental_field_check(&OdeInput::formal(), V).unwrap().holds());
    }

    #[test]
    fn normalization_formal() {
        let s = normalize_connection(&OdeInput::formal()).unwrap();
        assert_eq!(s.mu, Expr::rational(-1, 3) * Expr::fjet(0, 0, 1));
        assert_eq!(s.delta, Expr::rational(1, 6) * Expr::fjet(0, 0, 2));
        assert_eq!(s.nu, Expr::rational(1, 6) * Expr::fjet(0, 0, 3));
        assert!(s.torsion_free);
        assert!(s.eta_matches_printed);
    }

    #[test]
    fn normalization_cubic() {
        let s = normalize_connection(&OdeInput::parse("p^3").unwrap()).unwrap();
        assert_eq!(s.nu, Expr::one());
        assert_eq!(s.mu, parse_expr("-p^2").unwrap());
    }

    #[test]
    fn uniqueness_on_flat_members() {
        for f in ["0", "p^3", "-3*p/(2*x)"] {
            let r = uniqueness_check(&OdeInput::parse(f).unwrap(), V).unwrap();
            assert!(r.holds(), "{f}");
        }
    }

    #[test]
    fn uniqueness_needs_flat_branch() {
        assert!(matches!(
            uniqueness_check(&OdeInput::parse("y").unwrap(), V),
            Err(ConnectionError::PreconditionViolated(_))
        ));
    }
}
