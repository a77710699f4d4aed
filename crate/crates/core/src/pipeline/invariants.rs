use std::collections::BTreeMap;

use super::{build_stage_coframe, PiVariant, PipelineError, StageCoframe, StageTag};
use crate::expr::{Expr, Symbol};
use crate::forms::DiffForm;
use crate::jet::{closed_forms, relative_invariant, Invariant, InvariantSet, OdeInput, Provenance};

/// Invariants read off dΩ¹ and dΩ² of the prolonged coframe.
#[derive(Debug, Clone)]
pub struct ExtractedInvariants {
    /// Bundle values, depending on (x, y, p, u1, u3).
    pub set: InvariantSet,
    /// Values on the section u1 = 1, u3 = 0.
    pub section: [Expr; 3],
    /// Whether each extracted value coincides with its printed closed form.
    pub matches_printed: [bool; 3],
    /// Extracted I1 minus `u1 u3 I` equals the closed-form I1.
    pub i1_consistent: bool,
}

fn section_subs() -> BTreeMap<Symbol, Expr> {
    BTreeMap::from([(Symbol::U1, Expr::one()), (Symbol::U3, Expr::zero())])
}

pub(crate) fn on_section(e: &Expr) -> Expr {
    e.substitute(&section_subs()).expect("u1 = 1 is never a pole")
}

fn extracted(value: Expr) -> Invariant {
    Invariant {
        value,
        provenance: Provenance::Extracted,
    }
}

pub(crate) fn extract_from(
    ode: &OdeInput,
    cf: &StageCoframe,
) -> Result<ExtractedInvariants, PipelineError> {
    let d_om1 = cf.basis.express(&cf.group_form(1).exterior_derivative())?;
    let d_om2 = cf.basis.express(&cf.group_form(2).exterior_derivative())?;
    let i1 = d_om1.coeff(&[2, 0]);
    let i2 = d_om2.coeff(&[1, 0]);
    let i3 = d_om2.coeff(&[2, 0]);
    let closed = closed_forms(ode);
    let rel = relative_invariant(ode);
    let i1_consistent = &i1 - &(Expr::u1() * Expr::u3() * &rel) == closed.i1;
    let matches_printed = [
        i1 == closed.i1,
        i2 == closed.i2_printed,
        i3 == closed.i3_printed,
    ];
    let section = [on_section(&i1), on_section(&i2), on_section(&i3)];
    Ok(ExtractedInvariants {
        set: InvariantSet {
            relative: rel,
            i1: extracted(i1),
            i2: extracted(i2),
            i3: extracted(i3),
            closed,
        },
        section,
        matches_printed,
        i1_consistent,
    })
}

/// I1 = θ³∧θ¹ coefficient of dΩ¹; I2, I3 = θ²∧θ¹, θ³∧θ¹ coefficients of dΩ².
pub fn extract_invariants(
    ode: &OdeInput,
    variant: PiVariant,
) -> Result<ExtractedInvariants, PipelineError> {
    let cf = build_stage_coframe(ode, StageTag::Prolonged, variant)?;
    extract_from(ode, &cf)
}

/// Residual coefficients of the three invariant relations.
#[derive(Debug, Clone)]
pub struct SyzygyReport {
    /// θ², Ω¹, Ω² coefficients of dI1 + I3 θ².
    pub first: [Expr; 3],
    /// The θ² coefficient of dI3 + 2 I3 Ω¹ − 2 I1 Ω², negated.
    pub j: Expr,
    /// Ω¹, Ω² coefficients of dI3 + 2 I3 Ω¹ − 2 I1 Ω².
    pub second: [Expr; 2],
    /// θ³ (after adding J), Ω¹, Ω² coefficients of dI2 + 5 I2 Ω¹ + J θ³.
    pub third: [Expr; 3],
}

impl SyzygyReport {
    pub fn all_zero(&self) -> bool {
        self.first
            .iter()
            .chain(self.second.iter())
            .chain(self.third.iter())
            .all(Expr::is_zero)
    }
}

pub fn syzygy_check(ode: &OdeInput, variant: PiVariant) -> Result<SyzygyReport, PipelineError> {
    let cf = build_stage_coframe(ode, StageTag::Prolonged, variant)?;
    let inv = extract_from(ode, &cf)?;
    let chart = cf.chart().clone();
    let scalar_d = |e: &Expr| DiffForm::scalar(&chart, e.clone()).exterior_derivative();
    let (i1, i2, i3) = (&inv.set.i1.value, &inv.set.i2.value, &inv.set.i3.value);
    let (th2, th3) = (cf.theta(2), cf.theta(3));
    let (om1, om2) = (cf.group_form(1), cf.group_form(2));

    let first_form = &scalar_d(i1) + &th2.scale(i3);
    let e1 = cf.basis.express(&first_form)?;
    let first = [e1.coeff(&[1]), e1.coeff(&[3]), e1.coeff(&[4])];

    let second_form = &(&scalar_d(i3) + &om1.scale(&(Expr::int(2) * i3)))
        - &om2.scale(&(Expr::int(2) * i1));
    let e2 = cf.basis.express(&second_form)?;
    let j = -e2.coeff(&[1]);
    let second = [e2.coeff(&[3]), e2.coeff(&[4])];

    let third_form = &(&scalar_d(i2) + &om1.scale(&(Expr::int(5) * i2))) + &th3.scale(&j);
    let e3 = cf.basis.express(&third_form)?;
    let third = [e3.coeff(&[2]), e3.coeff(&[3]), e3.coeff(&[4])];
    Ok(SyzygyReport {
        first,
        j,
        second,
        third,
    })
}
