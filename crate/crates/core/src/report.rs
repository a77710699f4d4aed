//! Serializable reports behind the command-line front end.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::connection::{
    connection_curvature, equivariance_check, fundamental_field_check, normalize_connection,
    uniqueness_check, ConnectionError,
};
use crate::expr::{Expr, ExprError};
use crate::forms::MatrixForm;
use crate::jet::{
    is_linearizable, relative_invariant, JetError, LinearizabilityWitness, OdeInput,
};
use crate::pipeline::{
    absorb_initial, cartan_characters, classify, extract_invariants, reduce_nonvanishing_branch,
    resolve_pi_variant, syzygy_check, verify_structure_equations, BranchVerdict, PiVariant,
    PipelineError, StageTag,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_MAX_DEGREE: u32 = 64;

/// Right-hand sides equivalent to `y'' = 0`.
pub const LINEARIZABLE_CORPUS: [&str; 8] = [
    "0",
    "x",
    "x^2",
    "y'^3",
    "y*y'^3",
    "(y'+b)^3",
    "-3*y'/(2*x)",
    "y'^3 + (3/(2*y))*y'^2",
];

/// Right-hand sides that are not, with the expected failing witness: either
/// "not-cubic" or `r<k>=<value>` for the first nonzero closure residual.
pub const NON_LINEARIZABLE_CORPUS: [(&str, &str); 5] = [
    ("y", "r1=1"),
    ("y'^2", "r3=2/9"),
    ("y'^3 + x", "r2=-x"),
    ("y'^4", "not-cubic"),
    ("x*y'", "r1=(2*x^2 - 3)/9"),
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("parse error: {0}")]
    Parse(#[from] ExprError),
    #[error("invalid input: {0}")]
    Input(JetError),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("relative invariant does not vanish: {0}")]
    NonFlat(Expr),
    #[error("expression degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
}

impl ReportError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::Parse(_) | ReportError::Input(_) => 2,
            ReportError::Inconsistent(_) => 3,
            ReportError::NonFlat(_) => 4,
            ReportError::DegreeCap { .. } => 5,
        }
    }
}

impl From<JetError> for ReportError {
    fn from(e: JetError) -> Self {
        match e {
            JetError::Expr(e) => ReportError::Parse(e),
            other => ReportError::Input(other),
        }
    }
}

impl From<PipelineError> for ReportError {
    fn from(e: PipelineError) -> Self {
        ReportError::Inconsistent(e.to_string())
    }
}

impl From<ConnectionError> for ReportError {
    fn from(e: ConnectionError) -> Self {
        ReportError::Inconsistent(e.to_string())
    }
}

fn cap_check(e: &Expr, cap: u32) -> Result<(), ReportError> {
    let degree = e.degree();
    if degree > cap {
        return Err(ReportError::DegreeCap { degree, cap });
    }
    Ok(())
}

/// `true`, `false` or `"not-cubic"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum LinearizableField {
    Verdict(bool),
    Tag(&'static str),
}

/// `true`, `false` or `"n/a"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum CurvatureField {
    Verdict(bool),
    Tag(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionInvariants {
    #[serde(rename = "I1")]
    pub i1: String,
    #[serde(rename = "I2")]
    pub i2: String,
    #[serde(rename = "I3")]
    pub i3: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub relative_invariant: bool,
    pub closed_form_i1: bool,
    pub invariants: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub input: String,
    pub f: String,
    /// "flat", "non-vanishing" or "mixed-signal".
    pub branch: &'static str,
    /// "1" or "-1" on the non-vanishing branch.
    pub epsilon: Option<String>,
    pub linearizable: LinearizableField,
    pub not_cubic_reason: Option<String>,
    pub relative_invariant: String,
    pub closure_residuals: Option<[String; 3]>,
    /// Values on the section u1 = 1, u3 = 0; flat branch only.
    pub invariants: Option<SectionInvariants>,
    pub curvature_zero: CurvatureField,
    pub typo_resolution: String,
    pub formal_cross_check: Option<CrossCheck>,
    pub timing_ms: u64,
}

pub fn parse_input(text: &str, cap: u32) -> Result<OdeInput, ReportError> {
    let ode = OdeInput::parse(text)?;
    cap_check(ode.f(), cap)?;
    Ok(ode)
}

/// The π² reading under which the formal reduced structure equations hold.
pub fn chosen_variant() -> Result<PiVariant, ReportError> {
    resolve_pi_variant(&OdeInput::formal())?
        .chosen
        .ok_or_else(|| ReportError::Inconsistent("no unique π² variant reproduces the structure equations".into()))
}

fn cross_check(ode: &OdeInput, variant: PiVariant, flat: bool) -> Result<CrossCheck, ReportError> {
    let formal = OdeInput::formal();
    let relative_invariant = ode.instantiate(&crate::jet::relative_invariant(&formal)) == crate::jet::relative_invariant(ode);
    let closed_form_i1 =
        ode.instantiate(&crate::jet::closed_forms(&formal).i1) == crate::jet::closed_forms(ode).i1;
    let invariants = if flat {
        let f = extract_invariants(&formal, variant)?;
        let c = extract_invariants(ode, variant)?;
        Some((0..3).all(|k| ode.instantiate(&f.section[k]) == c.section[k]))
    } else {
        None
    };
    Ok(CrossCheck {
        relative_invariant,
        closed_form_i1,
        invariants,
    })
}

pub fn analyze(text: &str, formal_cross_check: bool, cap: u32) -> Result<AnalysisReport, ReportError> {
    let start = Instant::now();
    let ode = parse_input(text, cap)?;
    let variant = chosen_variant()?;
    let rel = relative_invariant(&ode);
    cap_check(&rel, cap)?;
    let lin = is_linearizable(&ode)?;
    let (linearizable, not_cubic_reason, closure_residuals) = match &lin.witness {
        LinearizabilityWitness::NotCubic(nc) => {
            (LinearizableField::Tag("not-cubic"), Some(nc.to_string()), None)
        }
        LinearizabilityWitness::Residuals(r) => {
            for e in r.as_array() {
                cap_check(e, cap)?;
            }
            (
                LinearizableField::Verdict(lin.linearizable),
                None,
                Some(r.as_array().map(|e| e.to_string())),
            )
        }
    };
    let verdict = classify(&ode, variant)?;
    let (branch, epsilon, invariants, curvature_zero) = match &verdict {
        BranchVerdict::Flat { invariants, .. } => {
            for e in &invariants.section {
                cap_check(e, cap)?;
            }
            let k = connection_curvature(&ode, variant)?;
            if k.matched != Some(true) {
                return Err(ReportError::Inconsistent(
                    "curvature does not reduce to the invariant form".into(),
                ));
            }
            let zero = k.k.is_zero();
            let all_vanish = invariants.section.iter().all(Expr::is_zero);
            if zero != all_vanish || (lin.linearizable && !zero) {
                return Err(ReportError::Inconsistent(
                    "linearizability, invariants and curvature disagree".into(),
                ));
            }
            let [i1, i2, i3] = invariants.section.clone().map(|e| e.to_string());
            (
                "flat",
                None,
                Some(SectionInvariants { i1, i2, i3 }),
                CurvatureField::Verdict(zero),
            )
        }
        BranchVerdict::NonVanishing { epsilon, .. } => (
            "non-vanishing",
            Some(epsilon.to_string()),
            None,
            CurvatureField::Tag("n/a"),
        ),
        BranchVerdict::MixedSignal { .. } => ("mixed-signal", None, None, CurvatureField::Tag("n/a")),
    };
    let formal_cross_check = if formal_cross_check {
        let c = cross_check(&ode, variant, branch == "flat")?;
        if !(c.relative_invariant && c.closed_form_i1 && c.invariants != Some(false)) {
            return Err(ReportError::Inconsistent("formal and concrete computations disagree".into()));
        }
        Some(c)
    } else {
        None
    };
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        input: text.to_string(),
        f: ode.f().to_string(),
        branch,
        epsilon,
        linearizable,
        not_cubic_reason,
        relative_invariant: rel.to_string(),
        closure_residuals,
        invariants,
        curvature_zero,
        typo_resolution: variant.to_string(),
        formal_cross_check,
        timing_ms: start.elapsed().as_millis() as u64,
    })
}

impl AnalysisReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("f = {}\n", self.f);
        out += &format!("branch: {}", self.branch);
        if let Some(e) = &self.epsilon {
            out += &format!(" (epsilon = {e})");
        }
        out += "\n";
        out += &format!("relative invariant I = {}\n", self.relative_invariant);
        match &self.linearizable {
            LinearizableField::Verdict(b) => out += &format!("linearizable: {b}\n"),
            LinearizableField::Tag(t) => {
                out += &format!("linearizable: false ({t}: {})\n", self.not_cubic_reason.as_deref().unwrap_or(""))
            }
        }
        if let Some(r) = &self.closure_residuals {
            out += &format!("closure residuals: {}, {}, {}\n", r[0], r[1], r[2]);
        }
        if let Some(i) = &self.invariants {
            out += &format!("I1 = {}\nI2 = {}\nI3 = {}\n", i.i1, i.i2, i.i3);
        }
        match &self.curvature_zero {
            CurvatureField::Verdict(b) => out += &format!("curvature zero: {b}\n"),
            CurvatureField::Tag(t) => out += &format!("curvature zero: {t}\n"),
        }
        out += &format!("pi2 variant: {}\n", self.typo_resolution);
        if let Some(c) = &self.formal_cross_check {
            out += &format!(
                "formal cross-check: I {}, I1 {}, invariants {}\n",
                c.relative_invariant,
                c.closed_form_i1,
                c.invariants.map_or("n/a".to_string(), |b| b.to_string())
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurvatureReport {
    pub schema_version: u32,
    pub input: String,
    pub coframe: Vec<&'static str>,
    /// Entries of dω + ω∧ω as combinations of coframe wedge monomials.
    pub entries: Vec<Vec<String>>,
    pub timing_ms: u64,
}

fn render_matrix(k: &MatrixForm, basis: &crate::forms::CoframeBasis, names: &[&str]) -> Result<Vec<Vec<String>>, ReportError> {
    let mut rows = Vec::new();
    for row in k.entries() {
        let mut out = Vec::new();
        for f in row {
            let exp = basis.express(f).map_err(PipelineError::from)?;
            let terms: Vec<String> = exp
                .entries()
                .into_iter()
                .map(|(idx, c)| {
                    let mono: Vec<&str> = idx.iter().map(|&i| names[i]).collect();
                    format!("({c})*{}", mono.join("∧"))
                })
                .collect();
            out.push(if terms.is_empty() { "0".to_string() } else { terms.join(" + ") });
        }
        rows.push(out);
    }
    Ok(rows)
}

pub fn curvature(text: &str, cap: u32) -> Result<CurvatureReport, ReportError> {
    let start = Instant::now();
    let ode = parse_input(text, cap)?;
    let rel = relative_invariant(&ode);
    if !rel.is_zero() {
        return Err(ReportError::NonFlat(rel));
    }
    let variant = chosen_variant()?;
    let k = connection_curvature(&ode, variant)?;
    let names = vec!["θ1", "θ2", "θ3", "Ω1", "Ω2"];
    let entries = render_matrix(&k.k, &k.basis, &names)?;
    Ok(CurvatureReport {
        schema_version: SCHEMA_VERSION,
        input: text.to_string(),
        coframe: names,
        entries,
        timing_ms: start.elapsed().as_millis() as u64,
    })
}

impl CurvatureReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                out += &format!("K[{}][{}] = {e}\n", i + 1, j + 1);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Structure,
    Connection,
    All,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifySuiteResult {
    pub schema_version: u32,
    pub suite: &'static str,
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl VerifySuiteResult {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn status(&self, name: &str) -> Option<&Status> {
        self.checks.iter().find(|c| c.name == name).map(|c| &c.status)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let s = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skipped",
            };
            out += &format!("{s:8} {}", c.name);
            if let Some(d) = &c.detail {
                out += &format!("  ({d})");
            }
            out += "\n";
        }
        out += &format!("{} passed, {} failed, {} skipped\n", self.passed, self.failed, self.skipped);
        out
    }
}

struct Checks(Vec<CheckResult>);

impl Checks {
    fn record(&mut self, name: &str, result: Result<(bool, Option<String>), String>) {
        let (status, detail) = match result {
            Ok((true, d)) => (Status::Pass, d),
            Ok((false, d)) => (Status::Fail, d),
            Err(e) => (Status::Fail, Some(e)),
        };
        self.0.push(CheckResult {
            name: name.to_string(),
            status,
            detail,
        });
    }

    fn skip(&mut self, name: &str, reason: String) {
        self.0.push(CheckResult {
            name: name.to_string(),
            status: Status::Skipped,
            detail: Some(reason),
        });
    }
}

fn plain<E: ToString>(r: Result<bool, E>) -> Result<(bool, Option<String>), String> {
    r.map(|b| (b, None)).map_err(|e| e.to_string())
}

/// The first nonzero closure residual as `r<k>=<value>`, or "not-cubic".
pub fn witness_tag(ode: &OdeInput) -> Result<String, JetError> {
    let lin = is_linearizable(ode)?;
    Ok(match lin.witness {
        LinearizabilityWitness::NotCubic(_) => "not-cubic".to_string(),
        LinearizabilityWitness::Residuals(r) => r
            .as_array()
            .iter()
            .enumerate()
            .find(|(_, e)| !e.is_zero())
            .map_or("none".to_string(), |(k, e)| format!("r{}={e}", k + 1)),
    })
}

fn corpus() -> Vec<OdeInput> {
    LINEARIZABLE_CORPUS
        .iter()
        .map(|s| OdeInput::parse(s).expect("corpus parses"))
        .collect()
}

fn structure_checks(c: &mut Checks, variant: PiVariant) {
    let formal = OdeInput::formal();
    let (u1, u2) = (Expr::u1(), Expr::u2());
    let absorption = absorb_initial(&formal);
    c.record(
        "essential-torsion",
        absorption
            .as_ref()
            .map(|a| {
                let want = &u1 * &Expr::fjet(0, 0, 1) + Expr::int(3) * &u2 / &u1;
                (a.essential == want, Some(a.essential.to_string()))
            })
            .map_err(|e| e.to_string()),
    );
    c.record(
        "absorbed-T1-32",
        absorption.as_ref().map(|a| (a.t1_32.is_one(), None)).map_err(|e| e.to_string()),
    );
    c.record(
        "initial-structure-equations",
        plain(verify_structure_equations(&formal, StageTag::Initial, variant).map(|r| r.all_asserted_pass())),
    );
    match resolve_pi_variant(&formal) {
        Ok(r) => c.record(
            "pi2-variant-resolution",
            Ok((
                r.chosen.is_some(),
                Some(format!(
                    "theta1 {}, theta3 {}, chosen {}",
                    r.theta1_passes,
                    r.theta3_passes,
                    r.chosen.map_or("none".to_string(), |v| v.to_string())
                )),
            )),
        ),
        Err(e) => c.record("pi2-variant-resolution", Err(e.to_string())),
    }
    let reduced = verify_structure_equations(&formal, StageTag::Reduced, variant);
    c.record("reduced-structure-equations", plain(reduced.as_ref().map(|r| r.all_asserted_pass())));
    c.record(
        "reduced-torsion-term",
        reduced
            .as_ref()
            .map(|r| {
                let want = &u1 * &u1 * relative_invariant(&formal);
                (r.torsion("dθ2[31]") == Some(&want), None)
            })
            .map_err(|e| e.to_string()),
    );
    let prolonged = verify_structure_equations(&formal, StageTag::Prolonged, variant);
    c.record("prolonged-structure-equations", plain(prolonged.as_ref().map(|r| r.all_asserted_pass())));
    if let Ok(r) = &prolonged {
        let matched = r.check("dΩ2 printed form").is_some_and(|c| c.pass);
        c.skip(
            "prolonged-dOmega2-printed-form",
            format!("logged only: {}", if matched { "matched" } else { "unmatched" }),
        );
    }
    let ch = cartan_characters();
    c.record(
        "cartan-characters",
        Ok((
            (ch.s1, ch.s2, ch.s3, ch.dim_g1, ch.involutive) == (2, 0, 0, 1, false),
            Some(format!("s = ({}, {}, {}), dim g1 = {}", ch.s1, ch.s2, ch.s3, ch.dim_g1)),
        )),
    );
    c.record(
        "linearizability-corpus",
        (|| -> Result<(bool, Option<String>), String> {
            let mut ok = true;
            for ode in corpus() {
                ok &= is_linearizable(&ode).map_err(|e| e.to_string())?.linearizable;
            }
            for (s, want) in NON_LINEARIZABLE_CORPUS {
                let ode = OdeInput::parse(s).map_err(|e| e.to_string())?;
                let lin = is_linearizable(&ode).map_err(|e| e.to_string())?;
                ok &= !lin.linearizable && witness_tag(&ode).map_err(|e| e.to_string())? == want;
            }
            Ok((ok, None))
        })(),
    );
    c.record(
        "flat-corpus-invariants",
        (|| -> Result<(bool, Option<String>), String> {
            let mut ok = true;
            for ode in corpus() {
                let inv = extract_invariants(&ode, variant).map_err(|e| e.to_string())?;
                ok &= [&inv.set.i1, &inv.set.i2, &inv.set.i3].iter().all(|i| i.value.is_zero());
            }
            Ok((ok, None))
        })(),
    );
    c.record(
        "flat-corpus-syzygies",
        (|| -> Result<(bool, Option<String>), String> {
            let mut ok = true;
            for ode in corpus() {
                ok &= syzygy_check(&ode, variant).map_err(|e| e.to_string())?.all_zero();
            }
            Ok((ok, None))
        })(),
    );
    c.record(
        "non-vanishing-branch",
        (|| -> Result<(bool, Option<String>), String> {
            let y = OdeInput::parse("y").map_err(|e| e.to_string())?;
            let e = reduce_nonvanishing_branch(&y, 1).map_err(|e| e.to_string())?;
            let free = OdeInput::parse("0").map_err(|e| e.to_string())?;
            let vanishes = matches!(reduce_nonvanishing_branch(&free, 1), Err(PipelineError::InvariantVanishes));
            let mixed = OdeInput::parse("y'^3 + x").map_err(|e| e.to_string())?;
            let is_mixed = matches!(classify(&mixed, variant), Ok(BranchVerdict::MixedSignal { .. }));
            Ok((e.is_coframe() && vanishes && is_mixed, None))
        })(),
    );
}

fn connection_checks(c: &mut Checks, variant: PiVariant) {
    let formal = OdeInput::formal();
    c.record(
        "connection-asl-shape",
        plain(connection_curvature(&formal, variant).map(|k| k.asl_shaped)),
    );
    c.record(
        "flat-corpus-curvature",
        (|| -> Result<(bool, Option<String>), String> {
            let mut ok = true;
            for ode in corpus() {
                let k = connection_curvature(&ode, variant).map_err(|e| e.to_string())?;
                ok &= k.k.is_zero() && k.matched == Some(true);
            }
            Ok((ok, None))
        })(),
    );
    let eq = equivariance_check(&formal, variant);
    c.record("equivariance-theta", plain(eq.as_ref().map(|r| r.theta.iter().all(|&b| b))));
    c.record("equivariance-connection", plain(eq.as_ref().map(|r| r.connection)));
    c.record("equivariance-maurer-cartan", plain(eq.as_ref().map(|r| r.maurer_cartan)));
    c.record("equivariance-curvature", plain(eq.as_ref().map(|r| r.curvature)));
    let ff = fundamental_field_check(&formal, variant);
    c.record("maurer-cartan-flat", plain(ff.as_ref().map(|r| r.flat && r.left_invariant)));
    c.record("vertical-restriction", plain(ff.as_ref().map(|r| r.vertical_restriction)));
    let norm = normalize_connection(&formal);
    c.record(
        "normalization-mu-delta-nu",
        norm.as_ref()
            .map(|s| {
                let ok = s.mu == Expr::rational(-1, 3) * Expr::fjet(0, 0, 1)
                    && s.delta == Expr::rational(1, 6) * Expr::fjet(0, 0, 2)
                    && s.nu == Expr::rational(1, 6) * Expr::fjet(0, 0, 3);
                (ok, Some(format!("mu = {}, delta = {}, nu = {}", s.mu, s.delta, s.nu)))
            })
            .map_err(|e| e.to_string()),
    );
    c.record("normalization-eta", plain(norm.as_ref().map(|s| s.eta_matches_printed && s.torsion_free)));
    c.record(
        "uniqueness-formal",
        plain(uniqueness_check(&formal, variant).map(|r| r.holds())),
    );
    c.record(
        "uniqueness-flat-corpus",
        (|| -> Result<(bool, Option<String>), String> {
            let mut ok = true;
            for ode in corpus() {
                ok &= uniqueness_check(&ode, variant).map_err(|e| e.to_string())?.holds();
            }
            Ok((ok, None))
        })(),
    );
}

pub fn verify(suite: Suite) -> VerifySuiteResult {
    let mut c = Checks(Vec::new());
    let variant = match chosen_variant() {
        Ok(v) => v,
        Err(e) => {
            c.record("pi2-variant-resolution", Err(e.to_string()));
            PiVariant::Theta3
        }
    };
    if matches!(suite, Suite::Structure | Suite::All) {
        structure_checks(&mut c, variant);
    }
    if matches!(suite, Suite::Connection | Suite::All) {
        connection_checks(&mut c, variant);
    }
    let count = |s: Status| c.0.iter().filter(|r| r.status == s).count();
    VerifySuiteResult {
        schema_version: SCHEMA_VERSION,
        suite: match suite {
            Suite::Structure => "structure",
            Suite::Connection => "connection",
            Suite::All => "all",
        },
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skipped),
        checks: c.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_witnesses() {
        for (s, want) in NON_LINEARIZABLE_CORPUS {
            assert_eq!(witness_tag(&OdeInput::parse(s).unwrap()).unwrap(), want, "{s}");
        }
    }

    #[test]
    fn analyze_examples() {
        let r = analyze("0", false, DEFAULT_MAX_DEGREE).unwrap();
        assert_eq!(r.branch, "flat");
        assert_eq!(r.curvature_zero, CurvatureField::Verdict(true));
        let r = analyze("y'^3 + x", true, DEFAULT_MAX_DEGREE).unwrap();
        assert_eq!(r.branch, "mixed-signal");
        assert_eq!(r.closure_residuals.unwrap()[1], "-x");
        let r = analyze("-3*y'/(2*x)", false, DEFAULT_MAX_DEGREE).unwrap();
        let i = r.invariants.unwrap();
        assert_eq!((i.i1.as_str(), i.i2.as_str(), i.i3.as_str()), ("0", "0", "0"));
    }

    #[test]
    fn error_codes() {
        assert_eq!(analyze("x + * y", false, 64).unwrap_err().exit_code(), 2);
        assert_eq!(curvature("y", 64).unwrap_err().exit_code(), 4);
        assert_eq!(analyze("x^70", false, 64).unwrap_err().exit_code(), 5);
    }

    #[test]
    fn verify_everything() {
        let r = verify(Suite::All);
        assert!(r.all_pass(), "{}", r.to_text());
    }
}
