//! Exterior algebra over a coordinate chart with rational-function coefficients.

mod coframe;
mod matrix;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::expr::{Expr, ExprError, Symbol};

pub use coframe::{CoframeBasis, CoframeExpansion};
pub use matrix::MatrixForm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("forms live on different charts")]
    ChartMismatch,
    #[error("chart coordinates must be distinct")]
    DuplicateCoordinate,
    #[error("{0} is not a coordinate of the chart")]
    NotACoordinate(Symbol),
    #[error("coframe coefficient matrix is not invertible")]
    CoframeNotInvertible,
    #[error("coframe needs {expected} one-forms, got {got}")]
    CoframeSize { expected: usize, got: usize },
    #[error("unsupported form degree {0}")]
    UnsupportedDegree(usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// An ordered list of distinct coordinate symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    coords: Arc<[Symbol]>,
}

impl Chart {
    pub fn new(coords: Vec<Symbol>) -> Result<Self, FormError> {
        for (i, c) in coords.iter().enumerate() {
            if coords[..i].contains(c) {
                return Err(FormError::DuplicateCoordinate);
            }
        }
        Ok(Chart {
            coords: coords.into(),
        })
    }

    /// (x, y, p)
    pub fn base3() -> Self {
        Chart::new(vec![Symbol::X, Symbol::Y, Symbol::P]).expect("distinct")
    }

    /// (x, y, p, u1, u2, u3)
    pub fn bundle6() -> Self {
        Chart::new(vec![Symbol::X, Symbol::Y, Symbol::P, Symbol::U1, Symbol::U2, Symbol::U3])
            .expect("distinct")
    }

    /// (x, y, p, u1, u3)
    pub fn bundle5() -> Self {
        Chart::new(vec![Symbol::X, Symbol::Y, Symbol::P, Symbol::U1, Symbol::U3]).expect("distinct")
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.coords.iter().position(|c| c == s)
    }
}

pub(crate) type Idx = SmallVec<[u8; 4]>;
pub(crate) type Terms = BTreeMap<Idx, Expr>;

/// Sorted concatenation of two index tuples with the sign of the sorting
/// permutation; `None` when an index repeats.
pub(crate) fn merge_indices(a: &[u8], b: &[u8]) -> Option<(Idx, bool)> {
    let mut v: Idx = a.iter().chain(b.iter()).copied().collect();
    let mut negative = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            negative = !negative;
            j -= 1;
        }
        if j > 0 && v[j - 1] == v[j] {
            return None;
        }
    }
    Some((v, negative))
}

pub(crate) fn add_term(terms: &mut Terms, idx: Idx, c: Expr) {
    if c.is_zero() {
        return;
    }
    match terms.entry(idx) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get() + &c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

pub(crate) fn wedge_terms(a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (ia, ca) in a {
        for (ib, cb) in b {
            if let Some((idx, neg)) = merge_indices(ia, ib) {
                let c = ca * cb;
                add_term(&mut out, idx, if neg { -c } else { c });
            }
        }
    }
    out
}

/// Signed lookup of a coefficient by an index tuple in any order.
pub(crate) fn signed_coefficient(terms: &Terms, indices: &[usize]) -> Expr {
    let raw: Idx = indices.iter().map(|&i| i as u8).collect();
    let Some((sorted, neg)) = merge_indices(&raw, &[]) else {
        return Expr::zero();
    };
    match terms.get(&sorted) {
        Some(c) if neg => -c,
        Some(c) => c.clone(),
        None => Expr::zero(),
    }
}

/// A homogeneous differential form. Only nonzero coefficients are stored,
/// keyed by strictly increasing tuples of coordinate indices.
#[derive(Debug, Clone)]
pub struct DiffForm {
    chart: Chart,
    degree: usize,
    terms: Terms,
}

impl PartialEq for DiffForm {
    fn eq(&self, other: &Self) -> bool {
        self.chart == other.chart
            && self.terms == other.terms
            && (self.degree == other.degree || self.terms.is_empty())
    }
}

impl Eq for DiffForm {}

impl DiffForm {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        DiffForm {
            chart: chart.clone(),
            degree,
            terms: Terms::new(),
        }
    }

    /// A 0-form.
    pub fn scalar(chart: &Chart, e: Expr) -> Self {
        let mut terms = Terms::new();
        add_term(&mut terms, Idx::new(), e);
        DiffForm {
            chart: chart.clone(),
            degree: 0,
            terms,
        }
    }

    /// The differential of a coordinate.
    pub fn d_coord(chart: &Chart, s: &Symbol) -> Result<Self, FormError> {
        let i = chart.index_of(s).ok_or_else(|| FormError::NotACoordinate(s.clone()))?;
        let mut terms = Terms::new();
        terms.insert(SmallVec::from_slice(&[i as u8]), Expr::one());
        Ok(DiffForm {
            chart: chart.clone(),
            degree: 1,
            terms,
        })
    }

    /// A 1-form `Σ c_s ds`.
    pub fn one_form(chart: &Chart, comps: &[(Symbol, Expr)]) -> Result<Self, FormError> {
        let mut terms = Terms::new();
        for (s, c) in comps {
            let i = chart.index_of(s).ok_or_else(|| FormError::NotACoordinate(s.clone()))?;
            add_term(&mut terms, SmallVec::from_slice(&[i as u8]), c.clone());
        }
        Ok(DiffForm {
            chart: chart.clone(),
            degree: 1,
            terms,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn terms(&self) -> &Terms {
        &self.terms
    }

    /// Nonzero terms as (coordinate symbols, coefficient).
    pub fn components(&self) -> Vec<(Vec<Symbol>, Expr)> {
        self.terms
            .iter()
            .map(|(idx, c)| {
                (
                    idx.iter().map(|&i| self.chart.coords[i as usize].clone()).collect(),
                    c.clone(),
                )
            })
            .collect()
    }

    /// Coefficient of `d s_1 ∧ … ∧ d s_k`, signed for unsorted input.
    pub fn coefficient(&self, coords: &[Symbol]) -> Result<Expr, FormError> {
        let idx = coords
            .iter()
            .map(|s| self.chart.index_of(s).ok_or_else(|| FormError::NotACoordinate(s.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(signed_coefficient(&self.terms, &idx))
    }

    /// The coefficient of a 0-form.
    pub fn as_scalar(&self) -> Expr {
        self.terms.get(&Idx::new()).cloned().unwrap_or_default()
    }

    pub fn scale(&self, k: &Expr) -> Self {
        if k.is_zero() {
            return DiffForm::zero(&self.chart, self.degree);
        }
        DiffForm {
            chart: self.chart.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(i, c)| (i.clone(), c * k)).collect(),
        }
    }

    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        let mut terms = Terms::new();
        for (i, c) in &self.terms {
            add_term(&mut terms, i.clone(), f(c));
        }
        DiffForm {
            chart: self.chart.clone(),
            degree: self.degree,
            terms,
        }
    }

    pub fn try_map_coefficients(
        &self,
        f: impl Fn(&Expr) -> Result<Expr, ExprError>,
    ) -> Result<Self, ExprError> {
        let mut terms = Terms::new();
        for (i, c) in &self.terms {
            add_term(&mut terms, i.clone(), f(c)?);
        }
        Ok(DiffForm {
            chart: self.chart.clone(),
            degree: self.degree,
            terms,
        })
    }

    pub fn wedge(&self, other: &DiffForm) -> Result<DiffForm, FormError> {
        if self.chart != other.chart {
            return Err(FormError::ChartMismatch);
        }
        Ok(DiffForm {
            chart: self.chart.clone(),
            degree: self.degree + other.degree,
            terms: wedge_terms(&self.terms, &other.terms),
        })
    }

    /// `d(c dI) = Σ_k ∂_k c dk ∧ dI` over the chart coordinates.
    pub fn exterior_derivative(&self) -> DiffForm {
        let mut terms = Terms::new();
        for (idx, c) in &self.terms {
            for (k, s) in self.chart.coords.iter().enumerate() {
                let dc = c.partial(s);
                if dc.is_zero() {
                    continue;
                }
                if let Some((merged, neg)) = merge_indices(&[k as u8], idx) {
                    add_term(&mut terms, merged, if neg { -dc } else { dc });
                }
            }
        }
        DiffForm {
            chart: self.chart.clone(),
            degree: self.degree + 1,
            terms,
        }
    }

    /// Pullback along the chart map sending each listed coordinate to an
    /// expression in the chart coordinates (and constants). Unlisted
    /// coordinates are fixed.
    pub fn pullback(&self, subs: &BTreeMap<Symbol, Expr>) -> Result<DiffForm, FormError> {
        let images: Vec<Terms> = self
            .chart
            .coords
            .iter()
            .enumerate()
            .map(|(k, s)| match subs.get(s) {
                Some(e) => DiffForm::scalar(&self.chart, e.clone()).exterior_derivative().terms,
                None => {
                    let mut t = Terms::new();
                    t.insert(SmallVec::from_slice(&[k as u8]), Expr::one());
                    t
                }
            })
            .collect();
        let mut terms = Terms::new();
        for (idx, c) in &self.terms {
            let c = c.substitute(subs)?;
            let mut acc = Terms::new();
            acc.insert(Idx::new(), c);
            for &i in idx.iter() {
                acc = wedge_terms(&acc, &images[i as usize]);
            }
            for (i, v) in acc {
                add_term(&mut terms, i, v);
            }
        }
        Ok(DiffForm {
            chart: self.chart.clone(),
            degree: self.degree,
            terms,
        })
    }

    /// Terms built only from the differentials of the listed coordinates.
    pub fn components_along(&self, coords: &[Symbol]) -> DiffForm {
        let keep: Vec<u8> = coords
            .iter()
            .filter_map(|s| self.chart.index_of(s).map(|i| i as u8))
            .collect();
        DiffForm {
            chart: self.chart.clone(),
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|(idx, _)| idx.iter().all(|i| keep.contains(i)))
                .map(|(i, c)| (i.clone(), c.clone()))
                .collect(),
        }
    }

    /// The same form on a larger chart containing every coordinate of this one.
    pub fn embed(&self, target: &Chart) -> Result<DiffForm, FormError> {
        let map = self
            .chart
            .coords
            .iter()
            .map(|s| target.index_of(s).ok_or_else(|| FormError::NotACoordinate(s.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let mut terms = Terms::new();
        for (idx, c) in &self.terms {
            let raw: Idx = idx.iter().map(|&i| map[i as usize] as u8).collect();
            let (sorted, neg) = merge_indices(&raw, &[]).expect("distinct indices stay distinct");
            add_term(&mut terms, sorted, if neg { -c } else { c.clone() });
        }
        Ok(DiffForm {
            chart: target.clone(),
            degree: self.degree,
            terms,
        })
    }

    /// Maximum polynomial degree over all coefficients.
    pub fn max_coefficient_degree(&self) -> u32 {
        self.terms.values().map(Expr::degree).max().unwrap_or(0)
    }

    fn combine(&self, other: &DiffForm, negate: bool) -> DiffForm {
        assert_eq!(self.chart, other.chart, "forms live on different charts");
        let degree = if self.terms.is_empty() { other.degree } else { self.degree };
        assert!(
            self.terms.is_empty() || other.terms.is_empty() || self.degree == other.degree,
            "adding forms of different degree"
        );
        let mut terms = self.terms.clone();
        for (i, c) in &other.terms {
            add_term(&mut terms, i.clone(), if negate { -c } else { c.clone() });
        }
        DiffForm {
            chart: self.chart.clone(),
            degree,
            terms,
        }
    }
}

impl Add for &DiffForm {
    type Output = DiffForm;
    fn add(self, rhs: &DiffForm) -> DiffForm {
        self.combine(rhs, false)
    }
}

impl Sub for &DiffForm {
    type Output = DiffForm;
    fn sub(self, rhs: &DiffForm) -> DiffForm {
        self.combine(rhs, true)
    }
}

impl Add for DiffForm {
    type Output = DiffForm;
    fn add(self, rhs: DiffForm) -> DiffForm {
        self.combine(&rhs, false)
    }
}

impl Sub for DiffForm {
    type Output = DiffForm;
    fn sub(self, rhs: DiffForm) -> DiffForm {
        self.combine(&rhs, true)
    }
}

impl Neg for &DiffForm {
    type Output = DiffForm;
    fn neg(self) -> DiffForm {
        self.scale(&Expr::int(-1))
    }
}

impl Neg for DiffForm {
    type Output = DiffForm;
    fn neg(self) -> DiffForm {
        -&self
    }
}

impl fmt::Display for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (idx, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (k, &i) in idx.iter().enumerate() {
                write!(f, "{}d{}", if k == 0 { " " } else { "^" }, self.chart.coords[i as usize])?;
            }
        }
        Ok(())
    }
}
