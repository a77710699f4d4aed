use smallvec::SmallVec;

use super::{add_term, signed_coefficient, wedge_terms, Chart, DiffForm, FormError, Idx, Terms};
use crate::expr::Expr;
use crate::linalg::{self, ExprMatrix};

/// A basis of 1-forms on a chart, with the inverse of its coefficient matrix.
#[derive(Debug, Clone)]
pub struct CoframeBasis {
    chart: Chart,
    forms: Vec<DiffForm>,
    /// `forms[i] = Σ_j matrix[i][j] d(coord_j)`
    matrix: ExprMatrix,
    /// `d(coord_j) = Σ_k inverse[j][k] forms[k]`
    inverse: ExprMatrix,
}

impl CoframeBasis {
    pub fn new(chart: &Chart, forms: Vec<DiffForm>) -> Result<Self, FormError> {
        let n = chart.dim();
        if forms.len() != n {
            return Err(FormError::CoframeSize {
                expected: n,
                got: forms.len(),
            });
        }
        let mut matrix = vec![vec![Expr::zero(); n]; n];
        for (i, f) in forms.iter().enumerate() {
            if f.chart() != chart {
                return Err(FormError::ChartMismatch);
            }
            if f.degree() != 1 && !f.is_zero() {
                return Err(FormError::UnsupportedDegree(f.degree()));
            }
            for (idx, c) in f.terms() {
                matrix[i][idx[0] as usize] = c.clone();
            }
        }
        let inverse = linalg::inverse(&matrix).ok_or(FormError::CoframeNotInvertible)?;
        Ok(CoframeBasis {
            chart: chart.clone(),
            forms,
            matrix,
            inverse,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn forms(&self) -> &[DiffForm] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn matrix(&self) -> &ExprMatrix {
        &self.matrix
    }

    pub fn determinant(&self) -> Expr {
        linalg::determinant(&self.matrix)
    }

    /// Rewrite a form of degree at most 2 in wedge monomials of the basis.
    pub fn express(&self, a: &DiffForm) -> Result<CoframeExpansion, FormError> {
        if a.chart() != &self.chart {
            return Err(FormError::ChartMismatch);
        }
        if a.degree() > 2 && !a.is_zero() {
            return Err(FormError::UnsupportedDegree(a.degree()));
        }
        let images: Vec<Terms> = self
            .inverse
            .iter()
            .map(|row| {
                let mut t = Terms::new();
                for (k, c) in row.iter().enumerate() {
                    add_term(&mut t, SmallVec::from_slice(&[k as u8]), c.clone());
                }
                t
            })
            .collect();
        let mut terms = Terms::new();
        for (idx, c) in a.terms() {
            let mut acc = Terms::new();
            acc.insert(Idx::new(), c.clone());
            for &i in idx.iter() {
                acc = wedge_terms(&acc, &images[i as usize]);
            }
            for (i, v) in acc {
                add_term(&mut terms, i, v);
            }
        }
        Ok(CoframeExpansion {
            size: self.forms.len(),
            degree: a.degree(),
            terms,
        })
    }

    /// `Σ coeff · (wedge of basis forms)`; inverse of [`CoframeBasis::express`].
    pub fn reconstruct(&self, exp: &CoframeExpansion) -> DiffForm {
        let mut out = DiffForm::zero(&self.chart, exp.degree);
        for (idx, c) in &exp.terms {
            let mut acc = DiffForm::scalar(&self.chart, c.clone());
            for &i in idx.iter() {
                acc = acc.wedge(&self.forms[i as usize]).expect("same chart");
            }
            out = &out + &acc;
        }
        out
    }
}

/// Coefficients of a form in the wedge monomials of a coframe. Monomials are
/// basis positions (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoframeExpansion {
    size: usize,
    degree: usize,
    terms: Terms,
}

impl CoframeExpansion {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `β_{i1} ∧ β_{i2} ∧ …`, signed when the positions are
    /// not increasing.
    pub fn coeff(&self, positions: &[usize]) -> Expr {
        signed_coefficient(&self.terms, positions)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero entries keyed by increasing positions.
    pub fn entries(&self) -> Vec<(Vec<usize>, Expr)> {
        self.terms
            .iter()
            .map(|(i, c)| (i.iter().map(|&k| k as usize).collect(), c.clone()))
            .collect()
    }

    pub fn basis_size(&self) -> usize {
        self.size
    }

    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        let mut terms = Terms::new();
        for (i, c) in &self.terms {
            add_term(&mut terms, i.clone(), f(c));
        }
        CoframeExpansion {
            size: self.size,
            degree: self.degree,
            terms,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, Symbol};

    #[test]
    fn identity_basis() {
        let c = Chart::base3();
        let forms = c
            .coords()
            .iter()
            .map(|s| DiffForm::d_coord(&c, s).unwrap())
            .collect();
        let b = CoframeBasis::new(&c, forms).unwrap();
        let dx = DiffForm::d_coord(&c, &Symbol::X).unwrap();
        let exp = b.express(&dx).unwrap();
        assert_eq!(exp.entries(), vec![(vec![0], Expr::one())]);
    }

    #[test]
    fn contact_coframe_for_free_particle() {
        // ω¹ = dy − p dx, ω² = dp, ω³ = dx
        let c = Chart::base3();
        let p = parse_expr("p").unwrap();
        let w1 = DiffForm::one_form(&c, &[(Symbol::Y, Expr::one()), (Symbol::X, -&p)]).unwrap();
        let w2 = DiffForm::d_coord(&c, &Symbol::P).unwrap();
        let w3 = DiffForm::d_coord(&c, &Symbol::X).unwrap();
        let b = CoframeBasis::new(&c, vec![w1, w2, w3]).unwrap();
        let dy = DiffForm::d_coord(&c, &Symbol::Y).unwrap();
        let exp = b.express(&dy).unwrap();
        assert_eq!(exp.coeff(&[0]), Expr::one());
        assert_eq!(exp.coeff(&[1]), Expr::zero());
        assert_eq!(exp.coeff(&[2]), p);
        assert_eq!(b.reconstruct(&exp), dy);
    }

    #[test]
    fn singular_basis_rejected() {
        let c = Chart::base3();
        let dx = DiffForm::d_coord(&c, &Symbol::X).unwrap();
        let dy = DiffForm::d_coord(&c, &Symbol::Y).unwrap();
        let r = CoframeBasis::new(&c, vec![dx.clone(), dy, dx.scale(&parse_expr("x").unwrap())]);
        assert!(matches!(r, Err(FormError::CoframeNotInvertible)));
    }
}
