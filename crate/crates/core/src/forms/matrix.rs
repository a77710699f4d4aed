use std::collections::BTreeMap;

use super::{Chart, DiffForm, FormError};
use crate::expr::{Expr, Symbol};
use crate::linalg::ExprMatrix;

/// A 3×3 matrix of forms of a common degree on one chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixForm {
    entries: [[DiffForm; 3]; 3],
}

impl MatrixForm {
    pub fn new(entries: [[DiffForm; 3]; 3]) -> Self {
        MatrixForm { entries }
    }

    pub fn zero(chart: &Chart, degree: usize) -> Self {
        let z = || DiffForm::zero(chart, degree);
        MatrixForm::new([[z(), z(), z()], [z(), z(), z()], [z(), z(), z()]])
    }

    /// Entry at 0-based `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> &DiffForm {
        &self.entries[row][col]
    }

    pub fn entries(&self) -> &[[DiffForm; 3]; 3] {
        &self.entries
    }

    pub fn chart(&self) -> &Chart {
        self.entries[0][0].chart()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(DiffForm::is_zero)
    }

    pub fn map(&self, f: impl Fn(&DiffForm) -> DiffForm) -> MatrixForm {
        MatrixForm::new(std::array::from_fn(|i| std::array::from_fn(|j| f(&self.entries[i][j]))))
    }

    pub fn try_map(
        &self,
        f: impl Fn(&DiffForm) -> Result<DiffForm, FormError>,
    ) -> Result<MatrixForm, FormError> {
        let mut out = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                out.entries[i][j] = f(&self.entries[i][j])?;
            }
        }
        Ok(out)
    }

    /// First row identically zero and the lower 2×2 block trace-free.
    pub fn is_asl_shaped(&self) -> bool {
        self.entries[0].iter().all(DiffForm::is_zero)
            && (&self.entries[1][1] + &self.entries[2][2]).is_zero()
    }

    pub fn exterior_derivative(&self) -> MatrixForm {
        self.map(DiffForm::exterior_derivative)
    }

    /// `(a ∧ b)_ij = Σ_k a_ik ∧ b_kj`
    pub fn wedge(&self, other: &MatrixForm) -> Result<MatrixForm, FormError> {
        let deg = self.entries[0][0].degree() + other.entries[0][0].degree();
        let mut out = MatrixForm::zero(self.chart(), deg);
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = DiffForm::zero(self.chart(), deg);
                for k in 0..3 {
                    let (a, b) = (&self.entries[i][k], &other.entries[k][j]);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &a.wedge(b)?;
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    /// `dω + ω ∧ ω`
    pub fn curvature(&self) -> Result<MatrixForm, FormError> {
        Ok(self.exterior_derivative().add(&self.wedge(self)?))
    }

    pub fn add(&self, other: &MatrixForm) -> MatrixForm {
        MatrixForm::new(std::array::from_fn(|i| {
            std::array::from_fn(|j| &self.entries[i][j] + &other.entries[i][j])
        }))
    }

    pub fn sub(&self, other: &MatrixForm) -> MatrixForm {
        MatrixForm::new(std::array::from_fn(|i| {
            std::array::from_fn(|j| &self.entries[i][j] - &other.entries[i][j])
        }))
    }

    /// `left · self · right` for scalar matrices.
    pub fn sandwich(&self, left: &ExprMatrix, right: &ExprMatrix) -> MatrixForm {
        let chart = self.chart().clone();
        let deg = self.entries[0][0].degree();
        let mut mid: Vec<Vec<DiffForm>> = vec![vec![DiffForm::zero(&chart, deg); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    if !right[k][j].is_zero() {
                        mid[i][j] = &mid[i][j] + &self.entries[i][k].scale(&right[k][j]);
                    }
                }
            }
        }
        MatrixForm::new(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = DiffForm::zero(&chart, deg);
                for (k, row) in mid.iter().enumerate() {
                    if !left[i][k].is_zero() {
                        acc = &acc + &row[j].scale(&left[i][k]);
                    }
                }
                acc
            })
        }))
    }

    /// Entrywise `dM` of a scalar matrix, as a matrix of 1-forms.
    pub fn differential_of(chart: &Chart, m: &ExprMatrix) -> MatrixForm {
        MatrixForm::new(std::array::from_fn(|i| {
            std::array::from_fn(|j| DiffForm::scalar(chart, m[i][j].clone()).exterior_derivative())
        }))
    }

    /// Left multiplication by a scalar matrix.
    pub fn left_mul(m: &ExprMatrix, a: &MatrixForm) -> MatrixForm {
        a.sandwich(m, &crate::linalg::identity(3))
    }

    pub fn pullback(&self, subs: &BTreeMap<Symbol, Expr>) -> Result<MatrixForm, FormError> {
        self.try_map(|f| f.pullback(subs))
    }

    pub fn embed(&self, target: &Chart) -> Result<MatrixForm, FormError> {
        self.try_map(|f| f.embed(target))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn zero_connection_is_flat() {
        let c = Chart::bundle5();
        assert!(MatrixForm::zero(&c, 1).curvature().unwrap().is_zero());
    }

    #[test]
    fn sandwich_with_identity() {
        let c = Chart::base3();
        let dx = DiffForm::d_coord(&c, &Symbol::X).unwrap();
        let z = DiffForm::zero(&c, 1);
        let m = MatrixForm::new([
            [z.clone(), z.clone(), z.clone()],
            [dx.clone(), z.clone(), z.clone()],
            [z.clone(), dx.scale(&parse_expr("y").unwrap()), z.clone()],
        ]);
        let id = crate::linalg::identity(3);
        assert_eq!(m.sandwich(&id, &id), m);
    }
}
