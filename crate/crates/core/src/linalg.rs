//! Dense matrices over the rational-function field.

use crate::expr::Expr;

pub type ExprMatrix = Vec<Vec<Expr>>;

fn weight(e: &Expr) -> (u32, usize) {
    (
        e.numerator().total_degree() + e.denominator().total_degree(),
        e.numerator().len() + e.denominator().len(),
    )
}

/// Pick the nonzero entry of lowest total degree in `col` at or below `from`.
fn pivot_row(m: &ExprMatrix, col: usize, from: usize) -> Option<usize> {
    (from..m.len())
        .filter(|&r| !m[r][col].is_zero())
        .min_by_key(|&r| weight(&m[r][col]))
}

/// Row echelon reduction in place; returns the pivot columns.
fn echelon(m: &mut ExprMatrix, reduce_above: bool) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = pivot_row(m, c, r) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].inverse().expect("pivot is nonzero");
        for k in c..cols {
            m[r][k] = &m[r][k] * &inv;
        }
        for i in 0..rows {
            if i == r || (!reduce_above && i < r) || m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].clone();
            for k in c..cols {
                if !m[r][k].is_zero() {
                    m[i][k] = &m[i][k] - &(&factor * &m[r][k]);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank over the field of rational functions in all symbols present.
pub fn rank(m: &ExprMatrix) -> usize {
    let mut m = m.clone();
    echelon(&mut m, false).len()
}

/// Inverse by Gauss–Jordan elimination, or `None` if singular.
pub fn inverse(m: &ExprMatrix) -> Option<ExprMatrix> {
    let n = m.len();
    let mut aug: ExprMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "square matrix required");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }));
            r
        })
        .collect();
    let pivots = echelon(&mut aug, true);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn determinant(m: &ExprMatrix) -> Expr {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Expr::one();
    for c in 0..n {
        let Some(pr) = pivot_row(&a, c, c) else {
            return Expr::zero();
        };
        if pr != c {
            a.swap(pr, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det = &det * &piv;
        let inv = piv.inverse().expect("pivot is nonzero");
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = &a[i][c] * &inv;
            for k in c..n {
                a[i][k] = &a[i][k] - &(&factor * &a[c][k]);
            }
        }
    }
    det
}

pub fn mat_mul(a: &ExprMatrix, b: &ExprMatrix) -> ExprMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn identity(n: usize) -> ExprMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn m(rows: &[&[&str]]) -> ExprMatrix {
        rows.iter()
            .map(|r| r.iter().map(|s| parse_expr(s).unwrap()).collect())
            .collect()
    }

    #[test]
    fn inverse_of_symbolic_triangular() {
        let a = m(&[&["u1", "0", "0"], &["u2", "u1^2", "0"], &["u3", "0", "1/u1"]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(3));
        assert_eq!(determinant(&a), parse_expr("u1^2").unwrap());
    }

    #[test]
    fn singular_detected() {
        let a = m(&[&["x", "y"], &["2*x", "2*y"]]);
        assert!(inverse(&a).is_none());
        assert_eq!(rank(&a), 1);
        assert!(determinant(&a).is_zero());
    }

    #[test]
    fn rank_of_rectangular() {
        let a = m(&[&["a", "0"], &["2*b", "0"], &["-c", "a"]]);
        assert_eq!(rank(&a), 2);
    }
}
