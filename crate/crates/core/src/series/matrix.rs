use std::sync::Arc;

use super::{SeriesError, TruncatedSeries, VariableContext};
use crate::scalar::Coefficient;

/// Dense matrix of series sharing one context.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix<C> {
    rows: usize,
    cols: usize,
    entries: Vec<TruncatedSeries<C>>,
}

impl<C: Coefficient> SeriesMatrix<C> {
    pub fn from_rows(rows: Vec<Vec<TruncatedSeries<C>>>) -> Result<Self, SeriesError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(SeriesError::DimensionMismatch("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(SeriesError::DimensionMismatch("ragged rows".into()));
        }
        let entries: Vec<_> = rows.into_iter().flatten().collect();
        let ctx = entries[0].context().clone();
        if let Some(bad) = entries.iter().find(|e| **e.context() != *ctx) {
            return Err(SeriesError::ContextMismatch {
                left: ctx.to_string(),
                right: bad.context().to_string(),
            });
        }
        Ok(SeriesMatrix {
            rows: nrows,
            cols: ncols,
            entries,
        })
    }

    /// Columns given as lists of entries, top to bottom.
    pub fn from_columns(cols: Vec<Vec<TruncatedSeries<C>>>) -> Result<Self, SeriesError> {
        let ncols = cols.len();
        let nrows = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != nrows) {
            return Err(SeriesError::DimensionMismatch("ragged columns".into()));
        }
        let rows = (0..nrows)
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect();
        if ncols == 0 {
            return Err(SeriesError::DimensionMismatch("empty matrix".into()));
        }
        Self::from_rows(rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn context(&self) -> &Arc<VariableContext> {
        self.entries[0].context()
    }

    /// Smallest entry order.
    pub fn order(&self) -> u32 {
        self.entries
            .iter()
            .map(TruncatedSeries::order)
            .min()
            .unwrap_or(0)
    }

    pub fn get(&self, row: usize, col: usize) -> &TruncatedSeries<C> {
        &self.entries[row * self.cols + col]
    }

    pub fn column(&self, col: usize) -> Vec<TruncatedSeries<C>> {
        (0..self.rows).map(|r| self.get(r, col).clone()).collect()
    }

    /// Copy with column `col` replaced.
    pub fn with_column(
        &self,
        col: usize,
        column: &[TruncatedSeries<C>],
    ) -> Result<Self, SeriesError> {
        if column.len() != self.rows || col >= self.cols {
            return Err(SeriesError::DimensionMismatch(format!(
                "column {col} of length {} in a {}x{} matrix",
                column.len(),
                self.rows,
                self.cols
            )));
        }
        let mut out = self.clone();
        for (r, v) in column.iter().enumerate() {
            if **v.context() != **self.context() {
                return Err(SeriesError::ContextMismatch {
                    left: self.context().to_string(),
                    right: v.context().to_string(),
                });
            }
            out.entries[r * self.cols + col] = v.clone();
        }
        Ok(out)
    }

    pub fn swap_columns(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        for r in 0..self.rows {
            out.entries.swap(r * self.cols + a, r * self.cols + b);
        }
        out
    }

    /// Determinant, exact to the common order of the entries.
    ///
    /// Cofactor expansion up to 4x4, fraction-free elimination beyond when a
    /// unit pivot is available in every step.
    pub fn determinant(&self) -> Result<TruncatedSeries<C>, SeriesError> {
        self.check_square()?;
        if self.rows <= 4 {
            Ok(self.determinant_cofactor())
        } else {
            Ok(self
                .determinant_bareiss()
                .unwrap_or_else(|| self.determinant_cofactor()))
        }
    }

    fn check_square(&self) -> Result<(), SeriesError> {
        if self.rows != self.cols {
            return Err(SeriesError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    /// Laplace expansion along successive rows, sharing minors by column set.
    pub fn determinant_cofactor(&self) -> TruncatedSeries<C> {
        let n = self.rows;
        assert_eq!(n, self.cols, "determinant of a non-square matrix");
        let order = self.order();
        let ctx = self.context().clone();
        // minors[mask] = det(rows 0..k, columns in mask) for |mask| = k
        let mut minors: Vec<Option<TruncatedSeries<C>>> = vec![None; 1 << n];
        minors[0] = Some(TruncatedSeries::one(&ctx, order));
        for k in 0..n {
            let mut next: Vec<Option<TruncatedSeries<C>>> = vec![None; 1 << n];
            for mask in 0usize..(1 << n) {
                if mask.count_ones() as usize != k + 1 {
                    continue;
                }
                let mut acc = TruncatedSeries::zero(&ctx, order);
                for (pos, c) in (0..n).filter(|c| mask & (1 << c) != 0).enumerate() {
                    let entry = self.get(k, c);
                    if entry.is_zero() {
                        continue;
                    }
                    let Some(sub) = &minors[mask & !(1 << c)] else {
                        continue;
                    };
                    let term = entry * sub;
                    acc = if (k + pos) % 2 == 0 {
                        &acc + &term
                    } else {
                        &acc - &term
                    };
                }
                next[mask] = Some(acc);
            }
            minors = next;
        }
        minors[(1 << n) - 1]
            .take()
            .expect("full minor computed")
            .with_order_lowered(order)
    }

    /// Bareiss elimination; `None` when some step has no unit pivot.
    pub fn determinant_bareiss(&self) -> Option<TruncatedSeries<C>> {
        let n = self.rows;
        assert_eq!(n, self.cols, "determinant of a non-square matrix");
        let order = self.order();
        let ctx = self.context().clone();
        let mut m: Vec<Vec<TruncatedSeries<C>>> = (0..n)
            .map(|r| (0..n).map(|c| self.get(r, c).truncate(order)).collect())
            .collect();
        let mut negate = false;
        let mut prev_inv = TruncatedSeries::one(&ctx, order);
        for k in 0..n.saturating_sub(1) {
            let p = (k..n).find(|&r| !m[r][k].constant_term().is_zero())?;
            if p != k {
                m.swap(p, k);
                negate = !negate;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                    m[i][j] = &num * &prev_inv;
                }
            }
            prev_inv = m[k][k].invert_unit().ok()?;
        }
        let det = m[n - 1][n - 1].clone();
        Some(if negate { -det } else { det })
    }
}

/// Checks the three-term exchange identity
/// `|..D..E..|·|..C_j1..C_j2..| = |..D..C_j2..|·|..C_j1..E..| − |..E..C_j2..|·|..C_j1..D..|`
/// where the displayed columns sit at positions `j1 < j2` of `ground`.
pub fn plucker_check<C: Coefficient>(
    ground: &SeriesMatrix<C>,
    d: &[TruncatedSeries<C>],
    e: &[TruncatedSeries<C>],
    j1: usize,
    j2: usize,
) -> Result<bool, SeriesError> {
    ground.check_square()?;
    if j1 >= j2 || j2 >= ground.cols() {
        return Err(SeriesError::DimensionMismatch(format!(
            "need j1 < j2 < {}, got j1 = {j1}, j2 = {j2}",
            ground.cols()
        )));
    }
    let replace = |a: &[TruncatedSeries<C>], b: &[TruncatedSeries<C>]| {
        ground.with_column(j1, a)?.with_column(j2, b)?.determinant()
    };
    let cj1 = ground.column(j1);
    let cj2 = ground.column(j2);
    let lhs = &replace(d, e)? * &ground.determinant()?;
    let rhs =
        &(&replace(d, &cj2)? * &replace(&cj1, e)?) - &(&replace(e, &cj2)? * &replace(&cj1, d)?);
    let order = lhs.order().min(rhs.order());
    Ok(lhs.equal_to_order(&rhs, order))
}
