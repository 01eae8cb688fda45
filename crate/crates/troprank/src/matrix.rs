//! Dense matrices over the extended tropical semiring, tropical matrix
//! multiplication, scaling normalization, product verification, and the
//! rank-1 decision procedure.
//!
//! Multiplication is ordinary matrix multiplication with (+, ·) replaced by
//! (min, +). A matrix is *proper* when no row and no column is entirely +∞;
//! normalization is only defined for proper matrices.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::value::{Rat, TropValue};

/// Dense rectangular matrix of tropical values, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<TropValue>,
}

impl TropMatrix {
    /// Build from a row-major entry vector. Dimensions must be positive and
    /// match the entry count.
    pub fn new(rows: usize, cols: usize, entries: Vec<TropValue>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::BadShape { rows, cols, len: entries.len() });
        }
        Ok(TropMatrix { rows, cols, entries })
    }

    /// Build by evaluating `f(i, j)` at every cell.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> TropValue) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        TropMatrix::new(rows, cols, entries)
    }

    /// Build from integer rows; `None` stands for +∞.
    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::BadShape { rows: r, cols: c, len: rows.iter().map(|x| x.len()).sum() });
        }
        TropMatrix::new(r, c, rows.iter().flatten().map(|&n| TropValue::from_int(n)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &TropValue {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: TropValue) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[TropValue] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[TropValue] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(TropValue::is_finite)
    }

    /// First infinite entry, if any.
    pub fn find_infinite(&self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .position(TropValue::is_infinite)
            .map(|p| (p / self.cols, p % self.cols))
    }

    pub fn transpose(&self) -> TropMatrix {
        TropMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone()).expect("transpose shape")
    }

    /// Submatrix picked out by row and column index lists (indices may repeat
    /// or reorder).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<TropMatrix> {
        for &i in rows {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange { what: "row index", value: i as i64, min: 0, max: self.rows as i64 - 1 });
            }
        }
        for &j in cols {
            if j >= self.cols {
                return Err(Error::IndexOutOfRange { what: "column index", value: j as i64, min: 0, max: self.cols as i64 - 1 });
            }
        }
        TropMatrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Minimum of a row (tropical row sum).
    pub fn row_min(&self, i: usize) -> TropValue {
        self.row(i)
            .iter()
            .fold(TropValue::Infinity, |acc, v| acc.tropical_add(v))
    }

    /// Minimum of a column.
    pub fn col_min(&self, j: usize) -> TropValue {
        (0..self.rows).fold(TropValue::Infinity, |acc, i| acc.tropical_add(self.get(i, j)))
    }

    /// Maximum entry of a row.
    pub fn row_max(&self, i: usize) -> TropValue {
        self.row(i).iter().cloned().max().expect("nonempty row")
    }

    /// Maximum entry of a column.
    pub fn col_max(&self, j: usize) -> TropValue {
        (0..self.rows).map(|i| self.get(i, j).clone()).max().expect("nonempty col")
    }

    /// Greatest finite entry, if the matrix has one.
    pub fn max_finite(&self) -> Option<Rat> {
        self.entries
            .iter()
            .filter_map(TropValue::finite)
            .max()
            .cloned()
    }

    /// Least finite entry, if the matrix has one.
    pub fn min_finite(&self) -> Option<Rat> {
        self.entries
            .iter()
            .filter_map(TropValue::finite)
            .min()
            .cloned()
    }

    /// True when no row and no column consists only of +∞.
    pub fn is_proper(&self) -> bool {
        (0..self.rows).all(|i| self.row_min(i).is_finite())
            && (0..self.cols).all(|j| self.col_min(j).is_finite())
    }
}

/// Tropical matrix product: `result[i][j] = min_t (a[i][t] + b[t][j])`.
pub fn trop_mat_mul(a: &TropMatrix, b: &TropMatrix) -> Result<TropMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            context: "tropical matrix product",
            left: (a.rows, a.cols),
            right: (b.rows, b.cols),
        });
    }
    TropMatrix::from_fn(a.rows, b.cols, |i, j| {
        let mut acc = TropValue::Infinity;
        for t in 0..a.cols {
            acc = acc.tropical_add(&a.get(i, t).tropical_mul(b.get(t, j)));
        }
        acc
    })
}

/// A pair (B, C) asserting B ⊗ C equals some target matrix; the inner
/// dimension is `left.cols() == right.rows()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub left: TropMatrix,
    pub right: TropMatrix,
}

impl Factorization {
    pub fn new(left: TropMatrix, right: TropMatrix) -> Result<Self> {
        if left.cols != right.rows {
            return Err(Error::DimensionMismatch {
                context: "factorization inner dimension",
                left: (left.rows, left.cols),
                right: (right.rows, right.cols),
            });
        }
        Ok(Factorization { left, right })
    }

    pub fn inner_dim(&self) -> usize {
        self.left.cols
    }

    /// Compute B ⊗ C.
    pub fn product(&self) -> TropMatrix {
        trop_mat_mul(&self.left, &self.right).expect("inner dims checked at construction")
    }
}

/// Exact entrywise check that `f.left ⊗ f.right == target`.
pub fn verify_product(target: &TropMatrix, f: &Factorization) -> Result<bool> {
    if f.left.rows != target.rows || f.right.cols != target.cols {
        return Err(Error::DimensionMismatch {
            context: "product verification",
            left: (f.left.rows, f.right.cols),
            right: (target.rows, target.cols),
        });
    }
    Ok(f.product() == *target)
}

/// Row and column offsets relating two matrices entrywise:
/// `scaled[i][j] = original[i][j] + row_offsets[i] + col_offsets[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scaling {
    pub row_offsets: Vec<Rat>,
    pub col_offsets: Vec<Rat>,
}

impl Scaling {
    pub fn identity(rows: usize, cols: usize) -> Self {
        Scaling { row_offsets: vec![Rat::zero(); rows], col_offsets: vec![Rat::zero(); cols] }
    }

    /// Apply the offsets to a matrix of matching shape.
    pub fn apply(&self, a: &TropMatrix) -> Result<TropMatrix> {
        self.check_shape(a)?;
        TropMatrix::from_fn(a.rows, a.cols, |i, j| {
            a.get(i, j).shift_up(&self.row_offsets[i]).shift_up(&self.col_offsets[j])
        })
    }

    /// Undo the offsets; `unapply(apply(a)) == a`.
    pub fn unapply(&self, a: &TropMatrix) -> Result<TropMatrix> {
        self.check_shape(a)?;
        TropMatrix::from_fn(a.rows, a.cols, |i, j| {
            a.get(i, j).shift_down(&self.row_offsets[i]).shift_down(&self.col_offsets[j])
        })
    }

    fn check_shape(&self, a: &TropMatrix) -> Result<()> {
        if self.row_offsets.len() != a.rows || self.col_offsets.len() != a.cols {
            return Err(Error::DimensionMismatch {
                context: "scaling application",
                left: (self.row_offsets.len(), self.col_offsets.len()),
                right: (a.rows, a.cols),
            });
        }
        Ok(())
    }
}

/// Normalize a proper matrix so that zero is the minimum of every row and
/// every column: subtract row minima, then column minima. Returns the
/// normalized matrix and the `Scaling` that maps the input to it.
pub fn scale_normalize(a: &TropMatrix) -> Result<(TropMatrix, Scaling)> {
    for i in 0..a.rows {
        if a.row_min(i).is_infinite() {
            return Err(Error::ImproperMatrix { all_infinite_row: Some(i), all_infinite_col: None });
        }
    }
    for j in 0..a.cols {
        if a.col_min(j).is_infinite() {
            return Err(Error::ImproperMatrix { all_infinite_row: None, all_infinite_col: Some(j) });
        }
    }
    let row_offsets: Vec<Rat> = (0..a.rows)
        .map(|i| -a.row_min(i).finite().expect("proper row").clone())
        .collect();
    let after_rows = TropMatrix::from_fn(a.rows, a.cols, |i, j| a.get(i, j).shift_up(&row_offsets[i]))?;
    let col_offsets: Vec<Rat> = (0..a.cols)
        .map(|j| -after_rows.col_min(j).finite().expect("proper col").clone())
        .collect();
    let out = TropMatrix::from_fn(a.rows, a.cols, |i, j| after_rows.get(i, j).shift_up(&col_offsets[j]))?;
    Ok((out, Scaling { row_offsets, col_offsets }))
}

/// True when zero is the minimum of every row and every column.
pub fn is_normalized(a: &TropMatrix) -> bool {
    (0..a.rows).all(|i| a.row_min(i).is_zero()) && (0..a.cols).all(|j| a.col_min(j).is_zero())
}

/// Decide factor rank ≤ 1: look for a column B and row C with
/// `A[i][j] = B[i] + C[j]` under the tropical conventions for +∞ (an
/// infinite entry forces its whole row or whole column infinite).
pub fn factor_rank_le1(a: &TropMatrix) -> Option<Factorization> {
    let inf_rows: Vec<bool> = (0..a.rows).map(|i| a.row(i).iter().all(TropValue::is_infinite)).collect();
    let inf_cols: Vec<bool> = (0..a.cols)
        .map(|j| (0..a.rows).all(|i| a.get(i, j).is_infinite()))
        .collect();
    // every infinite entry must be explained by an all-infinite row or column
    for i in 0..a.rows {
        for j in 0..a.cols {
            if a.get(i, j).is_infinite() && !inf_rows[i] && !inf_cols[j] {
                return None;
            }
        }
    }
    // anchor on the first finite row/column pair
    let i0 = (0..a.rows).find(|&i| !inf_rows[i]);
    let j0 = (0..a.cols).find(|&j| !inf_cols[j]);
    let (b, c) = match (i0, j0) {
        (Some(i0), Some(j0)) => {
            let base = a.get(i0, j0).clone();
            if base.is_infinite() {
                return None; // finite row meets finite column in an ∞ entry
            }
            let base = base.finite().unwrap().clone();
            let b: Vec<TropValue> = (0..a.rows)
                .map(|i| {
                    if inf_rows[i] {
                        TropValue::Infinity
                    } else {
                        a.get(i, j0).shift_down(&base)
                    }
                })
                .collect();
            let c: Vec<TropValue> = (0..a.cols)
                .map(|j| if inf_cols[j] { TropValue::Infinity } else { a.get(i0, j).clone() })
                .collect();
            (b, c)
        }
        // matrix entirely infinite: B = ∞ column, C = 0 row
        _ => (
            vec![TropValue::Infinity; a.rows],
            vec![TropValue::zero(); a.cols],
        ),
    };
    for i in 0..a.rows {
        for j in 0..a.cols {
            if b[i].tropical_mul(&c[j]) != *a.get(i, j) {
                return None;
            }
        }
    }
    let left = TropMatrix::new(a.rows, 1, b).ok()?;
    let right = TropMatrix::new(1, a.cols, c).ok()?;
    Some(Factorization::new(left, right).expect("1 inner dim"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::rat;

    fn m(rows: &[Vec<i64>]) -> TropMatrix {
        TropMatrix::from_int_rows(rows).unwrap()
    }

    #[test]
    fn mul_two_term_minimum() {
        let a = m(&[vec![0, 1], vec![1, 0]]);
        let b = m(&[vec![0], vec![1]]);
        assert_eq!(trop_mat_mul(&a, &b).unwrap(), m(&[vec![0], vec![1]]));
    }

    #[test]
    fn mul_by_tropical_identity() {
        let inf = TropValue::Infinity;
        let id = TropMatrix::new(
            2,
            2,
            vec![TropValue::from_int(0), inf.clone(), inf.clone(), TropValue::from_int(0)],
        )
        .unwrap();
        let b = TropMatrix::new(
            2,
            2,
            vec![TropValue::from_int(5), inf.clone(), inf, TropValue::from_int(7)],
        )
        .unwrap();
        assert_eq!(trop_mat_mul(&id, &b).unwrap(), b);
    }

    #[test]
    fn mul_shape_mismatch() {
        let a = m(&[vec![0, 1]]);
        let b = m(&[vec![0, 1]]);
        assert!(matches!(trop_mat_mul(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn verify_product_trivial() {
        let t = m(&[vec![0]]);
        let yes = Factorization::new(m(&[vec![0]]), m(&[vec![0]])).unwrap();
        let no = Factorization::new(m(&[vec![1]]), m(&[vec![0]])).unwrap();
        assert!(verify_product(&t, &yes).unwrap());
        assert!(!verify_product(&t, &no).unwrap());
    }

    #[test]
    fn normalize_basic() {
        let a = m(&[vec![1, 2], vec![3, 4]]);
        let (out, sc) = scale_normalize(&a).unwrap();
        assert_eq!(out, m(&[vec![0, 0], vec![0, 0]]));
        assert_eq!(sc.row_offsets, vec![rat(-1), rat(-3)]);
        assert_eq!(sc.col_offsets, vec![rat(0), rat(-1)]);
        assert_eq!(sc.unapply(&out).unwrap(), a);
    }

    #[test]
    fn normalize_already_normalized() {
        let a = m(&[vec![0, 2], vec![2, 0]]);
        let (out, sc) = scale_normalize(&a).unwrap();
        assert_eq!(out, a);
        assert!(sc.row_offsets.iter().all(|r| r.is_zero()));
        assert!(sc.col_offsets.iter().all(|r| r.is_zero()));
    }

    #[test]
    fn normalize_with_infinities() {
        let inf = TropValue::Infinity;
        let a = TropMatrix::new(
            2,
            2,
            vec![TropValue::from_int(5), inf.clone(), inf.clone(), TropValue::from_int(5)],
        )
        .unwrap();
        let (out, _) = scale_normalize(&a).unwrap();
        let expect = TropMatrix::new(
            2,
            2,
            vec![TropValue::from_int(0), inf.clone(), inf, TropValue::from_int(0)],
        )
        .unwrap();
        assert_eq!(out, expect);
    }

    #[test]
    fn normalize_rejects_improper() {
        let inf = TropValue::Infinity;
        let a = TropMatrix::new(2, 2, vec![inf.clone(), inf.clone(), TropValue::from_int(0), inf]).unwrap();
        match scale_normalize(&a) {
            Err(Error::ImproperMatrix { all_infinite_row: Some(0), .. }) => {}
            other => panic!("expected improper-row error, got {other:?}"),
        }
    }

    #[test]
    fn rank1_positive_case() {
        let a = m(&[vec![1, 2], vec![3, 4]]);
        let f = factor_rank_le1(&a).expect("rank 1");
        assert_eq!(f.inner_dim(), 1);
        assert!(verify_product(&a, &f).unwrap());
        assert_eq!(f.left, m(&[vec![0], vec![2]]));
        assert_eq!(f.right, m(&[vec![1, 2]]));
    }

    #[test]
    fn rank1_negative_case() {
        let a = m(&[vec![0, 0], vec![0, 1]]);
        assert!(factor_rank_le1(&a).is_none());
    }

    #[test]
    fn rank1_single_cell() {
        let a = m(&[vec![42]]);
        let f = factor_rank_le1(&a).unwrap();
        assert!(verify_product(&a, &f).unwrap());
    }

    #[test]
    fn rank1_infinite_column() {
        let inf = TropValue::Infinity;
        // whole second column infinite: still rank 1
        let a = TropMatrix::new(
            2,
            2,
            vec![TropValue::from_int(1), inf.clone(), TropValue::from_int(2), inf],
        )
        .unwrap();
        let f = factor_rank_le1(&a).expect("rank 1 with infinite column");
        assert!(verify_product(&a, &f).unwrap());
        // isolated infinity is not rank 1
        let b = TropMatrix::new(
            2,
            2,
            vec![TropValue::from_int(1), TropValue::Infinity, TropValue::from_int(2), TropValue::from_int(3)],
        )
        .unwrap();
        assert!(factor_rank_le1(&b).is_none());
    }
}
