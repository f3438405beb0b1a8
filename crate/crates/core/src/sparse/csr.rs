use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CsrError {
    #[error("row_ptr has length {found}, expected {expected}")]
    RowPtrLength { expected: usize, found: usize },
    #[error("row_ptr must start at 0 and end at nnz = {nnz}")]
    RowPtrBounds { nnz: usize },
    #[error("row_ptr decreases at row {row}")]
    RowPtrDecreasing { row: usize },
    #[error("col_idx has {cols} entries but values has {values}")]
    LengthMismatch { cols: usize, values: usize },
    #[error("column {col} out of range in row {row} (n_cols = {n_cols})")]
    ColumnOutOfRange { row: usize, col: usize, n_cols: usize },
    #[error("columns not strictly increasing in row {row}")]
    UnsortedRow { row: usize },
    #[error("row {row} out of range (n_rows = {n_rows})")]
    RowOutOfRange { row: usize, n_rows: usize },
    #[error("matrix has entries in both triangles (e.g. row {row}, column {col})")]
    BothTriangles { row: usize, col: usize },
    #[error("matrix is {n_rows}x{n_cols}, expected square")]
    NotSquare { n_rows: usize, n_cols: usize },
}

/// Compressed sparse row matrix with FP64 values.
///
/// Validated on construction: `row_ptr` has `n_rows + 1` non-decreasing
/// entries from 0 to nnz, and each row's column indices are strictly
/// increasing and below `n_cols`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, CsrError> {
        if row_ptr.len() != n_rows + 1 {
            return Err(CsrError::RowPtrLength { expected: n_rows + 1, found: row_ptr.len() });
        }
        if col_idx.len() != values.len() {
            return Err(CsrError::LengthMismatch { cols: col_idx.len(), values: values.len() });
        }
        let nnz = col_idx.len();
        if row_ptr[0] != 0 || row_ptr[n_rows] != nnz {
            return Err(CsrError::RowPtrBounds { nnz });
        }
        for row in 0..n_rows {
            let (start, end) = (row_ptr[row], row_ptr[row + 1]);
            if end < start {
                return Err(CsrError::RowPtrDecreasing { row });
            }
            let cols = &col_idx[start..end];
            if let Some(&col) = cols.iter().find(|&&c| c >= n_cols) {
                return Err(CsrError::ColumnOutOfRange { row, col, n_cols });
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CsrError::UnsortedRow { row });
            }
        }
        Ok(Self { n_rows, n_cols, row_ptr, col_idx, values })
    }

    /// Builds a matrix from `(row, col, value)` triplets in any order;
    /// duplicates are summed in FP64 in input order.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, CsrError> {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(row, col, _) in &entries {
            if row >= n_rows {
                return Err(CsrError::RowOutOfRange { row, n_rows });
            }
            if col >= n_cols {
                return Err(CsrError::ColumnOutOfRange { row, col, n_cols });
            }
        }
        // stable sort keeps duplicate order deterministic
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            col_idx.push(c);
            values.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self::new(n_rows, n_cols, row_ptr, col_idx, values)
    }

    pub fn identity(n: usize) -> Self {
        Self { n_rows: n, n_cols: n, row_ptr: (0..=n).collect(), col_idx: (0..n).collect(), values: vec![1.0; n] }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of one row.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[s..e], &self.values[s..e])
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    /// Replaces the stored values, keeping the sparsity pattern.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.nnz(), "value count must match the pattern");
        Self { values, ..self.clone() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.n_cols, self.n_rows, self.triplets().map(|(i, j, v)| (j, i, v)))
            .expect("transpose of a valid matrix is valid")
    }

    /// Bitwise symmetry of pattern and values.
    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let t = self.transpose();
        t.row_ptr == self.row_ptr
            && t.col_idx == self.col_idx
            && t.values.iter().zip(&self.values).all(|(a, b)| a.to_bits() == b.to_bits())
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }
}

/// Expands a matrix holding one triangle of a symmetric matrix into general
/// form. Diagonal entries are not duplicated, so
/// `nnz_out = 2 * nnz_in - n_diagonal`.
pub fn expand_symmetric(m: &CsrMatrix) -> Result<CsrMatrix, CsrError> {
    if !m.is_square() {
        return Err(CsrError::NotSquare { n_rows: m.n_rows, n_cols: m.n_cols });
    }
    let lower = m.triplets().find(|&(i, j, _)| i > j);
    let upper = m.triplets().find(|&(i, j, _)| i < j);
    if let (Some(_), Some((row, col, _))) = (lower, upper) {
        return Err(CsrError::BothTriangles { row, col });
    }
    let mirrored = m.triplets().filter(|&(i, j, _)| i != j).map(|(i, j, v)| (j, i, v));
    CsrMatrix::from_triplets(m.n_rows, m.n_cols, m.triplets().chain(mirrored).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rejects_bad_structure() {
        assert!(matches!(CsrMatrix::new(2, 2, vec![0, 1], vec![0], vec![1.0]), Err(CsrError::RowPtrLength { .. })));
        assert!(matches!(
            CsrMatrix::new(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 2.0]),
            Err(CsrError::UnsortedRow { row: 0 })
        ));
        assert!(matches!(CsrMatrix::new(1, 2, vec![0, 1], vec![2], vec![1.0]), Err(CsrError::ColumnOutOfRange { .. })));
        assert!(matches!(
            CsrMatrix::new(2, 2, vec![0, 2, 1], vec![0, 1], vec![1.0, 1.0]),
            Err(CsrError::RowPtrBounds { .. })
        ));
    }

    #[test]
    fn triplets_are_sorted_and_summed() {
        let m = CsrMatrix::from_triplets(2, 3, [(1, 2, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 2, 0.5)]).unwrap();
        assert_eq!(m.row_ptr(), &[0, 1, 3]);
        assert_eq!(m.col_idx(), &[1, 0, 2]);
        assert_eq!(m.values(), &[2.0, 3.0, 1.5]);
    }

    #[test]
    fn expand_identity_and_single_offdiagonal() {
        let i3 = CsrMatrix::identity(3);
        assert_eq!(expand_symmetric(&i3).unwrap(), i3);
        let m = CsrMatrix::from_triplets(3, 3, [(2, 0, 5.0)]).unwrap();
        let e = expand_symmetric(&m).unwrap();
        assert_eq!(e.nnz(), 2);
        assert_eq!((e.get(2, 0), e.get(0, 2)), (Some(5.0), Some(5.0)));
    }

    #[test]
    fn expand_3x3_gives_symmetric_dense() {
        let lower = CsrMatrix::from_triplets(3, 3, [(0, 0, 4.0), (1, 0, -1.0), (1, 1, 4.0), (2, 1, -0.5), (2, 2, 3.0)])
            .unwrap();
        let e = expand_symmetric(&lower).unwrap();
        assert_eq!(e.nnz(), 2 * 5 - 3);
        let d = e.to_dense();
        assert_eq!(d, vec![vec![4.0, -1.0, 0.0], vec![-1.0, 4.0, -0.5], vec![0.0, -0.5, 3.0]]);
        for (i, row) in d.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(v.to_bits(), d[j][i].to_bits());
            }
        }
        assert!(e.is_symmetric());
    }

    #[test]
    fn expand_rejects_both_triangles() {
        let m = CsrMatrix::from_triplets(2, 2, [(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        assert!(matches!(expand_symmetric(&m), Err(CsrError::BothTriangles { .. })));
    }
}
