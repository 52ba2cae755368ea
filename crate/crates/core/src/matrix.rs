use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense row-major `rows × cols` matrix of reals.
///
/// Most constructions require rows that are nonincreasing and strictly
/// positive; [`WeightMatrix::rows_decreasing`] records whether that holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    rows_decreasing: bool,
}

impl WeightMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::validation("matrix has no rows"));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::validation("matrix has no columns"));
        }
        let mut data = Vec::with_capacity(n * cols);
        for row in &rows {
            Error::check_len(cols, row.len())?;
            data.extend_from_slice(row);
        }
        Self::from_flat(n, cols, data)
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::validation("matrix dimensions must be positive"));
        }
        Error::check_len(rows * cols, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("matrix entries must be finite"));
        }
        let rows_decreasing = data
            .chunks_exact(cols)
            .all(|r| r[cols - 1] > 0.0 && r.windows(2).all(|w| w[0] >= w[1]));
        Ok(WeightMatrix {
            rows,
            cols,
            data,
            rows_decreasing,
        })
    }

    /// `n × n` matrix with every entry equal to `value`.
    pub fn constant(rows: usize, cols: usize, value: f64) -> Result<Self> {
        Self::from_flat(rows, cols, vec![value; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Every row satisfies `y_{i1} ≥ … ≥ y_{iN} > 0`.
    pub fn rows_decreasing(&self) -> bool {
        self.rows_decreasing
    }

    pub fn require_rows_decreasing(&self) -> Result<()> {
        if self.rows_decreasing {
            return Ok(());
        }
        let bad = self
            .iter_rows()
            .position(|r| !(r[r.len() - 1] > 0.0 && r.windows(2).all(|w| w[0] >= w[1])))
            .unwrap_or(0);
        Err(Error::validation(format!(
            "row {bad} is not nonincreasing and positive"
        )))
    }

    pub fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::validation(format!(
                "matrix must be square, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    /// Checks that every row sums to 1 within `tol`.
    pub fn require_unit_row_sums(&self, tol: f64) -> Result<()> {
        for (i, row) in self.iter_rows().enumerate() {
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::validation(format!(
                    "row {i} sums to {s}, expected 1 within {tol}"
                )));
            }
        }
        Ok(())
    }

    /// Divides each row by its sum.
    pub fn normalize_rows(&self) -> Result<WeightMatrix> {
        let mut data = self.data.clone();
        for row in data.chunks_exact_mut(self.cols) {
            let s: f64 = row.iter().sum();
            if !(s > 0.0) {
                return Err(Error::validation("cannot normalize a row with nonpositive sum"));
            }
            row.iter_mut().for_each(|v| *v /= s);
        }
        Self::from_flat(self.rows, self.cols, data)
    }

    pub fn scaled(&self, factor: f64) -> Result<WeightMatrix> {
        Self::from_flat(
            self.rows,
            self.cols,
            self.data.iter().map(|v| v * factor).collect(),
        )
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter_rows().map(<[f64]>::to_vec).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for WeightMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        WeightMatrix::from_rows(rows)
    }
}

impl From<WeightMatrix> for Vec<Vec<f64>> {
    fn from(m: WeightMatrix) -> Self {
        m.to_rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decreasing_flag() {
        let m = WeightMatrix::from_rows(vec![vec![4.0, 3.0], vec![2.0, 1.0]]).unwrap();
        assert!(m.rows_decreasing());
        assert_eq!(m.get(1, 0), 2.0);
        let m = WeightMatrix::from_rows(vec![vec![1.0, 3.0], vec![2.0, 1.0]]).unwrap();
        assert!(!m.rows_decreasing());
        assert!(m.require_rows_decreasing().is_err());
        let m = WeightMatrix::from_rows(vec![vec![1.0, 0.0]]).unwrap();
        assert!(!m.rows_decreasing());
    }

    #[test]
    fn shape_errors() {
        assert!(WeightMatrix::from_rows(vec![]).is_err());
        assert!(WeightMatrix::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(WeightMatrix::from_rows(vec![vec![f64::NAN]]).is_err());
        assert!(WeightMatrix::from_flat(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn row_sums() {
        let m = WeightMatrix::from_rows(vec![vec![3.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(m.require_unit_row_sums(1e-9).is_err());
        let n = m.normalize_rows().unwrap();
        n.require_unit_row_sums(1e-12).unwrap();
        assert_eq!(n.row(0), &[0.75, 0.25]);
    }
}
