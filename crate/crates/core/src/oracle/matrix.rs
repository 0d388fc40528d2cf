use rug::Float;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl DenseMatrix {
    pub fn zeros(prec: u32, rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Scalar::zero(prec); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
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

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        self.data[i * self.cols + j] = value;
    }

    pub fn prec(&self) -> u32 {
        self.data.first().map_or(64, Scalar::prec)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> Float {
        let mut total = Float::new(self.prec());
        for x in &self.data {
            total += x.norm_sqr();
        }
        total.sqrt()
    }

    /// Number of nonzero off-diagonal entries in row `i`.
    pub fn row_off_diagonal_count(&self, i: usize) -> usize {
        (0..self.cols).filter(|&j| j != i && !self.get(i, j).is_zero()).count()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.prec(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Principal submatrix on `idx`, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(self.prec(), idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out.data[a * idx.len() + b] = self.get(i, j).clone();
            }
        }
        out
    }

    /// Two distinct entries at once.
    pub(crate) fn pair_mut(&mut self, a: (usize, usize), b: (usize, usize)) -> (&mut Scalar, &mut Scalar) {
        let ia = a.0 * self.cols + a.1;
        let ib = b.0 * self.cols + b.1;
        assert!(ia < ib, "pair_mut expects increasing positions");
        let (lo, hi) = self.data.split_at_mut(ib);
        (&mut lo[ia], &mut hi[0])
    }
}
