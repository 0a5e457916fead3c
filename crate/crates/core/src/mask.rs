use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Boolean selection pattern over the entries of a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(rows: usize, cols: usize, bits: Vec<bool>) -> Result<Self> {
        if rows == 0 || cols == 0 || bits.len() != rows * cols {
            return Err(Error::InvalidShape(format!("{} mask bits for a {rows}x{cols} mask", bits.len())));
        }
        Ok(Self { rows, cols, bits })
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        Self { rows, cols, bits: vec![true; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                bits.push(f(i, j));
            }
        }
        Self { rows, cols, bits }
    }

    /// Nonzero entries of `m` are selected.
    pub fn from_matrix(m: &DenseMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), bits: m.as_slice().iter().map(|&v| v != 0.0).collect() }
    }

    pub fn to_matrix(&self) -> DenseMatrix {
        DenseMatrix::new(self.rows, self.cols, self.bits.iter().map(|&b| f64::from(u8::from(b))).collect())
            .expect("mask shape is valid")
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    /// Row-major linear indices of the selected entries.
    pub fn indices(&self) -> Vec<usize> {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }

    pub fn check_shape(&self, m: &DenseMatrix) -> Result<()> {
        if self.shape() != m.shape() {
            return Err(Error::DimensionMismatch(format!(
                "mask is {}x{}, matrix is {}x{}",
                self.rows,
                self.cols,
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }

    /// Copy of `m` with unselected entries zeroed.
    pub fn apply(&self, m: &DenseMatrix) -> DenseMatrix {
        let mut out = m.clone();
        for (x, &b) in out.as_mut_slice().iter_mut().zip(&self.bits) {
            if !b {
                *x = 0.0;
            }
        }
        out
    }
}
