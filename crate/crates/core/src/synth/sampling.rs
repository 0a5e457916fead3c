use crate::error::{Error, Result};
use crate::linalg::ensure_orthogonal;
use crate::mask::Mask;
use crate::matrix::DenseMatrix;
use crate::synth::Prng;

/// `A(X) = mask ∘ (T_left · X · T_right)`, read out row-major over the selected
/// coefficients. With orthogonal transforms `A Aᵀ = I`, which keeps the
/// least-squares and projection steps of the compressive solver closed-form.
#[derive(Debug, Clone)]
pub struct SamplingOperator {
    pub mask: Mask,
    pub transform: Option<(DenseMatrix, DenseMatrix)>,
}

impl SamplingOperator {
    pub fn new(mask: Mask, transform: Option<(DenseMatrix, DenseMatrix)>) -> Result<Self> {
        if mask.is_empty() {
            return Err(Error::EmptyMask);
        }
        if let Some((l, r)) = &transform {
            ensure_orthogonal(l, 1e-10)?;
            ensure_orthogonal(r, 1e-10)?;
            if l.rows() != mask.shape().0 || r.cols() != mask.shape().1 {
                return Err(Error::DimensionMismatch("transform does not match the mask shape".into()));
            }
        }
        Ok(Self { mask, transform })
    }

    /// Entry subsampling with no transform.
    pub fn entries(mask: Mask) -> Result<Self> {
        Self::new(mask, None)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.mask.shape()
    }

    /// Number of measurements.
    pub fn len(&self) -> usize {
        self.mask.count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn forward_transform(&self, x: &DenseMatrix) -> DenseMatrix {
        match &self.transform {
            Some((l, r)) => l.mul_unchecked(x).mul_unchecked(r),
            None => x.clone(),
        }
    }

    pub(crate) fn inverse_transform(&self, c: &DenseMatrix) -> DenseMatrix {
        match &self.transform {
            Some((l, r)) => l.tr_mul(c).mul_tr(r),
            None => c.clone(),
        }
    }

    pub fn apply(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        self.mask.check_shape(x)?;
        let c = self.forward_transform(x);
        Ok(self.mask.indices().into_iter().map(|i| c.as_slice()[i]).collect())
    }

    pub fn adjoint(&self, y: &[f64]) -> Result<DenseMatrix> {
        if y.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} measurements for an operator with {}",
                y.len(),
                self.len()
            )));
        }
        let (n1, n2) = self.shape();
        let mut c = DenseMatrix::zeros(n1, n2);
        for (idx, &v) in self.mask.indices().into_iter().zip(y) {
            c.as_mut_slice()[idx] = v;
        }
        Ok(self.inverse_transform(&c))
    }

    /// `(α I + β AᵀA)⁻¹ V`, diagonal in the transform domain.
    pub(crate) fn solve_shifted(&self, v: &DenseMatrix, alpha: f64, beta: f64) -> DenseMatrix {
        let mut c = self.forward_transform(v);
        for (x, &b) in c.as_mut_slice().iter_mut().zip(self.mask.bits()) {
            *x /= if b { alpha + beta } else { alpha };
        }
        self.inverse_transform(&c)
    }

    /// Distance from `y` to the range of `A`; zero whenever the dimensions
    /// match, since `A` has orthonormal rows.
    pub fn range_distance(&self, y: &[f64]) -> Result<f64> {
        let back = self.apply(&self.adjoint(y)?)?;
        Ok(y.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
    }
}

/// Samples each transform-domain coefficient independently with probability
/// `rate`; at least one coefficient is always selected.
pub fn gen_sampling_operator(
    n1: usize,
    n2: usize,
    rate: f64,
    transform: Option<(DenseMatrix, DenseMatrix)>,
    rng: &mut Prng,
) -> Result<SamplingOperator> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidRate(rate));
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidShape(format!("{n1}x{n2} sampling grid")));
    }
    let mut bits: Vec<bool> = (0..n1 * n2).map(|_| rate >= 1.0 || rng.bernoulli(rate)).collect();
    if !bits.iter().any(|&b| b) {
        let i = rng.below(bits.len());
        bits[i] = true;
    }
    SamplingOperator::new(Mask::new(n1, n2, bits)?, transform)
}
