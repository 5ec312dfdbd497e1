use faer::{Col, Mat};

use crate::error::{Error, Result};

/// Thin SVD of a regressor matrix, reusable for several right-hand sides.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    u: Mat<f64>,
    s: Vec<f64>,
    v: Mat<f64>,
    rank: usize,
}

impl LeastSquares {
    pub fn new(x: &Mat<f64>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::EmptySignal);
        }
        for c in 0..x.ncols() {
            if x.col(c).iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteRegression);
            }
        }
        let svd = x.thin_svd().map_err(|_| Error::SvdFailed)?;
        let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
        let s_max = s.first().copied().unwrap_or(0.0);
        let tol = x.nrows().max(x.ncols()) as f64 * f64::EPSILON * s_max;
        let rank = s.iter().take_while(|&&v| v > tol).count();
        let ls = Self { u: svd.U().to_owned(), s, v: svd.V().to_owned(), rank };
        log::debug!(
            "least squares {}x{}: rank {}, condition {:.3e}",
            x.nrows(),
            x.ncols(),
            ls.rank,
            ls.condition()
        );
        Ok(ls)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Ratio of the largest to the smallest retained singular value.
    pub fn condition(&self) -> f64 {
        if self.rank == 0 {
            return f64::INFINITY;
        }
        self.s[0] / self.s[self.rank - 1]
    }

    /// Minimum-norm minimiser of `||X c - target||`.
    pub fn solve(&self, target: &[f64]) -> Result<Vec<f64>> {
        if target.len() != self.u.nrows() {
            return Err(Error::LengthMismatch { expected: self.u.nrows(), actual: target.len() });
        }
        if target.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteRegression);
        }
        let b = Col::<f64>::from_fn(target.len(), |i| target[i]);
        let r = self.rank;
        let ub = self.u.get(.., ..r).transpose() * &b;
        let scaled = Col::<f64>::from_fn(r, |i| ub[i] / self.s[i]);
        let c = self.v.get(.., ..r) * &scaled;
        Ok(c.iter().copied().collect())
    }
}

/// One-shot minimum-norm least squares.
pub fn fit_least_squares(x: &Mat<f64>, target: &[f64]) -> Result<Vec<f64>> {
    LeastSquares::new(x)?.solve(target)
}

/// `X c`.
pub fn mat_vec(x: &Mat<f64>, c: &[f64]) -> Vec<f64> {
    let col = Col::<f64>::from_fn(c.len(), |i| c[i]);
    (x * &col).iter().copied().collect()
}
