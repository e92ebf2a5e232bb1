//! Tridiagonal systems. Every matrix assembled by the solvers is a
//! diagonally dominant M-matrix, so elimination without pivoting is stable.

use crate::error::{Error, Result};

/// Tridiagonal matrix in three-band storage: row `i` reads
/// `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]`; `lower[0]` and
/// `upper[n-1]` are ignored.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Tridiagonal {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.lower[i] * x[i - 1];
            }
            if i + 1 < n {
                s += self.upper[i] * x[i + 1];
            }
            out[i] = s;
        }
    }

    /// Thomas algorithm; `rhs` is overwritten with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64], scratch: &mut Vec<f64>) -> Result<()> {
        let n = self.len();
        scratch.clear();
        scratch.resize(n, 0.0);
        let mut pivot = self.diag[0];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::InvalidData("singular tridiagonal system".into()));
        }
        rhs[0] /= pivot;
        for i in 1..n {
            scratch[i] = self.upper[i - 1] / pivot;
            pivot = self.diag[i] - self.lower[i] * scratch[i];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::InvalidData("singular tridiagonal system".into()));
            }
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) / pivot;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            rhs[i] -= scratch[i + 1] * rhs[i + 1];
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut x = rhs.to_vec();
        let mut scratch = Vec::new();
        self.solve_in_place(&mut x, &mut scratch)?;
        Ok(x)
    }
}

pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}
