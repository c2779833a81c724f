//! Column-scaled SVD least squares.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use crate::{Error, Result, C64};

pub(crate) struct Solution {
    pub coeffs: Vec<C64>,
}

/// How to treat small singular values.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Regularization {
    /// Fail with `IllConditioned` when `σ_min < rcond·σ_max`.
    Strict { rcond: f64 },
    /// Drop singular values below `rcond·σ_max`.
    Truncate { rcond: f64 },
    /// Tikhonov damping `σ/(σ² + λσ_max²)`.
    Ridge { lambda: f64 },
}

/// Minimises `‖A x − b‖₂` for a row-major `rows × cols` matrix.
pub(crate) fn least_squares(rows: usize, cols: usize, a: &[C64], b: &[C64], reg: Regularization) -> Result<Solution> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("least squares needs a non-empty system".into()));
    }
    if a.len() != rows * cols || b.len() != rows {
        return Err(Error::DimensionMismatch { expected: rows * cols, found: a.len() });
    }
    let mut m = DMatrix::from_row_slice(rows, cols, a);
    let mut scale = vec![1.0; cols];
    for (j, s) in scale.iter_mut().enumerate() {
        let norm = m.column(j).norm();
        if norm > 0.0 {
            *s = norm;
            m.column_mut(j).scale_mut(1.0 / norm);
        }
    }
    let svd = m.svd(true, true);
    let sv = &svd.singular_values;
    let s_max = sv.iter().cloned().fold(0.0, f64::max);
    let s_min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    if s_max == 0.0 {
        return Ok(Solution { coeffs: vec![C64::zero(); cols] });
    }
    if let Regularization::Strict { rcond } = reg {
        if s_min < rcond * s_max {
            return Err(Error::IllConditioned { condition });
        }
    }
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested Vᵀ");
    let rhs = DVector::from_column_slice(b);
    let utb = u.adjoint() * rhs;
    let mut y = DVector::<C64>::zeros(sv.len());
    for k in 0..sv.len() {
        let s = sv[k];
        let gain = match reg {
            Regularization::Strict { .. } => 1.0 / s,
            Regularization::Truncate { rcond } => {
                if s >= rcond * s_max {
                    1.0 / s
                } else {
                    0.0
                }
            }
            Regularization::Ridge { lambda } => s / (s * s + lambda * s_max * s_max),
        };
        y[k] = utb[k] * gain;
    }
    let x = v_t.adjoint() * y;
    let coeffs = x.iter().zip(&scale).map(|(&v, &s)| v / s).collect();
    Ok(Solution { coeffs })
}
