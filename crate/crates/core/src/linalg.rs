//! Small dense and banded kernels used by the discrete operators.

use crate::error::{Error, Result};

/// Solves a symmetric tridiagonal system `A x = b` by the Thomas algorithm.
///
/// `diag` has length `n`, `off` has length `n - 1` (both the sub- and the
/// super-diagonal). The matrix must be diagonally dominant or positive
/// definite; a vanishing pivot is reported as a numeric failure.
pub fn solve_sym_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    debug_assert_eq!(off.len() + 1, n);
    debug_assert_eq!(rhs.len(), n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot.abs() <= f64::MIN_POSITIVE {
        return Err(Error::NumericFailure("zero pivot in tridiagonal solve".into()));
    }
    if n > 1 {
        c[0] = off[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - off[i - 1] * c[i - 1];
        if pivot.abs() <= f64::MIN_POSITIVE || !pivot.is_finite() {
            return Err(Error::NumericFailure(format!(
                "zero pivot at row {i} in tridiagonal solve"
            )));
        }
        if i + 1 < n {
            c[i] = off[i] / pivot;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// definite operator given as a closure.
pub fn conjugate_gradient<F>(
    apply: F,
    inv_diag: &[f64],
    rhs: &[f64],
    x0: Option<&[f64]>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = rhs.len();
    let mut x = match x0 {
        Some(v) => v.to_vec(),
        None => vec![0.0; n],
    };
    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let b_norm = dot(rhs, rhs).sqrt();
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        if dot(&r, &r).sqrt() <= rel_tol * b_norm {
            return Ok(x);
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(Error::NumericFailure(
                "conjugate gradient lost positive definiteness".into(),
            ));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if dot(&r, &r).sqrt() <= rel_tol * b_norm * 10.0 {
        return Ok(x);
    }
    Err(Error::NumericFailure(format!(
        "conjugate gradient did not converge in {max_iter} iterations"
    )))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Weighted least squares `min Σ w_i (y_i − Σ_j c_j φ_j(x_i))²`, solved by QR
/// on the row-scaled design matrix. Returns the coefficients.
pub fn weighted_least_squares(design: &[Vec<f64>], y: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
    use nalgebra::{DMatrix, DVector};
    let rows = y.len();
    let cols = design.first().map_or(0, Vec::len);
    if rows < cols || cols == 0 {
        return Err(Error::InvalidInput(format!(
            "least squares needs at least {cols} samples, got {rows}"
        )));
    }
    let a = DMatrix::from_fn(rows, cols, |i, j| design[i][j] * weights[i].sqrt());
    let b = DVector::from_fn(rows, |i, _| y[i] * weights[i].sqrt());
    let svd = a.svd(true, true);
    let sol = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::NumericFailure(format!("least squares: {e}")))?;
    Ok(sol.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_matches_dense() {
        let diag = [4.0, 5.0, 6.0, 7.0];
        let off = [1.0, -2.0, 0.5];
        let x_true = [1.0, -1.0, 2.0, 0.25];
        let mut rhs = [0.0; 4];
        for i in 0..4 {
            rhs[i] = diag[i] * x_true[i];
            if i > 0 {
                rhs[i] += off[i - 1] * x_true[i - 1];
            }
            if i < 3 {
                rhs[i] += off[i] * x_true[i + 1];
            }
        }
        let x = solve_sym_tridiagonal(&diag, &off, &rhs).unwrap();
        for (a, b) in x.iter().zip(x_true) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn cg_solves_laplacian_like_system() {
        let n = 50;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let l = if i > 0 { x[i - 1] } else { 0.0 };
                let r = if i + 1 < n { x[i + 1] } else { 0.0 };
                y[i] = 3.0 * x[i] - l - r;
            }
        };
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = conjugate_gradient(apply, &vec![1.0 / 3.0; n], &rhs, None, 1e-13, 500).unwrap();
        let mut ax = vec![0.0; n];
        apply(&x, &mut ax);
        for (a, b) in ax.iter().zip(&rhs) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn least_squares_recovers_exact_model() {
        let xs = [1.0, 2.0, 3.0, 5.0];
        let design: Vec<Vec<f64>> = xs.iter().map(|x| vec![1.0, *x]).collect();
        let y: Vec<f64> = xs.iter().map(|x| 0.5 + 2.0 * x).collect();
        let c = weighted_least_squares(&design, &y, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-12 && (c[1] - 2.0).abs() < 1e-12);
    }
}
