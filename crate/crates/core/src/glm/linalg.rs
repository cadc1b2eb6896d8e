//! Minimal dense linear algebra for the IRLS solver: Cholesky factorization,
//! solve, and inverse for small symmetric positive-definite systems.

/// In-place Cholesky factorization (lower triangle) of a row-major `p x p`
/// SPD matrix. Fails with the index of the first non-positive pivot, which is
/// the first column linearly dependent on its predecessors.
pub fn cholesky(a: &mut [f64], p: usize) -> Result<(), usize> {
    debug_assert_eq!(a.len(), p * p);
    let diag_max = (0..p).map(|j| a[j * p + j].abs()).fold(0.0f64, f64::max);
    let tol = 1e-12 * diag_max.max(f64::MIN_POSITIVE);
    for j in 0..p {
        let mut d = a[j * p + j];
        for k in 0..j {
            d -= a[j * p + k] * a[j * p + k];
        }
        if d.is_nan() || !d.is_finite() || d <= tol {
            return Err(j);
        }
        let root = d.sqrt();
        a[j * p + j] = root;
        for i in (j + 1)..p {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= a[i * p + k] * a[j * p + k];
            }
            a[i * p + j] = s / root;
        }
    }
    Ok(())
}

/// Solve `L L^T x = b` given a factorization from [`cholesky`].
pub fn cholesky_solve(l: &[f64], p: usize, b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    // Forward: L y = b.
    for i in 0..p {
        let mut s = x[i];
        for k in 0..i {
            s -= l[i * p + k] * x[k];
        }
        x[i] = s / l[i * p + i];
    }
    // Backward: L^T x = y.
    for i in (0..p).rev() {
        let mut s = x[i];
        for k in (i + 1)..p {
            s -= l[k * p + i] * x[k];
        }
        x[i] = s / l[i * p + i];
    }
    x
}

/// Inverse of the SPD matrix whose factor is `l`, column by column.
pub fn cholesky_inverse(l: &[f64], p: usize) -> Vec<f64> {
    let mut inv = vec![0.0; p * p];
    let mut unit = vec![0.0; p];
    for j in 0..p {
        unit[j] = 1.0;
        let col = cholesky_solve(l, p, &unit);
        unit[j] = 0.0;
        for i in 0..p {
            inv[i * p + j] = col[i];
        }
    }
    inv
}
