//! Small dense linear-algebra helpers shared by the geometry layers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// `uᵀ G v`.
pub fn inner(g: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let mut acc = 0.0;
    for i in 0..u.len() {
        if u[i] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..v.len() {
            row += g[(i, j)] * v[j];
        }
        acc += u[i] * row;
    }
    acc
}

pub fn norm(g: &DMatrix<f64>, u: &DVector<f64>) -> f64 {
    inner(g, u, u).max(0.0).sqrt()
}

/// Smallest eigenvalue of a symmetric matrix. Closed forms for d <= 2.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    match m.nrows() {
        0 => f64::INFINITY,
        1 => m[(0, 0)],
        2 => {
            let (a, b, d) = (m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]);
            let mean = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            mean - rad
        }
        _ => SymmetricEigen::new(m.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min),
    }
}

/// Largest absolute deviation of `m` from its transpose.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    dev
}

/// Modified Gram-Schmidt (two passes) with respect to the inner product `g`.
///
/// Candidates are consumed in order; a candidate whose residual norm falls below
/// `rel_tol` times its original norm is skipped. Stops once `want` vectors are found.
pub fn gram_schmidt<I>(g: &DMatrix<f64>, candidates: I, want: usize, rel_tol: f64) -> Vec<DVector<f64>>
where
    I: IntoIterator<Item = DVector<f64>>,
{
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(want);
    for cand in candidates {
        if frame.len() == want {
            break;
        }
        let original = norm(g, &cand);
        if original == 0.0 {
            continue;
        }
        let mut v = cand;
        for _ in 0..2 {
            for e in &frame {
                let c = inner(g, e, &v);
                v -= e * c;
            }
        }
        let n = norm(g, &v);
        if n > rel_tol * original {
            frame.push(v / n);
        }
    }
    frame
}

/// Euclidean orthonormal basis of the column span of `m` (thin SVD, rank by `tol`).
pub fn orthonormal_columns(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > tol * smax.max(1e-300))
        .map(|(i, _)| i)
        .collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Sine of the largest principal angle between the column spans of `a` and `b`.
///
/// Returns 1 when the spans have different dimensions.
pub fn max_principal_sine(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = orthonormal_columns(a, 1e-10);
    let qb = orthonormal_columns(b, 1e-10);
    if qa.ncols() != qb.ncols() {
        return 1.0;
    }
    if qa.ncols() == 0 {
        return 0.0;
    }
    // residual of projecting b onto span a; its spectral norm is the sine, without the
    // cancellation in sqrt(1 - cos²)
    let residual = &qb - &qa * (qa.transpose() * &qb);
    residual.singular_values().iter().cloned().fold(0.0, f64::max).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_eigenvalue_matches_decomposition() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.5]);
        let reference = SymmetricEigen::new(m.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!((min_eigenvalue(&m) - reference).abs() < 1e-14);
    }

    #[test]
    fn gram_schmidt_is_orthonormal_under_metric() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.1, 0.0, 0.1, 1.0, 0.2, 0.0, 0.2, 3.0]);
        let cands = (0..3).map(|i| DVector::from_fn(3, |k, _| if k == i { 1.0 } else { 0.0 }));
        let frame = gram_schmidt(&g, cands, 3, 1e-12);
        assert_eq!(frame.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((inner(&g, &frame[i], &frame[j]) - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn principal_sine_detects_rotation() {
        let a = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let b = DMatrix::from_column_slice(3, 1, &[1.0, 1.0, 0.0]);
        let s = max_principal_sine(&a, &b);
        assert!((s - (0.5f64).sqrt()).abs() < 1e-12);
        assert!(max_principal_sine(&a, &(a.clone() * 3.0)) < 1e-12);
    }
}
