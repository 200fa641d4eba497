//! Jacobi eigensolver for small dense symmetric matrices.

/// Eigendecomposition of a symmetric n×n matrix (row-major), by cyclic
/// Jacobi rotations. Returns eigenvalues in descending order and the
/// matching orthonormal eigenvectors, one `Vec<f64>` of length n per value.
///
/// Panics if the input is not square of size n or not finite; callers keep
/// their matrices symmetric by construction.
pub(crate) fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(a.len(), n * n, "matrix must be n*n");
    assert!(a.iter().all(|v| v.is_finite()), "matrix must be finite");
    let mut m = a.to_vec();
    // v holds the accumulated rotations; column j becomes eigenvector j
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let norm: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = f64::EPSILON * norm.max(f64::MIN_POSITIVE);
    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| m[p * n + q] * m[p * n + q])
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let tau = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                m[p * n + p] -= t * apq;
                m[q * n + q] += t * apq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = m[i * n + p];
                        let aiq = m[i * n + q];
                        m[i * n + p] = c * aip - s * aiq;
                        m[p * n + i] = m[i * n + p];
                        m[i * n + q] = s * aip + c * aiq;
                        m[q * n + i] = m[i * n + q];
                    }
                }
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].partial_cmp(&m[i * n + i]).unwrap());
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&j| (0..n).map(|i| v[i * n + j]).collect())
        .collect();
    (values, vectors)
}
