//! Dense complex LU factorization with partial pivoting.
//!
//! Constraint systems stay small (a few dozen rows at most), so a plain
//! dense factorization with an exact 1-norm condition number is both
//! simple and fast enough.

use num_complex::Complex64;

/// Row-major LU factors of a square complex matrix, with the pivot record.
pub(crate) struct LuFactors {
    n: usize,
    lu: Vec<Complex64>,
    pivots: Vec<usize>,
}

/// Factors a row-major `n`×`n` matrix in place. Returns `None` when a pivot
/// column is exactly zero, i.e. the matrix is structurally singular.
pub(crate) fn factor(mut a: Vec<Complex64>, n: usize) -> Option<LuFactors> {
    debug_assert_eq!(a.len(), n * n);
    let mut pivots = vec![0usize; n];
    for col in 0..n {
        let mut best = col;
        let mut best_mag = a[col * n + col].norm_sqr();
        for row in col + 1..n {
            let mag = a[row * n + col].norm_sqr();
            if mag > best_mag {
                best = row;
                best_mag = mag;
            }
        }
        if best_mag == 0.0 {
            return None;
        }
        pivots[col] = best;
        if best != col {
            for k in 0..n {
                a.swap(col * n + k, best * n + k);
            }
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / pivot;
            a[row * n + col] = f;
            for k in col + 1..n {
                let upper = a[col * n + k];
                a[row * n + k] -= f * upper;
            }
        }
    }
    Some(LuFactors { n, lu: a, pivots })
}

impl LuFactors {
    /// Solves A·x = b using the stored factors.
    pub(crate) fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x = b.to_vec();
        for col in 0..n {
            x.swap(col, self.pivots[col]);
        }
        for col in 0..n {
            let xc = x[col];
            for row in col + 1..n {
                x[row] -= self.lu[row * n + col] * xc;
            }
        }
        for col in (0..n).rev() {
            let mut acc = x[col];
            for k in col + 1..n {
                acc -= self.lu[col * n + k] * x[k];
            }
            x[col] = acc / self.lu[col * n + col];
        }
        x
    }

    /// 1-norm of the inverse, built column by column from unit solves.
    pub(crate) fn inverse_norm1(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        for col in 0..n {
            e[col] = Complex64::new(1.0, 0.0);
            let x = self.solve(&e);
            e[col] = Complex64::new(0.0, 0.0);
            let sum: f64 = x.iter().map(|z| z.norm()).sum();
            worst = worst.max(sum);
        }
        worst
    }
}

/// Matrix 1-norm: the largest column sum of moduli.
pub(crate) fn norm1(a: &[Complex64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for col in 0..n {
        let sum: f64 = (0..n).map(|row| a[row * n + col].norm()).sum();
        worst = worst.max(sum);
    }
    worst
}
