//! Column-pivoted Householder QR least squares.
//!
//! Order-4 monomial design matrices are badly conditioned, so the fit goes
//! through an orthogonal factorization instead of normal equations. Column
//! pivoting moves dependent columns to the tail where they can be reported
//! back to the caller by index.

pub(crate) struct LstSq {
    /// Solution in the original column order; deficient columns get 0.
    pub solution: Vec<f64>,
    pub rank: usize,
    /// Original indices of columns judged linearly dependent.
    pub deficient: Vec<usize>,
}

/// Minimize ||A x - b|| for a row-major `rows x cols` matrix with `rows >= cols`.
///
/// `rel_tol` scales the largest pivot to decide where numerical rank ends.
pub(crate) fn least_squares(
    a: &[f64],
    rows: usize,
    cols: usize,
    b: &[f64],
    rel_tol: f64,
) -> LstSq {
    assert_eq!(a.len(), rows * cols);
    assert_eq!(b.len(), rows);
    assert!(rows >= cols, "least_squares requires rows >= cols");

    // Column-major working copy.
    let mut col: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| a[i * cols + j]).collect())
        .collect();
    let mut qtb = b.to_vec();
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut diag = vec![0.0f64; cols];

    let steps = cols.min(rows);
    let mut rank = steps;
    for k in 0..steps {
        // Pivot: bring the column with the largest remaining norm to position k.
        let mut best = k;
        let mut best_norm = 0.0;
        for j in k..cols {
            let norm: f64 = col[j][k..].iter().map(|v| v * v).sum();
            if norm > best_norm {
                best_norm = norm;
                best = j;
            }
        }
        if best_norm == 0.0 {
            rank = k;
            break;
        }
        col.swap(k, best);
        perm.swap(k, best);

        // Householder reflector annihilating column k below the diagonal.
        let norm = best_norm.sqrt();
        let alpha = if col[k][k] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = col[k][k..].to_vec();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        diag[k] = alpha;
        if vtv > 0.0 {
            let apply = |target: &mut [f64]| {
                let s: f64 = v.iter().zip(target.iter()).map(|(vi, ti)| vi * ti).sum();
                let scale = 2.0 * s / vtv;
                for (ti, vi) in target.iter_mut().zip(v.iter()) {
                    *ti -= scale * vi;
                }
            };
            for c in col.iter_mut().skip(k + 1) {
                apply(&mut c[k..]);
            }
            apply(&mut qtb[k..]);
        }
    }

    // Numerical rank from the pivoted diagonal.
    let scale = diag[0].abs();
    if scale == 0.0 {
        rank = 0;
    } else {
        for k in 0..rank {
            if diag[k].abs() <= rel_tol * scale {
                rank = k;
                break;
            }
        }
    }

    // Back substitution over the leading rank x rank triangle.
    let mut y = vec![0.0f64; cols];
    for j in (0..rank).rev() {
        let mut s = qtb[j];
        for l in (j + 1)..rank {
            s -= col[l][j] * y[l];
        }
        y[j] = s / diag[j];
    }

    let mut solution = vec![0.0f64; cols];
    for (j, &p) in perm.iter().enumerate().take(rank) {
        solution[p] = y[j];
    }
    let mut deficient: Vec<usize> = perm[rank..].to_vec();
    deficient.sort_unstable();

    LstSq {
        solution,
        rank,
        deficient,
    }
}
