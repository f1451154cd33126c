//! Small dense linear solves used by checks and the quasilinear ODE driver.

/// Solve `a x = b` by Gaussian elimination with partial pivoting. `None`
/// when the matrix is singular to working precision.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n) && b.len() == n);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in (col + 1)..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

/// Least-squares solution of an overdetermined system via normal equations;
/// adequate for the small well-conditioned systems used in tests.
pub fn least_squares(rows: &[Vec<f64>], rhs: &[f64], unknowns: usize) -> Option<Vec<f64>> {
    assert_eq!(rows.len(), rhs.len());
    let mut ata = vec![vec![0.0; unknowns]; unknowns];
    let mut atb = vec![0.0; unknowns];
    for (row, &y) in rows.iter().zip(rhs) {
        assert_eq!(row.len(), unknowns);
        for i in 0..unknowns {
            for j in 0..unknowns {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * y;
        }
    }
    gauss_solve(ata, atb)
}
