//! Small dense helpers: 2×2 real symmetric eigendecomposition and a 4×4
//! linear solve.

/// Eigen decomposition of [[a, b], [b, d]].
///
/// Returns eigenvalues (ascending) and the orthogonal matrix whose columns
/// are the eigenvectors, row-major.
pub fn symmetric_eigen_2x2(a: f64, b: f64, d: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = half.hypot(b);
    let vals = [mean - r, mean + r];
    if r == 0.0 {
        return (vals, [[1.0, 0.0], [0.0, 1.0]]);
    }
    // rotation angle with tan 2θ = 2b/(a − d)
    let theta = 0.5 * b.atan2(half);
    let (s, c) = theta.sin_cos();
    // columns: lower eigenvector (−s, c), upper (c, s)
    (vals, [[-s, c], [c, s]])
}

/// Solves A x = b by Gaussian elimination with partial pivoting. Returns
/// `None` when A is numerically singular.
pub fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col].abs() < 1e-14 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut s = b[row];
        for k in row + 1..4 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_reconstructs() {
        for &(a, b, d) in &[(1.0, 0.3, -2.0), (5.0, 0.0, 5.0), (-1.0, 2.0, 4.0), (3.0, 0.0, 1.0)] {
            let (l, u) = symmetric_eigen_2x2(a, b, d);
            assert!(l[0] <= l[1]);
            for i in 0..2 {
                for j in 0..2 {
                    let m = u[i][0] * l[0] * u[j][0] + u[i][1] * l[1] * u[j][1];
                    let want = [[a, b], [b, d]][i][j];
                    assert!((m - want).abs() < 1e-12, "{a} {b} {d}");
                }
            }
        }
    }

    #[test]
    fn solve_matches_known() {
        let a = [[2.0, 1.0, 0.0, 0.0], [1.0, 3.0, 1.0, 0.0], [0.0, 1.0, 4.0, 1.0], [0.0, 0.0, 1.0, 5.0]];
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut b = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                b[i] += a[i][j] * x[j];
            }
        }
        let got = solve4(a, b).unwrap();
        for i in 0..4 {
            assert!((got[i] - x[i]).abs() < 1e-12);
        }
        assert!(solve4([[1.0; 4]; 4], b).is_none());
    }
}
