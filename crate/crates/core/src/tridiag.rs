//! Tridiagonal LU factorization (Thomas algorithm) with reusable factors.

/// Factored tridiagonal matrix with sub-diagonal `lower`, diagonal `diag`
/// and super-diagonal `upper`. Row `i` reads
/// `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]`; `lower[0]` and
/// `upper[n-1]` are ignored.
///
/// No pivoting: intended for diagonally dominant systems.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    lower: Vec<f64>,
    // modified super-diagonal c'_i
    upper: Vec<f64>,
    // 1 / (b_i - a_i c'_{i-1})
    inv_pivot: Vec<f64>,
}

impl TridiagonalLu {
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Self {
        let n = diag.len();
        assert!(n > 0 && lower.len() == n && upper.len() == n);
        let mut c = vec![0.0; n];
        let mut inv = vec![0.0; n];
        inv[0] = 1.0 / diag[0];
        c[0] = upper[0] * inv[0];
        for i in 1..n {
            inv[i] = 1.0 / (diag[i] - lower[i] * c[i - 1]);
            c[i] = upper[i] * inv[i];
        }
        Self {
            lower: lower.to_vec(),
            upper: c,
            inv_pivot: inv,
        }
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(rhs.len(), n);
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper[i] * rhs[i + 1];
        }
    }
}
