//! Bookkeeping for the bound on the number of independent solutions of the
//! normal system: variables, independent constraints, and the rank of the
//! constraint matrix in an adapted orthonormal frame.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstraintCount {
    pub variables: usize,
    pub constraints: usize,
    /// `variables − constraints`.
    pub free: usize,
}

/// Counts as tabulated for the normal system: `φ, χ` (2), the split gradients
/// `φ*+φ̄` and `χ*+χ̄` (`n` each), `ξ` (`n`), `Ψ` (`n²`); constraints from the
/// projector conditions (`n(n+1)/2 + p(n−p)`) and the trace one-forms (`n`).
pub fn count_constraints(n: usize, p: usize) -> Result<ConstraintCount> {
    if p == 0 || p >= n {
        return Err(Error::InvalidRank { n, p });
    }
    let variables = 2 + 3 * n + n * n;
    let constraints = n + n * (n + 1) / 2 + p * (n - p);
    Ok(ConstraintCount { variables, constraints, free: variables - constraints })
}

/// `p(p+1)/2 + (n−p)(n−p+1)/2`.
pub fn closed_form_bound(n: usize, p: usize) -> usize {
    let q = n - p;
    p * (p + 1) / 2 + q * (q + 1) / 2
}

/// Coefficient matrix of `Ψ` in `£ξ P_ab = φ P_ab` with `P = diag(1,…,1,0,…,0)`:
/// rows are pairs `a ≤ b`, columns pairs `(r, q)`, entries `δ^r_a P_bq + δ^r_b P_aq`.
pub fn constraint_matrix(n: usize, p: usize) -> Vec<Vec<f64>> {
    let proj = |a: usize, b: usize| if a == b && a < p { 1.0 } else { 0.0 };
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut rows = Vec::new();
    for a in 0..n {
        for b in a..n {
            let mut row = vec![0.0; n * n];
            for r in 0..n {
                for q in 0..n {
                    row[r * n + q] = delta(r, a) * proj(b, q) + delta(r, b) * proj(a, q);
                }
            }
            rows.push(row);
        }
    }
    rows
}

/// Numerical rank by Gaussian elimination with partial pivoting.
pub fn matrix_rank(m: &[Vec<f64>], tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let piv = (rank..rows)
            .max_by(|x, y| a[*x][c].abs().total_cmp(&a[*y][c].abs()))
            .expect("non-empty pivot range");
        if a[piv][c].abs() <= tol {
            continue;
        }
        a.swap(rank, piv);
        let lead = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[c] / lead[c];
            if f != 0.0 {
                for (v, l) in row.iter_mut().zip(&lead).skip(c) {
                    *v -= f * l;
                }
            }
        }
        rank += 1;
    }
    rank
}
