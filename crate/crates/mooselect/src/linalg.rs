//! Dense symmetric solves for the small normal-equation systems produced by
//! least squares and IRLS (p is the model parameter count, rarely above 10).
//!
//! The factorization is a diagonally pivoted Cholesky; a pivot falling below
//! `tol * max_pivot` reports rank deficiency instead of silently producing
//! garbage coefficients.

#![allow(clippy::needless_range_loop)] // indexed sweeps mirror the math

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Relative pivot tolerance for rank-deficiency detection.
pub(crate) const PIVOT_REL_TOL: f64 = 1e-10;

/// Symmetric matrix stored as a dense row-major `p x p` buffer.
#[derive(Debug, Clone)]
pub(crate) struct SymMatrix<F> {
    pub n: usize,
    pub a: Vec<F>,
}

impl<F: Scalar> SymMatrix<F> {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            a: vec![F::zero(); n * n],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.a[i * self.n + j] = v;
    }
}

/// Pivoted Cholesky factorization `P' A P = L L'` of a symmetric
/// positive-semidefinite matrix, with diagonal pivoting.
pub(crate) struct PivotedCholesky<F> {
    n: usize,
    l: Vec<F>,        // lower triangle of the factor, row-major
    perm: Vec<usize>, // perm[k] = original column index placed at position k
}

impl<F: Scalar> PivotedCholesky<F> {
    /// Factor `a`. Fails with `RankDeficient` when a pivot drops below
    /// `PIVOT_REL_TOL * largest_pivot` (or is non-positive).
    pub fn factor(a: &SymMatrix<F>) -> Result<Self> {
        let n = a.n;
        let mut w = a.a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let tol = crate::num::real::<F>(PIVOT_REL_TOL);
        let mut max_pivot = F::zero();

        for k in 0..n {
            // Largest remaining diagonal entry becomes the pivot.
            let mut best = k;
            for j in (k + 1)..n {
                if w[j * n + j] > w[best * n + best] {
                    best = j;
                }
            }
            if best != k {
                swap_sym(&mut w, n, k, best);
                perm.swap(k, best);
            }

            let pivot = w[k * n + k];
            if k == 0 {
                max_pivot = pivot;
            }
            if pivot.is_nan()
                || pivot <= F::zero()
                || pivot <= tol * max_pivot
                || !pivot.is_finite()
            {
                return Err(Error::RankDeficient {
                    column: perm[k],
                    pivot: pivot.to_f64().unwrap_or(f64::NAN),
                });
            }
            if pivot > max_pivot {
                max_pivot = pivot;
            }

            let root = pivot.sqrt();
            w[k * n + k] = root;
            for i in (k + 1)..n {
                w[i * n + k] /= root;
            }
            // Keep the active Schur block fully symmetric: a later diagonal
            // swap exchanges whole rows and columns, so stale upper-triangle
            // entries would otherwise leak into the factor.
            for j in (k + 1)..n {
                let ljk = w[j * n + k];
                for i in j..n {
                    let lik = w[i * n + k];
                    let updated = w[i * n + j] - lik * ljk;
                    w[i * n + j] = updated;
                    w[j * n + i] = updated;
                }
            }
        }

        Ok(PivotedCholesky { n, l: w, perm })
    }

    /// Solve `A x = b` using the factorization.
    pub fn solve(&self, b: &[F]) -> Vec<F> {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        // Forward substitution on the permuted right-hand side.
        let mut y = vec![F::zero(); n];
        for i in 0..n {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.l[i * n + j] * y[j];
            }
            y[i] = s / self.l[i * n + i];
        }
        // Back substitution with the transpose.
        let mut z = vec![F::zero(); n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s -= self.l[j * n + i] * z[j];
            }
            z[i] = s / self.l[i * n + i];
        }
        // Undo the permutation.
        let mut x = vec![F::zero(); n];
        for i in 0..n {
            x[self.perm[i]] = z[i];
        }
        x
    }

    /// Diagonal of `A^{-1}`, via one solve per basis vector.
    pub fn inverse_diagonal(&self) -> Vec<F> {
        let n = self.n;
        let mut diag = vec![F::zero(); n];
        let mut e = vec![F::zero(); n];
        for j in 0..n {
            e[j] = F::one();
            let col = self.solve(&e);
            diag[j] = col[j];
            e[j] = F::zero();
        }
        diag
    }
}

/// Symmetric row+column swap of indices `i` and `j` in a dense `n x n` buffer.
fn swap_sym<F: Copy>(w: &mut [F], n: usize, i: usize, j: usize) {
    for c in 0..n {
        w.swap(i * n + c, j * n + c);
    }
    for r in 0..n {
        w.swap(r * n + i, r * n + j);
    }
}

/// Solve the weighted normal equations `(X' W X) beta = X' W z` for column
/// vectors `cols` (the design, column-major) and weights `w`.
pub(crate) fn solve_weighted_normal_equations<F: Scalar>(
    cols: &[Vec<F>],
    w: &[F],
    z: &[F],
) -> Result<Vec<F>> {
    let p = cols.len();
    let n = z.len();
    let mut a = SymMatrix::zeros(p);
    let mut b = vec![F::zero(); p];
    for i in 0..p {
        for j in i..p {
            let mut s = F::zero();
            for k in 0..n {
                s += cols[i][k] * w[k] * cols[j][k];
            }
            a.set(i, j, s);
            a.set(j, i, s);
        }
        let mut s = F::zero();
        for k in 0..n {
            s += cols[i][k] * w[k] * z[k];
        }
        b[i] = s;
    }
    let chol = PivotedCholesky::factor(&a)?;
    Ok(chol.solve(&b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn solves_well_conditioned_system() {
        // A = [[4,1],[1,3]], b = [1,2] -> x = [1/11, 7/11]
        let mut a = SymMatrix::zeros(2);
        a.set(0, 0, 4.0);
        a.set(0, 1, 1.0);
        a.set(1, 0, 1.0);
        a.set(1, 1, 3.0);
        let chol = PivotedCholesky::factor(&a).unwrap();
        let x = chol.solve(&[1.0, 2.0]);
        assert!(approx(x[0], 1.0 / 11.0, 1e-12));
        assert!(approx(x[1], 7.0 / 11.0, 1e-12));
    }

    #[test]
    fn detects_singular_matrix() {
        // Duplicated direction: rank 1.
        let mut a = SymMatrix::<f64>::zeros(2);
        a.set(0, 0, 2.0);
        a.set(0, 1, 2.0);
        a.set(1, 0, 2.0);
        a.set(1, 1, 2.0);
        let err = PivotedCholesky::factor(&a)
            .err()
            .expect("singular factorization must fail");
        assert!(matches!(err, Error::RankDeficient { .. }));
    }

    #[test]
    fn inverse_diagonal_matches_direct_inverse() {
        let mut a = SymMatrix::zeros(2);
        a.set(0, 0, 4.0);
        a.set(0, 1, 1.0);
        a.set(1, 0, 1.0);
        a.set(1, 1, 3.0);
        // A^{-1} = 1/11 * [[3,-1],[-1,4]]
        let chol = PivotedCholesky::factor(&a).unwrap();
        let d = chol.inverse_diagonal();
        assert!(approx(d[0], 3.0 / 11.0, 1e-12));
        assert!(approx(d[1], 4.0 / 11.0, 1e-12));
    }

    #[test]
    fn pivoting_inside_the_factorization_stays_exact() {
        // Random-ish SPD systems whose diagonal ordering forces interior
        // pivot swaps; compare against a naive Gaussian elimination.
        let cases: Vec<(usize, Vec<f64>)> = vec![
            (3, vec![2.0, 1.0, 0.5, 1.0, 1.5, 1.0, 0.5, 1.0, 10.0]),
            (
                4,
                vec![
                    3.0, 0.2, 1.0, 0.5, //
                    0.2, 1.0, 0.3, 0.9, //
                    1.0, 0.3, 8.0, 0.1, //
                    0.5, 0.9, 0.1, 5.0,
                ],
            ),
        ];
        for (n, a_vec) in cases {
            let b: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
            let a = SymMatrix {
                n,
                a: a_vec.clone(),
            };
            let chol = PivotedCholesky::factor(&a).unwrap();
            let x = chol.solve(&b);

            // Reference: Gaussian elimination with partial pivoting.
            let mut aug: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let mut row: Vec<f64> = a_vec[i * n..(i + 1) * n].to_vec();
                    row.push(b[i]);
                    row
                })
                .collect();
            for col in 0..n {
                let pivot_row = (col..n)
                    .max_by(|&p, &q| aug[p][col].abs().partial_cmp(&aug[q][col].abs()).unwrap())
                    .unwrap();
                aug.swap(col, pivot_row);
                for row in 0..n {
                    if row != col {
                        let f = aug[row][col] / aug[col][col];
                        for c in col..=n {
                            aug[row][c] -= f * aug[col][c];
                        }
                    }
                }
            }
            for i in 0..n {
                let reference = aug[i][n] / aug[i][i];
                assert!(
                    (x[i] - reference).abs() < 1e-10,
                    "component {i}: {} vs {}",
                    x[i],
                    reference
                );
            }
        }
    }

    #[test]
    fn weighted_normal_equations_recover_exact_solution() {
        // y = 2 + 3 x with unit weights is solved exactly.
        let x: Vec<f64> = vec![-1.0, 0.0, 1.0, 2.0];
        let ones = vec![1.0; 4];
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        let w = vec![1.0; 4];
        let beta = solve_weighted_normal_equations(&[ones, x], &w, &y).unwrap();
        assert!(approx(beta[0], 2.0, 1e-12));
        assert!(approx(beta[1], 3.0, 1e-12));
    }
}
