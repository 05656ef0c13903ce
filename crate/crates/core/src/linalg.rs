//! Exact rational elimination: fraction-free (Bareiss) forward elimination
//! for solving linear systems and rational Gauss-Jordan for kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::costs::Rational;

/// Any solution of `A x = b`, or `None` when the system is infeasible. Free
/// variables are set to zero. Rows are cleared to integers, eliminated
/// fraction-free, then back-substituted over the rationals.
pub(crate) fn solve_any(
    n_cols: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
) -> Option<Vec<Rational>> {
    assert_eq!(rows.len(), rhs.len());
    let n_rows = rows.len();
    let mut mat: Vec<Vec<BigInt>> = rows
        .into_iter()
        .zip(&rhs)
        .map(|(row, b)| {
            let mut scale = b.denom().clone();
            for x in &row {
                scale = scale.lcm(x.denom());
            }
            let mut cleared: Vec<BigInt> = row
                .iter()
                .map(|x| x.numer() * (&scale / x.denom()))
                .collect();
            cleared.push(b.numer() * (&scale / b.denom()));
            cleared
        })
        .collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(pivot_row) = (rank..n_rows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(rank, pivot_row);
        for r in rank + 1..n_rows {
            for c in col + 1..=n_cols {
                let num = &mat[r][c] * &mat[rank][col] - &mat[r][col] * &mat[rank][c];
                let (val, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "fraction-free step divides exactly");
                mat[r][c] = val;
            }
            mat[r][col] = BigInt::zero();
        }
        prev = mat[rank][col].clone();
        pivots.push((rank, col));
        rank += 1;
        if rank == n_rows {
            break;
        }
    }

    // Rows reduced to zero coefficients must have zero right-hand side.
    for row in mat.iter().skip(rank) {
        if row[..n_cols].iter().all(Zero::is_zero) && !row[n_cols].is_zero() {
            return None;
        }
    }

    let mut solution = vec![Rational::zero(); n_cols];
    for &(r, c) in pivots.iter().rev() {
        let mut acc = Rational::from_integer(mat[r][n_cols].clone());
        for j in c + 1..n_cols {
            if !mat[r][j].is_zero() {
                acc -= Rational::from_integer(mat[r][j].clone()) * &solution[j];
            }
        }
        solution[c] = acc / Rational::from_integer(mat[r][c].clone());
    }
    Some(solution)
}

/// In-place reduced row echelon form; returns the pivot columns in order.
pub(crate) fn rref(mat: &mut [Vec<Rational>], n_cols: usize) -> Vec<usize> {
    let n_rows = mat.len();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(pivot_row) = (rank..n_rows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(rank, pivot_row);
        let inv = mat[rank][col].clone();
        for x in &mut mat[rank] {
            *x /= &inv;
        }
        for r in 0..n_rows {
            if r != rank && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in 0..n_cols {
                    let delta = &factor * &mat[rank][c];
                    mat[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == n_rows {
            break;
        }
    }
    pivots
}

/// Basis of `{ x : M x = 0 }` from the reduced echelon form: one vector per
/// free column, deterministic for a fixed column order.
pub(crate) fn kernel(mut mat: Vec<Vec<Rational>>, n_cols: usize) -> Vec<Vec<Rational>> {
    let pivots = rref(&mut mat, n_cols);
    let mut is_pivot = vec![false; n_cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..n_cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); n_cols];
        v[free] = Rational::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -mat[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::rat;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn solves_square_system() {
        // x + y = 3, x - y = 1 => x = 2, y = 1.
        let rows = vec![vec![rat(1), rat(1)], vec![rat(1), rat(-1)]];
        let sol = solve_any(2, rows, vec![rat(3), rat(1)]).unwrap();
        assert_eq!(sol, vec![rat(2), rat(1)]);
    }

    #[test]
    fn solves_underdetermined_with_free_vars_at_zero() {
        let rows = vec![vec![rat(1), rat(1), rat(0)]];
        let sol = solve_any(3, rows, vec![rat(5)]).unwrap();
        assert_eq!(sol, vec![rat(5), rat(0), rat(0)]);
    }

    #[test]
    fn detects_infeasible_system() {
        let rows = vec![vec![rat(1), rat(1)], vec![rat(2), rat(2)]];
        assert!(solve_any(2, rows, vec![rat(1), rat(3)]).is_none());
    }

    #[test]
    fn handles_rational_coefficients() {
        let rows = vec![vec![r(1, 2), r(1, 3)]];
        let sol = solve_any(2, rows, vec![r(5, 6)]).unwrap();
        assert_eq!(sol[0], r(5, 3));
    }

    #[test]
    fn kernel_of_zero_matrix_is_identity() {
        let basis = kernel(vec![], 3);
        assert_eq!(basis.len(), 3);
        for (i, v) in basis.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(*x, if i == j { rat(1) } else { rat(0) });
            }
        }
    }

    #[test]
    fn kernel_of_single_exchange_row() {
        let basis = kernel(vec![vec![rat(1), rat(1), rat(-1), rat(-1)]], 4);
        assert_eq!(basis.len(), 3);
        for v in &basis {
            let dot = &v[0] + &v[1] - &v[2] - &v[3];
            assert_eq!(dot, rat(0));
        }
    }

    #[test]
    fn kernel_vectors_annihilate_random_matrix() {
        let rows = vec![
            vec![rat(2), rat(0), rat(1), rat(-1), rat(3)],
            vec![rat(0), rat(1), rat(1), rat(1), rat(0)],
            vec![rat(2), rat(1), rat(2), rat(0), rat(3)],
        ];
        let basis = kernel(rows.clone(), 5);
        // Third row is the sum of the first two: rank 2, nullity 3.
        assert_eq!(basis.len(), 3);
        for v in &basis {
            for row in &rows {
                let mut dot = Rational::zero();
                for (a, b) in row.iter().zip(v) {
                    dot += a * b;
                }
                assert_eq!(dot, rat(0));
            }
        }
    }
}
