//! Exact Gaussian elimination over arbitrary-precision rationals.

use num_traits::Zero;

use super::Rat;

/// Solves the square system `mat * x = rhs` exactly; `None` if singular.
pub fn solve_square(mut mat: Vec<Vec<Rat>>, mut rhs: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = mat.len();
    debug_assert!(mat.iter().all(|r| r.len() == n));
    for col in 0..n {
        let pivot = (col..n).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = mat[col][col].clone();
        for r in 0..n {
            if r == col || mat[r][col].is_zero() {
                continue;
            }
            let factor = &mat[r][col] / &inv;
            for c in col..n {
                let delta = &factor * &mat[col][c];
                mat[r][c] = &mat[r][c] - &delta;
            }
            let delta = &factor * &rhs[col];
            rhs[r] = &rhs[r] - &delta;
        }
    }
    Some(
        (0..n)
            .map(|i| &rhs[i] / &mat[i][i])
            .collect(),
    )
}

/// Rank of a rational matrix given as rows.
pub fn rank(mut rows: Vec<Vec<Rat>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < rows.len() && col < cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            col += 1;
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &inv;
            for c in col..cols {
                let delta = &factor * &rows[rank][c];
                rows[r][c] = &rows[r][c] - &delta;
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// Exact inverse of a square matrix; `None` if singular.
pub fn invert(mat: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = mat.len();
    let mut work: Vec<Vec<Rat>> = mat.to_vec();
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::from_integer(1.into()) } else { Rat::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !work[r][col].is_zero())?;
        work.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = work[col][col].clone();
        for c in 0..n {
            work[col][c] = &work[col][c] / &scale;
            inv[col][c] = &inv[col][c] / &scale;
        }
        for r in 0..n {
            if r == col || work[r][col].is_zero() {
                continue;
            }
            let factor = work[r][col].clone();
            for c in 0..n {
                let dw = &factor * &work[col][c];
                work[r][c] = &work[r][c] - &dw;
                let di = &factor * &inv[col][c];
                inv[r][c] = &inv[r][c] - &di;
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn solves_a_small_system() {
        let mat = vec![vec![r(2), r(1)], vec![r(1), r(3)]];
        let rhs = vec![r(5), r(10)];
        let x = solve_square(mat, rhs).unwrap();
        assert_eq!(x, vec![r(1), r(3)]);
    }

    #[test]
    fn detects_singularity_and_ranks() {
        let mat = vec![vec![r(1), r(2)], vec![r(2), r(4)]];
        assert!(solve_square(mat.clone(), vec![r(1), r(2)]).is_none());
        assert_eq!(rank(mat), 1);
        assert_eq!(rank(vec![vec![r(1), r(0)], vec![r(0), r(1)]]), 2);
        assert_eq!(rank(Vec::new()), 0);
    }

    #[test]
    fn inverts_exactly() {
        let mat = vec![vec![r(2), r(1)], vec![r(1), r(1)]];
        let inv = invert(&mat).unwrap();
        // Multiply back and expect the identity.
        for i in 0..2 {
            for j in 0..2 {
                let mut sum = Rat::zero();
                for k in 0..2 {
                    sum = &sum + &(&mat[i][k] * &inv[k][j]);
                }
                if i == j {
                    assert!(sum.is_one());
                } else {
                    assert!(sum.is_zero());
                }
            }
        }
    }
}
