use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{rat_int, QMatrix};

pub type IntMatrix = Vec<Vec<BigInt>>;

fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn sub_row_multiple(m: &mut IntMatrix, target: usize, source: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let src = m[source].clone();
    for (t, s) in m[target].iter_mut().zip(&src) {
        *t -= q * s;
    }
}

/// Row-style Hermite normal form of an integer matrix: returns `(H, U)` with
/// `H = U * a`, `U` unimodular, pivots positive and entries above each pivot
/// reduced into `[0, pivot)`. Zero rows of `H` sit at the bottom.
pub fn hnf_int(a: &[Vec<BigInt>]) -> (IntMatrix, IntMatrix) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut h: IntMatrix = a.to_vec();
    let mut u = identity(rows);
    let mut pivot_row = 0;
    for c in 0..cols {
        if pivot_row == rows {
            break;
        }
        loop {
            let best = (pivot_row..rows)
                .filter(|&r| !h[r][c].is_zero())
                .min_by(|&x, &y| h[x][c].abs().cmp(&h[y][c].abs()));
            let Some(best) = best else { break };
            h.swap(pivot_row, best);
            u.swap(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..rows {
                if h[r][c].is_zero() {
                    continue;
                }
                let q = h[r][c].div_floor(&h[pivot_row][c]);
                sub_row_multiple(&mut h, r, pivot_row, &q);
                sub_row_multiple(&mut u, r, pivot_row, &q);
                if !h[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[pivot_row][c].is_zero() {
            continue;
        }
        if h[pivot_row][c].is_negative() {
            for x in h[pivot_row].iter_mut().chain(u[pivot_row].iter_mut()) {
                *x = -&*x;
            }
        }
        for r in 0..pivot_row {
            let q = h[r][c].div_floor(&h[pivot_row][c]);
            sub_row_multiple(&mut h, r, pivot_row, &q);
            sub_row_multiple(&mut u, r, pivot_row, &q);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// `hnf_int` on a rational matrix with integer entries.
pub fn hermite_normal_form(mat: &QMatrix) -> (QMatrix, QMatrix) {
    assert!(
        mat.is_integral(),
        "hermite_normal_form needs integer entries"
    );
    let a: IntMatrix = (0..mat.rows()).map(|i| mat.row(i).to_integers()).collect();
    let (h, u) = hnf_int(&a);
    let to_q = |m: IntMatrix| {
        QMatrix::from_rows(m.iter().map(|r| r.iter().map(rat_int).collect()).collect())
    };
    (to_q(h), to_q(u))
}

/// A Z-basis of `{x in Z^n : b x = 0}` for an integer matrix `b` with `n` columns.
pub fn integer_kernel(b: &[Vec<BigInt>], n: usize) -> IntMatrix {
    let bt: IntMatrix = (0..n)
        .map(|j| b.iter().map(|row| row[j].clone()).collect())
        .collect();
    let (h, u) = hnf_int(&bt);
    h.iter()
        .zip(u)
        .filter(|(hr, _)| hr.iter().all(Zero::is_zero))
        .map(|(_, ur)| ur)
        .collect()
}
