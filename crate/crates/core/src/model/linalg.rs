//! Small dense elimination routines over exact rationals and `f64`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Rank by exact Gaussian elimination.
pub fn rank_exact(rows: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        for r in rank + 1..a.len() {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &pivot;
            for c in col..cols {
                let delta = &f * &a[rank][c];
                a[r][c] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

/// Determinant of a square rational matrix.
pub fn det_exact(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &pivot;
            for c in col..n {
                let delta = &f * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}

/// Rank by partially pivoted elimination; entries below `rel_tol` times the
/// largest magnitude count as zero.
pub fn rank_f64(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let tol = rel_tol * scale;
    let mut rank = 0;
    for col in 0..cols {
        if rank == a.len() {
            break;
        }
        let (p, best) = (rank..a.len())
            .map(|r| (r, a[r][col].abs()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol {
            continue;
        }
        a.swap(rank, p);
        for r in rank + 1..a.len() {
            let f = a[r][col] / a[rank][col];
            if f == 0.0 {
                continue;
            }
            for c in col..cols {
                a[r][c] -= f * a[rank][c];
            }
        }
        rank += 1;
    }
    rank
}

pub fn det_f64(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap_or(col);
        if a[p][col] == 0.0 {
            return 0.0;
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

/// Indices of rows picked as pivots by exact elimination, in pivot order.
pub fn pivot_rows_exact(rows: &[Vec<BigRational>]) -> Vec<usize> {
    let mut a: Vec<(usize, Vec<BigRational>)> = rows.iter().cloned().enumerate().collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut picked = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        // Largest magnitude pivot, ties broken by original index.
        let best = (rank..a.len())
            .filter(|&r| !a[r].1[col].is_zero())
            .max_by(|&x, &y| a[x].1[col].abs().cmp(&a[y].1[col].abs()).then(a[y].0.cmp(&a[x].0)));
        let Some(p) = best else { continue };
        a.swap(rank, p);
        picked.push(a[rank].0);
        let pivot = a[rank].1[col].clone();
        for r in rank + 1..a.len() {
            if a[r].1[col].is_zero() {
                continue;
            }
            let f = &a[r].1[col] / &pivot;
            for c in col..cols {
                let delta = &f * &a[rank].1[c];
                a[r].1[c] -= delta;
            }
        }
        rank += 1;
    }
    picked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;

    fn q(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&v| rational(v, 1)).collect()).collect()
    }

    #[test]
    fn exact_rank_and_det() {
        let m = q(&[&[1, 2], &[2, 4], &[0, 1]]);
        assert_eq!(rank_exact(&m), 2);
        assert_eq!(det_exact(&q(&[&[0, 1], &[1, 0]])), rational(-1, 1));
        assert_eq!(det_exact(&q(&[&[2, 1], &[4, 2]])), rational(0, 1));
        assert_eq!(pivot_rows_exact(&m), vec![1, 2]);
    }

    #[test]
    fn float_rank_and_det() {
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-13]];
        assert_eq!(rank_f64(&m, 1e-10), 1);
        assert_eq!(rank_f64(&[vec![0.0, 0.0]], 1e-10), 0);
        assert!((det_f64(&[vec![0.0, 1.0], vec![1.0, 0.0]]) + 1.0).abs() < 1e-15);
    }
}
