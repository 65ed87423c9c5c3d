use num::{One, Zero};

use super::GaussianRational;

/// Reduces `rows` (each of equal length) to reduced row echelon form in place
/// and returns the pivot columns.
fn rref(rows: &mut [Vec<GaussianRational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("pivot is nonzero");
        if !inv.is_one() {
            for x in rows[r].iter_mut() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                if !p.is_zero() {
                    *x -= &(&f * p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(matrix: &[Vec<GaussianRational>]) -> usize {
    let ncols = matrix.first().map_or(0, Vec::len);
    let mut m = matrix.to_vec();
    rref(&mut m, ncols).len()
}

/// One solution of `A x = b` (free variables set to zero), or `None` when the
/// system is inconsistent.
pub fn solve(a: &[Vec<GaussianRational>], b: &[GaussianRational], ncols: usize) -> Option<Vec<GaussianRational>> {
    assert_eq!(a.len(), b.len());
    let mut aug: Vec<Vec<GaussianRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            debug_assert_eq!(row.len(), ncols);
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![GaussianRational::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][ncols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        n.into()
    }

    #[test]
    fn solves_consistent_system() {
        let a = vec![vec![g(1), g(2)], vec![g(2), g(4)], vec![g(0), g(1)]];
        let b = vec![g(5), g(10), g(2)];
        let x = solve(&a, &b, 2).unwrap();
        assert_eq!(x, vec![g(1), g(2)]);
        assert_eq!(rank(&a), 2);
    }

    #[test]
    fn detects_inconsistency() {
        let a = vec![vec![g(1), g(1)], vec![g(1), g(1)]];
        assert!(solve(&a, &[g(1), g(2)], 2).is_none());
    }
}
