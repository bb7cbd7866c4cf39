//! Dense tableau simplex for `max cᵀx` subject to `Ax ≤ b`, `x ≥ 0`, `b ≥ 0`.
//!
//! Bland's rule keeps the method finite on degenerate vertices. Instances here
//! have at most a few dozen variables.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub primal: Vec<f64>,
    /// Multipliers of the `≤` rows, read off the slack columns.
    pub dual: Vec<f64>,
}

/// Returns `Err(Degenerate(j))` when variable `j` can grow without bound.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let n = c.len();
    let m = a.len();
    if b.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: b.len() });
    }
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: row.len() });
    }
    if b.iter().any(|&v| !(v >= 0.0)) || a.iter().flatten().chain(c).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("linear program needs finite data and b >= 0".into()));
    }
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        t[i][..n].copy_from_slice(&a[i]);
        t[i][n + i] = 1.0;
        t[i][width - 1] = b[i];
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let limit = 50 * (n + m + 1) * (n + m + 1);
    let mut pivots = 0;
    loop {
        let Some(enter) = (0..n + m).find(|&j| t[m][j] < -EPS) else { break };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][enter] > EPS {
                let r = t[i][width - 1] / t[i][enter];
                let better = match leave {
                    None => true,
                    Some((l, best)) => r < best - EPS || (r <= best + EPS && basis[i] < basis[l]),
                };
                if better {
                    leave = Some((i, r));
                }
            }
        }
        let Some((row, _)) = leave else {
            return Err(Error::Degenerate(enter));
        };
        pivot(&mut t, row, enter);
        basis[row] = enter;
        pivots += 1;
        if pivots > limit {
            return Err(Error::PivotLimit(limit));
        }
    }
    let mut primal = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            primal[bv] = t[i][width - 1].max(0.0);
        }
    }
    let dual = (0..m).map(|i| t[m][n + i].max(0.0)).collect();
    let value = primal.iter().zip(c).map(|(x, c)| x * c).sum();
    Ok(LpSolution { value, primal, dual })
}

fn pivot(t: &mut [Vec<f64>], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_instance() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), value 36
        let s = maximize(&[3.0, 5.0], &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]], &[4.0, 12.0, 18.0]).unwrap();
        assert!((s.value - 36.0).abs() < 1e-12);
        assert!((s.primal[0] - 2.0).abs() < 1e-12 && (s.primal[1] - 6.0).abs() < 1e-12);
        let dual_value: f64 = s.dual.iter().zip([4.0, 12.0, 18.0]).map(|(y, b)| y * b).sum();
        assert!((dual_value - 36.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_is_reported() {
        assert_eq!(maximize(&[1.0, 1.0], &[vec![1.0, 0.0]], &[1.0]), Err(Error::Degenerate(1)));
    }
}
