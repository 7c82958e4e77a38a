//! Dense Gaussian elimination over `Q` and `f64`.

use num_rational::BigRational;
use num_traits::Zero;

/// Rank over `Q`.
pub fn rank_rational(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        for r in rank + 1..rows {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &m[rank][c];
            for k in c..cols {
                let t = &f * &m[rank][k];
                m[r][k] -= t;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// One solution of `A x = b` over `Q` (free variables set to zero), if any.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = m[rank][c].recip();
        let support: Vec<usize> = (c..=cols).filter(|&k| !m[rank][k].is_zero()).collect();
        for &k in &support {
            m[rank][k] = &m[rank][k] * &inv;
        }
        for r in 0..rows {
            if r == rank || m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone();
            for &k in &support {
                let t = &f * &m[rank][k];
                m[r][k] -= t;
            }
        }
        pivots.push(c);
        rank += 1;
    }
    if m[rank..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][cols].clone();
    }
    Some(x)
}

/// Numerical rank; pivots of magnitude at most `tol` count as zero.
pub fn rank_f64(mut m: Vec<Vec<f64>>, tol: f64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let piv = (rank..rows).max_by(|&x, &y| m[x][c].abs().partial_cmp(&m[y][c].abs()).unwrap());
        let Some(piv) = piv else { break };
        if m[piv][c].abs() <= tol {
            continue;
        }
        m.swap(rank, piv);
        for r in rank + 1..rows {
            let f = m[r][c] / m[rank][c];
            for k in c..cols {
                m[r][k] -= f * m[rank][k];
            }
        }
        rank += 1;
    }
    rank
}

/// Solves the square system `A x = b` with partial pivoting; `None` if singular.
pub fn solve_f64(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &bi)| r.iter().copied().chain([bi]).collect()).collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&x, &y| m[x][c].abs().partial_cmp(&m[y][c].abs()).unwrap())?;
        if m[piv][c].abs() < 1e-300 {
            return None;
        }
        m.swap(c, piv);
        for r in 0..n {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..=n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Infinity norm of the inverse of a square matrix.
pub fn inverse_norm_inf(a: &[Vec<f64>]) -> Option<f64> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(solve_f64(a, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].abs()).sum::<f64>()).fold(0.0, f64::max))
}
