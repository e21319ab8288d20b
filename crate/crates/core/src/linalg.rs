//! Small numerical helpers shared by the spectral code.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// An eigenvalue together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub value: f64,
    pub multiplicity: usize,
}

/// Default tolerance for merging nearly equal eigenvalues.
pub const LEVEL_TOL: f64 = 1e-8;

/// Groups ascending values into levels, merging neighbours closer than `tol`
/// (relative to `max(1, |value|)`).
pub fn group_levels(sorted: &[f64], tol: f64) -> Vec<Level> {
    let mut levels: Vec<Level> = Vec::new();
    let mut anchor = f64::NAN;
    for &x in sorted {
        match levels.last_mut() {
            Some(last) if (x - anchor).abs() <= tol * anchor.abs().max(1.0) => {
                last.multiplicity += 1;
                last.value += (x - last.value) / last.multiplicity as f64;
            }
            _ => {
                anchor = x;
                levels.push(Level { value: x, multiplicity: 1 });
            }
        }
    }
    levels
}

/// Dense symmetric eigen-decomposition with eigenvalues sorted ascending.
/// Columns of the returned matrix are the matching eigenvectors. The matrix
/// is first split into the connected blocks of its nonzero pattern, each of
/// which is diagonalised on its own.
pub fn sorted_symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let mut pairs: Vec<(f64, Vec<(usize, f64)>)> = Vec::with_capacity(n);
    for block in pattern_blocks(&m) {
        if block.len() == 1 {
            pairs.push((m[(block[0], block[0])], vec![(block[0], 1.0)]));
            continue;
        }
        let sub = DMatrix::from_fn(block.len(), block.len(), |r, c| m[(block[r], block[c])]);
        let eig = SymmetricEigen::new(sub);
        for k in 0..block.len() {
            let col = block.iter().enumerate().map(|(r, &i)| (i, eig.eigenvectors[(r, k)])).collect();
            pairs.push((eig.eigenvalues[k], col));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut vectors = DMatrix::zeros(n, n);
    for (c, (_, col)) in pairs.iter().enumerate() {
        for &(r, x) in col {
            vectors[(r, c)] = x;
        }
    }
    (pairs.into_iter().map(|p| p.0).collect(), vectors)
}

/// Connected components of the graph with an edge wherever `m[(i, j)] != 0`.
fn pattern_blocks(m: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut seen = vec![false; n];
    let mut blocks = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut block = vec![s];
        let mut k = 0;
        while k < block.len() {
            let i = block[k];
            for j in 0..n {
                if !seen[j] && (m[(i, j)] != 0.0 || m[(j, i)] != 0.0) {
                    seen[j] = true;
                    block.push(j);
                }
            }
            k += 1;
        }
        block.sort_unstable();
        blocks.push(block);
    }
    blocks
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping() {
        let lv = group_levels(&[-1.0, -1.0 + 1e-12, 0.0, 2.0, 2.0], LEVEL_TOL);
        assert_eq!(lv.len(), 3);
        assert_eq!(lv[0].multiplicity, 2);
        assert_eq!(lv[2].multiplicity, 2);
    }

    #[test]
    fn eigen_sorted() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let (vals, vecs) = sorted_symmetric_eigen(m);
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vecs[(0, 0)] + vecs[(1, 0)]).abs() < 1e-12);
    }

    #[test]
    fn eigen_block_diagonal() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let (vals, vecs) = sorted_symmetric_eigen(m.clone());
        assert_eq!(vals.len(), 3);
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[2] - 2.0).abs() < 1e-12);
        let back = &vecs * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals)) * vecs.transpose();
        assert!((back - m).norm() < 1e-12);
    }
}
