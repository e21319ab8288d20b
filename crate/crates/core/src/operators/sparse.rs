use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{LoopError, Result};
use crate::lattice::PackedConfig;

/// The set of classical configurations an operator acts on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// All `3^num_edges` configurations; the index is the packed value.
    Full { num_edges: usize },
    /// An ascending list of packed configurations.
    Explicit { name: String, num_edges: usize, configs: Vec<PackedConfig> },
}

impl Basis {
    pub fn full(num_edges: usize) -> Arc<Basis> {
        Arc::new(Basis::Full { num_edges })
    }

    /// Builds an explicit basis; `configs` is sorted and deduplicated.
    pub fn explicit(name: impl Into<String>, num_edges: usize, mut configs: Vec<PackedConfig>) -> Arc<Basis> {
        configs.sort_unstable();
        configs.dedup();
        Arc::new(Basis::Explicit { name: name.into(), num_edges, configs })
    }

    pub fn dim(&self) -> usize {
        match self {
            Basis::Full { num_edges } => 3usize.pow(*num_edges as u32),
            Basis::Explicit { configs, .. } => configs.len(),
        }
    }

    pub fn num_edges(&self) -> usize {
        match self {
            Basis::Full { num_edges } | Basis::Explicit { num_edges, .. } => *num_edges,
        }
    }

    pub fn config(&self, index: usize) -> PackedConfig {
        match self {
            Basis::Full { .. } => index as PackedConfig,
            Basis::Explicit { configs, .. } => configs[index],
        }
    }

    pub fn index_of(&self, packed: PackedConfig) -> Option<usize> {
        match self {
            Basis::Full { .. } => {
                let i = packed as usize;
                (i < self.dim()).then_some(i)
            }
            Basis::Explicit { configs, .. } => configs.binary_search(&packed).ok(),
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            Basis::Full { num_edges } => format!("full(3^{num_edges})"),
            Basis::Explicit { name, configs, .. } => format!("{name}[{}]", configs.len()),
        }
    }
}

/// Exact integer sparse operator in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    basis: Arc<Basis>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<i64>,
}

impl SparseOperator {
    pub fn zero(basis: Arc<Basis>) -> Self {
        let n = basis.dim();
        Self { basis, row_ptr: vec![0; n + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(basis: Arc<Basis>) -> Self {
        let n = basis.dim();
        Self { basis, row_ptr: (0..=n).collect(), cols: (0..n as u32).collect(), vals: vec![1; n] }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed and zeros dropped.
    pub fn from_triplets(basis: Arc<Basis>, triplets: &[(usize, usize, i64)]) -> Self {
        let n = basis.dim();
        let mut counts = vec![0usize; n + 1];
        for &(r, _, _) in triplets {
            counts[r + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut entries = vec![(0u32, 0i64); triplets.len()];
        for &(r, c, v) in triplets {
            entries[fill[r]] = (c as u32, v);
            fill[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for r in 0..n {
            let row = &mut entries[counts[r]..counts[r + 1]];
            row.sort_unstable_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut v = 0i64;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                if v != 0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { basis, row_ptr, cols, vals }
    }

    pub fn from_diagonal(basis: Arc<Basis>, diag: &[i64]) -> Self {
        let t: Vec<_> = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(basis, &t)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().zip(&self.vals[span]).map(|(&c, &v)| (c as usize, v))
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&(c as u32)) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0,
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, i64)> {
        (0..self.dim()).flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v))).collect()
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.dim()).map(|r| self.get(r, r)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim()).all(|r| self.row(r).all(|(c, _)| c == r))
    }

    fn same_basis(&self, other: &SparseOperator) -> Result<()> {
        if self.basis != other.basis {
            return Err(LoopError::BasisMismatch(format!(
                "{} vs {}",
                self.basis.descriptor(),
                other.basis.descriptor()
            )));
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: i64, other: &SparseOperator, b: i64) -> Result<SparseOperator> {
        self.same_basis(other)?;
        let mut t: Vec<_> = self.triplets().into_iter().map(|(r, c, v)| (r, c, a * v)).collect();
        t.extend(other.triplets().into_iter().map(|(r, c, v)| (r, c, b * v)));
        Ok(SparseOperator::from_triplets(self.basis.clone(), &t))
    }

    pub fn add(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.combine(1, other, 1)
    }

    pub fn sub(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.combine(1, other, -1)
    }

    pub fn scale(&self, k: i64) -> SparseOperator {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= k);
        if k == 0 {
            return SparseOperator::zero(self.basis.clone());
        }
        out
    }

    /// Sum of many operators on one basis.
    pub fn sum<'a>(basis: Arc<Basis>, ops: impl IntoIterator<Item = &'a SparseOperator>) -> Result<SparseOperator> {
        let mut t = Vec::new();
        for op in ops {
            if *op.basis != *basis {
                return Err(LoopError::BasisMismatch(op.basis.descriptor()));
            }
            t.extend(op.triplets());
        }
        Ok(SparseOperator::from_triplets(basis, &t))
    }

    /// Exact product `self · other`.
    pub fn mul(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.same_basis(other)?;
        let n = self.dim();
        let mut acc = vec![0i64; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut t = Vec::new();
        for r in 0..n {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if acc[c] == 0 {
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            for &c in &touched {
                if acc[c] != 0 {
                    t.push((r, c, acc[c]));
                }
                acc[c] = 0;
            }
            touched.clear();
        }
        Ok(SparseOperator::from_triplets(self.basis.clone(), &t))
    }

    pub fn transpose(&self) -> SparseOperator {
        let t: Vec<_> = self.triplets().into_iter().map(|(r, c, v)| (c, r, v)).collect();
        SparseOperator::from_triplets(self.basis.clone(), &t)
    }

    pub fn is_symmetric(&self) -> bool {
        self.triplets().iter().all(|&(r, c, v)| self.get(c, r) == v)
    }

    /// Largest absolute entry; zero for the zero operator.
    pub fn max_abs(&self) -> i64 {
        self.vals.iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    /// `self·other − other·self`, exact.
    pub fn commutator(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `self·other + other·self`, exact.
    pub fn anticommutator(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let row = |r: usize| -> f64 { self.row(r).map(|(c, v)| v as f64 * x[c]).sum() };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            if self.dim() > 1 << 14 {
                return (0..self.dim()).into_par_iter().map(row).collect();
            }
        }
        (0..self.dim()).map(row).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v as f64;
        }
        m
    }

    /// Compression `P·self·P` onto a sub-basis whose configurations all lie in this basis.
    pub fn restrict(&self, sub: Arc<Basis>) -> Result<SparseOperator> {
        let map: Vec<usize> = (0..sub.dim())
            .map(|i| {
                self.basis
                    .index_of(sub.config(i))
                    .ok_or_else(|| LoopError::BasisMismatch(format!("configuration {} outside parent basis", sub.config(i))))
            })
            .collect::<Result<_>>()?;
        let mut t = Vec::new();
        for (i, &ri) in map.iter().enumerate() {
            for (c, v) in self.row(ri) {
                if let Some(j) = sub.index_of(self.basis.config(c)) {
                    t.push((i, j, v));
                }
            }
        }
        Ok(SparseOperator::from_triplets(sub, &t))
    }

    /// Coordinate text export: a header, then one `row col value` line per entry.
    pub fn export_coo(&self, model: &str, geometry_hash: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# basis {}", self.basis.descriptor());
        let _ = writeln!(out, "# model {model}");
        let _ = writeln!(out, "# geometry {geometry_hash}");
        let _ = writeln!(out, "# dim {} nnz {}", self.dim(), self.nnz());
        for (r, c, v) in self.triplets() {
            let _ = writeln!(out, "{r} {c} {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis3() -> Arc<Basis> {
        Basis::explicit("t", 1, vec![0, 1, 2])
    }

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let op = SparseOperator::from_triplets(basis3(), &[(0, 1, 2), (0, 1, -2), (2, 0, 5), (2, 0, 1)]);
        assert_eq!(op.nnz(), 1);
        assert_eq!(op.get(2, 0), 6);
        assert_eq!(op.get(0, 1), 0);
    }

    #[test]
    fn product_and_commutator() {
        let b = basis3();
        let x = SparseOperator::from_triplets(b.clone(), &[(0, 1, 1), (1, 0, 1)]);
        let z = SparseOperator::from_diagonal(b.clone(), &[1, -1, 0]);
        let xz = x.mul(&z).unwrap();
        assert_eq!(xz.get(1, 0), 1);
        assert_eq!(xz.get(0, 1), -1);
        assert_eq!(x.anticommutator(&z).unwrap().max_abs(), 0);
        assert_eq!(x.commutator(&z).unwrap().max_abs(), 2);
        let xx = x.mul(&x).unwrap();
        assert_eq!(xx.diagonal(), vec![1, 1, 0]);
    }

    #[test]
    fn restriction() {
        let b = basis3();
        let op = SparseOperator::from_triplets(b, &[(0, 2, 3), (2, 0, 3), (1, 1, 4)]);
        let sub = Basis::explicit("s", 1, vec![0, 2]);
        let r = op.restrict(sub).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(r.get(0, 1), 3);
        assert!(r.is_symmetric());
        let bad = Basis::explicit("s", 1, vec![7]);
        assert!(op.restrict(bad).is_err());
    }

    #[test]
    fn mismatched_bases_rejected() {
        let a = SparseOperator::identity(basis3());
        let b = SparseOperator::identity(Basis::full(1));
        assert!(matches!(a.add(&b), Err(LoopError::BasisMismatch(_))));
        assert!(a.commutator(&b).is_err());
    }
}
