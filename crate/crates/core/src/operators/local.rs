use std::sync::Arc;

use super::sparse::{Basis, SparseOperator};
use super::Mat3;
use crate::error::{LoopError, Result};
use crate::lattice::{EdgeState, PackedConfig};

/// An operator acting on a handful of edges, stored column by column over
/// the `3^k` local patterns. Pattern index `Σ s_k 3^k` follows the order of
/// `support`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    support: Vec<usize>,
    columns: Vec<Vec<(u32, i64)>>,
}

fn pattern_digits(mut p: usize, k: usize) -> Vec<usize> {
    let mut d = vec![0; k];
    for slot in d.iter_mut() {
        *slot = p % 3;
        p /= 3;
    }
    d
}

impl LocalOperator {
    fn local_dim(k: usize) -> usize {
        3usize.pow(k as u32)
    }

    /// Tensor product `⊗_k mats[k]` over `support`.
    pub fn product(support: Vec<usize>, mats: &[Mat3]) -> Self {
        assert_eq!(support.len(), mats.len());
        let k = support.len();
        let columns = (0..Self::local_dim(k))
            .map(|input| {
                let digits = pattern_digits(input, k);
                // expand the product column one site at a time
                let mut partial: Vec<(usize, i64)> = vec![(0, 1)];
                let mut weight = 1usize;
                for (site, &s_in) in digits.iter().enumerate() {
                    let mut next = Vec::new();
                    for &(out, v) in &partial {
                        for (s_out, row) in mats[site].iter().enumerate() {
                            let m = row[s_in];
                            if m != 0 {
                                next.push((out + s_out * weight, v * m));
                            }
                        }
                    }
                    partial = next;
                    weight *= 3;
                }
                partial.into_iter().map(|(o, v)| (o as u32, v)).collect()
            })
            .collect();
        Self { support, columns }
    }

    /// Diagonal operator with entries `f(local states)`.
    pub fn diagonal(support: Vec<usize>, f: impl Fn(&[EdgeState]) -> i64) -> Self {
        let k = support.len();
        let columns = (0..Self::local_dim(k))
            .map(|input| {
                let states: Vec<EdgeState> = pattern_digits(input, k)
                    .into_iter()
                    .map(|d| EdgeState::from_index(d as u8).expect("digit < 3"))
                    .collect();
                let v = f(&states);
                if v == 0 {
                    Vec::new()
                } else {
                    vec![(input as u32, v)]
                }
            })
            .collect();
        Self { support, columns }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// `a·self + b·other` on an identical support.
    pub fn combine(&self, a: i64, other: &LocalOperator, b: i64) -> Result<LocalOperator> {
        if self.support != other.support {
            return Err(LoopError::BasisMismatch("local operators on different supports".into()));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(x, y)| {
                let mut merged: Vec<(u32, i64)> = x.iter().map(|&(o, v)| (o, a * v)).collect();
                merged.extend(y.iter().map(|&(o, v)| (o, b * v)));
                merged.sort_unstable_by_key(|e| e.0);
                let mut out: Vec<(u32, i64)> = Vec::new();
                for (o, v) in merged {
                    match out.last_mut() {
                        Some(last) if last.0 == o => last.1 += v,
                        _ => out.push((o, v)),
                    }
                }
                out.retain(|e| e.1 != 0);
                out
            })
            .collect();
        Ok(LocalOperator { support: self.support.clone(), columns })
    }

    /// Sum with coefficients; all terms must share a support.
    pub fn linear(terms: &[(i64, &LocalOperator)]) -> Result<LocalOperator> {
        let (first, rest) = terms.split_first().ok_or(LoopError::Empty)?;
        let mut acc = LocalOperator { support: first.1.support.clone(), columns: vec![Vec::new(); first.1.columns.len()] }
            .combine(0, first.1, first.0)?;
        for (c, op) in rest {
            acc = acc.combine(1, op, *c)?;
        }
        Ok(acc)
    }

    /// Images of a full configuration: `(packed output, amplitude)`.
    pub fn apply<'a>(&'a self, packed: PackedConfig, pow3: &'a [u64]) -> impl Iterator<Item = (PackedConfig, i64)> + 'a {
        let mut input = 0usize;
        let mut base = packed;
        let mut w = 1usize;
        for &e in &self.support {
            let d = ((packed / pow3[e]) % 3) as usize;
            input += d * w;
            base -= d as u64 * pow3[e];
            w *= 3;
        }
        let support = &self.support;
        self.columns[input].iter().map(move |&(out, v)| {
            let mut p = base;
            let mut o = out as usize;
            for &e in support {
                p += (o % 3) as u64 * pow3[e];
                o /= 3;
            }
            (p, v)
        })
    }

    /// The operator on its own `3^k`-dimensional space.
    pub fn to_sparse(&self) -> SparseOperator {
        let basis = Basis::full(self.support.len());
        let mut t = Vec::new();
        for (input, col) in self.columns.iter().enumerate() {
            for &(out, v) in col {
                t.push((out as usize, input, v));
            }
        }
        SparseOperator::from_triplets(basis, &t)
    }

    /// Projection `P·O·P` onto `basis`; images outside the basis are dropped.
    pub fn embed(&self, basis: Arc<Basis>) -> Result<SparseOperator> {
        embed_sum(std::slice::from_ref(self), basis, false)
    }
}

pub(crate) fn powers_of_three(n: usize) -> Vec<u64> {
    let mut p = Vec::with_capacity(n + 1);
    let mut acc = 1u64;
    for _ in 0..=n {
        p.push(acc);
        acc = acc.saturating_mul(3);
    }
    p
}

/// Sums local operators over `basis`. With `strict`, an image leaving the
/// basis is an error instead of being projected away.
pub fn embed_sum(terms: &[LocalOperator], basis: Arc<Basis>, strict: bool) -> Result<SparseOperator> {
    let n_edges = basis.num_edges();
    if let Some(bad) = terms.iter().flat_map(|t| t.support.iter()).find(|&&e| e >= n_edges) {
        return Err(LoopError::GeometryMismatch(format!("edge {bad} outside a basis of {n_edges} edges")));
    }
    let pow3 = powers_of_three(n_edges);
    let column = |j: usize| -> Result<Vec<(usize, usize, i64)>> {
        let p = basis.config(j);
        let mut out = Vec::new();
        for t in terms {
            for (q, v) in t.apply(p, &pow3) {
                match basis.index_of(q) {
                    Some(i) => out.push((i, j, v)),
                    None if strict => {
                        return Err(LoopError::BasisMismatch(format!(
                            "term maps configuration {p} to {q}, outside {}",
                            basis.descriptor()
                        )))
                    }
                    None => {}
                }
            }
        }
        Ok(out)
    };
    let dim = basis.dim();
    #[cfg(feature = "parallel")]
    let chunks: Vec<Vec<(usize, usize, i64)>> = {
        use rayon::prelude::*;
        const CHUNK: usize = 4096;
        (0..dim.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut acc = Vec::new();
                for j in c * CHUNK..((c + 1) * CHUNK).min(dim) {
                    acc.extend(column(j)?);
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let chunks: Vec<Vec<(usize, usize, i64)>> = vec![(0..dim).map(column).collect::<Result<Vec<_>>>()?.concat()];
    let triplets = chunks.concat();
    Ok(SparseOperator::from_triplets(basis, &triplets))
}
