//! Schmidt spectra of uniform superpositions, entanglement entropies and
//! area-law fits.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{LoopError, Result};
use crate::lattice::{collect_closed_loop_configs, EdgeState, LatticeGeometry, LatticeKind, PackedConfig};
use crate::linalg::sorted_symmetric_eigen;
use crate::operators::powers_of_three;
use crate::spectra::StateVector;

/// A split of the edges into region `A` and its complement. Edges crossing
/// the boundary belong to `A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub description: String,
    pub num_edges: usize,
    in_a: Vec<bool>,
    /// Boundary edges, ascending; boundary strings list their states in this order.
    pub cut_edges: Vec<usize>,
}

impl Bipartition {
    /// Region `A` is the set of vertices for which `vertex_in_a` holds.
    pub fn from_vertices(geom: &LatticeGeometry, description: impl Into<String>, vertex_in_a: &[bool]) -> Result<Self> {
        if vertex_in_a.len() != geom.num_vertices() {
            return Err(LoopError::GeometryMismatch("vertex mask length".into()));
        }
        let mut in_a = Vec::with_capacity(geom.num_edges());
        let mut cut_edges = Vec::new();
        for (e, edge) in geom.edges().iter().enumerate() {
            let [u, v] = edge.endpoints;
            in_a.push(vertex_in_a[u] || vertex_in_a[v]);
            if vertex_in_a[u] != vertex_in_a[v] {
                cut_edges.push(e);
            }
        }
        if in_a.iter().all(|&x| x) || in_a.iter().all(|&x| !x) {
            return Err(LoopError::InvalidArgument("bipartition has an empty side".into()));
        }
        Ok(Self { description: description.into(), num_edges: geom.num_edges(), in_a, cut_edges })
    }

    pub fn in_a(&self, e: usize) -> bool {
        self.in_a[e]
    }

    pub fn cut_len(&self) -> usize {
        self.cut_edges.len()
    }

    fn split(&self, packed: PackedConfig, pow3: &[u64]) -> (PackedConfig, PackedConfig) {
        let mut a = 0;
        for (e, &inside) in self.in_a.iter().enumerate() {
            if inside {
                a += ((packed / pow3[e]) % 3) * pow3[e];
            }
        }
        (a, packed - a)
    }

    fn sigma(&self, packed: PackedConfig, pow3: &[u64]) -> String {
        self.cut_edges
            .iter()
            .map(|&e| EdgeState::from_index(((packed / pow3[e]) % 3) as u8).expect("digit").symbol())
            .collect()
    }
}

/// Region `A` = the first `width` vertex columns (square) or unit-cell
/// columns (honeycomb). On a torus the cut has two boundary components.
pub fn column_bipartition(geom: &LatticeGeometry, width: usize) -> Result<Bipartition> {
    let (lx, _) = geom.dims();
    if width == 0 || width >= lx {
        return Err(LoopError::InvalidArgument(format!("column width {width} must lie in 1..{lx}")));
    }
    let mask: Vec<bool> = (0..geom.num_vertices())
        .map(|v| match geom.kind() {
            LatticeKind::SquareTorus => v % lx < width,
            LatticeKind::HexTorus => (v / 2) % lx < width,
        })
        .collect();
    Bipartition::from_vertices(geom, format!("columns[0..{width})"), &mask)
}

/// One connected block of the bipartite (A-part, B-part) incidence graph.
/// The boundary strings of a block are refined by the sector: on a torus two
/// configurations can share `σ` yet fall into different blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtBlock {
    /// Boundary strings occurring in the block, sorted.
    pub sigmas: Vec<String>,
    /// Distinct region-A configurations in the block.
    pub n_a: u64,
    /// Distinct region-B configurations in the block.
    pub n_b: u64,
    /// Configurations of the component inside the block.
    pub count: u64,
    /// True when every A-part pairs with every B-part (`count = n_a·n_b`).
    pub complete: bool,
    /// `count / N` as `"num/den"` when the block is complete.
    pub p: Option<String>,
    /// Schmidt coefficients contributed by this block, descending.
    pub coefficients: Vec<f64>,
}

/// Weight of one boundary string, `p_σ = count(σ) / N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryWeight {
    pub sigma: String,
    pub count: u64,
    pub p: String,
    pub p_value: f64,
}

/// Schmidt data of a uniform superposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    pub bipartition: String,
    pub total: u64,
    pub blocks: Vec<SchmidtBlock>,
    pub boundary: Vec<BoundaryWeight>,
    /// Schmidt coefficients `p_k`, descending.
    pub coefficients: Vec<f64>,
    /// True when every block is complete, so every coefficient is an exact ratio of counts.
    pub exact: bool,
    pub rank: usize,
    pub entropy: f64,
    /// `−Σ p_σ ln p_σ` over boundary strings alone.
    pub sigma_entropy: f64,
}

impl SchmidtSpectrum {
    /// `Σ count` over blocks, which must equal the component size.
    pub fn count_sum(&self) -> u64 {
        self.blocks.iter().map(|b| b.count).sum()
    }

    /// `Σ N_A·N_B` over blocks. Equals the component size iff every block is complete.
    pub fn product_sum(&self) -> u64 {
        self.blocks.iter().map(|b| b.n_a * b.n_b).sum()
    }

    /// `sigma,N_A,N_B,p` rows, one per block; a block with several
    /// boundary strings joins them with `|`, and an incomplete block has an empty `p`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma,N_A,N_B,p\n");
        for b in &self.blocks {
            let _ = writeln!(out, "{},{},{},{}", b.sigmas.join("|"), b.n_a, b.n_b, b.p.as_deref().unwrap_or(""));
        }
        out
    }
}

/// `−Σ p ln p` in natural log; zero entries are skipped.
pub fn entanglement_entropy(probabilities: &[f64]) -> f64 {
    probabilities.iter().filter(|&&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

fn ratio_string(num: u64, den: u64) -> (String, f64) {
    let r = BigRational::new(BigInt::from(num), BigInt::from(den));
    (format!("{}/{}", r.numer(), r.denom()), r.to_f64().unwrap_or(f64::NAN))
}

fn find_root(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

/// Schmidt spectrum of the uniform superposition over `configs`, found by
/// counting completions. Configurations are grouped into connected blocks of
/// the bipartite (A-part, B-part) incidence graph; a complete block is one
/// exact coefficient, any other block is resolved by a small dense SVD.
pub fn schmidt_spectrum_by_counting(configs: &[PackedConfig], part: &Bipartition) -> Result<SchmidtSpectrum> {
    if configs.is_empty() {
        return Err(LoopError::Empty);
    }
    let pow3 = powers_of_three(part.num_edges);
    let mut a_ids: BTreeMap<PackedConfig, usize> = BTreeMap::new();
    let mut b_ids: BTreeMap<PackedConfig, usize> = BTreeMap::new();
    let mut a_sigma: Vec<String> = Vec::new();
    let mut pairs = Vec::with_capacity(configs.len());
    let mut sigma_counts: BTreeMap<String, u64> = BTreeMap::new();
    for &c in configs {
        let (a, b) = part.split(c, &pow3);
        let na = a_ids.len();
        let ia = *a_ids.entry(a).or_insert(na);
        if ia == na {
            a_sigma.push(part.sigma(c, &pow3));
        }
        let nb = b_ids.len();
        let ib = *b_ids.entry(b).or_insert(nb);
        pairs.push((ia, ib));
        *sigma_counts.entry(a_sigma[ia].clone()).or_default() += 1;
    }
    let total = configs.len() as u64;

    // union-find over A nodes [0, nA) and B nodes [nA, nA + nB)
    let n_a = a_ids.len();
    let mut parent: Vec<usize> = (0..n_a + b_ids.len()).collect();
    for &(ia, ib) in &pairs {
        let (x, y) = (find_root(&mut parent, ia), find_root(&mut parent, n_a + ib));
        if x != y {
            parent[x.max(y)] = x.min(y);
        }
    }
    let mut grouped: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &(ia, ib) in &pairs {
        grouped.entry(find_root(&mut parent, ia)).or_default().push((ia, ib));
    }

    let mut blocks = Vec::with_capacity(grouped.len());
    for block in grouped.values() {
        let rows: BTreeSet<usize> = block.iter().map(|p| p.0).collect();
        let cols: BTreeSet<usize> = block.iter().map(|p| p.1).collect();
        let sigmas: BTreeSet<String> = rows.iter().map(|&r| a_sigma[r].clone()).collect();
        let count = block.len() as u64;
        let complete = block.len() == rows.len() * cols.len();
        let (p, coefficients) = if complete {
            let (p, _) = ratio_string(count, total);
            (Some(p), vec![count as f64 / total as f64])
        } else {
            let ri: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
            let ci: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
            let mut m = DMatrix::<f64>::zeros(rows.len(), cols.len());
            for &(ia, ib) in block {
                m[(ri[&ia], ci[&ib])] = 1.0;
            }
            let mut coef: Vec<f64> = m
                .svd(false, false)
                .singular_values
                .iter()
                .map(|s| s * s / total as f64)
                .filter(|&p| p > 1e-15)
                .collect();
            coef.sort_by(|a, b| b.total_cmp(a));
            (None, coef)
        };
        blocks.push(SchmidtBlock {
            sigmas: sigmas.into_iter().collect(),
            n_a: rows.len() as u64,
            n_b: cols.len() as u64,
            count,
            complete,
            p,
            coefficients,
        });
    }
    blocks.sort_by(|x, y| x.sigmas.cmp(&y.sigmas).then(y.count.cmp(&x.count)));

    let mut coefficients: Vec<f64> = blocks.iter().flat_map(|b| b.coefficients.iter().copied()).collect();
    coefficients.sort_by(|a, b| b.total_cmp(a));
    let boundary: Vec<BoundaryWeight> = sigma_counts
        .into_iter()
        .map(|(sigma, count)| {
            let (p, p_value) = ratio_string(count, total);
            BoundaryWeight { sigma, count, p, p_value }
        })
        .collect();
    let sigma_p: Vec<f64> = boundary.iter().map(|w| w.p_value).collect();
    Ok(SchmidtSpectrum {
        bipartition: part.description.clone(),
        total,
        exact: blocks.iter().all(|b| b.complete),
        rank: coefficients.len(),
        entropy: entanglement_entropy(&coefficients),
        sigma_entropy: entanglement_entropy(&sigma_p),
        coefficients,
        blocks,
        boundary,
    })
}

/// Reduced-density-matrix spectrum of an arbitrary state, by explicit
/// partial trace over region B. Eigenvalues are returned descending with
/// values below `1e-14` dropped.
pub fn reduced_density_spectrum(state: &StateVector, part: &Bipartition) -> Result<Vec<f64>> {
    if state.basis.num_edges() != part.num_edges {
        return Err(LoopError::BasisMismatch("state and bipartition disagree on edge count".into()));
    }
    let pow3 = powers_of_three(part.num_edges);
    let mut a_ids: BTreeMap<PackedConfig, usize> = BTreeMap::new();
    let mut b_ids: BTreeMap<PackedConfig, usize> = BTreeMap::new();
    let mut entries = Vec::new();
    for (i, &amp) in state.amplitudes.iter().enumerate() {
        if amp == 0.0 {
            continue;
        }
        let (a, b) = part.split(state.basis.config(i), &pow3);
        let na = a_ids.len();
        let ia = *a_ids.entry(a).or_insert(na);
        let nb = b_ids.len();
        let ib = *b_ids.entry(b).or_insert(nb);
        entries.push((ia, ib, amp));
    }
    let mut psi = DMatrix::<f64>::zeros(a_ids.len(), b_ids.len());
    for (ia, ib, amp) in entries {
        psi[(ia, ib)] += amp;
    }
    let rho = &psi * psi.transpose();
    let (mut values, _) = sorted_symmetric_eigen(rho);
    values.retain(|&v| v > 1e-14);
    values.reverse();
    Ok(values)
}

/// Boundary strings allowed on `part`. On the square torus these are the
/// strings with an even number of red and of blue letters. On the honeycomb
/// they are read off every closed configuration of the geometry.
pub fn admissible_boundary_strings(geom: &LatticeGeometry, part: &Bipartition, budget: u64) -> Result<BTreeSet<String>> {
    let n = part.cut_len();
    match geom.kind() {
        LatticeKind::SquareTorus => {
            if n > 16 {
                return Err(LoopError::BudgetExceeded { estimated: 3u64.pow(n as u32), budget });
            }
            let mut out = BTreeSet::new();
            for code in 0..3usize.pow(n as u32) {
                let mut c = code;
                let mut s = String::with_capacity(n);
                let (mut r, mut b) = (0, 0);
                for _ in 0..n {
                    let st = EdgeState::from_index((c % 3) as u8).expect("digit");
                    r += (st == EdgeState::Red) as usize;
                    b += (st == EdgeState::Blue) as usize;
                    s.push(st.symbol());
                    c /= 3;
                }
                if r % 2 == 0 && b % 2 == 0 {
                    out.insert(s);
                }
            }
            Ok(out)
        }
        LatticeKind::HexTorus => {
            let pow3 = powers_of_three(geom.num_edges());
            Ok(collect_closed_loop_configs(geom, budget)?.into_iter().map(|c| part.sigma(c, &pow3)).collect())
        }
    }
}

/// Least-squares fit of `S = α·(2l) − β·ln(2l) − γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points: usize,
}

pub fn fit_area_law(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 4 {
        return Err(LoopError::InvalidArgument(format!("need at least 4 points, got {}", points.len())));
    }
    if points.iter().any(|&(l, _)| l <= 0.0) {
        return Err(LoopError::InvalidArgument("l must be positive".into()));
    }
    let m = points.len();
    let design = DMatrix::from_fn(m, 3, |r, c| {
        let x = 2.0 * points[r].0;
        match c {
            0 => x,
            1 => -x.ln(),
            _ => -1.0,
        }
    });
    let rhs = DVector::from_iterator(m, points.iter().map(|p| p.1));
    // scale columns so the conditioning check is meaningful
    let scales: Vec<f64> = (0..3).map(|c| design.column(c).norm()).collect();
    if scales.iter().any(|s| s.is_zero()) {
        return Err(LoopError::DegenerateFit);
    }
    let scaled = DMatrix::from_fn(m, 3, |r, c| design[(r, c)] / scales[c]);
    let svd = scaled.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-12 * smax {
        return Err(LoopError::DegenerateFit);
    }
    let sol = svd.solve(&rhs, 1e-14).map_err(|_| LoopError::DegenerateFit)?;
    let coef: Vec<f64> = (0..3).map(|c| sol[c] / scales[c]).collect();
    let fitted = &scaled * &sol;
    let rms = ((&fitted - &rhs).norm_squared() / m as f64).sqrt();
    Ok(ScalingFit { alpha: coef[0], beta: coef[1], gamma: coef[2], residual: rms, points: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_square_torus;

    #[test]
    fn synthetic_fit() {
        let pts: Vec<(f64, f64)> =
            (1..=20).map(|l| (l as f64 * 10.0, 1.0986 * 20.0 * l as f64 - 4f64.ln())).collect();
        let f = fit_area_law(&pts).unwrap();
        assert!((f.alpha - 1.0986).abs() < 1e-9);
        assert!(f.beta.abs() < 1e-6);
        assert!((f.gamma - 4f64.ln()).abs() < 1e-6);
        assert!(fit_area_law(&pts[..3]).is_err());
        let flat = vec![(5.0, 1.0); 6];
        assert!(matches!(fit_area_law(&flat), Err(LoopError::DegenerateFit)));
    }

    #[test]
    fn entropy_basics() {
        assert_eq!(entanglement_entropy(&[1.0]), 0.0);
        assert!((entanglement_entropy(&[0.25; 4]) - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn square_parity_strings() {
        let g = build_square_torus(2).unwrap();
        let part = column_bipartition(&g, 1).unwrap();
        assert_eq!(part.cut_len(), 4);
        assert_eq!(admissible_boundary_strings(&g, &part, 1 << 20).unwrap().len(), 21);
    }

    #[test]
    fn product_state_has_rank_one() {
        let g = build_square_torus(2).unwrap();
        let part = column_bipartition(&g, 1).unwrap();
        let s = schmidt_spectrum_by_counting(&[0], &part).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.entropy, 0.0);
        assert_eq!(s.blocks[0].p.as_deref(), Some("1/1"));
        assert_eq!(s.product_sum(), 1);
    }
}
