//! Exact diagonalisation and the spectral checks built on it.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::dynamics::{components_of, MoveSet};
use crate::error::{LoopError, Result};
use crate::lattice::{collect_sector_configs, DefectPattern, EdgeState, LatticeGeometry, LatticeKind, PackedConfig};
use crate::linalg::{dot, group_levels, norm, sorted_symmetric_eigen};
use crate::operators::{assemble_hamiltonian, hamiltonian_parts, Basis, Model, ModelSpec, SparseOperator};

/// Relative tolerance used to merge degenerate eigenvalues.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Residual target `‖Hψ − λψ‖ / max(1, |λ|)` for reported eigenpairs.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// A normalised real state on an explicit basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub basis: Arc<Basis>,
    pub amplitudes: Vec<f64>,
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// Basis indices with nonzero amplitude.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        self.amplitudes.iter().enumerate().filter(|(_, a)| a.abs() > tol).map(|(i, _)| i).collect()
    }

    pub fn expectation(&self, h: &SparseOperator) -> Result<f64> {
        self.check(h)?;
        Ok(dot(&self.amplitudes, &h.matvec(&self.amplitudes)))
    }

    /// `‖(H − ⟨H⟩)ψ‖`, together with `⟨H⟩`.
    pub fn residual(&self, h: &SparseOperator) -> Result<(f64, f64)> {
        self.check(h)?;
        let hv = h.matvec(&self.amplitudes);
        let e = dot(&self.amplitudes, &hv);
        let r: Vec<f64> = hv.iter().zip(&self.amplitudes).map(|(x, a)| x - e * a).collect();
        Ok((e, norm(&r)))
    }

    fn check(&self, h: &SparseOperator) -> Result<()> {
        if **h.basis() != *self.basis {
            return Err(LoopError::BasisMismatch(format!(
                "state on {}, operator on {}",
                self.basis.descriptor(),
                h.basis().descriptor()
            )));
        }
        Ok(())
    }
}

/// Equal-amplitude normalised superposition of `members` within `basis`.
pub fn uniform_sector_state(basis: Arc<Basis>, members: &[PackedConfig]) -> Result<StateVector> {
    if members.is_empty() {
        return Err(LoopError::Empty);
    }
    let mut amplitudes = vec![0.0; basis.dim()];
    let a = 1.0 / (members.len() as f64).sqrt();
    for &p in members {
        let i = basis
            .index_of(p)
            .ok_or_else(|| LoopError::BasisMismatch(format!("configuration {p} not in {}", basis.descriptor())))?;
        amplitudes[i] = a;
    }
    Ok(StateVector { basis, amplitudes })
}

/// Which eigensolver produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMethod {
    /// Dense diagonalisation of each connected block of the sparsity graph.
    BlockDense,
    /// Restarted Lanczos with locking, matvec access only.
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    /// Block-dense up to the dimension threshold, Lanczos above it.
    Auto,
    BlockDense,
    Lanczos,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub choice: SolverChoice,
    /// Total dimension above which `Auto` switches to Lanczos.
    pub dense_dim: usize,
    /// Largest block the block-dense solver will diagonalise.
    pub max_block: usize,
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub seed: u64,
    pub keep_vectors: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            choice: SolverChoice::Auto,
            dense_dim: 10_000,
            max_block: 3000,
            krylov_dim: 60,
            max_restarts: 400,
            seed: 0x5eed,
            keep_vectors: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverInfo {
    pub method: SolverMethod,
    pub blocks: usize,
    pub largest_block: usize,
    pub iterations: usize,
}

/// The low-lying spectrum of an operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub model: Option<String>,
    pub dims: Option<(usize, usize)>,
    pub basis: String,
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    /// Largest relative residual within each level.
    pub residuals: Vec<f64>,
    pub solver: SolverInfo,
    #[serde(skip)]
    pub vectors: Option<Vec<StateVector>>,
}

impl EigenReport {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn ground_degeneracy(&self) -> usize {
        self.multiplicities[0]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn with_context(mut self, model: &str, dims: (usize, usize)) -> Self {
        self.model = Some(model.to_string());
        self.dims = Some(dims);
        self
    }
}

/// Connected components of the sparsity graph, each sorted ascending.
pub fn sparsity_blocks(h: &SparseOperator) -> Vec<Vec<usize>> {
    let n = h.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for r in 0..n {
        for (c, _) in h.row(r) {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(i);
    }
    blocks
}

struct Pair {
    value: f64,
    vector: Option<Vec<f64>>,
    residual: f64,
}

fn relative_residual(h: &SparseOperator, value: f64, v: &[f64]) -> f64 {
    let hv = h.matvec(v);
    let r: Vec<f64> = hv.iter().zip(v).map(|(x, y)| x - value * y).collect();
    norm(&r) / value.abs().max(1.0)
}

/// Every eigenpair, block by block.
fn block_dense_pairs(h: &SparseOperator, opts: &SolverOptions) -> Result<(Vec<Pair>, SolverInfo)> {
    let blocks = sparsity_blocks(h);
    let largest = blocks.iter().map(Vec::len).max().unwrap_or(0);
    if largest > opts.max_block {
        return Err(LoopError::DimensionTooLarge { dim: largest, threshold: opts.max_block });
    }
    let n = h.dim();
    let mut pairs = Vec::with_capacity(n);
    for block in &blocks {
        let m = block.len();
        let mut dense = DMatrix::zeros(m, m);
        for (bi, &r) in block.iter().enumerate() {
            for (c, v) in h.row(r) {
                let bj = block.binary_search(&c).expect("sparsity block is closed");
                dense[(bi, bj)] = v as f64;
            }
        }
        let (values, vectors) = sorted_symmetric_eigen(dense);
        for (k, value) in values.into_iter().enumerate() {
            let mut full = vec![0.0; n];
            for (bi, &r) in block.iter().enumerate() {
                full[r] = vectors[(bi, k)];
            }
            // residual evaluated on the full operator, not the block copy
            let residual = relative_residual(h, value, &full);
            pairs.push(Pair { value, vector: opts.keep_vectors.then_some(full), residual });
        }
    }
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok((pairs, SolverInfo { method: SolverMethod::BlockDense, blocks: blocks.len(), largest_block: largest, iterations: 0 }))
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in against {
            let c = dot(v, q);
            v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// Lowest `nev` eigenpairs by restarted Lanczos with locking.
fn lanczos_pairs(h: &SparseOperator, nev: usize, opts: &SolverOptions) -> Result<(Vec<Pair>, SolverInfo)> {
    let n = h.dim();
    let nev = nev.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut pairs = Vec::new();
    let mut total_iterations = 0;
    for _ in 0..nev {
        let mut start: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let mut converged = None;
        let mut last_residual = f64::INFINITY;
        for _ in 0..opts.max_restarts {
            orthogonalize(&mut start, &locked);
            let s = norm(&start);
            if s == 0.0 {
                return Err(LoopError::NonConvergence { iterations: total_iterations, residual: f64::NAN });
            }
            start.iter_mut().for_each(|x| *x /= s);
            let mut basis = vec![start.clone()];
            let mut alpha = Vec::new();
            let mut beta: Vec<f64> = Vec::new();
            let m = opts.krylov_dim.min(n - locked.len()).max(1);
            for j in 0..m {
                let mut w = h.matvec(&basis[j]);
                total_iterations += 1;
                let a = dot(&w, &basis[j]);
                alpha.push(a);
                orthogonalize(&mut w, &locked);
                orthogonalize(&mut w, &basis);
                let b = norm(&w);
                if j + 1 == m || b < 1e-12 {
                    break;
                }
                beta.push(b);
                w.iter_mut().for_each(|x| *x /= b);
                basis.push(w);
            }
            let k = alpha.len();
            let mut t = DMatrix::zeros(k, k);
            for i in 0..k {
                t[(i, i)] = alpha[i];
                if i + 1 < k {
                    t[(i, i + 1)] = beta[i];
                    t[(i + 1, i)] = beta[i];
                }
            }
            let (_, y) = sorted_symmetric_eigen(t);
            let mut x = vec![0.0; n];
            for (i, q) in basis.iter().enumerate().take(k) {
                let c = y[(i, 0)];
                x.iter_mut().zip(q).for_each(|(xi, qi)| *xi += c * qi);
            }
            orthogonalize(&mut x, &locked);
            let s = norm(&x);
            x.iter_mut().for_each(|v| *v /= s);
            let value = dot(&x, &h.matvec(&x));
            last_residual = relative_residual(h, value, &x);
            if last_residual <= RESIDUAL_TOL {
                converged = Some((value, x));
                break;
            }
            start = x;
        }
        let (value, x) = converged
            .ok_or(LoopError::NonConvergence { iterations: total_iterations, residual: last_residual })?;
        pairs.push(Pair { value, vector: Some(x.clone()), residual: last_residual });
        locked.push(x);
    }
    pairs.sort_by(|a, b| a.value.total_cmp(&b.value));
    if !opts.keep_vectors {
        pairs.iter_mut().for_each(|p| p.vector = None);
    }
    Ok((pairs, SolverInfo { method: SolverMethod::Lanczos, blocks: 1, largest_block: n, iterations: total_iterations }))
}

fn report_from_pairs(h: &SparseOperator, pairs: Vec<Pair>, info: SolverInfo, k: usize, complete: bool) -> EigenReport {
    let values: Vec<f64> = pairs.iter().map(|p| p.value).collect();
    let mut levels = group_levels(&values, DEGENERACY_TOL);
    // a truncated Lanczos run cannot certify the multiplicity of its top level
    if !complete && levels.len() > 1 && values.len() < h.dim() {
        levels.pop();
    }
    let mut taken = 0;
    let mut eigenvalues = Vec::new();
    let mut multiplicities = Vec::new();
    let mut residuals = Vec::new();
    let mut vectors = Vec::new();
    for level in levels {
        if taken >= k {
            break;
        }
        let slice = &pairs[taken..taken + level.multiplicity];
        eigenvalues.push(level.value);
        multiplicities.push(level.multiplicity);
        residuals.push(slice.iter().map(|p| p.residual).fold(0.0, f64::max));
        for p in slice {
            if let Some(v) = &p.vector {
                vectors.push(StateVector { basis: h.basis().clone(), amplitudes: v.clone() });
            }
        }
        taken += level.multiplicity;
    }
    EigenReport {
        model: None,
        dims: None,
        basis: h.basis().descriptor(),
        eigenvalues,
        multiplicities,
        residuals,
        solver: info,
        vectors: (!vectors.is_empty()).then_some(vectors),
    }
}

/// Lowest eigenpairs of a symmetric operator. At least `k` eigenvalues are
/// covered; the last reported level carries its full multiplicity.
pub fn ground_space(h: &SparseOperator, k: usize, opts: &SolverOptions) -> Result<EigenReport> {
    if !h.is_symmetric() {
        return Err(LoopError::InvalidArgument("operator is not symmetric".into()));
    }
    if h.dim() == 0 {
        return Err(LoopError::Empty);
    }
    let k = k.max(1);
    let use_dense = match opts.choice {
        SolverChoice::BlockDense => true,
        SolverChoice::Lanczos => false,
        SolverChoice::Auto => h.dim() <= opts.dense_dim,
    };
    if use_dense {
        let (pairs, info) = block_dense_pairs(h, opts)?;
        Ok(report_from_pairs(h, pairs, info, k, true))
    } else {
        let (pairs, info) = lanczos_pairs(h, k + 1, opts)?;
        let complete = pairs.len() == h.dim();
        Ok(report_from_pairs(h, pairs, info, k, complete))
    }
}

/// Every eigenvalue of `h`, ascending, via the block-dense solver.
pub fn full_spectrum(h: &SparseOperator) -> Result<Vec<f64>> {
    let opts = SolverOptions { max_block: usize::MAX, ..SolverOptions::default() };
    Ok(block_dense_pairs(h, &opts)?.0.into_iter().map(|p| p.value).collect())
}

/// Max-absolute-entry of `AB − BA`, exact.
pub fn commutator_norm(a: &SparseOperator, b: &SparseOperator) -> Result<i64> {
    Ok(a.commutator(b)?.max_abs())
}

/// Comparison of `spec(H)` against `{E_v + ε}` where `ε` runs over the
/// spectrum of `P_E H_f P_E` in each eigenspace `E_v` of the diagonal `H_v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerReport {
    pub model: String,
    pub dims: (usize, usize),
    pub dim: usize,
    pub commutator_norm: i64,
    pub hv_levels: Vec<(i64, usize)>,
    pub hv_integer_valued: bool,
    pub hv_closed_value: Option<i64>,
    pub max_multiset_deviation: f64,
    pub multiset_matches: bool,
    /// The same comparison restricted to the closed-loop sector.
    pub closed_sector_deviation: f64,
}

pub fn tower_scan(geom: &LatticeGeometry, model: Model) -> Result<TowerReport> {
    let spec = ModelSpec::new(model, geom)?;
    let basis = Basis::full(geom.num_edges());
    let (hv, hf) = hamiltonian_parts(&spec, basis.clone())?;
    let h = hv.add(&hf)?;
    let comm = commutator_norm(&hv, &hf)?;
    if !hv.is_diagonal() {
        return Err(LoopError::InvalidArgument("vertex part is expected to be diagonal".into()));
    }
    let diag = hv.diagonal();
    let mut hv_levels: Vec<(i64, usize)> = Vec::new();
    let mut values: Vec<i64> = diag.clone();
    values.sort_unstable();
    for v in values {
        match hv_levels.last_mut() {
            Some(last) if last.0 == v => last.1 += 1,
            _ => hv_levels.push((v, 1)),
        }
    }
    let deviation = |restrict_to: Option<&[PackedConfig]>| -> Result<f64> {
        let (hh, hfp, dg): (SparseOperator, SparseOperator, Vec<i64>) = match restrict_to {
            None => (h.clone(), hf.clone(), diag.clone()),
            Some(configs) => {
                let sub = Basis::explicit("closed", geom.num_edges(), configs.to_vec());
                (h.restrict(sub.clone())?, hf.restrict(sub.clone())?, hv.restrict(sub)?.diagonal())
            }
        };
        let exact = full_spectrum(&hh)?;
        let mut sums = Vec::with_capacity(exact.len());
        let mut ev: Vec<i64> = dg.clone();
        ev.sort_unstable();
        ev.dedup();
        for e in ev {
            let members: Vec<PackedConfig> =
                (0..dg.len()).filter(|&i| dg[i] == e).map(|i| hfp.basis().config(i)).collect();
            let sub = Basis::explicit(format!("hv={e}"), geom.num_edges(), members);
            for x in full_spectrum(&hfp.restrict(sub)?)? {
                sums.push(e as f64 + x);
            }
        }
        sums.sort_by(f64::total_cmp);
        Ok(exact.iter().zip(&sums).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    };
    let full_dev = deviation(None)?;
    let closed = collect_sector_configs(geom, &DefectPattern::closed(geom.num_vertices()), 1 << 24)?;
    let closed_dev = deviation(Some(&closed))?;
    let closed_value = {
        let sub = Basis::explicit("closed", geom.num_edges(), closed);
        let d = hv.restrict(sub)?.diagonal();
        (d.iter().all(|&x| x == d[0])).then(|| d[0])
    };
    Ok(TowerReport {
        model: model.name().to_string(),
        dims: geom.dims(),
        dim: h.dim(),
        commutator_norm: comm,
        hv_integer_valued: true,
        hv_levels,
        hv_closed_value: closed_value,
        max_multiset_deviation: full_dev,
        multiset_matches: full_dev <= 1e-9,
        closed_sector_deviation: closed_dev,
    })
}

/// Two vertex defects of one color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectSpec {
    pub vertices: (usize, usize),
    pub color: EdgeState,
}

/// The uniform superposition over one move-graph component of a defect sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectTowerState {
    pub component: usize,
    pub size: usize,
    pub representative: PackedConfig,
    pub energy: f64,
    pub residual: f64,
    pub offset_from_ground: f64,
    pub integer_offset: bool,
    pub exact_eigenstate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectTowerReport {
    pub model: String,
    pub dims: (usize, usize),
    pub defects: Option<DefectSpec>,
    pub sector_size: usize,
    pub ground_reference: f64,
    pub states: Vec<DefectTowerState>,
}

/// Frustration-free ground energy of a model on `geom`: the sum of the
/// per-term minima.
pub fn reference_ground_energy(geom: &LatticeGeometry, model: Model) -> f64 {
    let (v, f) = (geom.num_vertices() as f64, geom.num_faces() as f64);
    match model {
        Model::SquareInter => -v - 3.0 * f,
        Model::SquareTotal => -v - 3.0 * f - 3.0 * geom.face_pairs().len() as f64,
        Model::Hex => -v - f,
    }
}

/// Uniform states over every move-graph component of a defect sector
/// (`defects = None` gives the closed sector), with their residuals.
pub fn defect_tower_states(geom: &LatticeGeometry, model: Model, defects: Option<DefectSpec>, budget: u64) -> Result<DefectTowerReport> {
    let spec = ModelSpec::new(model, geom)?;
    let pattern = match defects {
        None => DefectPattern::closed(geom.num_vertices()),
        Some(d) => {
            if d.color == EdgeState::Empty || d.vertices.0 == d.vertices.1 {
                return Err(LoopError::InvalidArgument("defects need two distinct vertices and a color".into()));
            }
            DefectPattern::with_defects(geom.num_vertices(), &[(d.vertices.0, d.color), (d.vertices.1, d.color)])?
        }
    };
    let configs = collect_sector_configs(geom, &pattern, budget)?;
    if configs.is_empty() {
        return Err(LoopError::Empty);
    }
    let basis = Basis::explicit("defect-sector", geom.num_edges(), configs.clone());
    let h = assemble_hamiltonian(&spec, basis.clone())?;
    let set = match (model, geom.kind()) {
        (Model::SquareInter, _) => MoveSet::B,
        (Model::SquareTotal, _) => MoveSet::BC,
        (Model::Hex, LatticeKind::HexTorus) | (Model::Hex, LatticeKind::SquareTorus) => MoveSet::HexB,
    };
    let partition = components_of(geom, configs.clone(), set)?;
    let ground = reference_ground_energy(geom, model);
    let mut states = Vec::new();
    for c in 0..partition.num_components() {
        let members = partition.members(c);
        let psi = uniform_sector_state(basis.clone(), &members)?;
        let (energy, residual) = psi.residual(&h)?;
        let offset = energy - ground;
        states.push(DefectTowerState {
            component: c,
            size: members.len(),
            representative: members[0],
            energy,
            residual,
            offset_from_ground: offset,
            integer_offset: (offset - offset.round()).abs() < 1e-9,
            exact_eigenstate: residual < 1e-10,
        });
    }
    Ok(DefectTowerReport {
        model: model.name().to_string(),
        dims: geom.dims(),
        defects,
        sector_size: configs.len(),
        ground_reference: ground,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_square_torus;

    fn path_graph(n: usize) -> SparseOperator {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2));
            if i + 1 < n {
                t.push((i, i + 1, -1));
                t.push((i + 1, i, -1));
            }
        }
        SparseOperator::from_triplets(Basis::explicit("p", 12, (0..n as u64).collect()), &t)
    }

    #[test]
    fn lanczos_matches_dense() {
        let h = path_graph(300);
        let dense = ground_space(&h, 3, &SolverOptions { choice: SolverChoice::BlockDense, ..Default::default() }).unwrap();
        let lz = ground_space(&h, 3, &SolverOptions { choice: SolverChoice::Lanczos, ..Default::default() }).unwrap();
        for (a, b) in dense.eigenvalues.iter().zip(&lz.eigenvalues) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        assert!(lz.max_residual() <= RESIDUAL_TOL);
    }

    #[test]
    fn blocks_split_direct_sum() {
        let b = Basis::explicit("d", 3, vec![0, 1, 2, 3]);
        let h = SparseOperator::from_triplets(b, &[(0, 1, 1), (1, 0, 1), (2, 2, 5), (3, 3, 5)]);
        let blocks = sparsity_blocks(&h);
        assert_eq!(blocks, vec![vec![0, 1], vec![2], vec![3]]);
        let r = ground_space(&h, 10, &SolverOptions::default()).unwrap();
        assert_eq!(r.multiplicities, vec![1, 1, 2]);
    }

    #[test]
    fn interh_ground_energy() {
        let g = build_square_torus(2).unwrap();
        let spec = ModelSpec::new(Model::SquareInter, &g).unwrap();
        let h = assemble_hamiltonian(&spec, Basis::full(8)).unwrap();
        let r = ground_space(&h, 1, &SolverOptions::default()).unwrap();
        assert!((r.ground_energy() + 16.0).abs() < 1e-9);
    }

    #[test]
    fn single_config_state() {
        let b = Basis::explicit("x", 2, vec![0, 4, 8]);
        let s = uniform_sector_state(b.clone(), &[4]).unwrap();
        assert_eq!(s.amplitudes, vec![0.0, 1.0, 0.0]);
        assert!(uniform_sector_state(b, &[]).is_err());
    }
}
