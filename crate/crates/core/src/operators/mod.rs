//! On-site matrices, local Hamiltonian terms, assembled Hamiltonians and
//! Wilson loop operators, all with exact integer entries.

mod local;
mod sparse;

pub use local::{embed_sum, LocalOperator};
pub(crate) use local::powers_of_three;
pub use sparse::{Basis, SparseOperator};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{LoopError, Result};
use crate::lattice::{Direction, EdgeState, LatticeGeometry, LatticeKind};
use crate::linalg::{group_levels, sorted_symmetric_eigen, Level, LEVEL_TOL};

/// A 3×3 integer matrix in the basis (φ, r, b), indexed `[row][col]`.
pub type Mat3 = [[i64; 3]; 3];

pub const IDENTITY3: Mat3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

/// The generalised Pauli matrices of the three-state edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OnSiteFamily {
    pub x: [Mat3; 3],
    pub z: [Mat3; 3],
}

impl OnSiteFamily {
    /// `X^(a)` for `a ∈ {1,2,3}`.
    pub fn x(&self, a: usize) -> Mat3 {
        self.x[a - 1]
    }

    /// `Z^(a)` for `a ∈ {1,2,3}`.
    pub fn z(&self, a: usize) -> Mat3 {
        self.z[a - 1]
    }
}

pub fn onsite_family() -> OnSiteFamily {
    OnSiteFamily {
        x: [
            [[0, 1, 0], [1, 0, 0], [0, 0, 0]],
            [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
            [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
        ],
        z: [
            [[1, 0, 0], [0, -1, 0], [0, 0, 0]],
            [[1, 0, 0], [0, 0, 0], [0, 0, -1]],
            [[0, 0, 0], [0, 1, 0], [0, 0, -1]],
        ],
    }
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn flavours(geom: &LatticeGeometry) -> std::ops::RangeInclusive<usize> {
    match geom.kind() {
        LatticeKind::SquareTorus => 1..=3,
        LatticeKind::HexTorus => 1..=2,
    }
}

fn check_flavour(geom: &LatticeGeometry, a: usize) -> Result<()> {
    if flavours(geom).contains(&a) {
        Ok(())
    } else {
        Err(LoopError::InvalidArgument(format!("flavour {a} not defined on a {} lattice", geom.kind().name())))
    }
}

fn repeated(support: &[usize], m: Mat3) -> LocalOperator {
    LocalOperator::product(support.to_vec(), &vec![m; support.len()])
}

fn distinct_states(states: &[EdgeState]) -> i64 {
    states.iter().collect::<BTreeSet<_>>().len() as i64
}

/// `A_v^(a)`: product of `Z^(a)` over the edges at `v`.
pub fn vertex_star(geom: &LatticeGeometry, v: usize, a: usize) -> Result<LocalOperator> {
    check_flavour(geom, a)?;
    Ok(repeated(geom.vertex_edges(v)?, onsite_family().z(a)))
}

/// `Δ̂_v`: 1 when every edge at `v` is in the same state.
pub fn vertex_uniformity(geom: &LatticeGeometry, v: usize) -> Result<LocalOperator> {
    Ok(LocalOperator::diagonal(geom.vertex_edges(v)?.to_vec(), |s| (distinct_states(s) == 1) as i64))
}

/// `B_f^(a)` (or `B'_f^(a)` on the honeycomb): product of `X^(a)` around `f`.
pub fn face_flip(geom: &LatticeGeometry, f: usize, a: usize) -> Result<LocalOperator> {
    check_flavour(geom, a)?;
    Ok(repeated(geom.face_edges(f)?, onsite_family().x(a)))
}

/// `N̂_f`: number of distinct states on the boundary of `f`.
pub fn face_distinct_count(geom: &LatticeGeometry, f: usize) -> Result<LocalOperator> {
    Ok(LocalOperator::diagonal(geom.face_edges(f)?.to_vec(), distinct_states))
}

/// `Û^(0)_f`: 1 when every edge of `f` is empty.
pub fn face_empty_indicator(geom: &LatticeGeometry, f: usize) -> Result<LocalOperator> {
    Ok(LocalOperator::diagonal(geom.face_edges(f)?.to_vec(), |s| {
        s.iter().all(|&x| x == EdgeState::Empty) as i64
    }))
}

/// `C_<f,f'>^(a)`: product of `X^(a)` on the symmetric difference of a face pair.
pub fn pair_flip(geom: &LatticeGeometry, pair: (usize, usize), a: usize) -> Result<LocalOperator> {
    check_flavour(geom, a)?;
    let p = geom.find_face_pair(pair.0, pair.1)?;
    Ok(repeated(&p.support, onsite_family().x(a)))
}

/// `N̂_<f,f'>`: number of distinct states on the pair support.
pub fn pair_distinct_count(geom: &LatticeGeometry, pair: (usize, usize)) -> Result<LocalOperator> {
    let p = geom.find_face_pair(pair.0, pair.1)?;
    Ok(LocalOperator::diagonal(p.support.clone(), distinct_states))
}

/// `h_v = −Σ_a A_v^(a) + Δ̂_v` (square) or `h'_v = −Σ_{a=1,2} A'_v^(a) + Δ̂'_v` (hex).
pub fn vertex_term(geom: &LatticeGeometry, v: usize) -> Result<LocalOperator> {
    let mut parts = Vec::new();
    for a in flavours(geom) {
        parts.push((-1, vertex_star(geom, v, a)?));
    }
    parts.push((1, vertex_uniformity(geom, v)?));
    let refs: Vec<_> = parts.iter().map(|(c, op)| (*c, op)).collect();
    LocalOperator::linear(&refs)
}

/// `h_f = −Σ_a B_f^(a) − N̂_f` (square) or `h'_f = −Σ_{a=1,2} B'_f^(a) + Û^(0)_f` (hex).
pub fn plaquette_term(geom: &LatticeGeometry, f: usize) -> Result<LocalOperator> {
    let mut parts = Vec::new();
    for a in flavours(geom) {
        parts.push((-1, face_flip(geom, f, a)?));
    }
    match geom.kind() {
        LatticeKind::SquareTorus => parts.push((-1, face_distinct_count(geom, f)?)),
        LatticeKind::HexTorus => parts.push((1, face_empty_indicator(geom, f)?)),
    }
    let refs: Vec<_> = parts.iter().map(|(c, op)| (*c, op)).collect();
    LocalOperator::linear(&refs)
}

/// `h_<f,f'> = −Σ_a C^(a) − N̂_<f,f'>`.
pub fn double_plaquette_term(geom: &LatticeGeometry, pair: (usize, usize)) -> Result<LocalOperator> {
    if geom.kind() != LatticeKind::SquareTorus {
        return Err(LoopError::Unsupported("double plaquettes exist only on the square torus".into()));
    }
    let mut parts = Vec::new();
    for a in 1..=3 {
        parts.push((-1, pair_flip(geom, pair, a)?));
    }
    parts.push((-1, pair_distinct_count(geom, pair)?));
    let refs: Vec<_> = parts.iter().map(|(c, op)| (*c, op)).collect();
    LocalOperator::linear(&refs)
}

/// Wilson loop `W_d^(a)` (product of `X^(a)` along the cycle of `direction`)
/// or, with `dual`, `W̃_d^(a)` (product of `Z^(a)` across the dual cycle).
pub fn wilson_operator(geom: &LatticeGeometry, direction: Direction, a: usize, dual: bool) -> Result<LocalOperator> {
    if geom.kind() != LatticeKind::SquareTorus {
        return Err(LoopError::Unsupported("Wilson operators are defined for the square torus only".into()));
    }
    check_flavour(geom, a)?;
    let cut = geom.cut(direction);
    let family = onsite_family();
    Ok(if dual { repeated(&cut.dual, family.z(a)) } else { repeated(&cut.cycle, family.x(a)) })
}

/// Identifies one Wilson operator: `W_d^(a)`, or `W̃_d^(a)` when `dual`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WilsonKey {
    pub dual: bool,
    pub direction: Direction,
    pub a: usize,
}

impl fmt::Display for WilsonKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.direction {
            Direction::X => "x",
            Direction::Y => "y",
        };
        write!(f, "{}_{d}^({})", if self.dual { "W~" } else { "W" }, self.a)
    }
}

/// Exact verdict on one identity `{P, Q} = c·R` between Wilson operators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WilsonRelation {
    /// Position in the printed list; 0 for the transverse `{W, W̃} = 0` family.
    pub index: usize,
    pub statement: String,
    pub holds: bool,
    /// Largest entry of `|{P, Q} − c·R|`.
    pub max_deviation: i64,
    /// Number of nonzero entries of `{P, Q}`.
    pub lhs_nnz: usize,
}

/// All twelve Wilson operators of a square torus, embedded in `basis`.
pub fn wilson_family(geom: &LatticeGeometry, basis: &Arc<Basis>) -> Result<Vec<(WilsonKey, SparseOperator)>> {
    let mut out = Vec::with_capacity(12);
    for dual in [false, true] {
        for direction in Direction::BOTH {
            for a in 1..=3 {
                let op = wilson_operator(geom, direction, a, dual)?.embed(basis.clone())?;
                out.push((WilsonKey { dual, direction, a }, op));
            }
        }
    }
    Ok(out)
}

/// Evaluates, in exact integer arithmetic on the full configuration space,
/// the transverse anticommutators `{W_d^(a), W̃_d'^(a)} = 0` and the nine
/// printed relations, each for both orientations of the cycles.
pub fn appendix_b_relations(geom: &LatticeGeometry) -> Result<Vec<WilsonRelation>> {
    let basis = Basis::full(geom.num_edges());
    let family = wilson_family(geom, &basis)?;
    let get = |k: WilsonKey| family.iter().find(|(key, _)| *key == k).map(|(_, op)| op).expect("all keys built");
    let mut out = Vec::new();
    let mut push = |index: usize, p: WilsonKey, q: WilsonKey, sign: i64, r: Option<WilsonKey>| -> Result<()> {
        let lhs = get(p).anticommutator(get(q))?;
        let (diff, rhs) = match r {
            Some(k) => (lhs.combine(1, get(k), -sign)?, format!("{}{k}", if sign < 0 { "−" } else { "" })),
            None => (lhs.clone(), "0".to_string()),
        };
        let dev = diff.max_abs();
        out.push(WilsonRelation {
            index,
            statement: format!("{{{p}, {q}}} = {rhs}"),
            holds: dev == 0,
            max_deviation: dev,
            lhs_nnz: lhs.nnz(),
        });
        Ok(())
    };
    let key = |dual, direction, a| WilsonKey { dual, direction, a };
    for d in Direction::BOTH {
        for a in 1..=3 {
            push(0, key(false, d, a), key(true, d.other(), a), 0, None)?;
        }
    }
    // (dual, flavour, transverse) pairs with the sign and flavour of the right-hand side
    let printed: [((bool, usize, bool), (bool, usize, bool), i64, usize); 9] = [
        ((false, 1, false), (false, 2, false), 1, 3),
        ((false, 2, false), (false, 3, false), 1, 1),
        ((false, 3, false), (false, 1, false), 1, 2),
        ((true, 2, false), (false, 1, true), -1, 1),
        ((true, 3, false), (false, 1, true), -1, 1),
        ((true, 1, false), (false, 2, true), -1, 2),
        ((true, 3, false), (false, 2, true), 1, 2),
        ((true, 1, false), (false, 3, true), 1, 3),
        ((true, 2, false), (false, 3, true), 1, 3),
    ];
    for (k, (x, y, sign, c)) in printed.iter().enumerate() {
        for d in Direction::BOTH {
            let at = |t: bool| if t { d.other() } else { d };
            push(k + 1, key(x.0, at(x.2), x.1), key(y.0, at(y.2), y.1), *sign, Some(key(false, at(y.2), *c)))?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// `H = Σ h_v + Σ h_f`.
    SquareInter,
    /// `H_int = Σ h_v + Σ h_f + Σ h_<f,f'>`.
    SquareTotal,
    /// `H' = Σ h'_v + Σ h'_f`.
    Hex,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::SquareInter => "square-inter",
            Model::SquareTotal => "square-total",
            Model::Hex => "hex",
        }
    }

    pub fn lattice(self) -> LatticeKind {
        match self {
            Model::SquareInter | Model::SquareTotal => LatticeKind::SquareTorus,
            Model::Hex => LatticeKind::HexTorus,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A model bound to a geometry of the matching kind.
#[derive(Debug, Clone, Copy)]
pub struct ModelSpec<'g> {
    model: Model,
    geom: &'g LatticeGeometry,
}

impl<'g> ModelSpec<'g> {
    pub fn new(model: Model, geom: &'g LatticeGeometry) -> Result<Self> {
        if model.lattice() != geom.kind() {
            return Err(LoopError::GeometryMismatch(format!(
                "model {model} needs a {} lattice, got {}",
                model.lattice().name(),
                geom.kind().name()
            )));
        }
        Ok(Self { model, geom })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn geometry(&self) -> &'g LatticeGeometry {
        self.geom
    }

    /// Vertex terms, one per vertex.
    pub fn vertex_terms(&self) -> Result<Vec<LocalOperator>> {
        (0..self.geom.num_vertices()).map(|v| vertex_term(self.geom, v)).collect()
    }

    /// Plaquette terms, followed by double-plaquette terms for the total model.
    pub fn face_terms(&self) -> Result<Vec<LocalOperator>> {
        let mut terms: Vec<LocalOperator> =
            (0..self.geom.num_faces()).map(|f| plaquette_term(self.geom, f)).collect::<Result<_>>()?;
        if self.model == Model::SquareTotal {
            for p in self.geom.face_pairs() {
                terms.push(double_plaquette_term(self.geom, p.faces)?);
            }
        }
        Ok(terms)
    }

    pub fn all_terms(&self) -> Result<Vec<LocalOperator>> {
        let mut t = self.vertex_terms()?;
        t.extend(self.face_terms()?);
        Ok(t)
    }
}

fn check_basis(geom: &LatticeGeometry, basis: &Basis) -> Result<()> {
    if basis.num_edges() != geom.num_edges() {
        return Err(LoopError::BasisMismatch(format!(
            "basis over {} edges, geometry has {}",
            basis.num_edges(),
            geom.num_edges()
        )));
    }
    Ok(())
}

/// Sum of every local term of `spec` over `basis`. The basis must be closed
/// under the Hamiltonian (the full space or a union of defect sectors).
pub fn assemble_hamiltonian(spec: &ModelSpec<'_>, basis: Arc<Basis>) -> Result<SparseOperator> {
    check_basis(spec.geom, &basis)?;
    embed_sum(&spec.all_terms()?, basis, true)
}

/// `(H_v, H_f)`: the vertex part and the face part (plaquettes plus any
/// double plaquettes) of the model.
pub fn hamiltonian_parts(spec: &ModelSpec<'_>, basis: Arc<Basis>) -> Result<(SparseOperator, SparseOperator)> {
    check_basis(spec.geom, &basis)?;
    Ok((embed_sum(&spec.vertex_terms()?, basis.clone(), true)?, embed_sum(&spec.face_terms()?, basis, true)?))
}

/// Default dimension limit for dense diagonalisation.
pub const DENSE_THRESHOLD: usize = 4096;

/// Eigenvalue multiset of a small operator.
pub fn local_spectrum(op: &SparseOperator, threshold: usize) -> Result<Vec<Level>> {
    if op.dim() > threshold {
        return Err(LoopError::DimensionTooLarge { dim: op.dim(), threshold });
    }
    if !op.is_symmetric() {
        return Err(LoopError::InvalidArgument("operator is not symmetric".into()));
    }
    let (values, _) = sorted_symmetric_eigen(op.to_dense());
    Ok(group_levels(&values, LEVEL_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hex_torus, build_square_torus, EdgeConfig};

    fn value_on(op: &LocalOperator, states: &[EdgeState]) -> i64 {
        let cfg = EdgeConfig::from_states(states.to_vec());
        let pow3 = powers_of_three(states.len());
        let p = cfg.pack();
        op.apply(p, &pow3).filter(|(q, _)| *q == p).map(|(_, v)| v).sum()
    }

    #[test]
    fn onsite_matrices() {
        let f = onsite_family();
        assert_eq!(f.z(1), [[1, 0, 0], [0, -1, 0], [0, 0, 0]]);
        assert_eq!(mat3_mul(&f.x(1), &f.x(1)), [[1, 0, 0], [0, 1, 0], [0, 0, 0]]);
        assert!(f.x(3).iter().all(|row| row[0] == 0));
    }

    #[test]
    fn square_vertex_values() {
        use EdgeState::*;
        let g = build_square_torus(3).unwrap();
        let h = vertex_term(&g, 4).unwrap();
        let support = h.support().to_vec();
        let mut states = vec![Empty; g.num_edges()];
        let mut at = |pattern: [EdgeState; 4]| {
            for (k, &e) in support.iter().enumerate() {
                states[e] = pattern[k];
            }
            value_on(&h, &states)
        };
        assert_eq!(at([Empty; 4]), -1);
        assert_eq!(at([Red, Blue, Empty, Empty]), 0);
        assert_eq!(at([Red, Empty, Empty, Empty]), 1);
    }

    #[test]
    fn local_spectra() {
        let g = build_square_torus(3).unwrap();
        let hv = local_spectrum(&vertex_term(&g, 0).unwrap().to_sparse(), 100).unwrap();
        assert_eq!(hv.iter().map(|l| l.value.round() as i64).collect::<Vec<_>>(), vec![-1, 0, 1]);
        let hf = local_spectrum(&plaquette_term(&g, 0).unwrap().to_sparse(), 100).unwrap();
        assert!((hf[0].value + 3.0).abs() < 1e-9);
        let pair = g.face_pairs()[0].faces;
        let hp = local_spectrum(&double_plaquette_term(&g, pair).unwrap().to_sparse(), 1000).unwrap();
        assert!((hp[0].value + 3.0).abs() < 1e-9);
        let hx = build_hex_torus(2, 2).unwrap();
        let hv = local_spectrum(&vertex_term(&hx, 0).unwrap().to_sparse(), 100).unwrap();
        assert_eq!(hv.iter().map(|l| l.value.round() as i64).collect::<Vec<_>>(), vec![-1, 0, 1, 2]);
    }

    #[test]
    fn threshold_enforced() {
        let g = build_square_torus(3).unwrap();
        let op = plaquette_term(&g, 0).unwrap().to_sparse();
        assert!(matches!(local_spectrum(&op, 10), Err(LoopError::DimensionTooLarge { dim: 81, .. })));
    }

    #[test]
    fn model_kind_checked() {
        let g = build_hex_torus(2, 2).unwrap();
        assert!(ModelSpec::new(Model::SquareTotal, &g).is_err());
        assert!(wilson_operator(&g, Direction::X, 1, false).is_err());
        assert!(face_flip(&g, 0, 3).is_err());
    }
}
