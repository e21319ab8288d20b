//! Torus geometries, edge configurations and topological labels.
//!
//! Two lattices are supported: the `L × L` square torus (coordination 4)
//! and the honeycomb torus with `Lx × Ly` unit cells (coordination 3).
//!
//! # Canonical edge order
//!
//! Square torus, vertex `(i, j)` at row `i`, column `j`, id `i·L + j`:
//! - horizontal edge `h(i, j) = 2(i·L + j)` joins `(i, j)` and `(i, j+1)`;
//! - vertical edge `v(i, j) = 2(i·L + j) + 1` joins `(i, j)` and `(i+1, j)`.
//!
//! Face `(i, j)` has `(i, j)` as its lower-left corner and boundary
//! `[h(i,j), v(i,j+1), h(i+1,j), v(i,j)]`.
//!
//! Honeycomb torus, unit cell `(i, j)` with id `c = j·Lx + i` holds the
//! vertices `A = 2c` and `B = 2c + 1` and three edges:
//! - `3c`: `A(i,j) – B(i,j)`;
//! - `3c + 1`: `B(i,j) – A(i+1,j)`;
//! - `3c + 2`: `B(i,j) – A(i,j+1)`.
//!
//! Drawn as a brick wall, row `j` is the zig-zag ring `A(0,j) B(0,j) A(1,j) …`
//! and the third edge is the vertical rung between rows. The identification
//! in the row direction is sheared by `Ly` half-bricks, which keeps every
//! coordinate an integer for any `Ly`.

mod config;
mod enumerate;

pub use config::{ColorParity, DefectPattern, EdgeConfig, EdgeState, PackedConfig, WindingLabel};
pub use enumerate::{
    collect_closed_loop_configs, collect_sector_configs, enumerate_closed_loop_configs,
    enumerate_sector_configs, estimated_sector_size, SectorEnumerator,
};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

use crate::error::{LoopError, Result};

/// Largest edge count whose base-3 packing fits in a `u64`.
pub const MAX_PACKED_EDGES: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    SquareTorus,
    HexTorus,
}

impl LatticeKind {
    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::SquareTorus => "square-torus",
            LatticeKind::HexTorus => "hex-torus",
        }
    }
}

/// A torus direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::X, Direction::Y];

    pub fn other(self) -> Direction {
        match self {
            Direction::X => Direction::Y,
            Direction::Y => Direction::X,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Direction::X => 0,
            Direction::Y => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub endpoints: [usize; 2],
    pub faces: [usize; 2],
}

/// Two neighbouring faces and the edges of their symmetric difference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacePair {
    pub faces: (usize, usize),
    pub direction: Direction,
    /// `(f ∪ f') \ (f ∩ f')`, ascending.
    pub support: Vec<usize>,
}

/// A non-contractible cycle running along `direction`, together with the
/// edges crossed by a dual cycle running along the same direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusCut {
    pub direction: Direction,
    /// Lattice edges of the cycle, in traversal order.
    pub cycle: Vec<usize>,
    /// Edges crossed by the dual cycle, in crossing order.
    pub dual: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    kind: LatticeKind,
    dims: (usize, usize),
    edges: Vec<Edge>,
    vertex_edges: Vec<Vec<usize>>,
    face_edges: Vec<Vec<usize>>,
    face_pairs: Vec<FacePair>,
    cuts: [TorusCut; 2],
    shared_edge_degeneracy: bool,
}

/// Builds the `L × L` square torus.
pub fn build_square_torus(l: usize) -> Result<LatticeGeometry> {
    if l < 2 {
        return Err(LoopError::InvalidSize(format!("square torus needs L >= 2, got {l}")));
    }
    let vid = |i: usize, j: usize| (i % l) * l + (j % l);
    let h = |i: usize, j: usize| 2 * vid(i, j);
    let v = |i: usize, j: usize| 2 * vid(i, j) + 1;
    let up = |i: usize| (i + l - 1) % l;

    let n = l * l;
    let mut edges = Vec::with_capacity(2 * n);
    for i in 0..l {
        for j in 0..l {
            edges.push(Edge { endpoints: [vid(i, j), vid(i, j + 1)], faces: [vid(i, j), vid(up(i), j)] });
            edges.push(Edge { endpoints: [vid(i, j), vid(i + 1, j)], faces: [vid(i, j), vid(i, up(j))] });
        }
    }

    let mut vertex_edges = Vec::with_capacity(n);
    let mut face_edges = Vec::with_capacity(n);
    for i in 0..l {
        for j in 0..l {
            vertex_edges.push(vec![h(i, j), v(i, j), h(i, up(j)), v(up(i), j)]);
            face_edges.push(vec![h(i, j), v(i, j + 1), h(i + 1, j), v(i, j)]);
        }
    }

    // One pair per face and direction, so duplicates appear at L = 2.
    let mut face_pairs = Vec::with_capacity(2 * n);
    for i in 0..l {
        for j in 0..l {
            let f = vid(i, j);
            for (g, direction) in [(vid(i, j + 1), Direction::X), (vid(i + 1, j), Direction::Y)] {
                face_pairs.push(FacePair {
                    faces: (f, g),
                    direction,
                    support: symmetric_difference(&face_edges[f], &face_edges[g]),
                });
            }
        }
    }

    let cuts = [
        TorusCut {
            direction: Direction::X,
            cycle: (0..l).map(|j| h(0, j)).collect(),
            dual: (0..l).map(|j| v(0, j)).collect(),
        },
        TorusCut {
            direction: Direction::Y,
            cycle: (0..l).map(|i| v(i, 0)).collect(),
            dual: (0..l).map(|i| h(i, 0)).collect(),
        },
    ];

    Ok(LatticeGeometry {
        kind: LatticeKind::SquareTorus,
        dims: (l, l),
        edges,
        vertex_edges,
        face_edges,
        face_pairs,
        cuts,
        shared_edge_degeneracy: l == 2,
    })
}

/// Builds the honeycomb torus with `lx × ly` unit cells.
pub fn build_hex_torus(lx: usize, ly: usize) -> Result<LatticeGeometry> {
    if lx < 2 || ly < 2 {
        return Err(LoopError::InvalidSize(format!("hex torus needs Lx, Ly >= 2, got ({lx}, {ly})")));
    }
    let cell = |i: usize, j: usize| (j % ly) * lx + (i % lx);
    let a = |i: usize, j: usize| 2 * cell(i, j);
    let b = |i: usize, j: usize| 2 * cell(i, j) + 1;
    let e = |i: usize, j: usize, t: usize| 3 * cell(i, j) + t;
    let left = |i: usize| (i + lx - 1) % lx;
    let down = |j: usize| (j + ly - 1) % ly;

    let n = lx * ly;
    let mut edges = Vec::with_capacity(3 * n);
    for j in 0..ly {
        for i in 0..lx {
            edges.push(Edge { endpoints: [a(i, j), b(i, j)], faces: [cell(left(i), j), cell(i, down(j))] });
            edges.push(Edge { endpoints: [b(i, j), a(i + 1, j)], faces: [cell(i, j), cell(i, down(j))] });
            edges.push(Edge { endpoints: [b(i, j), a(i, j + 1)], faces: [cell(i, j), cell(left(i), j)] });
        }
    }

    let mut vertex_edges = vec![Vec::new(); 2 * n];
    let mut face_edges = Vec::with_capacity(n);
    for j in 0..ly {
        for i in 0..lx {
            vertex_edges[a(i, j)] = vec![e(i, j, 0), e(left(i), j, 1), e(i, down(j), 2)];
            vertex_edges[b(i, j)] = vec![e(i, j, 0), e(i, j, 1), e(i, j, 2)];
            face_edges.push(vec![
                e(i, j, 1),
                e(i + 1, j, 0),
                e(i + 1, j, 2),
                e(i, j + 1, 1),
                e(i, j + 1, 0),
                e(i, j, 2),
            ]);
        }
    }

    let cuts = [
        TorusCut {
            direction: Direction::X,
            cycle: (0..lx).flat_map(|i| [e(i, 0, 0), e(i, 0, 1)]).collect(),
            dual: (0..lx).map(|i| e(i, 0, 2)).collect(),
        },
        TorusCut {
            direction: Direction::Y,
            cycle: (0..ly).flat_map(|j| [e(0, j, 0), e(0, j, 2)]).collect(),
            dual: (0..ly).map(|j| e(0, j, 1)).collect(),
        },
    ];

    Ok(LatticeGeometry {
        kind: LatticeKind::HexTorus,
        dims: (lx, ly),
        edges,
        vertex_edges,
        face_edges,
        face_pairs: Vec::new(),
        cuts,
        shared_edge_degeneracy: false,
    })
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a
        .iter()
        .filter(|e| !b.contains(e))
        .chain(b.iter().filter(|e| !a.contains(e)))
        .copied()
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

impl LatticeGeometry {
    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    /// `(L, L)` for the square torus, `(Lx, Ly)` unit cells for the honeycomb.
    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.face_edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Incident edges of `v`. Square order is east, north, west, south.
    pub fn vertex_edges(&self, v: usize) -> Result<&[usize]> {
        self.vertex_edges.get(v).map(Vec::as_slice).ok_or(LoopError::InvalidVertex(v))
    }

    /// Boundary edges of `f` in cyclic order.
    pub fn face_edges(&self, f: usize) -> Result<&[usize]> {
        self.face_edges.get(f).map(Vec::as_slice).ok_or(LoopError::InvalidFace(f))
    }

    /// Face pairs carrying double-plaquette terms: for the square torus one
    /// `(f, f + x̂)` and one `(f, f + ŷ)` pair per face. Empty for the honeycomb.
    pub fn face_pairs(&self) -> &[FacePair] {
        &self.face_pairs
    }

    /// Looks up the pair `(f, g)` in either order.
    pub fn find_face_pair(&self, f: usize, g: usize) -> Result<&FacePair> {
        self.face_pairs
            .iter()
            .find(|p| p.faces == (f, g) || p.faces == (g, f))
            .ok_or(LoopError::NotAdjacent(f, g))
    }

    pub fn cut(&self, direction: Direction) -> &TorusCut {
        &self.cuts[direction.index()]
    }

    /// Edges of the straight non-contractible loop along `direction`,
    /// translated by `offset` rows (for x) or columns (for y). Offset 0 is
    /// the stored cut cycle.
    pub fn straight_cycle(&self, direction: Direction, offset: usize) -> Vec<usize> {
        let (lx, ly) = self.dims;
        match (self.kind, direction) {
            (LatticeKind::SquareTorus, Direction::X) => {
                let i = offset % lx;
                (0..lx).map(|j| 2 * (i * lx + j)).collect()
            }
            (LatticeKind::SquareTorus, Direction::Y) => {
                let j = offset % lx;
                (0..lx).map(|i| 2 * (i * lx + j) + 1).collect()
            }
            (LatticeKind::HexTorus, Direction::X) => {
                let j = offset % ly;
                (0..lx).flat_map(|i| [3 * (j * lx + i), 3 * (j * lx + i) + 1]).collect()
            }
            (LatticeKind::HexTorus, Direction::Y) => {
                let i = offset % lx;
                (0..ly).flat_map(|j| [3 * (j * lx + i), 3 * (j * lx + i) + 2]).collect()
            }
        }
    }

    /// Number of parallel straight loops available along `direction`.
    pub fn straight_cycle_count(&self, direction: Direction) -> usize {
        match (self.kind, direction) {
            (LatticeKind::SquareTorus, _) => self.dims.0,
            (LatticeKind::HexTorus, Direction::X) => self.dims.1,
            (LatticeKind::HexTorus, Direction::Y) => self.dims.0,
        }
    }

    /// True at `L = 2`, where neighbouring faces share two edges and the
    /// double-plaquette support shrinks from six edges to four.
    pub fn has_shared_edge_degeneracy(&self) -> bool {
        self.shared_edge_degeneracy
    }

    /// Maximum vertex degree: 4 (square) or 3 (honeycomb).
    pub fn coordination(&self) -> usize {
        match self.kind {
            LatticeKind::SquareTorus => 4,
            LatticeKind::HexTorus => 3,
        }
    }

    pub fn describe(&self) -> String {
        format!("{}({}x{})", self.kind.name(), self.dims.0, self.dims.1)
    }

    /// Deterministic text description used for cross-implementation diffing.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# bicolor-loops geometry");
        let _ = writeln!(out, "kind {}", self.kind.name());
        let _ = writeln!(out, "dims {} {}", self.dims.0, self.dims.1);
        let _ = writeln!(
            out,
            "counts edges {} vertices {} faces {}",
            self.num_edges(),
            self.num_vertices(),
            self.num_faces()
        );
        for (k, edge) in self.edges.iter().enumerate() {
            let _ = writeln!(
                out,
                "edge {k} vertices {} {} faces {} {}",
                edge.endpoints[0], edge.endpoints[1], edge.faces[0], edge.faces[1]
            );
        }
        for (f, es) in self.face_edges.iter().enumerate() {
            let _ = writeln!(out, "face {f} edges {}", join(es));
        }
        for cut in &self.cuts {
            let _ = writeln!(out, "cycle {:?} edges {}", cut.direction, join(&cut.cycle));
            let _ = writeln!(out, "dual {:?} edges {}", cut.direction, join(&cut.dual));
        }
        out
    }

    /// First 16 hex digits of the SHA-256 of [`export_text`](Self::export_text).
    pub fn hash_hex(&self) -> String {
        let digest = Sha256::digest(self.export_text().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Planar drawing coordinates of a vertex (unit edge length, before
    /// periodic wrapping). The honeycomb uses brick-wall coordinates.
    pub fn vertex_position(&self, v: usize) -> (f64, f64) {
        match self.kind {
            LatticeKind::SquareTorus => {
                let l = self.dims.0;
                ((v % l) as f64, (v / l) as f64)
            }
            LatticeKind::HexTorus => {
                let lx = self.dims.0;
                let c = v / 2;
                let (i, j) = (c % lx, c / lx);
                let x = (2 * i + j + (v % 2)) % (2 * lx);
                (x as f64, j as f64)
            }
        }
    }

    pub(crate) fn check_config(&self, config: &EdgeConfig) -> Result<()> {
        if config.len() != self.num_edges() {
            return Err(LoopError::GeometryMismatch(format!(
                "configuration has {} edges, geometry {} has {}",
                config.len(),
                self.describe(),
                self.num_edges()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_packable(&self) -> Result<()> {
        if self.num_edges() > MAX_PACKED_EDGES {
            return Err(LoopError::Unsupported(format!(
                "{} edges exceed the packed-index limit of {MAX_PACKED_EDGES}",
                self.num_edges()
            )));
        }
        Ok(())
    }
}

fn join(items: &[usize]) -> String {
    items.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_incidence(g: &LatticeGeometry) {
        let mut face_count = vec![0usize; g.num_edges()];
        for f in 0..g.num_faces() {
            for &e in g.face_edges(f).unwrap() {
                face_count[e] += 1;
                assert!(g.edge(e).faces.contains(&f), "edge {e} does not list face {f}");
            }
        }
        assert!(face_count.iter().all(|&c| c == 2));
        let mut vertex_count = vec![0usize; g.num_edges()];
        for v in 0..g.num_vertices() {
            let es = g.vertex_edges(v).unwrap();
            assert_eq!(es.len(), g.coordination());
            for &e in es {
                vertex_count[e] += 1;
                assert!(g.edge(e).endpoints.contains(&v));
            }
        }
        assert!(vertex_count.iter().all(|&c| c == 2));
        for e in g.edges() {
            assert_ne!(e.endpoints[0], e.endpoints[1]);
            assert_ne!(e.faces[0], e.faces[1]);
        }
        // face boundaries are closed walks
        for f in 0..g.num_faces() {
            let mut deg = vec![0usize; g.num_vertices()];
            for &e in g.face_edges(f).unwrap() {
                for &v in &g.edge(e).endpoints {
                    deg[v] += 1;
                }
            }
            assert!(deg.iter().all(|d| d % 2 == 0));
        }
        for dir in Direction::BOTH {
            let cut = g.cut(dir);
            for f in 0..g.num_faces() {
                let crossings = g.face_edges(f).unwrap().iter().filter(|e| cut.dual.contains(e)).count();
                assert_eq!(crossings % 2, 0, "face {f} crosses dual {dir:?} oddly");
            }
            let mut deg = vec![0usize; g.num_vertices()];
            for &e in &cut.cycle {
                for &v in &g.edge(e).endpoints {
                    deg[v] += 1;
                }
            }
            assert!(deg.iter().all(|d| *d == 0 || *d == 2), "cycle {dir:?} is not a simple cycle");
        }
    }

    #[test]
    fn square_counts() {
        for l in 2..6 {
            let g = build_square_torus(l).unwrap();
            assert_eq!(g.num_edges(), 2 * l * l);
            assert_eq!(g.num_vertices(), l * l);
            assert_eq!(g.num_faces(), l * l);
            check_incidence(&g);
        }
        let g = build_square_torus(3).unwrap();
        assert_eq!((g.num_edges(), g.num_vertices(), g.num_faces()), (18, 9, 9));
    }

    #[test]
    fn square_face_pairs() {
        let g = build_square_torus(3).unwrap();
        assert_eq!(g.face_pairs().len(), 18);
        assert!(g.face_pairs().iter().all(|p| p.support.len() == 6));
        assert!(!g.has_shared_edge_degeneracy());

        let g = build_square_torus(2).unwrap();
        assert!(g.has_shared_edge_degeneracy());
        assert!(g.face_pairs().iter().all(|p| p.support.len() == 4));
    }

    #[test]
    fn hex_counts() {
        let g = build_hex_torus(2, 2).unwrap();
        assert_eq!((g.num_edges(), g.num_vertices(), g.num_faces()), (12, 8, 4));
        let g = build_hex_torus(2, 3).unwrap();
        assert_eq!((g.num_edges(), g.num_vertices(), g.num_faces()), (18, 12, 6));
        for (lx, ly) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 3)] {
            let g = build_hex_torus(lx, ly).unwrap();
            check_incidence(&g);
            assert!(g.face_edges.iter().all(|f| f.len() == 6));
        }
    }

    #[test]
    fn rejects_small_sizes() {
        assert!(matches!(build_square_torus(1), Err(LoopError::InvalidSize(_))));
        assert!(matches!(build_hex_torus(1, 3), Err(LoopError::InvalidSize(_))));
        assert!(matches!(build_hex_torus(3, 1), Err(LoopError::InvalidSize(_))));
    }

    #[test]
    fn export_is_deterministic() {
        let a = build_square_torus(3).unwrap();
        let b = build_square_torus(3).unwrap();
        assert_eq!(a.export_text(), b.export_text());
        assert_eq!(a.hash_hex(), b.hash_hex());
        assert_ne!(a.hash_hex(), build_hex_torus(3, 3).unwrap().hash_hex());
        assert!(a.export_text().contains("edge 0 vertices 0 1 faces 0 6"));
    }
}
