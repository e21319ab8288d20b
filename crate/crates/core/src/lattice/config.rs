use serde::{Deserialize, Serialize};
use std::fmt;

use super::{Direction, LatticeGeometry, LatticeKind};
use crate::error::{LoopError, Result};

/// Base-3 packed configuration index: `Σ_e state(e) · 3^e`.
pub type PackedConfig = u64;

/// Local state of one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum EdgeState {
    Empty = 0,
    Red = 1,
    Blue = 2,
}

impl EdgeState {
    pub const ALL: [EdgeState; 3] = [EdgeState::Empty, EdgeState::Red, EdgeState::Blue];

    pub fn from_index(k: u8) -> Option<EdgeState> {
        match k {
            0 => Some(EdgeState::Empty),
            1 => Some(EdgeState::Red),
            2 => Some(EdgeState::Blue),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> char {
        match self {
            EdgeState::Empty => 'φ',
            EdgeState::Red => 'r',
            EdgeState::Blue => 'b',
        }
    }

    /// Parity bits contributed at an endpoint: bit 0 red, bit 1 blue.
    pub(crate) fn parity_bits(self) -> u8 {
        match self {
            EdgeState::Empty => 0,
            EdgeState::Red => 1,
            EdgeState::Blue => 2,
        }
    }
}

/// One classical configuration: a state per edge in canonical edge order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeConfig {
    states: Vec<EdgeState>,
}

impl EdgeConfig {
    pub fn empty(num_edges: usize) -> Self {
        Self { states: vec![EdgeState::Empty; num_edges] }
    }

    pub fn from_states(states: Vec<EdgeState>) -> Self {
        Self { states }
    }

    /// Places `color` on every listed edge of an otherwise empty configuration.
    pub fn with_edges(num_edges: usize, color: EdgeState, edges: &[usize]) -> Self {
        let mut c = Self::empty(num_edges);
        for &e in edges {
            c.states[e] = color;
        }
        c
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, e: usize) -> EdgeState {
        self.states[e]
    }

    pub fn set(&mut self, e: usize, s: EdgeState) {
        self.states[e] = s;
    }

    pub fn states(&self) -> &[EdgeState] {
        &self.states
    }

    /// Packs into a base-3 integer. Callers guarantee at most 40 edges.
    pub fn pack(&self) -> PackedConfig {
        debug_assert!(self.states.len() <= super::MAX_PACKED_EDGES);
        self.states.iter().rev().fold(0u64, |acc, s| acc * 3 + s.index() as u64)
    }

    pub fn unpack(mut packed: PackedConfig, num_edges: usize) -> Self {
        let mut states = Vec::with_capacity(num_edges);
        for _ in 0..num_edges {
            states.push(EdgeState::from_index((packed % 3) as u8).expect("digit < 3"));
            packed /= 3;
        }
        Self { states }
    }

    /// Per-vertex color-degree parities.
    pub fn defect_pattern(&self, geom: &LatticeGeometry) -> Result<DefectPattern> {
        geom.check_config(self)?;
        let mut bits = vec![0u8; geom.num_vertices()];
        for (e, s) in self.states.iter().enumerate() {
            let p = s.parity_bits();
            if p != 0 {
                for &v in &geom.edge(e).endpoints {
                    bits[v] ^= p;
                }
            }
        }
        Ok(DefectPattern { bits })
    }

    pub fn is_closed(&self, geom: &LatticeGeometry) -> Result<bool> {
        Ok(self.defect_pattern(geom)?.is_closed())
    }

    /// Topological label of a closed configuration.
    pub fn winding_label(&self, geom: &LatticeGeometry) -> Result<WindingLabel> {
        if !self.is_closed(geom)? {
            return Err(LoopError::HasDefects);
        }
        Ok(self.crossing_label(geom))
    }

    /// Label read off the dual cuts without checking closure.
    pub(crate) fn crossing_label(&self, geom: &LatticeGeometry) -> WindingLabel {
        // Loops winding along `d` cross the dual cycle that runs along the other direction.
        let crossings = |d: Direction| -> Vec<EdgeState> {
            geom.cut(d.other()).dual.iter().map(|&e| self.states[e]).collect()
        };
        match geom.kind() {
            LatticeKind::SquareTorus => {
                let parity = |d: Direction| {
                    let seq = crossings(d);
                    ColorParity {
                        red: seq.iter().filter(|s| **s == EdgeState::Red).count() % 2 == 1,
                        blue: seq.iter().filter(|s| **s == EdgeState::Blue).count() % 2 == 1,
                    }
                };
                WindingLabel::Square { x: parity(Direction::X), y: parity(Direction::Y) }
            }
            LatticeKind::HexTorus => WindingLabel::Hex {
                x: reduce_cyclic_word(&crossings(Direction::X)),
                y: reduce_cyclic_word(&crossings(Direction::Y)),
            },
        }
    }

    pub fn to_string_compact(&self) -> String {
        self.states.iter().map(|s| s.symbol()).collect()
    }
}

/// Drops empty letters, cancels adjacent equal letters (cyclically) and
/// returns the lexicographically smallest rotation.
pub(crate) fn reduce_cyclic_word(seq: &[EdgeState]) -> Vec<EdgeState> {
    let mut stack: Vec<EdgeState> = Vec::new();
    for &s in seq.iter().filter(|s| **s != EdgeState::Empty) {
        if stack.last() == Some(&s) {
            stack.pop();
        } else {
            stack.push(s);
        }
    }
    while stack.len() >= 2 && stack.first() == stack.last() {
        stack.pop();
        stack.remove(0);
    }
    (0..stack.len())
        .map(|r| {
            let mut w = stack[r..].to_vec();
            w.extend_from_slice(&stack[..r]);
            w
        })
        .min()
        .unwrap_or_default()
}

/// Per-vertex `(red parity, blue parity)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DefectPattern {
    bits: Vec<u8>,
}

impl DefectPattern {
    pub fn closed(num_vertices: usize) -> Self {
        Self { bits: vec![0; num_vertices] }
    }

    /// Pattern with the given `(vertex, color)` parity flips applied to the closed pattern.
    pub fn with_defects(num_vertices: usize, defects: &[(usize, EdgeState)]) -> Result<Self> {
        let mut bits = vec![0u8; num_vertices];
        for &(v, color) in defects {
            if v >= num_vertices {
                return Err(LoopError::InvalidVertex(v));
            }
            bits[v] ^= color.parity_bits();
        }
        Ok(Self { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn red_parity(&self, v: usize) -> bool {
        self.bits[v] & 1 == 1
    }

    pub fn blue_parity(&self, v: usize) -> bool {
        self.bits[v] & 2 == 2
    }

    pub fn is_closed(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// A pattern is realisable only if each color has an even number of odd vertices.
    pub fn is_balanced(&self) -> bool {
        let red = self.bits.iter().filter(|b| *b & 1 == 1).count();
        let blue = self.bits.iter().filter(|b| *b & 2 == 2).count();
        red % 2 == 0 && blue % 2 == 0
    }

    pub(crate) fn bits(&self) -> &[u8] {
        &self.bits
    }
}

/// Parities of red and blue crossings of a dual cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct ColorParity {
    pub red: bool,
    pub blue: bool,
}

impl ColorParity {
    pub const ALL: [ColorParity; 4] = [
        ColorParity { red: false, blue: false },
        ColorParity { red: true, blue: false },
        ColorParity { red: false, blue: true },
        ColorParity { red: true, blue: true },
    ];
}

impl fmt::Display for ColorParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.red, self.blue) {
            (false, false) => write!(f, "∅"),
            (true, false) => write!(f, "r"),
            (false, true) => write!(f, "b"),
            (true, true) => write!(f, "rb"),
        }
    }
}

/// Topological sector of a closed configuration. `x` describes loops
/// winding along x, `y` loops winding along y.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WindingLabel {
    Square { x: ColorParity, y: ColorParity },
    /// Reduced cyclic color word of winding loops crossing each dual cut.
    Hex { x: Vec<EdgeState>, y: Vec<EdgeState> },
}

impl fmt::Display for WindingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = |w: &[EdgeState]| -> String {
            if w.is_empty() {
                "∅".to_string()
            } else {
                w.iter().map(|s| s.symbol()).collect()
            }
        };
        match self {
            WindingLabel::Square { x, y } => write!(f, "({x}_x, {y}_y)"),
            WindingLabel::Hex { x, y } => write!(f, "({}_x, {}_y)", word(x), word(y)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hex_torus, build_square_torus};
    use EdgeState::*;

    #[test]
    fn pack_round_trip_small() {
        let c = EdgeConfig::from_states(vec![Red, Empty, Blue, Blue]);
        assert_eq!(c.pack(), 1 + 2 * 9 + 2 * 27);
        assert_eq!(EdgeConfig::unpack(c.pack(), 4), c);
    }

    #[test]
    fn defect_examples() {
        let g = build_square_torus(3).unwrap();
        let empty = EdgeConfig::empty(g.num_edges());
        assert!(empty.defect_pattern(&g).unwrap().is_closed());

        let single = EdgeConfig::with_edges(g.num_edges(), Red, &[0]);
        let p = single.defect_pattern(&g).unwrap();
        let [a, b] = g.edge(0).endpoints;
        for v in 0..g.num_vertices() {
            assert_eq!(p.red_parity(v), v == a || v == b);
            assert!(!p.blue_parity(v));
        }

        let face = EdgeConfig::with_edges(g.num_edges(), Red, g.face_edges(4).unwrap());
        assert!(face.defect_pattern(&g).unwrap().is_closed());

        let wrong = EdgeConfig::empty(5);
        assert!(matches!(wrong.defect_pattern(&g), Err(LoopError::GeometryMismatch(_))));
    }

    #[test]
    fn square_labels() {
        let g = build_square_torus(4).unwrap();
        let n = g.num_edges();
        let empty = EdgeConfig::empty(n);
        let none = ColorParity::default();
        assert_eq!(empty.winding_label(&g).unwrap(), WindingLabel::Square { x: none, y: none });

        // vertical edges v(i, 1) form a loop winding along y
        let column: Vec<usize> = (0..4).map(|i| 2 * (i * 4 + 1) + 1).collect();
        let red_col = EdgeConfig::with_edges(n, Red, &column);
        let r = ColorParity { red: true, blue: false };
        assert_eq!(red_col.winding_label(&g).unwrap(), WindingLabel::Square { x: none, y: r });

        let mut two = red_col.clone();
        for i in 0..4 {
            two.set(2 * (i * 4 + 2) + 1, Red);
        }
        assert_eq!(two.winding_label(&g).unwrap(), WindingLabel::Square { x: none, y: none });

        let open = EdgeConfig::with_edges(n, Blue, &[3]);
        assert_eq!(open.winding_label(&g), Err(LoopError::HasDefects));
    }

    #[test]
    fn cyclic_word_reduction() {
        assert_eq!(reduce_cyclic_word(&[Red, Red]), vec![]);
        assert_eq!(reduce_cyclic_word(&[Red, Blue, Blue, Red]), vec![]);
        assert_eq!(reduce_cyclic_word(&[Blue, Empty, Red]), vec![Red, Blue]);
        assert_eq!(reduce_cyclic_word(&[Red, Blue, Red]), vec![Blue]);
        assert_eq!(reduce_cyclic_word(&[Red, Blue, Red, Blue]), vec![Red, Blue, Red, Blue]);
    }

    #[test]
    fn hex_row_loop_label() {
        let g = build_hex_torus(3, 3).unwrap();
        let row = g.cut(Direction::X).cycle.clone();
        let c = EdgeConfig::with_edges(g.num_edges(), Blue, &row);
        assert!(c.is_closed(&g).unwrap());
        assert_eq!(c.winding_label(&g).unwrap(), WindingLabel::Hex { x: vec![Blue], y: vec![] });
    }
}
