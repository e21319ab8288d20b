//! Kinetic moves of the off-diagonal terms and the move graph they generate
//! on closed loop configurations.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{LoopError, Result};
use crate::lattice::{
    collect_closed_loop_configs, Direction, EdgeConfig, EdgeState, LatticeGeometry, LatticeKind, PackedConfig,
    WindingLabel,
};
use crate::operators::powers_of_three;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    Plaquette { face: usize },
    DoublePlaquette { pair: (usize, usize) },
    HexPlaquette { face: usize },
}

/// One off-diagonal move: the basis-state action of `B_f^(a)`, `C^(a)` or `B'_f^(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub a: usize,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MoveKind::Plaquette { face } => write!(f, "B[{face}]^{}", self.a),
            MoveKind::DoublePlaquette { pair } => write!(f, "C[{},{}]^{}", pair.0, pair.1, self.a),
            MoveKind::HexPlaquette { face } => write!(f, "B'[{face}]^{}", self.a),
        }
    }
}

/// The pair of states exchanged by `X^(a)`.
fn swapped_pair(a: usize) -> (u8, u8) {
    match a {
        1 => (0, 1),
        2 => (0, 2),
        _ => (1, 2),
    }
}

fn move_support<'g>(geom: &'g LatticeGeometry, mv: &Move) -> Result<&'g [usize]> {
    let (ok_kind, max_a) = match mv.kind {
        MoveKind::Plaquette { .. } | MoveKind::DoublePlaquette { .. } => (LatticeKind::SquareTorus, 3),
        MoveKind::HexPlaquette { .. } => (LatticeKind::HexTorus, 2),
    };
    if geom.kind() != ok_kind {
        return Err(LoopError::GeometryMismatch(format!("move {mv} on a {} lattice", geom.kind().name())));
    }
    if !(1..=max_a).contains(&mv.a) {
        return Err(LoopError::InvalidArgument(format!("flavour {} out of range", mv.a)));
    }
    match mv.kind {
        MoveKind::Plaquette { face } | MoveKind::HexPlaquette { face } => geom.face_edges(face),
        MoveKind::DoublePlaquette { pair } => Ok(&geom.find_face_pair(pair.0, pair.1)?.support),
    }
}

/// Flips every edge of `support` under `X^(a)` on a packed configuration,
/// or returns `None` if some edge is annihilated.
pub(crate) fn flip_packed(support: &[usize], a: usize, packed: PackedConfig, pow3: &[u64]) -> Option<PackedConfig> {
    let (s, t) = swapped_pair(a);
    let mut out = packed;
    for &e in support {
        let d = ((packed / pow3[e]) % 3) as u8;
        if d == s {
            out = out - s as u64 * pow3[e] + t as u64 * pow3[e];
        } else if d == t {
            out = out - t as u64 * pow3[e] + s as u64 * pow3[e];
        } else {
            return None;
        }
    }
    Some(out)
}

/// Image of `config` under `mv`, or `None` when the move annihilates it.
pub fn apply_move(geom: &LatticeGeometry, config: &EdgeConfig, mv: &Move) -> Result<Option<EdgeConfig>> {
    geom.check_config(config)?;
    let support = move_support(geom, mv)?;
    let (s, t) = swapped_pair(mv.a);
    let mut out = config.clone();
    for &e in support {
        let k = config.get(e).index() as u8;
        let image = if k == s {
            t
        } else if k == t {
            s
        } else {
            return Ok(None);
        };
        out.set(e, EdgeState::from_index(image).expect("state < 3"));
    }
    Ok(Some(out))
}

/// Which families of kinetic terms drive the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveSet {
    /// Single plaquettes `B_f^(a)`.
    #[serde(rename = "B")]
    B,
    /// Double plaquettes `C^(a)` alone.
    #[serde(rename = "C")]
    C,
    /// Both families, the kinetic part of `H_int`.
    #[serde(rename = "B+C")]
    BC,
    /// Honeycomb plaquettes `B'_f^(a)`.
    #[serde(rename = "B'")]
    HexB,
}

impl MoveSet {
    pub fn name(self) -> &'static str {
        match self {
            MoveSet::B => "B",
            MoveSet::C => "C",
            MoveSet::BC => "B+C",
            MoveSet::HexB => "B'",
        }
    }

    pub fn parse(s: &str) -> Result<MoveSet> {
        match s {
            "B" | "b" => Ok(MoveSet::B),
            "C" | "c" => Ok(MoveSet::C),
            "B+C" | "B,C" | "C,B" | "BC" | "bc" | "b+c" | "b,c" => Ok(MoveSet::BC),
            "B'" | "hex" | "Bp" => Ok(MoveSet::HexB),
            other => Err(LoopError::InvalidArgument(format!("unknown move set {other:?}"))),
        }
    }

    /// Every move of this set on `geom`.
    pub fn moves(self, geom: &LatticeGeometry) -> Result<Vec<Move>> {
        let square = geom.kind() == LatticeKind::SquareTorus;
        if square == (self == MoveSet::HexB) {
            return Err(LoopError::GeometryMismatch(format!(
                "move set {} on a {} lattice",
                self.name(),
                geom.kind().name()
            )));
        }
        let mut out = Vec::new();
        if matches!(self, MoveSet::B | MoveSet::BC) {
            for face in 0..geom.num_faces() {
                out.extend((1..=3).map(|a| Move { kind: MoveKind::Plaquette { face }, a }));
            }
        }
        if matches!(self, MoveSet::C | MoveSet::BC) {
            for p in geom.face_pairs() {
                out.extend((1..=3).map(|a| Move { kind: MoveKind::DoublePlaquette { pair: p.faces }, a }));
            }
        }
        if self == MoveSet::HexB {
            for face in 0..geom.num_faces() {
                out.extend((1..=2).map(|a| Move { kind: MoveKind::HexPlaquette { face }, a }));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for MoveSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pre-resolved moves for fast neighbour generation on packed states.
pub(crate) struct MoveTable {
    moves: Vec<Move>,
    supports: Vec<Vec<usize>>,
    pow3: Vec<u64>,
}

impl MoveTable {
    pub(crate) fn new(geom: &LatticeGeometry, set: MoveSet) -> Result<Self> {
        let moves = set.moves(geom)?;
        let supports = moves.iter().map(|m| move_support(geom, m).map(<[usize]>::to_vec)).collect::<Result<_>>()?;
        Ok(Self { moves, supports, pow3: powers_of_three(geom.num_edges()) })
    }

    pub(crate) fn neighbours(&self, packed: PackedConfig) -> impl Iterator<Item = (usize, PackedConfig)> + '_ {
        self.supports
            .iter()
            .enumerate()
            .filter_map(move |(k, s)| flip_packed(s, self.moves[k].a, packed, &self.pow3).map(|q| (k, q)))
    }

    pub(crate) fn get(&self, k: usize) -> Move {
        self.moves[k]
    }
}

/// True when no move of the set acts on `config`.
pub fn is_frozen(geom: &LatticeGeometry, config: &EdgeConfig, set: MoveSet) -> Result<bool> {
    geom.check_config(config)?;
    let table = MoveTable::new(geom, set)?;
    let frozen = table.neighbours(config.pack()).next().is_none();
    Ok(frozen)
}

/// All closed configurations together with their Krylov component ids.
#[derive(Debug, Clone)]
pub struct KrylovPartition {
    pub configs: Vec<PackedConfig>,
    pub component_of: Vec<u32>,
    /// Component members as indices into `configs`, in BFS order.
    pub components: Vec<Vec<u32>>,
    pub frozen: Vec<bool>,
}

impl KrylovPartition {
    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    /// Packed configurations of one component, ascending.
    pub fn members(&self, c: usize) -> Vec<PackedConfig> {
        let mut m: Vec<_> = self.components[c].iter().map(|&i| self.configs[i as usize]).collect();
        m.sort_unstable();
        m
    }

    pub fn summary(&self, geom: &LatticeGeometry, set: MoveSet) -> MoveGraphSummary {
        let components: Vec<ComponentSummary> = self
            .components
            .iter()
            .map(|members| {
                let labels: BTreeSet<WindingLabel> = members
                    .iter()
                    .map(|&i| EdgeConfig::from_packed(geom, self.configs[i as usize]).crossing_label(geom))
                    .collect();
                let rep = members.iter().map(|&i| self.configs[i as usize]).min().expect("non-empty component");
                ComponentSummary {
                    size: members.len(),
                    label: labels.iter().map(ToString::to_string).collect::<Vec<_>>().join(" | "),
                    single_label: labels.len() == 1,
                    representative: rep,
                    representative_states: EdgeConfig::from_packed(geom, rep).to_string_compact(),
                    frozen: members.iter().filter(|&&i| self.frozen[i as usize]).count(),
                }
            })
            .collect();
        MoveGraphSummary {
            model: geom.kind().name().to_string(),
            dims: geom.dims(),
            move_set: set.name().to_string(),
            total_configs: self.configs.len(),
            frozen_count: self.frozen.iter().filter(|f| **f).count(),
            components,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub size: usize,
    pub label: String,
    pub single_label: bool,
    pub representative: PackedConfig,
    pub representative_states: String,
    pub frozen: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveGraphSummary {
    pub model: String,
    pub dims: (usize, usize),
    pub move_set: String,
    pub total_configs: usize,
    pub components: Vec<ComponentSummary>,
    pub frozen_count: usize,
}

impl MoveGraphSummary {
    pub fn distinct_labels(&self) -> BTreeSet<String> {
        self.components.iter().map(|c| c.label.clone()).collect()
    }
}

/// Connected components of the move graph on an explicit, ascending
/// configuration list. Moves leaving the list are ignored.
pub fn components_of(geom: &LatticeGeometry, configs: Vec<PackedConfig>, set: MoveSet) -> Result<KrylovPartition> {
    let table = MoveTable::new(geom, set)?;
    let n = configs.len();
    let mut component_of = vec![u32::MAX; n];
    let mut components = Vec::new();
    let mut frozen = vec![true; n];
    let mut queue = VecDeque::new();
    for start in 0..n {
        if component_of[start] != u32::MAX {
            continue;
        }
        let id = components.len() as u32;
        let mut members = vec![start as u32];
        component_of[start] = id;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            for (_, q) in table.neighbours(configs[i]) {
                frozen[i] = false;
                if let Ok(j) = configs.binary_search(&q) {
                    if component_of[j] == u32::MAX {
                        component_of[j] = id;
                        members.push(j as u32);
                        queue.push_back(j);
                    }
                }
            }
        }
        components.push(members);
    }
    Ok(KrylovPartition { configs, component_of, components, frozen })
}

/// Krylov components of every closed loop configuration under `set`.
pub fn krylov_components(geom: &LatticeGeometry, set: MoveSet, budget: u64) -> Result<KrylovPartition> {
    let configs = collect_closed_loop_configs(geom, budget)?;
    components_of(geom, configs, set)
}

/// A minimal configuration carrying `label`, built from straight
/// non-contractible loops.
pub fn sector_representative(label: &WindingLabel, geom: &LatticeGeometry) -> Result<EdgeConfig> {
    let mut cfg = EdgeConfig::empty(geom.num_edges());
    let mut paint = |dir: Direction, colors: &[EdgeState]| -> Result<()> {
        if colors.len() > geom.straight_cycle_count(dir) {
            return Err(LoopError::Unrealizable(label.to_string()));
        }
        for (offset, &c) in colors.iter().enumerate() {
            for e in geom.straight_cycle(dir, offset) {
                cfg.set(e, c);
            }
        }
        Ok(())
    };
    match (label, geom.kind()) {
        (WindingLabel::Square { x, y }, LatticeKind::SquareTorus) => {
            for (dir, parity) in [(Direction::X, x), (Direction::Y, y)] {
                let mut colors = Vec::new();
                if parity.red {
                    colors.push(EdgeState::Red);
                }
                if parity.blue {
                    colors.push(EdgeState::Blue);
                }
                paint(dir, &colors)?;
            }
        }
        (WindingLabel::Hex { x, y }, LatticeKind::HexTorus) => {
            if !x.is_empty() && !y.is_empty() {
                return Err(LoopError::Unrealizable(label.to_string()));
            }
            paint(Direction::X, x)?;
            paint(Direction::Y, y)?;
        }
        _ => return Err(LoopError::GeometryMismatch(format!("label {label} on a {} lattice", geom.kind().name()))),
    }
    if cfg.winding_label(geom)? != *label {
        return Err(LoopError::Unrealizable(label.to_string()));
    }
    Ok(cfg)
}

/// Shortest move sequence from `from` to `to` through closed configurations,
/// or `None` when `to` is unreachable.
pub fn find_move_path(
    geom: &LatticeGeometry,
    set: MoveSet,
    from: &EdgeConfig,
    to: &EdgeConfig,
    budget: u64,
) -> Result<Option<Vec<Move>>> {
    let configs = collect_closed_loop_configs(geom, budget)?;
    let index = |c: &EdgeConfig| -> Result<usize> {
        geom.check_config(c)?;
        configs.binary_search(&c.pack()).map_err(|_| LoopError::HasDefects)
    };
    let (s, t) = (index(from)?, index(to)?);
    let table = MoveTable::new(geom, set)?;
    let mut parent: Vec<Option<(u32, u32)>> = vec![None; configs.len()];
    let mut seen = vec![false; configs.len()];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(i) = queue.pop_front() {
        if i == t {
            break;
        }
        for (k, q) in table.neighbours(configs[i]) {
            let j = configs.binary_search(&q).expect("moves preserve closure");
            if !seen[j] {
                seen[j] = true;
                parent[j] = Some((i as u32, k as u32));
                queue.push_back(j);
            }
        }
    }
    if !seen[t] {
        return Ok(None);
    }
    let mut path = Vec::new();
    let mut cur = t;
    while let Some((p, k)) = parent[cur] {
        path.push(table.get(k as usize));
        cur = p as usize;
    }
    path.reverse();
    Ok(Some(path))
}

/// Outcome of the loop-exchange check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapCheck {
    pub reachable: bool,
    pub path_length: Option<usize>,
    pub start: String,
    pub target: String,
}

/// Tests whether a red loop at column 0 beside a blue loop at column 1 can
/// be exchanged for the opposite arrangement using `B` and `C` moves.
pub fn swap_sequence_check(geom: &LatticeGeometry, budget: u64) -> Result<SwapCheck> {
    if geom.kind() != LatticeKind::SquareTorus {
        return Err(LoopError::Unsupported("loop exchange is checked on the square torus".into()));
    }
    let two_columns = |first: EdgeState, second: EdgeState| {
        let mut c = EdgeConfig::empty(geom.num_edges());
        for e in geom.straight_cycle(Direction::Y, 0) {
            c.set(e, first);
        }
        for e in geom.straight_cycle(Direction::Y, 1) {
            c.set(e, second);
        }
        c
    };
    let start = two_columns(EdgeState::Red, EdgeState::Blue);
    let target = two_columns(EdgeState::Blue, EdgeState::Red);
    let path = find_move_path(geom, MoveSet::BC, &start, &target, budget)?;
    // Replay the path move by move as an independent confirmation.
    if let Some(p) = &path {
        let mut cur = start.clone();
        for mv in p {
            cur = apply_move(geom, &cur, mv)?.ok_or_else(|| LoopError::InvalidArgument(format!("{mv} annihilated")))?;
        }
        assert_eq!(cur, target, "replayed path must end at the target");
    }
    Ok(SwapCheck {
        reachable: path.is_some(),
        path_length: path.as_ref().map(Vec::len),
        start: start.to_string_compact(),
        target: target.to_string_compact(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hex_torus, build_square_torus, ColorParity};

    #[test]
    fn move_examples() {
        use EdgeState::*;
        let g = build_square_torus(3).unwrap();
        let face = g.face_edges(0).unwrap().to_vec();
        let mv = |a| Move { kind: MoveKind::Plaquette { face: 0 }, a };
        let empty = EdgeConfig::empty(g.num_edges());
        let red = apply_move(&g, &empty, &mv(1)).unwrap().unwrap();
        assert!(face.iter().all(|&e| red.get(e) == Red));
        let mut blue = empty.clone();
        blue.set(face[0], Blue);
        assert_eq!(apply_move(&g, &blue, &mv(1)).unwrap(), None);
        let mut rb = empty.clone();
        for (k, &e) in face.iter().enumerate() {
            rb.set(e, if k < 2 { Red } else { Blue });
        }
        let swapped = apply_move(&g, &rb, &mv(3)).unwrap().unwrap();
        assert_eq!(swapped.get(face[0]), Blue);
        assert_eq!(swapped.get(face[3]), Red);
        assert_eq!(apply_move(&g, &swapped, &mv(3)).unwrap().unwrap(), rb);
    }

    #[test]
    fn frozen_alternating_columns() {
        let g = build_square_torus(2).unwrap();
        let label = WindingLabel::Square { x: ColorParity::default(), y: ColorParity { red: true, blue: true } };
        let cfg = sector_representative(&label, &g).unwrap();
        assert!(is_frozen(&g, &cfg, MoveSet::B).unwrap());
        assert!(!is_frozen(&g, &cfg, MoveSet::BC).unwrap());
        assert!(!is_frozen(&g, &EdgeConfig::empty(8), MoveSet::B).unwrap());
    }

    #[test]
    fn square_l2_components() {
        let g = build_square_torus(2).unwrap();
        let b = krylov_components(&g, MoveSet::B, 1 << 20).unwrap();
        let bc = krylov_components(&g, MoveSet::BC, 1 << 20).unwrap();
        assert_eq!(b.configs.len(), 129);
        assert_eq!(b.num_components(), 46);
        assert_eq!(bc.num_components(), 16);
        let mut sizes = bc.sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![4, 4, 4, 4, 4, 4, 8, 8, 8, 10, 10, 10, 10, 10, 10, 21]);
        let summary = bc.summary(&g, MoveSet::BC);
        assert!(summary.components.iter().all(|c| c.single_label));
        assert_eq!(summary.distinct_labels().len(), 16);
    }

    #[test]
    fn hex_representatives() {
        let g = build_hex_torus(2, 3).unwrap();
        use EdgeState::*;
        let label = WindingLabel::Hex { x: vec![Red, Blue], y: vec![] };
        let cfg = sector_representative(&label, &g).unwrap();
        assert_eq!(cfg.winding_label(&g).unwrap(), label);
        let too_many = WindingLabel::Hex { x: vec![], y: vec![Red, Blue, Red, Blue] };
        assert!(matches!(sector_representative(&too_many, &g), Err(LoopError::Unrealizable(_))));
    }

    #[test]
    fn swap_l3() {
        let g = build_square_torus(3).unwrap();
        let check = swap_sequence_check(&g, 1 << 22).unwrap();
        assert!(check.reachable);
        assert!(check.path_length.unwrap() > 0);
    }
}
