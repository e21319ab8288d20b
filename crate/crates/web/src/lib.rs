//! Browser front end: an interactive loop configuration on a small torus,
//! its Krylov sectors, and exact boundary-count curves.

use bicolor_loops::counting::{
    count_blc, count_fpl_boundary, count_intersecting_boundary, count_transfer_boundary, entropy_bound, BoundModel,
    ColorWeight, CountResult,
};
use bicolor_loops::dynamics::{apply_move, krylov_components, KrylovPartition, Move, MoveKind, MoveSet};
use bicolor_loops::lattice::{build_hex_torus, build_square_torus, EdgeConfig, EdgeState, LatticeGeometry, LatticeKind};
use bicolor_loops::{LoopError, Result};
use serde::Serialize;
use std::fmt::Write;
use wasm_bindgen::prelude::*;

const SCALE: f64 = 70.0;
const MARGIN: f64 = 40.0;
const SECTOR_BUDGET: u64 = 1 << 20;

fn js(e: LoopError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct LoopExplorer {
    geom: LatticeGeometry,
    config: EdgeConfig,
    moves_applied: u32,
    sectors: Option<(MoveSet, KrylovPartition)>,
}

#[derive(Serialize)]
struct ComponentView {
    index: usize,
    size: usize,
    label: String,
    frozen: usize,
}

#[derive(Serialize)]
struct SectorView {
    move_set: String,
    total_configs: usize,
    num_components: usize,
    distinct_labels: usize,
    current: Option<usize>,
    components: Vec<ComponentView>,
}

#[derive(Serialize)]
struct CurvePoint {
    l: u64,
    exact: String,
    ln_exact: f64,
    asymptotic: Option<f64>,
    ratio: Option<f64>,
    entropy_closed_form: f64,
}

impl LoopExplorer {
    pub fn try_new(model: &str, lx: usize, ly: usize) -> Result<LoopExplorer> {
        let geom = match model {
            "square" => {
                if lx != ly {
                    return Err(LoopError::InvalidSize(format!("square torus needs lx = ly, got {lx}x{ly}")));
                }
                build_square_torus(lx)?
            }
            "hex" => build_hex_torus(lx, ly)?,
            other => return Err(LoopError::InvalidArgument(format!("unknown lattice {other:?}"))),
        };
        let config = EdgeConfig::empty(geom.num_edges());
        Ok(LoopExplorer { geom, config, moves_applied: 0, sectors: None })
    }

    fn flavours(&self) -> usize {
        match self.geom.kind() {
            LatticeKind::SquareTorus => 3,
            LatticeKind::HexTorus => 2,
        }
    }

    /// Applies a move; returns false when it annihilates the configuration.
    pub fn try_move(&mut self, kind: MoveKind, a: usize) -> Result<bool> {
        if a == 0 || a > self.flavours() {
            return Err(LoopError::InvalidArgument(format!("flavour {a} out of range")));
        }
        match apply_move(&self.geom, &self.config, &Move { kind, a })? {
            Some(next) => {
                self.config = next;
                self.moves_applied += 1;
                Ok(true)
            }
            None => Ok(false),
        }
    }

    pub fn try_face_move(&mut self, face: usize, a: usize) -> Result<bool> {
        if face >= self.geom.num_faces() {
            return Err(LoopError::InvalidFace(face));
        }
        let kind = match self.geom.kind() {
            LatticeKind::SquareTorus => MoveKind::Plaquette { face },
            LatticeKind::HexTorus => MoveKind::HexPlaquette { face },
        };
        self.try_move(kind, a)
    }

    pub fn try_pair_move(&mut self, f: usize, g: usize, a: usize) -> Result<bool> {
        if self.geom.kind() != LatticeKind::SquareTorus {
            return Err(LoopError::Unsupported("double plaquettes exist on the square torus only".into()));
        }
        let pair = self.geom.find_face_pair(f, g)?.faces;
        self.try_move(MoveKind::DoublePlaquette { pair }, a)
    }

    fn partition(&mut self, set: MoveSet) -> Result<&KrylovPartition> {
        if !matches!(&self.sectors, Some((s, _)) if *s == set) {
            self.sectors = Some((set, krylov_components(&self.geom, set, SECTOR_BUDGET)?));
        }
        Ok(&self.sectors.as_ref().expect("just filled").1)
    }

    pub fn try_sectors(&mut self, moves: &str) -> Result<String> {
        let set = MoveSet::parse(moves)?;
        let packed = self.config.pack();
        let geom = self.geom.clone();
        let part = self.partition(set)?;
        let summary = part.summary(&geom, set);
        let current = part.configs.binary_search(&packed).ok().map(|i| part.component_of[i] as usize);
        let view = SectorView {
            move_set: summary.move_set.clone(),
            total_configs: summary.total_configs,
            num_components: summary.components.len(),
            distinct_labels: summary.distinct_labels().len(),
            current,
            components: summary
                .components
                .iter()
                .enumerate()
                .map(|(index, c)| ComponentView { index, size: c.size, label: c.label.clone(), frozen: c.frozen })
                .collect(),
        };
        Ok(serde_json::to_string(&view).expect("plain data serialises"))
    }

    pub fn try_load_component(&mut self, moves: &str, index: usize) -> Result<()> {
        let set = MoveSet::parse(moves)?;
        let num_edges = self.geom.num_edges();
        let part = self.partition(set)?;
        if index >= part.num_components() {
            return Err(LoopError::InvalidArgument(format!("component {index} out of range")));
        }
        let rep = part.members(index)[0];
        self.config = EdgeConfig::unpack(rep, num_edges);
        self.moves_applied = 0;
        Ok(())
    }

    fn period(&self) -> (f64, f64) {
        let (lx, ly) = self.geom.dims();
        match self.geom.kind() {
            LatticeKind::SquareTorus => (lx as f64, ly as f64),
            LatticeKind::HexTorus => (2.0 * lx as f64, ly as f64),
        }
    }

    fn wrapped_delta(&self, from: (f64, f64), to: (f64, f64)) -> (f64, f64) {
        let (px, py) = self.period();
        let fold = |d: f64, p: f64| {
            if d > p / 2.0 {
                d - p
            } else if d < -p / 2.0 {
                d + p
            } else {
                d
            }
        };
        (fold(to.0 - from.0, px), fold(to.1 - from.1, py))
    }

    fn screen(&self, p: (f64, f64)) -> (f64, f64) {
        let (_, py) = self.period();
        (MARGIN + p.0 * SCALE, MARGIN + (py - 1.0 - p.1) * SCALE)
    }

    fn face_center(&self, f: usize) -> Result<(f64, f64)> {
        let edges = self.geom.face_edges(f)?;
        let origin = self.geom.vertex_position(self.geom.edge(edges[0]).endpoints[0]);
        let mut verts: Vec<usize> = edges.iter().flat_map(|&e| self.geom.edge(e).endpoints).collect();
        verts.sort_unstable();
        verts.dedup();
        let (mut sx, mut sy) = (0.0, 0.0);
        for &v in &verts {
            let d = self.wrapped_delta(origin, self.geom.vertex_position(v));
            sx += d.0;
            sy += d.1;
        }
        let n = verts.len() as f64;
        Ok((origin.0 + sx / n, origin.1 + sy / n))
    }

    pub fn render_svg(&self) -> Result<String> {
        let (px, py) = self.period();
        let (w, h) = (2.0 * MARGIN + (px - 1.0) * SCALE, 2.0 * MARGIN + (py - 1.0) * SCALE);
        let mut out = String::new();
        let _ = write!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" class="lattice">"#, -MARGIN, -MARGIN, w + 2.0 * MARGIN, h + 2.0 * MARGIN);
        let segment = |out: &mut String, a: (f64, f64), b: (f64, f64), state: EdgeState, e: usize| {
            let (x1, y1) = self.screen(a);
            let (x2, y2) = self.screen(b);
            let class = match state {
                EdgeState::Empty => "empty",
                EdgeState::Red => "red",
                EdgeState::Blue => "blue",
            };
            let _ = write!(out, r#"<line class="edge {class}" data-edge="{e}" x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}"/>"#);
        };
        for (e, edge) in self.geom.edges().iter().enumerate() {
            let p = self.geom.vertex_position(edge.endpoints[0]);
            let q = self.geom.vertex_position(edge.endpoints[1]);
            let d = self.wrapped_delta(p, q);
            let state = self.config.get(e);
            segment(&mut out, p, (p.0 + d.0, p.1 + d.1), state, e);
            if (q.0 - p.0 - d.0).abs() > 1e-9 || (q.1 - p.1 - d.1).abs() > 1e-9 {
                segment(&mut out, (q.0 - d.0, q.1 - d.1), q, state, e);
            }
        }
        for v in 0..self.geom.num_vertices() {
            let (x, y) = self.screen(self.geom.vertex_position(v));
            let _ = write!(out, r#"<circle class="vertex" cx="{x:.1}" cy="{y:.1}" r="4"/>"#);
        }
        for f in 0..self.geom.num_faces() {
            let (x, y) = self.screen(self.face_center(f)?);
            let _ = write!(
                out,
                r#"<g class="face" data-face="{f}"><circle cx="{x:.1}" cy="{y:.1}" r="14"/><text x="{x:.1}" y="{:.1}">{f}</text></g>"#,
                y + 4.0
            );
        }
        out.push_str("</svg>");
        Ok(out)
    }

    pub fn status_text(&self) -> String {
        let closed = self.config.is_closed(&self.geom).unwrap_or(false);
        let label = self
            .config
            .winding_label(&self.geom)
            .map(|l| l.to_string())
            .unwrap_or_else(|_| "has defects".to_string());
        format!(
            "{} | closed: {closed} | winding label: {label} | moves applied: {}",
            self.geom.describe(),
            self.moves_applied
        )
    }
}

#[wasm_bindgen]
impl LoopExplorer {
    /// `model` is `"square"` or `"hex"`.
    #[wasm_bindgen(constructor)]
    pub fn new(model: &str, lx: usize, ly: usize) -> std::result::Result<LoopExplorer, JsError> {
        Self::try_new(model, lx, ly).map_err(js)
    }

    pub fn svg(&self) -> std::result::Result<String, JsError> {
        self.render_svg().map_err(js)
    }

    pub fn status(&self) -> String {
        self.status_text()
    }

    pub fn state_string(&self) -> String {
        self.config.to_string_compact()
    }

    pub fn num_faces(&self) -> usize {
        self.geom.num_faces()
    }

    pub fn face_move(&mut self, face: usize, a: usize) -> std::result::Result<bool, JsError> {
        self.try_face_move(face, a).map_err(js)
    }

    pub fn pair_move(&mut self, f: usize, g: usize, a: usize) -> std::result::Result<bool, JsError> {
        self.try_pair_move(f, g, a).map_err(js)
    }

    pub fn reset(&mut self) {
        self.config = EdgeConfig::empty(self.geom.num_edges());
        self.moves_applied = 0;
    }

    /// JSON summary of the Krylov components under `moves`.
    pub fn sectors(&mut self, moves: &str) -> std::result::Result<String, JsError> {
        self.try_sectors(moves).map_err(js)
    }

    pub fn load_component(&mut self, moves: &str, index: usize) -> std::result::Result<(), JsError> {
        self.try_load_component(moves, index).map_err(js)
    }
}

/// Exact boundary counts for `l = 1..=l_max` together with the matching
/// entropy closed form.
pub fn count_curve_rows(family: &str, l_max: u64, s: &str) -> Result<String> {
    if l_max == 0 || l_max > 400 {
        return Err(LoopError::InvalidArgument("l_max must lie in 1..=400".into()));
    }
    let weight = ColorWeight::parse(s)?;
    let model = BoundModel::parse(match family {
        "Ni" => "si",
        "Nn" => "sn",
        "FPL" => "sfpl",
        "BLC" => "sblc",
        other => return Err(LoopError::InvalidArgument(format!("unknown family {other:?}"))),
    })?;
    let mut rows = Vec::new();
    for l in 1..=l_max {
        let c: CountResult = match family {
            "Ni" => count_intersecting_boundary(l)?,
            "Nn" => count_transfer_boundary(l)?,
            "FPL" => count_fpl_boundary(l)?,
            _ => count_blc(l, &weight),
        };
        let bound = entropy_bound(model, l, Some(&weight))?;
        rows.push(CurvePoint {
            l,
            exact: c.exact,
            ln_exact: c.ln_exact,
            asymptotic: c.asymptotic,
            ratio: c.ratio,
            entropy_closed_form: bound.closed_form,
        });
    }
    Ok(serde_json::to_string(&rows).expect("plain data serialises"))
}

#[wasm_bindgen]
pub fn count_curve(family: &str, l_max: u32, s: &str) -> std::result::Result<String, JsError> {
    count_curve_rows(family, l_max.into(), s).map_err(js)
}
