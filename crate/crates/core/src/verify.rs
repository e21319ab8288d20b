//! The acceptance suite: one report per numbered criterion, each made of
//! individually measured checks plus free-form findings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use crate::counting::{
    blc_asymptotic, count_blc, count_fpl_boundary, count_intersecting_boundary, entropy_bound, enumerate_colored_walks,
    enumerate_intersecting_boundary, nonintersecting_string_oracle, printed_transfer_eigenvalues, transfer_count,
    BoundModel, ColorWeight, Topology, TransferMatrix,
};
use crate::dynamics::{apply_move, is_frozen, krylov_components, swap_sequence_check, KrylovPartition, MoveSet};
use crate::entanglement::{
    admissible_boundary_strings, column_bipartition, fit_area_law, reduced_density_spectrum,
    schmidt_spectrum_by_counting,
};
use crate::error::{LoopError, Result};
use crate::lattice::{
    build_hex_torus, build_square_torus, collect_closed_loop_configs, Direction, EdgeConfig, EdgeState,
    LatticeGeometry, PackedConfig,
};
use crate::linalg::{dot, norm};
use crate::operators::{
    assemble_hamiltonian, double_plaquette_term, face_flip, hamiltonian_parts, local_spectrum, pair_flip,
    plaquette_term, appendix_b_relations, vertex_star, vertex_term, vertex_uniformity, wilson_family, Basis, LocalOperator, Model,
    ModelSpec, SparseOperator, DENSE_THRESHOLD,
};
use crate::spectra::{
    commutator_norm, defect_tower_states, ground_space, tower_scan, uniform_sector_state, DefectSpec, SolverChoice,
    SolverOptions, StateVector, RESIDUAL_TOL,
};

/// How much work the suite does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    /// L=2, hex (2,2), enumerations up to l=4.
    Smoke,
    /// Adds the L=3 closed sector and enumerations up to l=6.
    Desk,
    /// Adds the L=3 reachability search and large-l asymptotics.
    Extended,
}

impl Scale {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "smoke" => Ok(Self::Smoke),
            "desk" => Ok(Self::Desk),
            "extended" => Ok(Self::Extended),
            _ => Err(LoopError::InvalidArgument(format!("unknown scale {text:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Smoke => "smoke",
            Self::Desk => "desk",
            Self::Extended => "extended",
        }
    }

    fn max_enumeration_l(self) -> u64 {
        if self == Self::Smoke {
            4
        } else {
            6
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One measured quantity with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: String,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub scale: Scale,
    pub checks: Vec<Check>,
    /// Measurements that are reported rather than asserted.
    pub findings: Vec<String>,
    pub seconds: f64,
}

impl CriterionReport {
    fn new(id: u8, title: &str, scale: Scale) -> Self {
        Self { id, title: title.to_string(), scale, checks: Vec::new(), findings: Vec::new(), seconds: 0.0 }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// `PASS criterion 3: local spectra (12/12 checks)`.
    pub fn summary_line(&self) -> String {
        let ok = self.checks.iter().filter(|c| c.passed).count();
        format!(
            "{} criterion {}: {} ({}/{} checks, {:.1}s)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            ok,
            self.checks.len(),
            self.seconds
        )
    }

    /// The summary line followed by one indented line per check and finding.
    pub fn render(&self) -> String {
        let mut out = self.summary_line();
        for c in &self.checks {
            out.push_str(&format!(
                "\n  [{}] {}: measured {}, expected {}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.measured,
                c.expected
            ));
        }
        for f in &self.findings {
            out.push_str(&format!("\n  finding: {f}"));
        }
        out
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, measured: impl fmt::Display, expected: impl fmt::Display) {
        self.checks.push(Check { name: name.into(), passed, measured: measured.to_string(), expected: expected.to_string() });
    }

    fn finding(&mut self, text: impl Into<String>) {
        self.findings.push(text.into());
    }
}

pub const CRITERIA: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

/// Runs one criterion.
pub fn run_criterion(id: u8, scale: Scale) -> Result<CriterionReport> {
    let start = Instant::now();
    let mut report = match id {
        1 => criterion_ground_space(scale),
        2 => criterion_identities(scale),
        3 => criterion_local_spectra(scale),
        4 => criterion_fragmentation(scale),
        5 => criterion_hexagonal(scale),
        6 => criterion_counting(scale),
        7 => criterion_entanglement(scale),
        8 => criterion_spectrum_structure(scale),
        _ => Err(LoopError::InvalidArgument(format!("no criterion {id}"))),
    }?;
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Runs every criterion in order. A criterion whose computation errors out
/// becomes a report with one failed check carrying the error.
pub fn verify_all(scale: Scale) -> Vec<CriterionReport> {
    CRITERIA
        .iter()
        .map(|&id| {
            run_criterion(id, scale).unwrap_or_else(|e| {
                let mut r = CriterionReport::new(id, "error", scale);
                r.check("computation", false, e, "no error");
                r
            })
        })
        .collect()
}

fn near(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn is_integer(x: f64, tol: f64) -> bool {
    (x - x.round()).abs() <= tol
}

/// The 16 ground states at L=2: uniform superpositions over the {B, C}
/// components of the closed sector.
fn l2_ground_components(geom: &LatticeGeometry) -> Result<KrylovPartition> {
    krylov_components(geom, MoveSet::BC, 1 << 20)
}

fn criterion_ground_space(scale: Scale) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(1, "square L=2 ground space", scale);
    let g = build_square_torus(2)?;
    let basis = Basis::full(g.num_edges());
    let start = Instant::now();
    let h = assemble_hamiltonian(&ModelSpec::new(Model::SquareTotal, &g)?, basis.clone())?;
    let rep = ground_space(&h, 20, &SolverOptions::default())?;
    let elapsed = start.elapsed().as_secs_f64();
    r.check("totalH dimension", h.dim() == 6561, h.dim(), 6561);
    r.check("totalH λ0", near(rep.ground_energy(), -40.0, 1e-9), format!("{:.12}", rep.ground_energy()), "-40 (−10L²)");
    r.check("totalH ground multiplicity", rep.ground_degeneracy() == 16, rep.ground_degeneracy(), "16 (4²)");
    r.check("max residual", rep.max_residual() <= RESIDUAL_TOL, format!("{:.2e}", rep.max_residual()), "≤ 1e-9");
    r.check("runtime", elapsed < 60.0, format!("{elapsed:.2}s"), "< 60s");
    if rep.eigenvalues.len() > 1 {
        r.finding(format!(
            "first excited level {} with multiplicity {}",
            rep.eigenvalues[1], rep.multiplicities[1]
        ));
    }
    let hi = assemble_hamiltonian(&ModelSpec::new(Model::SquareInter, &g)?, basis)?;
    let ri = ground_space(&hi, 1, &SolverOptions::default())?;
    r.check("interH λ0", near(ri.ground_energy(), -16.0, 1e-9), format!("{:.12}", ri.ground_energy()), "-16 (−4L²)");
    r.finding(format!("interH ground multiplicity {}", ri.ground_degeneracy()));
    Ok(r)
}

fn criterion_identities(scale: Scale) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(2, "exact operator identities at L=2", scale);
    let g = build_square_torus(2)?;
    let basis = Basis::full(g.num_edges());

    let spec = ModelSpec::new(Model::SquareTotal, &g)?;
    let (hv, hf) = hamiltonian_parts(&spec, basis.clone())?;
    let c = commutator_norm(&hv, &hf)?;
    r.check("[H_v, H_f]", c == 0, c, 0);
    let star_sum: Vec<LocalOperator> = (0..g.num_vertices())
        .flat_map(|v| (1..=3).map(move |a| (v, a)))
        .map(|(v, a)| vertex_star(&g, v, a))
        .collect::<Result<_>>()?;
    let a_total = SparseOperator::sum(
        basis.clone(),
        star_sum.iter().map(|op| op.embed(basis.clone())).collect::<Result<Vec<_>>>()?.iter(),
    )?;
    let delta_total = SparseOperator::sum(
        basis.clone(),
        (0..g.num_vertices())
            .map(|v| vertex_uniformity(&g, v)?.embed(basis.clone()))
            .collect::<Result<Vec<_>>>()?
            .iter(),
    )?;
    r.finding(format!(
        "‖[ΣA, H_f]‖ = {}, ‖[ΣΔ̂, H_f]‖ = {}",
        commutator_norm(&a_total, &hf)?,
        commutator_norm(&delta_total, &hf)?
    ));

    let mut stars = BTreeMap::new();
    for v in 0..g.num_vertices() {
        for a in 1..=3 {
            stars.insert((v, a), vertex_star(&g, v, a)?.embed(basis.clone())?);
        }
    }
    let mut ab_fail: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut ab_max = 0;
    let mut b_ops = BTreeMap::new();
    for f in 0..g.num_faces() {
        for b in 1..=3 {
            let bf = face_flip(&g, f, b)?.embed(basis.clone())?;
            for ((_, a), av) in &stars {
                let n = commutator_norm(av, &bf)?;
                if n != 0 {
                    ab_fail.insert((*a, b));
                    ab_max = ab_max.max(n);
                }
            }
            b_ops.insert((f, b), bf);
        }
    }
    r.check(
        "[A_v^(a), B_f^(b)] for all v, f, a, b",
        ab_fail.is_empty(),
        if ab_fail.is_empty() { "0".to_string() } else { format!("max {ab_max}, nonzero for (a,b) in {ab_fail:?}") },
        0,
    );

    let mut ac_fail: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut ac_max = 0;
    for p in g.face_pairs() {
        for b in 1..=3 {
            let cp = pair_flip(&g, p.faces, b)?.embed(basis.clone())?;
            for ((_, a), av) in &stars {
                let n = commutator_norm(av, &cp)?;
                if n != 0 {
                    ac_fail.insert((*a, b));
                    ac_max = ac_max.max(n);
                }
            }
        }
    }
    r.check(
        "[A_v^(a), C^(b)] for all v, pairs, a, b",
        ac_fail.is_empty(),
        if ac_fail.is_empty() { "0".to_string() } else { format!("max {ac_max}, nonzero for (a,b) in {ac_fail:?}") },
        0,
    );

    let b12 = (0..g.num_faces())
        .map(|f| commutator_norm(&b_ops[&(f, 1)], &b_ops[&(f, 2)]))
        .collect::<Result<Vec<_>>>()?;
    let b12_max = b12.iter().copied().max().unwrap_or(0);
    r.check("max_f ‖[B_f^(1), B_f^(2)]‖", b12_max > 0, b12_max, "> 0");

    let relations = appendix_b_relations(&g)?;
    for rel in relations.iter().filter(|x| x.index == 0) {
        r.check(rel.statement.clone(), rel.holds, rel.max_deviation, 0);
    }
    let printed: Vec<_> = relations.iter().filter(|x| x.index > 0).collect();
    let exact = printed.iter().filter(|x| x.holds).count();
    r.check(
        "nine Appendix B relations evaluated in both orientations",
        printed.len() == 18,
        format!("{} evaluations, {exact} exact", printed.len()),
        "18 evaluations",
    );
    for rel in &printed {
        r.finding(format!(
            "relation {}: {} is {} (max |lhs − rhs| = {}{})",
            rel.index,
            rel.statement,
            if rel.holds { "exact" } else { "violated" },
            rel.max_deviation,
            if rel.lhs_nnz == 0 { ", lhs vanishes" } else { "" }
        ));
    }
    let w = wilson_family(&g, &basis)?;
    let h = hv.add(&hf)?;
    let part = l2_ground_components(&g)?;
    let ground: Vec<StateVector> = (0..part.num_components())
        .map(|c| uniform_sector_state(basis.clone(), &part.members(c)))
        .collect::<Result<_>>()?;
    let mut gs_ok = true;
    for psi in &ground {
        let (e, res) = psi.residual(&h)?;
        gs_ok &= near(e, -40.0, 1e-9) && res <= 1e-10;
    }
    r.check("uniform component states are the ground states", gs_ok && ground.len() == 16, ground.len(), "16 states at −40");
    let mut min_leak = f64::INFINITY;
    let mut min_nonzero_leak = f64::INFINITY;
    let mut zero_images: BTreeMap<String, usize> = BTreeMap::new();
    let mut inside: Vec<String> = Vec::new();
    for (key, op) in w.iter() {
        for (gi, psi) in ground.iter().enumerate() {
            let v = op.matvec(&psi.amplitudes);
            let mut rest = v.clone();
            for g0 in &ground {
                let c = dot(&g0.amplitudes, &v);
                for (x, y) in rest.iter_mut().zip(&g0.amplitudes) {
                    *x -= c * y;
                }
            }
            let leak = norm(&rest);
            min_leak = min_leak.min(leak);
            if norm(&v) == 0.0 {
                *zero_images.entry(key.to_string()).or_insert(0) += 1;
            } else {
                min_nonzero_leak = min_nonzero_leak.min(leak);
                if leak <= 1e-12 {
                    let rep = EdgeConfig::unpack(part.members(gi)[0], g.num_edges());
                    inside.push(format!("{} on {}", key.to_string(), rep.crossing_label(&g)));
                }
            }
        }
    }
    r.check("min over all W, GS of ‖(1−P_GS)W|GS⟩‖", min_leak > 1e-12, format!("{min_leak:.6}"), "> 0");
    r.check(
        "min over W|GS⟩ ≠ 0 of ‖(1−P_GS)W|GS⟩‖",
        min_nonzero_leak > 1e-12,
        format!("{min_nonzero_leak:.6}"),
        "> 0",
    );
    if !inside.is_empty() {
        r.finding(format!("{} nonzero images stay in the ground manifold: {}", inside.len(), inside.join("; ")));
    }
    if !zero_images.is_empty() {
        let total: usize = zero_images.values().sum();
        r.finding(format!(
            "{total} of {} pairs (W, GS) have W|GS⟩ = 0, so their leakage vanishes trivially: {zero_images:?}",
            w.len() * ground.len()
        ));
    }
    Ok(r)
}

fn criterion_local_spectra(scale: Scale) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(3, "local spectra", scale);
    let tol = 1e-10;
    let g2 = build_square_torus(2)?;
    let g3 = build_square_torus(3)?;
    let hex = build_hex_torus(2, 2)?;

    let hv = vertex_term(&g2, 0)?.to_sparse();
    let levels = local_spectrum(&hv, DENSE_THRESHOLD)?;
    let values: Vec<f64> = levels.iter().map(|l| l.value).collect();
    r.check(
        "spec h_v ⊆ {−1,0,1}",
        values.iter().all(|&x| [-1.0, 0.0, 1.0].iter().any(|&t| near(x, t, tol))),
        format!("{:?}", levels.iter().map(|l| (l.value.round() as i64, l.multiplicity)).collect::<Vec<_>>()),
        "{−1, 0, 1}",
    );
    let table_i = classify_vertex_states(&hv, 4, |states| {
        let (r_, b_) = color_counts(states);
        let distinct = distinct_states(states);
        if r_ % 2 == 0 && b_ % 2 == 0 {
            -1
        } else if distinct == 3 {
            0
        } else {
            1
        }
    });
    r.check(
        "Table I: ε=−1 closed, ε=0 all three states present, ε=+1 other open vertices",
        table_i.mismatches == 0,
        format!("{} mismatches; class sizes {:?}", table_i.mismatches, table_i.class_sizes),
        "0 mismatches",
    );
    r.check("h_v depends only on the multiset of leg states", table_i.symmetric, table_i.symmetric, true);
    r.check(
        "dense diagonalisation equals the diagonal of h_v",
        table_i.dense_matches,
        table_i.dense_matches,
        true,
    );
    r.finding(format!("Table I orbit counts (multisets of leg states) per ε: {:?}", table_i.orbits));

    let hvp = vertex_term(&hex, 0)?.to_sparse();
    let lv = local_spectrum(&hvp, DENSE_THRESHOLD)?;
    r.check(
        "spec h'_v ⊆ {−1,0,1,2}",
        lv.iter().all(|l| [-1.0, 0.0, 1.0, 2.0].iter().any(|&t| near(l.value, t, tol))) && lv.len() == 4,
        format!("{:?}", lv.iter().map(|l| (l.value.round() as i64, l.multiplicity)).collect::<Vec<_>>()),
        "four levels {−1, 0, 1, 2}",
    );
    let table_ii = classify_vertex_states(&hvp, 3, |states| {
        let (r_, b_) = color_counts(states);
        if r_ % 2 == 0 && b_ % 2 == 0 {
            -1
        } else if r_ + b_ == 3 && distinct_states(states) == 1 {
            2
        } else if r_ + b_ == 1 {
            1
        } else {
            0
        }
    });
    r.check(
        "Table II: ε=−1 closed, 2 uniform colored, 1 single colored leg, 0 otherwise",
        table_ii.mismatches == 0 && table_ii.dense_matches,
        format!("{} mismatches; class sizes {:?}", table_ii.mismatches, table_ii.class_sizes),
        "0 mismatches",
    );

    let hf = local_spectrum(&plaquette_term(&g2, 0)?.to_sparse(), DENSE_THRESHOLD)?;
    r.check("min eig h_f", near(hf[0].value, -3.0, tol), format!("{:.12}", hf[0].value), -3);
    let pair = g3.face_pairs()[0].clone();
    let hp = double_plaquette_term(&g3, pair.faces)?;
    let hpl = local_spectrum(&hp.to_sparse(), DENSE_THRESHOLD)?;
    r.check("h_<f,f'> support size at L=3", hp.support().len() == 6, hp.support().len(), 6);
    r.check("min eig h_<f,f'>", near(hpl[0].value, -3.0, tol), format!("{:.12}", hpl[0].value), -3);
    let integer_levels = hf.iter().chain(&hpl).chain(&levels).chain(&lv).all(|l| is_integer(l.value, tol));
    let hexf = plaquette_term(&hex, 0)?.to_sparse();
    let hexl = local_spectrum(&hexf, DENSE_THRESHOLD)?;
    r.check("min eig h'_f", near(hexl[0].value, -1.0, tol), format!("{:.12}", hexl[0].value), -1);
    let uniform: Vec<PackedConfig> = [0u64, 1, 2].iter().map(|&s| (0..6).map(|k| s * 3u64.pow(k)).sum()).collect();
    let block = hexf.restrict(Basis::explicit("uniform-hexagon", 6, uniform.clone()));
    match block {
        Ok(b) => {
            let d = b.to_dense();
            let expect = [[1.0, -1.0, -1.0], [-1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]];
            let same = (0..3).all(|i| (0..3).all(|j| d[(i, j)] == expect[i][j]));
            let bl = local_spectrum(&b, DENSE_THRESHOLD)?;
            r.check(
                "hex face block on {φφφφφφ, rrrrrr, bbbbbb}",
                same && near(bl[0].value, -1.0, tol),
                format!("min {:.12}", bl[0].value),
                "[[1,−1,−1],[−1,0,0],[−1,0,0]], min −1",
            );
        }
        Err(e) => r.check("hex face block on uniform hexagons", false, e, "closed block"),
    }
    let integer_levels = integer_levels && hexl.iter().all(|l| is_integer(l.value, tol));
    r.check("all local eigenvalues integer to 1e-10", integer_levels, integer_levels, true);
    Ok(r)
}

struct VertexClassification {
    mismatches: usize,
    symmetric: bool,
    dense_matches: bool,
    class_sizes: BTreeMap<i64, usize>,
    orbits: BTreeMap<i64, usize>,
}

fn color_counts(states: &[EdgeState]) -> (usize, usize) {
    (
        states.iter().filter(|&&s| s == EdgeState::Red).count(),
        states.iter().filter(|&&s| s == EdgeState::Blue).count(),
    )
}

fn distinct_states(states: &[EdgeState]) -> usize {
    states.iter().collect::<BTreeSet<_>>().len()
}

fn classify_vertex_states(op: &SparseOperator, legs: usize, rule: impl Fn(&[EdgeState]) -> i64) -> VertexClassification {
    let diag = op.diagonal();
    let mut by_multiset: BTreeMap<Vec<EdgeState>, BTreeSet<i64>> = BTreeMap::new();
    let mut class_sizes = BTreeMap::new();
    let mut mismatches = 0;
    for (k, &eps) in diag.iter().enumerate() {
        let states = EdgeConfig::unpack(k as u64, legs);
        let states = states.states();
        if rule(states) != eps {
            mismatches += 1;
        }
        *class_sizes.entry(eps).or_insert(0) += 1;
        let mut ms = states.to_vec();
        ms.sort();
        by_multiset.entry(ms).or_default().insert(eps);
    }
    let symmetric = by_multiset.values().all(|s| s.len() == 1);
    let mut orbits = BTreeMap::new();
    for s in by_multiset.values() {
        if let Some(&e) = s.iter().next() {
            *orbits.entry(e).or_insert(0) += 1;
        }
    }
    let mut sorted_diag: Vec<f64> = diag.iter().map(|&x| x as f64).collect();
    sorted_diag.sort_by(f64::total_cmp);
    let dense: Vec<f64> = crate::linalg::sorted_symmetric_eigen(op.to_dense()).0;
    let dense_matches = op.is_diagonal() && dense.iter().zip(&sorted_diag).all(|(a, b)| near(*a, *b, 1e-10));
    VertexClassification { mismatches, symmetric, dense_matches, class_sizes, orbits }
}

/// Even L: columns alternately red and blue.
fn alternating_columns(g: &LatticeGeometry) -> EdgeConfig {
    let mut c = EdgeConfig::empty(g.num_edges());
    for j in 0..g.straight_cycle_count(Direction::Y) {
        let color = if j % 2 == 0 { EdgeState::Red } else { EdgeState::Blue };
        for e in g.straight_cycle(Direction::Y, j) {
            c.set(e, color);
        }
    }
    c
}

/// Seeded random (config, move) samples; returns violations of closure,
/// label conservation and involution, and the number of successful moves.
pub fn sample_move_invariants(
    geom: &LatticeGeometry,
    configs: &[PackedConfig],
    set: MoveSet,
    samples: usize,
    seed: u64,
) -> Result<(usize, usize, usize, usize)> {
    let moves = set.moves(geom)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut closure, mut label, mut involution, mut applied) = (0, 0, 0, 0);
    for _ in 0..samples {
        let c = EdgeConfig::unpack(configs[rng.gen_range(0..configs.len())], geom.num_edges());
        let mv = moves[rng.gen_range(0..moves.len())];
        let Some(img) = apply_move(geom, &c, &mv)? else { continue };
        applied += 1;
        if !img.is_closed(geom)? {
            closure += 1;
            continue;
        }
        if img.winding_label(geom)? != c.winding_label(geom)? {
            label += 1;
        }
        if apply_move(geom, &img, &mv)?.as_ref() != Some(&c) {
            involution += 1;
        }
    }
    Ok((closure, label, involution, applied))
}

pub const INVARIANT_SEED: u64 = 20_240_601;

fn criterion_fragmentation(scale: Scale) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(4, "fragmentation and move invariants", scale);
    let g = build_square_torus(2)?;
    let alt = alternating_columns(&g);
    let frozen = is_frozen(&g, &alt, MoveSet::B)?;
    let pb = krylov_components(&g, MoveSet::B, 1 << 20)?;
    let idx = pb.configs.binary_search(&alt.pack()).map_err(|_| LoopError::HasDefects)?;
    let comp = pb.component_of[idx] as usize;
    r.check(
        "alternating columns isolated under {B}",
        frozen && pb.components[comp].len() == 1,
        format!("frozen={frozen}, component size {}", pb.components[comp].len()),
        "frozen, size 1",
    );
    let pbc = krylov_components(&g, MoveSet::BC, 1 << 20)?;
    let refines = pb.components.iter().all(|members| {
        let target = pbc.component_of[members[0] as usize];
        members.iter().all(|&i| pbc.component_of[i as usize] == target)
    });
    r.check(
        "{B} partition refines {B,C} and is strictly finer",
        refines && pb.num_components() > pbc.num_components(),
        format!("{} → {} components", pb.num_components(), pbc.num_components()),
        "refinement, fewer components",
    );
    let summary = pbc.summary(&g, MoveSet::BC);
    let labels = summary.distinct_labels();
    let single = summary.components.iter().all(|c| c.single_label);
    r.check(
        "{B,C} components = realised winding labels",
        single && labels.len() == pbc.num_components(),
        format!("{} components, {} labels", pbc.num_components(), labels.len()),
        "equal (16 expected)",
    );
    r.check("{B,C} component count", pbc.num_components() == 16, pbc.num_components(), 16);
    if g.has_shared_edge_degeneracy() {
        r.finding("L=2: neighbouring faces share two edges, so face pairs repeat and double-plaquette supports have 4 edges");
    }
    r.finding(format!("{{B,C}} component sizes {:?}", pbc.sizes()));

    let samples = 100_000;
    let (c1, l1, i1, a1) = sample_move_invariants(&g, &pbc.configs, MoveSet::BC, samples, INVARIANT_SEED)?;
    r.check(
        format!("square L=2 {{B,C}}: {samples} random samples"),
        c1 + l1 + i1 == 0,
        format!("closure {c1}, label {l1}, involution {i1} violations ({a1} moves applied)"),
        "0 violations",
    );
    let hex = build_hex_torus(2, 2)?;
    let hex_configs = collect_closed_loop_configs(&hex, 1 << 20)?;
    let (c2, l2, i2, a2) = sample_move_invariants(&hex, &hex_configs, MoveSet::HexB, samples, INVARIANT_SEED)?;
    r.check(
        format!("hex (2,2) {{B'}}: {samples} random samples"),
        c2 + l2 + i2 == 0,
        format!("closure {c2}, label {l2}, involution {i2} violations ({a2} moves applied)"),
        "0 violations",
    );
    if scale >= Scale::Desk {
        let g3 = build_square_torus(3)?;
        let configs = collect_closed_loop_configs(&g3, 1 << 22)?;
        let (c3, l3, i3, a3) = sample_move_invariants(&g3, &configs, MoveSet::BC, samples, INVARIANT_SEED)?;
        r.check(
            format!("square L=3 {{B,C}}: {samples} random samples"),
            c3 + l3 + i3 == 0,
            format!("closure {c3}, label {l3}, involution {i3} violations ({a3} moves applied)"),
            "0 violations",
        );
    }
    let swap = swap_sequence_check(&g, 1 << 20)?;
    r.finding(format!("L=2 swap sequence: reachable={}, path length {:?}", swap.reachable, swap.path_length));
    if scale >= Scale::Extended {
        let g3 = build_square_torus(3)?;
        let p3 = krylov_components(&g3, MoveSet::BC, 1 << 22)?;
        let s3 = p3.summary(&g3, MoveSet::BC);
        r.finding(format!(
            "L=3 {{B,C}}: {} components over {} labels",
            p3.num_components(),
            s3.distinct_labels().len()
        ));
        let swap3 = swap_sequence_check(&g3, 1 << 22)?;
        r.finding(format!("L=3 swap sequence: reachable={}, path length {:?}", swap3.reachable, swap3.path_length));
    }
    Ok(r)
}

fn criterion_hexagonal(scale: Scale) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(5, "hexagonal (2,2)", scale);
    let g = build_hex_torus(2, 2)?;
    let spec = ModelSpec::new(Model::Hex, &g)?;
    let closed = collect_closed_loop_configs(&g, 1 << 20)?;
    let basis = Basis::explicit("closed", g.num_edges(), closed.clone());
    let h = assemble_hamiltonian(&spec, basis)?;
    let rep = ground_space(&h, 20, &SolverOptions::default())?;
    r.check(
        "closed-sector λ0",
        near(rep.ground_energy(), -12.0, 1e-9),
        format!("{:.12}", rep.ground_energy()),
        -12,
    );
    let full = assemble_hamiltonian(&spec, Basis::full(g.num_edges()))?;
    let opts = SolverOptions { choice: SolverChoice::Lanczos, ..SolverOptions::default() };
    let lz = ground_space(&full, 1, &opts)?;
    r.check(
        "full-space Lanczos λ0 agrees",
        near(lz.ground_energy(), rep.ground_energy(), 1e-8),
        format!("{:.12} ({} iterations)", lz.ground_energy(), lz.solver.iterations),
        format!("{:.12} ± 1e-8", rep.ground_energy()),
    );
    let part = crate::dynamics::components_of(&g, closed.clone(), MoveSet::HexB)?;
    r.check(
        "ground degeneracy = closed-sector component count",
        rep.ground_degeneracy() == part.num_components(),
        format!("degeneracy {}, components {}", rep.ground_degeneracy(), part.num_components()),
        "equal",
    );
    let frozen_components = part.components.iter().filter(|m| m.len() == 1 && part.frozen[m[0] as usize]).count();
    r.finding(format!(
        "component sizes {:?}; {} components are single frozen configurations",
        part.sizes(),
        frozen_components
    ));
    let g23 = build_hex_torus(2, 3)?;
    let p23 = krylov_components(&g23, MoveSet::HexB, 1 << 22)?;
    r.check(
        "component count grows (2,2) → (2,3)",
        p23.num_components() > part.num_components(),
        format!("{} → {}", part.num_components(), p23.num_components()),
        "strict increase",
    );
    let labels: BTreeSet<String> = part.summary(&g, MoveSet::HexB).distinct_labels();
    r.finding(format!("observed (2,2) sector labels: {}", labels.into_iter().collect::<Vec<_>>().join(", ")));
    Ok(r)
}

fn criterion_counting(scale: Scale) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(6, "boundary counting", scale);
    let lmax = scale.max_enumeration_l();
    let mut ni_ok = true;
    for l in 1..=lmax {
        let closed: u64 = count_intersecting_boundary(l)?.exact.parse().map_err(|_| LoopError::InvalidArgument("count does not fit in u64".into()))?;
        ni_ok &= closed == enumerate_intersecting_boundary(l)?;
    }
    r.check(format!("N_i closed form = enumeration, l ≤ {lmax}"), ni_ok, ni_ok, true);

    let t1 = transfer_count(1)?;
    let t2 = transfer_count(2)?;
    let o1 = nonintersecting_string_oracle(1, Topology::Line)?;
    let o2 = nonintersecting_string_oracle(2, Topology::Line)?;
    r.check(
        "(T²)_φφ = oracle(l=1)",
        t1.entry_count == "3" && o1 == 3,
        format!("{} vs {o1}", t1.entry_count),
        "3",
    );
    r.check(
        "(T⁴)_φφ = oracle(l=2)",
        t2.entry_count == "19" && o2 == 19,
        format!("{} vs {o2}", t2.entry_count),
        "19",
    );
    r.check(
        "trace-form N_n at l=1",
        t1.trace_count == "13" && t1.trace_of_power == "13",
        format!("{} (trace of T² = {})", t1.trace_count, t1.trace_of_power),
        13,
    );
    for l in 1..=lmax {
        let t = transfer_count(l)?;
        let o = nonintersecting_string_oracle(l, Topology::Line)?;
        r.finding(format!(
            "l={l}: (T^{})_φφ = {}, trace form = {}, matching oracle = {o}",
            2 * l,
            t.entry_count,
            t.trace_count
        ));
    }

    let mut blc_ok = true;
    for l in 1..=lmax {
        for s in 1..=3 {
            let exact = count_blc(l, &ColorWeight::integer(s)).exact;
            blc_ok &= exact == enumerate_colored_walks(l, s)?.to_string();
        }
    }
    r.check(format!("N_BLC = walk enumeration, l ≤ {lmax}, s ∈ {{1,2,3}}"), blc_ok, blc_ok, true);
    let l_asym = if scale >= Scale::Extended { 1000 } else { 200 };
    for s in [1u64, 2, 4] {
        let c = count_blc(200, &ColorWeight::integer(s));
        r.check(
            format!("N_BLC asymptotic/exact at l=200, s={s}"),
            near(c.ratio.unwrap_or(f64::NAN), 1.0, 0.05),
            format!("{:.5}", c.ratio.unwrap_or(f64::NAN)),
            "1 ± 0.05",
        );
        let a = blc_asymptotic(l_asym, s as f64);
        let exact = count_blc(l_asym, &ColorWeight::integer(s));
        r.finding(format!(
            "s={s}, l={l_asym}: exact/printed = {:.5}, exact/(printed·s^(−1/4)) = {:.5}",
            (exact.ln_exact - a.ln_saddle).exp(),
            (exact.ln_exact - a.ln_corrected).exp()
        ));
    }
    let a2 = blc_asymptotic(200, 2.0);
    r.finding(format!(
        "σ(s=2) = {:.6}; printed identity σ/2 = √σ(1−σ) off by {:.3e}, with √s in place of √σ off by {:.1e}",
        a2.sigma, a2.printed_identity_residual, a2.corrected_identity_residual
    ));
    let fpl = count_fpl_boundary(100)?;
    r.check("N_FPL Stirling ratio at l=100", near(fpl.ratio.unwrap_or(f64::NAN), 1.0, 0.01), format!("{:.6}", fpl.ratio.unwrap_or(f64::NAN)), "1 ± 0.01");
    let mut ev = TransferMatrix::boundary().eigenvalues();
    ev.sort_by(f64::total_cmp);
    let printed = printed_transfer_eigenvalues();
    let dev = ev.iter().zip(&printed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    r.check("T eigenvalues = {1−√3, 0, 1, 2, 1+√3}", dev <= 1e-12, format!("max deviation {dev:.2e}"), "≤ 1e-12");
    Ok(r)
}

fn fit_sequence(model: BoundModel, s: Option<&ColorWeight>, exact: bool) -> Result<crate::entanglement::ScalingFit> {
    let pts = (50..=500)
        .step_by(10)
        .map(|l| {
            let b = entropy_bound(model, l, s)?;
            Ok((l as f64, if exact { b.ln_exact_count } else { b.closed_form }))
        })
        .collect::<Result<Vec<_>>>()?;
    fit_area_law(&pts)
}

fn criterion_entanglement(scale: Scale) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(7, "entanglement", scale);
    let g = build_square_torus(2)?;
    let part = column_bipartition(&g, 1)?;
    let strings = admissible_boundary_strings(&g, &part, 1 << 20)?;
    let bound = (strings.len() as f64).ln();
    let comps = l2_ground_components(&g)?;
    let basis = Basis::full(g.num_edges());
    let (mut max_dev, mut sums_ok, mut bound_ok, mut all_exact) = (0.0f64, true, true, true);
    let mut max_rank = 0;
    for c in 0..comps.num_components() {
        let members = comps.members(c);
        let s = schmidt_spectrum_by_counting(&members, &part)?;
        let dense = reduced_density_spectrum(&uniform_sector_state(basis.clone(), &members)?, &part)?;
        let dev = if dense.len() == s.coefficients.len() {
            dense.iter().zip(&s.coefficients).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        max_dev = max_dev.max(dev);
        sums_ok &= s.count_sum() == members.len() as u64 && s.product_sum() == members.len() as u64;
        bound_ok &= s.entropy <= bound + 1e-12;
        all_exact &= s.exact;
        max_rank = max_rank.max(s.rank);
    }
    r.check(
        "L=2 counting vs dense partial trace, 16 ground states",
        max_dev <= 1e-10,
        format!("{max_dev:.2e}"),
        "≤ 1e-10",
    );
    r.check("Σ N_A·N_B = component size", sums_ok && all_exact, sums_ok && all_exact, true);
    r.check(
        "L=2 entropy ≤ ln(admissible strings)",
        bound_ok && max_rank <= strings.len(),
        format!("max rank {max_rank}, {} strings", strings.len()),
        "rank and entropy within bound",
    );

    let hex = build_hex_torus(2, 2)?;
    let hpart = column_bipartition(&hex, 1)?;
    let hstrings = admissible_boundary_strings(&hex, &hpart, 1 << 20)?;
    let hclosed = collect_closed_loop_configs(&hex, 1 << 20)?;
    let hcomps = crate::dynamics::components_of(&hex, hclosed, MoveSet::HexB)?;
    let mut hex_ok = true;
    for c in 0..hcomps.num_components() {
        let s = schmidt_spectrum_by_counting(&hcomps.members(c), &hpart)?;
        hex_ok &= s.entropy <= (hstrings.len() as f64).ln() + 1e-12;
    }
    r.check(
        "hex (2,2) entropy ≤ ln(admissible strings), all components",
        hex_ok,
        format!("{} strings", hstrings.len()),
        "within bound",
    );

    if scale >= Scale::Desk {
        let g3 = build_square_torus(3)?;
        let p3 = column_bipartition(&g3, 1)?;
        let closed = collect_closed_loop_configs(&g3, 1 << 22)?;
        let s = schmidt_spectrum_by_counting(&closed, &p3)?;
        let st = admissible_boundary_strings(&g3, &p3, 1 << 20)?;
        r.check(
            "L=3 closed sector, 1-column region",
            s.rank <= st.len() && s.entropy <= (st.len() as f64).ln() + 1e-12,
            format!("rank {}, parity strings {}, S = {:.6}", s.rank, st.len(), s.entropy),
            "rank ≤ strings",
        );
        r.finding(format!(
            "L=3 closed sector ({} configs): rank {} {} the {} parity strings; S = {:.6}, ln(strings) = {:.6}",
            closed.len(),
            s.rank,
            if s.rank == st.len() { "saturates" } else { "is below" },
            st.len(),
            s.entropy,
            (st.len() as f64).ln()
        ));
    }

    let si = fit_sequence(BoundModel::Si, None, false)?;
    r.check(
        "S_i closed form: β = 0, γ = ln 4",
        si.beta.abs() <= 1e-3 && near(si.gamma, 4f64.ln(), 1e-3),
        format!("β = {:.2e}, γ = {:.6}", si.beta, si.gamma),
        format!("0, {:.6}", 4f64.ln()),
    );
    let fpl = fit_sequence(BoundModel::SFPL, None, false)?;
    r.check("S_FPL closed form: β = 1/2", near(fpl.beta, 0.5, 1e-3), format!("{:.6}", fpl.beta), "0.5 ± 1e-3");
    let two = ColorWeight::integer(2);
    let blc = fit_sequence(BoundModel::SBLC, Some(&two), false)?;
    r.check("S_BLC(s=2) closed form: β = 1/2", near(blc.beta, 0.5, 1e-3), format!("{:.6}", blc.beta), "0.5 ± 1e-3");
    for (name, model, s) in [("S_i", BoundModel::Si, None), ("S_FPL", BoundModel::SFPL, None), ("S_BLC(s=2)", BoundModel::SBLC, Some(&two))] {
        let f = fit_sequence(model, s, true)?;
        r.finding(format!(
            "{name} from ln(exact count), l=50..500: α = {:.6}, β = {:.6}, γ = {:.6}, rms {:.1e}",
            f.alpha, f.beta, f.gamma, f.residual
        ));
    }
    Ok(r)
}

fn criterion_spectrum_structure(scale: Scale) -> Result<CriterionReport> {
    let mut r = CriterionReport::new(8, "spectrum structure", scale);
    let g = build_square_torus(2)?;
    let t = tower_scan(&g, Model::SquareTotal)?;
    r.check(
        "spec H_int = {E_v + E_f}, full space",
        t.multiset_matches,
        format!("max deviation {:.3e}", t.max_multiset_deviation),
        "≤ 1e-9",
    );
    r.finding(format!(
        "restricted to the closed sector the multiset deviation is {:.2e}; ‖[H_v, H_f]‖ = {}",
        t.closed_sector_deviation, t.commutator_norm
    ));
    r.check("H_v integer valued", t.hv_integer_valued, format!("{:?}", t.hv_levels), "integers");
    r.check("H_v on the closed sector", t.hv_closed_value == Some(-4), format!("{:?}", t.hv_closed_value), "−L² = −4");
    let spec = DefectSpec { vertices: (0, 1), color: EdgeState::Red };
    let d = defect_tower_states(&g, Model::SquareTotal, Some(spec), 1 << 20)?;
    let measured = d.states.iter().all(|s| s.residual.is_finite());
    r.check(
        "defect-pair residuals measured",
        measured && !d.states.is_empty(),
        format!("{} components in a sector of {}", d.states.len(), d.sector_size),
        "every component measured",
    );
    let exact: Vec<_> = d.states.iter().filter(|s| s.exact_eigenstate).collect();
    let integer = exact.iter().all(|s| s.integer_offset);
    r.check("exact defect eigenstates have integer offsets", integer, integer, true);
    r.finding(format!(
        "red defects at vertices (0,1): {} of {} uniform component states are exact eigenstates (sizes {:?}, offsets {:?})",
        exact.len(),
        d.states.len(),
        exact.iter().map(|s| s.size).collect::<Vec<_>>(),
        exact.iter().map(|s| s.offset_from_ground).collect::<Vec<_>>()
    ));
    for s in d.states.iter().filter(|s| !s.exact_eigenstate) {
        r.finding(format!(
            "not an eigenstate: component {} (size {}), ⟨H⟩ = {:.6}, residual {:.6}",
            s.component, s.size, s.energy, s.residual
        ));
    }
    let zero = defect_tower_states(&g, Model::SquareTotal, None, 1 << 20)?;
    let zmax = zero.states.iter().map(|s| s.residual).fold(0.0, f64::max);
    r.check("zero defects reduce to the ground states", zmax < 1e-10, format!("{zmax:.2e}"), "< 1e-10");
    Ok(r)
}
