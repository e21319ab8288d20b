//! Independent oracles: brute-force filters over the full configuration
//! space, dense linear algebra, and direct string enumeration.

use bicolor_loops::counting::{
    blc_sum, count_fpl_boundary, hypergeometric_crosscheck, nonintersecting_string_oracle, ColorWeight, Topology,
    TransferMatrix,
};
use bicolor_loops::dynamics::{components_of, krylov_components, MoveSet};
use bicolor_loops::entanglement::{column_bipartition, reduced_density_spectrum, schmidt_spectrum_by_counting};
use bicolor_loops::lattice::{
    build_hex_torus, build_square_torus, collect_closed_loop_configs, collect_sector_configs, DefectPattern,
    EdgeConfig, EdgeState, LatticeGeometry, PackedConfig,
};
use bicolor_loops::operators::{assemble_hamiltonian, Basis, Model, ModelSpec};
use bicolor_loops::spectra::{ground_space, reference_ground_energy, uniform_sector_state, SolverOptions};

fn brute_force(geom: &LatticeGeometry, keep: impl Fn(&EdgeConfig) -> bool) -> Vec<PackedConfig> {
    let n = geom.num_edges();
    (0..3u64.pow(n as u32)).filter(|&p| keep(&EdgeConfig::unpack(p, n))).collect()
}

#[test]
fn closed_enumeration_matches_full_filter_square() {
    let g = build_square_torus(2).unwrap();
    let fast = collect_closed_loop_configs(&g, 1 << 20).unwrap();
    let slow = brute_force(&g, |c| c.is_closed(&g).unwrap());
    assert_eq!(fast, slow);
    assert_eq!(fast.len(), 129);
}

#[test]
fn closed_enumeration_matches_full_filter_hex() {
    let g = build_hex_torus(2, 2).unwrap();
    let fast = collect_closed_loop_configs(&g, 1 << 20).unwrap();
    let slow = brute_force(&g, |c| c.is_closed(&g).unwrap());
    assert_eq!(fast, slow);
}

#[test]
fn defect_sector_matches_full_filter() {
    let g = build_square_torus(2).unwrap();
    let target = DefectPattern::with_defects(4, &[(0, EdgeState::Red), (1, EdgeState::Red)]).unwrap();
    let fast = collect_sector_configs(&g, &target, 1 << 20).unwrap();
    let slow = brute_force(&g, |c| c.defect_pattern(&g).unwrap() == target);
    assert_eq!(fast, slow);
}

#[test]
fn restrict_then_sum_equals_sum_then_restrict() {
    let g = build_square_torus(2).unwrap();
    let spec = ModelSpec::new(Model::SquareTotal, &g).unwrap();
    let closed = Basis::explicit("closed", 8, collect_closed_loop_configs(&g, 1 << 20).unwrap());
    let direct = assemble_hamiltonian(&spec, closed.clone()).unwrap();
    let full = assemble_hamiltonian(&spec, Basis::full(8)).unwrap();
    assert_eq!(full.restrict(closed).unwrap().triplets(), direct.triplets());
}

#[test]
fn frustration_free_ground_energies() {
    let opts = SolverOptions::default();
    let g = build_square_torus(2).unwrap();
    for model in [Model::SquareInter, Model::SquareTotal] {
        let h = assemble_hamiltonian(&ModelSpec::new(model, &g).unwrap(), Basis::full(8)).unwrap();
        let e = ground_space(&h, 1, &opts).unwrap().ground_energy();
        assert!((e - reference_ground_energy(&g, model)).abs() < 1e-9, "{model:?}: {e}");
    }
    let hex = build_hex_torus(2, 2).unwrap();
    let closed = Basis::explicit("closed", 12, collect_closed_loop_configs(&hex, 1 << 20).unwrap());
    let h = assemble_hamiltonian(&ModelSpec::new(Model::Hex, &hex).unwrap(), closed).unwrap();
    let e = ground_space(&h, 1, &opts).unwrap().ground_energy();
    assert!((e - reference_ground_energy(&hex, Model::Hex)).abs() < 1e-9);
}

#[test]
fn ground_vectors_lie_in_the_span_of_uniform_component_states() {
    let g = build_square_torus(2).unwrap();
    let basis = Basis::full(8);
    let h = assemble_hamiltonian(&ModelSpec::new(Model::SquareTotal, &g).unwrap(), basis.clone()).unwrap();
    let opts = SolverOptions { keep_vectors: true, ..SolverOptions::default() };
    let rep = ground_space(&h, 16, &opts).unwrap();
    let part = krylov_components(&g, MoveSet::BC, 1 << 20).unwrap();
    let uniform: Vec<Vec<f64>> =
        (0..16).map(|c| uniform_sector_state(basis.clone(), &part.members(c)).unwrap().amplitudes).collect();
    let vectors = rep.vectors.as_ref().expect("vectors kept");
    for psi in vectors.iter().take(rep.ground_degeneracy()) {
        let weight: f64 = uniform
            .iter()
            .map(|u| u.iter().zip(&psi.amplitudes).map(|(a, b)| a * b).sum::<f64>().powi(2))
            .sum();
        assert!((weight - 1.0).abs() < 1e-9, "projection weight {weight}");
    }
}

#[test]
fn hex_schmidt_counting_matches_dense() {
    let g = build_hex_torus(2, 2).unwrap();
    let part = column_bipartition(&g, 1).unwrap();
    let closed = collect_closed_loop_configs(&g, 1 << 20).unwrap();
    let basis = Basis::explicit("closed", 12, closed.clone());
    let comps = components_of(&g, closed, MoveSet::HexB).unwrap();
    for c in 0..comps.num_components() {
        let members = comps.members(c);
        let s = schmidt_spectrum_by_counting(&members, &part).unwrap();
        let dense = reduced_density_spectrum(&uniform_sector_state(basis.clone(), &members).unwrap(), &part).unwrap();
        assert_eq!(s.coefficients.len(), dense.len());
        for (a, b) in s.coefficients.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(s.count_sum(), members.len() as u64);
    }
}

#[test]
fn schmidt_csv_layout() {
    let g = build_square_torus(2).unwrap();
    let part = column_bipartition(&g, 1).unwrap();
    let comps = krylov_components(&g, MoveSet::BC, 1 << 20).unwrap();
    let s = schmidt_spectrum_by_counting(&comps.members(0), &part).unwrap();
    let csv = s.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("sigma,N_A,N_B,p"));
    assert_eq!(lines.count(), s.blocks.len());
}

#[test]
fn transfer_matrix_structure() {
    let t = TransferMatrix::boundary();
    assert!(t.is_symmetric());
    assert_eq!(t.characteristic_polynomial(), [0, -4, 2, 6, -5, 1]);
}

#[test]
fn circle_and_line_oracles_agree_for_small_l() {
    for l in 1..=4 {
        assert_eq!(
            nonintersecting_string_oracle(l, Topology::Line).unwrap(),
            nonintersecting_string_oracle(l, Topology::Circle).unwrap()
        );
    }
}

#[test]
fn fpl_is_central_binomial() {
    let brute = |l: u64| -> u64 {
        // strings of l up-steps and l down-steps
        (0u64..1 << (2 * l)).filter(|m| m.count_ones() as u64 == l).count() as u64
    };
    for l in 1..=8 {
        assert_eq!(count_fpl_boundary(l).unwrap().exact, brute(l).to_string());
    }
}

#[test]
fn blc_is_hypergeometric_at_four_s() {
    for l in 1..=12 {
        for s in ["1", "2", "3", "1/2", "5/3"] {
            let w = ColorWeight::parse(s).unwrap();
            let r = hypergeometric_crosscheck(l, &w).unwrap();
            assert!(r.matches_at_4s, "l={l} s={s}");
        }
    }
    let two = ColorWeight::integer(2);
    assert!(hypergeometric_crosscheck(3, &two).unwrap().matches_at_8);
    assert_eq!(blc_sum(1, &two).to_string(), "5");
}
