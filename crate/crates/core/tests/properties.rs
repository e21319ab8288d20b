use std::sync::OnceLock;

use bicolor_loops::counting::{blc_sum, hypergeometric_crosscheck, ColorWeight};
use bicolor_loops::dynamics::{apply_move, Move, MoveSet};
use bicolor_loops::entanglement::fit_area_law;
use bicolor_loops::lattice::{build_square_torus, collect_closed_loop_configs, EdgeConfig, LatticeGeometry, PackedConfig};
use bicolor_loops::operators::{Basis, SparseOperator};
use proptest::prelude::*;

struct Fixture {
    geom: LatticeGeometry,
    closed: Vec<PackedConfig>,
    moves: Vec<Move>,
}

fn l3() -> &'static Fixture {
    static CELL: OnceLock<Fixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let geom = build_square_torus(3).unwrap();
        let closed = collect_closed_loop_configs(&geom, 1 << 22).unwrap();
        let moves = MoveSet::BC.moves(&geom).unwrap();
        Fixture { geom, closed, moves }
    })
}

fn small_operator(dim: usize) -> impl Strategy<Value = SparseOperator> {
    prop::collection::vec((0..dim, 0..dim, -3i64..=3), 0..24).prop_map(move |t| {
        SparseOperator::from_triplets(Basis::explicit("p", 4, (0..dim as u64).collect()), &t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn moves_preserve_closure_label_and_invert(ci in 0usize..8589, mi in 0usize..1000) {
        let fx = l3();
        let c = EdgeConfig::unpack(fx.closed[ci % fx.closed.len()], fx.geom.num_edges());
        let mv = fx.moves[mi % fx.moves.len()];
        if let Some(img) = apply_move(&fx.geom, &c, &mv).unwrap() {
            prop_assert!(img.is_closed(&fx.geom).unwrap());
            prop_assert_eq!(img.winding_label(&fx.geom).unwrap(), c.winding_label(&fx.geom).unwrap());
            prop_assert_eq!(apply_move(&fx.geom, &img, &mv).unwrap(), Some(c));
        }
    }

    #[test]
    fn sparse_product_matches_dense(a in small_operator(6), b in small_operator(6)) {
        let exact = a.mul(&b).unwrap().to_dense();
        let dense = a.to_dense() * b.to_dense();
        prop_assert!((exact - dense).norm() == 0.0);
    }

    #[test]
    fn commutator_is_antisymmetric(a in small_operator(5), b in small_operator(5)) {
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        prop_assert_eq!(ab.add(&ba).unwrap().max_abs(), 0);
        prop_assert_eq!(a.transpose().transpose().triplets(), a.triplets());
    }

    #[test]
    fn fit_recovers_planted_coefficients(alpha in 0.1f64..2.0, beta in -1.0f64..1.0, gamma in -2.0f64..2.0) {
        let pts: Vec<(f64, f64)> = (5..40)
            .map(|l| {
                let x = 2.0 * l as f64;
                (l as f64, alpha * x - beta * x.ln() - gamma)
            })
            .collect();
        let f = fit_area_law(&pts).unwrap();
        prop_assert!((f.alpha - alpha).abs() < 1e-8);
        prop_assert!((f.beta - beta).abs() < 1e-6);
        prop_assert!((f.gamma - gamma).abs() < 1e-6);
    }

    #[test]
    fn color_weight_round_trips(num in 1u64..50, den in 1u64..50) {
        let w = ColorWeight::new(num, den).unwrap();
        prop_assert_eq!(ColorWeight::parse(&w.to_string()).unwrap(), w.clone());
        let r = hypergeometric_crosscheck(4, &w).unwrap();
        prop_assert!(r.matches_at_4s);
        prop_assert_eq!(r.blc, {
            let s = blc_sum(4, &w);
            if s.is_integer() { s.numer().to_string() } else { format!("{}/{}", s.numer(), s.denom()) }
        });
    }
}
