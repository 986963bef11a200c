//! Per-sample inequalities of the flow constructions.

use std::sync::Arc;

use fppflow_core::flows::{slab_problem, split_hyperrect, surgery_sample, SlabFlowSample};
use fppflow_core::lattice::Terminals;
use fppflow_core::percolation::DEFAULT_BUDGET;
use fppflow_core::{
    is_cutset, max_flow, phi, subadditive_split, tilde_phi, Capacity, CapacityField,
    CylinderKind, CylinderSpec, Direction, Distribution, Height, Hyperrect, Level, Prob,
};
use proptest::prelude::*;

const Q: u64 = 4;

fn two_point(a: u64, b: u64, pb: u128) -> Arc<Distribution> {
    Arc::new(
        Distribution::new(
            Q,
            &[
                (Capacity::Finite(a * Q), Prob::new(10 - pb, 10).unwrap()),
                (Capacity::Finite(b * Q), Prob::new(pb, 10).unwrap()),
            ],
        )
        .unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_is_subadditive(seed in any::<u64>(), diag in any::<bool>()) {
        let dir = if diag { Direction::new(&[1, 1]).unwrap() } else { Direction::axis(2, 1) };
        let b = Hyperrect::canonical(dir, 8).unwrap();
        let g = CapacityField::new(two_point(1, 2, 2), seed);
        let f = g.with_distribution(two_point(1, 3, 2));
        for k in [2u64, 4] {
            let tiles = split_hyperrect(&b, &[k]).unwrap();
            let r = subadditive_split(&b, &tiles, &g, &f, Level::At(Q), DEFAULT_BUDGET).unwrap();
            prop_assert!(r.holds(), "seed {} k {}: {:?} > {:?}", seed, k, r.lhs, r.rhs);
        }
    }

    #[test]
    fn slab_flow_bounds_cylinder_flow_at_threshold(seed in any::<u64>(), diag in any::<bool>()) {
        let dir = if diag { Direction::new(&[1, 2]).unwrap() } else { Direction::axis(2, 1) };
        let rect = Hyperrect::canonical(dir, 8).unwrap();
        let g = CapacityField::new(two_point(0, 1, 5), seed);
        let f = g.with_distribution(two_point(0, 2, 2));
        let s: SlabFlowSample = tilde_phi(&rect, &g, &f, Level::At(Q), DEFAULT_BUDGET).unwrap();
        if s.height.was_threshold() {
            // a bottom-to-top path of the symmetric cylinder enters the slab
            // through V(A) and then stays inside it
            let d = phi(&rect, Height::from_s(s.height.s), &g).unwrap();
            prop_assert!(d.value <= s.flow.value);
        }
        // the slab minimum cut separates V(A) from the top layer and rim
        let problem = slab_problem(&rect, s.height.s).unwrap();
        prop_assert_eq!(max_flow(&problem, &g).unwrap().value, s.flow.value);
    }

    #[test]
    fn surgery_keeps_cut_and_bound_on_event(seed in any::<u64>()) {
        let dist = Arc::new(
            Distribution::new(
                Q,
                &[
                    (Capacity::Finite(Q), Prob::new(9, 10).unwrap()),
                    (Capacity::Finite(20 * Q), Prob::new(1, 10).unwrap()),
                ],
            )
            .unwrap(),
        );
        let g = CapacityField::new(dist, seed);
        let spec = CylinderSpec::new(
            Hyperrect::canonical(Direction::axis(2, 1), 8).unwrap(),
            Height::from_s(3),
            CylinderKind::Symmetric,
        );
        let s = surgery_sample(&spec, 3, &g, 2 * Q, Q, DEFAULT_BUDGET).unwrap();
        if let Some(m) = s.report.max_added {
            prop_assert!(m <= Capacity::Finite(Q));
        }
        if s.event {
            let problem = spec.build_problem(Terminals::TopBottom).unwrap();
            prop_assert!(is_cutset(&s.report.cutset, &problem));
            prop_assert!(s.report.bound_holds());
        }
    }
}
