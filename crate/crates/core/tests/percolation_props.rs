//! Structural properties of threshold clusters and their boundaries.

use std::sync::Arc;

use fppflow_core::lattice::Everywhere;
use fppflow_core::percolation::{cluster, event_e};
use fppflow_core::{Capacities, Capacity, CapacityField, Distribution, Level, Point, Prob};
use proptest::prelude::*;

const Q: u64 = 8;

fn field(seed: u64) -> CapacityField {
    let d = Distribution::new(
        Q,
        &[
            (Capacity::Finite(0), Prob::new(3, 4).unwrap()),
            (Capacity::Finite(Q), Prob::new(1, 8).unwrap()),
            (Capacity::Finite(2 * Q), Prob::new(1, 8).unwrap()),
        ],
    )
    .unwrap();
    CapacityField::new(Arc::new(d), seed)
}

proptest! {
    #[test]
    fn clusters_shrink_with_level(seed in any::<u64>(), x in -3i64..3, y in -3i64..3) {
        let f = field(seed);
        let a = Point::new(&[x, y]).unwrap();
        let low = cluster(&f, Level::At(0), a, &Everywhere, 100_000).unwrap();
        let high = cluster(&f, Level::At(Q), a, &Everywhere, 100_000).unwrap();
        prop_assert!(low.vertices.contains(&a));
        prop_assert!(high.vertices.is_subset(&low.vertices));
    }

    #[test]
    fn boundary_edges_are_closed(seed in any::<u64>(), k in 0u64..2) {
        let f = field(seed);
        let level = Level::At(k * Q);
        let c = cluster(&f, level, Point::new(&[0, 0]).unwrap(), &Everywhere, 100_000).unwrap();
        let b = c.ext_boundary().unwrap();
        prop_assert!(!b.is_empty());
        for e in &b {
            prop_assert!(!level.opens(f.capacity(e)));
            let (u, v) = e.endpoints();
            prop_assert!(c.vertices.contains(&u) || c.vertices.contains(&v));
        }
    }

    #[test]
    fn event_monotone_in_height(seed in any::<u64>(), h in 1u64..6) {
        let f = field(seed);
        let anchors: Vec<Point> = (0..5).map(|i| Point::new(&[i, 0]).unwrap()).collect();
        if event_e(&f, Level::At(0), &anchors, h, 100_000) {
            prop_assert!(event_e(&f, Level::At(0), &anchors, h + 1, 100_000));
        }
    }
}
