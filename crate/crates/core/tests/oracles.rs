//! Max-flow and cluster results against independent brute-force oracles.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use fppflow_core::distributions::FnField;
use fppflow_core::lattice::{BoxRegion, Terminals};
use fppflow_core::percolation::cluster;
use fppflow_core::{
    brute_force_min_cut, is_cutset, max_flow, validate_stream, Capacity, CapacityField,
    CylinderKind, CylinderSpec, Direction, Distribution, Edge, FlowProblem, Height, Hyperrect,
    Level, Point, Prob, Total,
};
use proptest::prelude::*;

const Q: u64 = 4;

fn grid_problem(w: i64, h: i64) -> FlowProblem {
    let mut verts = Vec::new();
    for x in 0..w {
        for y in 0..h {
            verts.push(Point::new(&[x, y]).unwrap());
        }
    }
    let bottom: Vec<Point> = (0..w).map(|x| Point::new(&[x, 0]).unwrap()).collect();
    let top: Vec<Point> = (0..w).map(|x| Point::new(&[x, h - 1]).unwrap()).collect();
    FlowProblem::new(verts, &bottom, &top).unwrap()
}

fn cap_strategy() -> impl Strategy<Value = Capacity> {
    prop_oneof![
        3 => (0u64..4).prop_map(Capacity::Finite),
        1 => Just(Capacity::Infinite),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn max_flow_matches_brute_force(
        (w, h) in prop_oneof![Just((3i64, 3i64)), Just((2, 4)), Just((4, 2)), Just((2, 3))],
        caps in proptest::collection::vec(cap_strategy(), 14),
    ) {
        let problem = grid_problem(w, h);
        let table: BTreeMap<Edge, Capacity> =
            problem.edges().iter().copied().zip(caps.iter().copied()).collect();
        let field = FnField::new(Q, move |e: &Edge| table[e]);
        let fast = max_flow(&problem, &field).unwrap();
        let slow = brute_force_min_cut(&problem, &field).unwrap();
        prop_assert_eq!(fast.value, slow.value);
        if !fast.value.is_infinite() {
            prop_assert_eq!(&fast.cutset, &slow.cutset);
            prop_assert_eq!(fast.cardinality, slow.cardinality);
            prop_assert!(is_cutset(&fast.cutset, &problem));
            prop_assert!(validate_stream(&fast, &problem, &field));
        }
    }

    #[test]
    fn cluster_matches_union_find(seed in any::<u64>(), open in 1u64..4) {
        let dist = Arc::new(
            Distribution::bernoulli(Q, 1, Prob::new(open as u128, 4).unwrap()).unwrap(),
        );
        let field = CapacityField::new(dist, seed);
        let lo = Point::new(&[0, 0]).unwrap();
        let hi = Point::new(&[5, 5]).unwrap();
        let region = BoxRegion { lo, hi };
        // union-find over all open edges in the box
        let idx = |p: &Point| (p.get(0) * 6 + p.get(1)) as usize;
        let mut parent: Vec<usize> = (0..36).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r { r = p[r]; }
            let mut y = x;
            while p[y] != r { let n = p[y]; p[y] = r; y = n; }
            r
        }
        use fppflow_core::Capacities;
        for x in 0..6 {
            for y in 0..6 {
                let a = Point::new(&[x, y]).unwrap();
                for k in 0..2 {
                    let b = a.step(k, 1);
                    if b.get(k) > 5 { continue; }
                    let e = Edge::between(&a, &b).unwrap();
                    if Level::At(0).opens(field.capacity(&e)) {
                        let (ra, rb) = (find(&mut parent, idx(&a)), find(&mut parent, idx(&b)));
                        parent[ra] = rb;
                    }
                }
            }
        }
        let anchor = Point::new(&[2, 3]).unwrap();
        let c = cluster(&field, Level::At(0), anchor, &region, 1000).unwrap();
        let root = find(&mut parent, idx(&anchor));
        let mut expect = BTreeSet::new();
        for x in 0..6 {
            for y in 0..6 {
                let p = Point::new(&[x, y]).unwrap();
                if find(&mut parent, idx(&p)) == root { expect.insert(p); }
            }
        }
        prop_assert!(c.complete);
        prop_assert_eq!(c.vertices, expect);
    }
}

#[test]
fn seeded_small_cylinders_match_oracle() {
    let dist = Arc::new(
        Distribution::new(
            Q,
            &[
                (Capacity::Finite(0), Prob::new(1, 4).unwrap()),
                (Capacity::Finite(1), Prob::new(1, 4).unwrap()),
                (Capacity::Finite(3), Prob::new(3, 8).unwrap()),
                (Capacity::Infinite, Prob::new(1, 8).unwrap()),
            ],
        )
        .unwrap(),
    );
    let spec = CylinderSpec::new(
        Hyperrect::canonical(Direction::axis(2, 1), 2).unwrap(),
        Height::from_s(1),
        CylinderKind::Symmetric,
    );
    let problem = spec.build_problem(Terminals::TopBottom).unwrap();
    for seed in 0..100 {
        let field = CapacityField::new(dist.clone(), seed);
        let a = max_flow(&problem, &field).unwrap();
        let b = brute_force_min_cut(&problem, &field).unwrap();
        assert_eq!(a.value, b.value, "seed {seed}");
        if a.value != Total::Infinite {
            assert_eq!(a.cutset, b.cutset, "seed {seed}");
        }
    }
}
