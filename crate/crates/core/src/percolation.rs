//! Level-`K` percolation of a capacity field: clusters, diameters, exterior
//! edge boundaries and the regularity events.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use crate::distributions::{Capacities, Level};
use crate::error::{Error, Result};
use crate::lattice::{Edge, Point, Region};

/// Default cap on explored vertices.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    Vertex(Point),
    Edge(Edge),
}

/// A connected component of open edges (`capacity > K`) inside a region.
/// `complete` is false when exploration stopped at the vertex budget; the
/// vertex set is then a connected subset of the true cluster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub anchor: Anchor,
    pub level: Level,
    pub vertices: BTreeSet<Point>,
    pub complete: bool,
}

pub(crate) fn explore(
    field: &impl Capacities,
    level: Level,
    starts: &[Point],
    region: &impl Region,
    budget: usize,
) -> (BTreeSet<Point>, bool) {
    let mut seen: BTreeSet<Point> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for s in starts {
        if seen.insert(*s) {
            queue.push_back(*s);
        }
    }
    while let Some(x) = queue.pop_front() {
        for e in x.incident_edges() {
            let (a, b) = e.endpoints();
            let y = if a == x { b } else { a };
            if seen.contains(&y) || !region.contains(&y) || !level.opens(field.capacity(&e)) {
                continue;
            }
            if seen.len() >= budget {
                return (seen, false);
            }
            seen.insert(y);
            queue.push_back(y);
        }
    }
    (seen, true)
}

/// Whether an open path inside `region` leads from `start` to a vertex
/// satisfying `target`. `None` when the budget ran out first.
pub(crate) fn reaches(
    field: &impl Capacities,
    level: Level,
    start: Point,
    region: &impl Region,
    target: impl Fn(&Point) -> bool,
    budget: usize,
) -> Option<bool> {
    if target(&start) {
        return Some(true);
    }
    let mut seen: BTreeSet<Point> = BTreeSet::new();
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for e in x.incident_edges() {
            let (a, b) = e.endpoints();
            let y = if a == x { b } else { a };
            if seen.contains(&y) || !region.contains(&y) || !level.opens(field.capacity(&e)) {
                continue;
            }
            if target(&y) {
                return Some(true);
            }
            if seen.len() >= budget {
                return None;
            }
            seen.insert(y);
            queue.push_back(y);
        }
    }
    Some(false)
}

/// `C_{G,K}(x)` restricted to `region`.
pub fn cluster(
    field: &impl Capacities,
    level: Level,
    anchor: Point,
    region: &impl Region,
    budget: usize,
) -> Result<Cluster> {
    if !region.contains(&anchor) {
        return Err(Error::Domain("anchor outside the region"));
    }
    let (vertices, complete) = explore(field, level, &[anchor], region, budget);
    Ok(Cluster { anchor: Anchor::Vertex(anchor), level, vertices, complete })
}

/// `C_{G,K}(f)`: union of the clusters of the two endpoints of `f`.
pub fn edge_cluster(
    field: &impl Capacities,
    level: Level,
    f: Edge,
    region: &impl Region,
    budget: usize,
) -> Result<Cluster> {
    let (a, b) = f.endpoints();
    if !region.contains(&a) || !region.contains(&b) {
        return Err(Error::Domain("anchor edge outside the region"));
    }
    let (vertices, complete) = explore(field, level, &[a, b], region, budget);
    Ok(Cluster { anchor: Anchor::Edge(f), level, vertices, complete })
}

/// Squared diameter, with a flag telling whether it is only a lower bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Diameter {
    pub squared: u128,
    pub lower_bound_only: bool,
}

impl Diameter {
    pub fn value(&self) -> f64 {
        libm::sqrt(self.squared as f64)
    }

    /// `diam < h`, exactly.
    pub fn less_than(&self, h: u64) -> bool {
        self.squared < h as u128 * h as u128
    }
}

/// Largest squared distance between two points of `pts`.
pub fn diameter_squared<'a>(pts: impl IntoIterator<Item = &'a Point> + Clone) -> u128 {
    let v: Vec<&Point> = pts.into_iter().collect();
    let mut best = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            best = best.max(v[i].dist2(v[j]));
        }
    }
    best
}

impl Cluster {
    pub fn diam(&self) -> Diameter {
        Diameter {
            squared: diameter_squared(self.vertices.iter()),
            lower_bound_only: !self.complete,
        }
    }

    pub fn cardv(&self) -> usize {
        self.vertices.len()
    }

    /// Smallest vertex, used to deduplicate clusters.
    pub fn representative(&self) -> Point {
        *self.vertices.iter().next().expect("clusters are nonempty")
    }

    /// `d_e C`: edges from `C` to a vertex joined to infinity outside `C`.
    /// Infinity is the shell of the bounding box of `C` widened by 2.
    pub fn ext_boundary(&self) -> Result<Vec<Edge>> {
        if !self.complete {
            return Err(Error::Domain("exterior boundary needs a complete cluster"));
        }
        Ok(exterior_boundary(&self.vertices))
    }
}

/// Exterior edge boundary of a finite vertex set.
pub fn exterior_boundary(c: &BTreeSet<Point>) -> Vec<Edge> {
    let Some(first) = c.iter().next() else {
        return Vec::new();
    };
    let d = first.dim();
    let mut lo = *first;
    let mut hi = *first;
    for x in c {
        for k in 0..d {
            lo.set(k, lo.get(k).min(x.get(k)));
            hi.set(k, hi.get(k).max(x.get(k)));
        }
    }
    for k in 0..d {
        lo.set(k, lo.get(k) - 2);
        hi.set(k, hi.get(k) + 2);
    }
    let inside = |x: &Point| (0..d).all(|k| x.get(k) >= lo.get(k) && x.get(k) <= hi.get(k));
    // the corner of the widened box is never in C
    let start = lo;
    let mut outside: BTreeSet<Point> = BTreeSet::new();
    outside.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for y in x.neighbors() {
            if inside(&y) && !c.contains(&y) && outside.insert(y) {
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<Edge> = Vec::new();
    for x in c {
        for y in x.neighbors() {
            if outside.contains(&y) {
                out.push(Edge::between(x, &y).expect("neighbours"));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Cluster lookup shared across anchors: each vertex is explored once.
pub struct ClusterCache<'f, C> {
    field: &'f C,
    level: Level,
    budget: usize,
    owner: BTreeMap<Point, usize>,
    clusters: Vec<(BTreeSet<Point>, bool, u128)>,
}

impl<'f, C: Capacities> ClusterCache<'f, C> {
    pub fn new(field: &'f C, level: Level, budget: usize) -> Self {
        ClusterCache { field, level, budget, owner: BTreeMap::new(), clusters: Vec::new() }
    }

    /// Index of the full-lattice cluster of `x`.
    pub fn id(&mut self, x: &Point) -> usize {
        if let Some(&i) = self.owner.get(x) {
            return i;
        }
        let (set, complete) =
            explore(self.field, self.level, &[*x], &crate::lattice::Everywhere, self.budget);
        let i = self.clusters.len();
        if complete {
            for y in &set {
                self.owner.insert(*y, i);
            }
        } else {
            self.owner.insert(*x, i);
        }
        let d2 = diameter_squared(set.iter());
        self.clusters.push((set, complete, d2));
        i
    }

    pub fn vertices(&self, id: usize) -> &BTreeSet<Point> {
        &self.clusters[id].0
    }

    pub fn complete(&self, id: usize) -> bool {
        self.clusters[id].1
    }

    pub fn diam_squared(&self, id: usize) -> u128 {
        self.clusters[id].2
    }

    /// Squared diameter of `C(f)` and completeness.
    pub fn edge_diam_squared(&mut self, f: &Edge) -> (u128, bool) {
        let (a, b) = f.endpoints();
        let (i, j) = (self.id(&a), self.id(&b));
        if i == j {
            return (self.diam_squared(i), self.complete(i));
        }
        let mut best = self.diam_squared(i).max(self.diam_squared(j));
        for x in self.vertices(i) {
            for y in self.vertices(j) {
                best = best.max(x.dist2(y));
            }
        }
        (best, self.complete(i) && self.complete(j))
    }
}

/// `E_{G,K}(region, h)`: every anchor's full-lattice cluster has diameter
/// less than `h`.
pub fn event_e(
    field: &impl Capacities,
    level: Level,
    anchors: &[Point],
    h: u64,
    budget: usize,
) -> bool {
    let h2 = h as u128 * h as u128;
    let mut cache = ClusterCache::new(field, level, budget);
    anchors.iter().all(|x| {
        let i = cache.id(x);
        cache.complete(i) && cache.diam_squared(i) < h2
    })
}

/// `E'_{G,K}(region, h)` over edge anchors.
pub fn event_e_prime(
    field: &impl Capacities,
    level: Level,
    anchors: &[Edge],
    h: u64,
    budget: usize,
) -> bool {
    let h2 = h as u128 * h as u128;
    let mut cache = ClusterCache::new(field, level, budget);
    anchors.iter().all(|f| {
        let (d2, complete) = cache.edge_diam_squared(f);
        complete && d2 < h2
    })
}

/// One replicate of the sequential exploration: `Y_i = |C(x_i)|` unless
/// `x_i` already lies in an earlier cluster, in which case `Y_i = 0`.
pub fn sequential_cluster_sizes(
    field: &impl Capacities,
    level: Level,
    anchors: &[Point],
    budget: usize,
) -> Vec<u64> {
    let mut covered: BTreeSet<Point> = BTreeSet::new();
    let mut out = Vec::with_capacity(anchors.len());
    for x in anchors {
        if covered.contains(x) {
            out.push(0);
            continue;
        }
        let (set, _) = explore(field, level, &[*x], &crate::lattice::Everywhere, budget);
        out.push(set.len() as u64);
        covered.extend(set);
    }
    out
}

/// `|C(x)|` in the full lattice.
pub fn cluster_size(field: &impl Capacities, level: Level, x: Point, budget: usize) -> u64 {
    explore(field, level, &[x], &crate::lattice::Everywhere, budget).0.len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{Capacity, FnField, DEFAULT_QUANTUM};
    use crate::lattice::{BoxRegion, Everywhere};

    fn pt(c: &[i64]) -> Point {
        Point::new(c).unwrap()
    }

    #[test]
    fn closed_field_gives_singletons() {
        let f = FnField::new(DEFAULT_QUANTUM, |_: &Edge| Capacity::Finite(1));
        let c = cluster(&f, Level::At(1), pt(&[0, 0]), &Everywhere, 100).unwrap();
        assert_eq!(c.cardv(), 1);
        assert_eq!(c.diam().squared, 0);
        let b = c.ext_boundary().unwrap();
        assert_eq!(b.len(), 4);
        let e = Edge::new(pt(&[0, 0]), 0).unwrap();
        let ec = edge_cluster(&f, Level::At(1), e, &Everywhere, 100).unwrap();
        assert_eq!(ec.cardv(), 2);
        assert_eq!(ec.diam().squared, 1);
    }

    #[test]
    fn open_field_fills_region() {
        let f = FnField::new(DEFAULT_QUANTUM, |_: &Edge| Capacity::Finite(0));
        let region = BoxRegion { lo: pt(&[0, 0]), hi: pt(&[2, 2]) };
        let c = cluster(&f, Level::BelowZero, pt(&[1, 1]), &region, 100).unwrap();
        assert_eq!(c.cardv(), 9);
        assert_eq!(c.diam().squared, 8);
        assert!(c.complete);
    }

    #[test]
    fn budget_is_flagged() {
        let f = FnField::new(DEFAULT_QUANTUM, |_: &Edge| Capacity::Finite(0));
        let c = cluster(&f, Level::BelowZero, pt(&[0, 0]), &Everywhere, 50).unwrap();
        assert!(!c.complete);
        assert!(c.diam().lower_bound_only);
        assert!(c.ext_boundary().is_err());
    }

    #[test]
    fn ring_hole_is_excluded() {
        // the 8 points around the origin
        let ring: BTreeSet<Point> = (-1..=1)
            .flat_map(|a| (-1..=1).map(move |b| pt(&[a, b])))
            .filter(|x| *x != pt(&[0, 0]))
            .collect();
        let b = exterior_boundary(&ring);
        assert_eq!(b.len(), 12);
        assert!(b.iter().all(|e| {
            let (x, y) = e.endpoints();
            x != pt(&[0, 0]) && y != pt(&[0, 0])
        }));
    }

    #[test]
    fn events_trivial_cases() {
        let f = FnField::new(DEFAULT_QUANTUM, |_: &Edge| Capacity::Finite(1));
        let anchors: Vec<Point> = (0..5).map(|i| pt(&[i, 0])).collect();
        assert!(event_e(&f, Level::At(1), &anchors, 1, 100));
        assert!(!event_e(&f, Level::At(1), &anchors, 0, 100));
        let edges: Vec<Edge> = anchors.iter().map(|x| Edge::new(*x, 1).unwrap()).collect();
        assert!(event_e_prime(&f, Level::At(1), &edges, 2, 100));
        assert!(!event_e_prime(&f, Level::At(1), &edges, 1, 100));
    }

    #[test]
    fn sequential_zeroing() {
        // everything open along the x axis only
        let f = FnField::new(DEFAULT_QUANTUM, |e: &Edge| {
            if e.axis() == 0 && e.base().get(1) == 0 && (0..3).contains(&e.base().get(0)) {
                Capacity::Finite(5)
            } else {
                Capacity::Finite(0)
            }
        });
        let anchors: Vec<Point> = (0..5).map(|i| pt(&[i, 0])).collect();
        let ys = sequential_cluster_sizes(&f, Level::At(1), &anchors, 100);
        assert_eq!(ys, alloc::vec![4, 0, 0, 0, 1]);
    }
}
