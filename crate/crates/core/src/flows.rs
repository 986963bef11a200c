//! Flow functionals and cutset constructions built on the lattice, max-flow
//! and percolation layers.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::distributions::{total, Capacities, Capacity, Level, Total};
use crate::error::{Error, Result};
use crate::lattice::{
    box_of, boxes_containing, check_box_side, in_box, in_enlarged_box, v_set, CylinderKind,
    CylinderSpec, Direction, Edge, FlowProblem, FnRegion, Height, Hyperrect, Point, Terminals,
};
use crate::maxflow::{is_cutset, max_flow, CutResult};
use crate::percolation::{event_e, event_e_prime, exterior_boundary, explore, reaches, ClusterCache};
use crate::rational::{isqrt_ceil, Q};

/// Symmetric cylinder of height `h` (real) over `pA` for the canonical basis.
pub fn canonical_cylinder(dir: Direction, p: u64, h: u64, kind: CylinderKind) -> Result<CylinderSpec> {
    let rect = Hyperrect::canonical(dir, p)?;
    let height = Height::from_real_ceil(h, 1, &dir)?;
    Ok(CylinderSpec::new(rect, height, kind))
}

/// `phi_G(A, h)`: top-to-bottom flow through the symmetric cylinder.
pub fn phi(rect: &Hyperrect, height: Height, field: &impl Capacities) -> Result<CutResult> {
    let spec = CylinderSpec::new(rect.clone(), height, CylinderKind::Symmetric);
    max_flow(&spec.build_problem(Terminals::TopBottom)?, field)
}

/// `tau_G(A, h)`: flow between the boundaries of the two half cylinders.
pub fn tau(rect: &Hyperrect, height: Height, field: &impl Capacities) -> Result<CutResult> {
    let spec = CylinderSpec::new(rect.clone(), height, CylinderKind::Symmetric);
    max_flow(&spec.build_problem(Terminals::HalfBoundaries)?, field)
}

/// `phi^v_G(A, h)`: flow from `A + h v` to `A` in the one-sided cylinder.
pub fn phi_directed(rect: &Hyperrect, height: Height, field: &impl Capacities) -> Result<CutResult> {
    if height.q() < Q::int(1) {
        return Err(Error::Domain("directed height must be at least 1"));
    }
    let spec = CylinderSpec::new(rect.clone(), height, CylinderKind::Directed);
    max_flow(&spec.build_problem(Terminals::TopBottom)?, field)
}

/// The random slab height in `s`-units.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlabHeight {
    /// Chosen height, in `s`-units.
    pub s: i128,
    /// The deterministic floor `t0` in `s`-units.
    pub threshold_s: i128,
    /// Highest normal coordinate reached by an open cluster from `V(A)`.
    pub reach_s: Option<i128>,
}

impl SlabHeight {
    pub fn was_threshold(&self) -> bool {
        self.s == self.threshold_s
    }
}

/// `a^k` compared with `b` without overflow: `Ordering` of `a^k` vs `b`.
fn pow_ge(a: u128, k: u32, b: u128) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..k {
        match acc.checked_mul(a) {
            Some(v) => acc = v,
            None => return true,
        }
    }
    acc >= b
}

/// Smallest integer `S` (in `s`-units) whose real height `S / |w|` is at
/// least `H^{d-1}(A)^{1 / (2(d-1))}`, i.e.
/// `S^{4(d-1)} >= |w|^{4(d-1)} H^{d-1}(A)^2`.
pub fn slab_threshold(rect: &Hyperrect) -> Result<i128> {
    let m = (rect.dim() - 1) as u32;
    let n2 = rect.normal().norm2() as u128;
    let mut rhs = rect.area_squared()?;
    for _ in 0..2 * m {
        rhs = rhs.checked_mul(n2).ok_or(Error::ArithmeticOverflow)?;
    }
    let guess = libm::pow(rhs as f64, 1.0 / (4 * m) as f64) as u128;
    let mut s = guess.saturating_sub(2);
    while !pow_ge(s, 4 * m, rhs) {
        s += 1;
    }
    Ok(s as i128)
}

/// `H_{F,K0}(A)`: the threshold height, raised to one lattice step above the
/// highest point reached from `V(A)` by edges with `t_F > K0` inside the
/// laterally unbounded half-space above `hyp(A)`.
pub fn slab_height(rect: &Hyperrect, field_f: &impl Capacities, k0: Level, budget: usize) -> Result<SlabHeight> {
    let threshold_s = slab_threshold(rect)?;
    let v: Vec<Point> = v_set(rect);
    if v.is_empty() {
        return Err(Error::Degenerate("V(A) is empty"));
    }
    let vs: BTreeSet<Point> = v.iter().copied().collect();
    let region = FnRegion(|x: &Point| vs.contains(x) || rect.coordinates(x).1 >= 0);
    let (seen, complete) = explore(field_f, k0, &v, &region, budget);
    if !complete {
        return Err(Error::BudgetExceeded { budget });
    }
    let reach_s = seen
        .iter()
        .map(|x| rect.coordinates(x).1)
        .filter(|&s| s >= 0)
        .max();
    let step = rect.normal().max_step() as i128;
    let s = match reach_s {
        Some(r) => threshold_s.max(r + step),
        None => threshold_s,
    };
    Ok(SlabHeight { s, threshold_s, reach_s })
}

/// Lateral margin of the slab window for height `s`: `ceil(s / |w|) + 1`.
pub fn slab_margin(rect: &Hyperrect, s: i128) -> u64 {
    let n2 = rect.normal().norm2() as u128;
    let s2 = (s.max(0) as u128) * (s.max(0) as u128);
    // smallest k with k^2 |w|^2 >= s^2
    let k = isqrt_ceil(s2.div_ceil(n2));
    let k = if k > 0 && (k - 1) * (k - 1) * n2 >= s2 { k - 1 } else { k };
    k as u64 + 1
}

/// The slab flow problem over `A` at height `s`: from `V(A)` to the top
/// layer and lateral rim of the window.
pub fn slab_problem(rect: &Hyperrect, s: i128) -> Result<FlowProblem> {
    let spec = CylinderSpec::new(
        rect.clone(),
        Height::from_s(s),
        CylinderKind::Slab { margin: slab_margin(rect, s) },
    );
    spec.build_problem(Terminals::Slab)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlabFlowSample {
    pub height: SlabHeight,
    pub flow: CutResult,
}

/// `tilde phi_{G,F,K0}(A)`: `G`-flow through the slab of height
/// `H_{F,K0}(A)`.
pub fn tilde_phi(
    rect: &Hyperrect,
    field_g: &impl Capacities,
    field_f: &impl Capacities,
    k0: Level,
    budget: usize,
) -> Result<SlabFlowSample> {
    let height = slab_height(rect, field_f, k0, budget)?;
    let flow = max_flow(&slab_problem(rect, height.s)?, field_g)?;
    Ok(SlabFlowSample { height, flow })
}

/// Cut `B` into `counts[i]` equal pieces along each basis vector.
pub fn split_hyperrect(b: &Hyperrect, counts: &[u64]) -> Result<Vec<Hyperrect>> {
    let m = b.basis().len();
    if counts.len() != m || counts.iter().any(|&c| c == 0 || b.scale() % c != 0) {
        return Err(Error::Domain("split counts must divide the scale, one per basis vector"));
    }
    let ext: Vec<u64> = counts.iter().map(|&c| b.scale() / c).collect();
    let g = ext.iter().fold(0u64, |g, &e| crate::rational::gcd_u128(g as u128, e as u128) as u64);
    let basis: Vec<Point> = b
        .basis()
        .iter()
        .zip(&ext)
        .map(|(f, &e)| f.scale((e / g) as i64))
        .collect();
    let mut out = Vec::new();
    let total: u64 = counts.iter().product();
    for idx in 0..total {
        let mut r = idx;
        let mut origin = b.origin();
        for i in (0..m).rev() {
            let k = r % counts[i];
            r /= counts[i];
            origin = origin.add(&b.basis()[i].scale((k * ext[i]) as i64));
        }
        out.push(Hyperrect::new(origin, basis.clone(), g, *b.normal())?);
    }
    Ok(out)
}

/// Check that `tiles` tile `b`: same normal, parallel bases, in `hyp(B)`,
/// disjoint interiors and total volume equal to that of `B`.
pub fn validate_tiling(b: &Hyperrect, tiles: &[Hyperrect]) -> Result<()> {
    let m = b.basis().len();
    if tiles.is_empty() {
        return Err(Error::Domain("empty tiling"));
    }
    // each tile as a box of B-coordinates lambda in [lo_i, hi_i]
    let mut boxes: Vec<Vec<(Q, Q)>> = Vec::new();
    for t in tiles {
        if t.normal() != b.normal() || t.basis().len() != m {
            return Err(Error::Domain("tile normal differs from B"));
        }
        if b.coordinates(&t.origin()).1 != 0 {
            return Err(Error::Domain("tile is not in the hyperplane of B"));
        }
        let (a, _) = b.coordinates(&t.origin());
        let mut bx = Vec::with_capacity(m);
        // basis vectors of the tile must be positive multiples of B's, in order
        for i in 0..m {
            let f = &t.basis()[i];
            let fb = &b.basis()[i];
            let nb = fb.norm2();
            let dot = f.dot(fb.coords());
            // parallel and same orientation iff (f.fb)^2 = |f|^2 |fb|^2 and f.fb > 0
            if dot <= 0 || dot * dot != f.norm2() * nb {
                return Err(Error::Domain("tile basis not parallel to B's"));
            }
            let lo = Q::new(a[i], nb).reduced();
            let len = Q::new(dot * t.scale() as i128, nb).reduced();
            bx.push((lo, lo.add(len)));
        }
        for &(lo, hi) in &bx {
            if lo < Q::int(0) || hi > Q::int(b.scale() as i128) {
                return Err(Error::Domain("tile sticks out of B"));
            }
        }
        boxes.push(bx);
    }
    for i in 0..boxes.len() {
        for j in 0..i {
            let overlap = (0..m).all(|k| {
                let (a, b2) = boxes[i][k];
                let (c, d) = boxes[j][k];
                a.max(c) < b2.min(d)
            });
            if overlap {
                return Err(Error::Domain("tiles overlap"));
            }
        }
    }
    let mut vol = Q::int(0);
    for bx in &boxes {
        let mut v = Q::int(1);
        for &(lo, hi) in bx {
            v = v.mul(hi.add(Q::new(-lo.n, lo.d)));
        }
        vol = vol.add(v);
    }
    if vol != Q::int((b.scale() as i128).pow(m as u32)) {
        return Err(Error::Domain("tiles do not cover B"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitReport {
    pub whole: SlabFlowSample,
    pub parts: Vec<SlabFlowSample>,
    pub lhs: Total,
    pub rhs: Total,
}

impl SplitReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Evaluate `tilde phi(B) <= sum_i tilde phi(A_i)` under one coupling.
pub fn subadditive_split(
    b: &Hyperrect,
    tiles: &[Hyperrect],
    field_g: &impl Capacities,
    field_f: &impl Capacities,
    k0: Level,
    budget: usize,
) -> Result<SplitReport> {
    validate_tiling(b, tiles)?;
    let whole = tilde_phi(b, field_g, field_f, k0, budget)?;
    let parts = tiles
        .iter()
        .map(|t| tilde_phi(t, field_g, field_f, k0, budget))
        .collect::<Result<Vec<_>>>()?;
    let rhs = parts.iter().fold(Total::ZERO, |acc, s| acc.plus(s.flow.value));
    Ok(SplitReport { lhs: whole.flow.value, rhs, whole, parts })
}

/// Outcome of replacing heavy edges of a truncated-law cutset by cluster
/// boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryReport {
    /// `E'(p)`, sorted.
    pub cutset: Vec<Edge>,
    /// `F(p)`: edges of `E` with `t_G >= K`.
    pub heavy: Vec<Edge>,
    /// Distinct exterior boundaries `S_i` (whole, not cut to the region).
    pub boundaries: Vec<Vec<Edge>>,
    /// `T_G(E')`.
    pub lhs: Total,
    /// `T_{G^K}(E) + K0 sum_i |S_i|`, in ticks.
    pub rhs: Total,
    /// Largest `G`-capacity among the added edges.
    pub max_added: Option<Capacity>,
}

impl SurgeryReport {
    pub fn bound_holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// `E'(p) = (E \ F(p)) u U_i (S_i n region)` with `S_i` the distinct
/// `d_e C_{G,K0}(f)`, `f in F(p)`. `e` must be a cutset of `problem`.
pub fn cutset_surgery(
    e: &[Edge],
    problem: &FlowProblem,
    field_g: &impl Capacities,
    k: u64,
    k0: u64,
    budget: usize,
) -> Result<SurgeryReport> {
    if k0 >= k {
        return Err(Error::Domain("surgery needs K0 < K"));
    }
    let heavy: Vec<Edge> = e
        .iter()
        .copied()
        .filter(|f| field_g.capacity(f) >= Capacity::Finite(k))
        .collect();
    let mut boundaries: BTreeSet<Vec<Edge>> = BTreeSet::new();
    let mut done: BTreeSet<Point> = BTreeSet::new();
    for f in &heavy {
        let (a, _) = f.endpoints();
        if done.contains(&a) {
            continue;
        }
        let (set, complete) =
            explore(field_g, Level::At(k0), &[a, f.tip()], &crate::lattice::Everywhere, budget);
        if !complete {
            return Err(Error::BudgetExceeded { budget });
        }
        boundaries.insert(exterior_boundary(&set));
        done.extend(set);
    }
    let heavy_set: BTreeSet<Edge> = heavy.iter().copied().collect();
    let mut out: BTreeSet<Edge> = e.iter().copied().filter(|x| !heavy_set.contains(x)).collect();
    let mut max_added: Option<Capacity> = None;
    for s in &boundaries {
        for x in s {
            if problem.edge_index(x).is_some() {
                let c = field_g.capacity(x);
                max_added = Some(max_added.map_or(c, |m| m.max(c)));
                out.insert(*x);
            }
        }
    }
    let cutset: Vec<Edge> = out.into_iter().collect();
    let lhs = total(field_g, &cutset);
    let truncated = crate::distributions::TruncatedField { inner: field_g, level: k };
    let n_boundary: u128 = boundaries.iter().map(|s| s.len() as u128).sum();
    let rhs = total(&truncated, e).plus(Total::Finite(k0 as u128 * n_boundary));
    Ok(SurgeryReport {
        cutset,
        heavy,
        boundaries: boundaries.into_iter().collect(),
        lhs,
        rhs,
        max_added,
    })
}

/// Result of the surgery pipeline on one cylinder sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgerySample {
    pub truncated: CutResult,
    pub full: CutResult,
    pub event: bool,
    pub report: SurgeryReport,
    pub is_cutset: bool,
}

/// Solve under `G^K`, perform the surgery, and evaluate `E'_{G,K0}(cyl, h)`.
pub fn surgery_sample(
    spec: &CylinderSpec,
    h: u64,
    field_g: &impl Capacities,
    k: u64,
    k0: u64,
    budget: usize,
) -> Result<SurgerySample> {
    let problem = spec.build_problem(Terminals::TopBottom)?;
    let truncated_field = crate::distributions::TruncatedField { inner: field_g, level: k };
    let truncated = max_flow(&problem, &truncated_field)?;
    let full = max_flow(&problem, field_g)?;
    let event = event_e_prime(field_g, Level::At(k0), problem.edges(), h, budget);
    let report = cutset_surgery(&truncated.cutset, &problem, field_g, k, k0, budget)?;
    let is_cut = is_cutset(&report.cutset, &problem);
    Ok(SurgerySample { truncated, full, event, report, is_cutset: is_cut })
}

/// The zero-regime cutset `E'(A, l)` and its bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroCutset {
    pub cutset: Vec<Edge>,
    /// `T_G(E')`.
    pub capacity: Total,
    /// Number of `x in A` with `F_{x,l}`.
    pub connected: usize,
    /// `K0 sum_{x : F_{x,l}} |d_e C_{G,K0}(x)|`, in ticks.
    pub bound: Total,
    /// `sum_{x : F_{x,l}} |C_{G,K0}(x)|`.
    pub r_sum: u64,
    /// `E_{G,K0}(cyl^v(A, l), l)`.
    pub event: bool,
    pub is_cutset: bool,
}

/// Build `E'(A, l)` in the straight directed cylinder of height `l` over
/// `A = [0, p]^{d-1} x {0}` (axis normal `e_d`).
pub fn zero_cutset(p: u64, l: u64, field_g: &impl Capacities, k0: u64, budget: usize) -> Result<ZeroCutset> {
    zero_cutset_in(p, l, 2, field_g, k0, budget)
}

/// As [`zero_cutset`] in dimension `d`.
pub fn zero_cutset_in(
    p: u64,
    l: u64,
    d: usize,
    field_g: &impl Capacities,
    k0: u64,
    budget: usize,
) -> Result<ZeroCutset> {
    if l == 0 {
        return Err(Error::Domain("height must be positive"));
    }
    let dir = Direction::axis(d, d - 1);
    let rect = Hyperrect::canonical(dir, p)?;
    let spec = CylinderSpec::new(rect.clone(), Height::from_s(l as i128), CylinderKind::Directed);
    let problem = spec.build_problem(Terminals::TopBottom)?;
    let top = l as i64;
    let half_space = FnRegion(|x: &Point| x.get(d - 1) >= 0);
    let strip = FnRegion(|x: &Point| (0..=top).contains(&x.get(d - 1)));
    let mut out: BTreeSet<Edge> = BTreeSet::new();
    let mut connected = 0;
    let mut bound_edges: u128 = 0;
    let mut r_sum: u64 = 0;
    let mut seen_zero: BTreeMap<Point, ()> = BTreeMap::new();
    let mut cache = ClusterCache::new(field_g, Level::At(k0), budget);
    for x in rect.lattice_points() {
        // F_{x,l}: a path of positive edges from x to level l in the half space
        let f_holds = reaches(field_g, Level::At(0), x, &strip, |y| y.get(d - 1) == top, budget)
            .ok_or(Error::BudgetExceeded { budget })?;
        let boundary = if f_holds {
            connected += 1;
            let id = cache.id(&x);
            if !cache.complete(id) {
                return Err(Error::BudgetExceeded { budget });
            }
            let set = cache.vertices(id);
            r_sum += set.len() as u64;
            let b = exterior_boundary(set);
            bound_edges += b.len() as u128;
            b
        } else {
            if seen_zero.contains_key(&x) {
                continue;
            }
            let (set, complete) = explore(field_g, Level::At(0), &[x], &half_space, budget);
            if !complete {
                return Err(Error::BudgetExceeded { budget });
            }
            for y in &set {
                seen_zero.insert(*y, ());
            }
            exterior_boundary(&set)
        };
        out.extend(boundary.into_iter().filter(|e| problem.edge_index(e).is_some()));
    }
    let cutset: Vec<Edge> = out.into_iter().collect();
    let capacity = total(field_g, &cutset);
    let event = event_e(field_g, Level::At(k0), problem.vertices(), l, budget);
    let is_cut = is_cutset(&cutset, &problem);
    Ok(ZeroCutset {
        capacity,
        connected,
        bound: Total::Finite(k0 as u128 * bound_edges),
        r_sum,
        event,
        is_cutset: is_cut,
        cutset,
    })
}

/// Flow across the annulus `Lambda'_L(i) \ Lambda_L(i)`: from the vertices
/// at sup-distance `L/2` of `L i` to those at sup-distance `3L/2`.
pub fn annulus_problem(l: i64, i: &Point) -> Result<FlowProblem> {
    check_box_side(l)?;
    let d = i.dim();
    let c = i.scale(l);
    let r_in = l / 2;
    let r_out = 3 * l / 2;
    let lo = {
        let mut p = c;
        for k in 0..d {
            p.set(k, c.get(k) - r_out);
        }
        p
    };
    let hi = {
        let mut p = c;
        for k in 0..d {
            p.set(k, c.get(k) + r_out);
        }
        p
    };
    let verts = crate::lattice::scan_box(&lo, &hi, |x| x.sub(&c).norm_inf() >= r_in);
    let sources: Vec<Point> = verts.iter().copied().filter(|x| x.sub(&c).norm_inf() == r_in).collect();
    let sinks: Vec<Point> = verts.iter().copied().filter(|x| x.sub(&c).norm_inf() == r_out).collect();
    FlowProblem::new(verts, &sources, &sinks)
}

/// `phi_G(L, i)`.
pub fn annulus_flow(l: i64, i: &Point, field: &impl Capacities) -> Result<CutResult> {
    max_flow(&annulus_problem(l, i)?, field)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnulusReport {
    pub phi: CutResult,
    /// Box indices `J` with the annulus flow of each.
    pub boxes: Vec<(Point, Total)>,
    pub rhs: Total,
}

impl AnnulusReport {
    pub fn holds(&self) -> bool {
        self.phi.value <= self.rhs
    }
}

/// Indices of the `L`-boxes meeting the straight hyperrectangle `rect`.
fn boxes_meeting(rect: &Hyperrect, l: i64) -> Result<Vec<Point>> {
    let d = rect.dim();
    let axis = d - 1;
    if rect.normal().w() != Point::unit(d, axis).coords() {
        return Err(Error::Domain("annulus decomposition needs the axis normal e_d"));
    }
    for (k, f) in rect.basis().iter().enumerate() {
        if f.coords() != Point::unit(d, k).coords() {
            return Err(Error::Domain("annulus decomposition needs the coordinate basis"));
        }
    }
    let o = rect.origin();
    let p = rect.scale() as i64;
    let lo = box_of(l, &o);
    let hi = box_of(l, &o.add(&Point::new(&[p; crate::lattice::MAX_DIM][..d]).unwrap().sub(&Point::unit(d, axis).scale(p))));
    let mut lo = lo.step(0, 0);
    let mut hi = hi;
    for k in 0..d {
        lo.set(k, lo.get(k) - 1);
        hi.set(k, hi.get(k) + 1);
    }
    let out = crate::lattice::scan_box(&lo, &hi, |i| {
        (0..d).all(|k| {
            let (a, b) = (l * i.get(k) - l / 2, l * i.get(k) + l / 2);
            let (c, e) = if k == axis { (o.get(k), o.get(k)) } else { (o.get(k), o.get(k) + p) };
            a.max(c) <= b.min(e)
        })
    });
    Ok(out)
}

/// Evaluate `phi_G(pA, h) <= sum_{i in J} phi_G(L, i)` for a straight
/// symmetric cylinder, `J` the boxes meeting `pA`.
pub fn annulus_decomposition(spec: &CylinderSpec, l: i64, field: &impl Capacities) -> Result<AnnulusReport> {
    check_box_side(l)?;
    if spec.kind != CylinderKind::Symmetric {
        return Err(Error::Domain("annulus decomposition needs a symmetric cylinder"));
    }
    let j = boxes_meeting(&spec.rect, l)?;
    let (b1, b2) = spec.top_bottom()?;
    for i in &j {
        let meets1 = b1.iter().any(|x| in_enlarged_box(l, i, x));
        let meets2 = b2.iter().any(|x| in_enlarged_box(l, i, x));
        if meets1 && meets2 {
            return Err(Error::Domain("an enlarged box meets both faces of the cylinder"));
        }
    }
    let phi = max_flow(&spec.build_problem(Terminals::TopBottom)?, field)?;
    let mut boxes = Vec::with_capacity(j.len());
    let mut rhs = Total::ZERO;
    for i in j {
        let v = annulus_flow(l, &i, field)?.value;
        rhs = rhs.plus(v);
        boxes.push((i, v));
    }
    Ok(AnnulusReport { phi, boxes, rhs })
}

/// `Gamma(E)`: the `L`-boxes met by the edges of `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnimalCoarsening {
    pub l: i64,
    pub boxes: BTreeSet<Point>,
}

impl AnimalCoarsening {
    /// `Z^d`-connectedness of the box set.
    pub fn is_connected(&self) -> bool {
        let Some(&first) = self.boxes.iter().next() else {
            return true;
        };
        let mut seen: BTreeSet<Point> = BTreeSet::new();
        seen.insert(first);
        let mut stack = vec![first];
        while let Some(x) = stack.pop() {
            for y in x.neighbors() {
                if self.boxes.contains(&y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.len() == self.boxes.len()
    }

    /// `|Gamma(E)| L / |E|`.
    pub fn ratio(&self, edges: usize) -> f64 {
        if edges == 0 {
            0.0
        } else {
            self.boxes.len() as f64 * self.l as f64 / edges as f64
        }
    }
}

pub fn animal(edges: &[Edge], l: i64) -> Result<AnimalCoarsening> {
    check_box_side(l)?;
    let mut boxes = BTreeSet::new();
    for e in edges {
        let (a, b) = e.endpoints();
        boxes.extend(boxes_containing(l, &a));
        boxes.extend(boxes_containing(l, &b));
    }
    debug_assert!(edges.iter().all(|e| boxes.iter().any(|i| in_box(l, i, &e.base()))));
    Ok(AnimalCoarsening { l, boxes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{FnField, DEFAULT_QUANTUM};
    use crate::maxflow::{brute_force_min_cut, efficient};

    const Q1: u64 = DEFAULT_QUANTUM;

    fn constant(c: u64) -> FnField<impl Fn(&Edge) -> Capacity> {
        FnField::new(Q1, move |_: &Edge| Capacity::Finite(c))
    }

    fn axis_rect(p: u64) -> Hyperrect {
        Hyperrect::canonical(Direction::axis(2, 1), p).unwrap()
    }

    #[test]
    fn constant_field_counts_columns() {
        for p in [4u64, 8] {
            let r = phi(&axis_rect(p), Height::from_s(2), &constant(Q1)).unwrap();
            assert_eq!(r.value, Total::Finite((p as u128 + 1) * Q1 as u128));
        }
        let r = phi(&axis_rect(4), Height::from_s(2), &constant(0)).unwrap();
        assert_eq!(r.value, Total::ZERO);
    }

    #[test]
    fn directed_example() {
        let r = phi_directed(&axis_rect(3), Height::from_s(3), &constant(Q1)).unwrap();
        assert_eq!(r.value, Total::Finite(4 * Q1 as u128));
    }

    #[test]
    fn tau_matches_phi_on_constant_field() {
        let f = constant(Q1);
        let a = phi(&axis_rect(4), Height::from_s(2), &f).unwrap();
        let b = tau(&axis_rect(4), Height::from_s(2), &f).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn threshold_values() {
        assert_eq!(slab_threshold(&axis_rect(16)).unwrap(), 4);
        assert_eq!(slab_threshold(&axis_rect(4)).unwrap(), 2);
        assert_eq!(slab_threshold(&axis_rect(5)).unwrap(), 3);
        let r3 = Hyperrect::canonical(Direction::axis(3, 2), 16).unwrap();
        assert_eq!(slab_threshold(&r3).unwrap(), 4);
        let diag = Hyperrect::canonical(Direction::new(&[1, 1]).unwrap(), 8).unwrap();
        // area 8 sqrt 2, t0 = (8 sqrt 2)^(1/2) ~ 3.36, S >= t0 sqrt 2 ~ 4.76
        assert_eq!(slab_threshold(&diag).unwrap(), 5);
    }

    #[test]
    fn slab_height_examples() {
        let rect = axis_rect(4);
        let h = slab_height(&rect, &constant(Q1), Level::At(Q1), 1000).unwrap();
        assert_eq!(h.s, 2);
        assert!(h.was_threshold());
        // open column from (1,-1) up to (1,5)
        let col = FnField::new(Q1, |e: &Edge| {
            let b = e.base();
            if e.axis() == 1 && b.get(0) == 1 && (-1..5).contains(&b.get(1)) {
                Capacity::Finite(5 * Q1)
            } else {
                Capacity::Finite(Q1)
            }
        });
        let h = slab_height(&rect, &col, Level::At(Q1), 1000).unwrap();
        assert_eq!(h.s, 6);
    }

    #[test]
    fn tilde_phi_constant_matches_oracle_size() {
        let rect = axis_rect(4);
        let s = tilde_phi(&rect, &constant(Q1), &constant(Q1), Level::At(Q1), 1000).unwrap();
        assert_eq!(s.height.s, 2);
        // V(A) has 5 points, each a single edge into the slab
        assert_eq!(s.flow.value, Total::Finite(5 * Q1 as u128));
        assert_eq!(s.flow.cardinality, 5);
    }

    #[test]
    fn split_and_validate() {
        let b = axis_rect(8);
        let tiles = split_hyperrect(&b, &[2]).unwrap();
        assert_eq!(tiles.len(), 2);
        validate_tiling(&b, &tiles).unwrap();
        assert!(validate_tiling(&b, &tiles[..1]).is_err());
        let mut dup = tiles.clone();
        dup[1] = dup[0].clone();
        assert!(validate_tiling(&b, &dup).is_err());
        let b3 = Hyperrect::canonical(Direction::axis(3, 2), 4).unwrap();
        let t2 = split_hyperrect(&b3, &[2, 1]).unwrap();
        validate_tiling(&b3, &t2).unwrap();
        assert_eq!(t2[0].scale(), 2);
        let t4 = split_hyperrect(&b3, &[2, 2]).unwrap();
        validate_tiling(&b3, &t4).unwrap();
    }

    #[test]
    fn split_constant_is_subadditive() {
        let b = axis_rect(8);
        let tiles = split_hyperrect(&b, &[2]).unwrap();
        let f = constant(Q1);
        let r = subadditive_split(&b, &tiles, &f, &f, Level::At(Q1), 1000).unwrap();
        assert!(r.holds());
        let one = subadditive_split(&b, &[b.clone()], &f, &f, Level::At(Q1), 1000).unwrap();
        assert_eq!(one.lhs, one.rhs);
    }

    #[test]
    fn surgery_without_heavy_edges_is_identity() {
        let spec = canonical_cylinder(Direction::axis(2, 1), 4, 2, CylinderKind::Symmetric).unwrap();
        let f = constant(Q1);
        let s = surgery_sample(&spec, 2, &f, 2 * Q1, Q1, 1000).unwrap();
        assert!(s.report.heavy.is_empty());
        assert_eq!(s.report.cutset, s.truncated.cutset);
    }

    #[test]
    fn surgery_single_heavy_edge() {
        // one heavy vertical edge at (2,0)-(2,1); others at 1
        let heavy = Edge::new(Point::new(&[2, 0]).unwrap(), 1).unwrap();
        let f = FnField::new(Q1, move |e: &Edge| {
            if *e == heavy {
                Capacity::Finite(100 * Q1)
            } else {
                Capacity::Finite(Q1)
            }
        });
        let spec = canonical_cylinder(Direction::axis(2, 1), 4, 2, CylinderKind::Symmetric).unwrap();
        let problem = spec.build_problem(Terminals::TopBottom).unwrap();
        let r = cutset_surgery(&[heavy], &problem, &f, 10 * Q1, Q1, 1000);
        let rep = r.unwrap();
        assert_eq!(rep.heavy, vec![heavy]);
        assert_eq!(rep.boundaries.len(), 1);
        assert_eq!(rep.boundaries[0].len(), 6);
        assert!(rep.max_added.unwrap() <= Capacity::Finite(Q1));
    }

    #[test]
    fn zero_field_zero_cutset() {
        let z = zero_cutset(4, 2, &constant(0), Q1, 1000).unwrap();
        assert_eq!(z.capacity, Total::ZERO);
        assert!(z.is_cutset);
        assert_eq!(z.connected, 0);
    }

    #[test]
    fn positive_field_zero_cutset_on_event() {
        let z = zero_cutset(4, 2, &constant(Q1), Q1, 1000).unwrap();
        assert_eq!(z.connected, 5);
        assert!(z.event);
        assert!(z.is_cutset);
        assert!(z.capacity <= z.bound);
    }

    #[test]
    fn annulus_basics() {
        let i = Point::new(&[0, 0]).unwrap();
        let zero = annulus_flow(4, &i, &constant(0)).unwrap();
        assert_eq!(zero.value, Total::ZERO);
        // p = 4 centered at the origin, L = 8: one box; h large enough
        let rect = axis_rect(4).with_origin(Point::new(&[-2, 0]).unwrap()).unwrap();
        let spec = CylinderSpec::new(rect, Height::from_s(13), CylinderKind::Symmetric);
        let rep = annulus_decomposition(&spec, 8, &constant(Q1)).unwrap();
        assert_eq!(rep.boxes.len(), 1);
        assert!(rep.holds());
        let bad = CylinderSpec::new(axis_rect(4), Height::from_s(2), CylinderKind::Symmetric);
        assert!(annulus_decomposition(&bad, 4, &constant(Q1)).is_err());
    }

    #[test]
    fn animal_examples() {
        assert!(animal(&[], 4).unwrap().boxes.is_empty());
        let e = Edge::new(Point::new(&[0, 0]).unwrap(), 0).unwrap();
        assert_eq!(animal(&[e], 4).unwrap().boxes.len(), 1);
        let spec = canonical_cylinder(Direction::axis(2, 1), 8, 3, CylinderKind::Symmetric).unwrap();
        let problem = spec.build_problem(Terminals::TopBottom).unwrap();
        let r = max_flow(&problem, &constant(Q1)).unwrap();
        assert_eq!(efficient(&r.cutset, &problem), Ok(true));
        assert!(animal(&r.cutset, 4).unwrap().is_connected());
    }

    #[test]
    fn small_constant_cylinder_matches_oracle() {
        let spec = canonical_cylinder(Direction::axis(2, 1), 2, 1, CylinderKind::Symmetric).unwrap();
        let problem = spec.build_problem(Terminals::TopBottom).unwrap();
        let f = constant(Q1);
        let a = max_flow(&problem, &f).unwrap();
        let b = brute_force_min_cut(&problem, &f).unwrap();
        assert_eq!((a.value, a.cutset), (b.value, b.cutset));
    }
}
