//! Exact max-flow / min-cut on [`FlowProblem`]s.
//!
//! Infinite edges are contracted first (union-find); if that merges a source
//! with a sink the flow is infinite. Otherwise the contracted graph is solved
//! twice with Dinic's algorithm on 128-bit integers: once with lexicographic
//! capacities `c' = c (M + 1) + 1` to extract the minimum-capacity cutset of
//! minimum cardinality (source side of the final residual graph), and once
//! with the plain tick capacities to produce a stream.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::distributions::{Capacities, Capacity, Total};
use crate::error::{Error, Result};
use crate::lattice::{Edge, FlowProblem};

/// Outcome of a max-flow computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutResult {
    /// Flow value in ticks, or infinite.
    pub value: Total,
    /// Minimum-capacity cutset of minimum cardinality, sorted; empty when
    /// the value is infinite.
    pub cutset: Vec<Edge>,
    /// Signed flow per problem edge (positive from base to tip); `None`
    /// when the value is infinite.
    pub stream: Option<Vec<i128>>,
    pub cardinality: usize,
}

impl CutResult {
    fn infinite() -> Self {
        CutResult { value: Total::Infinite, cutset: Vec::new(), stream: None, cardinality: 0 }
    }

    /// The null stream, admissible on every problem.
    pub fn zero_stream(problem: &FlowProblem) -> Self {
        CutResult {
            value: Total::ZERO,
            cutset: Vec::new(),
            stream: Some(vec![0; problem.edges().len()]),
            cardinality: 0,
        }
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let g = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = g;
            x = g;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, keeps representatives deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Dinic's algorithm on an undirected graph with `u128` capacities. Edge
/// `j` becomes arcs `2j` (u -> v) and `2j + 1` (v -> u), both with the full
/// capacity; the flow on `j` is `cap - residual(2j)`.
struct Dinic {
    n: usize,
    start: Vec<u32>,
    arcs: Vec<u32>,
    to: Vec<u32>,
    residual: Vec<u128>,
    level: Vec<i32>,
    iter: Vec<u32>,
}

impl Dinic {
    fn new(n: usize, edges: &[(u32, u32, u128)]) -> Self {
        let mut deg = vec![0u32; n + 1];
        for &(u, v, _) in edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut start = vec![0u32; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + deg[i];
        }
        let mut fill = start.clone();
        let mut arcs = vec![0u32; 2 * edges.len()];
        let mut to = vec![0u32; 2 * edges.len()];
        let mut residual = vec![0u128; 2 * edges.len()];
        for (j, &(u, v, c)) in edges.iter().enumerate() {
            let (a, b) = (2 * j as u32, 2 * j as u32 + 1);
            to[a as usize] = v;
            to[b as usize] = u;
            residual[a as usize] = c;
            residual[b as usize] = c;
            arcs[fill[u as usize] as usize] = a;
            fill[u as usize] += 1;
            arcs[fill[v as usize] as usize] = b;
            fill[v as usize] += 1;
        }
        Dinic { n, start, arcs, to, residual, level: vec![0; n], iter: vec![0; n] }
    }

    fn bfs(&mut self, s: u32, t: u32) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s as usize] = 0;
        let mut q = VecDeque::new();
        q.push_back(s);
        while let Some(u) = q.pop_front() {
            for k in self.start[u as usize]..self.start[u as usize + 1] {
                let a = self.arcs[k as usize] as usize;
                let v = self.to[a] as usize;
                if self.residual[a] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u as usize] + 1;
                    q.push_back(v as u32);
                }
            }
        }
        self.level[t as usize] >= 0
    }

    /// One blocking flow, found with an explicit path stack.
    fn blocking_flow(&mut self, s: u32, t: u32) -> Result<u128> {
        for u in 0..self.n {
            self.iter[u] = self.start[u];
        }
        let mut total: u128 = 0;
        let mut path: Vec<u32> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let push = path.iter().map(|&a| self.residual[a as usize]).min().unwrap_or(0);
                let mut cut_at = path.len();
                for (i, &a) in path.iter().enumerate() {
                    self.residual[a as usize] -= push;
                    self.residual[(a ^ 1) as usize] = self.residual[(a ^ 1) as usize]
                        .checked_add(push)
                        .ok_or(Error::CapacityOverflow)?;
                    if self.residual[a as usize] == 0 && cut_at == path.len() {
                        cut_at = i;
                    }
                }
                total = total.checked_add(push).ok_or(Error::CapacityOverflow)?;
                path.truncate(cut_at);
                u = if cut_at == 0 { s } else { self.to[path[cut_at - 1] as usize] };
                continue;
            }
            let ui = u as usize;
            let mut advanced = false;
            while self.iter[ui] < self.start[ui + 1] {
                let a = self.arcs[self.iter[ui] as usize];
                let v = self.to[a as usize] as usize;
                if self.residual[a as usize] > 0 && self.level[v] == self.level[ui] + 1 {
                    path.push(a);
                    u = v as u32;
                    advanced = true;
                    break;
                }
                self.iter[ui] += 1;
            }
            if !advanced {
                // dead end: retire u and step back
                self.level[ui] = -1;
                match path.pop() {
                    None => return Ok(total),
                    Some(a) => {
                        u = self.to[(a ^ 1) as usize];
                        self.iter[u as usize] += 1;
                    }
                }
            }
        }
    }

    fn max_flow(&mut self, s: u32, t: u32) -> Result<u128> {
        let mut total: u128 = 0;
        while self.bfs(s, t) {
            let f = self.blocking_flow(s, t)?;
            total = total.checked_add(f).ok_or(Error::CapacityOverflow)?;
        }
        Ok(total)
    }

    /// Vertices reachable from `s` in the residual graph.
    fn reachable(&self, s: u32) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[s as usize] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for k in self.start[u as usize]..self.start[u as usize + 1] {
                let a = self.arcs[k as usize] as usize;
                let v = self.to[a] as usize;
                if self.residual[a] > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v as u32);
                }
            }
        }
        seen
    }
}

/// Contracted graph: component id per vertex, super source and sink, and the
/// finite edges between distinct components.
struct Contracted {
    n: usize,
    s: u32,
    t: u32,
    /// `(problem edge index, comp(base), comp(tip), ticks)`
    finite: Vec<(usize, u32, u32, u64)>,
}

fn contract(problem: &FlowProblem, caps: &[Capacity]) -> Option<Contracted> {
    let nv = problem.vertices().len();
    let mut uf = UnionFind::new(nv);
    for (j, &(a, b)) in problem.ends().iter().enumerate() {
        if caps[j].is_infinite() {
            uf.union(a, b);
        }
    }
    let srcs = problem.sources();
    let snks = problem.sinks();
    for w in srcs.windows(2) {
        uf.union(w[0], w[1]);
    }
    for w in snks.windows(2) {
        uf.union(w[0], w[1]);
    }
    if uf.find(srcs[0]) == uf.find(snks[0]) {
        return None;
    }
    let mut id = vec![u32::MAX; nv];
    let mut comp = vec![0u32; nv];
    let mut n = 0u32;
    for v in 0..nv as u32 {
        let r = uf.find(v) as usize;
        if id[r] == u32::MAX {
            id[r] = n;
            n += 1;
        }
        comp[v as usize] = id[r];
    }
    let s = comp[srcs[0] as usize];
    let t = comp[snks[0] as usize];
    let finite = problem
        .ends()
        .iter()
        .enumerate()
        .filter_map(|(j, &(a, b))| {
            let (ca, cb) = (comp[a as usize], comp[b as usize]);
            match caps[j] {
                Capacity::Finite(x) if ca != cb => Some((j, ca, cb, x)),
                _ => None,
            }
        })
        .collect();
    Some(Contracted { n: n as usize, s, t, finite })
}

/// Exact maximal flow, minimal-cardinality minimum cutset and a stream.
pub fn max_flow(problem: &FlowProblem, field: &impl Capacities) -> Result<CutResult> {
    let caps: Vec<Capacity> = problem.edges().iter().map(|e| field.capacity(e)).collect();
    max_flow_with(problem, &caps)
}

/// As [`max_flow`], with capacities listed per problem edge.
pub fn max_flow_with(problem: &FlowProblem, caps: &[Capacity]) -> Result<CutResult> {
    if caps.len() != problem.edges().len() {
        return Err(Error::Domain("one capacity per problem edge is required"));
    }
    let Some(g) = contract(problem, caps) else {
        return Ok(CutResult::infinite());
    };
    let m = problem.edges().len() as u128;
    let t_max = g.finite.iter().map(|f| f.3 as u128).max().unwrap_or(0);
    // the whole lexicographic sum must stay representable
    t_max
        .checked_mul(m + 1)
        .and_then(|x| x.checked_add(1))
        .and_then(|x| x.checked_mul(m.max(1)))
        .ok_or(Error::CapacityOverflow)?;

    let lex: Vec<(u32, u32, u128)> = g
        .finite
        .iter()
        .map(|&(_, a, b, x)| (a, b, x as u128 * (m + 1) + 1))
        .collect();
    let mut dinic = Dinic::new(g.n, &lex);
    let flow_lex = dinic.max_flow(g.s, g.t)?;
    let value = flow_lex / (m + 1);
    let cardinality = (flow_lex % (m + 1)) as usize;
    let side = dinic.reachable(g.s);
    let mut cutset: Vec<Edge> = g
        .finite
        .iter()
        .filter(|&&(_, a, b, _)| side[a as usize] != side[b as usize])
        .map(|&(j, ..)| problem.edges()[j])
        .collect();
    cutset.sort();
    debug_assert_eq!(cutset.len(), cardinality);

    let plain: Vec<(u32, u32, u128)> =
        g.finite.iter().map(|&(_, a, b, x)| (a, b, x as u128)).collect();
    let mut dinic = Dinic::new(g.n, &plain);
    let flow = dinic.max_flow(g.s, g.t)?;
    debug_assert_eq!(flow, value);
    let mut stream = vec![0i128; problem.edges().len()];
    for (k, &(j, _, _, x)) in g.finite.iter().enumerate() {
        stream[j] = x as i128 - dinic.residual[2 * k] as i128;
    }
    route_through_contracted(problem, caps, &mut stream);

    Ok(CutResult { value: Total::Finite(value), cutset, stream: Some(stream), cardinality })
}

/// Carry the flow across infinite edges so that the node law holds at every
/// non-terminal vertex: inside each piece joined by infinite edges, route
/// surpluses along a spanning tree towards a root (a terminal if the piece
/// has one).
fn route_through_contracted(
    problem: &FlowProblem,
    caps: &[Capacity],
    stream: &mut [i128],
) {
    let nv = problem.vertices().len();
    let ends = problem.ends();
    // surplus(v) = inflow - outflow over finite edges
    let mut surplus = vec![0i128; nv];
    for (j, &(a, b)) in ends.iter().enumerate() {
        surplus[a as usize] -= stream[j];
        surplus[b as usize] += stream[j];
    }
    let mut inf_adj: Vec<Vec<(u32, usize)>> = vec![Vec::new(); nv];
    for (j, &(a, b)) in ends.iter().enumerate() {
        if caps[j].is_infinite() {
            inf_adj[a as usize].push((b, j));
            inf_adj[b as usize].push((a, j));
        }
    }
    let mut terminal = vec![false; nv];
    for &v in problem.sources().iter().chain(problem.sinks()) {
        terminal[v as usize] = true;
    }
    let mut seen = vec![false; nv];
    let mut in_tree = vec![false; nv];
    for start in 0..nv {
        if seen[start] || inf_adj[start].is_empty() {
            continue;
        }
        // collect the piece, pick the smallest terminal as root
        let mut piece = vec![start as u32];
        seen[start] = true;
        let mut i = 0;
        while i < piece.len() {
            let u = piece[i] as usize;
            for &(v, _) in &inf_adj[u] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    piece.push(v);
                }
            }
            i += 1;
        }
        let root = piece
            .iter()
            .copied()
            .filter(|&v| terminal[v as usize])
            .min()
            .unwrap_or_else(|| *piece.iter().min().expect("nonempty piece"));
        // BFS tree from the root
        let mut order = vec![root];
        let mut parent: Vec<(u32, usize)> = vec![(u32::MAX, usize::MAX); nv];
        in_tree[root as usize] = true;
        let mut k = 0;
        while k < order.len() {
            let u = order[k];
            for &(v, j) in &inf_adj[u as usize] {
                if !in_tree[v as usize] {
                    in_tree[v as usize] = true;
                    parent[v as usize] = (u, j);
                    order.push(v);
                }
            }
            k += 1;
        }
        for &v in order.iter().skip(1).rev() {
            let sur = surplus[v as usize];
            if sur == 0 {
                continue;
            }
            let (p, j) = parent[v as usize];
            // push `sur` from v to p along edge j
            if ends[j].0 == v {
                stream[j] += sur;
            } else {
                stream[j] -= sur;
            }
            surplus[v as usize] = 0;
            surplus[p as usize] += sur;
        }
    }
}

fn reach_avoiding(problem: &FlowProblem, removed: &[bool]) -> Vec<bool> {
    let adj = problem.adjacency();
    let mut seen = vec![false; problem.vertices().len()];
    let mut stack: Vec<u32> = problem.sources().to_vec();
    for &s in &stack {
        seen[s as usize] = true;
    }
    while let Some(u) = stack.pop() {
        for &(v, j) in &adj[u as usize] {
            if !removed[j as usize] && !seen[v as usize] {
                seen[v as usize] = true;
                stack.push(v);
            }
        }
    }
    seen
}

fn mark(problem: &FlowProblem, edges: &[Edge]) -> Vec<bool> {
    let mut removed = vec![false; problem.edges().len()];
    for e in edges {
        if let Some(j) = problem.edge_index(e) {
            removed[j] = true;
        }
    }
    removed
}

/// Whether removing `edges` disconnects every source from every sink.
pub fn is_cutset(edges: &[Edge], problem: &FlowProblem) -> bool {
    let seen = reach_avoiding(problem, &mark(problem, edges));
    !problem.sinks().iter().any(|&t| seen[t as usize])
}

/// Whether no proper subset of the cutset `edges` is a cutset.
pub fn efficient(edges: &[Edge], problem: &FlowProblem) -> Result<bool> {
    let mut removed = mark(problem, edges);
    let cuts = |removed: &[bool]| {
        let seen = reach_avoiding(problem, removed);
        !problem.sinks().iter().any(|&t| seen[t as usize])
    };
    if !cuts(&removed) {
        return Err(Error::Domain("edge set is not a cutset"));
    }
    // edges outside the problem can always be dropped
    if edges.iter().any(|e| problem.edge_index(e).is_none()) {
        return Ok(false);
    }
    let mut idx: Vec<usize> = edges.iter().filter_map(|e| problem.edge_index(e)).collect();
    idx.sort_unstable();
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return Ok(false);
    }
    for j in idx {
        removed[j] = false;
        let still = cuts(&removed);
        removed[j] = true;
        if still {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Node law at non-terminal vertices, capacity constraint on every edge, and
/// net source outflow equal to the reported value.
pub fn validate_stream(result: &CutResult, problem: &FlowProblem, field: &impl Capacities) -> bool {
    let (Some(stream), Total::Finite(value)) = (&result.stream, result.value) else {
        return false;
    };
    if stream.len() != problem.edges().len() {
        return false;
    }
    let nv = problem.vertices().len();
    let mut net_out = vec![0i128; nv];
    for (j, (&(a, b), e)) in problem.ends().iter().zip(problem.edges()).enumerate() {
        let f = stream[j];
        if let Capacity::Finite(c) = field.capacity(e) {
            if f.unsigned_abs() > c as u128 {
                return false;
            }
        }
        net_out[a as usize] += f;
        net_out[b as usize] -= f;
    }
    let mut terminal = vec![false; nv];
    for &v in problem.sources().iter().chain(problem.sinks()) {
        terminal[v as usize] = true;
    }
    if (0..nv).any(|v| !terminal[v] && net_out[v] != 0) {
        return false;
    }
    let out: i128 = problem.sources().iter().map(|&s| net_out[s as usize]).sum();
    out == value as i128
}

pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Exhaustive minimum over all edge subsets that cut. Minimises capacity,
/// then cardinality, then the number of vertices still reachable from the
/// sources, then the sorted edge encoding.
pub fn brute_force_min_cut(problem: &FlowProblem, field: &impl Capacities) -> Result<CutResult> {
    let m = problem.edges().len();
    if m > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { edges: m, limit: BRUTE_FORCE_LIMIT });
    }
    let caps: Vec<Capacity> = problem.edges().iter().map(|e| field.capacity(e)).collect();
    let mut best: Option<(Total, usize, usize, Vec<Edge>)> = None;
    let mut removed = vec![false; m];
    for mask in 0u32..(1u32 << m) {
        for (j, r) in removed.iter_mut().enumerate() {
            *r = mask >> j & 1 == 1;
        }
        let seen = reach_avoiding(problem, &removed);
        if problem.sinks().iter().any(|&t| seen[t as usize]) {
            continue;
        }
        let cost = (0..m)
            .filter(|&j| removed[j])
            .fold(Total::ZERO, |acc, j| acc.add(caps[j]));
        if cost.is_infinite() {
            continue;
        }
        let card = mask.count_ones() as usize;
        let reach = seen.iter().filter(|&&b| b).count();
        let edges: Vec<Edge> = (0..m).filter(|&j| removed[j]).map(|j| problem.edges()[j]).collect();
        let cand = (cost, card, reach, edges);
        if best.as_ref().map_or(true, |b| cand < *b) {
            best = Some(cand);
        }
    }
    Ok(match best {
        None => CutResult::infinite(),
        Some((value, cardinality, _, cutset)) => {
            CutResult { value, cutset, stream: None, cardinality }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{FnField, DEFAULT_QUANTUM};
    use crate::lattice::Point;
    use alloc::collections::BTreeMap;

    fn pt(c: &[i64]) -> Point {
        Point::new(c).unwrap()
    }

    fn field_from(map: BTreeMap<Edge, Capacity>) -> impl Capacities {
        FnField::new(DEFAULT_QUANTUM, move |e: &Edge| {
            *map.get(e).unwrap_or(&Capacity::Finite(0))
        })
    }

    #[test]
    fn single_edge() {
        let a = pt(&[0, 0]);
        let b = pt(&[1, 0]);
        let prob = FlowProblem::new(vec![a, b], &[a], &[b]).unwrap();
        let e = Edge::between(&a, &b).unwrap();
        let f = field_from([(e, Capacity::Finite(3))].into_iter().collect());
        let r = max_flow(&prob, &f).unwrap();
        assert_eq!(r.value, Total::Finite(3));
        assert_eq!(r.cutset, vec![e]);
        assert_eq!(r.cardinality, 1);
        assert!(validate_stream(&r, &prob, &f));
        assert_eq!(brute_force_min_cut(&prob, &f).unwrap().cutset, r.cutset);
    }

    #[test]
    fn two_parallel_paths_pick_light_edges() {
        let s = pt(&[0, 0]);
        let t = pt(&[2, 0]);
        let u = pt(&[1, 0]);
        let v1 = pt(&[0, 1]);
        let v2 = pt(&[1, 1]);
        let v3 = pt(&[2, 1]);
        // paths: s-u-t (caps 1, 5), s-v1-v2-v3-t (5, 1, 5, 5) with u-v2 light
        let verts = vec![s, t, u, v1, v2, v3];
        let prob = FlowProblem::new(verts, &[s], &[t]).unwrap();
        let mut caps = BTreeMap::new();
        caps.insert(Edge::between(&s, &u).unwrap(), Capacity::Finite(1));
        caps.insert(Edge::between(&u, &t).unwrap(), Capacity::Finite(5));
        caps.insert(Edge::between(&s, &v1).unwrap(), Capacity::Finite(5));
        caps.insert(Edge::between(&v1, &v2).unwrap(), Capacity::Finite(1));
        caps.insert(Edge::between(&v2, &v3).unwrap(), Capacity::Finite(5));
        caps.insert(Edge::between(&v3, &t).unwrap(), Capacity::Finite(5));
        caps.insert(Edge::between(&u, &v2).unwrap(), Capacity::Finite(0));
        let f = field_from(caps);
        let r = max_flow(&prob, &f).unwrap();
        assert_eq!(r.value, Total::Finite(2));
        assert_eq!(r.cardinality, 2);
        let mut light = vec![Edge::between(&s, &u).unwrap(), Edge::between(&v1, &v2).unwrap()];
        light.sort();
        assert_eq!(r.cutset, light);
        let b = brute_force_min_cut(&prob, &f).unwrap();
        assert_eq!((b.value, &b.cutset), (r.value, &r.cutset));
        assert!(validate_stream(&r, &prob, &f));
    }

    #[test]
    fn infinite_bridge() {
        let a = pt(&[0, 0]);
        let b = pt(&[1, 0]);
        let prob = FlowProblem::new(vec![a, b], &[a], &[b]).unwrap();
        let f = FnField::new(DEFAULT_QUANTUM, |_: &Edge| Capacity::Infinite);
        let r = max_flow(&prob, &f).unwrap();
        assert_eq!(r.value, Total::Infinite);
        assert!(r.cutset.is_empty() && r.stream.is_none());
        assert_eq!(brute_force_min_cut(&prob, &f).unwrap().value, Total::Infinite);
    }

    #[test]
    fn flow_routes_through_infinite_edges() {
        // path s - a =inf= b - t
        let pts: Vec<Point> = (0..4).map(|i| pt(&[i, 0])).collect();
        let prob = FlowProblem::new(pts.clone(), &[pts[0]], &[pts[3]]).unwrap();
        let mid = Edge::between(&pts[1], &pts[2]).unwrap();
        let f = FnField::new(DEFAULT_QUANTUM, move |e: &Edge| {
            if *e == mid {
                Capacity::Infinite
            } else {
                Capacity::Finite(2)
            }
        });
        let r = max_flow(&prob, &f).unwrap();
        assert_eq!(r.value, Total::Finite(2));
        assert!(validate_stream(&r, &prob, &f));
        assert!(!r.cutset.contains(&mid));
    }

    #[test]
    fn cutset_predicates() {
        let pts: Vec<Point> = (0..3).map(|i| pt(&[i, 0])).collect();
        let prob = FlowProblem::new(pts.clone(), &[pts[0]], &[pts[2]]).unwrap();
        let e0 = Edge::between(&pts[0], &pts[1]).unwrap();
        let e1 = Edge::between(&pts[1], &pts[2]).unwrap();
        assert!(!is_cutset(&[], &prob));
        assert!(is_cutset(&[e0], &prob));
        assert_eq!(efficient(&[e0], &prob), Ok(true));
        assert_eq!(efficient(&[e0, e1], &prob), Ok(false));
        assert!(efficient(&[], &prob).is_err());
    }

    #[test]
    fn stream_checks() {
        let pts: Vec<Point> = (0..3).map(|i| pt(&[i, 0])).collect();
        let prob = FlowProblem::new(pts.clone(), &[pts[0]], &[pts[2]]).unwrap();
        let f = FnField::new(DEFAULT_QUANTUM, |_: &Edge| Capacity::Finite(1));
        let z = CutResult::zero_stream(&prob);
        assert!(validate_stream(&z, &prob, &f));
        let bad = CutResult { value: Total::Finite(2), stream: Some(vec![2, 2]), ..z.clone() };
        assert!(!validate_stream(&bad, &prob, &f));
        let leaky = CutResult { value: Total::Finite(1), stream: Some(vec![1, 0]), ..z };
        assert!(!validate_stream(&leaky, &prob, &f));
    }

    #[test]
    fn huge_capacities_are_exact() {
        let a = pt(&[0, 0]);
        let b = pt(&[1, 0]);
        let prob = FlowProblem::new(vec![a, b], &[a], &[b]).unwrap();
        let r = max_flow_with(&prob, &[Capacity::Finite(u64::MAX)]).unwrap();
        assert_eq!(r.value, Total::Finite(u64::MAX as u128));
        assert_eq!(r.cardinality, 1);
    }
}
