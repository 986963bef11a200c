//! Exact geometry of `Z^d`.
//!
//! A hyperrectangle `pA` is `origin + sum_i lambda_i f_i` with
//! `lambda_i in [0, p]`, where the `f_i` are pairwise orthogonal integer
//! vectors orthogonal to the normal `w`. For a lattice point `x` the
//! integers `a_i = (x - origin) . f_i` and `s = (x - origin) . w` decide
//! membership exactly: `lambda_i = a_i / |f_i|^2` and the real normal
//! coordinate is `s / |w|`. Heights are therefore stored in `s`-units.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::rational::{gcd_i64, isqrt_ceil, Interval, Q};

pub const MAX_DIM: usize = 6;

/// A lattice point of `Z^d`, `2 <= d <= MAX_DIM`. Unused coordinates are 0,
/// so the derived order is lexicographic on the used coordinates.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    dim: u8,
    c: [i64; MAX_DIM],
}

impl Point {
    pub fn new(coords: &[i64]) -> Result<Self> {
        let d = coords.len();
        if !(1..=MAX_DIM).contains(&d) {
            return Err(Error::Dimension(d));
        }
        let mut c = [0; MAX_DIM];
        c[..d].copy_from_slice(coords);
        Ok(Point { dim: d as u8, c })
    }

    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        Point { dim: dim as u8, c: [0; MAX_DIM] }
    }

    /// The unit vector `e_k`.
    pub fn unit(dim: usize, k: usize) -> Self {
        let mut p = Self::zero(dim);
        p.c[k] = 1;
        p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[i64] {
        &self.c[..self.dim as usize]
    }

    #[inline]
    pub fn get(&self, k: usize) -> i64 {
        self.c[k]
    }

    #[inline]
    pub fn set(&mut self, k: usize, v: i64) {
        self.c[k] = v;
    }

    #[inline]
    pub fn add(&self, o: &Point) -> Point {
        let mut r = *self;
        for k in 0..self.dim() {
            r.c[k] += o.c[k];
        }
        r
    }

    #[inline]
    pub fn sub(&self, o: &Point) -> Point {
        let mut r = *self;
        for k in 0..self.dim() {
            r.c[k] -= o.c[k];
        }
        r
    }

    pub fn scale(&self, m: i64) -> Point {
        let mut r = *self;
        for k in 0..self.dim() {
            r.c[k] *= m;
        }
        r
    }

    #[inline]
    pub fn step(&self, k: usize, delta: i64) -> Point {
        let mut r = *self;
        r.c[k] += delta;
        r
    }

    #[inline]
    pub fn dot(&self, v: &[i64]) -> i128 {
        self.coords()
            .iter()
            .zip(v)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum()
    }

    pub fn norm2(&self) -> i128 {
        self.dot(self.coords())
    }

    pub fn norm_inf(&self) -> i64 {
        self.coords().iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn dist2(&self, o: &Point) -> u128 {
        self.sub(o).norm2() as u128
    }

    /// The `2d` lattice neighbours, in the order `-e_0, +e_0, -e_1, ...`.
    pub fn neighbors(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.dim()).flat_map(move |k| [self.step(k, -1), self.step(k, 1)])
    }

    /// The `2d` edges incident to this point.
    pub fn incident_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.dim()).flat_map(move |k| {
            [
                Edge { base: self.step(k, -1), axis: k as u8 },
                Edge { base: *self, axis: k as u8 },
            ]
        })
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A nearest-neighbour edge `{base, base + e_axis}`, stored by its lower
/// endpoint. The derived order is the canonical edge encoding.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    base: Point,
    axis: u8,
}

impl Edge {
    pub fn new(base: Point, axis: u8) -> Result<Self> {
        if axis as usize >= base.dim() {
            return Err(Error::Dimension(axis as usize));
        }
        Ok(Edge { base, axis })
    }

    /// The edge joining two neighbours, if they are neighbours.
    pub fn between(x: &Point, y: &Point) -> Option<Edge> {
        if x.dim() != y.dim() {
            return None;
        }
        let diff = y.sub(x);
        let mut axis = None;
        for k in 0..x.dim() {
            match diff.get(k) {
                0 => {}
                1 | -1 if axis.is_none() => axis = Some(k),
                _ => return None,
            }
        }
        let k = axis?;
        let base = if diff.get(k) == 1 { *x } else { *y };
        Some(Edge { base, axis: k as u8 })
    }

    #[inline]
    pub fn base(&self) -> Point {
        self.base
    }

    #[inline]
    pub fn axis(&self) -> usize {
        self.axis as usize
    }

    #[inline]
    pub fn tip(&self) -> Point {
        self.base.step(self.axis as usize, 1)
    }

    #[inline]
    pub fn endpoints(&self) -> (Point, Point) {
        (self.base, self.tip())
    }

    pub fn translate(&self, offset: &Point) -> Edge {
        Edge { base: self.base.add(offset), axis: self.axis }
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}+e{}", self.base, self.axis)
    }
}

/// A primitive nonzero integer normal vector `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Direction {
    w: Point,
    norm2: i128,
}

impl Direction {
    /// Build from any nonzero integer vector; common factors are divided out.
    pub fn new(w: &[i64]) -> Result<Self> {
        if w.len() < 2 || w.len() > MAX_DIM {
            return Err(Error::Dimension(w.len()));
        }
        let g = w.iter().fold(0, |g, &x| gcd_i64(g, x));
        if g == 0 {
            return Err(Error::Domain("direction must be nonzero"));
        }
        let v: Vec<i64> = w.iter().map(|&x| x / g).collect();
        let w = Point::new(&v)?;
        Ok(Direction { norm2: w.norm2(), w })
    }

    /// The coordinate direction `e_k`.
    pub fn axis(dim: usize, k: usize) -> Self {
        let w = Point::unit(dim, k);
        Direction { w, norm2: 1 }
    }

    pub fn dim(&self) -> usize {
        self.w.dim()
    }

    pub fn w(&self) -> &[i64] {
        self.w.coords()
    }

    /// `|w|^2`.
    pub fn norm2(&self) -> i128 {
        self.norm2
    }

    /// Largest change of `x . w` along one lattice edge.
    pub fn max_step(&self) -> i64 {
        self.w.norm_inf()
    }

    pub fn to_unit_f64(&self) -> Vec<f64> {
        let n = libm::sqrt(self.norm2 as f64);
        self.w().iter().map(|&x| x as f64 / n).collect()
    }
}

/// A height in `s`-units, `s = (x - origin) . w`; the real height is
/// `s / |w|`. Always nonnegative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Height(Q);

impl Height {
    pub fn s_units(num: i128, den: i128) -> Result<Self> {
        if den == 0 || (num < 0) != (den < 0) && num != 0 {
            return Err(Error::Domain("height must be nonnegative"));
        }
        Ok(Height(Q::new(num, den).reduced()))
    }

    pub fn from_s(s: i128) -> Self {
        Height(Q::int(s.max(0)))
    }

    /// Real height `h` for an axis direction (where `s` is the coordinate).
    pub fn real_axis(h: u64) -> Self {
        Height(Q::int(h as i128))
    }

    /// Smallest integer `S` in `s`-units whose real height `S / |w|` is at
    /// least the real number `num / den`.
    pub fn from_real_ceil(num: u64, den: u64, dir: &Direction) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator"));
        }
        // S >= (num / den) |w|  <=>  S^2 den^2 >= num^2 |w|^2
        let target = (num as u128)
            .checked_mul(num as u128)
            .and_then(|v| v.checked_mul(dir.norm2 as u128))
            .ok_or(Error::ArithmeticOverflow)?;
        let d2 = den as u128 * den as u128;
        let s = isqrt_ceil(target.div_ceil(d2));
        // isqrt_ceil on the rounded-up quotient can overshoot by one
        let s = if s > 0 && (s - 1) * (s - 1) * d2 >= target { s - 1 } else { s };
        Ok(Height(Q::int(s as i128)))
    }

    pub fn q(&self) -> Q {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.n == 0
    }

    /// Largest integer `s` with `s <= self`.
    pub fn floor_s(&self) -> i128 {
        self.0.floor()
    }

    pub fn to_real_f64(&self, dir: &Direction) -> f64 {
        self.0.n as f64 / self.0.d as f64 / libm::sqrt(dir.norm2 as f64)
    }
}

/// `origin + [0, p] f_1 + ... + [0, p] f_{d-1}` inside the hyperplane
/// orthogonal to `normal`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperrect {
    origin: Point,
    basis: Vec<Point>,
    basis_norm2: Vec<i128>,
    scale: u64,
    normal: Direction,
}

impl Hyperrect {
    pub fn new(origin: Point, basis: Vec<Point>, scale: u64, normal: Direction) -> Result<Self> {
        let d = normal.dim();
        if origin.dim() != d || basis.len() + 1 != d {
            return Err(Error::Dimension(origin.dim()));
        }
        if scale == 0 {
            return Err(Error::Degenerate("scale must be positive"));
        }
        for (i, f) in basis.iter().enumerate() {
            if f.dim() != d || f.norm2() == 0 {
                return Err(Error::Domain("basis vectors must be nonzero and of dimension d"));
            }
            if f.dot(normal.w()) != 0 {
                return Err(Error::Domain("basis vector not orthogonal to the normal"));
            }
            for g in &basis[..i] {
                if f.dot(g.coords()) != 0 {
                    return Err(Error::Domain("basis vectors not pairwise orthogonal"));
                }
            }
        }
        let basis_norm2 = basis.iter().map(|f| f.norm2()).collect();
        Ok(Hyperrect { origin, basis, basis_norm2, scale, normal })
    }

    /// `p A` for the canonical integer basis of `dir`, anchored at the origin.
    pub fn canonical(dir: Direction, scale: u64) -> Result<Self> {
        let basis = integer_orthogonal_basis(dir.w())?;
        Self::new(Point::zero(dir.dim()), basis, scale, dir)
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn normal(&self) -> &Direction {
        &self.normal
    }

    pub fn with_scale(&self, scale: u64) -> Result<Self> {
        Self::new(self.origin, self.basis.clone(), scale, self.normal)
    }

    pub fn with_origin(&self, origin: Point) -> Result<Self> {
        Self::new(origin, self.basis.clone(), self.scale, self.normal)
    }

    /// `(H^{d-1}(pA))^2 = p^{2(d-1)} prod |f_i|^2`, exact.
    pub fn area_squared(&self) -> Result<u128> {
        let mut acc: u128 = 1;
        for &n2 in &self.basis_norm2 {
            let p2 = (self.scale as u128).checked_mul(self.scale as u128);
            acc = p2
                .and_then(|p2| acc.checked_mul(p2))
                .and_then(|a| a.checked_mul(n2 as u128))
                .ok_or(Error::ArithmeticOverflow)?;
        }
        Ok(acc)
    }

    pub fn area(&self) -> f64 {
        let mut a = 1.0;
        for &n2 in &self.basis_norm2 {
            a *= self.scale as f64 * libm::sqrt(n2 as f64);
        }
        a
    }

    /// `(a_1, ..., a_{d-1}, s)` for `x`.
    #[inline]
    pub fn coordinates(&self, x: &Point) -> ([i128; MAX_DIM], i128) {
        let rel = x.sub(&self.origin);
        let mut a = [0i128; MAX_DIM];
        for (i, f) in self.basis.iter().enumerate() {
            a[i] = rel.dot(f.coords());
        }
        (a, rel.dot(self.normal.w()))
    }

    /// Upper bound `p |f_i|^2` of `a_i`.
    #[inline]
    pub fn lateral_max(&self, i: usize) -> i128 {
        self.scale as i128 * self.basis_norm2[i]
    }

    /// `0 <= a_i <= p |f_i|^2` for all `i`.
    #[inline]
    pub fn laterally_inside(&self, a: &[i128]) -> bool {
        (0..self.basis.len()).all(|i| a[i] >= 0 && a[i] <= self.lateral_max(i))
    }

    /// Lateral test widened by a real distance `margin` on every side.
    #[inline]
    pub fn laterally_within(&self, a: &[i128], margin: u64) -> bool {
        let k2 = margin as i128 * margin as i128;
        (0..self.basis.len()).all(|i| {
            let n2 = self.basis_norm2[i];
            let lo_ok = a[i] >= 0 || a[i] * a[i] <= k2 * n2;
            let over = a[i] - self.lateral_max(i);
            let hi_ok = over <= 0 || over * over <= k2 * n2;
            lo_ok && hi_ok
        })
    }

    /// Whether the closed segment `[x, x + delta e_k]` meets the closed face
    /// `{s = level, 0 <= a_i <= p |f_i|^2}`.
    pub fn segment_meets_face(&self, x: &Point, k: usize, delta: i64, level: Q) -> bool {
        let (a, s) = self.coordinates(x);
        let mut iv = Interval::unit();
        let ds = delta as i128 * self.normal.w()[k] as i128;
        iv.constrain(Q::int(s), Q::int(ds), level, level);
        for (i, f) in self.basis.iter().enumerate() {
            if iv.is_empty() {
                return false;
            }
            let da = delta as i128 * f.get(k) as i128;
            iv.constrain(Q::int(a[i]), Q::int(da), Q::int(0), Q::int(self.lateral_max(i)));
        }
        !iv.is_empty()
    }

    /// Lattice points of the closed hyperrectangle itself.
    pub fn lattice_points(&self) -> Vec<Point> {
        let (lo, hi) = self.bounding_box(0.0, 0.0, 0.0);
        scan_box(&lo, &hi, |x| {
            let (a, s) = self.coordinates(x);
            s == 0 && self.laterally_inside(&a)
        })
    }

    /// Integer bounding box of `{origin + sum lambda_i f_i + t w/|w|}` with
    /// `lambda_i` widened by a real lateral margin and `t` in `[t_lo, t_hi]`.
    pub fn bounding_box(&self, margin: f64, t_lo: f64, t_hi: f64) -> (Point, Point) {
        let d = self.dim();
        let n = libm::sqrt(self.normal.norm2 as f64);
        let mut lo = [f64::INFINITY; MAX_DIM];
        let mut hi = [f64::NEG_INFINITY; MAX_DIM];
        let m = self.basis.len();
        for mask in 0..(1u32 << m) {
            for &t in &[t_lo, t_hi] {
                for k in 0..d {
                    let mut v = self.origin.get(k) as f64 + t * self.normal.w()[k] as f64 / n;
                    for (i, f) in self.basis.iter().enumerate() {
                        let len = libm::sqrt(self.basis_norm2[i] as f64);
                        let lam = if mask >> i & 1 == 1 {
                            self.scale as f64 + margin / len
                        } else {
                            -margin / len
                        };
                        v += lam * f.get(k) as f64;
                    }
                    lo[k] = lo[k].min(v);
                    hi[k] = hi[k].max(v);
                }
            }
        }
        let mut a = Point::zero(d);
        let mut b = Point::zero(d);
        for k in 0..d {
            a.set(k, libm::floor(lo[k]) as i64 - 1);
            b.set(k, libm::ceil(hi[k]) as i64 + 1);
        }
        (a, b)
    }
}

/// Lattice points of the box `[lo, hi]` satisfying `keep`, in sorted order.
pub fn scan_box(lo: &Point, hi: &Point, mut keep: impl FnMut(&Point) -> bool) -> Vec<Point> {
    let d = lo.dim();
    let mut out = Vec::new();
    if (0..d).any(|k| lo.get(k) > hi.get(k)) {
        return out;
    }
    let mut x = *lo;
    loop {
        if keep(&x) {
            out.push(x);
        }
        // odometer with the last coordinate fastest keeps the output sorted
        let mut k = d;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if x.get(k) < hi.get(k) {
                x.set(k, x.get(k) + 1);
                break;
            }
            x.set(k, lo.get(k));
        }
    }
}

/// `d - 1` pairwise orthogonal primitive integer vectors spanning `w^perp`.
pub fn integer_orthogonal_basis(w: &[i64]) -> Result<Vec<Point>> {
    let d = w.len();
    if !(2..=MAX_DIM).contains(&d) {
        return Err(Error::Dimension(d));
    }
    let j = w
        .iter()
        .rposition(|&x| x != 0)
        .ok_or(Error::Domain("direction must be nonzero"))?;
    let mut out: Vec<Vec<i128>> = Vec::with_capacity(d - 1);
    for k in (0..d).filter(|&k| k != j) {
        let mut u = vec![0i128; d];
        u[k] = w[j] as i128;
        u[j] = -(w[k] as i128);
        // u <- (prod |f|^2) u - sum (u.f) (prod_{g != f} |g|^2) f, kept integer
        for f in &out {
            let uf: i128 = u.iter().zip(f).map(|(a, b)| a * b).sum();
            let ff: i128 = f.iter().map(|a| a * a).sum();
            for t in 0..d {
                u[t] = u[t]
                    .checked_mul(ff)
                    .and_then(|v| v.checked_sub(uf.checked_mul(f[t])?))
                    .ok_or(Error::ArithmeticOverflow)?;
            }
            let g = u.iter().fold(0u128, |g, &x| {
                crate::rational::gcd_u128(g, x.unsigned_abs())
            });
            if g > 1 {
                for x in u.iter_mut() {
                    *x /= g as i128;
                }
            }
        }
        out.push(u);
    }
    out.into_iter()
        .map(|u| {
            let v: Vec<i64> = u
                .iter()
                .map(|&x| i64::try_from(x).map_err(|_| Error::ArithmeticOverflow))
                .collect::<Result<_>>()?;
            Point::new(&v)
        })
        .collect()
}

/// How the height bounds the normal coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CylinderKind {
    /// `A + [-h, h] v`.
    Symmetric,
    /// `A + [0, h] v`.
    Directed,
    /// `hyp(A) + [0, h] v`, cut to a window that widens `A` laterally by the
    /// given real distance.
    Slab { margin: u64 },
}

/// Which terminals a flow problem uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminals {
    /// Faces `A + h v` and `A - h v` of a symmetric cylinder, or `A + h v`
    /// and `A` for a directed one.
    TopBottom,
    /// Boundaries of the two halves of a symmetric cylinder.
    HalfBoundaries,
    /// From `V(A)` to the top layer and the lateral rim of a slab window.
    Slab,
}

/// A hyperrectangle, a height and a cylinder kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderSpec {
    pub rect: Hyperrect,
    pub height: Height,
    pub kind: CylinderKind,
}

/// A region of `Z^d` given by a membership predicate.
pub trait Region {
    fn contains(&self, x: &Point) -> bool;
}

/// All of `Z^d`.
#[derive(Clone, Copy, Debug)]
pub struct Everywhere;

impl Region for Everywhere {
    fn contains(&self, _: &Point) -> bool {
        true
    }
}

/// The box `[lo, hi]`.
#[derive(Clone, Copy, Debug)]
pub struct BoxRegion {
    pub lo: Point,
    pub hi: Point,
}

impl Region for BoxRegion {
    fn contains(&self, x: &Point) -> bool {
        (0..x.dim()).all(|k| x.get(k) >= self.lo.get(k) && x.get(k) <= self.hi.get(k))
    }
}

/// A region from a closure.
pub struct FnRegion<F>(pub F);

impl<F: Fn(&Point) -> bool> Region for FnRegion<F> {
    fn contains(&self, x: &Point) -> bool {
        (self.0)(x)
    }
}

impl<R: Region + ?Sized> Region for &R {
    fn contains(&self, x: &Point) -> bool {
        (**self).contains(x)
    }
}

impl Region for CylinderSpec {
    fn contains(&self, x: &Point) -> bool {
        self.member(x)
    }
}

impl CylinderSpec {
    pub fn new(rect: Hyperrect, height: Height, kind: CylinderKind) -> Self {
        CylinderSpec { rect, height, kind }
    }

    pub fn dim(&self) -> usize {
        self.rect.dim()
    }

    /// Exact vertex membership.
    pub fn member(&self, x: &Point) -> bool {
        let (a, s) = self.rect.coordinates(x);
        let h = self.height.q();
        let s = Q::int(s);
        match self.kind {
            CylinderKind::Symmetric => {
                s <= h && s >= Q::new(-h.n, h.d) && self.rect.laterally_inside(&a)
            }
            CylinderKind::Directed => {
                s <= h && s >= Q::int(0) && self.rect.laterally_inside(&a)
            }
            CylinderKind::Slab { margin } => {
                s <= h && s >= Q::int(0) && self.rect.laterally_within(&a, margin)
            }
        }
    }

    /// Member vertices, sorted, by a bounding-box scan.
    pub fn vertices(&self) -> Vec<Point> {
        let n = libm::sqrt(self.rect.normal.norm2() as f64);
        let h = self.height.q();
        let t = h.n as f64 / h.d as f64 / n;
        let (t_lo, margin) = match self.kind {
            CylinderKind::Symmetric => (-t, 0.0),
            CylinderKind::Directed => (0.0, 0.0),
            CylinderKind::Slab { margin } => (0.0, margin as f64),
        };
        let (lo, hi) = self.rect.bounding_box(margin, t_lo, t);
        scan_box(&lo, &hi, |x| self.member(x))
    }

    fn top_level(&self) -> Q {
        self.height.q()
    }

    fn bottom_level(&self) -> Q {
        match self.kind {
            CylinderKind::Symmetric => {
                let h = self.height.q();
                Q::new(-h.n, h.d)
            }
            _ => Q::int(0),
        }
    }

    /// Members with an outside neighbour whose joining segment meets the
    /// closed face at normal level `level`.
    fn face_terminals(&self, members: &[Point], level: Q) -> Vec<Point> {
        let set: BTreeSet<Point> = members.iter().copied().collect();
        members
            .iter()
            .copied()
            .filter(|x| {
                (0..x.dim()).any(|k| {
                    [-1i64, 1].iter().any(|&delta| {
                        !set.contains(&x.step(k, delta))
                            && self.rect.segment_meets_face(x, k, delta, level)
                    })
                })
            })
            .collect()
    }

    /// `(B1, B2)`: the discrete top and bottom. For a directed cylinder the
    /// bottom face is `A` itself.
    pub fn top_bottom(&self) -> Result<(Vec<Point>, Vec<Point>)> {
        if matches!(self.kind, CylinderKind::Slab { .. }) {
            return Err(Error::Domain("top and bottom need a cylinder, not a slab"));
        }
        let members = self.vertices();
        self.top_bottom_of(&members)
    }

    fn top_bottom_of(&self, members: &[Point]) -> Result<(Vec<Point>, Vec<Point>)> {
        let b1 = self.face_terminals(members, self.top_level());
        let b2 = self.face_terminals(members, self.bottom_level());
        check_terminals(&b1, &b2)?;
        Ok((b1, b2))
    }

    /// `(C'1, C'2)`: members strictly above (below) `hyp(A)` having a
    /// neighbour outside the cylinder.
    pub fn half_boundaries(&self) -> Result<(Vec<Point>, Vec<Point>)> {
        if self.kind != CylinderKind::Symmetric {
            return Err(Error::Domain("half boundaries need a symmetric cylinder"));
        }
        if self.height.is_zero() {
            return Err(Error::Degenerate("half boundaries need a positive height"));
        }
        let members = self.vertices();
        self.half_boundaries_of(&members)
    }

    fn half_boundaries_of(&self, members: &[Point]) -> Result<(Vec<Point>, Vec<Point>)> {
        let set: BTreeSet<Point> = members.iter().copied().collect();
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        for x in members {
            if !x.neighbors().any(|y| !set.contains(&y)) {
                continue;
            }
            let (_, s) = self.rect.coordinates(x);
            if s > 0 {
                c1.push(*x);
            } else if s < 0 {
                c2.push(*x);
            }
        }
        check_terminals(&c1, &c2)?;
        Ok((c1, c2))
    }

    /// The slab flow problem's terminals `(V(A), rim)`: `V(A)` lies below
    /// `hyp(A)`; the rim is every window member with a neighbour outside the
    /// window on the non-negative side, i.e. the top layer plus the lateral
    /// boundary of the window.
    fn slab_terminals(&self, members: &[Point]) -> Result<(Vec<Point>, Vec<Point>)> {
        let v = v_set(&self.rect);
        let set: BTreeSet<Point> = members.iter().copied().collect();
        let rim: Vec<Point> = members
            .iter()
            .copied()
            .filter(|x| {
                x.neighbors().any(|y| {
                    !set.contains(&y) && self.rect.coordinates(&y).1 >= 0
                })
            })
            .collect();
        check_terminals(&v, &rim)?;
        Ok((v, rim))
    }

    /// Build the finite flow problem on the member vertices (plus `V(A)` for
    /// slabs), with the edges joining two vertices of the problem.
    pub fn build_problem(&self, terminals: Terminals) -> Result<FlowProblem> {
        let members = self.vertices();
        if members.is_empty() {
            return Err(Error::Degenerate("empty region"));
        }
        match (terminals, self.kind) {
            (Terminals::TopBottom, CylinderKind::Symmetric | CylinderKind::Directed) => {
                let (b1, b2) = self.top_bottom_of(&members)?;
                FlowProblem::new(members, &b1, &b2)
            }
            (Terminals::HalfBoundaries, CylinderKind::Symmetric) => {
                if self.height.is_zero() {
                    return Err(Error::Degenerate("half boundaries need a positive height"));
                }
                let (c1, c2) = self.half_boundaries_of(&members)?;
                FlowProblem::new(members, &c1, &c2)
            }
            (Terminals::Slab, CylinderKind::Slab { .. }) => {
                let (v, rim) = self.slab_terminals(&members)?;
                let mut all = members;
                all.extend_from_slice(&v);
                FlowProblem::new(all, &v, &rim)
            }
            _ => Err(Error::Domain("terminal choice incompatible with cylinder kind")),
        }
    }
}

fn check_terminals(a: &[Point], b: &[Point]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Degenerate("empty terminal set"));
    }
    let sa: BTreeSet<&Point> = a.iter().collect();
    if b.iter().any(|x| sa.contains(x)) {
        return Err(Error::Degenerate("source and sink sets intersect"));
    }
    Ok(())
}

/// `V(A)`: points with `s < 0` having a neighbour with `s >= 0` such that
/// the joining closed segment meets the closed hyperrectangle `A`.
pub fn v_set(rect: &Hyperrect) -> Vec<Point> {
    let (lo, hi) = rect.bounding_box(1.0, -1.0, 0.0);
    scan_box(&lo, &hi, |x| {
        let (_, s) = rect.coordinates(x);
        s < 0
            && (0..x.dim()).any(|k| {
                [-1i64, 1].iter().any(|&delta| {
                    rect.coordinates(&x.step(k, delta)).1 >= 0
                        && rect.segment_meets_face(x, k, delta, Q::int(0))
                })
            })
    })
}

/// `(V(A), W(A, h, v))` where `W` is the layer of points of the slab over
/// `A` at height at most `h` with a neighbour above `h`.
pub fn slab_sets(rect: &Hyperrect, height: Height) -> Result<(Vec<Point>, Vec<Point>)> {
    let v = v_set(rect);
    if v.is_empty() {
        return Err(Error::Degenerate("V(A) is empty"));
    }
    let h = height.q();
    if h < Q::int(1) {
        return Err(Error::Domain("slab height must be at least 1"));
    }
    let spec = CylinderSpec::new(rect.clone(), height, CylinderKind::Directed);
    let w = spec
        .vertices()
        .into_iter()
        .filter(|x| x.neighbors().any(|y| Q::int(rect.coordinates(&y).1) > h))
        .collect();
    Ok((v, w))
}

/// `Lambda_L(i) = L i + [-L/2, L/2]^d`.
pub fn in_box(l: i64, i: &Point, x: &Point) -> bool {
    (0..x.dim()).all(|k| (x.get(k) - l * i.get(k)).abs() <= l / 2)
}

/// `Lambda'_L(i)`: the union of the `3^d` boxes around `i`.
pub fn in_enlarged_box(l: i64, i: &Point, x: &Point) -> bool {
    (0..x.dim()).all(|k| (x.get(k) - l * i.get(k)).abs() <= 3 * l / 2)
}

/// Checked constructor for the box side: even and at least 2.
pub fn check_box_side(l: i64) -> Result<()> {
    if l < 2 || l % 2 != 0 {
        return Err(Error::Domain("box side must be even and at least 2"));
    }
    Ok(())
}

/// The box index containing `x`; boundary points go to the smaller index.
pub fn box_of(l: i64, x: &Point) -> Point {
    let mut i = Point::zero(x.dim());
    for k in 0..x.dim() {
        // smallest i with x <= L i + L/2
        i.set(k, (x.get(k) - l / 2).div_euclid(l) + i64::from((x.get(k) - l / 2).rem_euclid(l) != 0));
    }
    i
}

/// Every box index whose closed box contains `x`.
pub fn boxes_containing(l: i64, x: &Point) -> Vec<Point> {
    let base = box_of(l, x);
    let d = x.dim();
    let mut out = vec![base];
    for k in 0..d {
        let mut more = Vec::new();
        for b in &out {
            let up = b.step(k, 1);
            if (x.get(k) - l * up.get(k)).abs() <= l / 2 {
                more.push(up);
            }
        }
        out.extend(more);
    }
    out.sort();
    out
}

/// A finite graph with distinguished source and sink vertices. Vertices and
/// edges are kept sorted; vertex indices are positions in `vertices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowProblem {
    vertices: Vec<Point>,
    edges: Vec<Edge>,
    ends: Vec<(u32, u32)>,
    sources: Vec<u32>,
    sinks: Vec<u32>,
}

impl FlowProblem {
    /// The induced problem on `vertices`: every lattice edge with both
    /// endpoints in the set. Terminals must be disjoint, nonempty vertices.
    pub fn new(mut vertices: Vec<Point>, sources: &[Point], sinks: &[Point]) -> Result<Self> {
        vertices.sort();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(Error::Degenerate("empty region"));
        }
        let d = vertices[0].dim();
        if vertices.iter().any(|x| x.dim() != d) {
            return Err(Error::Dimension(d));
        }
        let index = |x: &Point| vertices.binary_search(x).ok().map(|i| i as u32);
        let mut edges = Vec::new();
        let mut ends = Vec::new();
        for (i, x) in vertices.iter().enumerate() {
            for k in 0..d {
                if let Some(j) = index(&x.step(k, 1)) {
                    edges.push(Edge { base: *x, axis: k as u8 });
                    ends.push((i as u32, j));
                }
            }
        }
        let to_idx = |ts: &[Point]| -> Result<Vec<u32>> {
            let mut v = ts
                .iter()
                .map(|x| index(x).ok_or(Error::Domain("terminal is not a vertex of the region")))
                .collect::<Result<Vec<u32>>>()?;
            v.sort_unstable();
            v.dedup();
            Ok(v)
        };
        let sources = to_idx(sources)?;
        let sinks = to_idx(sinks)?;
        if sources.is_empty() || sinks.is_empty() {
            return Err(Error::Degenerate("empty terminal set"));
        }
        let ss: BTreeSet<u32> = sources.iter().copied().collect();
        if sinks.iter().any(|t| ss.contains(t)) {
            return Err(Error::Degenerate("source and sink sets intersect"));
        }
        Ok(FlowProblem { vertices, edges, ends, sources, sinks })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Vertex indices of the endpoints of edge `j` (base, tip).
    pub fn ends(&self) -> &[(u32, u32)] {
        &self.ends
    }

    pub fn sources(&self) -> &[u32] {
        &self.sources
    }

    pub fn sinks(&self) -> &[u32] {
        &self.sinks
    }

    pub fn source_points(&self) -> Vec<Point> {
        self.sources.iter().map(|&i| self.vertices[i as usize]).collect()
    }

    pub fn sink_points(&self) -> Vec<Point> {
        self.sinks.iter().map(|&i| self.vertices[i as usize]).collect()
    }

    pub fn vertex_index(&self, x: &Point) -> Option<usize> {
        self.vertices.binary_search(x).ok()
    }

    pub fn edge_index(&self, e: &Edge) -> Option<usize> {
        self.edges.binary_search(e).ok()
    }

    pub fn contains_vertex(&self, x: &Point) -> bool {
        self.vertex_index(x).is_some()
    }

    /// Adjacency lists `(neighbour, edge index)` per vertex.
    pub fn adjacency(&self) -> Vec<Vec<(u32, u32)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (j, &(a, b)) in self.ends.iter().enumerate() {
            adj[a as usize].push((b, j as u32));
            adj[b as usize].push((a, j as u32));
        }
        adj
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[i64]) -> Point {
        Point::new(c).unwrap()
    }

    fn straight(p: u64, h: i128, kind: CylinderKind) -> CylinderSpec {
        let rect = Hyperrect::canonical(Direction::axis(2, 1), p).unwrap();
        CylinderSpec::new(rect, Height::from_s(h), kind)
    }

    #[test]
    fn membership_examples() {
        let c = straight(3, 2, CylinderKind::Symmetric);
        assert!(c.member(&pt(&[1, 1])));
        assert!(!c.member(&pt(&[1, 3])));
        assert!(c.member(&pt(&[3, -2])));
        assert!(!c.member(&pt(&[4, 0])));
    }

    #[test]
    fn orthogonal_basis_examples() {
        assert_eq!(integer_orthogonal_basis(&[0, 1]).unwrap(), vec![pt(&[1, 0])]);
        assert_eq!(integer_orthogonal_basis(&[1, 1]).unwrap(), vec![pt(&[1, -1])]);
        for w in [[1i64, 1, 1], [2, -3, 5], [0, 0, 1], [1, 2, 0]] {
            let b = integer_orthogonal_basis(&w).unwrap();
            assert_eq!(b.len(), 2);
            assert_eq!(b[0].dot(&w), 0);
            assert_eq!(b[1].dot(&w), 0);
            assert_eq!(b[0].dot(b[1].coords()), 0);
            assert!(b[0].norm2() > 0 && b[1].norm2() > 0);
        }
        let b = integer_orthogonal_basis(&[1, 2, 3, 4]).unwrap();
        for i in 0..3 {
            assert_eq!(b[i].dot(&[1, 2, 3, 4]), 0);
            for j in 0..i {
                assert_eq!(b[i].dot(b[j].coords()), 0);
            }
        }
    }

    #[test]
    fn top_bottom_straight() {
        let c = straight(3, 2, CylinderKind::Symmetric);
        let (b1, b2) = c.top_bottom().unwrap();
        assert_eq!(b1, (0..4).map(|i| pt(&[i, 2])).collect::<Vec<_>>());
        assert_eq!(b2, (0..4).map(|i| pt(&[i, -2])).collect::<Vec<_>>());
        let flat = straight(3, 0, CylinderKind::Symmetric);
        assert!(matches!(flat.top_bottom(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn half_boundaries_straight() {
        let c = straight(3, 2, CylinderKind::Symmetric);
        let (c1, c2) = c.half_boundaries().unwrap();
        let mut want1 = vec![pt(&[0, 1]), pt(&[3, 1])];
        want1.extend((0..4).map(|i| pt(&[i, 2])));
        want1.sort();
        assert_eq!(c1, want1);
        assert_eq!(c2.len(), want1.len());
    }

    #[test]
    fn slab_sets_straight() {
        let rect = Hyperrect::canonical(Direction::axis(2, 1), 3).unwrap();
        let (v, w) = slab_sets(&rect, Height::from_s(2)).unwrap();
        assert_eq!(v, (0..4).map(|i| pt(&[i, -1])).collect::<Vec<_>>());
        assert_eq!(w, (0..4).map(|i| pt(&[i, 2])).collect::<Vec<_>>());
    }

    #[test]
    fn box_conventions() {
        assert_eq!(box_of(4, &pt(&[2, -2])), pt(&[0, -1]));
        assert_eq!(box_of(4, &pt(&[3, 0])), pt(&[1, 0]));
        assert_eq!(box_of(4, &pt(&[6, 7])), pt(&[1, 2]));
        assert_eq!(boxes_containing(4, &pt(&[2, 2])).len(), 4);
        assert_eq!(boxes_containing(4, &pt(&[1, 2])), vec![pt(&[0, 0]), pt(&[0, 1])]);
        let i = pt(&[0, 0]);
        let n = scan_box(&pt(&[-5, -5]), &pt(&[5, 5]), |x| in_box(4, &i, x)).len();
        assert_eq!(n, 25);
        for j in scan_box(&pt(&[-1, -1]), &pt(&[1, 1]), |_| true) {
            for x in scan_box(&pt(&[-9, -9]), &pt(&[9, 9]), |x| in_box(4, &j, x)) {
                assert!(in_enlarged_box(4, &i, &x));
            }
        }
    }

    #[test]
    fn straight_problem_counts() {
        for (p, h) in [(3u64, 1i128), (3, 2), (5, 3)] {
            let c = straight(p, h, CylinderKind::Symmetric);
            let prob = c.build_problem(Terminals::TopBottom).unwrap();
            let (w, ht) = (p as usize + 1, 2 * h as usize + 1);
            assert_eq!(prob.vertices().len(), w * ht);
            assert_eq!(prob.edges().len(), (w - 1) * ht + w * (ht - 1));
        }
    }

    #[test]
    fn edge_between_and_incident() {
        let x = pt(&[1, 1]);
        assert_eq!(Edge::between(&x, &pt(&[1, 2])), Some(Edge::new(x, 1).unwrap()));
        assert_eq!(Edge::between(&pt(&[1, 2]), &x), Some(Edge::new(x, 1).unwrap()));
        assert_eq!(Edge::between(&x, &pt(&[2, 2])), None);
        let inc: Vec<Edge> = x.incident_edges().collect();
        assert_eq!(inc.len(), 4);
        for e in inc {
            let (a, b) = e.endpoints();
            assert!(a == x || b == x);
        }
    }

    #[test]
    fn height_from_real() {
        let diag = Direction::new(&[1, 1]).unwrap();
        // real 1 over |w| = sqrt 2: smallest S with S >= sqrt 2 is 2
        assert_eq!(Height::from_real_ceil(1, 1, &diag).unwrap(), Height::from_s(2));
        assert_eq!(Height::from_real_ceil(2, 1, &diag).unwrap(), Height::from_s(3));
        let ax = Direction::axis(2, 1);
        assert_eq!(Height::from_real_ceil(3, 1, &ax).unwrap(), Height::from_s(3));
        assert_eq!(Height::from_real_ceil(5, 2, &ax).unwrap(), Height::from_s(3));
    }
}
