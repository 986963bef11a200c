//! Capacity laws on `[0, +inf]` and the coupled capacity field.
//!
//! Finite capacities are integers counted in ticks of `1 / quantum`; the
//! infinite capacity is a separate variant ordered above every tick count.
//! Probabilities are exact rationals. A law is a finite list of atoms; a
//! quantile table is folded into atoms when the law is built.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::lattice::Edge;
use crate::rational::gcd_u128;
use crate::rng::{edge_uniform, Unit};

/// Default grid: finite capacities are multiples of `2^-20`.
pub const DEFAULT_QUANTUM: u64 = 1 << 20;

/// Probabilities keep denominators at or below this bound so that a
/// cross-multiplied comparison always fits in 128 bits.
const MAX_DEN: u128 = 1 << 63;

/// An exact probability `num / den` in `[0, 1]`, always reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Prob {
    num: u128,
    den: u128,
}

impl Prob {
    pub const ZERO: Prob = Prob { num: 0, den: 1 };
    pub const ONE: Prob = Prob { num: 1, den: 1 };

    pub fn new(num: u128, den: u128) -> Result<Self> {
        if den == 0 || num > den {
            return Err(Error::Domain("probability must lie in [0, 1]"));
        }
        Self::reduce(num, den)
    }

    fn reduce(num: u128, den: u128) -> Result<Self> {
        let g = gcd_u128(num, den).max(1);
        let (num, den) = (num / g, den / g);
        if den > MAX_DEN {
            return Err(Error::ArithmeticOverflow);
        }
        Ok(Prob { num, den })
    }

    pub fn num(self) -> u128 {
        self.num
    }

    pub fn den(self) -> u128 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn checked_add(self, o: Prob) -> Result<Prob> {
        let g = gcd_u128(self.den, o.den);
        let l = self.den / g * o.den;
        if l > MAX_DEN {
            return Err(Error::ArithmeticOverflow);
        }
        let n = self.num * (l / self.den) + o.num * (l / o.den);
        if n > l {
            return Err(Error::MassMismatch);
        }
        Self::reduce(n, l)
    }

    /// `self - o`, which must be nonnegative.
    pub fn checked_sub(self, o: Prob) -> Result<Prob> {
        let g = gcd_u128(self.den, o.den);
        let l = self.den / g * o.den;
        if l > MAX_DEN {
            return Err(Error::ArithmeticOverflow);
        }
        let a = self.num * (l / self.den);
        let b = o.num * (l / o.den);
        if b > a {
            return Err(Error::Domain("negative probability"));
        }
        Self::reduce(a - b, l)
    }

    pub fn checked_mul(self, o: Prob) -> Result<Prob> {
        let g1 = gcd_u128(self.num, o.den).max(1);
        let g2 = gcd_u128(o.num, self.den).max(1);
        let num = (self.num / g1) * (o.num / g2);
        let den = (self.den / g2)
            .checked_mul(o.den / g1)
            .ok_or(Error::ArithmeticOverflow)?;
        Self::reduce(num, den)
    }

    pub fn complement(self) -> Prob {
        Prob { num: self.den - self.num, den: self.den }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Parse `0.3`, `3/10`, `1` or `1e-3`-free decimal forms.
    pub fn parse(s: &str) -> Result<Prob> {
        let v = Value::parse(s)?;
        Prob::new(v.num, v.den)
    }
}

impl PartialOrd for Prob {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Prob {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.num * o.den).cmp(&(o.num * self.den))
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// A nonnegative exact rational, used for user-facing levels and shifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Value {
    num: u128,
    den: u128,
}

impl Value {
    pub fn new(num: u128, den: u128) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator"));
        }
        let g = gcd_u128(num, den).max(1);
        Ok(Value { num: num / g, den: den / g })
    }

    pub fn int(n: u64) -> Self {
        Value { num: n as u128, den: 1 }
    }

    pub fn num(self) -> u128 {
        self.num
    }

    pub fn den(self) -> u128 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Exact tick count at the given quantum; errors if not on the grid.
    pub fn to_ticks(self, quantum: u64) -> Result<u64> {
        let scaled = self
            .num
            .checked_mul(quantum as u128)
            .ok_or(Error::ArithmeticOverflow)?;
        if scaled % self.den != 0 {
            return Err(Error::Domain("value is not a multiple of the quantum"));
        }
        u64::try_from(scaled / self.den).map_err(|_| Error::ArithmeticOverflow)
    }

    /// Smallest tick count `>= self`.
    pub fn to_ticks_ceil(self, quantum: u64) -> Result<u64> {
        let scaled = self
            .num
            .checked_mul(quantum as u128)
            .ok_or(Error::ArithmeticOverflow)?;
        u64::try_from(scaled.div_ceil(self.den)).map_err(|_| Error::ArithmeticOverflow)
    }

    pub fn from_ticks(ticks: u64, quantum: u64) -> Self {
        Value::new(ticks as u128, quantum as u128).expect("nonzero quantum")
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Parse a decimal (`2.25`), a fraction (`9/4`) or an integer.
    pub fn parse(s: &str) -> Result<Value> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let n = parse_u128(a.trim())?;
            let d = parse_u128(b.trim())?;
            return Value::new(n, d);
        }
        let (int, frac) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int.is_empty() && frac.is_empty() {
            return Err(Error::Domain("empty number"));
        }
        if frac.len() > 30 {
            return Err(Error::ArithmeticOverflow);
        }
        let int_part = if int.is_empty() { 0 } else { parse_u128(int)? };
        let den = 10u128.pow(frac.len() as u32);
        let frac_part = if frac.is_empty() { 0 } else { parse_u128(frac)? };
        let num = int_part
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_part))
            .ok_or(Error::ArithmeticOverflow)?;
        Value::new(num, den)
    }
}

fn parse_u128(s: &str) -> Result<u128> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Domain("expected a nonnegative number"));
    }
    s.parse::<u128>().map_err(|_| Error::ArithmeticOverflow)
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// A capacity in ticks, or `+inf`. The derived order puts `Infinite` last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Capacity {
    Finite(u64),
    Infinite,
}

impl Capacity {
    pub fn is_infinite(self) -> bool {
        matches!(self, Capacity::Infinite)
    }

    pub fn ticks(self) -> Option<u64> {
        match self {
            Capacity::Finite(t) => Some(t),
            Capacity::Infinite => None,
        }
    }

    pub fn to_f64(self, quantum: u64) -> f64 {
        match self {
            Capacity::Finite(t) => t as f64 / quantum as f64,
            Capacity::Infinite => f64::INFINITY,
        }
    }

    /// `min(self, k)` for a finite level `k`.
    pub fn min_ticks(self, k: u64) -> Capacity {
        match self {
            Capacity::Finite(t) if t < k => self,
            _ => Capacity::Finite(k),
        }
    }
}

/// Exact rendering `ticks/quantum` reduced, or `inf`.
pub fn format_capacity(c: Capacity, quantum: u64) -> alloc::string::String {
    match c {
        Capacity::Finite(t) => alloc::format!("{}", Value::from_ticks(t, quantum)),
        Capacity::Infinite => alloc::string::String::from("inf"),
    }
}

/// A sum of capacities: finite in ticks (128-bit) or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Total {
    Finite(u128),
    Infinite,
}

impl Total {
    pub const ZERO: Total = Total::Finite(0);

    pub fn add(self, c: Capacity) -> Total {
        match (self, c) {
            (Total::Finite(a), Capacity::Finite(b)) => Total::Finite(a + b as u128),
            _ => Total::Infinite,
        }
    }

    pub fn plus(self, o: Total) -> Total {
        match (self, o) {
            (Total::Finite(a), Total::Finite(b)) => Total::Finite(a + b),
            _ => Total::Infinite,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Total::Infinite)
    }

    pub fn ticks(self) -> Option<u128> {
        match self {
            Total::Finite(t) => Some(t),
            Total::Infinite => None,
        }
    }

    pub fn to_f64(self, quantum: u64) -> f64 {
        match self {
            Total::Finite(t) => t as f64 / quantum as f64,
            Total::Infinite => f64::INFINITY,
        }
    }

    /// Exact rendering as a reduced fraction of the quantum, or `inf`.
    pub fn format(self, quantum: u64) -> alloc::string::String {
        match self {
            Total::Finite(t) => {
                let g = gcd_u128(t, quantum as u128).max(1);
                let (n, d) = (t / g, quantum as u128 / g);
                if d == 1 {
                    alloc::format!("{n}")
                } else {
                    alloc::format!("{n}/{d}")
                }
            }
            Total::Infinite => alloc::string::String::from("inf"),
        }
    }
}

/// Sum of capacities over a set of edges.
pub fn total<'a>(field: &impl Capacities, edges: impl IntoIterator<Item = &'a Edge>) -> Total {
    edges
        .into_iter()
        .fold(Total::ZERO, |acc, e| acc.add(field.capacity(e)))
}

/// Percolation level: an edge is open at level `K` when its capacity is
/// strictly greater than `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    /// A level below every capacity: all edges are open.
    BelowZero,
    At(u64),
}

impl Level {
    #[inline]
    pub fn opens(self, c: Capacity) -> bool {
        match self {
            Level::BelowZero => true,
            Level::At(k) => c > Capacity::Finite(k),
        }
    }
}

/// A quantized quantile table: on `(c_{j-1}, c_j]` the conditional quantile
/// equals `v_j`. Cumulative points increase strictly to 1, values are
/// nondecreasing. `mass` is the share of the whole law carried by the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantileTable {
    pub points: Vec<(Prob, Value)>,
    pub mass: Prob,
}

impl QuantileTable {
    pub fn validate(&self) -> Result<()> {
        let mut prev_c = Prob::ZERO;
        let mut prev_v: Option<Value> = None;
        for &(c, v) in &self.points {
            if c <= prev_c {
                return Err(Error::Domain("table probabilities must increase strictly"));
            }
            if let Some(pv) = prev_v {
                if (v.num * pv.den) < (pv.num * v.den) {
                    return Err(Error::Domain("table values must be nondecreasing"));
                }
            }
            prev_c = c;
            prev_v = Some(v);
        }
        if prev_c != Prob::ONE {
            return Err(Error::Domain("table must end at cumulative probability 1"));
        }
        Ok(())
    }
}

/// A capacity law: sorted atoms with strictly positive mass summing to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    quantum: u64,
    atoms: Vec<(Capacity, Prob)>,
    cumulative: Vec<Prob>,
    /// `floor(cumulative[i] * 2^63)`: an edge uniform with odd numerator
    /// `n` maps to the first atom with `n <= thresholds[i]`.
    thresholds: Vec<u64>,
}

impl Distribution {
    /// Build a law from atoms given in tick units. Duplicate values merge,
    /// zero masses vanish.
    pub fn new(quantum: u64, atoms: &[(Capacity, Prob)]) -> Result<Self> {
        if quantum == 0 {
            return Err(Error::Domain("quantum must be positive"));
        }
        let mut sorted: Vec<(Capacity, Prob)> = atoms.to_vec();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Capacity, Prob)> = Vec::with_capacity(sorted.len());
        for (c, m) in sorted {
            if m.is_zero() {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 = last.1.checked_add(m)?,
                _ => merged.push((c, m)),
            }
        }
        let mut cumulative = Vec::with_capacity(merged.len());
        let mut acc = Prob::ZERO;
        for &(_, m) in &merged {
            acc = acc.checked_add(m)?;
            cumulative.push(acc);
        }
        if acc != Prob::ONE {
            return Err(Error::MassMismatch);
        }
        let thresholds = cumulative
            .iter()
            .map(|c| ((c.num << 63) / c.den).min(u64::MAX as u128) as u64)
            .collect();
        Ok(Distribution { quantum, atoms: merged, cumulative, thresholds })
    }

    /// Atoms given as exact values; each finite value must sit on the grid.
    pub fn from_values(quantum: u64, atoms: &[(Option<Value>, Prob)]) -> Result<Self> {
        Self::from_parts(quantum, atoms, None)
    }

    /// Atoms plus an optional quantile table. Table values are rounded up
    /// to the grid; atom values must be exact.
    pub fn from_parts(
        quantum: u64,
        atoms: &[(Option<Value>, Prob)],
        table: Option<&QuantileTable>,
    ) -> Result<Self> {
        let mut out = Vec::with_capacity(atoms.len());
        for &(v, m) in atoms {
            let c = match v {
                Some(v) => Capacity::Finite(v.to_ticks(quantum)?),
                None => Capacity::Infinite,
            };
            out.push((c, m));
        }
        if let Some(t) = table {
            t.validate()?;
            let mut prev = Prob::ZERO;
            for &(c, v) in &t.points {
                let share = c.checked_sub(prev)?.checked_mul(t.mass)?;
                out.push((Capacity::Finite(v.to_ticks_ceil(quantum)?), share));
                prev = c;
            }
        }
        Self::new(quantum, &out)
    }

    /// Point mass at `c`.
    pub fn point(quantum: u64, c: Capacity) -> Self {
        Self::new(quantum, &[(c, Prob::ONE)]).expect("point mass is valid")
    }

    /// Two-point law `{0: 1-q, value: q}`.
    pub fn bernoulli(quantum: u64, value_ticks: u64, q: Prob) -> Result<Self> {
        Self::new(
            quantum,
            &[(Capacity::Finite(0), q.complement()), (Capacity::Finite(value_ticks), q)],
        )
    }

    pub fn quantum(&self) -> u64 {
        self.quantum
    }

    pub fn atoms(&self) -> &[(Capacity, Prob)] {
        &self.atoms
    }

    /// `inf { t : P(X <= t) >= u }` for `u` in `(0, 1)`.
    pub fn quantile(&self, u: Prob) -> Result<Capacity> {
        if u.is_zero() || u == Prob::ONE {
            return Err(Error::Domain("quantile argument must lie in (0, 1)"));
        }
        let i = self.cumulative.partition_point(|c| *c < u);
        Ok(self.atoms[i].0)
    }

    /// Quantile at an edge uniform; exact and allocation free.
    #[inline]
    pub fn quantile_unit(&self, u: Unit) -> Capacity {
        let n = u.numerator();
        let i = self.thresholds.partition_point(|&t| t < n);
        self.atoms[i.min(self.atoms.len() - 1)].0
    }

    /// `G([t, +inf])`.
    pub fn survival(&self, t: Capacity) -> Prob {
        let i = self.atoms.partition_point(|a| a.0 < t);
        if i == 0 {
            Prob::ONE
        } else {
            self.cumulative[i - 1].complement()
        }
    }

    /// `G((K, +inf])`: the probability that an edge is open at level `K`.
    pub fn open_probability(&self, level: Level) -> Prob {
        match level {
            Level::BelowZero => Prob::ONE,
            Level::At(k) => {
                let i = self.atoms.partition_point(|a| a.0 <= Capacity::Finite(k));
                if i == 0 {
                    Prob::ONE
                } else {
                    self.cumulative[i - 1].complement()
                }
            }
        }
    }

    pub fn mass_at_infinity(&self) -> Prob {
        match self.atoms.last() {
            Some(&(Capacity::Infinite, m)) => m,
            _ => Prob::ZERO,
        }
    }

    pub fn mass_at_zero(&self) -> Prob {
        match self.atoms.first() {
            Some(&(Capacity::Finite(0), m)) => m,
            _ => Prob::ZERO,
        }
    }

    /// Largest finite atom, in ticks.
    pub fn max_finite(&self) -> Option<u64> {
        self.atoms.iter().rev().find_map(|a| a.0.ticks())
    }

    /// Law of `min(X, K)`.
    pub fn truncate(&self, k: Value) -> Result<Self> {
        if k.is_zero() {
            return Err(Error::Domain("truncation level must be positive"));
        }
        self.truncate_ticks(k.to_ticks(self.quantum)?)
    }

    pub fn truncate_ticks(&self, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("truncation level must be positive"));
        }
        let atoms: Vec<_> = self.atoms.iter().map(|&(c, m)| (c.min_ticks(k), m)).collect();
        Self::new(self.quantum, &atoms)
    }

    /// Law of `X + eps`; the infinite atom stays put.
    pub fn shift(&self, eps: Value) -> Result<Self> {
        if eps.is_zero() {
            return Err(Error::Domain("shift must be positive"));
        }
        self.shift_ticks(eps.to_ticks(self.quantum)?)
    }

    pub fn shift_ticks(&self, eps: u64) -> Result<Self> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for &(c, m) in &self.atoms {
            let c = match c {
                Capacity::Finite(t) => {
                    Capacity::Finite(t.checked_add(eps).ok_or(Error::ArithmeticOverflow)?)
                }
                Capacity::Infinite => Capacity::Infinite,
            };
            atoms.push((c, m));
        }
        Self::new(self.quantum, &atoms)
    }

    /// Union of atom locations of two laws, sorted.
    fn joint_support(a: &Self, b: &Self) -> Vec<Capacity> {
        let mut pts: Vec<Capacity> =
            a.atoms.iter().chain(b.atoms.iter()).map(|x| x.0).collect();
        pts.sort();
        pts.dedup();
        pts
    }

    /// Law whose survival at each support point is `pick(S1, S2)`.
    fn from_survival(
        quantum: u64,
        pts: &[Capacity],
        surv: impl Fn(Capacity) -> Prob,
    ) -> Result<Self> {
        let mut atoms = Vec::with_capacity(pts.len());
        for (i, &t) in pts.iter().enumerate() {
            let here = surv(t);
            let next = pts.get(i + 1).map_or(Prob::ZERO, |&n| surv(n));
            atoms.push((t, here.checked_sub(next)?));
        }
        Self::new(quantum, &atoms)
    }

    /// `(lower, upper)` with survivals `min(S1, S2)` and `max(S1, S2)`.
    pub fn envelopes(d1: &Self, d2: &Self) -> Result<(Self, Self)> {
        if d1.quantum != d2.quantum {
            return Err(Error::QuantumMismatch { left: d1.quantum, right: d2.quantum });
        }
        let pts = Self::joint_support(d1, d2);
        let lower =
            Self::from_survival(d1.quantum, &pts, |t| d1.survival(t).min(d2.survival(t)))?;
        let upper =
            Self::from_survival(d1.quantum, &pts, |t| d1.survival(t).max(d2.survival(t)))?;
        Ok((lower, upper))
    }

    /// `g` is stochastically below `h`: `S_g(t) <= S_h(t)` for all `t`.
    /// Both survivals are left-continuous step functions with jumps at atom
    /// locations, so checking the joint support is exhaustive.
    pub fn dominates(h: &Self, g: &Self) -> bool {
        if h.quantum != g.quantum {
            return false;
        }
        Self::joint_support(h, g)
            .into_iter()
            .all(|t| g.survival(t) <= h.survival(t))
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, &(c, m)) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {}", format_capacity(c, self.quantum), m)?;
        }
        write!(f, "}}")
    }
}

/// Anything that assigns capacities to edges.
pub trait Capacities {
    fn capacity(&self, e: &Edge) -> Capacity;
    fn quantum(&self) -> u64;
}

impl<T: Capacities + ?Sized> Capacities for &T {
    fn capacity(&self, e: &Edge) -> Capacity {
        (**self).capacity(e)
    }
    fn quantum(&self) -> u64 {
        (**self).quantum()
    }
}

/// The lazily evaluated i.i.d. field `e -> quantile(U(seed, e))`.
#[derive(Clone, Debug)]
pub struct CapacityField {
    dist: Arc<Distribution>,
    seed: u64,
}

impl CapacityField {
    pub fn new(dist: Arc<Distribution>, seed: u64) -> Self {
        CapacityField { dist, seed }
    }

    pub fn distribution(&self) -> &Distribution {
        &self.dist
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Same seed, another law: the coupled copy.
    pub fn with_distribution(&self, dist: Arc<Distribution>) -> Self {
        CapacityField { dist, seed: self.seed }
    }
}

impl Capacities for CapacityField {
    #[inline]
    fn capacity(&self, e: &Edge) -> Capacity {
        self.dist.quantile_unit(edge_uniform(self.seed, e))
    }

    fn quantum(&self) -> u64 {
        self.dist.quantum
    }
}

/// A field given by a closure; handy for constructed deterministic fields.
pub struct FnField<F> {
    f: F,
    quantum: u64,
}

impl<F: Fn(&Edge) -> Capacity> FnField<F> {
    pub fn new(quantum: u64, f: F) -> Self {
        FnField { f, quantum }
    }
}

impl<F: Fn(&Edge) -> Capacity> Capacities for FnField<F> {
    fn capacity(&self, e: &Edge) -> Capacity {
        (self.f)(e)
    }
    fn quantum(&self) -> u64 {
        self.quantum
    }
}

/// `inner` with some edges overridden.
pub struct OverrideField<C> {
    pub inner: C,
    pub overrides: alloc::collections::BTreeMap<Edge, Capacity>,
}

impl<C: Capacities> Capacities for OverrideField<C> {
    fn capacity(&self, e: &Edge) -> Capacity {
        match self.overrides.get(e) {
            Some(&c) => c,
            None => self.inner.capacity(e),
        }
    }
    fn quantum(&self) -> u64 {
        self.inner.quantum()
    }
}

/// Reads `inner` at `e + offset`: the field translated by `-offset`.
pub struct TranslatedField<C> {
    pub inner: C,
    pub offset: crate::lattice::Point,
}

impl<C: Capacities> Capacities for TranslatedField<C> {
    fn capacity(&self, e: &Edge) -> Capacity {
        self.inner.capacity(&e.translate(&self.offset))
    }
    fn quantum(&self) -> u64 {
        self.inner.quantum()
    }
}

/// `min(inner, K)` edge by edge.
pub struct TruncatedField<C> {
    pub inner: C,
    pub level: u64,
}

impl<C: Capacities> Capacities for TruncatedField<C> {
    fn capacity(&self, e: &Edge) -> Capacity {
        self.inner.capacity(e).min_ticks(self.level)
    }
    fn quantum(&self) -> u64 {
        self.inner.quantum()
    }
}
