//! Small exact rational over `i128`, used by the geometry predicates.
//!
//! Denominators stay positive; values are not reduced unless asked, since
//! the predicates only compare.

use core::cmp::Ordering;

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd_u128(a.unsigned_abs() as u128, b.unsigned_abs() as u128) as i64
}

/// `n / d` with `d > 0`.
#[derive(Clone, Copy, Debug)]
pub struct Q {
    pub n: i128,
    pub d: i128,
}

impl Q {
    pub fn new(n: i128, d: i128) -> Self {
        debug_assert!(d != 0);
        if d < 0 {
            Q { n: -n, d: -d }
        } else {
            Q { n, d }
        }
    }

    pub fn int(n: i128) -> Self {
        Q { n, d: 1 }
    }

    pub fn reduced(self) -> Self {
        let g = gcd_u128(self.n.unsigned_abs(), self.d.unsigned_abs()) as i128;
        if g > 1 {
            Q { n: self.n / g, d: self.d / g }
        } else {
            self
        }
    }

    pub fn floor(self) -> i128 {
        self.n.div_euclid(self.d)
    }

    pub fn ceil(self) -> i128 {
        -((-self.n).div_euclid(self.d))
    }

    pub fn add(self, o: Q) -> Q {
        Q::new(self.n * o.d + o.n * self.d, self.d * o.d).reduced()
    }

    pub fn mul_int(self, k: i128) -> Q {
        Q::new(self.n * k, self.d).reduced()
    }

    pub fn mul(self, o: Q) -> Q {
        Q::new(self.n * o.n, self.d * o.d).reduced()
    }
}

impl PartialEq for Q {
    fn eq(&self, o: &Self) -> bool {
        self.n * o.d == o.n * self.d
    }
}

impl Eq for Q {}

impl PartialOrd for Q {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Q {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.n * o.d).cmp(&(o.n * self.d))
    }
}

/// Closed interval of rationals, possibly empty.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn unit() -> Self {
        Interval { lo: Q::int(0), hi: Q::int(1) }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    /// Intersect with `{t : lo <= a + b t <= hi}`.
    pub fn constrain(&mut self, a: Q, b: Q, lo: Q, hi: Q) {
        if b.n == 0 {
            if a < lo || a > hi {
                self.lo = Q::int(1);
                self.hi = Q::int(0);
            }
            return;
        }
        // t in [(lo - a) / b, (hi - a) / b], swapped when b < 0
        let t1 = div(sub(lo, a), b);
        let t2 = div(sub(hi, a), b);
        let (l, h) = if b.n > 0 { (t1, t2) } else { (t2, t1) };
        if l > self.lo {
            self.lo = l;
        }
        if h < self.hi {
            self.hi = h;
        }
    }
}

fn sub(a: Q, b: Q) -> Q {
    Q::new(a.n * b.d - b.n * a.d, a.d * b.d).reduced()
}

fn div(a: Q, b: Q) -> Q {
    Q::new(a.n * b.d, a.d * b.n).reduced()
}

/// Smallest `s >= 0` with `s * s >= n`.
pub fn isqrt_ceil(n: u128) -> u128 {
    let mut s = isqrt_floor(n);
    if s * s < n {
        s += 1;
    }
    s
}

/// Largest `s` with `s * s <= n`.
pub fn isqrt_floor(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = libm::sqrt(n as f64) as u128;
    while x.checked_mul(x).map_or(true, |v| v > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|v| v <= n) {
        x += 1;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_ceil_negative() {
        assert_eq!(Q::new(-3, 2).floor(), -2);
        assert_eq!(Q::new(-3, 2).ceil(), -1);
        assert_eq!(Q::new(4, 2).ceil(), 2);
        assert_eq!(Q::new(3, -2).floor(), -2);
    }

    #[test]
    fn interval_constraints() {
        let mut iv = Interval::unit();
        iv.constrain(Q::int(0), Q::int(2), Q::int(1), Q::int(5));
        assert_eq!(iv.lo, Q::new(1, 2));
        assert_eq!(iv.hi, Q::int(1));
        iv.constrain(Q::int(3), Q::int(-1), Q::int(0), Q::int(2));
        assert_eq!(iv.lo, Q::int(1));
        assert!(!iv.is_empty());
        iv.constrain(Q::int(7), Q::int(0), Q::int(0), Q::int(2));
        assert!(iv.is_empty());
    }

    #[test]
    fn integer_square_roots() {
        for n in 0u128..2000 {
            let f = isqrt_floor(n);
            assert!(f * f <= n && (f + 1) * (f + 1) > n);
            let c = isqrt_ceil(n);
            assert!(c * c >= n && (c == 0 || (c - 1) * (c - 1) < n));
        }
        let big = (1u128 << 100) + 12345;
        let f = isqrt_floor(big);
        assert!(f * f <= big && (f + 1) * (f + 1) > big);
    }
}
