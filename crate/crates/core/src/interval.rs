//! Closed floating-point intervals with outward rounding.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn down(v: f64) -> f64 {
    if v.is_finite() {
        v.next_down()
    } else {
        v
    }
}

fn up(v: f64) -> f64 {
    if v.is_finite() {
        v.next_up()
    } else {
        v
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(!(lo > hi), "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    /// The interval `[v - r, v + r]`, rounded outward.
    pub fn around(v: f64, r: f64) -> Self {
        Interval::new(down(v - r), up(v + r))
    }

    pub fn entire() -> Self {
        Interval::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// `self` lies in the interior of `other`.
    pub fn interior_of(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn split_at(&self, t: f64) -> (Interval, Interval) {
        let m = self.lo + t * (self.hi - self.lo);
        (Interval::new(self.lo, m), Interval::new(m, self.hi))
    }

    pub fn exp(self) -> Interval {
        Interval::new(down(self.lo.exp()).max(0.0), up(self.hi.exp()))
    }

    pub fn powi(self, k: u32) -> Interval {
        let pow_lo = |v: f64| (0..k).fold(Interval::point(1.0), |acc, _| acc * Interval::point(v));
        if k == 0 {
            return Interval::point(1.0);
        }
        if k % 2 == 1 || self.lo >= 0.0 {
            return Interval::new(pow_lo(self.lo).lo, pow_lo(self.hi).hi);
        }
        if self.hi <= 0.0 {
            return Interval::new(pow_lo(self.hi).lo, pow_lo(self.lo).hi);
        }
        Interval::new(0.0, pow_lo(self.mag()).hi)
    }

    pub fn scale(self, k: f64) -> Interval {
        self * Interval::point(k)
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::new(down(self.lo + o.lo), up(self.hi + o.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::new(down(self.lo - o.hi), up(self.hi - o.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let prod = |a: f64, b: f64| if a == 0.0 || b == 0.0 { 0.0 } else { a * b };
        let c = [
            prod(self.lo, o.lo),
            prod(self.lo, o.hi),
            prod(self.hi, o.lo),
            prod(self.hi, o.hi),
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(down(lo), up(hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_encloses() {
        let a = Interval::new(1.0, 2.0);
        let b = Interval::new(-3.0, 0.5);
        let s = a + b;
        assert!(s.lo <= -2.0 && s.hi >= 2.5);
        let p = a * b;
        assert!(p.lo <= -6.0 && p.hi >= 1.0);
        let d = a - b;
        assert!(d.lo <= 0.5 && d.hi >= 5.0);
        let third = Interval::point(1.0) * Interval::point(1.0 / 3.0);
        assert!(third.lo < third.hi);
    }

    #[test]
    fn exp_is_monotone_enclosure() {
        let e = Interval::new(0.0, 1.0).exp();
        assert!(e.lo <= 1.0 && e.hi >= std::f64::consts::E);
        assert!(Interval::new(-800.0, -790.0).exp().lo >= 0.0);
    }

    #[test]
    fn powers() {
        let a = Interval::new(-2.0, 1.0);
        let sq = a.powi(2);
        assert!(sq.lo == 0.0 && sq.hi >= 4.0);
        let cube = a.powi(3);
        assert!(cube.lo <= -8.0 && cube.hi >= 1.0);
        let neg = Interval::new(-3.0, -2.0).powi(2);
        assert!(neg.lo <= 4.0 && neg.lo > 3.9 && neg.hi >= 9.0);
        assert_eq!(a.powi(0), Interval::point(1.0));
    }

    #[test]
    fn set_operations() {
        let a = Interval::new(0.0, 2.0);
        assert_eq!(
            a.intersect(&Interval::new(1.0, 3.0)),
            Some(Interval::new(1.0, 2.0))
        );
        assert_eq!(a.intersect(&Interval::new(2.5, 3.0)), None);
        assert!(Interval::new(0.5, 1.0).interior_of(&a));
        assert!(!a.interior_of(&a));
        assert!(a.contains_zero());
        let (l, r) = a.split_at(0.25);
        assert_eq!((l.hi, r.lo), (0.5, 0.5));
    }
}
