use std::cmp::Ordering;
use std::ops::{Add, Neg, Sub};

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, about 106 bits of
/// precision. Used where lattice values `k·r + ℓ` with large `k` must be
/// compared against narrow windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_i64(x: i64) -> Self {
        let hi = x as f64;
        let lo = (x - hi as i64) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    /// `num / den` to double-double accuracy.
    pub fn ratio(num: i64, den: i64) -> Self {
        let n = Dd::from_i64(num);
        let d = den as f64;
        let q1 = n.hi / d;
        // remainder n - q1*d, exact via fma
        let (p, perr) = two_prod(q1, d);
        let r = ((n.hi - p) - perr) + n.lo;
        let q2 = r / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    pub fn mul_i64(self, k: i64) -> Self {
        let kd = Dd::from_i64(k);
        let (p, e) = two_prod(self.hi, kd.hi);
        let e = e + self.lo * kd.hi + self.hi * kd.lo;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn floor(self) -> f64 {
        let f = self.hi.floor();
        if f == self.hi {
            f + self.lo.floor()
        } else {
            f
        }
    }

    pub fn ceil(self) -> f64 {
        let c = self.hi.ceil();
        if c == self.hi {
            c + self.lo.ceil()
        } else {
            c
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2: Dd = Dd::new(std::f64::consts::SQRT_2, -9.667293313452913e-17);

    #[test]
    fn large_multiple_keeps_fraction() {
        // 70·√2 = 98.99494936611665...; 99 - 70√2 = 0.005050633883346584
        let v = Dd::from_i64(99) - SQRT2.mul_i64(70);
        assert!((v.to_f64() - 0.005050633883346584).abs() < 1e-17);
    }

    #[test]
    fn ratio_is_accurate() {
        let third = Dd::ratio(1, 3);
        let back = third.mul_i64(3) - Dd::from_i64(1);
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn floor_and_ceil_respect_low_word() {
        let just_below = Dd::new(3.0, -1e-20);
        assert_eq!(just_below.floor(), 2.0);
        assert_eq!(just_below.ceil(), 3.0);
        let just_above = Dd::new(3.0, 1e-20);
        assert_eq!(just_above.floor(), 3.0);
        assert_eq!(just_above.ceil(), 4.0);
    }
}
