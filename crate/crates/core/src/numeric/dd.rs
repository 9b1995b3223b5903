//! Double-double floating point: an unevaluated sum `hi + lo` with
//! `|lo| <= ulp(hi)/2`, giving roughly 106 bits of mantissa.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Num, One, Zero};

#[derive(Clone, Copy, Default, PartialEq)]
pub struct DD {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
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

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };
    /// pi/4 to double-double precision.
    pub const FRAC_PI_4: DD = DD { hi: std::f64::consts::FRAC_PI_4, lo: 3.061616997868383e-17 };

    pub const fn from_f64(x: f64) -> DD {
        DD { hi: x, lo: 0.0 }
    }

    pub fn from_parts(hi: f64, lo: f64) -> DD {
        let (hi, lo) = two_sum(hi, lo);
        DD { hi, lo }
    }

    /// Exact for `|x| < 2^106`.
    pub fn from_i128(x: i128) -> DD {
        let hi = x as f64;
        let rest = x - hi as i128;
        DD::from_parts(hi, rest as f64)
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> DD {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> DD {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DD { hi, lo }
    }

    /// Nearest integer; an exact half rounds away from zero.
    pub fn round(self) -> DD {
        let hi = self.hi.round();
        if hi == self.hi {
            // hi is already integral, the tail carries the fraction
            DD::from_parts(hi, self.lo.round())
        } else if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
            // a half in hi; the sign of the tail picks the side
            let down = self.hi.floor();
            DD::from_f64(if self.lo > 0.0 { down + 1.0 } else { down })
        } else {
            DD::from_f64(hi)
        }
    }

    /// Nearest `i128`; `None` outside the exactly representable range.
    pub fn to_i128(self) -> Option<i128> {
        let r = self.round();
        if !r.hi.is_finite() || r.hi.abs() >= 2f64.powi(105) {
            return None;
        }
        Some(r.hi as i128 + r.lo as i128)
    }

    fn sin_cos_small(x: DD) -> (DD, DD) {
        // Taylor series on |x| <= pi/4; 30 terms reach below 1e-33
        let x2 = x * x;
        let mut term = x;
        let mut sin = x;
        let mut k = 1.0;
        for _ in 0..15 {
            term = -(term * x2) / DD::from_f64((k + 1.0) * (k + 2.0));
            sin += term;
            k += 2.0;
        }
        let mut term = DD::ONE;
        let mut cos = DD::ONE;
        let mut k = 0.0;
        for _ in 0..15 {
            term = -(term * x2) / DD::from_f64((k + 1.0) * (k + 2.0));
            cos += term;
            k += 2.0;
        }
        (sin, cos)
    }

    /// `(cos, sin)` of `2 pi num / den`, with the angle reduced exactly in
    /// rational arithmetic before any rounding.
    pub fn cos_sin_turn(num: i64, den: u64) -> (DD, DD) {
        assert!(den > 0, "zero denominator");
        let den128 = den as u128;
        let r = num.rem_euclid(den as i64) as u128;
        let eight_r = 8 * r;
        let octant = (eight_r / den128) as u32;
        let rem = eight_r - octant as u128 * den128;
        let frac = |a: u128| DD::FRAC_PI_4 * DD::from_i128(a as i128) / DD::from_i128(den128 as i128);
        let (s, c) =
            if octant.is_multiple_of(2) { DD::sin_cos_small(frac(rem)) } else { DD::sin_cos_small(frac(den128 - rem)) };
        match octant {
            0 => (c, s),
            1 => (s, c),
            2 => (-s, c),
            3 => (-c, s),
            4 => (-c, -s),
            5 => (-s, -c),
            6 => (s, -c),
            _ => (c, -s),
        }
    }
}

impl fmt::Debug for DD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DD({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl PartialOrd for DD {
    fn partial_cmp(&self, other: &DD) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, y: DD) -> DD {
        let (s, e) = two_sum(self.hi, y.hi);
        let (t, f) = two_sum(self.lo, y.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DD { hi, lo }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, y: DD) -> DD {
        self + (-y)
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, y: DD) -> DD {
        let (p, e) = two_prod(self.hi, y.hi);
        let e = e + (self.hi * y.lo + self.lo * y.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DD { hi, lo }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, y: DD) -> DD {
        let q1 = self.hi / y.hi;
        let r = self - y.mul_f64(q1);
        let q2 = r.hi / y.hi;
        let r = r - y.mul_f64(q2);
        let q3 = r.hi / y.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DD { hi, lo } + DD::from_f64(q3)
    }
}

impl Rem for DD {
    type Output = DD;
    /// Truncated remainder, `self - trunc(self / y) * y`.
    fn rem(self, y: DD) -> DD {
        let q = self / y;
        let t = if q.hi >= 0.0 { q.hi.floor() } else { q.hi.ceil() };
        let t = if t == q.hi {
            let l = if t > 0.0 { q.lo.floor() } else { q.lo.ceil() };
            DD::from_parts(t, l)
        } else {
            DD::from_f64(t)
        };
        self - t * y
    }
}

impl AddAssign for DD {
    fn add_assign(&mut self, y: DD) {
        *self = *self + y;
    }
}

impl SubAssign for DD {
    fn sub_assign(&mut self, y: DD) {
        *self = *self - y;
    }
}

impl MulAssign for DD {
    fn mul_assign(&mut self, y: DD) {
        *self = *self * y;
    }
}

impl Zero for DD {
    fn zero() -> DD {
        DD::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DD {
    fn one() -> DD {
        DD::ONE
    }
}

impl Num for DD {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<DD, Self::FromStrRadixErr> {
        assert_eq!(radix, 10, "only decimal input is supported");
        s.parse::<f64>().map(DD::from_f64)
    }
}

/// Scalars usable by the Gauss-sum transforms.
pub trait Real: Copy + Num + Neg<Output = Self> + PartialOrd + Send + Sync + fmt::Debug + 'static {
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    /// `exp(2 pi i num / den)`.
    fn root_of_unity(num: i64, den: u64) -> Complex<Self>;
    /// Nearest integer and the distance to it.
    fn round_with_residual(self) -> Option<(i128, f64)>;
}

impl Real for f64 {
    fn from_f64(x: f64) -> f64 {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn root_of_unity(num: i64, den: u64) -> Complex<f64> {
        let (c, s) = DD::cos_sin_turn(num, den);
        Complex::new(c.to_f64(), s.to_f64())
    }
    fn round_with_residual(self) -> Option<(i128, f64)> {
        if !self.is_finite() || self.abs() >= 2f64.powi(100) {
            return None;
        }
        let r = self.round();
        Some((r as i128, (self - r).abs()))
    }
}

impl Real for DD {
    fn from_f64(x: f64) -> DD {
        DD::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        DD::to_f64(self)
    }
    fn root_of_unity(num: i64, den: u64) -> Complex<DD> {
        let (c, s) = DD::cos_sin_turn(num, den);
        Complex::new(c, s)
    }
    fn round_with_residual(self) -> Option<(i128, f64)> {
        let n = self.to_i128()?;
        Some((n, (self - DD::from_i128(n)).abs().to_f64()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_beyond_f64() {
        let third = DD::ONE / DD::from_f64(3.0);
        let back = third * DD::from_f64(3.0) - DD::ONE;
        assert!(back.abs().to_f64() < 1e-31);
        let big = DD::from_i128((1i128 << 80) + 12345);
        assert_eq!(big.to_i128(), Some((1i128 << 80) + 12345));
    }

    #[test]
    fn trig_identities() {
        for den in [7u64, 8, 24, 1000, 999_983] {
            for num in [0i64, 1, 2, 3, 5, (den / 3) as i64, den as i64 - 1, -1] {
                let (c, s) = DD::cos_sin_turn(num, den);
                let one = c * c + s * s - DD::ONE;
                assert!(one.abs().to_f64() < 1e-30, "num={num} den={den}");
                let angle = 2.0 * std::f64::consts::PI * num as f64 / den as f64;
                assert!((c.to_f64() - angle.cos()).abs() < 1e-14);
                assert!((s.to_f64() - angle.sin()).abs() < 1e-14);
            }
        }
        let (c, s) = DD::cos_sin_turn(1, 8);
        let half = DD::ONE / DD::from_f64(2.0);
        assert!((c * c - half).abs().to_f64() < 1e-31);
        assert!((s - c).abs().to_f64() < 1e-31);
        // cos(pi/3) = 1/2
        let (c, _) = DD::cos_sin_turn(1, 6);
        assert!((c - half).abs().to_f64() < 1e-31);
    }

    #[test]
    fn rounding() {
        assert_eq!(DD::from_f64(2.4).to_i128(), Some(2));
        assert_eq!(DD::from_f64(-2.6).to_i128(), Some(-3));
        let x = DD::from_parts(1e20, 0.75);
        assert_eq!(x.to_i128(), Some(100_000_000_000_000_000_001));
        let (n, r) = DD::from_parts(1e18, -0.25).round_with_residual().unwrap();
        assert_eq!(n, 1_000_000_000_000_000_000);
        assert!((r - 0.25).abs() < 1e-12);
    }
}
