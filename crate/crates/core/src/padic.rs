//! Exact arithmetic in `Z/p^k Z` for odd primes `p`.
//!
//! Moduli below 2^63 are handled with native 128-bit products; larger moduli
//! switch to arbitrary-precision integers. The representation is chosen by
//! [`PrimePowerModulus::new`] and never leaks through the API.
//!
//! Mixing residues with different moduli is a programming error and panics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Moduli strictly below this bound use the native representation.
const NATIVE_BOUND: u128 = 1 << 63;

/// Trial-division primality test; the primes used here are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Odd primes `3 <= p <= bound`, ascending.
pub fn odd_primes_up_to(bound: u64) -> Vec<u64> {
    (3..=bound).step_by(2).filter(|&n| is_prime(n)).collect()
}

/// Legendre symbol `(a | p)` for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod_u64(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub(crate) fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

fn inv_mod_big(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let a = BigInt::from_biguint(Sign::Plus, a % m);
    let m = BigInt::from_biguint(Sign::Plus, m.clone());
    let e = a.extended_gcd(&m);
    if !e.gcd.is_one() {
        return None;
    }
    e.x.mod_floor(&m).to_biguint()
}

/// `p`-adic valuation of a nonzero integer together with its prime-to-`p` part.
pub fn split_valuation(mut n: u64, p: u64) -> (u32, u64) {
    debug_assert!(n != 0);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    (v, n)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum ModValue {
    Native(u64),
    Big(Arc<BigUint>),
}

/// The modulus `p^k` for an odd prime `p` and `k >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimePowerModulus {
    p: u64,
    k: u32,
    value: ModValue,
}

impl PrimePowerModulus {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
        }
        if k == 0 {
            return Err(Error::InvalidInput("exponent must be at least 1".into()));
        }
        let big = BigUint::from(p).pow(k);
        let value = match big.to_u128() {
            Some(v) if v < NATIVE_BOUND => ModValue::Native(v as u64),
            _ => ModValue::Big(Arc::new(big)),
        };
        Ok(PrimePowerModulus { p, k, value })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// The same prime with a different exponent.
    pub fn with_exponent(&self, k: u32) -> Result<Self> {
        PrimePowerModulus::new(self.p, k)
    }

    /// `p^k` when it fits the native representation.
    pub fn as_u64(&self) -> Option<u64> {
        match self.value {
            ModValue::Native(v) => Some(v),
            ModValue::Big(_) => None,
        }
    }

    pub fn value(&self) -> BigUint {
        match &self.value {
            ModValue::Native(v) => BigUint::from(*v),
            ModValue::Big(b) => (**b).clone(),
        }
    }

    pub fn is_native(&self) -> bool {
        matches!(self.value, ModValue::Native(_))
    }
}

impl fmt::Display for PrimePowerModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Native(u64),
    Big(BigUint),
}

/// An integer modulo `p^k`, stored in `[0, p^k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    value: Repr,
    modulus: PrimePowerModulus,
}

impl Residue {
    pub fn zero(m: &PrimePowerModulus) -> Self {
        Residue::from_u64(0, m)
    }

    pub fn one(m: &PrimePowerModulus) -> Self {
        Residue::from_u64(1, m)
    }

    pub fn from_u64(v: u64, m: &PrimePowerModulus) -> Self {
        let value = match &m.value {
            ModValue::Native(n) => Repr::Native(v % n),
            ModValue::Big(b) => Repr::Big(BigUint::from(v) % &**b),
        };
        Residue { value, modulus: m.clone() }
    }

    pub fn from_i64(v: i64, m: &PrimePowerModulus) -> Self {
        Residue::from_bigint(&BigInt::from(v), m)
    }

    pub fn from_biguint(v: &BigUint, m: &PrimePowerModulus) -> Self {
        let value = match &m.value {
            ModValue::Native(n) => Repr::Native((v % n).to_u64().expect("reduced below native bound")),
            ModValue::Big(b) => Repr::Big(v % &**b),
        };
        Residue { value, modulus: m.clone() }
    }

    pub fn from_bigint(v: &BigInt, m: &PrimePowerModulus) -> Self {
        let modulus = BigInt::from_biguint(Sign::Plus, m.value());
        let reduced = v.mod_floor(&modulus).to_biguint().expect("mod_floor is nonnegative");
        Residue::from_biguint(&reduced, m)
    }

    pub(crate) fn from_raw_native(v: u64, m: &PrimePowerModulus) -> Self {
        debug_assert!(m.as_u64().is_some_and(|n| v < n));
        Residue { value: Repr::Native(v), modulus: m.clone() }
    }

    pub fn modulus(&self) -> &PrimePowerModulus {
        &self.modulus
    }

    /// The representative in `[0, p^k)` if it fits in a `u64`.
    pub fn value_u64(&self) -> Option<u64> {
        match &self.value {
            Repr::Native(v) => Some(*v),
            Repr::Big(b) => b.to_u64(),
        }
    }

    pub fn value(&self) -> BigUint {
        match &self.value {
            Repr::Native(v) => BigUint::from(*v),
            Repr::Big(b) => b.clone(),
        }
    }

    /// The representative of least absolute value, in `(-p^k/2, p^k/2]`.
    pub fn symmetric(&self) -> BigInt {
        let m = self.modulus.value();
        let v = self.value();
        if &v + &v > m {
            BigInt::from_biguint(Sign::Plus, v) - BigInt::from_biguint(Sign::Plus, m)
        } else {
            BigInt::from_biguint(Sign::Plus, v)
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Repr::Native(v) => *v == 0,
            Repr::Big(b) => b.is_zero(),
        }
    }

    pub fn is_unit(&self) -> bool {
        let p = self.modulus.p;
        match &self.value {
            Repr::Native(v) => v % p != 0,
            Repr::Big(b) => !(b % p).is_zero(),
        }
    }

    /// `p`-adic valuation of the representative, saturating at `k` for zero.
    pub fn valuation(&self) -> u32 {
        if self.is_zero() {
            return self.modulus.k;
        }
        let p = self.modulus.p;
        let mut v = self.value();
        let mut n = 0;
        while (&v % p).is_zero() {
            v /= p;
            n += 1;
        }
        n
    }

    fn assert_same(&self, other: &Residue) {
        assert_eq!(
            self.modulus, other.modulus,
            "residue arithmetic between moduli {} and {}",
            self.modulus, other.modulus
        );
    }

    pub fn inv(&self) -> Result<Residue> {
        let not_unit = || Error::NotAUnit { value: self.value().to_string(), p: self.modulus.p, k: self.modulus.k };
        match (&self.value, &self.modulus.value) {
            (Repr::Native(v), ModValue::Native(n)) => {
                let inv = inv_mod_u64(*v, *n).ok_or_else(not_unit)?;
                Ok(Residue::from_raw_native(inv, &self.modulus))
            }
            (Repr::Big(v), ModValue::Big(n)) => {
                let inv = inv_mod_big(v, n).ok_or_else(not_unit)?;
                Ok(Residue { value: Repr::Big(inv), modulus: self.modulus.clone() })
            }
            _ => unreachable!("representation always follows the modulus"),
        }
    }

    pub fn div(&self, other: &Residue) -> Result<Residue> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, mut exp: u64) -> Residue {
        let mut base = self.clone();
        let mut acc = Residue::one(&self.modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// Reduce to a smaller exponent `k' <= k`.
    pub fn reduce(&self, k: u32) -> Result<Residue> {
        if k > self.modulus.k {
            return Err(Error::InvalidInput(format!("cannot raise precision from {} to {}", self.modulus, k)));
        }
        let m = self.modulus.with_exponent(k)?;
        Ok(Residue::from_biguint(&self.value(), &m))
    }

    /// Multiply by `p^e`.
    pub fn shift(&self, e: u32) -> Residue {
        if e >= self.modulus.k {
            return Residue::zero(&self.modulus);
        }
        let pe = Residue::from_biguint(&BigUint::from(self.modulus.p).pow(e), &self.modulus);
        self * &pe
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value(), self.modulus)
    }
}

impl Add for &Residue {
    type Output = Residue;
    fn add(self, rhs: &Residue) -> Residue {
        self.assert_same(rhs);
        let value = match (&self.value, &rhs.value, &self.modulus.value) {
            (Repr::Native(a), Repr::Native(b), ModValue::Native(n)) => {
                Repr::Native(((*a as u128 + *b as u128) % *n as u128) as u64)
            }
            (Repr::Big(a), Repr::Big(b), ModValue::Big(n)) => Repr::Big((a + b) % &**n),
            _ => unreachable!(),
        };
        Residue { value, modulus: self.modulus.clone() }
    }
}

impl Sub for &Residue {
    type Output = Residue;
    fn sub(self, rhs: &Residue) -> Residue {
        self + &(-rhs)
    }
}

impl Neg for &Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        let value = match (&self.value, &self.modulus.value) {
            (Repr::Native(a), ModValue::Native(n)) => Repr::Native(if *a == 0 { 0 } else { n - a }),
            (Repr::Big(a), ModValue::Big(n)) => Repr::Big(if a.is_zero() { BigUint::zero() } else { &**n - a }),
            _ => unreachable!(),
        };
        Residue { value, modulus: self.modulus.clone() }
    }
}

impl Mul for &Residue {
    type Output = Residue;
    fn mul(self, rhs: &Residue) -> Residue {
        self.assert_same(rhs);
        let value = match (&self.value, &rhs.value, &self.modulus.value) {
            (Repr::Native(a), Repr::Native(b), ModValue::Native(n)) => Repr::Native(mul_mod_u64(*a, *b, *n)),
            (Repr::Big(a), Repr::Big(b), ModValue::Big(n)) => Repr::Big((a * b) % &**n),
            _ => unreachable!(),
        };
        Residue { value, modulus: self.modulus.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Residue {
            type Output = Residue;
            fn $f(self, rhs: Residue) -> Residue {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        -&self
    }
}

/// A `p`-adic number known modulo `p^N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdicApprox {
    residue: Residue,
}

impl PAdicApprox {
    pub fn new(residue: Residue) -> Self {
        PAdicApprox { residue }
    }

    pub fn residue(&self) -> &Residue {
        &self.residue
    }

    pub fn precision(&self) -> u32 {
        self.residue.modulus().k()
    }

    pub fn into_residue(self) -> Residue {
        self.residue
    }
}

impl fmt::Display for PAdicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.residue.value(), self.residue.modulus().p(), self.precision())
    }
}

/// `C(n, r) mod p^k`, exact even when `p` divides the factorials involved.
pub fn binomial_mod(n: u64, r: u64, m: &PrimePowerModulus) -> Residue {
    if r > n {
        return Residue::zero(m);
    }
    let r = r.min(n - r);
    let p = m.p();
    let mut valuation: i64 = 0;
    let mut num = Residue::one(m);
    let mut den = Residue::one(m);
    for i in 1..=r {
        let (vn, un) = split_valuation(n - r + i, p);
        let (vd, ud) = split_valuation(i, p);
        valuation += vn as i64 - vd as i64;
        num = &num * &Residue::from_u64(un, m);
        den = &den * &Residue::from_u64(ud, m);
    }
    debug_assert!(valuation >= 0, "binomial coefficients are integers");
    let unit = num.div(&den).expect("prime-to-p parts are units");
    unit.shift(valuation as u32)
}

/// Fermat quotient `gamma = (4^(p-1) - 1)/p` reduced modulo `p^k`.
pub fn fermat_quotient_gamma(p: u64, k: u32) -> Result<Residue> {
    let m = PrimePowerModulus::new(p, k)?;
    let wide = BigUint::from(p).pow(k + 1);
    let four_pow = BigUint::from(4u32).modpow(&BigUint::from(p - 1), &wide);
    // four_pow >= 1 since 4^(p-1) is a unit; the division below is exact
    let numerator = four_pow - BigUint::one();
    let (quot, rem) = numerator.div_rem(&BigUint::from(p));
    debug_assert!(rem.is_zero());
    Ok(Residue::from_biguint(&quot, &m))
}

/// `sum_{j=1}^{upper} (-1)^(j-1) / j mod p^k`.
pub fn alternating_harmonic(upper: u64, m: &PrimePowerModulus) -> Result<Residue> {
    let p = m.p();
    if let Some(j) = (1..=upper).find(|j| j % p == 0) {
        return Err(Error::NotAUnit { value: j.to_string(), p, k: m.k() });
    }
    // running fraction num/den, a single inversion at the end
    let mut num = Residue::zero(m);
    let mut den = Residue::one(m);
    for j in 1..=upper {
        let jr = Residue::from_u64(j, m);
        let term = if j % 2 == 1 { den.clone() } else { -&den };
        num = &(&num * &jr) + &term;
        den = &den * &jr;
    }
    num.div(&den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64, k: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, k).unwrap()
    }

    #[test]
    fn inverse_examples() {
        let m27 = m(3, 3);
        assert_eq!(Residue::from_u64(2, &m27).inv().unwrap().value_u64(), Some(14));
        assert_eq!(Residue::one(&m(7, 4)).inv().unwrap().value_u64(), Some(1));
        assert!(matches!(Residue::from_u64(3, &m(3, 2)).inv(), Err(Error::NotAUnit { .. })));
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(PrimePowerModulus::new(2, 3).is_err());
        assert!(PrimePowerModulus::new(9, 1).is_err());
        assert!(PrimePowerModulus::new(5, 0).is_err());
    }

    #[test]
    fn switches_to_big_representation() {
        let small = m(199, 8);
        assert!(small.is_native());
        let big = m(199, 9);
        assert!(!big.is_native());
        let x = Residue::from_u64(123_456_789, &big);
        let y = x.inv().unwrap();
        assert_eq!((&x * &y).value_u64(), Some(1));
        assert_eq!(big.value(), BigUint::from(199u32).pow(9));
    }

    #[test]
    #[should_panic(expected = "residue arithmetic between moduli")]
    fn mixing_moduli_panics() {
        let _ = &Residue::one(&m(5, 2)) + &Residue::one(&m(5, 3));
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial_mod(10, 5, &m(5, 2)).value_u64(), Some(2));
        assert_eq!(binomial_mod(17, 0, &m(5, 2)).value_u64(), Some(1));
        assert_eq!(binomial_mod(4, 2, &m(5, 1)).value_u64(), Some(1));
        assert_eq!(binomial_mod(25, 5, &m(5, 3)).value_u64(), Some(53130 % 125));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(fermat_quotient_gamma(5, 1).unwrap().value_u64(), Some(1));
        assert_eq!(fermat_quotient_gamma(3, 1).unwrap().value_u64(), Some(2));
        assert_eq!(fermat_quotient_gamma(3, 2).unwrap().value_u64(), Some(5));
        assert_eq!(fermat_quotient_gamma(7, 3).unwrap().value_u64(), Some(((4u64.pow(6) - 1) / 7) % 343));
    }

    #[test]
    fn alternating_harmonic_examples() {
        let m5 = m(5, 1);
        assert_eq!(alternating_harmonic(4, &m5).unwrap().value_u64(), Some(1));
        assert!(alternating_harmonic(0, &m5).unwrap().is_zero());
        assert_eq!(alternating_harmonic(4, &m5).unwrap(), fermat_quotient_gamma(5, 1).unwrap());
        assert!(alternating_harmonic(5, &m5).is_err());
    }

    #[test]
    fn legendre_symbols() {
        assert_eq!(legendre(-4, 5), 1);
        assert_eq!(legendre(-4, 7), -1);
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(14, 7), 0);
    }

    #[test]
    fn valuation_and_symmetric() {
        let m = m(5, 3);
        assert_eq!(Residue::from_u64(50, &m).valuation(), 2);
        assert_eq!(Residue::zero(&m).valuation(), 3);
        assert_eq!(Residue::from_i64(-4, &m).symmetric(), BigInt::from(-4));
    }
}
