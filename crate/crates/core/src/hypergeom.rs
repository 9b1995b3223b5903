//! Truncated sums of `F(z) = sum_n ((1/2)_n / n!)^d z^n` modulo prime powers,
//! the Dwork quotient sequence and its unit-root limit, and executable forms
//! of the elementary congruences behind the mod `p^2` supercongruence.
//!
//! The coefficients `alpha_n = (1/2)_n / n! = C(2n, n) / 4^n` are streamed as
//! `(unit, valuation)` pairs through `alpha_{n+1} = alpha_n (2n+1)/(2n+2)`, so
//! terms divisible by `p` are handled exactly at every precision.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{
    alternating_harmonic, binomial_mod, fermat_quotient_gamma, inv_mod_u64, is_prime, mul_mod_u64, split_valuation,
    PAdicApprox, PrimePowerModulus, Residue,
};

/// `d` copies of `1/2` over `d` copies of `1`, at an odd prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HyperParams {
    d: u32,
    p: u64,
}

impl HyperParams {
    pub fn new(d: u32, p: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput(format!("d must be at least 2, got {d}")));
        }
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
        }
        Ok(HyperParams { d, p })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn modulus(&self, k: u32) -> Result<PrimePowerModulus> {
        PrimePowerModulus::new(self.p, k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EpsilonSign {
    Plus,
    Minus,
}

impl EpsilonSign {
    pub fn value(self) -> i64 {
        match self {
            EpsilonSign::Plus => 1,
            EpsilonSign::Minus => -1,
        }
    }

    pub fn negate(self) -> EpsilonSign {
        match self {
            EpsilonSign::Plus => EpsilonSign::Minus,
            EpsilonSign::Minus => EpsilonSign::Plus,
        }
    }
}

/// `epsilon_p = (-1)^(d(p-1)/2)`.
pub fn epsilon_p(params: HyperParams) -> EpsilonSign {
    let exponent = params.d as u64 * ((params.p - 1) / 2);
    if exponent.is_multiple_of(2) {
        EpsilonSign::Plus
    } else {
        EpsilonSign::Minus
    }
}

/// `F_{p^s}(z) mod p^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedValue {
    pub params: HyperParams,
    pub s: u32,
    pub z: i64,
    pub value: Residue,
}

/// Test hook: adds one to `alpha_index` in every sum it is passed to.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SumOptions {
    pub corrupt_alpha_at: Option<u64>,
}

/// Minimal ring interface for the summation kernel.
trait Ring {
    type E: Clone;
    fn from_u64(&self, v: u64) -> Self::E;
    fn from_i64(&self, v: i64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// Inverse of an element known to be a unit.
    fn inv(&self, a: &Self::E) -> Self::E;
    fn to_residue(&self, a: &Self::E, m: &PrimePowerModulus) -> Residue;

    fn pow(&self, a: &Self::E, mut e: u32) -> Self::E {
        let mut base = a.clone();
        let mut acc = self.from_u64(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

struct NativeRing(u64);

impl Ring for NativeRing {
    type E = u64;
    fn from_u64(&self, v: u64) -> u64 {
        v % self.0
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = *a as u128 + *b as u128;
        (s % self.0 as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod_u64(*a, *b, self.0)
    }
    fn inv(&self, a: &u64) -> u64 {
        inv_mod_u64(*a, self.0).expect("kernel only inverts units")
    }
    fn to_residue(&self, a: &u64, m: &PrimePowerModulus) -> Residue {
        Residue::from_raw_native(*a, m)
    }
}

/// Streaming state for `alpha_n` as `unit * p^valuation`.
struct AlphaState<E> {
    n: u64,
    unit: E,
    valuation: u32,
}

impl<E: Clone> AlphaState<E> {
    fn start<R: Ring<E = E>>(ring: &R) -> Self {
        AlphaState { n: 0, unit: ring.from_u64(1), valuation: 0 }
    }

    /// Advance from `alpha_n` to `alpha_{n+1}`.
    fn step<R: Ring<E = E>>(&mut self, ring: &R, p: u64) {
        let (vn, un) = split_valuation(2 * self.n + 1, p);
        let (vd, ud) = split_valuation(2 * self.n + 2, p);
        let factor = ring.mul(&ring.from_u64(un), &ring.inv(&ring.from_u64(ud)));
        self.unit = ring.mul(&self.unit, &factor);
        self.valuation = self.valuation + vn - vd;
        self.n += 1;
    }
}

/// Partial sums `sum_{n < N} alpha_n^d z^n` for each `N` in `checkpoints`
/// (ascending), all modulo `p^k`.
fn partial_sums_kernel<R: Ring>(
    ring: &R,
    params: HyperParams,
    z: i64,
    k: u32,
    checkpoints: &[u64],
    opts: SumOptions,
) -> Vec<R::E> {
    let p = params.p;
    let d = params.d;
    let mut p_pows = vec![ring.from_u64(1)];
    for i in 1..k {
        p_pows.push(ring.mul(&p_pows[i as usize - 1], &ring.from_u64(p)));
    }
    let zr = ring.from_i64(z);
    let mut zpow = ring.from_u64(1);
    let mut alpha = AlphaState::start(ring);
    let mut sum = ring.from_u64(0);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = 0usize;
    let end = checkpoints.last().copied().unwrap_or(0);
    for n in 0..=end {
        while next < checkpoints.len() && checkpoints[next] == n {
            out.push(sum.clone());
            next += 1;
        }
        if n == end {
            break;
        }
        if opts.corrupt_alpha_at == Some(n) {
            let shift = alpha.valuation.min(k) as usize;
            let value = if shift >= k as usize { ring.from_u64(0) } else { ring.mul(&alpha.unit, &p_pows[shift]) };
            let corrupted = ring.add(&value, &ring.from_u64(1));
            let term = ring.mul(&ring.pow(&corrupted, d), &zpow);
            sum = ring.add(&sum, &term);
        } else {
            let total_val = alpha.valuation as u64 * d as u64;
            if total_val < k as u64 {
                let term = ring.mul(&ring.pow(&alpha.unit, d), &p_pows[total_val as usize]);
                sum = ring.add(&sum, &ring.mul(&term, &zpow));
            }
        }
        zpow = ring.mul(&zpow, &zr);
        alpha.step(ring, p);
    }
    out
}

/// `sum_{n < N} alpha_n^d z^n mod p^k` for every `N` in `term_counts`.
pub fn partial_sums(params: HyperParams, z: i64, term_counts: &[u64], k: u32) -> Result<Vec<Residue>> {
    partial_sums_with(params, z, term_counts, k, SumOptions::default())
}

#[doc(hidden)]
pub fn partial_sums_with(
    params: HyperParams,
    z: i64,
    term_counts: &[u64],
    k: u32,
    opts: SumOptions,
) -> Result<Vec<Residue>> {
    let m = params.modulus(k)?;
    let mut order: Vec<usize> = (0..term_counts.len()).collect();
    order.sort_by_key(|&i| term_counts[i]);
    let mut sorted: Vec<u64> = order.iter().map(|&i| term_counts[i]).collect();
    sorted.dedup();
    let sums: Vec<Residue> = match m.as_u64() {
        Some(n) => {
            let ring = NativeRing(n);
            partial_sums_kernel(&ring, params, z, k, &sorted, opts).iter().map(|e| ring.to_residue(e, &m)).collect()
        }
        None => {
            let ring = BigModRing { m: m.clone(), n: m.value() };
            partial_sums_kernel(&ring, params, z, k, &sorted, opts).iter().map(|e| ring.to_residue(e, &m)).collect()
        }
    };
    Ok(term_counts.iter().map(|n| sums[sorted.binary_search(n).expect("checkpoint present")].clone()).collect())
}

struct BigModRing {
    m: PrimePowerModulus,
    n: BigUint,
}

impl Ring for BigModRing {
    type E = BigUint;
    fn from_u64(&self, v: u64) -> BigUint {
        BigUint::from(v) % &self.n
    }
    fn from_i64(&self, v: i64) -> BigUint {
        Residue::from_i64(v, &self.m).value()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.n
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.n
    }
    fn inv(&self, a: &BigUint) -> BigUint {
        Residue::from_biguint(a, &self.m).inv().expect("kernel only inverts units").value()
    }
    fn to_residue(&self, a: &BigUint, m: &PrimePowerModulus) -> Residue {
        Residue::from_biguint(a, m)
    }
}

fn pow_u64_checked(p: u64, s: u32) -> Result<u64> {
    p.checked_pow(s).ok_or_else(|| Error::InvalidInput(format!("{p}^{s} terms exceed the addressable range")))
}

/// `F_{p^s}(z) mod p^k`.
pub fn truncated_sum(params: HyperParams, s: u32, z: i64, k: u32) -> Result<TruncatedValue> {
    let n = pow_u64_checked(params.p, s)?;
    let value = partial_sums(params, z, &[n], k)?.remove(0);
    Ok(TruncatedValue { params, s, z, value })
}

/// `alpha_r = (1/2)_r / r! mod p^k`.
pub fn alpha(r: u64, m: &PrimePowerModulus) -> Residue {
    let inv4 = Residue::from_u64(4, m).inv().expect("4 is a unit for odd p");
    &binomial_mod(2 * r, r, m) * &inv4.pow(r)
}

/// The sequence `alpha_0, alpha_1, ...` modulo a fixed prime power.
pub struct AlphaSeq {
    modulus: PrimePowerModulus,
    state: AlphaState<u64>,
    ring: NativeRing,
    big: Option<u64>,
}

impl AlphaSeq {
    pub fn new(m: &PrimePowerModulus) -> Self {
        // the sequence is only needed at small precision; big moduli fall back to `alpha`
        let n = m.as_u64().unwrap_or(1);
        let ring = NativeRing(n.max(2));
        let state = AlphaState::start(&ring);
        AlphaSeq { modulus: m.clone(), state, ring, big: if m.is_native() { None } else { Some(0) } }
    }
}

impl Iterator for AlphaSeq {
    type Item = Residue;
    fn next(&mut self) -> Option<Residue> {
        if let Some(r) = self.big.as_mut() {
            let out = alpha(*r, &self.modulus);
            *r += 1;
            return Some(out);
        }
        let k = self.modulus.k();
        let value = if self.state.valuation >= k {
            Residue::zero(&self.modulus)
        } else {
            Residue::from_raw_native(self.state.unit, &self.modulus).shift(self.state.valuation)
        };
        self.state.step(&self.ring, self.modulus.p());
        Some(value)
    }
}

/// Quotients `F_{p^{s+1}}(z) / F_{p^s}(z)` for `s = 0..s_max`, the `s`-th
/// reported modulo `p^{s+1}`. Consecutive quotients are checked to agree
/// modulo `p^s`.
pub fn dwork_quotients(params: HyperParams, z: i64, s_max: u32) -> Result<Vec<PAdicApprox>> {
    dwork_quotients_with(params, z, s_max, SumOptions::default())
}

#[doc(hidden)]
pub fn dwork_quotients_with(params: HyperParams, z: i64, s_max: u32, opts: SumOptions) -> Result<Vec<PAdicApprox>> {
    if s_max == 0 {
        return Err(Error::InvalidInput("s_max must be at least 1".into()));
    }
    let counts: Vec<u64> = (0..=s_max).map(|s| pow_u64_checked(params.p, s)).collect::<Result<_>>()?;
    let sums = partial_sums_with(params, z, &counts, s_max, opts)?;
    if !sums[1].is_unit() {
        return Err(Error::NotAUnit { value: format!("F_{}({z})", params.p), p: params.p, k: 1 });
    }
    let mut out: Vec<PAdicApprox> = Vec::with_capacity(s_max as usize);
    for s in 0..s_max {
        let num = sums[s as usize + 1].reduce(s + 1)?;
        let den = sums[s as usize].reduce(s + 1)?;
        let q = num.div(&den)?;
        if let Some(prev) = out.last() {
            if q.reduce(s)? != prev.residue().reduce(s)? {
                return Err(Error::ConsistencyFailure(format!(
                    "Dwork quotients at levels {} and {} differ mod {}^{}",
                    s - 1,
                    s,
                    params.p,
                    s
                )));
            }
        }
        out.push(PAdicApprox::new(q));
    }
    Ok(out)
}

/// The unit root `f(z) mod p^N`, as `F_{p^N}(z) / F_{p^{N-1}}(z)`.
pub fn unit_root_limit(params: HyperParams, z: i64, precision: u32) -> Result<PAdicApprox> {
    unit_root_limit_with(params, z, precision, SumOptions::default())
}

#[doc(hidden)]
pub fn unit_root_limit_with(params: HyperParams, z: i64, precision: u32, opts: SumOptions) -> Result<PAdicApprox> {
    if precision == 0 {
        return Err(Error::InvalidInput("precision must be at least 1".into()));
    }
    let counts = [params.p, pow_u64_checked(params.p, precision - 1)?, pow_u64_checked(params.p, precision)?];
    let sums = partial_sums_with(params, z, &counts, precision, opts)?;
    if !sums[0].is_unit() {
        return Err(Error::NotAUnit { value: format!("F_{}({z})", params.p), p: params.p, k: 1 });
    }
    Ok(PAdicApprox::new(sums[2].div(&sums[1])?))
}

/// `G_1(z) = 2 sum_{t=0}^{(p-1)/2} (sum_{j=1}^{2t} (-1)^(j-1)/j) alpha_t^d z^t mod p^k`.
pub fn g1_sum(params: HyperParams, z: i64, k: u32) -> Result<Residue> {
    if k == 0 || k > 2 {
        return Err(Error::InvalidInput(format!("G_1 is defined here modulo p or p^2, got k = {k}")));
    }
    let m = params.modulus(k)?;
    let half = (params.p - 1) / 2;
    let zr = Residue::from_i64(z, &m);
    let mut zpow = Residue::one(&m);
    let mut total = Residue::zero(&m);
    for (t, a) in AlphaSeq::new(&m).take(half as usize + 1).enumerate() {
        let inner = alternating_harmonic(2 * t as u64, &m)?;
        total = &total + &(&(&inner * &a.pow(params.d as u64)) * &zpow);
        zpow = &zpow * &zr;
    }
    Ok(&total + &total)
}

/// Both sides of the mod `p^2` splitting congruence for `alpha_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitWitness {
    pub r: u64,
    pub r_prime: u64,
    pub t: u64,
    /// `alpha_r mod p^2`.
    pub lhs: Residue,
    /// Right-hand side when `t < p/2`; `None` when only divisibility by `p` is claimed.
    pub rhs: Option<Residue>,
    pub holds: bool,
}

fn split_rhs(p: u64, r_prime: u64, t: u64, alpha_rp: &Residue, alpha_t: &Residue, gamma: &Residue) -> Result<Residue> {
    let m = alpha_rp.modulus().clone();
    let prp = Residue::from_u64(p, &m) * Residue::from_u64(r_prime, &m);
    let harmonic = alternating_harmonic(2 * t, &m)?;
    let two = Residue::from_u64(2, &m);
    let correction = &(&Residue::one(&m) - &(gamma * &prp)) + &(&(&two * &prp) * &harmonic);
    Ok(&(alpha_rp * alpha_t) * &correction)
}

fn split_witness(
    p: u64,
    r: u64,
    lhs: Residue,
    alpha_rp: &Residue,
    alpha_t: &Residue,
    gamma: &Residue,
) -> Result<SplitWitness> {
    let (r_prime, t) = (r / p, r % p);
    if 2 * t > p {
        let holds = lhs.valuation() >= 1;
        return Ok(SplitWitness { r, r_prime, t, lhs, rhs: None, holds });
    }
    let rhs = split_rhs(p, r_prime, t, alpha_rp, alpha_t, gamma)?;
    let holds = rhs == lhs;
    Ok(SplitWitness { r, r_prime, t, lhs, rhs: Some(rhs), holds })
}

/// Check the splitting congruence `alpha_{pr'+t} = alpha_{r'} alpha_t (1 - gamma p r'
/// + 2 p r' sum_{j<=2t} (-1)^(j-1)/j) mod p^2` at a single `r`.
pub fn check_lemma_split(params: HyperParams, r: u64) -> Result<SplitWitness> {
    let p = params.p;
    let m = params.modulus(2)?;
    let gamma = fermat_quotient_gamma(p, 2)?;
    split_witness(p, r, alpha(r, &m), &alpha(r / p, &m), &alpha(r % p, &m), &gamma)
}

/// [`check_lemma_split`] for every `r < r_end`, sharing one `alpha` table.
pub fn check_lemma_split_range(params: HyperParams, r_end: u64) -> Result<Vec<SplitWitness>> {
    let p = params.p;
    let m = params.modulus(2)?;
    let gamma = fermat_quotient_gamma(p, 2)?;
    let table: Vec<Residue> = AlphaSeq::new(&m).take(r_end as usize).collect();
    (0..r_end)
        .map(|r| {
            let i = r as usize;
            split_witness(p, r, table[i].clone(), &table[(r / p) as usize], &table[(r % p) as usize], &gamma)
        })
        .collect()
}

/// Outcome of the mod `p` reflection checks on `alpha_r` and `F_p(z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryWitness {
    /// `alpha_{(p-1)/2 - r} = (-1)^((p-1)/2) alpha_r mod p` for all `0 <= r < p/2`.
    pub coefficients: bool,
    /// `alpha_n = 0 mod p` for `(p-1)/2 < n < p`.
    pub tail_vanishes: bool,
    /// `z^((p-1)/2) F_p(1/z) = epsilon_p F_p(z) mod p`, coefficientwise.
    pub polynomial: bool,
}

impl SymmetryWitness {
    pub fn holds(&self) -> bool {
        self.coefficients && self.tail_vanishes && self.polynomial
    }
}

pub fn check_symmetry(params: HyperParams) -> Result<SymmetryWitness> {
    let p = params.p;
    let m = params.modulus(1)?;
    let half = ((p - 1) / 2) as usize;
    let table: Vec<Residue> = AlphaSeq::new(&m).take(p as usize).collect();
    let sign = if half.is_multiple_of(2) { Residue::one(&m) } else { -Residue::one(&m) };
    let coefficients = (0..=half).all(|r| table[half - r] == &sign * &table[r]);
    let tail_vanishes = table[half + 1..].iter().all(Residue::is_zero);
    let poly: Vec<Residue> = table[..=half].iter().map(|a| a.pow(params.d as u64)).collect();
    let eps = Residue::from_i64(epsilon_p(params).value(), &m);
    let polynomial = (0..=half).all(|n| poly[half - n] == &eps * &poly[n]);
    Ok(SymmetryWitness { coefficients, tail_vanishes, polynomial })
}

/// Exact rational value of `alpha_r` as `(numerator, denominator)`; used by
/// oracles and diagnostics.
pub fn alpha_exact(r: u64) -> (BigUint, BigUint) {
    let mut num = BigUint::one();
    for i in 0..r {
        num *= 2 * i + 1;
    }
    let mut den = BigUint::one();
    for i in 1..=r {
        den *= 2 * i;
    }
    let g = num_integer::Integer::gcd(&num, &den);
    (num / &g, den / g)
}

/// Reduce an exact fraction with denominator prime to `p`.
pub fn fraction_mod(num: &BigUint, den: &BigUint, m: &PrimePowerModulus) -> Result<Residue> {
    Residue::from_biguint(num, m).div(&Residue::from_biguint(den, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(d: u32, p: u64) -> HyperParams {
        HyperParams::new(d, p).unwrap()
    }

    fn m(p: u64, k: u32) -> PrimePowerModulus {
        PrimePowerModulus::new(p, k).unwrap()
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(0, &m(5, 1)).value_u64(), Some(1));
        assert_eq!(alpha(2, &m(5, 1)).value_u64(), Some(1));
        assert_eq!(alpha(2, &m(3, 3)).value_u64(), Some(24));
    }

    #[test]
    fn alpha_seq_matches_direct() {
        for (p, k) in [(3, 3), (5, 2), (7, 4)] {
            let mm = m(p, k);
            for (r, a) in AlphaSeq::new(&mm).take(200).enumerate() {
                assert_eq!(a, alpha(r as u64, &mm), "p={p} k={k} r={r}");
            }
        }
    }

    #[test]
    fn truncated_sum_examples() {
        for d in 2..=7 {
            for z in [-1, 1, 5] {
                let v = truncated_sum(hp(d, 7), 0, z, 3).unwrap();
                assert_eq!(v.value.value_u64(), Some(1));
            }
        }
        assert_eq!(truncated_sum(hp(2, 3), 1, 1, 2).unwrap().value.value_u64(), Some(8));
        assert_eq!(truncated_sum(hp(4, 3), 1, 1, 3).unwrap().value.value_u64(), Some(23));
        assert!(truncated_sum(hp(2, 3), 1, -1, 1).unwrap().value.is_zero());
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_p(hp(2, 5)), EpsilonSign::Plus);
        assert_eq!(epsilon_p(hp(3, 3)), EpsilonSign::Minus);
        for p in [3, 5, 7, 11, 13] {
            assert_eq!(epsilon_p(hp(4, p)), EpsilonSign::Plus);
        }
    }

    #[test]
    fn dwork_examples() {
        let q = dwork_quotients(hp(2, 5), 1, 2).unwrap();
        let f5 = truncated_sum(hp(2, 5), 1, 1, 1).unwrap().value;
        assert_eq!(q[0].residue(), &f5);
        assert_eq!(q[1].residue().reduce(1).unwrap(), f5);
        assert_eq!(q[1].residue().value_u64(), Some(1));
        assert!(matches!(dwork_quotients(hp(2, 3), -1, 2), Err(Error::NotAUnit { .. })));
    }

    #[test]
    fn unit_root_examples() {
        let f = unit_root_limit(hp(2, 5), 1, 2).unwrap();
        assert_eq!(f.residue().value_u64(), Some(1));
        assert_eq!(f.precision(), 2);
        let f = unit_root_limit(hp(4, 3), 1, 3).unwrap();
        assert_eq!(f.residue().symmetric(), (-4).into());
        let f1 = unit_root_limit(hp(3, 5), 1, 2).unwrap();
        assert_eq!(f1.residue(), &truncated_sum(hp(3, 5), 1, 1, 2).unwrap().value);
        assert_eq!(f1.residue().symmetric(), (-6).into());
    }

    #[test]
    fn big_modulus_path_agrees() {
        // 199^9 exceeds the native bound
        let params = hp(3, 199);
        let big = partial_sums(params, -1, &[199, 500], 9).unwrap();
        let small = partial_sums(params, -1, &[199, 500], 8).unwrap();
        for (b, s) in big.iter().zip(&small) {
            assert!(!b.modulus().is_native());
            assert_eq!(&b.reduce(8).unwrap(), s);
        }
    }

    #[test]
    fn g1_examples() {
        let g = g1_sum(hp(2, 5), 1, 1).unwrap();
        assert_eq!(g.value_u64(), Some(1));
        let gamma = fermat_quotient_gamma(5, 1).unwrap();
        let f = truncated_sum(hp(2, 5), 1, 1, 1).unwrap().value;
        assert_eq!(g, &gamma * &f);
        assert!(g1_sum(hp(2, 5), 1, 3).is_err());
    }

    #[test]
    fn g1_constant_term_is_zero() {
        assert!(g1_sum(hp(3, 11), 0, 2).unwrap().is_zero());
    }

    #[test]
    fn split_examples() {
        let w = check_lemma_split(hp(2, 5), 3).unwrap();
        assert!(w.holds);
        let w = check_lemma_split(hp(2, 5), 11).unwrap();
        assert_eq!((w.r_prime, w.t), (2, 1));
        assert!(w.holds);
        assert_eq!(w.rhs.as_ref(), Some(&w.lhs));
        let w = check_lemma_split(hp(2, 5), 8).unwrap();
        assert!(w.rhs.is_none());
        assert!(w.lhs.valuation() >= 1);
        assert!(w.holds);
    }

    #[test]
    fn symmetry_examples() {
        let mm = m(5, 1);
        assert_eq!(alpha(2, &mm), alpha(0, &mm));
        let m3 = m(3, 1);
        assert_eq!(alpha(1, &m3), -Residue::one(&m3));
        for p in [3, 5, 7, 11, 13, 97] {
            for d in 2..=7 {
                assert!(check_symmetry(hp(d, p)).unwrap().holds(), "d={d} p={p}");
            }
        }
    }

    #[test]
    fn corrupted_alpha_changes_sum() {
        let params = hp(3, 7);
        let clean = partial_sums(params, 1, &[49], 2).unwrap();
        let dirty = partial_sums_with(params, 1, &[49], 2, SumOptions { corrupt_alpha_at: Some(1) }).unwrap();
        assert_ne!(clean, dirty);
    }
}
