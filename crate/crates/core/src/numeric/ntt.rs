//! Exact cyclic convolution of nonnegative integer vectors by number-theoretic
//! transforms over several primes, recombined with the Chinese remainder
//! theorem.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::padic::{inv_mod_u64, pow_mod_u64};

/// NTT-friendly primes below `2^31`, each with `2^23 | p - 1`.
pub const NTT_PRIMES: [u64; 6] = [998244353, 167772161, 469762049, 754974721, 1811939329, 2013265921];

const MAX_LOG_LEN: u32 = 23;

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest primitive root modulo the prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&f| pow_mod_u64(g, (p - 1) / f, p) != 1))
        .expect("a prime has a primitive root")
}

/// Montgomery arithmetic modulo an odd `p < 2^31` with `R = 2^32`.
#[derive(Clone, Copy)]
struct Mont {
    p: u32,
    /// `-p^{-1} mod 2^32`
    neg_inv: u32,
    r2: u32,
}

impl Mont {
    fn new(p: u64) -> Mont {
        let p32 = p as u32;
        let mut inv: u32 = 1;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u32.wrapping_sub(p32.wrapping_mul(inv)));
        }
        let r2 = ((1u128 << 64) % p as u128) as u32;
        Mont { p: p32, neg_inv: inv.wrapping_neg(), r2 }
    }

    #[inline]
    fn reduce(&self, t: u64) -> u32 {
        let m = (t as u32).wrapping_mul(self.neg_inv);
        let u = ((t + m as u64 * self.p as u64) >> 32) as u32;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.reduce(a as u64 * b as u64)
    }

    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn to_mont(&self, a: u64) -> u32 {
        self.mul((a % self.p as u64) as u32, self.r2)
    }

    fn from_mont(&self, a: u32) -> u64 {
        self.reduce(a as u64) as u64
    }
}

struct Ntt {
    p: u64,
    mont: Mont,
    root: u64,
}

impl Ntt {
    fn new(p: u64) -> Ntt {
        Ntt { p, mont: Mont::new(p), root: primitive_root(p) }
    }

    /// In-place transform of Montgomery-form values.
    fn transform(&self, a: &mut [u32], invert: bool) {
        let n = a.len();
        let m = self.mont;
        let mut j = 0usize;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let mut w = pow_mod_u64(self.root, (self.p - 1) / len as u64, self.p);
            if invert {
                w = inv_mod_u64(w, self.p).expect("root is a unit");
            }
            let wm = m.to_mont(w);
            let half = len / 2;
            let mut ws = Vec::with_capacity(half);
            let mut cur = m.to_mont(1);
            for _ in 0..half {
                ws.push(cur);
                cur = m.mul(cur, wm);
            }
            for chunk in a.chunks_mut(len) {
                let (lo, hi) = chunk.split_at_mut(half);
                for k in 0..half {
                    let u = lo[k];
                    let v = m.mul(hi[k], ws[k]);
                    lo[k] = m.add(u, v);
                    hi[k] = m.sub(u, v);
                }
            }
            len <<= 1;
        }
        if invert {
            let inv_n = m.to_mont(inv_mod_u64(n as u64 % self.p, self.p).expect("length is a unit"));
            for x in a.iter_mut() {
                *x = m.mul(*x, inv_n);
            }
        }
    }

    fn padded_transform(&self, a: &[u32], len: usize) -> Vec<u32> {
        let mut f = a.to_vec();
        f.resize(len, 0);
        self.transform(&mut f, false);
        f
    }

    /// Cyclic product of length-`n` Montgomery vectors.
    fn cyclic_mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let n = a.len();
        let len = (2 * n - 1).next_power_of_two();
        assert!(len.trailing_zeros() <= MAX_LOG_LEN, "convolution length {len} exceeds the NTT range");
        let mut fa = self.padded_transform(a, len);
        let fb = if std::ptr::eq(a, b) { fa.clone() } else { self.padded_transform(b, len) };
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = self.mont.mul(*x, *y);
        }
        self.transform(&mut fa, true);
        let (head, tail) = fa.split_at(n);
        let mut out = head.to_vec();
        for (o, v) in out.iter_mut().zip(&tail[..n - 1]) {
            *o = self.mont.add(*o, *v);
        }
        out
    }

    fn cyclic_pow(&self, base: &[u32], e: u32) -> Vec<u32> {
        let n = base.len();
        if e == 0 {
            let mut one = vec![0u32; n];
            one[0] = self.mont.to_mont(1);
            return one;
        }
        let mut acc: Option<Vec<u32>> = None;
        let mut b = base.to_vec();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => b.clone(),
                    Some(a) => self.cyclic_mul(&a, &b),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            b = self.cyclic_mul(&b, &b);
        }
        acc.expect("e > 0")
    }

    fn to_mont_vec(&self, v: &[u64]) -> Vec<u32> {
        v.iter().map(|&x| self.mont.to_mont(x)).collect()
    }
}

fn choose_primes(bound_bits: u32) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut bits = 0.0f64;
    for &p in NTT_PRIMES.iter() {
        if bits > bound_bits as f64 + 1.0 {
            break;
        }
        primes.push(p);
        bits += (p as f64).log2();
    }
    assert!(bits > bound_bits as f64 + 1.0, "result exceeds the CRT range of the NTT primes");
    primes
}

fn crt(primes: &[u64], residues: impl Iterator<Item = u64>) -> BigUint {
    let mut value = BigUint::zero();
    let mut modulus = BigUint::from(1u32);
    for (&p, r) in primes.iter().zip(residues) {
        // value += modulus * ((r - value) / modulus mod p)
        let current: u64 = (&value % p).try_into().expect("reduced below p");
        let m_mod_p: u64 = (&modulus % p).try_into().expect("reduced below p");
        let diff = (r + p - current) % p;
        let t = diff * inv_mod_u64(m_mod_p, p).expect("primes are distinct") % p;
        value += &modulus * t;
        modulus *= p;
    }
    value
}

/// The `e`-fold cyclic self-convolution of a nonnegative integer vector,
/// held as residues modulo enough NTT primes to determine every entry.
pub struct CyclicPower {
    primes: Vec<u64>,
    residues: Vec<Vec<u64>>,
}

impl CyclicPower {
    /// `bound_bits` must bound `log2` of every entry of the result.
    pub fn compute(base: &[u64], e: u32, bound_bits: u32) -> CyclicPower {
        let primes = choose_primes(bound_bits);
        let residues = primes
            .par_iter()
            .map(|&p| {
                let ntt = Ntt::new(p);
                let r = ntt.cyclic_pow(&ntt.to_mont_vec(base), e);
                r.into_iter().map(|x| ntt.mont.from_mont(x)).collect()
            })
            .collect();
        CyclicPower { primes, residues }
    }

    pub fn len(&self) -> usize {
        self.residues[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entry `i` of the convolution power, recovered by CRT.
    pub fn entry(&self, i: usize) -> BigUint {
        crt(&self.primes, self.residues.iter().map(|r| r[i]))
    }
}

/// Selected entries of the `e`-fold cyclic self-convolution, as a dot product
/// of the `floor(e/2)` and `ceil(e/2)` powers; cheaper than [`CyclicPower`]
/// when only a few entries are needed.
pub fn cyclic_power_entries(base: &[u64], e: u32, bound_bits: u32, targets: &[usize]) -> Vec<BigUint> {
    let n = base.len();
    let primes = choose_primes(bound_bits);
    let per_prime: Vec<Vec<u64>> = primes
        .par_iter()
        .map(|&p| {
            let ntt = Ntt::new(p);
            let b = ntt.to_mont_vec(base);
            let lo = ntt.cyclic_pow(&b, e / 2);
            let hi = if e.is_multiple_of(2) { lo.clone() } else { ntt.cyclic_mul(&lo, &b) };
            let m = ntt.mont;
            targets
                .iter()
                .map(|&c| {
                    let mut acc = 0u32;
                    for (i, &x) in lo.iter().enumerate() {
                        if x != 0 {
                            acc = m.add(acc, m.mul(x, hi[(c + n - i) % n]));
                        }
                    }
                    m.from_mont(acc)
                })
                .collect()
        })
        .collect();
    (0..targets.len()).map(|j| crt(&primes, per_prime.iter().map(|r| r[j]))).collect()
}
