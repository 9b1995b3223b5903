//! Finite fields `F_q`, `q = p^k`, as explicit tables.
//!
//! An element with coefficients `c_0 + c_1 x + ... + c_{k-1} x^{k-1}` over the
//! defining modulus has index `sum c_i p^i`; index 0 is zero and the prime
//! subfield occupies indices `0..p`. Multiplicative characters are handled as
//! exponents: `omega^m` sends `g^j` to `exp(2 pi i m j / (q-1))` for the chosen
//! generator `g`.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::is_prime;

/// Largest field order built unless a caller raises the bound.
pub const DEFAULT_MAX_Q: u64 = 2_000_000;

/// Polynomials over `F_p`, coefficients lowest degree first.
mod poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    /// `a mod f` for monic `f`.
    pub fn rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        let k = f.len() - 1;
        let mut r = a.to_vec();
        trim(&mut r);
        while r.len() > k {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - k;
            for (i, &c) in f.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - lead * c % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, f, p)
    }

    pub fn pow_mod(a: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut base = rem(a, f, p);
        let mut acc = rem(&[1], f, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, f, p);
            }
            base = mul_mod(&base, &base, f, p);
            e >>= 1;
        }
        acc
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> =
            (0..n).map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p).collect();
        trim(&mut out);
        out
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            // make b monic so `rem` applies
            let inv = crate::padic::inv_mod_u64(*b.last().unwrap(), p).expect("nonzero mod p");
            let monic: Vec<u64> = b.iter().map(|c| c * inv % p).collect();
            let r = rem(&a, &monic, p);
            a = monic;
            b = r;
        }
        a
    }

    /// Rabin's test for monic `f` of degree `k`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let k = (f.len() - 1) as u64;
        if k == 1 {
            return true;
        }
        let x = [0u64, 1];
        let frob = |e: u64| {
            let mut y = x.to_vec();
            for _ in 0..e {
                y = pow_mod(&y, p, f, p);
            }
            y
        };
        if sub(&frob(k), &x, p) != rem(&[], f, p) {
            return false;
        }
        super::prime_factors(k).into_iter().all(|r| {
            let g = gcd(f, &sub(&frob(k / r), &x, p), p);
            g.len() == 1
        })
    }
}

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

/// A multiplicative character `omega^m`, stored as `m mod (q-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CharacterIndex {
    m: u64,
    order: u64,
}

impl CharacterIndex {
    pub fn new(m: i64, group_order: u64) -> CharacterIndex {
        CharacterIndex { m: m.rem_euclid(group_order as i64) as u64, order: group_order }
    }

    pub fn trivial(group_order: u64) -> CharacterIndex {
        CharacterIndex { m: 0, order: group_order }
    }

    /// The quadratic character `phi = omega^((q-1)/2)`.
    pub fn quadratic(group_order: u64) -> CharacterIndex {
        CharacterIndex { m: group_order / 2, order: group_order }
    }

    pub fn exponent(self) -> u64 {
        self.m
    }

    pub fn is_trivial(self) -> bool {
        self.m == 0
    }

    pub fn mul(self, other: CharacterIndex) -> CharacterIndex {
        assert_eq!(self.order, other.order, "characters of different groups");
        CharacterIndex { m: (self.m + other.m) % self.order, order: self.order }
    }

    pub fn inverse(self) -> CharacterIndex {
        CharacterIndex { m: (self.order - self.m) % self.order, order: self.order }
    }
}

/// Tables for `F_q`: generator powers, discrete logarithms and traces.
#[derive(Clone, Debug)]
pub struct FieldTable {
    p: u64,
    k: u32,
    q: u64,
    /// Monic defining polynomial, `k + 1` coefficients.
    modulus: Vec<u64>,
    generator: u64,
    power: Vec<u32>,
    /// `dlog[0]` is unused.
    dlog: Vec<u32>,
    trace: Vec<u32>,
}

impl FieldTable {
    pub fn build(p: u64, k: u32) -> Result<FieldTable> {
        FieldTable::build_with_bound(p, k, DEFAULT_MAX_Q)
    }

    pub fn build_with_bound(p: u64, k: u32, max_q: u64) -> Result<FieldTable> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
        }
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be at least 1".into()));
        }
        let q = p.checked_pow(k).filter(|&q| q <= max_q.min(u32::MAX as u64));
        let q = q.ok_or(Error::TooLarge { q: p.saturating_pow(k), bound: max_q })?;
        let modulus = smallest_irreducible(p, k);
        let mut table =
            FieldTable { p, k, q, modulus, generator: 0, power: Vec::new(), dlog: Vec::new(), trace: Vec::new() };
        table.trace = table.trace_table();
        let generator = (1..q).find(|&g| table.has_full_order(g)).expect("F_q^x is cyclic");
        table.fill_powers(generator);
        Ok(table)
    }

    /// The same field and modulus with a different primitive element.
    pub fn with_generator(&self, generator: u64) -> Result<FieldTable> {
        if generator == 0 || generator >= self.q || !self.has_full_order(generator) {
            return Err(Error::InvalidInput(format!("{generator} does not generate F_{}^x", self.q)));
        }
        let mut t = self.clone();
        t.fill_powers(generator);
        Ok(t)
    }

    /// Primitive elements in index order.
    pub fn primitive_elements(&self) -> impl Iterator<Item = u64> + '_ {
        (1..self.q).filter(move |&g| self.is_primitive(g))
    }

    pub fn is_primitive(&self, x: u64) -> bool {
        x != 0 && num_integer::Integer::gcd(&(self.dlog[x as usize] as u64), &self.order()) == 1
    }

    fn has_full_order(&self, g: u64) -> bool {
        let n = self.q - 1;
        let c = self.coefficients(g);
        prime_factors(n).into_iter().all(|r| poly::pow_mod(&c, n / r, &self.modulus, self.p) != [1])
    }

    fn fill_powers(&mut self, generator: u64) {
        let n = (self.q - 1) as usize;
        let mut power = Vec::with_capacity(n);
        let mut dlog = vec![u32::MAX; self.q as usize];
        let mut cur = 1u64;
        for j in 0..n {
            power.push(cur as u32);
            dlog[cur as usize] = j as u32;
            cur = self.mul_slow(cur, generator);
        }
        debug_assert_eq!(cur, 1);
        self.generator = generator;
        self.power = power;
        self.dlog = dlog;
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            return a * b % self.p;
        }
        let prod = poly::mul_mod(&self.coefficients(a), &self.coefficients(b), &self.modulus, self.p);
        self.index(&prod)
    }

    fn trace_table(&self) -> Vec<u32> {
        let p = self.p;
        let basis: Vec<u64> = (0..self.k as usize)
            .map(|i| {
                let mut xi = vec![0u64; i + 1];
                xi[i] = 1;
                let mut y = poly::rem(&xi, &self.modulus, p);
                let mut total = 0u64;
                for _ in 0..self.k {
                    total = (total + y.first().copied().unwrap_or(0)) % p;
                    y = poly::pow_mod(&y, p, &self.modulus, p);
                }
                total
            })
            .collect();
        (0..self.q)
            .map(|x| {
                let t = self.coefficients(x).iter().zip(&basis).fold(0, |acc, (c, b)| (acc + c * b) % p);
                t as u32
            })
            .collect()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `q - 1`.
    pub fn order(&self) -> u64 {
        self.q - 1
    }

    pub fn modulus_poly(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// `g^j`, `j` taken mod `q - 1`.
    pub fn power(&self, j: u64) -> u64 {
        self.power[(j % self.order()) as usize] as u64
    }

    pub fn power_table(&self) -> &[u32] {
        &self.power
    }

    pub fn dlog(&self, x: u64) -> Result<u64> {
        if x == 0 {
            return Err(Error::ZeroArgument);
        }
        Ok(self.dlog[x as usize] as u64)
    }

    pub fn trace(&self, x: u64) -> u64 {
        self.trace[x as usize] as u64
    }

    pub fn trace_values(&self) -> &[u32] {
        &self.trace
    }

    pub fn coefficients(&self, x: u64) -> Vec<u64> {
        let mut c = Vec::with_capacity(self.k as usize);
        let mut r = x;
        for _ in 0..self.k {
            c.push(r % self.p);
            r /= self.p;
        }
        c
    }

    pub fn index(&self, coeffs: &[u64]) -> u64 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c % self.p)
    }

    /// `t mod p` in the prime subfield.
    pub fn embed(&self, t: i64) -> u64 {
        t.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        let c: Vec<u64> = self.coefficients(a).iter().map(|&x| (self.p - x) % self.p).collect();
        self.index(&c)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.order();
        self.power[((self.dlog[a as usize] as u64 + self.dlog[b as usize] as u64) % n) as usize] as u64
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        let l = self.dlog(a)?;
        Ok(self.power((self.order() - l) % self.order()))
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let l = self.dlog[a as usize] as u128 * e as u128 % self.order() as u128;
        self.power[l as usize] as u64
    }

    /// `m * dlog(x) mod (q-1)`: the exponent of `exp(2 pi i / (q-1))` giving `omega^m(x)`.
    pub fn omega_eval(&self, m: CharacterIndex, x: u64) -> Result<u64> {
        let l = self.dlog(x)? as u128;
        Ok((l * m.exponent() as u128 % self.order() as u128) as u64)
    }

    /// `phi(x)` in `{-1, 0, 1}`.
    pub fn quadratic_character(&self, x: u64) -> i32 {
        match self.dlog(x) {
            Err(_) => 0,
            Ok(l) if l % 2 == 0 => 1,
            Ok(_) => -1,
        }
    }

    /// One line per element: index, coefficient list, dlog (`-` for zero), trace.
    pub fn dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        for x in 0..self.q {
            let coeffs: Vec<String> = self.coefficients(x).iter().map(u64::to_string).collect();
            let dl = match self.dlog(x) {
                Ok(l) => l.to_string(),
                Err(_) => "-".to_string(),
            };
            writeln!(w, "{x} [{}] {dl} {}", coeffs.join(","), self.trace(x))?;
        }
        Ok(())
    }
}

/// Monic irreducible of degree `k` whose lower coefficients have the smallest
/// index `sum c_i p^i`.
fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    if k == 1 {
        return vec![0, 1];
    }
    let count = p.pow(k);
    for idx in 0..count {
        let mut f: Vec<u64> = Vec::with_capacity(k as usize + 1);
        let mut r = idx;
        for _ in 0..k {
            f.push(r % p);
            r /= p;
        }
        f.push(1);
        if f[0] != 0 && poly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::pow_mod_u64;

    fn naive_order(p: u64, g: u64) -> u64 {
        (1..p).find(|&e| pow_mod_u64(g, e, p) == 1).unwrap()
    }

    #[test]
    fn prime_field_examples() {
        let f = FieldTable::build(3, 1).unwrap();
        assert_eq!(f.power_table(), &[1, 2]);
        assert_eq!((0..3).map(|x| f.trace(x)).collect::<Vec<_>>(), vec![0, 1, 2]);
        let f = FieldTable::build(5, 1).unwrap();
        assert_eq!(f.generator(), 2);
        assert_eq!(naive_order(5, 2), 4);
    }

    #[test]
    fn f9_example() {
        let f = FieldTable::build(3, 2).unwrap();
        assert_eq!(f.modulus_poly(), &[1, 0, 1]);
        // x + 1 has index 1 + 3
        assert_eq!(f.generator(), 4);
        let x_plus_1 = f.index(&[1, 1]);
        let order = (1..=8).find(|&e| f.pow(x_plus_1, e) == 1).unwrap();
        assert_eq!(order, 8);
        // x^2 = -1
        let x = f.index(&[0, 1]);
        assert_eq!(f.mul(x, x), 2);
    }

    #[test]
    fn tables_are_consistent() {
        for (p, k) in [(3, 1), (3, 3), (5, 2), (7, 2), (11, 2), (3, 5), (13, 1)] {
            let f = FieldTable::build(p, k).unwrap();
            let n = f.order() as usize;
            let mut seen = vec![false; f.q() as usize];
            for (j, &x) in f.power_table().iter().enumerate() {
                assert!(x != 0 && !seen[x as usize]);
                seen[x as usize] = true;
                assert_eq!(f.dlog(x as u64).unwrap(), j as u64);
            }
            assert_eq!(seen.iter().filter(|&&s| s).count(), n);
            // trace against the Frobenius sum
            for x in (0..f.q()).step_by(7) {
                let mut y = x;
                let mut sum = 0;
                for _ in 0..k {
                    sum = f.add(sum, y);
                    y = f.pow(y, p);
                }
                assert_eq!(sum, f.trace(x), "p={p} k={k} x={x}");
            }
        }
    }

    #[test]
    fn too_large_rejected() {
        assert!(matches!(FieldTable::build(1009, 3), Err(Error::TooLarge { .. })));
        assert!(FieldTable::build(9, 1).is_err());
    }

    #[test]
    fn omega_examples() {
        let f = FieldTable::build(5, 1).unwrap();
        let n = f.order();
        for x in 1..5 {
            assert_eq!(f.omega_eval(CharacterIndex::trivial(n), x).unwrap(), 0);
        }
        for m in 0..4 {
            assert_eq!(f.omega_eval(CharacterIndex::new(m, n), f.generator()).unwrap(), m as u64);
        }
        // phi(2) = i^2 = -1
        assert_eq!(f.omega_eval(CharacterIndex::quadratic(n), 2).unwrap(), 2);
        assert_eq!(f.quadratic_character(2), -1);
        assert_eq!(f.omega_eval(CharacterIndex::quadratic(n), 0), Err(Error::ZeroArgument));
    }

    #[test]
    fn regenerated_tables() {
        let f = FieldTable::build(7, 2).unwrap();
        let other = f.primitive_elements().nth(1).unwrap();
        let g = f.with_generator(other).unwrap();
        assert_eq!(g.generator(), other);
        assert_eq!(g.dlog(other).unwrap(), 1);
        assert!(f.with_generator(1).is_err());
        for x in 1..f.q() {
            assert_eq!(g.mul(x, g.inv(x).unwrap()), 1);
        }
    }

    #[test]
    fn dump_format() {
        let f = FieldTable::build(3, 2).unwrap();
        let mut out = Vec::new();
        f.dump(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[0], "0 [0,0] - 0");
        assert_eq!(lines[4], "4 [1,1] 1 2");
    }
}
