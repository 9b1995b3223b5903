//! Coefficients of the modular forms that the congruences compare against:
//! eta-quotient expansions, CM closed forms, two coefficient tables given
//! only as printed expansions, and `b_p` read off a zeta factorization.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{is_prime, legendre};
use crate::zeta::{factor_check, FactorShape, ZetaFactor};

/// `prod_delta eta(delta tau)^e_delta`, `eta(tau) = q^(1/24) prod (1 - q^n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EtaQuotient {
    /// `(delta, e)` pairs in the order given.
    pub factors: Vec<(u32, i32)>,
}

impl EtaQuotient {
    pub fn new(factors: Vec<(u32, i32)>) -> Result<EtaQuotient> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("empty eta quotient".into()));
        }
        if let Some(&(delta, _)) = factors.iter().find(|(d, _)| *d == 0) {
            return Err(Error::InvalidInput(format!("scale {delta} must be positive")));
        }
        Ok(EtaQuotient { factors })
    }

    /// `sum delta e / 24`, when it is an integer.
    pub fn leading_power(&self) -> Option<i64> {
        let s: i64 = self.factors.iter().map(|&(d, e)| d as i64 * e as i64).sum();
        (s % 24 == 0).then_some(s / 24)
    }

    /// `eta(2 tau)^4 eta(4 tau)^4`, weight 4, level 8.
    pub fn weight4_level8() -> EtaQuotient {
        EtaQuotient { factors: vec![(2, 4), (4, 4)] }
    }

    /// `eta(4 tau)^6`, weight 3 CM form by `Q(i)`.
    pub fn cm_gaussian() -> EtaQuotient {
        EtaQuotient { factors: vec![(4, 6)] }
    }

    /// `eta(tau)^2 eta(2 tau) eta(4 tau) eta(8 tau)^2`, weight 3 CM form by
    /// `Q(sqrt -2)`.
    pub fn cm_minus_two() -> EtaQuotient {
        EtaQuotient { factors: vec![(1, 2), (2, 1), (4, 1), (8, 2)] }
    }
}

impl FromStr for EtaQuotient {
    type Err = Error;

    /// `"2^4 4^4"`, `"1^2 2 4 8^2"`, `"1^-3 3^9"`.
    fn from_str(s: &str) -> Result<EtaQuotient> {
        let bad = |tok: &str| Error::InvalidInput(format!("bad eta factor {tok:?}, expected DELTA^EXP"));
        let factors = s
            .split_whitespace()
            .map(|tok| {
                let (d, e) = tok.split_once('^').unwrap_or((tok, "1"));
                let d: u32 = d.parse().map_err(|_| bad(tok))?;
                let e: i32 = e.parse().map_err(|_| bad(tok))?;
                Ok((d, e))
            })
            .collect::<Result<Vec<_>>>()?;
        EtaQuotient::new(factors)
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|(d, e)| format!("{d}^{e}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// `a_1, ..., a_N` of a cusp form expansion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QExpansion {
    pub coefficients: Vec<i128>,
}

impl QExpansion {
    /// `a_n` for `1 <= n <= N`.
    pub fn coefficient(&self, n: usize) -> Option<i128> {
        n.checked_sub(1).and_then(|i| self.coefficients.get(i).copied())
    }
}

fn overflow() -> Error {
    Error::InvalidInput("eta expansion coefficient exceeds i128".into())
}

/// Nonzero terms `(exponent, sign)` of `prod_n (1 - q^(delta n))` below `len`,
/// from the pentagonal number theorem.
fn pentagonal(delta: usize, len: usize) -> Vec<(usize, i128)> {
    let mut out = Vec::new();
    for k in 1usize.. {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let a = delta * k * (3 * k - 1) / 2;
        let b = delta * k * (3 * k + 1) / 2;
        if a >= len {
            break;
        }
        out.push((a, sign));
        if b < len {
            out.push((b, sign));
        }
    }
    out
}

/// `acc *= (1 + sum sparse)` or `acc /= (1 + sum sparse)` in place, truncated.
fn apply_sparse(acc: &mut [i128], sparse: &[(usize, i128)], divide: bool) -> Result<()> {
    if divide {
        for k in 0..acc.len() {
            let mut v = acc[k];
            for &(j, s) in sparse.iter().take_while(|(j, _)| *j <= k) {
                v = v.checked_sub(s.checked_mul(acc[k - j]).ok_or_else(overflow)?).ok_or_else(overflow)?;
            }
            acc[k] = v;
        }
    } else {
        for k in (0..acc.len()).rev() {
            let mut v = acc[k];
            for &(j, s) in sparse.iter().take_while(|(j, _)| *j <= k) {
                v = v.checked_add(s.checked_mul(acc[k - j]).ok_or_else(overflow)?).ok_or_else(overflow)?;
            }
            acc[k] = v;
        }
    }
    Ok(())
}

/// First `n` coefficients `a_1..a_n` of the quotient, exactly.
pub fn eta_expand(quot: &EtaQuotient, n: usize) -> Result<QExpansion> {
    if n > 1_000_000 {
        return Err(Error::TooLarge { q: n as u64, bound: 1_000_000 });
    }
    let lead = quot
        .leading_power()
        .ok_or_else(|| Error::InvalidInput(format!("{quot}: sum of delta * e is not divisible by 24")))?;
    if lead < 1 {
        return Err(Error::InvalidInput(format!("{quot}: leading power {lead} is not positive")));
    }
    let lead = lead as usize;
    // coefficient of q^(lead + i) for i < len
    let len = (n + 1).saturating_sub(lead);
    let mut acc = vec![0i128; len];
    if len > 0 {
        acc[0] = 1;
    }
    for &(delta, e) in &quot.factors {
        // constant term 1 is implicit in apply_sparse
        let sparse = pentagonal(delta as usize, len);
        for _ in 0..e.unsigned_abs() {
            apply_sparse(&mut acc, &sparse, e < 0)?;
        }
    }
    let mut coefficients = vec![0i128; n];
    for (i, v) in acc.into_iter().enumerate() {
        coefficients[lead + i - 1] = v;
    }
    Ok(QExpansion { coefficients })
}

/// The two weight-3 CM forms with closed-form coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CmForm {
    /// `eta(4 tau)^6`: `2(a^2 - b^2)` for `p = a^2 + b^2`, `a` odd.
    D3Plus,
    /// `eta(tau)^2 eta(2 tau) eta(4 tau) eta(8 tau)^2`: `2(a^2 - 2 b^2)` for
    /// `p = a^2 + 2 b^2`.
    D3Minus,
}

impl CmForm {
    pub fn eta_quotient(self) -> EtaQuotient {
        match self {
            CmForm::D3Plus => EtaQuotient::cm_gaussian(),
            CmForm::D3Minus => EtaQuotient::cm_minus_two(),
        }
    }
}

/// All `(a, b)` with `a, b >= 0` and `a^2 + k b^2 = p`.
pub fn representations(p: u64, k: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut a = 0u64;
    while a * a <= p {
        let r = p - a * a;
        if r.is_multiple_of(k) {
            let b2 = r / k;
            let b = b2.isqrt();
            if b * b == b2 {
                out.push((a, b));
            }
        }
        a += 1;
    }
    out
}

/// `p`-th coefficient from the closed form; 0 when `p` has no representation.
pub fn cm_coefficient(form: CmForm, p: u64) -> Result<i64> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    let value = match form {
        CmForm::D3Plus => representations(p, 1)
            .into_iter()
            .find(|(a, _)| a % 2 == 1)
            .map(|(a, b)| 2 * (a as i64 * a as i64 - b as i64 * b as i64)),
        CmForm::D3Minus => {
            representations(p, 2).into_iter().next().map(|(a, b)| 2 * (a as i64 * a as i64 - 2 * b as i64 * b as i64))
        }
    };
    Ok(value.unwrap_or(0))
}

/// The two forms known only through their printed leading coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrintedForm {
    /// Weight 3, level 256, character `(-4|.)`; coefficients in `Z[sqrt -2]`.
    G256,
    /// Weight 3, level 32, character `(-4|.)`; coefficients in `Z[i]`.
    S3Level32,
}

/// `rational + surd * sqrt(radicand)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrintedValue {
    pub rational: i64,
    pub surd: i64,
    pub radicand: i64,
}

impl PrintedValue {
    /// The square, when it is an integer.
    pub fn square(&self) -> Option<i64> {
        (self.rational == 0 || self.surd == 0)
            .then(|| self.rational * self.rational + self.radicand * self.surd * self.surd)
    }
}

impl fmt::Display for PrintedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root = if self.radicand == -1 { "i".to_string() } else { format!("sqrt({})", self.radicand) };
        match (self.rational, self.surd) {
            (r, 0) => write!(f, "{r}"),
            (0, s) => write!(f, "{s}{root}"),
            (r, s) => write!(f, "{r}{s:+}{root}"),
        }
    }
}

// (n, rational part, coefficient of sqrt(-2))
const G256_TABLE: &[(u64, i64, i64)] = &[
    (1, 1, 0),
    (3, 0, -2),
    (5, 4, 0),
    (7, 0, 8),
    (9, 1, 0),
    (11, 0, 10),
    (13, 20, 0),
    (15, 0, -8),
    (17, -10, 0),
    (19, 0, -10),
    (21, 32, 0),
    (23, 0, -8),
    (25, 9, 0),
    (27, 0, -20),
    (29, 20, 0),
];

// (n, rational part, coefficient of i)
const S3_LEVEL32_TABLE: &[(u64, i64, i64)] = &[
    (1, 1, 0),
    (3, 0, 4),
    (5, 2, 0),
    (7, 0, -8),
    (9, -7, 0),
    (11, 0, -4),
    (13, -14, 0),
    (15, 0, 8),
    (17, 18, 0),
    (19, 0, -12),
    (21, 32, 0),
    (23, 0, 40),
];

/// A coefficient exactly as printed; `OutOfTable` for anything not listed.
pub fn printed_coefficient(form: PrintedForm, n: u64) -> Result<PrintedValue> {
    let (table, radicand) = match form {
        PrintedForm::G256 => (G256_TABLE, -2),
        PrintedForm::S3Level32 => (S3_LEVEL32_TABLE, -1),
    };
    table
        .iter()
        .find(|(m, _, _)| *m == n)
        .map(|&(_, rational, surd)| PrintedValue { rational, surd, radicand })
        .ok_or(Error::OutOfTable { p: n })
}

/// `d_p = (-8|p)(delta_p^2 - 2p^2)` from the weight-3 level-256 table.
pub fn d_p(p: u64) -> Result<i64> {
    let sq = printed_coefficient(PrintedForm::G256, p)?
        .square()
        .ok_or_else(|| Error::InvalidInput(format!("printed coefficient at {p} has no integral square")))?;
    Ok(legendre(-8, p) as i64 * (sq - 2 * (p * p) as i64))
}

/// `a_p = (-4|p)(phi_p^2 - 2p^2)` from the weight-3 level-32 table.
pub fn a_p_weight7(p: u64) -> Result<i64> {
    let sq = printed_coefficient(PrintedForm::S3Level32, p)?
        .square()
        .ok_or_else(|| Error::InvalidInput(format!("printed coefficient at {p} has no integral square")))?;
    Ok(legendre(-1, p) as i64 * (sq - 2 * (p * p) as i64))
}

/// `b_p` from `Z_p(1, T) = (1 - p a_p T + p^5 T^2)(1 - b_p T + p^5 T^2)`.
pub fn solve_bp_from_zeta(zf: &ZetaFactor, a_p: i128) -> Result<BigInt> {
    if zf.d != 6 || zf.t.rem_euclid(zf.p as i64) != 1 || zf.degree() != 4 {
        return Err(Error::InvalidInput(format!(
            "need the degree-4 factor for d = 6, t = 1; got d = {}, t = {}, degree {}",
            zf.d,
            zf.t,
            zf.degree()
        )));
    }
    let p = BigInt::from(zf.p);
    let p5 = p.pow(5);
    let known = FactorShape::quadratic(&p * BigInt::from(a_p), p5.clone());
    let unknown = FactorShape { coefficients: vec![Some(BigInt::one()), None, Some(p5)] };
    let rep = factor_check(&zf.coefficients, &[known, unknown])?;
    Ok(-rep.cofactor[1].clone())
}

/// Bound `2 p^(w/2)` on the trace of a weight-`w + 1` form, squared to stay
/// in integers: `b^2 <= 4 p^w`.
pub fn within_weil_bound(b: &BigInt, p: u64, w: u32) -> bool {
    b * b <= BigInt::from(4) * BigInt::from(p).pow(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp_sums::SumCache;
    use crate::padic::odd_primes_up_to;
    use crate::zeta::{compute_zeta, ZetaOptions};

    #[test]
    fn weight4_level8_leading_terms() {
        let e = eta_expand(&EtaQuotient::weight4_level8(), 7).unwrap();
        assert_eq!(e.coefficient(1), Some(1));
        assert_eq!(e.coefficient(2), Some(0));
        assert_eq!(e.coefficient(3), Some(-4));
        assert_eq!(e.coefficient(5), Some(-2));
        assert_eq!(e.coefficient(7), Some(24));
    }

    #[test]
    fn parse_and_display() {
        let q: EtaQuotient = "1^2 2 4 8^2".parse().unwrap();
        assert_eq!(q, EtaQuotient::cm_minus_two());
        assert_eq!(q.to_string(), "1^2 2^1 4^1 8^2");
        assert!("2^x".parse::<EtaQuotient>().is_err());
        assert!(eta_expand(&"1^1".parse().unwrap(), 5).is_err());
    }

    #[test]
    fn negative_exponents_invert() {
        // eta(tau)^-1 eta(tau)^25 = eta(tau)^24
        let a = eta_expand(&"1^24".parse().unwrap(), 30).unwrap();
        let b = eta_expand(&"1^-1 1^25".parse().unwrap(), 30).unwrap();
        assert_eq!(a, b);
        // Ramanujan tau
        assert_eq!(a.coefficient(2), Some(-24));
        assert_eq!(a.coefficient(3), Some(252));
        assert_eq!(a.coefficient(11), Some(534612));
    }

    #[test]
    fn cm_examples() {
        assert_eq!(cm_coefficient(CmForm::D3Plus, 5).unwrap(), -6);
        assert_eq!(cm_coefficient(CmForm::D3Plus, 7).unwrap(), 0);
        assert_eq!(cm_coefficient(CmForm::D3Minus, 3).unwrap(), -2);
        assert_eq!(cm_coefficient(CmForm::D3Minus, 5).unwrap(), 0);
        assert!(cm_coefficient(CmForm::D3Plus, 9).is_err());
    }

    #[test]
    fn cm_closed_forms_match_eta_expansions() {
        for form in [CmForm::D3Plus, CmForm::D3Minus] {
            let e = eta_expand(&form.eta_quotient(), 500).unwrap();
            for p in odd_primes_up_to(500) {
                let want = e.coefficient(p as usize).unwrap();
                assert_eq!(cm_coefficient(form, p).unwrap() as i128, want, "{form:?} p={p}");
            }
        }
    }

    #[test]
    fn cm_value_independent_of_representation() {
        for p in odd_primes_up_to(500) {
            for (k, odd_only) in [(1u64, true), (2, false)] {
                let vals: Vec<i64> = representations(p, k)
                    .into_iter()
                    .filter(|(a, _)| !odd_only || a % 2 == 1)
                    .map(|(a, b)| 2 * (a * a) as i64 - 2 * (k * b * b) as i64)
                    .collect();
                assert!(vals.windows(2).all(|w| w[0] == w[1]), "p={p} k={k} {vals:?}");
            }
        }
    }

    #[test]
    fn printed_tables() {
        let d3 = printed_coefficient(PrintedForm::G256, 3).unwrap();
        assert_eq!(d3.square(), Some(-8));
        assert_eq!(printed_coefficient(PrintedForm::G256, 5).unwrap().square(), Some(16));
        let f3 = printed_coefficient(PrintedForm::S3Level32, 3).unwrap();
        assert_eq!(f3.square(), Some(-16));
        assert_eq!(f3.to_string(), "4i");
        assert_eq!(printed_coefficient(PrintedForm::G256, 31), Err(Error::OutOfTable { p: 31 }));
        assert_eq!(printed_coefficient(PrintedForm::S3Level32, 29), Err(Error::OutOfTable { p: 29 }));
        assert_eq!(d_p(5).unwrap(), 34);
        assert_eq!(d_p(3).unwrap(), -26);
        assert_eq!(a_p_weight7(3).unwrap(), 34);
    }

    #[test]
    fn bp_from_zeta_at_three() {
        let cache = SumCache::default();
        let z = compute_zeta(&cache, 3, 6, 1, ZetaOptions::default()).unwrap();
        let a3 = eta_expand(&EtaQuotient::weight4_level8(), 3).unwrap().coefficient(3).unwrap();
        let b = solve_bp_from_zeta(&z, a3).unwrap();
        assert_eq!(b, BigInt::from(20));
        assert!(within_weil_bound(&b, 3, 5));
        assert!(matches!(solve_bp_from_zeta(&z, a3 + 1), Err(Error::FactorMismatch(_))));
    }
}
