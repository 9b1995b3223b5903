//! Gauss sums over `F_q`, the finite hypergeometric sum `H_q(t)` for `d`
//! copies of `1/2` over `d` copies of `1`, and exact point counts on
//! `prod (x_i + 2 + 1/x_i) = 4^d / t`.
//!
//! `H_q(t)` is computed two ways. The Gauss-sum route evaluates the character
//! sum in floating point and rounds. The count route solves
//! `N = ((q-2)^d - (-1)^d)/(q-1) - (-1)^d H` from an exact count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldTable, DEFAULT_MAX_Q};
use crate::numeric::fft::{backward_dd, backward_f64};
use crate::numeric::ntt::{cyclic_power_entries, CyclicPower};
use crate::numeric::{Real, DD};

/// Largest rounding distance accepted for a Gauss-sum evaluation of `H_q(t)`.
pub const RESIDUAL_LIMIT: f64 = 0.01;

/// Field orders up to this use 53-bit arithmetic by default.
pub const F64_MAX_Q: u64 = 2000;

#[derive(Clone, Debug)]
enum Values {
    F64 { gauss: Vec<Complex<f64>>, roots: Vec<Complex<f64>> },
    DD { gauss: Vec<Complex<DD>>, roots: Vec<Complex<DD>> },
}

/// `g(omega^m) = sum_{x != 0} omega(x)^m zeta_p^{a tr(x)}` for `m = 0..q-2`.
#[derive(Clone, Debug)]
pub struct GaussTable {
    field: Arc<FieldTable>,
    precision_bits: u32,
    zeta_power: u64,
    values: Values,
}

fn transform_inputs<T: Real>(field: &FieldTable, a: u64) -> Vec<Complex<T>> {
    let p = field.p();
    let zeta: Vec<Complex<T>> = (0..p).map(|j| T::root_of_unity(j as i64, p)).collect();
    field.power_table().iter().map(|&x| zeta[((a * field.trace(x as u64)) % p) as usize]).collect()
}

fn unit_roots<T: Real>(n: u64) -> Vec<Complex<T>> {
    (0..n).map(|j| T::root_of_unity(j as i64, n)).collect()
}

fn norm_deviation<T: Real>(gauss: &[Complex<T>], q: u64) -> f64 {
    gauss.iter().skip(1).map(|g| ((g.re * g.re + g.im * g.im).to_f64() - q as f64).abs()).fold(0.0, f64::max)
}

impl GaussTable {
    pub fn new(field: Arc<FieldTable>, precision_bits: u32) -> Result<GaussTable> {
        GaussTable::with_zeta_power(field, precision_bits, 1)
    }

    /// As [`GaussTable::new`] with `zeta_p` replaced by `zeta_p^a`.
    pub fn with_zeta_power(field: Arc<FieldTable>, precision_bits: u32, a: u64) -> Result<GaussTable> {
        if a.is_multiple_of(field.p()) {
            return Err(Error::InvalidInput(format!("zeta power {a} is divisible by {}", field.p())));
        }
        let q = field.q();
        let n = field.order();
        let (values, deviation, tolerance) = match precision_bits {
            53 => {
                let mut gauss = backward_f64(&transform_inputs::<f64>(&field, a));
                gauss[0] = Complex::new(-1.0, 0.0);
                let dev = norm_deviation(&gauss, q);
                (Values::F64 { gauss, roots: unit_roots(n) }, dev, 1e-6 * q as f64)
            }
            106 => {
                let mut gauss = backward_dd(&transform_inputs::<DD>(&field, a));
                gauss[0] = Complex::new(-DD::ONE, DD::ZERO);
                let dev = norm_deviation(&gauss, q);
                (Values::DD { gauss, roots: unit_roots(n) }, dev, 1e-6 * q as f64)
            }
            _ => return Err(Error::InvalidInput(format!("precision must be 53 or 106 bits, got {precision_bits}"))),
        };
        if deviation > tolerance {
            return Err(Error::PrecisionExceeded { deviation });
        }
        let zeta_power = a % field.p();
        Ok(GaussTable { field, precision_bits, zeta_power, values })
    }

    /// 53 bits for `q <= 2000`, 106 above.
    pub fn default_precision(q: u64) -> u32 {
        if q <= F64_MAX_Q {
            53
        } else {
            106
        }
    }

    pub fn field(&self) -> &Arc<FieldTable> {
        &self.field
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn zeta_power(&self) -> u64 {
        self.zeta_power
    }

    /// `g(omega^m)` rounded to `f64`.
    pub fn value(&self, m: i64) -> Complex<f64> {
        let n = self.field.order() as i64;
        let i = m.rem_euclid(n) as usize;
        match &self.values {
            Values::F64 { gauss, .. } => gauss[i],
            Values::DD { gauss, .. } => Complex::new(gauss[i].re.to_f64(), gauss[i].im.to_f64()),
        }
    }

    /// Largest `| |g(omega^m)|^2 - q |` over `m != 0`.
    pub fn norm_deviation(&self) -> f64 {
        match &self.values {
            Values::F64 { gauss, .. } => norm_deviation(gauss, self.field.q()),
            Values::DD { gauss, .. } => norm_deviation(gauss, self.field.q()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gauss,
    Count,
}

/// `H_q(t)` with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HValue {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    pub d: u32,
    /// Field element index of `t`.
    pub t: u64,
    #[serde(rename = "H")]
    pub value: i128,
    pub method: Method,
    /// Distance from the evaluated sum to the reported integer (Gauss route).
    pub residual: Option<f64>,
    pub precision_bits: Option<u32>,
}

/// `A_m = (g(phi omega^m) g(omega^-m))^d` for all `m`.
fn gauss_terms<T: Real>(gauss: &[Complex<T>], d: u32) -> Vec<Complex<T>> {
    let n = gauss.len();
    let half = n / 2;
    (0..n)
        .map(|m| {
            let base = gauss[(m + half) % n] * gauss[(n - m) % n];
            let mut acc = Complex::new(T::one(), T::zero());
            for _ in 0..d {
                acc = acc * base;
            }
            acc
        })
        .collect()
}

/// Scalar `(-1)^d / ((1-q) g(phi)^d)`.
fn gauss_prefactor<T: Real>(gauss: &[Complex<T>], d: u32, q: u64) -> Complex<T> {
    let g_phi = gauss[gauss.len() / 2];
    let mut denom = Complex::new(T::one(), T::zero());
    for _ in 0..d {
        denom = denom * g_phi;
    }
    let sign = if d.is_multiple_of(2) { T::one() } else { -T::one() };
    let one_minus_q = T::from_f64(1.0) - T::from_f64(q as f64);
    Complex::new(sign, T::zero()) / (denom * Complex::new(one_minus_q, T::zero()))
}

fn round_complex<T: Real>(z: Complex<T>) -> Result<(i128, f64)> {
    let (n, r) = z.re.round_with_residual().ok_or(Error::IntegralityFailure { residual: f64::INFINITY })?;
    let residual = r.max(z.im.to_f64().abs());
    if residual >= RESIDUAL_LIMIT {
        return Err(Error::IntegralityFailure { residual });
    }
    Ok((n, residual))
}

fn h_single<T: Real>(
    field: &FieldTable,
    gauss: &[Complex<T>],
    roots: &[Complex<T>],
    d: u32,
    t: u64,
) -> Result<(i128, f64)> {
    let n = field.order();
    let x = if d.is_multiple_of(2) { t } else { field.neg(t) };
    let e = field.dlog(x)?;
    let terms = gauss_terms(gauss, d);
    let mut sum = Complex::new(T::zero(), T::zero());
    for (m, a) in terms.iter().enumerate() {
        sum = sum + *a * roots[((e as u128 * m as u128) % n as u128) as usize];
    }
    round_complex(sum * gauss_prefactor(gauss, d, field.q()))
}

fn check_t(field: &FieldTable, t: u64) -> Result<()> {
    if t == 0 {
        return Err(Error::ZeroArgument);
    }
    if t >= field.q() {
        return Err(Error::InvalidInput(format!("{t} is not an element of F_{}", field.q())));
    }
    Ok(())
}

/// `H_q(t)` from Gauss sums at the table's precision.
pub fn h_value_gauss(table: &GaussTable, d: u32, t: u64) -> Result<HValue> {
    let field = &table.field;
    check_t(field, t)?;
    let (value, residual) = match &table.values {
        Values::F64 { gauss, roots } => h_single(field, gauss, roots, d, t)?,
        Values::DD { gauss, roots } => h_single(field, gauss, roots, d, t)?,
    };
    Ok(HValue {
        p: field.p(),
        k: field.k(),
        q: field.q(),
        d,
        t,
        value,
        method: Method::Gauss,
        residual: Some(residual),
        precision_bits: Some(table.precision_bits),
    })
}

fn h_all<T: Real>(
    gauss: &[Complex<T>],
    d: u32,
    q: u64,
    transform: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
) -> Result<Vec<(i128, f64)>> {
    // sum_m A_m exp(2 pi i e m / n) for every e at once
    let sums = transform(&gauss_terms(gauss, d));
    let pre = gauss_prefactor(gauss, d, q);
    sums.into_iter().map(|s| round_complex(s * pre)).collect()
}

/// `H_q(t)` for every `t != 0`, indexed by field element (entry 0 unused).
pub fn h_values_gauss_all(table: &GaussTable, d: u32) -> Result<Vec<Option<HValue>>> {
    let field = &table.field;
    let by_dlog = match &table.values {
        Values::F64 { gauss, .. } => h_all(gauss, d, field.q(), backward_f64)?,
        Values::DD { gauss, .. } => h_all(gauss, d, field.q(), backward_dd)?,
    };
    let mut out = vec![None; field.q() as usize];
    for t in 1..field.q() {
        let x = if d.is_multiple_of(2) { t } else { field.neg(t) };
        let (value, residual) = by_dlog[field.dlog(x)? as usize];
        out[t as usize] = Some(HValue {
            p: field.p(),
            k: field.k(),
            q: field.q(),
            d,
            t,
            value,
            method: Method::Gauss,
            residual: Some(residual),
            precision_bits: Some(table.precision_bits),
        });
    }
    Ok(out)
}

/// Gauss route at the default precision for `q`, retried at 106 bits when
/// 53-bit rounding is not conclusive.
pub fn h_value_gauss_auto(field: Arc<FieldTable>, d: u32, t: u64) -> Result<HValue> {
    let bits = GaussTable::default_precision(field.q());
    let first = GaussTable::new(field.clone(), bits).and_then(|tbl| h_value_gauss(&tbl, d, t));
    match first {
        Err(Error::IntegralityFailure { .. }) | Err(Error::PrecisionExceeded { .. }) if bits == 53 => {
            h_value_gauss(&GaussTable::new(field, 106)?, d, t)
        }
        other => other,
    }
}

/// Exact counts of `(x_1..x_d)` in `(F_q^x)^d` with `prod f(x_i) = c` for every
/// `c != 0`, where `f(x) = x + 2 + 1/x = (x+1)^2/x`.
pub struct PointCountTable {
    field: Arc<FieldTable>,
    d: u32,
    counts: CyclicPower,
}

/// Multiplicities of `dlog f(x)` over `x` in `F_q^x` with `f(x) != 0`.
fn value_histogram(field: &FieldTable) -> Result<Vec<u64>> {
    let mut histogram = vec![0u64; field.order() as usize];
    for x in 1..field.q() {
        let y = field.add(x, 1);
        if y == 0 {
            // f(-1) = 0 never contributes to a nonzero product
            continue;
        }
        let v = field.mul(field.mul(y, y), field.inv(x)?);
        histogram[field.dlog(v)? as usize] += 1;
    }
    Ok(histogram)
}

fn count_bound_bits(q: u64, d: u32) -> u32 {
    (d as f64 * (q as f64).log2()).ceil() as u32 + 1
}

/// `4^d / t`.
fn count_target(field: &FieldTable, d: u32, t: u64) -> Result<u64> {
    let four_d = field.pow(field.embed(4), d as u64);
    Ok(field.mul(four_d, field.inv(t)?))
}

impl PointCountTable {
    pub fn compute(field: Arc<FieldTable>, d: u32) -> Result<PointCountTable> {
        if d == 0 {
            return Err(Error::InvalidInput("d must be positive".into()));
        }
        let histogram = value_histogram(&field)?;
        let counts = CyclicPower::compute(&histogram, d, count_bound_bits(field.q(), d));
        Ok(PointCountTable { field, d, counts })
    }

    pub fn field(&self) -> &Arc<FieldTable> {
        &self.field
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Number of points with `prod f(x_i) = c`.
    pub fn count_product(&self, c: u64) -> Result<BigUint> {
        Ok(self.counts.entry(self.field.dlog(c)? as usize))
    }

    /// Number of points on `prod (x_i + 2 + 1/x_i) = 4^d / t`.
    pub fn count(&self, t: u64) -> Result<BigUint> {
        check_t(&self.field, t)?;
        self.count_product(count_target(&self.field, self.d, t)?)
    }

    pub fn h_value(&self, t: u64) -> Result<HValue> {
        let count = self.count(t)?;
        let value = h_from_count(self.field.q(), self.d, &count)?;
        Ok(HValue {
            p: self.field.p(),
            k: self.field.k(),
            q: self.field.q(),
            d: self.d,
            t,
            value,
            method: Method::Count,
            residual: None,
            precision_bits: None,
        })
    }
}

/// `((q-2)^d - (-1)^d) / (q-1)`.
pub fn count_main_term(q: u64, d: u32) -> BigInt {
    let sign = if d.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    let num = BigInt::from(q - 2).pow(d) - sign;
    num / BigInt::from(q - 1)
}

/// Solve `N = ((q-2)^d - (-1)^d)/(q-1) - (-1)^d H` for `H`.
pub fn h_from_count(q: u64, d: u32, count: &BigUint) -> Result<i128> {
    let sign = if d.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    let sign_num = BigInt::from(q - 2).pow(d) - &sign;
    if !(&sign_num % BigInt::from(q - 1)).is_zero() {
        return Err(Error::NonIntegral);
    }
    let h = sign * (count_main_term(q, d) - BigInt::from(count.clone()));
    h.to_i128().ok_or(Error::NonIntegral)
}

/// Point counts for a few values of `t`, without tabulating every target.
pub fn point_counts_at(field: &FieldTable, d: u32, ts: &[u64]) -> Result<Vec<BigUint>> {
    if d == 0 {
        return Err(Error::InvalidInput("d must be positive".into()));
    }
    let mut targets = Vec::with_capacity(ts.len());
    for &t in ts {
        check_t(field, t)?;
        targets.push(field.dlog(count_target(field, d, t)?)? as usize);
    }
    let histogram = value_histogram(field)?;
    Ok(cyclic_power_entries(&histogram, d, count_bound_bits(field.q(), d), &targets))
}

pub fn point_count(field: Arc<FieldTable>, d: u32, t: u64) -> Result<BigUint> {
    Ok(point_counts_at(&field, d, &[t])?.remove(0))
}

/// `H_q(t)` by the count route for each `t` in `ts`.
pub fn h_values_count_at(field: &FieldTable, d: u32, ts: &[u64]) -> Result<Vec<HValue>> {
    let counts = point_counts_at(field, d, ts)?;
    ts.iter()
        .zip(counts)
        .map(|(&t, count)| {
            Ok(HValue {
                p: field.p(),
                k: field.k(),
                q: field.q(),
                d,
                t,
                value: h_from_count(field.q(), d, &count)?,
                method: Method::Count,
                residual: None,
                precision_bits: None,
            })
        })
        .collect()
}

pub fn h_value_count(field: Arc<FieldTable>, d: u32, t: u64) -> Result<HValue> {
    Ok(h_values_count_at(&field, d, &[t])?.remove(0))
}

/// Largest deviation in `g(omega^2m) = omega(4)^m g(omega^m) g(phi omega^m) / g(phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HasseDavenportWitness {
    pub max_error: f64,
    pub tolerance: f64,
    pub holds: bool,
}

pub fn hasse_davenport_check(table: &GaussTable, tolerance: f64) -> Result<HasseDavenportWitness> {
    let field = &table.field;
    let n = field.order() as i64;
    let half = n / 2;
    let e4 = field.dlog(field.embed(4))? as i64;
    let g_phi = table.value(half);
    let mut max_error = 0.0f64;
    for m in 0..n {
        let lhs = table.value(2 * m);
        let w4 = f64::root_of_unity((e4 * m) % n, n as u64);
        let rhs = w4 * table.value(m) * table.value(m + half) / g_phi;
        max_error = max_error.max((lhs - rhs).norm());
    }
    Ok(HasseDavenportWitness { max_error, tolerance, holds: max_error <= tolerance })
}

/// Shared field, Gauss and point-count tables for sweeps; safe to use from
/// many threads.
pub struct SumCache {
    max_q: u64,
    fields: Mutex<HashMap<(u64, u32), Arc<FieldTable>>>,
    gauss: Mutex<HashMap<(u64, u32, u32), Arc<GaussTable>>>,
    counts: Mutex<HashMap<(u64, u32, u32), Arc<PointCountTable>>>,
}

impl Default for SumCache {
    fn default() -> Self {
        SumCache::new(DEFAULT_MAX_Q)
    }
}

impl SumCache {
    pub fn new(max_q: u64) -> SumCache {
        SumCache {
            max_q,
            fields: Mutex::new(HashMap::new()),
            gauss: Mutex::new(HashMap::new()),
            counts: Mutex::new(HashMap::new()),
        }
    }

    pub fn max_q(&self) -> u64 {
        self.max_q
    }

    pub fn field(&self, p: u64, k: u32) -> Result<Arc<FieldTable>> {
        if let Some(f) = self.fields.lock().unwrap().get(&(p, k)) {
            return Ok(f.clone());
        }
        // build outside the lock; a concurrent duplicate build is harmless
        let f = Arc::new(FieldTable::build_with_bound(p, k, self.max_q)?);
        Ok(self.fields.lock().unwrap().entry((p, k)).or_insert(f).clone())
    }

    pub fn gauss(&self, p: u64, k: u32, bits: u32) -> Result<Arc<GaussTable>> {
        if let Some(g) = self.gauss.lock().unwrap().get(&(p, k, bits)) {
            return Ok(g.clone());
        }
        let g = Arc::new(GaussTable::new(self.field(p, k)?, bits)?);
        Ok(self.gauss.lock().unwrap().entry((p, k, bits)).or_insert(g).clone())
    }

    pub fn point_counts(&self, p: u64, k: u32, d: u32) -> Result<Arc<PointCountTable>> {
        if let Some(c) = self.counts.lock().unwrap().get(&(p, k, d)) {
            return Ok(c.clone());
        }
        let c = Arc::new(PointCountTable::compute(self.field(p, k)?, d)?);
        Ok(self.counts.lock().unwrap().entry((p, k, d)).or_insert(c).clone())
    }

    /// Drop cached point-count tables (the largest entries).
    pub fn clear_counts(&self) {
        self.counts.lock().unwrap().clear();
    }
}
