//! Zeta factors `Z_p(t, T) = prod (1 - mu_i T)` assembled from `H_{p^s}(t)`,
//! their Newton polygons, unit roots and factorizations.
//!
//! Power sums are `sum_i mu_i^s = H_{p^s}(t)`, so
//! `Z = exp(-sum_s H_{p^s}(t) T^s / s)`. With this sign every reciprocal root
//! has absolute value `p^((d-1)/2)`.
//!
//! Degrees: `d` for `t != 1`, `d - 1` for `t = 1` and `d` odd. For `t = 1` and
//! `d` even the raw series carries a linear factor `1 - lambda T`,
//! `lambda = +-p^(d/2 - 1)`, which is stripped to leave degree `d - 2`.
//!
//! When the fields needed for all power sums are too large, the remaining
//! coefficients come from the functional equation
//! `c_{D-i} = sign * p^(w (D - 2i) / 2) c_i`, `w = d - 1`, with the sign read
//! off the computed coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hyp_sums::{h_value_gauss, h_values_count_at, GaussTable, SumCache};
use crate::padic::{is_prime, PAdicApprox, PrimePowerModulus, Residue};

/// Serialize big integers as JSON numbers when they fit in `i128`, as
/// decimal strings otherwise.
pub(crate) mod big_serde {
    use super::*;

    pub fn one<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v.to_i128() {
            Some(x) => s.serialize_i128(x),
            None => s.serialize_str(&v.to_string()),
        }
    }

    pub fn many<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&Wrapped(x))?;
        }
        seq.end()
    }

    struct Wrapped<'a>(&'a BigInt);

    impl Serialize for Wrapped<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            one(self.0, s)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// raw series = reported polynomial * (1 - lambda T)
    Multiplied,
    /// raw series = reported polynomial / (1 - lambda T)
    Divided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RemovedFactor {
    #[serde(serialize_with = "big_serde::one")]
    pub root: BigInt,
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZetaFactor {
    pub p: u64,
    pub d: u32,
    pub t: i64,
    pub weight: u32,
    /// `c_0 = 1, c_1, ..., c_D`.
    #[serde(serialize_with = "big_serde::many")]
    pub coefficients: Vec<BigInt>,
    pub removed_factor: Option<RemovedFactor>,
    /// `H_{p^s}(t)` for `s = 1, 2, ...` as used in the assembly.
    pub power_sums: Vec<i128>,
    /// Coefficients beyond the computed power sums were filled in from the
    /// functional equation.
    pub completed_by_symmetry: bool,
    /// Sign of the functional equation, when it holds.
    pub sign: Option<i32>,
}

impl ZetaFactor {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficient(&self, i: usize) -> &BigInt {
        &self.coefficients[i]
    }
}

impl fmt::Display for ZetaFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_poly(&self.coefficients))
    }
}

/// `1 - 4T + 27T^2` style rendering.
pub fn format_poly(c: &[BigInt]) -> String {
    let mut out = String::new();
    for (i, x) in c.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let mag = x.abs();
        if out.is_empty() {
            if x.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if x.is_negative() { " - " } else { " + " });
        }
        let show_mag = i == 0 || !mag.is_one();
        if show_mag {
            out.push_str(&mag.to_string());
        }
        match i {
            0 => {}
            1 => out.push('T'),
            _ => out.push_str(&format!("T^{i}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn big_pow(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

/// `(raw degree, reported degree)` for the given `d` and whether `t = 1`.
pub fn expected_degrees(d: u32, t_is_one: bool) -> (usize, usize) {
    let d = d as usize;
    match (t_is_one, d.is_multiple_of(2)) {
        (false, _) => (d, d),
        (true, false) => (d - 1, d - 1),
        (true, true) => (d - 1, d - 2),
    }
}

/// Coefficients of `exp(-sum_s h_s T^s / s)` through `T^{h.len()}`.
fn series_from_power_sums(h: &[i128]) -> Vec<BigRational> {
    let mut c = vec![BigRational::one()];
    for k in 1..=h.len() {
        let mut acc = BigRational::zero();
        for i in 1..=k {
            acc += BigRational::from_integer(BigInt::from(h[i - 1])) * &c[k - i];
        }
        c.push(-acc / BigRational::from_integer(BigInt::from(k)));
    }
    c
}

struct Completed {
    coefficients: Vec<BigInt>,
    completed: bool,
    sign: Option<i32>,
}

/// `c_{D-i} / (p^(w (D-2i)/2) c_i)` when it is `+-1`.
fn fe_ratio(c: &[BigInt], degree: usize, i: usize, weight: u32, p: u64) -> Option<i32> {
    let scale = big_pow(p, weight * (degree - 2 * i) as u32 / 2);
    let lhs = &c[degree - i];
    let rhs = &c[i] * &scale;
    if *lhs == rhs {
        Some(1)
    } else if *lhs == -rhs {
        Some(-1)
    } else {
        None
    }
}

/// Sign of the functional equation of a full polynomial, if it satisfies one.
pub fn functional_equation_sign(c: &[BigInt], weight: u32, p: u64) -> Option<i32> {
    let degree = c.len() - 1;
    if !(weight as usize * degree).is_multiple_of(2) {
        return None;
    }
    let mut sign = None;
    for i in 0..=degree / 2 {
        if c[i].is_zero() && c[degree - i].is_zero() {
            continue;
        }
        let r = fe_ratio(c, degree, i, weight, p)?;
        if sign.is_some_and(|s| s != r) {
            return None;
        }
        sign = Some(r);
    }
    sign
}

fn complete(series: &[BigRational], degree: usize, weight: u32, p: u64) -> Result<Completed> {
    let known = series.len() - 1;
    let mut ints = Vec::with_capacity(series.len());
    for (k, v) in series.iter().enumerate() {
        if !v.is_integer() {
            return Err(Error::NonIntegralCoefficient { index: k });
        }
        ints.push(v.to_integer());
    }
    for (k, v) in ints.iter().enumerate().skip(degree + 1) {
        if !v.is_zero() {
            return Err(Error::DegreeMismatch { degree, detail: format!("coefficient of T^{k} is {v}") });
        }
    }
    if known >= degree {
        ints.truncate(degree + 1);
        let sign = functional_equation_sign(&ints, weight, p);
        return Ok(Completed { coefficients: ints, completed: false, sign });
    }
    if !(weight as usize * degree).is_multiple_of(2) {
        return Err(Error::InsufficientData(format!(
            "{known} power sums for degree {degree} and odd weight times degree"
        )));
    }
    let mut sign: Option<i32> = None;
    for i in 0..=degree / 2 {
        let j = degree - i;
        if j > known {
            continue;
        }
        if ints[i].is_zero() && ints[j].is_zero() {
            continue;
        }
        let r = fe_ratio(&ints, degree, i, weight, p).ok_or_else(|| Error::DegreeMismatch {
            degree,
            detail: format!("coefficients {i} and {j} violate the functional equation"),
        })?;
        if sign.is_some_and(|s| s != r) {
            return Err(Error::DegreeMismatch { degree, detail: "functional equation sign is inconsistent".into() });
        }
        sign = Some(r);
    }
    let sign = sign.ok_or_else(|| {
        Error::InsufficientData(format!("{known} power sums do not fix the functional equation sign"))
    })?;
    if 2 * known + 1 < degree {
        return Err(Error::InsufficientData(format!("{known} power sums for degree {degree}")));
    }
    let mut c = ints;
    c.resize(degree + 1, BigInt::zero());
    for i in 0..degree - known {
        c[degree - i] = &c[i] * big_pow(p, weight * (degree - 2 * i) as u32 / 2) * sign;
    }
    Ok(Completed { coefficients: c, completed: true, sign: Some(sign) })
}

/// Build `Z_p(t, T)` from `h[s-1] = H_{p^s}(t)`.
pub fn assemble_zeta(p: u64, d: u32, t: i64, h: &[i128]) -> Result<ZetaFactor> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    if d < 2 {
        return Err(Error::InvalidInput(format!("d must be at least 2, got {d}")));
    }
    let t_mod = t.rem_euclid(p as i64);
    if t_mod == 0 {
        return Err(Error::ZeroArgument);
    }
    let t_is_one = t_mod == 1;
    let weight = d - 1;
    let (_, degree) = expected_degrees(d, t_is_one);
    let raw = series_from_power_sums(h);
    let build = |c: Completed, removed: Option<RemovedFactor>| ZetaFactor {
        p,
        d,
        t,
        weight,
        coefficients: c.coefficients,
        removed_factor: removed,
        power_sums: h.to_vec(),
        completed_by_symmetry: c.completed,
        sign: c.sign,
    };
    if !(t_is_one && d.is_multiple_of(2)) {
        return Ok(build(complete(&raw, degree, weight, p)?, None));
    }
    let lambda_abs = big_pow(p, d / 2 - 1);
    let mut found: Vec<(Completed, RemovedFactor)> = Vec::new();
    let mut first_err = None;
    for orientation in [Orientation::Multiplied, Orientation::Divided] {
        for sign in [1i32, -1] {
            let lambda = BigRational::from_integer(&lambda_abs * sign);
            let mut poly = Vec::with_capacity(raw.len());
            for k in 0..raw.len() {
                let v = match orientation {
                    // P = raw / (1 - lambda T)
                    Orientation::Multiplied => {
                        let prev = if k == 0 { BigRational::zero() } else { &lambda * &poly[k - 1] };
                        &raw[k] + prev
                    }
                    // P = raw * (1 - lambda T)
                    Orientation::Divided => {
                        let prev = if k == 0 { BigRational::zero() } else { &lambda * &raw[k - 1] };
                        &raw[k] - prev
                    }
                };
                poly.push(v);
            }
            match complete(&poly, degree, weight, p) {
                Ok(c) => found.push((c, RemovedFactor { root: &lambda_abs * sign, orientation })),
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
    }
    match found.len() {
        1 => {
            let (c, r) = found.pop().unwrap();
            Ok(build(c, Some(r)))
        }
        0 => Err(first_err.expect("four candidates tried")),
        n => {
            Err(Error::InsufficientData(format!("{n} choices of the removed linear factor fit {} power sums", h.len())))
        }
    }
}

/// Where `compute_zeta` takes `H_{p^s}(t)` from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HSource {
    /// Exact point counts.
    Count,
    /// Gauss sums, escalating precision as needed.
    Gauss,
}

#[derive(Clone, Copy, Debug)]
pub struct ZetaOptions {
    /// Largest field order `p^s` evaluated.
    pub max_q: u64,
    pub source: HSource,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        ZetaOptions { max_q: 400_000, source: HSource::Count }
    }
}

/// `H_{p^s}(t)` for `s = 1..=s_max`.
pub fn power_sums(cache: &SumCache, p: u64, d: u32, t: i64, s_max: u32, source: HSource) -> Result<Vec<i128>> {
    (1..=s_max)
        .map(|s| {
            let field = cache.field(p, s)?;
            let te = field.embed(t);
            match source {
                HSource::Count => Ok(h_values_count_at(&field, d, &[te])?[0].value),
                HSource::Gauss => {
                    let bits = GaussTable::default_precision(field.q());
                    match cache.gauss(p, s, bits).and_then(|g| h_value_gauss(&g, d, te)) {
                        Err(Error::IntegralityFailure { .. }) | Err(Error::PrecisionExceeded { .. }) if bits == 53 => {
                            Ok(h_value_gauss(&*cache.gauss(p, s, 106)?, d, te)?.value)
                        }
                        other => Ok(other?.value),
                    }
                }
            }
        })
        .collect()
}

/// Number of power sums `compute_zeta` evaluates: one past the raw degree,
/// limited by `max_q`.
pub fn power_sum_count(p: u64, d: u32, t: i64, max_q: u64) -> u32 {
    let t_is_one = t.rem_euclid(p as i64) == 1;
    let (raw, _) = expected_degrees(d, t_is_one);
    let mut s = 0u32;
    while (s as usize) < raw + 1 && p.checked_pow(s + 1).is_some_and(|q| q <= max_q) {
        s += 1;
    }
    s
}

pub fn compute_zeta(cache: &SumCache, p: u64, d: u32, t: i64, opts: ZetaOptions) -> Result<ZetaFactor> {
    let s_max = power_sum_count(p, d, t, opts.max_q.min(cache.max_q()));
    if s_max == 0 {
        return Err(Error::InsufficientData(format!("F_{p} exceeds the field bound")));
    }
    let h = power_sums(cache, p, d, t, s_max, opts.source)?;
    assemble_zeta(p, d, t, &h)
}

/// Slopes of the lower convex hull of `(i, v_p(c_i))`, with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub slopes: Vec<(BigRational, usize)>,
}

impl NewtonPolygon {
    /// Length of the slope-0 segment.
    pub fn unit_length(&self) -> usize {
        self.slopes.iter().filter(|(s, _)| s.is_zero()).map(|(_, m)| m).sum()
    }

    /// Slopes listed with repetition, e.g. `[0, 1, 4, 5]`.
    pub fn multiset(&self) -> Vec<BigRational> {
        self.slopes.iter().flat_map(|(s, m)| std::iter::repeat_n(s.clone(), *m)).collect()
    }
}

impl Serialize for NewtonPolygon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.slopes.len()))?;
        for (slope, mult) in &self.slopes {
            seq.serialize_element(&(slope.to_string(), mult))?;
        }
        seq.end()
    }
}

fn valuation(x: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    while !y.is_zero() && (&y % &p).is_zero() {
        y /= &p;
        v += 1;
    }
    v
}

pub fn newton_polygon_of(c: &[BigInt], p: u64) -> NewtonPolygon {
    let pts: Vec<(i64, i64)> =
        c.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i as i64, valuation(x, p) as i64)).collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless it lies strictly below segment a..pt
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut slopes: Vec<(BigRational, usize)> = Vec::new();
    for w in hull.windows(2) {
        let run = (w[1].0 - w[0].0) as usize;
        let slope = BigRational::new(BigInt::from(w[1].1 - w[0].1), BigInt::from(run as i64));
        match slopes.last_mut() {
            Some((s, m)) if *s == slope => *m += run,
            _ => slopes.push((slope, run)),
        }
    }
    NewtonPolygon { slopes }
}

pub fn newton_polygon(zf: &ZetaFactor) -> NewtonPolygon {
    newton_polygon_of(&zf.coefficients, zf.p)
}

/// `R(x) = sum c_i x^(D-i)` and its derivative at `x`.
fn reversed_eval(c: &[BigInt], x: &Residue) -> (Residue, Residue) {
    let m = x.modulus().clone();
    let degree = c.len() - 1;
    let mut value = Residue::zero(&m);
    let mut deriv = Residue::zero(&m);
    for (i, ci) in c.iter().enumerate() {
        let e = (degree - i) as u64;
        let ci = Residue::from_bigint(ci, &m);
        value = &value + &(&ci * &x.pow(e));
        if e > 0 {
            deriv = &deriv + &(&(&ci * &Residue::from_u64(e, &m)) * &x.pow(e - 1));
        }
    }
    (value, deriv)
}

/// The unit reciprocal root of `c` modulo `p^n`, by Hensel lifting.
pub fn unit_root_of_poly(c: &[BigInt], p: u64, n: u32) -> Result<PAdicApprox> {
    let len = newton_polygon_of(c, p).unit_length();
    match len {
        0 => return Err(Error::NoUnitRoot),
        1 => {}
        k => return Err(Error::MultipleUnitRoots(k)),
    }
    let m1 = PrimePowerModulus::new(p, 1)?;
    let roots: Vec<u64> = (1..p)
        .filter(|&x| {
            let (v, dv) = reversed_eval(c, &Residue::from_u64(x, &m1));
            v.is_zero() && !dv.is_zero()
        })
        .collect();
    if roots.len() != 1 {
        return Err(Error::ConsistencyFailure(format!(
            "{} simple nonzero roots mod {p} for a slope-0 segment of length 1",
            roots.len()
        )));
    }
    let m = PrimePowerModulus::new(p, n)?;
    let mut x = Residue::from_u64(roots[0], &m);
    for _ in 0..n {
        let (v, dv) = reversed_eval(c, &x);
        if v.is_zero() {
            break;
        }
        x = &x - &v.div(&dv)?;
    }
    if !reversed_eval(c, &x).0.is_zero() {
        return Err(Error::ConsistencyFailure("Hensel lift did not converge".into()));
    }
    Ok(PAdicApprox::new(x))
}

pub fn unit_root_of_zeta(zf: &ZetaFactor, n: u32) -> Result<PAdicApprox> {
    unit_root_of_poly(&zf.coefficients, zf.p, n)
}

/// Exact division `a = b q + r` for `b` with constant term 1, coefficients
/// lowest degree first.
pub fn poly_divrem(a: &[BigInt], b: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    assert!(b.first().is_some_and(|b0| b0.is_one()), "divisor must have constant term 1");
    let db = b.len() - 1;
    if a.len() <= db {
        return (vec![], a.to_vec());
    }
    let dq = a.len() - 1 - db;
    let mut q: Vec<BigInt> = Vec::with_capacity(dq + 1);
    for k in 0..=dq {
        let mut v = a[k].clone();
        for j in 1..=db.min(k) {
            v -= &b[j] * &q[k - j];
        }
        q.push(v);
    }
    let prod = poly_mul(b, &q);
    let mut r: Vec<BigInt> =
        a.iter().zip(prod.iter().chain(std::iter::repeat(&BigInt::zero()))).map(|(x, y)| x - y).collect();
    while r.last().is_some_and(|x| x.is_zero()) {
        r.pop();
    }
    (q, r)
}

pub fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// An expected factor; `None` marks an unknown coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorShape {
    pub coefficients: Vec<Option<BigInt>>,
}

impl FactorShape {
    pub fn known(c: Vec<BigInt>) -> FactorShape {
        FactorShape { coefficients: c.into_iter().map(Some).collect() }
    }

    pub fn unknown(degree: usize) -> FactorShape {
        let mut c = vec![None; degree + 1];
        c[0] = Some(BigInt::one());
        FactorShape { coefficients: c }
    }

    /// `1 - a T + b T^2`.
    pub fn quadratic(a: BigInt, b: BigInt) -> FactorShape {
        FactorShape::known(vec![BigInt::one(), -a, b])
    }

    /// `1 - a T`.
    pub fn linear(a: BigInt) -> FactorShape {
        FactorShape::known(vec![BigInt::one(), -a])
    }

    pub fn is_known(&self) -> bool {
        self.coefficients.iter().all(Option::is_some)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorReport {
    /// What remains after dividing out every fully known factor; equals the
    /// solved partial factor when one was given.
    #[serde(serialize_with = "big_serde::many")]
    pub cofactor: Vec<BigInt>,
}

/// Divide out each fully known factor exactly and solve for the single
/// partially known one.
pub fn factor_check(c: &[BigInt], expected: &[FactorShape]) -> Result<FactorReport> {
    let mut rest = c.to_vec();
    for shape in expected.iter().filter(|s| s.is_known()) {
        let b: Vec<BigInt> = shape.coefficients.iter().map(|x| x.clone().unwrap()).collect();
        let (q, r) = poly_divrem(&rest, &b);
        if !r.is_empty() {
            return Err(Error::FactorMismatch(format!("{} leaves remainder {}", format_poly(&b), format_poly(&r))));
        }
        rest = q;
    }
    let partial: Vec<&FactorShape> = expected.iter().filter(|s| !s.is_known()).collect();
    match partial.as_slice() {
        [] => {}
        [shape] => {
            if shape.coefficients.len() != rest.len() {
                return Err(Error::FactorMismatch(format!(
                    "cofactor {} has degree {}, expected {}",
                    format_poly(&rest),
                    rest.len().saturating_sub(1),
                    shape.coefficients.len() - 1
                )));
            }
            for (i, (want, got)) in shape.coefficients.iter().zip(&rest).enumerate() {
                if let Some(w) = want {
                    if w != got {
                        return Err(Error::FactorMismatch(format!(
                            "cofactor {} has T^{i} coefficient {got}, expected {w}",
                            format_poly(&rest)
                        )));
                    }
                }
            }
        }
        _ => return Err(Error::InvalidInput("at most one partially known factor is supported".into())),
    }
    Ok(FactorReport { cofactor: rest })
}

/// `|mu_i| / p^(w/2)` for every reciprocal root, from a numerical root finder.
pub fn reciprocal_root_moduli(zf: &ZetaFactor) -> Vec<f64> {
    let degree = zf.degree();
    if degree == 0 {
        return Vec::new();
    }
    let scale = (zf.p as f64).powf(zf.weight as f64 / 2.0);
    // monic in y = x / p^(w/2): coefficient of y^(D-i) is c_i / scale^i
    let a: Vec<Complex<f64>> = zf
        .coefficients
        .iter()
        .enumerate()
        .map(|(i, c)| Complex::new(c.to_f64().unwrap_or(f64::NAN) / scale.powi(i as i32), 0.0))
        .collect();
    let eval = |y: Complex<f64>| a.iter().fold(Complex::new(0.0, 0.0), |acc, c| acc * y + c);
    let seed = Complex::new(0.4, 0.9);
    let mut roots: Vec<Complex<f64>> = (0..degree).map(|i| seed.powu(i as u32 + 1)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..degree {
            let mut denom = Complex::new(1.0, 0.0);
            for j in 0..degree {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots.iter().map(|r| r.norm()).collect()
}

/// Every reciprocal root has absolute value `p^(w/2)` within `rel_tol`.
pub fn weil_check(zf: &ZetaFactor, rel_tol: f64) -> bool {
    reciprocal_root_moduli(zf).iter().all(|m| (m - 1.0).abs() <= rel_tol)
}

/// `lambda = (-1|p)^(d/2) p^(d/2 - 1)`, the linear factor for `t = 1`, `d` even.
pub fn expected_linear_root(p: u64, d: u32) -> BigInt {
    let minus_one = if p % 4 == 1 { 1 } else { -1 };
    let sign = if (d / 2).is_multiple_of(2) { 1 } else { minus_one };
    big_pow(p, d / 2 - 1) * sign
}

/// Integer square root of a nonnegative big integer, if exact.
pub fn exact_sqrt(x: &BigInt) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    let r = x.sqrt();
    (&r * &r == *x).then_some(r)
}

/// `v_p(x)` for nonzero `x`.
pub fn p_valuation(x: &BigInt, p: u64) -> u32 {
    valuation(x, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn cache() -> SumCache {
        SumCache::default()
    }

    #[test]
    fn d2_t1_is_linear_factor_only() {
        // H_3(1) = -1, H_9(1) = 1
        let z = assemble_zeta(3, 2, 1, &[-1, 1]).unwrap();
        assert_eq!(z.coefficients, big(&[1]));
        let r = z.removed_factor.unwrap();
        assert_eq!(r.root, BigInt::from(-1));
        assert_eq!(r.orientation, Orientation::Multiplied);
    }

    #[test]
    fn d4_p3_example() {
        let z = compute_zeta(&cache(), 3, 4, 1, ZetaOptions::default()).unwrap();
        assert_eq!(z.coefficients, big(&[1, 4, 27]));
        assert_eq!(z.removed_factor.as_ref().unwrap().root, expected_linear_root(3, 4));
        let np = newton_polygon(&z);
        assert_eq!(np.multiset(), vec![BigRational::from_integer(0.into()), BigRational::from_integer(3.into())]);
        let u = unit_root_of_zeta(&z, 3).unwrap();
        assert_eq!(u.residue().symmetric(), BigInt::from(-4));
    }

    #[test]
    fn d6_p3_example() {
        let z = compute_zeta(&cache(), 3, 6, 1, ZetaOptions::default()).unwrap();
        let want = poly_mul(&big(&[1, 12, 243]), &big(&[1, -20, 243]));
        assert_eq!(z.coefficients, want);
        assert_eq!(z.removed_factor.as_ref().unwrap().root, expected_linear_root(3, 6));
        assert_eq!(expected_linear_root(3, 6), BigInt::from(-9));
    }

    #[test]
    fn d3_minus_one_p5_has_linear_factor() {
        let c = cache();
        let z = compute_zeta(&c, 5, 3, -1, ZetaOptions::default()).unwrap();
        let g = compute_zeta(&c, 5, 3, -1, ZetaOptions { source: HSource::Gauss, ..Default::default() }).unwrap();
        assert_eq!(z.coefficients, g.coefficients);
        assert_eq!(z.degree(), 3);
        let rep = factor_check(&z.coefficients, &[FactorShape::linear(5.into()), FactorShape::unknown(2)]).unwrap();
        assert_eq!(rep.cofactor, big(&[1, 0, -25]));
        assert!(weil_check(&z, 1e-6));
    }

    #[test]
    fn newton_polygon_examples() {
        let np = newton_polygon_of(&big(&[1, -1]), 5);
        assert_eq!(np.slopes, vec![(BigRational::zero(), 1)]);
        let c = poly_mul(&big(&[1, -5 * 7, 5i64.pow(5)]), &big(&[1, -3, 5i64.pow(5)]));
        let ms: Vec<String> = newton_polygon_of(&c, 5).multiset().iter().map(|s| s.to_string()).collect();
        assert_eq!(ms, vec!["0", "1", "4", "5"]);
        let np = newton_polygon_of(&big(&[1, 0, 9]), 3);
        assert_eq!(np.slopes, vec![(BigRational::one(), 2)]);
        assert_eq!(np.unit_length(), 0);
    }

    #[test]
    fn unit_root_examples() {
        let u = unit_root_of_poly(&big(&[1, -1]), 7, 4).unwrap();
        assert_eq!(u.residue().value_u64(), Some(1));
        // 1 - a T + p^3 T^2: unit root = a mod p^3
        let u = unit_root_of_poly(&big(&[1, 2, 125]), 5, 3).unwrap();
        assert_eq!(u.residue().symmetric(), BigInt::from(-2));
        assert_eq!(unit_root_of_poly(&big(&[1, 0, 125]), 5, 3), Err(Error::NoUnitRoot));
        assert_eq!(unit_root_of_poly(&big(&[1, 1, 1]), 5, 3), Err(Error::MultipleUnitRoots(2)));
    }

    #[test]
    fn divrem_and_factor_check() {
        let a = poly_mul(&big(&[1, -3]), &big(&[1, 2, 9]));
        let (q, r) = poly_divrem(&a, &big(&[1, -3]));
        assert_eq!(q, big(&[1, 2, 9]));
        assert!(r.is_empty());
        let err = factor_check(&a, &[FactorShape::linear(5.into())]).unwrap_err();
        assert!(matches!(err, Error::FactorMismatch(_)));
        let partial = FactorShape { coefficients: vec![Some(1.into()), None, Some(9.into())] };
        let rep = factor_check(&a, &[FactorShape::linear(3.into()), partial]).unwrap();
        assert_eq!(rep.cofactor, big(&[1, 2, 9]));
    }

    #[test]
    fn series_sign_convention() {
        // a single reciprocal root mu gives power sums mu^s
        let s = series_from_power_sums(&[7, 49, 343]);
        let ints: Vec<BigInt> = s.iter().map(|x| x.to_integer()).collect();
        assert_eq!(ints, big(&[1, -7, 0, 0]));
    }

    #[test]
    fn symmetry_completion_matches_full_data() {
        // d = 5, t = -1, p = 3: full data versus the first three power sums
        let c = cache();
        let full = compute_zeta(&c, 3, 5, -1, ZetaOptions::default()).unwrap();
        assert!(!full.completed_by_symmetry);
        let short = compute_zeta(&c, 3, 5, -1, ZetaOptions { max_q: 27, ..Default::default() }).unwrap();
        assert!(short.completed_by_symmetry);
        assert_eq!(short.coefficients, full.coefficients);
        assert_eq!(short.sign, full.sign);
    }

    #[test]
    fn weil_moduli() {
        let z = compute_zeta(&cache(), 5, 4, 1, ZetaOptions::default()).unwrap();
        assert!(weil_check(&z, 1e-6));
        let fake = ZetaFactor { coefficients: big(&[1, -1]), ..z };
        assert!(!weil_check(&fake, 1e-6));
    }

    #[test]
    fn poly_format() {
        assert_eq!(format_poly(&big(&[1, 4, 27])), "1 + 4T + 27T^2");
        assert_eq!(format_poly(&big(&[1, -1, 0, -9])), "1 - T - 9T^3");
        assert_eq!(format_poly(&big(&[0, 0, 72])), "72T^2");
        assert_eq!(format_poly(&big(&[0])), "0");
    }
}
