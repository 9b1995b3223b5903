//! Sweeps over `(claim, d, p, z)` cells: each cell compares a truncated sum
//! with its predicted value and records the largest exponent `k` for which
//! the two agree modulo `p^k`.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp_sums::SumCache;
use crate::hypergeom::{epsilon_p, partial_sums_with, unit_root_limit_with, HyperParams, SumOptions};
use crate::modular::{a_p_weight7, cm_coefficient, d_p, eta_expand, solve_bp_from_zeta, CmForm, EtaQuotient};
use crate::padic::{legendre, odd_primes_up_to, PrimePowerModulus, Residue};
use crate::zeta::{
    compute_zeta, factor_check, format_poly, newton_polygon, newton_polygon_of, unit_root_of_zeta, FactorShape,
    HSource, ZetaFactor, ZetaOptions,
};

/// Largest `p` for cells checked modulo `p^2`.
pub const P_MAX_SQUARE: u64 = 199;
/// Largest `p` for cells checked modulo `p^3`.
pub const P_MAX_CUBE: u64 = 97;
/// Largest `p` for cells checked modulo `p^4` or `p^5`, and for zeta factors.
pub const P_MAX_HIGH: u64 = 13;
/// Largest `p` in the printed level-256 table.
pub const P_MAX_G256: u64 = 29;
/// Largest `p` in the printed level-32 table.
pub const P_MAX_S3_LEVEL32: u64 = 23;
/// Largest field order used for zeta factors; covers `13^5`.
pub const ZETA_MAX_Q: u64 = 400_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClaimId {
    #[serde(rename = "thm_main")]
    ThmMain,
    #[serde(rename = "conj1")]
    Conj1,
    #[serde(rename = "conj2")]
    Conj2,
    #[serde(rename = "conj3_d3")]
    Conj3D3,
    #[serde(rename = "conj3_d5")]
    Conj3D5,
    #[serde(rename = "conj4")]
    Conj4,
    #[serde(rename = "mortenson_d2")]
    MortensonD2,
    #[serde(rename = "ivha_d3")]
    IvhaD3,
    #[serde(rename = "kilbourn_d4")]
    KilbournD4,
    #[serde(rename = "osz_d6")]
    OszD6,
    #[serde(rename = "vanishing")]
    Vanishing,
    #[serde(rename = "zeta_factor_d3m1")]
    ZetaFactorD3m1,
    #[serde(rename = "zeta_factor_d5m1")]
    ZetaFactorD5m1,
    #[serde(rename = "zeta_factor_d7m1")]
    ZetaFactorD7m1,
    #[serde(rename = "slopes_d4")]
    SlopesD4,
    #[serde(rename = "slopes_d6")]
    SlopesD6,
    #[serde(rename = "grand_crosscheck")]
    GrandCrosscheck,
}

impl ClaimId {
    pub const ALL: [ClaimId; 17] = [
        ClaimId::ThmMain,
        ClaimId::Conj1,
        ClaimId::Conj2,
        ClaimId::Conj3D3,
        ClaimId::Conj3D5,
        ClaimId::Conj4,
        ClaimId::MortensonD2,
        ClaimId::IvhaD3,
        ClaimId::KilbournD4,
        ClaimId::OszD6,
        ClaimId::Vanishing,
        ClaimId::ZetaFactorD3m1,
        ClaimId::ZetaFactorD5m1,
        ClaimId::ZetaFactorD7m1,
        ClaimId::SlopesD4,
        ClaimId::SlopesD6,
        ClaimId::GrandCrosscheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClaimId::ThmMain => "thm_main",
            ClaimId::Conj1 => "conj1",
            ClaimId::Conj2 => "conj2",
            ClaimId::Conj3D3 => "conj3_d3",
            ClaimId::Conj3D5 => "conj3_d5",
            ClaimId::Conj4 => "conj4",
            ClaimId::MortensonD2 => "mortenson_d2",
            ClaimId::IvhaD3 => "ivha_d3",
            ClaimId::KilbournD4 => "kilbourn_d4",
            ClaimId::OszD6 => "osz_d6",
            ClaimId::Vanishing => "vanishing",
            ClaimId::ZetaFactorD3m1 => "zeta_factor_d3m1",
            ClaimId::ZetaFactorD5m1 => "zeta_factor_d5m1",
            ClaimId::ZetaFactorD7m1 => "zeta_factor_d7m1",
            ClaimId::SlopesD4 => "slopes_d4",
            ClaimId::SlopesD6 => "slopes_d6",
            ClaimId::GrandCrosscheck => "grand_crosscheck",
        }
    }

    /// Proved statements fail the run when violated; the rest only report.
    pub fn is_proved(self) -> bool {
        matches!(
            self,
            ClaimId::ThmMain
                | ClaimId::MortensonD2
                | ClaimId::IvhaD3
                | ClaimId::KilbournD4
                | ClaimId::OszD6
                | ClaimId::Vanishing
        )
    }

    /// Parse a comma-separated list; `all` selects every claim.
    pub fn parse_list(s: &str) -> Result<Vec<ClaimId>> {
        let mut out = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if tok == "all" {
                out.extend(ClaimId::ALL);
            } else {
                out.push(tok.parse()?);
            }
        }
        out.sort_by_key(|c| c.as_str());
        out.dedup();
        if out.is_empty() {
            return Err(Error::InvalidInput("no claims selected".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimId {
    type Err = Error;

    fn from_str(s: &str) -> Result<ClaimId> {
        ClaimId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown claim {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    SkippedNonunit,
    SkippedCost,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::SkippedNonunit => "skipped_nonunit",
            Status::SkippedCost => "skipped_cost",
        }
    }
}

/// One `(claim, d, p, z)` point with the precision it is checked at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub claim: ClaimId,
    pub d: u32,
    pub p: u64,
    pub z: i64,
    /// Exponent `k` of the modulus `p^k` both sides are computed at.
    pub cap: Option<u32>,
    /// Exponent required for `holds`; `None` for structural checks.
    pub asserted: Option<u32>,
}

impl Cell {
    fn key(&self) -> (&'static str, u32, u64, i64) {
        (self.claim.as_str(), self.d, self.p, self.z)
    }

    /// Estimated number of series terms or field elements touched.
    pub fn cost(&self) -> u64 {
        let p = self.p;
        let d = self.d as u64;
        match self.claim {
            ClaimId::ZetaFactorD3m1
            | ClaimId::ZetaFactorD5m1
            | ClaimId::ZetaFactorD7m1
            | ClaimId::SlopesD4
            | ClaimId::SlopesD6
            | ClaimId::GrandCrosscheck
            | ClaimId::OszD6 => {
                let mut q = 1u64;
                let mut total = 0u64;
                while q.saturating_mul(p) <= ZETA_MAX_Q && total < u64::MAX / 2 {
                    q *= p;
                    total += q * d;
                }
                total + p.saturating_pow(self.cap.unwrap_or(1)) * d
            }
            _ => p.saturating_pow(self.cap.unwrap_or(1)).saturating_mul(d),
        }
    }
}

/// Every cell of `claim` with `p <= pmax`, sorted.
pub fn cells_for(claim: ClaimId, pmax: u64) -> Vec<Cell> {
    let primes = |bound: u64| odd_primes_up_to(pmax.min(bound));
    let cell = |d, p, z, cap, asserted| Cell { claim, d, p, z, cap, asserted };
    let mut out = Vec::new();
    match claim {
        ClaimId::ThmMain => {
            for d in 2..=7 {
                for p in primes(P_MAX_SQUARE) {
                    let e = epsilon_p(HyperParams::new(d, p).expect("valid")).value();
                    out.push(cell(d, p, e, Some(2), Some(2)));
                }
            }
        }
        ClaimId::Conj1 => {
            for d in 2..=7 {
                for p in primes(P_MAX_SQUARE) {
                    for z in [-1, 1] {
                        out.push(cell(d, p, z, Some(2), Some(2)));
                    }
                }
            }
        }
        ClaimId::Conj2 => {
            for (d, z) in [(3, -1), (3, 1), (4, 1), (5, 1), (6, 1)] {
                for p in primes(P_MAX_CUBE) {
                    let high = d == 6 && p <= P_MAX_HIGH;
                    let k = if high { 5 } else { 3 };
                    out.push(cell(d, p, z, Some(k), Some(k)));
                }
            }
        }
        ClaimId::Conj3D3 => {
            for p in primes(P_MAX_SQUARE) {
                out.push(cell(3, p, -1, Some(3), Some(2)));
            }
        }
        ClaimId::Conj3D5 => {
            for p in primes(P_MAX_G256) {
                out.push(cell(5, p, -1, Some(3), Some(2)));
            }
        }
        ClaimId::Conj4 => {
            for d in 2..=7 {
                for p in primes(P_MAX_HIGH) {
                    for z in [-1, 1] {
                        out.push(cell(d, p, z, Some(4), Some(4)));
                    }
                }
            }
        }
        ClaimId::MortensonD2 => {
            for p in primes(P_MAX_SQUARE) {
                out.push(cell(2, p, 1, Some(2), Some(2)));
            }
        }
        ClaimId::IvhaD3 => {
            for p in primes(P_MAX_SQUARE) {
                out.push(cell(3, p, 1, Some(2), Some(2)));
            }
        }
        ClaimId::KilbournD4 => {
            for p in primes(P_MAX_CUBE) {
                out.push(cell(4, p, 1, Some(3), Some(3)));
            }
        }
        ClaimId::OszD6 => {
            for p in primes(P_MAX_HIGH) {
                out.push(cell(6, p, 1, Some(3), Some(3)));
            }
        }
        ClaimId::Vanishing => {
            for d in 2..=7 {
                for p in primes(P_MAX_SQUARE).into_iter().filter(|p| p % 4 == 3) {
                    let e = epsilon_p(HyperParams::new(d, p).expect("valid")).value();
                    out.push(cell(d, p, -e, Some(2), Some(1)));
                }
            }
        }
        ClaimId::ZetaFactorD3m1 | ClaimId::ZetaFactorD5m1 | ClaimId::ZetaFactorD7m1 => {
            let d = match claim {
                ClaimId::ZetaFactorD3m1 => 3,
                ClaimId::ZetaFactorD5m1 => 5,
                _ => 7,
            };
            for p in primes(P_MAX_HIGH) {
                out.push(cell(d, p, -1, None, None));
            }
        }
        ClaimId::SlopesD4 | ClaimId::SlopesD6 => {
            let d = if claim == ClaimId::SlopesD4 { 4 } else { 6 };
            for p in primes(P_MAX_HIGH) {
                out.push(cell(d, p, 1, None, None));
            }
        }
        ClaimId::GrandCrosscheck => {
            for d in [3, 4] {
                for p in primes(P_MAX_HIGH) {
                    for z in [-1, 1] {
                        out.push(cell(d, p, z, Some(2), Some(2)));
                    }
                }
            }
        }
    }
    out.sort_by_key(|c| c.key());
    out
}

/// Largest `k <= cap` with `lhs = rhs mod p^k`.
pub fn observed_congruence_order(lhs: &Residue, rhs: &Residue) -> u32 {
    (lhs - rhs).valuation()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellReport {
    pub claim: ClaimId,
    pub d: u32,
    pub p: u64,
    pub z: i64,
    pub status: Status,
    pub proved: bool,
    pub asserted: Option<u32>,
    pub cap: Option<u32>,
    pub observed_order: Option<u32>,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub detail: Option<String>,
    /// An internal consistency check failed while evaluating the cell.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub internal_error: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<f64>,
}

impl CellReport {
    fn new(cell: &Cell, status: Status) -> CellReport {
        CellReport {
            claim: cell.claim,
            d: cell.d,
            p: cell.p,
            z: cell.z,
            status,
            proved: cell.claim.is_proved(),
            asserted: cell.asserted,
            cap: cell.cap,
            observed_order: None,
            lhs: None,
            rhs: None,
            detail: None,
            internal_error: false,
            millis: None,
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> CellReport {
        self.detail = Some(detail.into());
        self
    }

    /// `holds` when the observed order reaches the asserted exponent.
    fn compare(cell: &Cell, lhs: &Residue, rhs: &Residue) -> CellReport {
        let order = observed_congruence_order(lhs, rhs);
        let ok = order >= cell.asserted.expect("congruence cells assert an exponent");
        let mut r = CellReport::new(cell, if ok { Status::Holds } else { Status::Fails });
        r.observed_order = Some(order);
        r.lhs = Some(lhs.symmetric().to_string());
        r.rhs = Some(rhs.symmetric().to_string());
        r
    }

    fn structural(cell: &Cell, ok: bool, lhs: String, rhs: String) -> CellReport {
        let mut r = CellReport::new(cell, if ok { Status::Holds } else { Status::Fails });
        r.lhs = Some(lhs);
        r.rhs = Some(rhs);
        r
    }

    /// A counterexample to a conjectural statement.
    pub fn is_counterexample(&self) -> bool {
        !self.proved && self.status == Status::Fails
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepConfig {
    pub claims: Vec<ClaimId>,
    pub pmax: u64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Total budget of estimated term evaluations; cells past it are
    /// `skipped_cost`.
    pub work_cap: Option<u64>,
    pub timings: bool,
    #[doc(hidden)]
    pub corrupt_alpha_at: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub incomplete: bool,
    pub cells: Vec<CellReport>,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const CSV_COLUMNS: [&str; 12] =
    ["claim", "d", "p", "z", "status", "proved", "asserted", "cap", "observed_order", "lhs", "rhs", "detail"];

impl SweepReport {
    /// 3 on an internal consistency failure, 1 when a proved claim fails,
    /// 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.cells.iter().any(|c| c.internal_error) {
            EXIT_INTERNAL
        } else if self.cells.iter().any(|c| c.proved && c.status == Status::Fails) {
            EXIT_VIOLATION
        } else {
            EXIT_OK
        }
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = &CellReport> {
        self.cells.iter().filter(|c| c.is_counterexample())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per cell in the fixed `CSV_COLUMNS` order, plus `millis` when
    /// timings were recorded.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let timed = self.cells.iter().any(|c| c.millis.is_some());
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = CSV_COLUMNS.to_vec();
        if timed {
            header.push("millis");
        }
        w.write_record(&header)?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for c in &self.cells {
            let mut row = vec![
                c.claim.to_string(),
                c.d.to_string(),
                c.p.to_string(),
                c.z.to_string(),
                c.status.as_str().to_string(),
                c.proved.to_string(),
                opt(c.asserted.map(|v| v.to_string())),
                opt(c.cap.map(|v| v.to_string())),
                opt(c.observed_order.map(|v| v.to_string())),
                opt(c.lhs.clone()),
                opt(c.rhs.clone()),
                opt(c.detail.clone()),
            ];
            if timed {
                row.push(opt(c.millis.map(|m| format!("{m:.3}"))));
            }
            w.write_record(&row)?;
        }
        w.flush()
    }
}

/// `(p, d, t, gauss route)`.
type ZetaKey = (u64, u32, i64, bool);

/// Shared state for one sweep.
pub struct Evaluator {
    cache: SumCache,
    opts: SumOptions,
    eta_terms: usize,
    weight4: OnceLock<Result<Vec<i128>>>,
    zetas: Mutex<HashMap<ZetaKey, Result<ZetaFactor>>>,
}

impl Evaluator {
    pub fn new(pmax: u64) -> Evaluator {
        Evaluator::with_options(pmax, SumOptions::default())
    }

    #[doc(hidden)]
    pub fn with_options(pmax: u64, opts: SumOptions) -> Evaluator {
        Evaluator {
            cache: SumCache::new(ZETA_MAX_Q),
            opts,
            eta_terms: pmax.max(P_MAX_HIGH) as usize + 1,
            weight4: OnceLock::new(),
            zetas: Mutex::new(HashMap::new()),
        }
    }

    fn params(&self, cell: &Cell) -> Result<HyperParams> {
        HyperParams::new(cell.d, cell.p)
    }

    /// `F_{p^s}(z) mod p^k`.
    fn sum(&self, cell: &Cell, s: u32, k: u32) -> Result<Residue> {
        let params = self.params(cell)?;
        Ok(partial_sums_with(params, cell.z, &[cell.p.pow(s)], k, self.opts)?.remove(0))
    }

    fn unit_root(&self, cell: &Cell, k: u32) -> Result<Residue> {
        Ok(unit_root_limit_with(self.params(cell)?, cell.z, k, self.opts)?.into_residue())
    }

    /// `a_p` of the weight-4 level-8 eta product.
    fn weight4_coefficient(&self, p: u64) -> Result<i128> {
        let table = self
            .weight4
            .get_or_init(|| eta_expand(&EtaQuotient::weight4_level8(), self.eta_terms).map(|e| e.coefficients));
        match table {
            Ok(c) => c.get(p as usize - 1).copied().ok_or(Error::OutOfTable { p }),
            Err(e) => Err(e.clone()),
        }
    }

    fn zeta(&self, p: u64, d: u32, t: i64, gauss: bool) -> Result<ZetaFactor> {
        let key = (p, d, t, gauss);
        if let Some(z) = self.zetas.lock().unwrap().get(&key) {
            return z.clone();
        }
        let source = if gauss { HSource::Gauss } else { HSource::Count };
        let z = compute_zeta(&self.cache, p, d, t, ZetaOptions { max_q: ZETA_MAX_Q, source });
        self.zetas.lock().unwrap().entry(key).or_insert(z).clone()
    }

    fn residue(&self, cell: &Cell, v: &BigInt) -> Result<Residue> {
        Ok(Residue::from_bigint(v, &PrimePowerModulus::new(cell.p, cell.cap.expect("cap"))?))
    }

    /// Evaluate one cell; errors are reported inside the cell.
    pub fn evaluate(&self, cell: &Cell) -> CellReport {
        match self.evaluate_inner(cell) {
            Ok(r) => r,
            Err(Error::NotAUnit { value, .. }) => {
                CellReport::new(cell, Status::SkippedNonunit).with_detail(format!("{value} is not a unit"))
            }
            Err(e) => {
                let internal = cell.claim.is_proved()
                    || matches!(e, Error::IntegralityFailure { .. } | Error::ConsistencyFailure(_));
                let mut r = CellReport::new(cell, Status::Fails).with_detail(e.to_string());
                r.internal_error = internal;
                r
            }
        }
    }

    fn nonunit_guard(&self, cell: &Cell) -> Result<()> {
        let f = self.sum(cell, 1, 1)?;
        if f.is_unit() {
            Ok(())
        } else {
            Err(Error::NotAUnit { value: format!("F_{}({})", cell.p, cell.z), p: cell.p, k: 1 })
        }
    }

    fn evaluate_inner(&self, cell: &Cell) -> Result<CellReport> {
        let p = cell.p;
        match cell.claim {
            ClaimId::ThmMain | ClaimId::Conj1 | ClaimId::Conj2 => {
                let k = cell.cap.expect("cap");
                self.nonunit_guard(cell)?;
                let lhs = self.sum(cell, 1, k)?;
                let rhs = self.unit_root(cell, k)?;
                Ok(CellReport::compare(cell, &lhs, &rhs))
            }
            ClaimId::Conj4 => {
                self.nonunit_guard(cell)?;
                let lhs = self.sum(cell, 2, 4)?;
                let rhs = &self.unit_root(cell, 4)? * &self.sum(cell, 1, 4)?;
                Ok(CellReport::compare(cell, &lhs, &rhs))
            }
            ClaimId::MortensonD2 => {
                let lhs = self.sum(cell, 1, 2)?;
                let rhs = self.residue(cell, &BigInt::from(legendre(-4, p)))?;
                Ok(CellReport::compare(cell, &lhs, &rhs))
            }
            ClaimId::IvhaD3 => {
                let c = cm_coefficient(CmForm::D3Plus, p)?;
                let eta = eta_expand(&EtaQuotient::cm_gaussian(), p as usize)?.coefficient(p as usize);
                if eta != Some(c as i128) {
                    return Err(Error::ConsistencyFailure(format!(
                        "closed form {c} differs from eta coefficient {eta:?} at {p}"
                    )));
                }
                let lhs = self.sum(cell, 1, 2)?;
                Ok(CellReport::compare(cell, &lhs, &self.residue(cell, &BigInt::from(c))?))
            }
            ClaimId::KilbournD4 => {
                let a = self.weight4_coefficient(p)?;
                let lhs = self.sum(cell, 1, 3)?;
                Ok(CellReport::compare(cell, &lhs, &self.residue(cell, &BigInt::from(a))?))
            }
            ClaimId::OszD6 => {
                let a = self.weight4_coefficient(p)?;
                let gauss = self.zeta(p, 6, 1, true)?;
                let count = self.zeta(p, 6, 1, false)?;
                if gauss.coefficients != count.coefficients {
                    return Err(Error::ConsistencyFailure(format!(
                        "Gauss route gives {gauss}, point counts give {count}"
                    )));
                }
                let b = solve_bp_from_zeta(&gauss, a)?;
                let lhs = self.sum(cell, 1, 3)?;
                let mut r = CellReport::compare(cell, &lhs, &self.residue(cell, &b)?);
                r.detail = Some(format!("b_p = {b}"));
                Ok(r)
            }
            ClaimId::Vanishing => {
                let lhs = self.sum(cell, 1, 2)?;
                let zero = Residue::zero(lhs.modulus());
                Ok(CellReport::compare(cell, &lhs, &zero))
            }
            ClaimId::Conj3D3 => {
                self.nonunit_guard(cell)?;
                let c = cm_coefficient(CmForm::D3Minus, p)?;
                let lhs = self.sum(cell, 1, 3)?;
                Ok(CellReport::compare(cell, &lhs, &self.residue(cell, &BigInt::from(c))?))
            }
            ClaimId::Conj3D5 => {
                self.nonunit_guard(cell)?;
                let dp = d_p(p)?;
                let lhs = self.sum(cell, 1, 3)?;
                Ok(CellReport::compare(cell, &lhs, &self.residue(cell, &BigInt::from(dp))?))
            }
            ClaimId::ZetaFactorD3m1 | ClaimId::ZetaFactorD5m1 | ClaimId::ZetaFactorD7m1 => {
                let z = self.zeta(p, cell.d, cell.z, false)?;
                let shapes = expected_minus_one_shapes(cell.d, p)?;
                Ok(factor_cell(cell, &z, &shapes))
            }
            ClaimId::SlopesD4 => self.slopes_d4(cell),
            ClaimId::SlopesD6 => self.slopes_d6(cell),
            ClaimId::GrandCrosscheck => {
                self.nonunit_guard(cell)?;
                let rhs = self.unit_root(cell, 2)?;
                let z = self.zeta(p, cell.d, cell.z, false)?;
                match unit_root_of_zeta(&z, 2) {
                    Ok(u) => Ok(CellReport::compare(cell, &u.into_residue(), &rhs)),
                    Err(e) => {
                        Ok(CellReport::new(cell, Status::Fails).with_detail(format!("F_p(z) is a unit but {z}: {e}")))
                    }
                }
            }
        }
    }

    fn slopes_d4(&self, cell: &Cell) -> Result<CellReport> {
        let p = cell.p;
        self.nonunit_guard(cell)?;
        let a = self.weight4_coefficient(p)?;
        let z = self.zeta(p, 4, 1, false)?;
        let want = vec![BigInt::one(), BigInt::from(-a), BigInt::from(p).pow(3)];
        let slopes = slope_strings(&newton_polygon(&z).multiset());
        let ok = z.coefficients == want && slopes == ["0", "3"];
        let mut r = CellReport::structural(cell, ok, format!("{z}"), format_poly(&want));
        r.detail = Some(format!("slopes {}", slopes.join(",")));
        Ok(r)
    }

    fn slopes_d6(&self, cell: &Cell) -> Result<CellReport> {
        let p = cell.p;
        self.nonunit_guard(cell)?;
        let a = self.weight4_coefficient(p)?;
        let z = self.zeta(p, 6, 1, false)?;
        let b = match solve_bp_from_zeta(&z, a) {
            Ok(b) => b,
            Err(Error::FactorMismatch(m)) => {
                return Ok(CellReport::structural(
                    cell,
                    false,
                    format!("{z}"),
                    "(1 - p a_p T + p^5 T^2)(1 - b_p T + p^5 T^2)".into(),
                )
                .with_detail(m));
            }
            Err(e) => return Err(e),
        };
        let pb = BigInt::from(p);
        let first = vec![BigInt::one(), -(&pb * a), pb.pow(5)];
        let second = vec![BigInt::one(), -b.clone(), pb.pow(5)];
        let np_first = newton_polygon_of(&first, p).multiset();
        let a_unit = a % p as i128 != 0;
        let mut expected = if a_unit { rationals(&[1, 4]) } else { np_first.clone() };
        expected.extend(rationals(&[0, 5]));
        expected.sort();
        let got = newton_polygon(&z).multiset();
        let ok = got == expected && (!a_unit || np_first == rationals(&[1, 4]));
        let mut r = CellReport::structural(
            cell,
            ok,
            format!("{z}"),
            format!("({})({})", format_poly(&first), format_poly(&second)),
        );
        let mut detail = format!("slopes {}; b_p = {b}", slope_strings(&got).join(","));
        if !a_unit {
            detail.push_str("; a_p is not a unit");
        }
        r.detail = Some(detail);
        Ok(r)
    }
}

fn rationals(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}

fn slope_strings(v: &[BigRational]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn shape_string(shapes: &[FactorShape]) -> String {
    shapes
        .iter()
        .map(|s| {
            let c: Vec<String> = s
                .coefficients
                .iter()
                .enumerate()
                .map(|(i, x)| match x {
                    Some(v) => v.to_string(),
                    None => format!("?{i}"),
                })
                .collect();
            format!("[{}]", c.join(", "))
        })
        .collect::<Vec<_>>()
        .join(" * ")
}

fn factor_cell(cell: &Cell, z: &ZetaFactor, shapes: &[FactorShape]) -> CellReport {
    let rhs = shape_string(shapes);
    match factor_check(&z.coefficients, shapes) {
        Ok(rep) => CellReport::structural(cell, true, format!("{z}"), rhs)
            .with_detail(format!("cofactor {}", format_poly(&rep.cofactor))),
        Err(e) => CellReport::structural(cell, false, format!("{z}"), rhs).with_detail(e.to_string()),
    }
}

/// Expected factors of `Z_p(-1, T)` for odd `d`, lowest coefficient first.
pub fn expected_minus_one_shapes(d: u32, p: u64) -> Result<Vec<FactorShape>> {
    let pb = BigInt::from(p);
    let big = |v: i64| BigInt::from(v);
    match d {
        3 => {
            let c = cm_coefficient(CmForm::D3Minus, p)?;
            Ok(vec![FactorShape::linear(pb.clone()), FactorShape::quadratic(big(c), pb.pow(2) * legendre(-8, p))])
        }
        5 => {
            let gamma = if p % 8 == 5 { -1 } else { 1 };
            let c = cm_coefficient(CmForm::D3Plus, p)?;
            let p4 = pb.pow(4);
            let last = if p <= P_MAX_G256 {
                FactorShape::quadratic(big(d_p(p)?), p4.clone())
            } else {
                FactorShape { coefficients: vec![Some(BigInt::one()), None, Some(p4.clone())] }
            };
            Ok(vec![FactorShape::linear(pb.pow(2) * gamma), FactorShape::quadratic(&pb * c, p4), last])
        }
        7 => {
            let mut shapes = vec![FactorShape::linear(pb.pow(3))];
            if p <= P_MAX_S3_LEVEL32 {
                shapes.push(FactorShape::quadratic(&pb * a_p_weight7(p)?, pb.pow(6)));
            }
            if p % 8 == 3 || p % 8 == 5 {
                shapes.push(FactorShape::known(vec![BigInt::one(), BigInt::zero(), -pb.pow(6)]));
            }
            Ok(shapes)
        }
        _ => Err(Error::InvalidInput(format!("no expected factorization of Z_p(-1, T) for d = {d}"))),
    }
}

/// Evaluate every cell of the configured claims.
///
/// Cells run in parallel; the report is sorted by `(claim, d, p, z)` and does
/// not depend on the schedule. Cells are admitted against the work cap in
/// sorted order. When `cancel` is raised, cells not yet started are left out
/// and the report is marked incomplete.
pub fn run_sweep(cfg: &SweepConfig, cancel: &AtomicBool) -> Result<SweepReport> {
    let mut cells: Vec<Cell> = cfg.claims.iter().flat_map(|&c| cells_for(c, cfg.pmax)).collect();
    cells.sort_by_key(|c| c.key());
    cells.dedup_by_key(|c| c.key());
    let mut budget = cfg.work_cap.unwrap_or(u64::MAX);
    let admitted: Vec<bool> = cells
        .iter()
        .map(|c| {
            let cost = c.cost();
            if cost <= budget {
                budget -= cost;
                true
            } else {
                false
            }
        })
        .collect();
    let eval = Evaluator::with_options(cfg.pmax, SumOptions { corrupt_alpha_at: cfg.corrupt_alpha_at });
    let run = || -> Vec<Option<CellReport>> {
        cells
            .par_iter()
            .zip(admitted.par_iter())
            .map(|(cell, &ok)| {
                if !ok {
                    return Some(
                        CellReport::new(cell, Status::SkippedCost)
                            .with_detail(format!("estimated cost {} exceeds the remaining work cap", cell.cost())),
                    );
                }
                if cancel.load(Ordering::Relaxed) {
                    return None;
                }
                let start = Instant::now();
                let mut r = eval.evaluate(cell);
                if cfg.timings {
                    r.millis = Some(start.elapsed().as_secs_f64() * 1e3);
                }
                Some(r)
            })
            .collect()
    };
    let results = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let incomplete = results.iter().any(Option::is_none);
    Ok(SweepReport { incomplete, cells: results.into_iter().flatten().collect() })
}

/// `HYPERCONG_WORK_CAP`, if set.
pub fn work_cap_from_env() -> Result<Option<u64>> {
    match std::env::var("HYPERCONG_WORK_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidInput(format!("HYPERCONG_WORK_CAP={v:?} is not a nonnegative integer"))),
        Err(_) => Ok(None),
    }
}
