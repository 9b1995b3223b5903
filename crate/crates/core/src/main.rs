use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hypercong::field::FieldTable;
use hypercong::harness::{
    run_sweep, work_cap_from_env, ClaimId, Status, SweepConfig, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE,
};
use hypercong::hyp_sums::{h_value_count, h_value_gauss, point_count, GaussTable, HValue, SumCache};
use hypercong::hypergeom::{truncated_sum, unit_root_limit, HyperParams};
use hypercong::modular::{eta_expand, EtaQuotient};
use hypercong::zeta::{compute_zeta, newton_polygon, unit_root_of_zeta, ZetaOptions};
use hypercong::Error;

#[derive(Parser)]
#[command(name = "hypercong", version, about = "Supercongruences of truncated hypergeometric sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Gauss,
    Count,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// F_{p^s}(z) mod p^k
    Trunc {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        s: u32,
        #[arg(long, allow_hyphen_values = true)]
        z: i64,
        #[arg(long = "mod-exp")]
        mod_exp: u32,
    },
    /// Unit root F_{p^N}(z) / F_{p^(N-1)}(z) mod p^N
    Unitroot {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        z: i64,
        #[arg(long)]
        precision: u32,
    },
    /// Finite field tables for F_{p^k}
    Field {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u32,
        /// Print one line per element: index, coefficients, discrete log, trace
        #[arg(long)]
        dump: bool,
    },
    /// Finite hypergeometric sum H_q(t)
    Hq {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: u32,
        /// Element index in [0, q), or a negative integer in the prime field
        #[arg(long, allow_hyphen_values = true)]
        t: i64,
        #[arg(long, value_enum, default_value = "count")]
        method: MethodArg,
        #[arg(long = "precision-bits")]
        precision_bits: Option<u32>,
    },
    /// Exact point count behind H_q(t)
    Pointcount {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, allow_hyphen_values = true)]
        t: i64,
    },
    /// Zeta factor Z_p(t, T) with Newton slopes and unit root
    Zeta {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u32,
        #[arg(long, allow_hyphen_values = true)]
        t: i64,
    },
    /// q-expansion of an eta quotient such as "2^4 4^4"
    Eta {
        #[arg(long)]
        quotient: String,
        #[arg(long)]
        terms: usize,
    },
    /// Sweep claims and write a report
    Verify {
        /// Comma-separated claim ids, or "all"
        #[arg(long)]
        claims: String,
        #[arg(long)]
        pmax: u64,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Record per-cell wall time (makes reports run-dependent)
        #[arg(long)]
        timings: bool,
        #[arg(long = "corrupt-alpha", hide = true)]
        corrupt_alpha: Option<u64>,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::IntegralityFailure { .. } | Error::ConsistencyFailure(_) | Error::FactorMismatch(_) => {
            EXIT_INTERNAL as u8
        }
        _ => EXIT_USAGE as u8,
    }
}

fn print_json(v: &Value) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)
}

fn field_element(field: &FieldTable, t: i64) -> Result<u64, Error> {
    if t < 0 {
        Ok(field.embed(t))
    } else if (t as u64) < field.q() {
        Ok(t as u64)
    } else {
        Err(Error::InvalidInput(format!("t = {t} is not below q = {}", field.q())))
    }
}

fn h_json(h: &HValue) -> Value {
    serde_json::to_value(h).expect("serializable")
}

fn run(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Trunc { d, p, s, z, mod_exp } => {
            let v = truncated_sum(HyperParams::new(d, p)?, s, z, mod_exp)?;
            print_json(&json!({
                "d": d, "p": p, "s": s, "z": z, "k": mod_exp,
                "value": v.value.value().to_string(),
                "symmetric": v.value.symmetric().to_string(),
            }))
            .map_err(io_err)?;
        }
        Command::Unitroot { d, p, z, precision } => {
            let u = unit_root_limit(HyperParams::new(d, p)?, z, precision)?;
            print_json(&json!({
                "d": d, "p": p, "z": z, "precision": precision,
                "value": u.residue().value().to_string(),
                "symmetric": u.residue().symmetric().to_string(),
            }))
            .map_err(io_err)?;
        }
        Command::Field { p, k, dump } => {
            let f = FieldTable::build(p, k)?;
            if dump {
                let mut out = BufWriter::new(io::stdout().lock());
                f.dump(&mut out).map_err(io_err)?;
                out.flush().map_err(io_err)?;
            } else {
                print_json(&json!({
                    "p": p, "k": k, "q": f.q(),
                    "modulus": f.modulus_poly(),
                    "generator": f.generator(),
                    "generator_coefficients": f.coefficients(f.generator()),
                }))
                .map_err(io_err)?;
            }
        }
        Command::Hq { p, k, d, t, method, precision_bits } => {
            let field = Arc::new(FieldTable::build(p, k)?);
            let te = field_element(&field, t)?;
            let h = match method {
                MethodArg::Count => h_value_count(field, d, te)?,
                MethodArg::Gauss => {
                    let bits = precision_bits.unwrap_or_else(|| GaussTable::default_precision(field.q()));
                    h_value_gauss(&GaussTable::new(field, bits)?, d, te)?
                }
            };
            print_json(&h_json(&h)).map_err(io_err)?;
        }
        Command::Pointcount { p, k, d, t } => {
            let field = Arc::new(FieldTable::build(p, k)?);
            let te = field_element(&field, t)?;
            let count = point_count(field.clone(), d, te)?;
            let h = h_value_count(field, d, te)?;
            let mut v = h_json(&h);
            v["count"] = Value::String(count.to_string());
            print_json(&v).map_err(io_err)?;
        }
        Command::Zeta { p, d, t } => {
            let cache = SumCache::new(ZetaOptions::default().max_q);
            let z = compute_zeta(&cache, p, d, t, ZetaOptions::default())?;
            let mut v = serde_json::to_value(&z).expect("serializable");
            v["polynomial"] = Value::String(z.to_string());
            v["slopes"] = serde_json::to_value(newton_polygon(&z)).expect("serializable");
            v["unit_root_mod_p2"] = match unit_root_of_zeta(&z, 2) {
                Ok(u) => Value::String(u.residue().symmetric().to_string()),
                Err(_) => Value::Null,
            };
            print_json(&v).map_err(io_err)?;
        }
        Command::Eta { quotient, terms } => {
            let q: EtaQuotient = quotient.parse()?;
            let e = eta_expand(&q, terms)?;
            print_json(&json!({ "quotient": q.to_string(), "coefficients": e.coefficients })).map_err(io_err)?;
        }
        Command::Verify { claims, pmax, jobs, out, format, timings, corrupt_alpha } => {
            let cfg = SweepConfig {
                claims: ClaimId::parse_list(&claims)?,
                pmax,
                jobs,
                work_cap: work_cap_from_env()?,
                timings,
                corrupt_alpha_at: corrupt_alpha,
            };
            let cancel = Arc::new(AtomicBool::new(false));
            let flag = cancel.clone();
            // a second handler registration fails harmlessly in tests that call run twice
            let _ = ctrlc::set_handler(move || flag.store(true, Ordering::Relaxed));
            let report = run_sweep(&cfg, &cancel)?;
            let file = File::create(&out).map_err(io_err)?;
            let mut w = BufWriter::new(file);
            match format {
                Format::Json => {
                    w.write_all(report.to_json().as_bytes()).map_err(io_err)?;
                    w.write_all(b"\n").map_err(io_err)?;
                }
                Format::Csv => report.write_csv(&mut w).map_err(io_err)?,
            }
            w.flush().map_err(io_err)?;
            summarize(&report);
            return Ok(report.exit_code() as u8);
        }
    }
    Ok(EXIT_OK as u8)
}

fn summarize(report: &hypercong::harness::SweepReport) {
    let mut counts: std::collections::BTreeMap<(&str, &str), usize> = Default::default();
    for c in &report.cells {
        *counts.entry((c.claim.as_str(), c.status.as_str())).or_default() += 1;
    }
    for ((claim, status), n) in counts {
        eprintln!("{claim:<18} {status:<16} {n}");
    }
    for c in report.counterexamples() {
        eprintln!(
            "COUNTEREXAMPLE {} d={} p={} z={} order={:?} {}",
            c.claim,
            c.d,
            c.p,
            c.z,
            c.observed_order,
            c.detail.as_deref().unwrap_or("")
        );
    }
    for c in report.cells.iter().filter(|c| c.proved && c.status == Status::Fails) {
        eprintln!("VIOLATION {} d={} p={} z={} {}", c.claim, c.d, c.p, c.z, c.detail.as_deref().unwrap_or(""));
    }
    if report.incomplete {
        eprintln!("interrupted: report is incomplete");
    }
}

fn io_err(e: io::Error) -> Error {
    Error::InvalidInput(format!("I/O error: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
