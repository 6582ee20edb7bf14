//! Command-line front end: subcommand dispatch, report rendering, and the
//! exit-code contract for scripting.
//!
//! Exit codes: 0 on success (replays closed, tuples verified), 1 when a
//! replay is not closed or a tuple fails verification, 2 on usage errors,
//! 3 when an inequality stayed undecided at the precision cap (or a term
//! cap was exhausted).
//!
//! Reports go to stdout in full or not at all; diagnostics go to stderr.
//! `--out FILE` writes a byte-identical copy of stdout. All numeric
//! arguments parse as exact arbitrary-precision integers.

use clap::{Args, Parser, Subcommand, ValueEnum};
use kdio::bounds::BoundEnvelope;
use kdio::cf::{self, DEFAULT_TERM_CAP};
use kdio::elimination::{self, K3Options};
use kdio::report::ReplayReport;
use kdio::tuples::{self, TupleCheck};
use kdio::{CfError, RationalInterval};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Signed;
use std::ffi::OsString;
use std::io::Write;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CLOSED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "kdio",
    version,
    about = "Exact verification, search and case replay for k-th power Diophantine tuples"
)]
struct Cli {
    /// Worker threads for the sweeps (default: KDIO_THREADS or all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log timings and progress to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify a candidate tuple and print its witness roots.
    Verify(VerifyArgs),
    /// Print the pair {a^k, b} with a^k b + 1 = (a^k + 1)^k.
    Pair(PairArgs),
    /// Certified continued fraction of N^(1/k).
    Cf(CfArgs),
    /// Brute-force triple search by witness roots.
    Search(SearchArgs),
    /// Replay a case pipeline and emit its report.
    Replay(ReplayArgs),
    /// Evaluate the measure condition, mu and lambda for (k, r^k - 1).
    Bounds(BoundsArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_k)]
    k: u32,
    /// Comma-separated elements, strictly increasing.
    #[arg(long, value_parser = parse_tuple)]
    tuple: std::vec::Vec<BigUint>,
}

#[derive(Args, Debug)]
struct PairArgs {
    /// Base a >= 2.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    a: u64,
    /// Exponent k >= 3.
    #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
    k: u32,
}

#[derive(Args, Debug)]
struct CfArgs {
    #[arg(long, value_parser = parse_biguint)]
    n: BigUint,
    #[arg(long, value_parser = parse_k)]
    k: u32,
    /// Number of partial quotients to certify.
    #[arg(long, conflicts_with = "max_p")]
    terms: Option<usize>,
    /// Expand until the convergent numerator reaches this value.
    #[arg(long, value_parser = parse_biguint)]
    max_p: Option<BigUint>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, value_parser = parse_k)]
    k: u32,
    #[arg(long, value_parser = parse_biguint)]
    first_max: BigUint,
    #[arg(long, value_parser = parse_biguint)]
    c_max: BigUint,
    /// Restrict the first element to proper powers a^k, a >= 2.
    #[arg(long)]
    power_form: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReplayCase {
    K3,
    K4,
    Primes,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    #[arg(long, value_enum)]
    case: ReplayCase,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Upper end of the prime spot-check (cases `primes` and `all`).
    #[arg(long, default_value_t = elimination::DEFAULT_PRIME_CAP)]
    prime_cap: u64,
    /// Also test odd-index convergents in the k = 3 sweep.
    #[arg(long)]
    paranoid: bool,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
    k: u32,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    r: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// Parse and dispatch; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };

    let threads = cli.threads.or_else(|| {
        std::env::var("KDIO_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    let verbose = cli.verbose;
    let body = || dispatch(cli.command, verbose);
    match threads {
        Some(n) if n >= 1 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(body),
            Err(e) => {
                eprintln!("kdio: could not build thread pool: {e}");
                EXIT_USAGE
            }
        },
        Some(_) => {
            eprintln!("kdio: --threads must be at least 1");
            EXIT_USAGE
        }
        None => body(),
    }
}

fn dispatch(command: Command, verbose: u8) -> i32 {
    let t0 = std::time::Instant::now();
    let code = match command {
        Command::Verify(args) => cmd_verify(args),
        Command::Pair(args) => cmd_pair(args),
        Command::Cf(args) => cmd_cf(args),
        Command::Search(args) => cmd_search(args),
        Command::Replay(args) => cmd_replay(args),
        Command::Bounds(args) => cmd_bounds(args),
    };
    if verbose > 0 {
        eprintln!("kdio: finished in {:?} (exit {code})", t0.elapsed());
    }
    code
}

fn parse_biguint(raw: &str) -> Result<BigUint, String> {
    raw.parse()
        .map_err(|_| format!("not a nonnegative integer: {raw}"))
}

fn parse_k(raw: &str) -> Result<u32, String> {
    let k: u32 = raw.parse().map_err(|_| format!("not an integer: {raw}"))?;
    if k < 2 {
        return Err(format!("power index must be at least 2, got {k}"));
    }
    if k > 100_000 {
        return Err(format!("power index {k} is out of the supported range (max 100000)"));
    }
    Ok(k)
}

fn parse_tuple(raw: &str) -> Result<Vec<BigUint>, String> {
    raw.split(',')
        .map(|part| parse_biguint(part.trim()))
        .collect()
}

fn cmd_verify(args: VerifyArgs) -> i32 {
    match tuples::verify_tuple(&args.tuple, args.k) {
        Ok(TupleCheck::Verified(t)) => {
            let mut lines = String::new();
            lines.push_str(&format!(
                "valid k-th power Diophantine {}-tuple (k = {})\n",
                t.elements().len(),
                t.k()
            ));
            for i in 0..t.elements().len() {
                for j in i + 1..t.elements().len() {
                    lines.push_str(&format!(
                        "  {} * {} + 1 = {}^{}\n",
                        t.elements()[i],
                        t.elements()[j],
                        t.witness(i, j),
                        t.k()
                    ));
                }
            }
            print!("{lines}");
            EXIT_OK
        }
        Ok(TupleCheck::Failed { i, j }) => {
            println!(
                "not a k-th power Diophantine tuple at k = {}: {} * {} + 1 is not a perfect {}-th power",
                args.k, args.tuple[i], args.tuple[j], args.k
            );
            EXIT_NOT_CLOSED
        }
        Err(e) => {
            eprintln!("kdio verify: {e}");
            eprintln!("usage: kdio verify --k K --tuple x1,x2,...");
            EXIT_USAGE
        }
    }
}

fn cmd_pair(args: PairArgs) -> i32 {
    let (ak, b, r) = tuples::canonical_pair(args.a, args.k);
    println!("a^k = {ak}");
    println!("b   = {b}");
    println!("r   = {r}");
    println!("check: {ak} * {b} + 1 = {r}^{}", args.k);
    EXIT_OK
}

fn cmd_cf(args: CfArgs) -> i32 {
    let result = match (&args.terms, &args.max_p) {
        (Some(terms), None) => cf::expand(&args.n, args.k, *terms),
        (None, Some(max_p)) => {
            cf::expand_until(&args.n, args.k, DEFAULT_TERM_CAP, |_, p, _, _| p > max_p)
        }
        (None, None) => cf::expand(&args.n, args.k, 10),
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    };
    match result {
        Ok(exp) => {
            let quotients: Vec<String> = exp.quotients().iter().map(|a| a.to_string()).collect();
            println!(
                "{}^(1/{}) = [{}]",
                exp.radicand(),
                exp.index(),
                quotients.join(", ")
            );
            for (j, (p, q)) in exp.convergents().iter().enumerate() {
                println!("  p_{j}/q_{j} = {p}/{q}");
            }
            if let Some(j) = exp.stopped_at() {
                println!("stopped at j = {j}");
            }
            println!("certified at {} bits", exp.precision_bits());
            EXIT_OK
        }
        Err(e @ CfError::TermCapExceeded { .. }) => {
            eprintln!("kdio cf: {e}");
            EXIT_UNDECIDED
        }
        Err(e) => {
            eprintln!("kdio cf: {e}");
            eprintln!("usage: kdio cf --n N --k K [--terms T | --max-p P]");
            EXIT_USAGE
        }
    }
}

fn cmd_search(args: SearchArgs) -> i32 {
    let found = tuples::search_triples(args.k, &args.first_max, &args.c_max, args.power_form);
    if found.is_empty() {
        println!("no triples found");
    }
    for t in &found {
        let elems: Vec<String> = t.elements().iter().map(|e| e.to_string()).collect();
        let witnesses = format!(
            "{}, {}, {}",
            t.witness(0, 1),
            t.witness(0, 2),
            t.witness(1, 2)
        );
        println!("{{{}}}  witnesses: {witnesses}", elems.join(", "));
    }
    EXIT_OK
}

fn cmd_replay(args: ReplayArgs) -> i32 {
    let opts = K3Options {
        paranoid_odd_j: args.paranoid,
    };
    let report = match args.case {
        ReplayCase::K3 => elimination::replay_k3_with(&opts),
        ReplayCase::K4 => elimination::replay_k4(),
        ReplayCase::Primes => match primes_only_report(args.prime_cap) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("kdio replay: {e}");
                eprintln!("usage: kdio replay --case {{k3|k4|primes|all}} [--prime-cap N]");
                return EXIT_USAGE;
            }
        },
        ReplayCase::All => match elimination::full_replay(args.prime_cap) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("kdio replay: {e}");
                eprintln!("usage: kdio replay --case {{k3|k4|primes|all}} [--prime-cap N]");
                return EXIT_USAGE;
            }
        },
    };

    let rendered = match args.format {
        Format::Json => render_json(&report),
        Format::Csv => render_csv(&report),
        Format::Text => render_text(&report),
    };
    if let Some(path) = &args.out {
        if let Err(e) = std::fs::write(path, rendered.as_bytes()) {
            eprintln!("kdio replay: cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    print!("{rendered}");
    let _ = std::io::stdout().flush();

    let undecided = report.census_count("k3_undecided")
        + report.census_count("k4_undecided")
        + report.census_count("primes_undecided");
    if undecided > 0 {
        EXIT_UNDECIDED
    } else if report.closed {
        EXIT_OK
    } else {
        EXIT_NOT_CLOSED
    }
}

/// The prime sweep alone, packaged as a report.
fn primes_only_report(prime_cap: u64) -> Result<ReplayReport, elimination::ReplayError> {
    if prime_cap < 5 {
        return Err(elimination::ReplayError::PrimeCapTooSmall(prime_cap));
    }
    use rayon::prelude::*;
    let primes = kdio::arith::primes_in(5, prime_cap);
    let results: Vec<Option<bool>> = primes
        .par_iter()
        .map(|&p| kdio::bounds::prime_case_closed(p as u32).ok())
        .collect();
    let closed = results.iter().filter(|v| **v == Some(true)).count() as u64;
    let undecided = results.iter().filter(|v| v.is_none()).count() as u64;
    let mut report = ReplayReport::new("primes");
    report.census.insert("prime_cap".into(), prime_cap);
    report
        .census
        .insert("primes_checked".into(), primes.len() as u64);
    report.census.insert("primes_closed".into(), closed);
    report.census.insert("primes_undecided".into(), undecided);
    report.finalize(closed == primes.len() as u64 && undecided == 0);
    Ok(report)
}

fn render_json(report: &ReplayReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn render_csv(report: &ReplayReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "r", "a", "b", "verdict", "evidence"])
        .expect("csv header");
    for rec in &report.records {
        let evidence = rec
            .evidence
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            rec.k.to_string(),
            rec.r.to_string(),
            rec.a.as_ref().map(|v| v.to_string()).unwrap_or_default(),
            rec.b.as_ref().map(|v| v.to_string()).unwrap_or_default(),
            rec.verdict.to_string(),
            evidence,
        ])
        .expect("csv record");
    }
    String::from_utf8(w.into_inner().expect("csv buffer")).expect("csv is utf-8")
}

fn render_text(report: &ReplayReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("case: {}\n", report.case));
    s.push_str(&format!("closed: {}\n", report.closed));
    s.push_str("census:\n");
    for (k, v) in &report.census {
        s.push_str(&format!("  {k}: {v}\n"));
    }
    if !report.records.is_empty() {
        let mut histogram = std::collections::BTreeMap::new();
        for rec in &report.records {
            *histogram.entry(rec.verdict.as_str()).or_insert(0u64) += 1;
        }
        s.push_str("verdicts:\n");
        for (v, count) in histogram {
            s.push_str(&format!("  {v}: {count}\n"));
        }
    }
    s.push_str(&format!("tool_version: {}\n", report.tool_version));
    s.push_str(&format!("timestamp: {}\n", report.timestamp));
    s
}

/// Directed 30-digit decimal rendering of an interval endpoint; `lo` rounds
/// down and `hi` rounds up, so the printed bracket still encloses the value.
fn decimal_directed(v: &BigRational, round_up: bool) -> String {
    let digits = 30u32;
    let scale = BigUint::from(10u32).pow(digits);
    let scaled = v * BigRational::from_integer(scale.into());
    let int = if round_up {
        scaled.ceil()
    } else {
        scaled.floor()
    }
    .to_integer();
    let negative = int.is_negative();
    let mag = int.magnitude().to_string();
    let mag = format!("{:0>width$}", mag, width = digits as usize + 1);
    let split = mag.len() - digits as usize;
    let (whole, frac) = mag.split_at(split);
    let frac = frac.trim_end_matches('0');
    let rendered = if frac.is_empty() {
        whole.to_string()
    } else {
        format!("{whole}.{frac}")
    };
    if negative {
        format!("-{rendered}")
    } else {
        rendered
    }
}

fn interval_json(iv: &RationalInterval) -> serde_json::Value {
    serde_json::json!({
        "lo": decimal_directed(iv.lo(), false),
        "hi": decimal_directed(iv.hi(), true),
        "exact": iv.is_exact(),
    })
}

fn cmd_bounds(args: BoundsArgs) -> i32 {
    let big_n = BigUint::from(args.r).pow(args.k) - 1u32;
    let envelope = BoundEnvelope::evaluate(args.k, &big_n);
    match args.format {
        Format::Json => {
            let value = serde_json::json!({
                "n": envelope.n,
                "N": envelope.big_n.to_string(),
                "condition_holds": envelope.condition_holds,
                "mu": interval_json(&envelope.mu),
                "lambda": envelope.lambda.as_ref().map(interval_json),
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("envelope serializes")
            );
        }
        _ => {
            println!("n = {}, N = r^k - 1 = {}", envelope.n, envelope.big_n);
            println!("condition_holds: {}", envelope.condition_holds);
            println!(
                "mu: [{}, {}]{}",
                decimal_directed(envelope.mu.lo(), false),
                decimal_directed(envelope.mu.hi(), true),
                if envelope.mu.is_exact() {
                    " (exact)"
                } else {
                    ""
                }
            );
            match &envelope.lambda {
                Some(l) => println!(
                    "lambda: [{}, {}]",
                    decimal_directed(l.lo(), false),
                    decimal_directed(l.hi(), true)
                ),
                None => println!("lambda: not available (condition not certified)"),
            }
        }
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn decimal_rendering_is_directed() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let lo = decimal_directed(&third, false);
        let hi = decimal_directed(&third, true);
        assert!(lo.starts_with("0.333333333333333333333333333333"));
        assert!(hi.starts_with("0.333333333333333333333333333334"));
        let two = BigRational::from_integer(BigInt::from(2));
        assert_eq!(decimal_directed(&two, false), "2");
        assert_eq!(decimal_directed(&two, true), "2");
        let neg = BigRational::new(BigInt::from(-1), BigInt::from(8));
        assert_eq!(decimal_directed(&neg, false), "-0.125");
    }

    #[test]
    fn tuple_argument_parsing() {
        assert_eq!(
            parse_tuple("2, 171,25326").unwrap(),
            vec![
                BigUint::from(2u32),
                BigUint::from(171u32),
                BigUint::from(25326u32)
            ]
        );
        assert!(parse_tuple("2,x").is_err());
        assert!(parse_k("1").is_err());
    }
}
