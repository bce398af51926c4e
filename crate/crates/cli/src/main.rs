mod input;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use dimgroup::corpus;
use dimgroup::decide::{cc_set, decide_pair, verify_pair, Config, Mode, Verdict};
use dimgroup::invariants::{analyze, default_precision, prim_set};
use dimgroup::padic::eventual_row_space;
use dimgroup::Error;
use num_bigint::BigInt;
use serde_json::{json, Value};

use input::ParseError;

#[derive(Parser)]
#[command(name = "dimgroup", version, about = "Invariants and equivalence of dimension groups of integer matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Ordered,
    Unordered,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Ordered => Mode::Ordered,
            ModeArg::Unordered => Mode::Unordered,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExpectArg {
    Equivalent,
    NotEquivalent,
}

#[derive(clap::Args)]
struct Bounds {
    /// Height bound for witness search.
    #[arg(long)]
    height: Option<u32>,
    /// p-adic precision for every prime.
    #[arg(long)]
    precision: Option<u32>,
    /// Exponent cap for the diagonal search in the rational case.
    #[arg(long)]
    exp_bound: Option<u32>,
}

impl Bounds {
    fn apply(&self, mut cfg: Config) -> Config {
        if let Some(h) = self.height {
            cfg.height = h;
        }
        if self.precision.is_some() {
            cfg.precision = self.precision;
        }
        if self.exp_bound.is_some() {
            cfg.exp_bound = self.exp_bound;
        }
        cfg
    }
}

#[derive(Subcommand)]
enum Command {
    /// Report the invariants of one matrix.
    Analyze {
        /// Matrix file ("N M" header then rows, or a JSON array of arrays).
        a: String,
        /// Also report the eventual row space at this prime.
        #[arg(long)]
        prime: Option<BigInt>,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Decide whether two matrices have isomorphic dimension groups.
    Decide {
        a: String,
        b: String,
        #[arg(long, value_enum, default_value = "ordered")]
        mode: ModeArg,
        #[command(flatten)]
        bounds: Bounds,
        /// Exit 1 unless the verdict matches.
        #[arg(long, value_enum)]
        expect: Option<ExpectArg>,
        /// Include wall-clock time in the output.
        #[arg(long)]
        timing: bool,
    },
    /// Check a candidate isomorphism J from G(A) to G(B).
    Verify {
        a: String,
        b: String,
        /// Rational entries allowed, e.g. "3/2".
        j: String,
        #[arg(long, value_enum, default_value = "ordered")]
        mode: ModeArg,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// List residues mod m1 of matrices over Z[1/m2] with determinant f up to units.
    Cc {
        #[arg(long)]
        m1: BigInt,
        #[arg(long)]
        m2: BigInt,
        #[arg(long)]
        f: BigInt,
        #[arg(long)]
        n: usize,
    },
    /// Run the built-in regression pairs.
    Corpus {
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Parse(String),
    Precondition(String),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Precondition(e.to_string())
    }
}

/// Stdout payload and exit code.
type Outcome = (String, u8);

fn run(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Analyze { a, prime, precision } => {
            let a = input::read_int_matrix(&a)?;
            let mut report = output::report(&analyze(&a, precision)?);
            if let Some(p) = prime {
                let det = a.det();
                if det == BigInt::from(0) || !prim_set(&det)?.contains(&p) {
                    return Err(Failure::Precondition(format!("{} is not a prime divisor of det A", p)));
                }
                let m = precision.unwrap_or_else(|| default_precision(&p, &det));
                report["row_space"] = output::row_module(&eventual_row_space(&a, &p, m)?);
            }
            Ok((output::render(&report), 0))
        }
        Command::Decide { a, b, mode, bounds, expect, timing } => {
            let cfg = bounds.apply(input::load_config()?);
            let (a, b) = (input::read_int_matrix(&a)?, input::read_int_matrix(&b)?);
            let start = Instant::now();
            let v = decide_pair(&a, &b, mode.into(), &cfg)?;
            let mut out = output::verdict(&v, mode.into(), &cfg);
            if timing {
                out["timing_ms"] = json!(start.elapsed().as_millis() as u64);
            }
            let code = match expect {
                Some(ExpectArg::Equivalent) if !v.is_equivalent() => 1,
                Some(ExpectArg::NotEquivalent) if !v.is_not_equivalent() => 1,
                _ => 0,
            };
            Ok((output::render(&out), code))
        }
        Command::Verify { a, b, j, mode, bounds } => {
            let cfg = bounds.apply(input::load_config()?);
            let (a, b) = (input::read_int_matrix(&a)?, input::read_int_matrix(&b)?);
            let j = input::read_rat_matrix(&j)?;
            let o = verify_pair(&a, &b, &j, mode.into(), &cfg)?;
            Ok((output::render(&output::verification(&o, mode.into(), &cfg)), 0))
        }
        Command::Cc { m1, m2, f, n } => {
            let set = cc_set(&m1, &m2, &f, n)?;
            let residues: Vec<Value> = set
                .iter()
                .map(|x| Value::Array(x.chunks(n).map(|r| json!(r.iter().map(u64::to_string).collect::<Vec<_>>())).collect()))
                .collect();
            let out = json!({
                "schema_version": output::SCHEMA_VERSION,
                "m1": m1.to_string(),
                "m2": m2.to_string(),
                "f": f.to_string(),
                "n": n,
                "count": residues.len(),
                "residues": residues,
            });
            Ok((output::render(&out), 0))
        }
        Command::Corpus { json } => {
            let cfg = input::load_config()?;
            let examples = corpus::examples();
            // one thread per pair; results stay in corpus order
            let verdicts: Vec<_> = std::thread::scope(|scope| {
                let handles: Vec<_> =
                    examples.iter().map(|e| scope.spawn(|| decide_pair(&e.a, &e.b, e.mode, &cfg))).collect();
                handles.into_iter().map(|h| h.join().expect("corpus worker panicked")).collect()
            });
            let mut failed = 0;
            let mut rows = Vec::new();
            let mut table = format!("{:<32} {:<10} {:<26} {:<15} {}\n", "example", "mode", "expected", "verdict", "result");
            for (e, v) in examples.iter().zip(&verdicts) {
                let (name, pass) = match v {
                    Ok(v) => (v.name().to_string(), e.expect.accepts(v)),
                    Err(err) => (format!("error: {}", err), false),
                };
                if !pass {
                    failed += 1;
                    eprintln!("{} failed: expected {} ({})", e.name, e.expect.name(), e.fact);
                }
                table.push_str(&format!(
                    "{:<32} {:<10} {:<26} {:<15} {}\n",
                    e.name,
                    e.mode.to_string(),
                    e.expect.name(),
                    name,
                    if pass { "pass" } else { "FAIL" }
                ));
                let detail = match v {
                    Ok(Verdict::NotEquivalent(c)) => json!(c.invariant),
                    Ok(Verdict::Equivalent(w)) => json!(w.source),
                    _ => Value::Null,
                };
                rows.push(json!({
                    "example": e.name,
                    "mode": e.mode.to_string(),
                    "expected": e.expect.name(),
                    "verdict": name,
                    "detail": detail,
                    "fact": e.fact,
                    "pass": pass,
                }));
            }
            table.push_str(&format!("{} of {} passed\n", examples.len() - failed, examples.len()));
            let text = if json {
                output::render(&json!({ "schema_version": output::SCHEMA_VERSION, "examples": rows }))
            } else {
                table
            };
            Ok((text, u8::from(failed > 0)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, code)) => {
            print!("{}", text);
            ExitCode::from(code)
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
        Err(Failure::Precondition(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(3)
        }
    }
}
