//! Command-line front end: evaluation commands and the verification suites.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails or
//! a computation does not converge, 2 on usage errors and bad input.

pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use hilbk3::classical::j_qexpansion;
use hilbk3::fibrations::{classify_fibers, FiberLocation};
use hilbk3::forms::{moduli_from_forms, newton_invert, ModuliPoint, NewtonOptions};
use hilbk3::hypergeometric::HypergeomParams;
use hilbk3::theta::mueller_forms;
use hilbk3::{Error, UHPPair};
use hilbk3_numkernel::rug::Rational;
use hilbk3_numkernel::{ComplexValue, PrecisionPolicy};

use report::{write_csv, write_json, VerificationReport};
use suites::{run_suite, Context, Suite};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "hilbk3", version, about = "Hilbert modular functions for Q(sqrt 5) and the K3 family they uniformize")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Mantissa bits; defaults to HILBK3_PREC or 128.
    #[arg(long, global = true)]
    pub prec: Option<u32>,
    /// Seed for the sample points of numeric suites.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Include per-check runtimes, which makes reports non-reproducible.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Müller's forms and the moduli X, Y, Z at a point of ℍ×ℍ.
    Forms {
        #[command(subcommand)]
        cmd: FormsCmd,
    },
    /// Run verification suites.
    Verify {
        #[arg(value_enum, required = true)]
        suites: Vec<Suite>,
        /// Sample points per numeric family.
        #[arg(long, default_value_t = 5)]
        samples: usize,
    },
    /// Singular fibres of the K3 surface over a rational point.
    Fibers {
        #[command(subcommand)]
        cmd: FibersCmd,
    },
    /// Solve (X, Y)(z₁, z₂) = (X, Y) by Newton from a guess.
    Invert {
        #[arg(long = "X", allow_hyphen_values = true)]
        x: String,
        #[arg(long = "Y", allow_hyphen_values = true)]
        y: String,
        /// `z1,z2` as complex literals.
        #[arg(long, allow_hyphen_values = true)]
        guess: String,
    },
    /// Exact series coefficients.
    Series {
        #[command(subcommand)]
        cmd: SeriesCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum FormsCmd {
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        z1: String,
        #[arg(long, allow_hyphen_values = true)]
        z2: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum FibersCmd {
    Classify {
        #[arg(long = "X", allow_hyphen_values = true)]
        x: String,
        #[arg(long = "Y", allow_hyphen_values = true)]
        y: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum SeriesCmd {
    /// `j(q) = q⁻¹ + 744 + 196884q + …`
    Jfunction {
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// `pFq(a; b; t)`, by default `₂F₁(1/12, 5/12; 1; t)`.
    Hypergeom {
        #[arg(long, default_value_t = 10)]
        order: usize,
        #[arg(long, default_value = "1/12,5/12")]
        upper: String,
        #[arg(long, default_value = "1")]
        lower: String,
    },
}

/// A failure mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidPoint(_) | Error::OutsideDomain(_) => Failure::Usage(e.to_string()),
            other => Failure::Compute(other.to_string()),
        }
    }
}

/// JSON document plus a flat table for CSV.
struct Output {
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

fn parse_rational(s: &str) -> Result<Rational, Failure> {
    s.trim().parse::<Rational>().map_err(|_| Failure::Usage(format!("{s:?} is not a rational p/q")))
}

fn parse_complex(s: &str, prec: u32) -> Result<ComplexValue, Failure> {
    ComplexValue::parse(s, prec).map_err(|e| Failure::Usage(e.to_string()))
}

fn digits(prec: u32) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2) as usize
}

fn cjson(z: &ComplexValue, d: usize) -> Value {
    json!({ "re": z.re().to_string_radix(10, Some(d)), "im": z.im().to_string_radix(10, Some(d)) })
}

fn forms_eval(z1: &str, z2: &str, policy: &PrecisionPolicy) -> Result<Output, Failure> {
    let b = policy.bits();
    let p = UHPPair::new(parse_complex(z1, b)?, parse_complex(z2, b)?)?;
    let f = mueller_forms(&p, policy);
    let m = moduli_from_forms(&f, policy.verify_tol())?;
    let d = digits(b);
    let fields = [("g2", &f.g2), ("s5", &f.s5), ("s6", &f.s6), ("s10", &f.s10), ("s15", &f.s15), ("X", &m.x), ("Y", &m.y), ("Z", &m.z)];
    let mut obj = serde_json::Map::new();
    let mut rows = Vec::new();
    for (k, v) in fields {
        obj.insert(k.to_string(), cjson(v, d));
        rows.push(vec![k.to_string(), v.re().to_string_radix(10, Some(d)), v.im().to_string_radix(10, Some(d))]);
    }
    Ok(Output { json: json!({ "z1": cjson(&p.z1, d), "z2": cjson(&p.z2, d), "values": obj }), header: vec!["field", "re", "im"], rows })
}

fn fibers_classify(x: &str, y: &str) -> Result<Output, Failure> {
    let (x, y) = (parse_rational(x)?, parse_rational(y)?);
    let c = classify_fibers(&x, &y)?;
    let mut rows = Vec::new();
    let fibers: Vec<Value> = c
        .fibers
        .iter()
        .map(|f| {
            let loc = match &f.location {
                FiberLocation::Zero => "y=0".to_string(),
                FiberLocation::Infinity => "y=inf".to_string(),
                FiberLocation::Roots { factor } => format!("roots of {factor}"),
            };
            let (a, b, d) = f.valuations;
            rows.push(vec![loc.clone(), f.kind.to_string(), f.count.to_string(), a.to_string(), b.to_string(), d.to_string()]);
            json!({ "location": loc, "kind": f.kind.to_string(), "count": f.count, "euler": f.kind.euler() * f.count,
                    "valuations": [a, b, d], "reductions": f.reductions })
        })
        .collect();
    Ok(Output {
        json: json!({ "X": x.to_string(), "Y": y.to_string(), "summary": c.summary(), "euler_total": c.euler_total,
                      "degenerate": c.degenerate, "k3": c.is_k3(), "fibers": fibers }),
        header: vec!["location", "kind", "count", "ord_g2", "ord_g3", "ord_disc"],
        rows,
    })
}

fn invert(x: &str, y: &str, guess: &str, policy: &PrecisionPolicy) -> Result<Output, Failure> {
    let b = policy.bits();
    let (g1, g2) = guess.split_once(',').ok_or_else(|| Failure::Usage("--guess takes z1,z2".into()))?;
    let guess = UHPPair::new(parse_complex(g1, b)?, parse_complex(g2, b)?)?;
    let target = ModuliPoint::new(parse_complex(x, b)?, parse_complex(y, b)?, policy.verify_tol());
    let r = newton_invert(&target, &guess, policy, &NewtonOptions::default())?;
    let d = digits(b);
    Ok(Output {
        json: json!({ "z1": cjson(&r.z.z1, d), "z2": cjson(&r.z.z2, d), "residual": r.residual, "iterations": r.iterations,
                      "in_frak_x": target.in_frak_x }),
        header: vec!["field", "value"],
        rows: vec![
            vec!["z1".into(), r.z.z1.to_string_digits(d)],
            vec!["z2".into(), r.z.z2.to_string_digits(d)],
            vec!["residual".into(), format!("{:e}", r.residual)],
            vec!["iterations".into(), r.iterations.to_string()],
        ],
    })
}

fn series_output(name: &str, first_exponent: i64, coeffs: &[Rational]) -> Output {
    let rows: Vec<Vec<String>> =
        coeffs.iter().enumerate().map(|(k, c)| vec![(first_exponent + k as i64).to_string(), c.to_string()]).collect();
    let terms: Vec<Value> = rows.iter().map(|r| json!({ "n": r[0].parse::<i64>().unwrap(), "coefficient": r[1] })).collect();
    Output { json: json!({ "series": name, "terms": terms }), header: vec!["n", "coefficient"], rows }
}

fn series(cmd: &SeriesCmd) -> Result<Output, Failure> {
    match cmd {
        SeriesCmd::Jfunction { order } => {
            if *order == 0 {
                return Err(Failure::Usage("--order must be positive".into()));
            }
            let e = j_qexpansion(*order);
            Ok(series_output("jfunction", e.leading_exponent, &e.coeffs))
        }
        SeriesCmd::Hypergeom { order, upper, lower } => {
            let list = |s: &str| -> Result<Vec<Rational>, Failure> {
                s.split(',').filter(|t| !t.trim().is_empty()).map(parse_rational).collect()
            };
            let h = HypergeomParams::new(list(upper)?, list(lower)?)?;
            let s = h.series(*order);
            Ok(series_output("hypergeom", 0, s.coeffs()))
        }
    }
}

fn run_verify(suites: &[Suite], ctx: &Context) -> Vec<VerificationReport> {
    let mut list: Vec<Suite> = if suites.contains(&Suite::All) { Suite::EACH.to_vec() } else { suites.to_vec() };
    list.dedup();
    // Suites are independent; results come back in request order.
    list.par_iter().map(|&s| run_suite(s, ctx)).collect()
}

fn write_output(out: &mut dyn Write, o: &Output, format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &o.json)?;
            writeln!(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&o.header)?;
            for r in &o.rows {
                w.write_record(r)?;
            }
            w.flush()
        }
    }
}

/// Parses `args`, runs the command, writes results to `out` and errors to
/// `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let policy = match cli.prec.map(PrecisionPolicy::new).unwrap_or_else(PrecisionPolicy::from_env) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let result = match &cli.command {
        Command::Verify { suites, samples } => {
            let ctx = Context { policy, seed: cli.seed, timings: cli.timings, samples: (*samples).max(1) };
            let reports = run_verify(suites, &ctx);
            let io = match cli.format {
                Format::Json => write_json(out, &reports).map_err(|e| e.to_string()),
                Format::Csv => write_csv(out, &reports, cli.timings).map_err(|e| e.to_string()),
            };
            if let Err(e) = io {
                let _ = writeln!(err, "error: {e}");
                return 1;
            }
            return if reports.iter().all(|r| r.overall_pass) { 0 } else { 1 };
        }
        Command::Forms { cmd: FormsCmd::Eval { z1, z2 } } => forms_eval(z1, z2, &policy),
        Command::Fibers { cmd: FibersCmd::Classify { x, y } } => fibers_classify(x, y),
        Command::Invert { x, y, guess } => invert(x, y, guess, &policy),
        Command::Series { cmd } => series(cmd),
    };
    match result {
        Ok(o) => match write_output(out, &o, cli.format) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                1
            }
        },
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Compute(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}
