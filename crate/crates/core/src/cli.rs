//! Command-line front end. Every command prints one JSON report (or a plain
//! table with `--format table`); validation errors print a JSON error object
//! and exit with status 2.

use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::capacity::{self, CapacityQuery, FirstCap, Target};
use crate::codec::{self, parse_rational, ChannelCaps, CodeFamily, SwitchPair};
use crate::coloring;
use crate::error::{Error, Result};
use crate::nfc::{self, TargetFunction};
use crate::reproduce;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CHECKS: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "zefc",
    version,
    about = "Zero-error distributed compression of the binary arithmetic sum"
)]
pub struct Cli {
    /// Worker threads for parallel searches (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for the random sampling modes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Report elapsed_ms as 0 so output is byte-identical across runs.
    #[arg(long, global = true)]
    no_timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Args, Debug, Clone)]
struct CapsArgs {
    /// First channel capacity (integer, `p/q` or decimal).
    #[arg(long)]
    c1: String,
    /// Second channel capacity.
    #[arg(long)]
    c2: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form compression capacity of a model.
    Capacity {
        #[arg(long = "case")]
        case: String,
        #[command(flatten)]
        caps: CapsArgs,
        /// Target function: `sum` or `identity`.
        #[arg(long, default_value = "sum")]
        target: String,
        /// Block lengths for an achievability table, e.g. `1,2,4,...,128`.
        #[arg(long)]
        sandwich: Option<String>,
    },
    /// Build the explicit code for a model and report its rate.
    Construct {
        #[arg(long = "case")]
        case: String,
        #[command(flatten)]
        caps: CapsArgs,
        #[arg(long)]
        k: usize,
        /// Write the code tables as JSON to this path.
        #[arg(long)]
        emit: Option<std::path::PathBuf>,
    },
    /// Exhaustive lemma checks.
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Minimum sumset size `Q_k(l)`.
    Qk {
        #[arg(long)]
        k: usize,
        /// Single subset size; all sizes if omitted.
        #[arg(long)]
        l: Option<u64>,
        /// Bracket the value instead of enumerating subsets.
        #[arg(long)]
        bracket: bool,
    },
    /// Min-max partition chromatic numbers `χ_m`.
    Chim {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Minimum `|A^k + {y1, y2}|` over distinct ternary pairs.
    GammaPair {
        #[arg(long)]
        k: usize,
    },
    /// The network `N(C1, C2)` and its cut-set bound.
    Nfc {
        #[command(flatten)]
        caps: CapsArgs,
        /// List every cut set with its source classification.
        #[arg(long)]
        list_cuts: bool,
        /// Compare the capacity with the cut-set bound.
        #[arg(long)]
        report: bool,
    },
    /// Run the full acceptance suite.
    Reproduce,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Superadditivity of the aitch function.
    Aitch {
        #[arg(long, default_value_t = 256)]
        lmax: u64,
    },
    /// The aitch lower bound on sumset sizes.
    SumsetBound {
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        /// Random subsets per block length above the exhaustive range.
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
}

/// Round every float to 12 decimal places for stable output.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let r: f64 = format!("{x:.12}").parse().expect("formatted float");
            *v = serde_json::Number::from_f64(r)
                .map(Value::Number)
                .unwrap_or(Value::Null);
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable report")
}

/// Command-specific part of a report.
struct Report {
    command: &'static str,
    query: Value,
    value: Value,
    extra: Vec<(&'static str, Value)>,
    witness: Value,
    exact: bool,
    /// False when a check inside the command failed.
    passed: bool,
}

impl Report {
    fn new(command: &'static str, query: Value, value: Value, witness: Value, exact: bool) -> Self {
        Self {
            command,
            query,
            value,
            extra: Vec::new(),
            witness,
            exact,
            passed: true,
        }
    }

    fn with(mut self, key: &'static str, v: Value) -> Self {
        self.extra.push((key, v));
        self
    }

    fn into_json(self, elapsed_ms: u64) -> Value {
        let mut m = Map::new();
        m.insert("tool".into(), json!("zefc"));
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert("command".into(), json!(self.command));
        m.insert("query".into(), self.query);
        m.insert("value".into(), self.value);
        for (k, v) in self.extra {
            m.insert(k.into(), v);
        }
        m.insert("witness".into(), self.witness);
        m.insert("exact".into(), json!(self.exact));
        m.insert("elapsed_ms".into(), json!(elapsed_ms));
        let mut v = Value::Object(m);
        round_floats(&mut v);
        v
    }
}

/// Expand `a,b,...,z`: the `...` continues doubling when the two values
/// before it have ratio 2, else continues their common difference.
fn parse_k_list(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parse {
        what: "block length list",
        input: s.to_string(),
    };
    let mut out: Vec<usize> = Vec::new();
    let mut pending = false;
    for part in s.split(',').map(str::trim) {
        if part == "..." {
            if out.len() < 2 || pending {
                return Err(bad());
            }
            pending = true;
            continue;
        }
        let v: usize = part.parse().map_err(|_| bad())?;
        if pending {
            let (a, b) = (out[out.len() - 2], out[out.len() - 1]);
            let step: Box<dyn Fn(usize) -> usize> = if a > 0 && b == 2 * a {
                Box::new(|x| x * 2)
            } else if b > a {
                Box::new(move |x| x + (b - a))
            } else {
                return Err(bad());
            };
            let mut next = step(b);
            while next < v {
                out.push(next);
                next = step(next);
            }
            pending = false;
        }
        out.push(v);
    }
    if pending || out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn caps_query(args: &CapsArgs) -> Value {
    json!({"c1": args.c1, "c2": args.c2})
}

fn run_capacity(case: &str, caps: &CapsArgs, target: &str, sandwich: Option<&str>) -> Result<Report> {
    let q = CapacityQuery {
        switches: case.parse()?,
        c1: caps.c1.parse::<FirstCap>()?,
        c2: parse_rational(&caps.c2)?,
        target: target.parse::<Target>()?,
    };
    let r = capacity::capacity(&q)?;
    let witness = match sandwich {
        Some(list) => to_value(&capacity::sandwich_report(&q, &parse_k_list(list)?)?.rows),
        None => Value::Null,
    };
    let query = json!({"case": case, "c1": caps.c1, "c2": caps.c2, "target": target, "sandwich": sandwich});
    Ok(Report::new("capacity", query, json!(r.value), witness, true)
        .with("formula", json!(r.symbolic))
        .with("formula_tag", to_value(&r.formula))
        .with("model", json!(r.model)))
}

fn run_construct(case: &str, caps_args: &CapsArgs, k: usize, emit: Option<&std::path::Path>) -> Result<Report> {
    let switches: SwitchPair = case.parse()?;
    let caps = ChannelCaps::parse(&caps_args.c1, &caps_args.c2)?;
    let switches = if caps.swapped() { switches.mirrored() } else { switches };
    let code = match switches {
        SwitchPair::S11 => codec::build_packing_code_11(k, &caps)?,
        SwitchPair::S01 => codec::build_split_code_01(k, &caps)?,
        _ => codec::build_identity_code(k)?,
    };
    let acct = code.rate_account(&caps)?;
    let admissible = if k <= codec::MAX_TABLE_K {
        let table = code.tabulate()?.lift(switches)?;
        let ok = codec::check_admissible(&table)?.is_admissible();
        if let Some(path) = emit {
            let text = serde_json::to_string_pretty(&table.to_json()).expect("code json");
            std::fs::write(path, text + "\n")
                .map_err(|e| Error::Refused(format!("cannot write {}: {e}", path.display())))?;
        }
        Value::Bool(ok)
    } else if emit.is_some() {
        return Err(Error::Refused(format!(
            "code tables can only be emitted for k<={}",
            codec::MAX_TABLE_K
        )));
    } else {
        Value::Null
    };
    let family = match &code.family {
        CodeFamily::Identity => json!({"name": "identity"}),
        CodeFamily::Packing11 { n, modulus } => json!({"name": "packing", "n": n, "modulus": modulus.to_string()}),
        CodeFamily::Split01 { k1 } => json!({"name": "split", "k1": k1}),
    };
    let query = json!({"case": case, "c1": caps_args.c1, "c2": caps_args.c2, "k": k});
    let mut report = Report::new("construct", query, json!(acct.rate_f64()), family, true)
        .with("model", json!(format!("({switches};{},{};sum)", caps.c1(), caps.c2())))
        .with("rate", json!(format!("{}/{}", acct.rate.numer(), acct.rate.denom())))
        .with("n1", json!(acct.n1))
        .with("n2", json!(acct.n2))
        .with("n", json!(acct.n))
        .with("images", json!([code.image1.to_string(), code.image2.to_string()]))
        .with("admissible", admissible.clone());
    report.passed = admissible != Value::Bool(false);
    Ok(report)
}

fn run_qk(k: usize, l: Option<u64>, bracket: bool) -> Result<Report> {
    let query = json!({"k": k, "l": l, "bracket": bracket});
    let results = match (bracket, l) {
        (true, Some(l)) => vec![coloring::q_k_bracket(k, l)?],
        (true, None) => {
            if k > coloring::MAX_BRACKET_QK {
                return Err(Error::InvalidBlockLength(k));
            }
            (0..=1u64 << k)
                .map(|l| coloring::q_k_bracket(k, l))
                .collect::<Result<_>>()?
        }
        (false, Some(l)) => vec![coloring::q_k(k, l)?],
        (false, None) => coloring::q_k_table(k)?,
    };
    let exact = results.iter().all(|r| r.exact);
    let value = match (l, &results[..]) {
        (Some(_), [r]) if r.exact => json!(r.lower),
        (Some(_), [r]) => json!({"lower": r.lower, "upper": r.upper}),
        _ => Value::Array(
            results
                .iter()
                .map(|r| json!({"l": r.l, "lower": r.lower, "upper": r.upper, "exact": r.exact}))
                .collect(),
        ),
    };
    let witness = match (l, &results[..]) {
        (Some(_), [r]) => to_value(&r.witness),
        _ => Value::Array(results.iter().map(|r| to_value(&r.witness)).collect()),
    };
    Ok(Report::new("qk", query, value, witness, exact))
}

fn run_chim(k: usize, m: Option<usize>) -> Result<Report> {
    let query = json!({"k": k, "m": m});
    Ok(match m {
        Some(m) => {
            let e = coloring::chi_m(k, m)?;
            Report::new("chim", query, json!(e.value), to_value(&e.witness), true)
        }
        None => {
            let t = coloring::chi_m_table(k)?;
            let values = t.entries.iter().map(|e| json!({"m": e.m, "value": e.value})).collect();
            let witness = t.entries.iter().map(|e| to_value(&e.witness)).collect();
            Report::new("chim", query, Value::Array(values), Value::Array(witness), true)
        }
    })
}

fn run_nfc(caps_args: &CapsArgs, list_cuts: bool, report: bool) -> Result<Report> {
    let caps = ChannelCaps::parse(&caps_args.c1, &caps_args.c2)?;
    let net = nfc::build_network(&caps)?;
    let f = TargetFunction::binary_sum(2);
    let bound = nfc::guang_bound(&net, &f)?;
    let mut query = caps_query(caps_args);
    query["list_cuts"] = json!(list_cuts);
    query["report"] = json!(report);
    let source_names = |s: nfc::SourceSet| -> Vec<&str> {
        ["sigma1", "sigma2"]
            .into_iter()
            .enumerate()
            .filter(|(i, _)| s >> i & 1 == 1)
            .map(|(_, n)| n)
            .collect()
    };
    let mut out = Report::new("nfc", query, json!(bound.value), json!(bound.witness), true)
        .with("n_cf", json!(bound.n_cf))
        .with("bound_formula", json!(nfc::guang_closed_form(&caps)))
        .with("network", net.to_json());
    if list_cuts {
        let cuts = nfc::enumerate_cuts(&net)?
            .into_iter()
            .map(|c| {
                let (n, p) = nfc::n_cf(&net, &c, &f)?;
                Ok(json!({
                    "cut": net.edge_names(c.cut),
                    "i": source_names(c.i),
                    "j": source_names(c.j),
                    "k": source_names(c.k),
                    "n_cf": n,
                    "partition": p.blocks.iter().map(|b| net.edge_names(b.cut)).collect::<Vec<_>>(),
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        out = out.with("cuts", Value::Array(cuts));
    }
    if report {
        let r = nfc::nontightness_report(&caps)?;
        out.passed = r.bound_agrees && r.gap_matches_caps;
        out = out.with("report", to_value(&r));
    }
    Ok(out)
}

fn run_reproduce() -> Report {
    let checks = reproduce::run_all();
    let passed = checks.iter().all(|c| c.passed);
    let summary = json!({
        "passed": checks.iter().filter(|c| c.passed).count(),
        "total": checks.len(),
    });
    let mut r = Report::new("reproduce", json!({}), json!(passed), Value::Null, true)
        .with("summary", summary)
        .with("checks", to_value(&checks));
    r.passed = passed;
    r
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Capacity {
            case,
            caps,
            target,
            sandwich,
        } => run_capacity(case, caps, target, sandwich.as_deref()),
        Command::Construct { case, caps, k, emit } => run_construct(case, caps, *k, emit.as_deref()),
        Command::Verify { what } => match what {
            VerifyCommand::Aitch { lmax } => {
                let r = coloring::verify_aitch_superadditivity(*lmax)?;
                let mut rep = Report::new(
                    "verify-aitch",
                    json!({"lmax": lmax}),
                    json!(r.holds()),
                    to_value(&r.probe_violation),
                    true,
                )
                .with("report", to_value(&r));
                rep.passed = r.holds();
                Ok(rep)
            }
            VerifyCommand::SumsetBound { kmax, samples } => {
                let r = coloring::verify_sumset_lower_bound(*kmax, *samples, cli.seed)?;
                let exact = r.levels.iter().all(|l| l.exhaustive);
                let mut rep = Report::new(
                    "verify-sumset-bound",
                    json!({"kmax": kmax, "samples": samples, "seed": cli.seed}),
                    json!(r.holds()),
                    Value::Array(r.levels.iter().map(|l| to_value(&l.violations)).collect()),
                    exact,
                )
                .with("report", to_value(&r));
                rep.passed = r.holds();
                Ok(rep)
            }
        },
        Command::Qk { k, l, bracket } => run_qk(*k, *l, *bracket),
        Command::Chim { k, m } => run_chim(*k, *m),
        Command::GammaPair { k } => {
            let r = coloring::mixed_min_pair_sumset(*k)?;
            Ok(Report::new(
                "gamma-pair",
                json!({"k": k}),
                json!(r.value),
                json!(r.witness),
                true,
            ))
        }
        Command::Nfc {
            caps,
            list_cuts,
            report,
        } => run_nfc(caps, *list_cuts, *report),
        Command::Reproduce => Ok(run_reproduce()),
    }
}

fn error_json(kind: &str, message: &str) -> Value {
    json!({"error": {"kind": kind, "message": message}})
}

fn render_scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Plain-text rendering: scalars as `key: value`, arrays of objects as
/// aligned tables.
fn render_table(v: &Value) -> String {
    let mut out = String::new();
    let Value::Object(m) = v else {
        return render_scalar(v) + "\n";
    };
    for (key, val) in m {
        match val {
            Value::Array(rows) if !rows.is_empty() && rows.iter().all(Value::is_object) => {
                out.push_str(&format!("{key}:\n"));
                let headers: Vec<&String> = rows[0].as_object().expect("object").keys().collect();
                let cells: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| headers.iter().map(|h| render_scalar(&r[h.as_str()])).collect())
                    .collect();
                let widths: Vec<usize> = headers
                    .iter()
                    .enumerate()
                    .map(|(i, h)| cells.iter().map(|c| c[i].len()).chain([h.len()]).max().unwrap_or(0))
                    .collect();
                let line = |items: Vec<String>| {
                    items
                        .iter()
                        .zip(&widths)
                        .map(|(s, w)| format!("{s:>w$}"))
                        .collect::<Vec<_>>()
                        .join("  ")
                };
                out.push_str(&format!(
                    "  {}\n",
                    line(headers.iter().map(|h| h.to_string()).collect())
                ));
                for c in cells {
                    out.push_str(&format!("  {}\n", line(c)));
                }
            }
            _ => out.push_str(&format!("{key}: {}\n", render_scalar(val))),
        }
    }
    out
}

/// Parse arguments, run the command and return the exit code with the text
/// to print.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (EXIT_OK, e.to_string()),
                _ => {
                    let msg = e
                        .to_string()
                        .lines()
                        .next()
                        .unwrap_or_default()
                        .trim_start_matches("error: ")
                        .to_string();
                    (EXIT_INVALID, error_json("usage", &msg).to_string() + "\n")
                }
            };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return (
                EXIT_INVALID,
                error_json("usage", "--threads must be positive").to_string() + "\n",
            );
        }
        // A global pool can only be installed once per process; later calls keep the first.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let start = Instant::now();
    match dispatch(&cli) {
        Ok(report) => {
            let elapsed = if cli.no_timing {
                0
            } else {
                start.elapsed().as_millis() as u64
            };
            let code = if report.passed { EXIT_OK } else { EXIT_FAILED_CHECKS };
            let v = report.into_json(elapsed);
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&v).expect("json") + "\n",
                Format::Table => render_table(&v),
            };
            (code, text)
        }
        Err(e) => (EXIT_INVALID, error_json(e.kind(), &e.to_string()).to_string() + "\n"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_lists() {
        assert_eq!(parse_k_list("1,2,4,...,32").unwrap(), vec![1, 2, 4, 8, 16, 32]);
        assert_eq!(parse_k_list("3,5,...,11").unwrap(), vec![3, 5, 7, 9, 11]);
        assert_eq!(parse_k_list("7").unwrap(), vec![7]);
        assert!(parse_k_list("1,...").is_err());
        assert!(parse_k_list("x").is_err());
    }

    #[test]
    fn floats_are_rounded() {
        let mut v = json!({"a": [1.0f64 / 3.0], "b": 2});
        round_floats(&mut v);
        assert_eq!(v.to_string(), r#"{"a":[0.333333333333],"b":2}"#);
    }

    #[test]
    fn capacity_headline() {
        let (code, out) = run(["zefc", "capacity", "--case", "01", "--c1", "2", "--c2", "1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"], json!(1.630929753571));
        assert_eq!(v["formula"], json!("log3(6)"));
    }

    #[test]
    fn refusal_is_machine_readable() {
        let (code, out) = run(["zefc", "qk", "--k", "9"]);
        assert_eq!(code, 2);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["error"]["kind"], json!("refused"));
        assert_eq!(
            v["error"]["message"],
            json!("exact mode limited to k<=4; use --bracket")
        );
        let (code, out) = run(["zefc", "qk", "--k", "2", "--bogus"]);
        assert_eq!(code, 2);
        assert!(out.contains("\"usage\""));
    }
}
