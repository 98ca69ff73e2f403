use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chordlog::apoly::{AValues, APolynomial};
use chordlog::asymptotics::convergence_report;
use chordlog::diagrams::enumerate::{census, enumerate_decorated};
use chordlog::diagrams::DiagramType;
use chordlog::expansions::{green_series, hk_bruteforce, hk_closed_form, hk_series, p_series};
use chordlog::rational;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const SCHEMA: &str = "chordlog/1";
/// Largest diagram size the brute-force paths are allowed to reach.
const MAX_SIZE: usize = 9;
/// Largest size for the decorated type census.
const MAX_TYPE_CENSUS: usize = 8;

#[derive(Parser)]
#[command(name = "chordlog", version, about = "Next-to^k leading-log expansions from decorated chord diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for the parallel reductions.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Latex,
    Json,
    Csv,
}

#[derive(Args, Clone, Copy)]
struct Order {
    /// Highest power of z (or x) computed.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u16).range(1..=64))]
    order: u16,
}

#[derive(Args, Clone, Copy)]
struct Scale {
    /// Exponent s of the insertion place.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=16))]
    s: u32,
}

#[derive(Args, Clone, Copy)]
struct ScaleK {
    #[command(flatten)]
    scale: Scale,
    /// Next-to^k leading-log order.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=8))]
    k: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Closed form of H_k.
    Expand(ScaleK),
    /// Coefficients [z^n] H_k, symbolic or evaluated with --a.
    Series {
        #[command(flatten)]
        sk: ScaleK,
        #[command(flatten)]
        order: Order,
        /// JSON file {"a":[{"i":1,"j":0,"v":"1"}, ...]}.
        #[arg(long)]
        a: Option<PathBuf>,
    },
    /// Compare the closed form with the diagram sum.
    Check {
        #[command(flatten)]
        sk: ScaleK,
        #[command(flatten)]
        order: Order,
    },
    /// Coefficients of L^i x^j in the Green function.
    Green {
        #[command(flatten)]
        scale: Scale,
        #[command(flatten)]
        order: Order,
    },
    /// Coefficients of P(x).
    Pfun {
        #[command(flatten)]
        scale: Scale,
        #[command(flatten)]
        order: Order,
    },
    /// Connected diagram and type census.
    Count {
        /// Number of chords.
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..=MAX_SIZE as i64))]
        n: u16,
    },
    /// Exact coefficients against the asymptotic estimate.
    Asymptotics {
        #[command(flatten)]
        sk: ScaleK,
        /// Largest n examined.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(10..=1_000_000))]
        nmax: u32,
        /// JSON a-values; every a_{i,j} with i <= k+2, j <= k+1 set to 1 if omitted.
        #[arg(long)]
        a: Option<PathBuf>,
    },
}

enum Outcome {
    Done,
    Mismatch,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Mismatch) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    check_format(&cli.command, cli.format)?;
    let values = match &cli.command {
        Command::Series { a: Some(path), .. } | Command::Asymptotics { a: Some(path), .. } => Some(read_values(path)?),
        _ => None,
    };
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t as usize).build_global().context("thread pool")?;
    }
    let f = cli.format;
    let out = match &cli.command {
        Command::Expand(sk) => expand(*sk, f),
        Command::Series { sk, order, .. } => series(*sk, order.order as usize, values.as_ref(), f)?,
        Command::Check { sk, order } => {
            let (text, ok) = check(*sk, order.order as usize, f)?;
            print!("{text}");
            return Ok(if ok { Outcome::Done } else { Outcome::Mismatch });
        }
        Command::Green { scale, order } => green(scale.s, bounded(order.order as usize, 0)?, f),
        Command::Pfun { scale, order } => pfun(scale.s, bounded(order.order as usize, 0)?, f),
        Command::Count { n } => count(*n as usize, f),
        Command::Asymptotics { sk, nmax, .. } => {
            let values = values.unwrap_or_else(|| AValues::uniform(sk.k + 2, sk.k + 1, rational::int(1)));
            asymptotics(*sk, *nmax as usize, &values, f)?
        }
    };
    print!("{out}");
    Ok(Outcome::Done)
}

fn check_format(cmd: &Command, f: Format) -> Result<()> {
    let (name, ok) = match cmd {
        Command::Expand(_) => ("expand", f != Format::Csv),
        Command::Series { .. } => ("series", true),
        Command::Check { .. } => ("check", matches!(f, Format::Text | Format::Json)),
        Command::Green { .. } => ("green", true),
        Command::Pfun { .. } => ("pfun", true),
        Command::Count { .. } => ("count", f != Format::Latex),
        Command::Asymptotics { .. } => ("asymptotics", f != Format::Latex),
    };
    if !ok {
        bail!("{name} does not support this --format");
    }
    Ok(())
}

fn read_values(path: &PathBuf) -> Result<AValues> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    AValues::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn bounded(order: usize, k: u32) -> Result<usize> {
    if order + k as usize > MAX_SIZE {
        bail!("order + k must be at most {MAX_SIZE} for diagram sums");
    }
    Ok(order)
}

fn with_schema(mut v: Value) -> String {
    v["schema"] = json!(SCHEMA);
    format!("{}\n", serde_json::to_string_pretty(&v).expect("json output"))
}

fn expand(sk: ScaleK, f: Format) -> String {
    let h = hk_closed_form(sk.k, sk.scale.s);
    match f {
        Format::Latex => format!("{}\n", h.to_latex()),
        Format::Json => with_schema(serde_json::to_value(&h).expect("closed form json")),
        _ => format!("{}\n", h.to_text()),
    }
}

/// Renders `(n, coefficient)` lines for a power series in `var`.
fn coefficient_table(kind: &str, var: &str, rows: &[(usize, APolynomial)], f: Format, meta: Value) -> String {
    let mut out = String::new();
    match f {
        Format::Json => {
            let mut v = meta;
            v["coefficients"] = json!(rows.iter().map(|(n, c)| json!({"n": n, "value": c})).collect::<Vec<_>>());
            v["kind"] = json!(kind);
            return with_schema(v);
        }
        Format::Csv => {
            out.push_str("n,coefficient\n");
            for (n, c) in rows {
                writeln!(out, "{n},\"{c}\"").unwrap();
            }
        }
        Format::Latex => {
            for (n, c) in rows {
                writeln!(out, "[{var}^{{{n}}}] = {}", c.to_latex()).unwrap();
            }
        }
        Format::Text => {
            for (n, c) in rows {
                writeln!(out, "{var}^{n}: {c}").unwrap();
            }
        }
    }
    out
}

fn series(sk: ScaleK, order: usize, values: Option<&AValues>, f: Format) -> Result<String> {
    let (k, s) = (sk.k, sk.scale.s);
    let coeffs = hk_series(k, s, order);
    let meta = json!({"k": k, "s": s, "order": order});
    let Some(values) = values else {
        let rows: Vec<_> = coeffs.into_iter().enumerate().map(|(i, c)| (i + 1, c)).collect();
        return Ok(coefficient_table("hk_series", "z", &rows, f, meta));
    };
    let mut evaluated = Vec::with_capacity(coeffs.len());
    for (i, c) in coeffs.iter().enumerate() {
        evaluated.push((i + 1, c.eval(values).with_context(|| format!("evaluating [z^{}]", i + 1))?));
    }
    let mut out = String::new();
    match f {
        Format::Json => {
            let mut v = meta;
            v["kind"] = json!("hk_values");
            v["coefficients"] =
                json!(evaluated.iter().map(|(n, c)| json!({"n": n, "value": rational::to_string(c)})).collect::<Vec<_>>());
            return Ok(with_schema(v));
        }
        Format::Csv => {
            out.push_str("n,coefficient\n");
            for (n, c) in &evaluated {
                writeln!(out, "{n},{}", rational::to_string(c)).unwrap();
            }
        }
        Format::Latex => {
            for (n, c) in &evaluated {
                writeln!(out, "[z^{{{n}}}] = {}", APolynomial::constant(c.clone()).to_latex()).unwrap();
            }
        }
        Format::Text => {
            for (n, c) in &evaluated {
                writeln!(out, "z^{n}: {}", rational::to_string(c)).unwrap();
            }
        }
    }
    Ok(out)
}

fn check(sk: ScaleK, order: usize, f: Format) -> Result<(String, bool)> {
    let (k, s) = (sk.k, sk.scale.s);
    let order = bounded(order, k)?;
    let closed = hk_series(k, s, order);
    let oracle = hk_bruteforce(k, s, order);
    let mismatches: Vec<usize> = (0..order).filter(|&i| closed[i] != oracle[i]).map(|i| i + 1).collect();
    let ok = mismatches.is_empty();
    let out = match f {
        Format::Json => {
            let diffs: Vec<_> = mismatches
                .iter()
                .map(|&n| json!({"n": n, "closed_form": closed[n - 1], "diagram_sum": oracle[n - 1]}))
                .collect();
            with_schema(json!({"k": k, "s": s, "order": order, "identical": ok, "mismatches": diffs}))
        }
        _ => {
            let mut out = String::new();
            for n in 1..=order {
                if mismatches.contains(&n) {
                    writeln!(out, "z^{n}: MISMATCH").unwrap();
                    writeln!(out, "  closed form: {}", closed[n - 1]).unwrap();
                    writeln!(out, "  diagram sum: {}", oracle[n - 1]).unwrap();
                } else {
                    writeln!(out, "z^{n}: ok").unwrap();
                }
            }
            let verdict = if ok { "identical" } else { "differ" };
            writeln!(out, "H_{k} at s = {s}, order {order}: {verdict}").unwrap();
            out
        }
    };
    Ok((out, ok))
}

fn green(s: u32, order: usize, f: Format) -> String {
    let g = green_series(s, order);
    let cells: Vec<(usize, usize, APolynomial)> = (0..=order)
        .flat_map(|j| (0..=j).map(move |i| (i, j)))
        .map(|(i, j)| (i, j, g.get(i, j)))
        .filter(|(_, _, c)| !c.is_zero())
        .collect();
    let mut out = String::new();
    match f {
        Format::Json => {
            let rows: Vec<_> = cells.iter().map(|(i, j, c)| json!({"i": i, "j": j, "value": c})).collect();
            return with_schema(json!({"kind": "green", "s": s, "order": order, "coefficients": rows}));
        }
        Format::Csv => {
            out.push_str("i,j,coefficient\n");
            for (i, j, c) in &cells {
                writeln!(out, "{i},{j},\"{c}\"").unwrap();
            }
        }
        Format::Latex => {
            for (i, j, c) in &cells {
                writeln!(out, "[L^{{{i}}} x^{{{j}}}] = {}", c.to_latex()).unwrap();
            }
        }
        Format::Text => {
            for (i, j, c) in &cells {
                writeln!(out, "L^{i} x^{j}: {c}").unwrap();
            }
        }
    }
    out
}

fn pfun(s: u32, order: usize, f: Format) -> String {
    let rows: Vec<_> = p_series(s, order).into_iter().enumerate().map(|(i, c)| (i + 1, c)).collect();
    coefficient_table("pfun", "x", &rows, f, json!({"s": s, "order": order}))
}

fn count(n: usize, f: Format) -> String {
    let c = census(n);
    let by_terminals: Vec<(usize, usize)> =
        c.by_terminals.iter().copied().enumerate().filter(|&(_, count)| count > 0).collect();
    // Decorated diagrams of total size n, grouped by type.
    let types: Option<Vec<(DiagramType, usize)>> = (n <= MAX_TYPE_CENSUS).then(|| {
        let mut map = std::collections::BTreeMap::<String, (DiagramType, usize)>::new();
        for d in enumerate_decorated(n as u32) {
            let t = d.diagram_type();
            map.entry(t.to_string()).or_insert((t, 0)).1 += 1;
        }
        let mut v: Vec<_> = map.into_values().collect();
        v.sort_by(|a, b| (a.0.t_value(), a.0.to_string()).cmp(&(b.0.t_value(), b.0.to_string())));
        v
    });
    let mut out = String::new();
    match f {
        Format::Json => {
            let mut v = json!({
                "kind": "census",
                "chords": c.chords,
                "connected": c.connected,
                "one_terminal": c.one_terminal(),
                "by_terminals": by_terminals.iter().map(|(l, n)| json!({"terminals": l, "count": n})).collect::<Vec<_>>(),
            });
            if let Some(types) = &types {
                v["decorated_by_type"] = json!(types
                    .iter()
                    .map(|(t, n)| json!({"type": t.to_string(), "t": t.t_value(), "count": n}))
                    .collect::<Vec<_>>());
            }
            return with_schema(v);
        }
        Format::Csv => {
            out.push_str("terminals,count\n");
            for (l, count) in &by_terminals {
                writeln!(out, "{l},{count}").unwrap();
            }
        }
        _ => {
            writeln!(out, "chords: {}", c.chords).unwrap();
            writeln!(out, "connected diagrams: {}", c.connected).unwrap();
            writeln!(out, "one terminal chord: {}", c.one_terminal()).unwrap();
            for (l, count) in &by_terminals {
                writeln!(out, "  {l} terminal chords: {count}").unwrap();
            }
            if let Some(types) = &types {
                writeln!(out, "decorated diagrams of size {n} by type:").unwrap();
                for (t, count) in types {
                    writeln!(out, "  {t} (t = {}): {count}", t.t_value()).unwrap();
                }
            }
        }
    }
    out
}

fn asymptotics(sk: ScaleK, nmax: usize, values: &AValues, f: Format) -> Result<String> {
    let report = convergence_report(sk.k, sk.scale.s, nmax, values)?;
    Ok(match f {
        Format::Json => with_schema(serde_json::to_value(&report)?),
        Format::Csv => report.to_csv(),
        _ => report.to_text(),
    })
}
