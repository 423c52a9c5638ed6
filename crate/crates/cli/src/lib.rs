//! Argument parsing and dispatch for the `chainlab` binary.
//!
//! Every command writes one report to standard output. Exit status is 0 on
//! success, 1 on usage or input errors and 2 when a mathematical check
//! (`verify`, `check`, `audit`) fails.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use chainlab::extremal::ExtremalCertificate;
use chainlab::lym::LymAudit;
use chainlab::oracle::{
    branch_and_bound_min, exhaustive_min, verify_iff_characterization, IffReport, OracleResult,
    EXHAUSTIVE_MAX_N,
};
use chainlab::text::{parse_family, write_family, SetNotation};
use chainlab::{
    canonical_family, check_extremal_2chain, conjectured_min, evaluate_bound, lym_audit, minimize,
    owner_counts, random_family, saturated_example, BoundInput, BoundName, BoundReport,
    ChainCountReport, SetFamily, ShiftTrace,
};
use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Count k-chains of a family file
    Count,
    /// Evaluate a named bound
    Bound,
    /// Emit the centered family (or the saturated example)
    Construct,
    /// Certify a family against the 2-chain characterization
    Check,
    /// Run the shifting local search
    Minimize,
    /// Compare exact minima with the centered family
    Verify,
    /// Permutation-counting audit of a family
    Audit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "chainlab", version, about = "Exact k-chain counts in the Boolean lattice")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub s: Option<u64>,
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<i64>,
    #[arg(long)]
    pub t2: Option<u64>,
    /// Bound identifier for `bound`
    #[arg(long)]
    pub name: Option<String>,
    /// Family file in the `n=<int>` text format
    #[arg(long = "family")]
    pub family_path: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for random families (`minimize` without `--family`)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism
    #[arg(long, env = "CHAINLAB_THREADS")]
    pub threads: Option<usize>,
    #[arg(long)]
    pub s_min: Option<u64>,
    #[arg(long)]
    pub s_max: Option<u64>,
    #[arg(long, default_value_t = 100)]
    pub max_steps: usize,
    /// Time budget per size for branch and bound (`verify` at n = 5, 6)
    #[arg(long, default_value_t = 60)]
    pub budget_secs: u64,
    /// `construct`: emit the saturated example over [n] (n odd)
    #[arg(long)]
    pub saturated: bool,
    /// `verify`: also test the 2-chain characterization (n <= 4)
    #[arg(long)]
    pub iff: bool,
    /// Write sets as `hex:` bitmasks
    #[arg(long)]
    pub hex: bool,
}

/// A usage or input problem; reported on stderr with exit status 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl From<chainlab::Error> for UsageError {
    fn from(e: chainlab::Error) -> Self {
        UsageError(e.to_string())
    }
}

impl From<std::io::Error> for UsageError {
    fn from(e: std::io::Error) -> Self {
        UsageError(e.to_string())
    }
}

type Res<T> = std::result::Result<T, UsageError>;

fn need<T>(v: Option<T>, flag: &str, cmd: &str) -> Res<T> {
    v.ok_or_else(|| UsageError(format!("{cmd} needs --{flag}")))
}

/// One row of a bound or oracle table.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum TableRow {
    Bound(BoundReport),
    Oracle(OracleResult),
}

pub const CSV_HEADER: &str = "name,n,k,s,t,t1,t2,value_fraction,value_decimal,regime_ok";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders rows in input order. CSV columns are fixed ([`CSV_HEADER`]);
/// absent parameters are empty cells. JSON is an array of the row objects.
pub fn emit_table(rows: &[TableRow], format: Format) -> String {
    match format {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for row in rows {
                let line = match row {
                    TableRow::Bound(b) => {
                        let p = &b.params;
                        format!(
                            "{},{},{},{},{},{},{},{},{},{}",
                            b.name,
                            p.n,
                            opt(p.k),
                            opt(p.s),
                            opt(p.t),
                            opt(p.t1),
                            opt(p.t2),
                            b.value_fraction(),
                            b.value_decimal(),
                            b.regime_ok
                        )
                    }
                    TableRow::Oracle(o) => format!(
                        "oracle-min,{},{},{},,,,{}/1,{},{}",
                        o.n, o.k, o.s, o.minimum, o.minimum, o.complete
                    ),
                };
                out.push_str(&line);
                out.push('\n');
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for row in rows {
                let _ = match row {
                    TableRow::Bound(b) => writeln!(
                        out,
                        "{} = {} ({}){}",
                        b.name,
                        b.value_fraction(),
                        b.value_decimal(),
                        if b.regime_ok { "" } else { " [outside proven regime]" }
                    ),
                    TableRow::Oracle(o) => writeln!(
                        out,
                        "min k={} chains over {} sets of [{}] = {}{}",
                        o.k,
                        o.s,
                        o.n,
                        o.minimum,
                        if o.complete { "" } else { " (incomplete)" }
                    ),
                };
            }
            out
        }
    }
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn load_family(cfg: &RunConfig, cmd: &str) -> Res<SetFamily> {
    let path = need(cfg.family_path.as_ref(), "family", cmd)?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    parse_family(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn notation(cfg: &RunConfig) -> SetNotation {
    if cfg.hex {
        SetNotation::Hex
    } else {
        SetNotation::Elements
    }
}

struct Report {
    body: String,
    failed: bool,
}

impl Report {
    fn ok(body: String) -> Self {
        Report { body, failed: false }
    }
}

fn cmd_count(cfg: &RunConfig) -> Res<Report> {
    let fam = load_family(cfg, "count")?;
    let k = need(cfg.k, "k", "count")?;
    let r: ChainCountReport = owner_counts(&fam, k)?;
    Ok(Report::ok(match cfg.format {
        Format::Json => json(&r),
        Format::Csv => format!("n,k,total,c1,c2\n{},{},{},{},{}\n", r.n, r.k, r.total, r.c1, r.c2),
        Format::Text => format!("total {}\nunit-step {}\nlonger-step {}\n", r.total, r.c1, r.c2),
    }))
}

fn cmd_bound(cfg: &RunConfig) -> Res<Report> {
    let name: BoundName = need(cfg.name.as_deref(), "name", "bound")?.parse()?;
    let fam = match &cfg.family_path {
        Some(_) => Some(load_family(cfg, "bound")?),
        None => None,
    };
    let n = match (&fam, cfg.n) {
        (Some(f), _) => f.n(),
        (None, n) => need(n, "n", "bound")?,
    };
    let input = BoundInput {
        n,
        k: cfg.k,
        s: cfg.s,
        t: cfg.t,
        t1: cfg.t1,
        t2: cfg.t2,
        family: fam.as_ref(),
    };
    let rows: Vec<TableRow> = evaluate_bound(name, &input)?.into_iter().map(TableRow::Bound).collect();
    Ok(Report::ok(emit_table(&rows, cfg.format)))
}

fn render_family(fam: &SetFamily, cfg: &RunConfig) -> String {
    match cfg.format {
        Format::Json => json(fam),
        Format::Csv => {
            let mut out = String::from("set\n");
            for s in fam.iter() {
                let _ = writeln!(out, "\"{}\"", chainlab::text::format_set(s, notation(cfg)));
            }
            out
        }
        Format::Text => write_family(fam, notation(cfg)),
    }
}

fn cmd_construct(cfg: &RunConfig) -> Res<Report> {
    let n = need(cfg.n, "n", "construct")?;
    let fam = if cfg.saturated {
        if n % 2 == 0 {
            return Err(UsageError(format!("the saturated example needs odd n, got {n}")));
        }
        saturated_example(n / 2)?
    } else {
        canonical_family(n, need(cfg.s, "s", "construct")?)?
    };
    Ok(Report::ok(render_family(&fam, cfg)))
}

fn cmd_check(cfg: &RunConfig) -> Res<Report> {
    let fam = load_family(cfg, "check")?;
    let c: ExtremalCertificate = check_extremal_2chain(&fam)?;
    let [a, b, d, e] = c.condition_results;
    let body = match cfg.format {
        Format::Json => json(&c),
        Format::Csv => format!("satisfied,r,cond1,cond2,cond3,cond4\n{},{},{a},{b},{d},{e}\n", c.satisfied, c.r),
        Format::Text => {
            let mut out = format!("satisfied {}\nr {}\n", c.satisfied, c.r);
            for (i, ok) in c.condition_results.iter().enumerate() {
                let applies = c.condition_applies[i];
                let _ = writeln!(
                    out,
                    "condition {} {}",
                    i + 1,
                    if !applies { "n/a" } else if *ok { "holds" } else { "fails" }
                );
            }
            for v in &c.violating_sets {
                let _ = writeln!(out, "witness {v}");
            }
            out
        }
    };
    Ok(Report {
        body,
        failed: !c.satisfied,
    })
}

#[derive(Serialize)]
struct MinimizeOutput<'a> {
    trace: &'a ShiftTrace,
    family: String,
}

fn cmd_minimize(cfg: &RunConfig) -> Res<Report> {
    let k = need(cfg.k, "k", "minimize")?;
    let start = match &cfg.family_path {
        Some(_) => load_family(cfg, "minimize")?,
        None => {
            let n = need(cfg.n, "n", "minimize (without --family)")?;
            let s = need(cfg.s, "s", "minimize (without --family)")?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            random_family(n, s as usize, &mut rng)?
        }
    };
    let (end, trace) = minimize(&start, k, cfg.max_steps)?;
    let family = write_family(&end, notation(cfg));
    let body = match cfg.format {
        Format::Json => json(&MinimizeOutput { trace: &trace, family }),
        Format::Csv => {
            let mut out = String::from("step,ell,m,kind,count_after\n");
            let _ = writeln!(out, "0,,,start,{}", trace.initial_count);
            for (i, st) in trace.steps.iter().enumerate() {
                let kind = serde_json::to_value(st.kind).expect("kind serializes");
                let _ = writeln!(out, "{},{},{},{},{}", i + 1, st.ell, st.m, kind.as_str().unwrap_or(""), st.count_after);
            }
            out
        }
        Format::Text => {
            let mut out = format!("initial {}\n", trace.initial_count);
            if let Some(st) = &trace.stripped {
                let _ = writeln!(out, "stripped extremes -> {}", st.count_after);
            }
            for st in &trace.steps {
                let moved: Vec<String> = st
                    .removed
                    .iter()
                    .zip(&st.inserted)
                    .map(|(a, b)| format!("{{{a}}} -> {{{b}}}"))
                    .collect();
                let _ = writeln!(out, "shift {} -> {}", moved.join(", "), st.count_after);
            }
            let _ = writeln!(out, "final {}", trace.final_count);
            out.push_str(&family);
            out
        }
    };
    Ok(Report::ok(body))
}

#[derive(Serialize)]
struct VerifyRow {
    s: u64,
    oracle: OracleResult,
    conjectured: String,
    equal: bool,
    verified: bool,
}

#[derive(Serialize)]
struct VerifyOutput {
    n: u32,
    k: u32,
    rows: Vec<VerifyRow>,
    all_equal: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    iff: Vec<IffReport>,
}

fn cmd_verify(cfg: &RunConfig) -> Res<Report> {
    let n = need(cfg.n, "n", "verify")?;
    let k = need(cfg.k, "k", "verify")?;
    let s_min = cfg.s_min.unwrap_or(0);
    let s_max = cfg.s_max.unwrap_or(1u64 << n.min(63));
    if s_min > s_max {
        return Err(UsageError(format!("--s-min {s_min} exceeds --s-max {s_max}")));
    }
    if n > chainlab::oracle::BRANCH_AND_BOUND_MAX_N {
        return Err(UsageError(format!(
            "verify supports n <= {}, got {n}",
            chainlab::oracle::BRANCH_AND_BOUND_MAX_N
        )));
    }
    let mut rows = Vec::new();
    for s in s_min..=s_max {
        let oracle = if n <= EXHAUSTIVE_MAX_N {
            exhaustive_min(n, s, k)?
        } else {
            branch_and_bound_min(n, s, k, Duration::from_secs(cfg.budget_secs))?
        };
        let conjectured = conjectured_min(n, s, k)?;
        let equal = oracle.minimum == conjectured;
        rows.push(VerifyRow {
            s,
            verified: oracle.complete && equal,
            equal,
            conjectured: conjectured.to_string(),
            oracle,
        });
    }
    let all_equal = rows.iter().all(|r| r.equal);
    let mut iff = Vec::new();
    if cfg.iff {
        if n > EXHAUSTIVE_MAX_N {
            return Err(UsageError(format!("--iff needs n <= {EXHAUSTIVE_MAX_N}")));
        }
        let sperner = chainlab::arith::binomial_u64(n, n / 2);
        for s in s_min.max(sperner)..=s_max {
            iff.push(verify_iff_characterization(n, s)?);
        }
    }
    let failed = !all_equal || iff.iter().any(|r| !r.holds);
    let out = VerifyOutput {
        n,
        k,
        rows,
        all_equal,
        iff,
    };
    let body = match cfg.format {
        Format::Json => json(&out),
        Format::Csv => {
            let table: Vec<TableRow> = out.rows.iter().map(|r| TableRow::Oracle(r.oracle.clone())).collect();
            emit_table(&table, Format::Csv)
        }
        Format::Text => {
            let mut text = String::new();
            for r in &out.rows {
                let _ = writeln!(
                    text,
                    "s={} oracle={} centered={} {}",
                    r.s,
                    r.oracle.minimum,
                    r.conjectured,
                    if !r.equal {
                        "COUNTEREXAMPLE"
                    } else if r.verified {
                        "ok"
                    } else {
                        "unverified (budget)"
                    }
                );
                if !r.equal {
                    text.push_str(&write_family(&r.oracle.witnesses[0], notation(cfg)));
                }
            }
            for r in &out.iff {
                let _ = writeln!(
                    text,
                    "iff s={} optimal={} certified={} {}",
                    r.s,
                    r.optimal,
                    r.certified,
                    if r.holds { "ok" } else { "MISMATCH" }
                );
            }
            text
        }
    };
    Ok(Report { body, failed })
}

fn cmd_audit(cfg: &RunConfig) -> Res<Report> {
    let fam = load_family(cfg, "audit")?;
    let k = need(cfg.k, "k", "audit")?;
    let a: LymAudit = lym_audit(&fam, k)?;
    let body = match cfg.format {
        Format::Json => json(&a),
        Format::Csv => {
            let mut out = String::from("name,lhs,rhs,margin,holds\n");
            for q in &a.inequalities {
                let _ = writeln!(out, "{},{},{},{},{}", q.name, q.lhs, q.rhs, q.margin, q.holds);
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "set weights {}\nchain weights {}\nlong-step chain weights {}\n",
                a.set_weight_sum, a.chain_weight_sum, a.long_chain_weight_sum
            );
            for q in &a.inequalities {
                let _ = writeln!(out, "{}: {} >= {} (margin {})", q.name, q.lhs, q.rhs, q.margin);
            }
            if let Some(e) = &a.enumeration {
                let _ = writeln!(
                    out,
                    "permutation walk {}",
                    if e.matches_formula { "matches" } else { "DIFFERS" }
                );
            }
            out
        }
    };
    Ok(Report {
        body,
        failed: !a.all_hold(),
    })
}

fn dispatch(cfg: &RunConfig) -> Res<Report> {
    match cfg.command {
        Command::Count => cmd_count(cfg),
        Command::Bound => cmd_bound(cfg),
        Command::Construct => cmd_construct(cfg),
        Command::Check => cmd_check(cfg),
        Command::Minimize => cmd_minimize(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Audit => cmd_audit(cfg),
    }
}

/// Runs one invocation, writing the report to `out` and diagnostics to
/// `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(&cfg)) {
        Ok(report) => {
            if out.write_all(report.body.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            if report.failed {
                EXIT_CHECK_FAILED
            } else {
                EXIT_OK
            }
        }
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}
