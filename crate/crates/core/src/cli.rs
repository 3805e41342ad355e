//! The `sij` command line.

use crate::acceptance::{
    self, is_known_unattainable, pi_row_statistic, rho_statistics, sigma_statistic, tau_statistic,
    Options,
};
use crate::elem::Elem;
use crate::error::{Error, Result};
use crate::gamma::{
    eta_inv_statistic, eta_top_statistic, gamma_sij, gmt_ar_sgt, weight_names, weight_statistic,
    weighted_side, x_plus, WeightedSide,
};
use crate::gt::{
    beta, beta_normal_statistic, gamma_normal_statistic, gamma_row, ggt, gt, pi, rho, sigma, tau,
    GgtParams,
};
use crate::signed::{set_budget, SignedSet};
use crate::sijection::{interval_split, materialize, to_dot, verify, Side, Sij};
use crate::statistics::{check_compatibility, Statistic};
use crate::triangles::{
    asm_enumerate, eta_inv_mt_statistic, eta_mt_statistic, gmt, iota_mt, mt, sgt, SignMode,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::ffi::OsString;
use std::io::Write;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "sij",
    version,
    about = "Signed sets and sijections on Gelfand-Tsetlin patterns"
)]
pub struct Cli {
    /// Element budget for any single set (default: $SIJ_BUDGET or 1000000).
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    /// Graphviz, for sijection commands only.
    Dot,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SetAction {
    Size,
    List,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    /// Signed arrows.
    Signed,
    /// All arrows positive.
    Unsigned,
}

impl From<Mode> for SignMode {
    fn from(m: Mode) -> SignMode {
        match m {
            Mode::Signed => SignMode::Signed,
            Mode::Unsigned => SignMode::Unsigned,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SijAction {
    Verify,
    Apply,
    Table,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SijOp {
    IntervalSplit,
    Beta,
    Rho,
    Pi,
    Sigma,
    GammaRow,
    Tau,
    IotaMt,
    Gamma,
    GmtArSgt,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Dom,
    Cod,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WSide {
    Gmt,
    Arsgt,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Level {
    Quick,
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WeightedAction {
    Sum,
}

#[derive(clap::Args, Debug)]
struct SijArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    k: Option<Vec<i64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<i64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b: Option<Vec<i64>>,
    /// Integer or `auto` (max(k) + n).
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    i: Option<usize>,
    /// Third bound of interval_split.
    #[arg(long)]
    m: Option<i64>,
    /// Element to apply, as an s-expression.
    #[arg(long)]
    elem: Option<String>,
    /// File holding the element to apply.
    #[arg(long = "in")]
    input: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = SideArg::Dom)]
    side: SideArg,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Gelfand-Tsetlin patterns GT(k).
    Gt {
        #[arg(value_enum)]
        action: SetAction,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k: Vec<i64>,
    },
    /// Generalized patterns; rows of p and q are separated by '/', e.g. `--p 1/1,2`.
    Ggt {
        #[arg(value_enum)]
        action: SetAction,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k: Vec<i64>,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Alternating sign matrices of size n, one per line.
    Asm {
        #[arg(value_enum)]
        action: AsmAction,
        #[arg(long)]
        n: usize,
    },
    /// Monotone triangles with bottom row k.
    Mt {
        #[arg(value_enum)]
        action: SetAction,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k: Vec<i64>,
    },
    /// Arrowed monotone triangles.
    Gmt {
        #[arg(value_enum)]
        action: SetAction,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k: Vec<i64>,
        #[arg(long, value_enum, default_value_t = Mode::Signed)]
        mode: Mode,
    },
    /// Arrowed Gelfand-Tsetlin patterns.
    Sgt {
        #[arg(value_enum)]
        action: SetAction,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k: Vec<i64>,
        #[arg(long, value_enum, default_value_t = Mode::Signed)]
        mode: Mode,
    },
    /// Any named construction: verify it, apply it, or print its table.
    Sij {
        #[arg(value_enum)]
        action: SijAction,
        #[arg(long, value_enum)]
        op: SijOp,
        #[command(flatten)]
        args: SijArgs,
    },
    /// The pipeline GMT(k) ⇄ SGT(k).
    Gamma {
        #[arg(value_enum)]
        action: SijAction,
        #[command(flatten)]
        args: SijArgs,
    },
    /// Weighted enumeration of either side of the weighted identity.
    Weighted {
        #[arg(value_enum)]
        action: WeightedAction,
        #[arg(long, value_enum)]
        side: WSide,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k: Vec<i64>,
    },
    /// Runs the acceptance criteria.
    Acceptance {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        /// Run a single criterion (1-11).
        #[arg(long)]
        criterion: Option<usize>,
        /// Test hook: re-pairs π and expects the compatibility check to catch it.
        #[arg(long)]
        corrupt_pi: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AsmAction {
    Enumerate,
    Count,
}

fn parse_rows(s: &str) -> Result<Vec<Vec<usize>>> {
    s.split('/')
        .map(|row| {
            row.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
                })
                .collect()
        })
        .collect()
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Interface(msg.into())
}

/// Parses argv and runs; returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(b) = cli.budget {
        set_budget(b.max(1));
    }
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Budget { .. } => EXIT_BUDGET,
                Error::Interface(_) | Error::Parse(_) => EXIT_USAGE,
                Error::Invariant(_) => EXIT_FAIL,
            }
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let fmt = cli.format;
    if fmt == Format::Dot && !matches!(cli.cmd, Cmd::Sij { .. } | Cmd::Gamma { .. }) {
        return Err(usage("--format dot applies to sij and gamma only"));
    }
    match &cli.cmd {
        Cmd::Gt { action, k } => print_set(out, fmt, *action, gt(k)?.as_ref()),
        Cmd::Ggt { action, k, p, q } => {
            let params = GgtParams {
                p: parse_rows(p)?,
                q: parse_rows(q)?,
            };
            print_set(out, fmt, *action, &ggt(k, &params)?)
        }
        Cmd::Asm { action, n } => {
            let list = asm_enumerate(*n)?;
            match (action, fmt) {
                (AsmAction::Count, Format::Json) => emit(out, &json!(list.len())),
                (AsmAction::Count, _) => emit_line(out, &list.len().to_string()),
                (AsmAction::Enumerate, Format::Json) => emit(out, &json!(list)),
                (AsmAction::Enumerate, _) => {
                    for m in &list {
                        emit_line(out, &format!("{m:?}").replace(' ', ""))?;
                    }
                    Ok(EXIT_OK)
                }
            }
        }
        Cmd::Mt { action, k } => print_set(out, fmt, *action, mt(k)?.as_ref()),
        Cmd::Gmt { action, k, mode } => {
            print_set(out, fmt, *action, gmt(k, (*mode).into())?.as_ref())
        }
        Cmd::Sgt { action, k, mode } => {
            print_set(out, fmt, *action, sgt(k, (*mode).into())?.as_ref())
        }
        Cmd::Sij { action, op, args } => sij_command(out, fmt, *action, *op, args),
        Cmd::Gamma { action, args } => sij_command(out, fmt, *action, SijOp::Gamma, args),
        Cmd::Weighted { side, k, .. } => {
            let side = match side {
                WSide::Gmt => WeightedSide::Gmt,
                WSide::Arsgt => WeightedSide::ArSgt,
            };
            let poly = weighted_side(k, side)?;
            match fmt {
                Format::Json => emit(
                    out,
                    &json!({"variables": weight_names(k.len()), "polynomial": poly.to_string()}),
                ),
                _ => {
                    write!(out, "{poly}").map_err(io_err)?;
                    Ok(EXIT_OK)
                }
            }
        }
        Cmd::Acceptance {
            level,
            criterion,
            corrupt_pi,
        } => {
            let opts = Options {
                full: matches!(level, Level::Full),
                corrupt_pi: *corrupt_pi,
            };
            let ids: Vec<usize> = match criterion {
                Some(c) if (1..=11).contains(c) => vec![*c],
                Some(c) => return Err(usage(format!("no criterion {c}"))),
                None => (1..=11).collect(),
            };
            let mut ok = true;
            let mut rows = vec![];
            for id in ids {
                let o = acceptance::run_criterion(id, &opts);
                ok &= o.passed();
                match fmt {
                    Format::Json => rows.push(json!({
                        "criterion": o.id,
                        "title": o.title,
                        "passed": o.passed(),
                        "checked": o.checked,
                        "seconds": o.elapsed.as_secs_f64(),
                        "limit_seconds": o.limit.as_secs(),
                        "failures": o.failures.iter().map(|f| json!({
                            "key": f.key,
                            "detail": f.detail,
                            "known_unattainable": is_known_unattainable(o.id, &f.key),
                        })).collect::<Vec<_>>(),
                    })),
                    _ => {
                        emit_line(out, &o.line())?;
                    }
                }
            }
            if fmt == Format::Json {
                emit(out, &json!(rows))?;
            }
            Ok(if ok { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Invariant(format!("write failed: {e}"))
}

fn emit(out: &mut dyn Write, v: &serde_json::Value) -> Result<i32> {
    writeln!(out, "{v}").map_err(io_err)?;
    Ok(EXIT_OK)
}

fn emit_line(out: &mut dyn Write, s: &str) -> Result<i32> {
    writeln!(out, "{s}").map_err(io_err)?;
    Ok(EXIT_OK)
}

fn sign_char(s: i8) -> &'static str {
    if s > 0 {
        "+"
    } else {
        "-"
    }
}

fn print_set(out: &mut dyn Write, fmt: Format, action: SetAction, s: &SignedSet) -> Result<i32> {
    match (action, fmt) {
        (SetAction::Size, Format::Json) => {
            emit(out, &json!({"size": s.size(), "support": s.len()}))
        }
        (SetAction::Size, _) => emit_line(out, &s.size().to_string()),
        (SetAction::List, Format::Json) => emit(
            out,
            &json!(s
                .iter()
                .map(|(e, g)| json!({"sign": g, "elem": e.to_string()}))
                .collect::<Vec<_>>()),
        ),
        (SetAction::List, _) => {
            for (e, g) in s.iter() {
                emit_line(out, &format!("{} {e}", sign_char(g)))?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn need<'a, T>(v: &'a Option<T>, name: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| usage(format!("--{name} is required")))
}

fn x_value(args: &SijArgs, default: Option<i64>) -> Result<i64> {
    match args.x.as_deref() {
        None | Some("auto") => default.ok_or_else(|| usage("--x is required")),
        Some(s) => s
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("--x {s:?}: {e}"))),
    }
}

/// Builds the named construction and the statistics it is checked against.
fn build(op: SijOp, args: &SijArgs) -> Result<(Sij, Vec<Statistic>)> {
    let auto = args.k.as_ref().map(|k| x_plus(k));
    let k = || need(&args.k, "k");
    let ab =
        || -> Result<(&Vec<i64>, &Vec<i64>)> { Ok((need(&args.a, "a")?, need(&args.b, "b")?)) };
    let i = || need(&args.i, "i").copied();
    Ok(match op {
        SijOp::IntervalSplit => {
            let (a, b) = ab()?;
            let (&[a], &[b]) = (a.as_slice(), b.as_slice()) else {
                return Err(usage("interval-split takes single integers --a and --b"));
            };
            let m = *need(&args.m, "m")?;
            (interval_split(a, b, m)?, vec![])
        }
        SijOp::Beta => {
            let (a, b) = ab()?;
            (
                beta(a, b, x_value(args, None)?)?,
                vec![beta_normal_statistic(a.len())],
            )
        }
        SijOp::Rho => {
            let (a, b) = ab()?;
            let x = x_value(args, None)?;
            (rho(a, b, x)?, rho_statistics(a.len(), x))
        }
        SijOp::Pi => (pi(k()?, i()?)?, vec![pi_row_statistic(k()?, i()?)]),
        SijOp::Sigma => {
            let (a, b) = ab()?;
            (sigma(a, b, i()?)?, vec![sigma_statistic()])
        }
        SijOp::GammaRow => {
            let k = k()?;
            (
                gamma_row(k, x_value(args, auto)?)?,
                vec![gamma_normal_statistic(k.len())],
            )
        }
        SijOp::Tau => (
            tau(k()?, x_value(args, auto)?)?,
            vec![tau_statistic(k()?.len())],
        ),
        SijOp::IotaMt => {
            let k = k()?;
            (
                iota_mt(k)?,
                vec![eta_mt_statistic(k.clone()), eta_inv_mt_statistic(k.clone())],
            )
        }
        SijOp::Gamma => {
            let k = k()?;
            let stats = vec![eta_top_statistic(k.clone()), eta_inv_statistic(k.clone())];
            (gamma_sij(k, x_value(args, auto)?)?, stats)
        }
        SijOp::GmtArSgt => {
            let k = k()?;
            let stats = (0..weight_names(k.len()).len())
                .map(|j| weight_statistic(k.clone(), j))
                .collect();
            (gmt_ar_sgt(k, x_value(args, auto)?)?, stats)
        }
    })
}

fn sij_command(
    out: &mut dyn Write,
    fmt: Format,
    action: SijAction,
    op: SijOp,
    args: &SijArgs,
) -> Result<i32> {
    let (f, stats) = build(op, args)?;
    match action {
        SijAction::Verify if fmt == Format::Dot => emit_line(out, to_dot(&f)?.trim_end()),
        SijAction::Verify => {
            let report = verify(&f);
            let compat: Vec<_> = if report.valid() {
                stats.iter().map(|s| check_compatibility(&f, s)).collect()
            } else {
                vec![]
            };
            let ok = report.valid() && compat.iter().all(|c| c.compatible());
            if fmt == Format::Json {
                emit(
                    out,
                    &json!({
                        "valid": report.valid(),
                        "checked": report.checked,
                        "witness": report.witness,
                        "compatibility": compat.iter().map(|c| json!({
                            "statistic": c.statistic,
                            "compatible": c.compatible(),
                            "witness": c.witness,
                        })).collect::<Vec<_>>(),
                    }),
                )?;
            } else if let Some(w) = &report.witness {
                emit_line(out, &format!("invalid: {w}"))?;
            } else {
                let good: Vec<&str> = compat
                    .iter()
                    .filter(|c| c.compatible())
                    .map(|c| c.statistic.as_str())
                    .collect();
                let mut line = String::from("valid");
                if !good.is_empty() {
                    line.push_str(&format!("; compatible: {}", good.join(", ")));
                }
                for c in compat.iter().filter(|c| !c.compatible()) {
                    line.push_str(&format!(
                        "; not compatible with {}: {}",
                        c.statistic,
                        c.witness.as_deref().unwrap_or("")
                    ));
                }
                emit_line(out, &line)?;
            }
            Ok(if ok { EXIT_OK } else { EXIT_FAIL })
        }
        SijAction::Apply => {
            let text = match (&args.elem, &args.input) {
                (Some(s), _) => s.clone(),
                (None, Some(p)) => std::fs::read_to_string(p)
                    .map_err(|e| usage(format!("{}: {e}", p.display())))?,
                (None, None) => return Err(usage("apply needs --elem or --in")),
            };
            let side = match args.side {
                SideArg::Dom => Side::Dom,
                SideArg::Cod => Side::Cod,
            };
            let e = Elem::parse(text.trim())?;
            let (s2, y) = f.apply(side, &e)?;
            match fmt {
                Format::Json => emit(out, &json!({"side": s2.name(), "elem": y.to_string()})),
                _ => emit_line(out, &format!("{} {y}", s2.name())),
            }
        }
        SijAction::Table => {
            let rows = materialize(&f)?;
            match fmt {
                Format::Dot => emit_line(out, to_dot(&f)?.trim_end()),
                Format::Json => emit(
                    out,
                    &json!(rows
                        .iter()
                        .map(|((s, e), (t, y))| json!([
                            s.name(),
                            e.to_string(),
                            t.name(),
                            y.to_string()
                        ]))
                        .collect::<Vec<_>>()),
                ),
                Format::Text => {
                    for ((s, e), (t, y)) in &rows {
                        emit_line(out, &format!("{} {e} -> {} {y}", s.name(), t.name()))?;
                    }
                    Ok(EXIT_OK)
                }
            }
        }
    }
}
