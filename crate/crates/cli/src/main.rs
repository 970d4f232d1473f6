//! Command-line front end: series tables, closed forms, form factors and the
//! verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 computational failure. Artifact output goes to stdout (or `--output`)
//! and is byte-identical for identical configurations; timings and progress
//! go to stderr.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ising_corr::checks::{self, SuiteOptions};
use ising_corr::diagonal::{self, Engine, Regime};
use ising_corr::elliptic::EllipticContext;
use ising_corr::formfactor;
use ising_corr::offdiag;

#[derive(Parser)]
#[command(name = "ising-corr", version, about = "Exact λ-extended Ising correlation functions")]
struct Cli {
    /// Configuration file with `key=value` lines; explicit flags win.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    /// Output format.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Worker threads (also via ISING_THREADS; 0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Series,
    Closed,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Plus,
    Minus,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        match r {
            RegimeArg::Plus => Regime::Plus,
            RegimeArg::Minus => Regime::Minus,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// λ-extended diagonal correlation C±(N,N;λ).
    Diag(DiagArgs),
    /// Form-factor integrals Ĉ⁽ⁿ⁾(M,N), exact series or numeric quadrature.
    Formfactor(FormfactorArgs),
    /// λ-extended nearest-neighbor row correlation C±(0,1;λ).
    Offdiag(OffdiagArgs),
    /// Run named verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct DiagArgs {
    /// Temperature regime.
    #[arg(long)]
    regime: Option<RegimeArg>,
    /// Diagonal index N.
    #[arg(long = "N", visible_alias = "n")]
    n: Option<u32>,
    /// Truncation order in the λ-variable x (N_x >= 1).
    #[arg(long)]
    lambda_order: Option<i64>,
    /// Truncation order in s (N_s >= 4).
    #[arg(long)]
    s_order: Option<i64>,
    /// Recurrence engine.
    #[arg(long)]
    engine: Option<EngineArg>,
}

#[derive(Args)]
struct FormfactorArgs {
    /// Number of angles n (1..=4).
    #[arg(long)]
    n: Option<usize>,
    /// Row offset M.
    #[arg(long = "M")]
    m_off: Option<u32>,
    /// Column offset N.
    #[arg(long = "N")]
    n_off: Option<u32>,
    /// Truncation order in s for the exact series.
    #[arg(long)]
    s_order: Option<i64>,
    /// Evaluate numerically instead of as a series.
    #[arg(long, default_value_t = false)]
    numeric: bool,
    /// s for the numeric track.
    #[arg(long)]
    s_value: Option<f64>,
    /// Quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct OffdiagArgs {
    /// Temperature regime.
    #[arg(long)]
    regime: Option<RegimeArg>,
    /// Truncation order in the λ-variable x.
    #[arg(long)]
    lambda_order: Option<i64>,
    /// Truncation order in s.
    #[arg(long)]
    s_order: Option<i64>,
    /// Evaluate numerically at (--s-value, --lambda).
    #[arg(long, default_value_t = false)]
    numeric: bool,
    #[arg(long)]
    s_value: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Emit the published Ansatz fit for this n as JSON instead.
    #[arg(long)]
    emit_fit: Option<u32>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Highest recurrence index for the sigma suite.
    #[arg(long = "N")]
    n: Option<u32>,
    /// Skip the slowest checks (deep recurrence, n = 4 oracle).
    #[arg(long, default_value_t = false)]
    quick: bool,
}

/// `key=value` configuration lines; `#` starts a comment.
fn read_config(path: &std::path::Path) -> Result<Vec<(String, String)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), i + 1))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn config_get<T: std::str::FromStr>(cfg: &[(String, String)], key: &str) -> Result<Option<T>, String> {
    match cfg.iter().rev().find(|(k, _)| k == key) {
        None => Ok(None),
        Some((_, v)) => v
            .parse::<T>()
            .map(Some)
            .map_err(|_| format!("config key `{key}`: cannot parse `{v}`")),
    }
}

struct Out {
    sink: Box<dyn Write>,
}

impl Out {
    fn new(path: &Option<std::path::PathBuf>) -> Result<Out, String> {
        Ok(Out {
            sink: match path {
                None => Box::new(std::io::stdout()),
                Some(p) => Box::new(std::fs::File::create(p).map_err(|e| format!("{}: {e}", p.display()))?),
            },
        })
    }

    fn emit(&mut self, text: &str) -> Result<(), String> {
        self.sink.write_all(text.as_bytes()).map_err(|e| format!("write failed: {e}"))?;
        if !text.ends_with('\n') {
            let _ = self.sink.write_all(b"\n");
        }
        Ok(())
    }
}

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_COMPUTE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        None => Vec::new(),
        Some(p) => match read_config(p) {
            Ok(c) => c,
            Err(e) => return usage_error(&e),
        },
    };
    match run(cli, cfg) {
        Ok(code) => code,
        Err(AppError::Usage(e)) => usage_error(&e),
        Err(AppError::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_COMPUTE)
        }
    }
}

fn usage_error(e: &str) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_USAGE)
}

enum AppError {
    Usage(String),
    Compute(String),
}

fn compute<E: std::fmt::Display>(e: E) -> AppError {
    AppError::Compute(format!("{e}"))
}

fn run(cli: Cli, cfg: Vec<(String, String)>) -> Result<ExitCode, AppError> {
    let format = cli
        .format
        .map(Ok)
        .or_else(|| {
            config_get::<String>(&cfg, "format")
                .transpose()
                .map(|r| r.and_then(|v| match v.as_str() {
                    "json" => Ok(Format::Json),
                    "csv" => Ok(Format::Csv),
                    "text" => Ok(Format::Text),
                    other => Err(format!("unknown format `{other}`")),
                }))
        })
        .transpose()
        .map_err(AppError::Usage)?
        .unwrap_or(Format::Json);
    let threads = cli
        .threads
        .or(config_get(&cfg, "threads").map_err(AppError::Usage)?)
        .or_else(|| std::env::var("ISING_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(t) = threads {
        if t > 0 {
            // the library is pure; the pool only bounds data-parallel helpers
            let _ = ising_corr::install_thread_pool(t);
        }
    }
    let mut out = Out::new(&cli.output).map_err(AppError::Usage)?;
    match cli.command {
        Command::Diag(args) => cmd_diag(args, &cfg, format, &mut out),
        Command::Formfactor(args) => cmd_formfactor(args, &cfg, format, &mut out),
        Command::Offdiag(args) => cmd_offdiag(args, &cfg, format, &mut out),
        Command::Verify(args) => cmd_verify(args, &cfg, &mut out),
    }
}

fn cmd_diag(args: DiagArgs, cfg: &[(String, String)], format: Format, out: &mut Out) -> Result<ExitCode, AppError> {
    let regime: Regime = match args.regime {
        Some(r) => r.into(),
        None => config_get::<String>(cfg, "regime")
            .map_err(AppError::Usage)?
            .ok_or_else(|| AppError::Usage("missing --regime".into()))?
            .parse()
            .map_err(AppError::Usage)?,
    };
    let n = args
        .n
        .or(config_get(cfg, "N").map_err(AppError::Usage)?)
        .ok_or_else(|| AppError::Usage("missing --N".into()))?;
    let nx = args
        .lambda_order
        .or(config_get(cfg, "lambda-order").map_err(AppError::Usage)?)
        .unwrap_or(9);
    let ns = args
        .s_order
        .or(config_get(cfg, "s-order").map_err(AppError::Usage)?)
        .unwrap_or(60);
    if nx < 1 || ns < 4 {
        return Err(AppError::Usage("need lambda-order >= 1 and s-order >= 4".into()));
    }
    let engine = match args.engine {
        Some(EngineArg::Closed) => Engine::ClosedForm,
        Some(EngineArg::Series) => Engine::Series,
        None => match config_get::<String>(cfg, "engine").map_err(AppError::Usage)?.as_deref() {
            Some("closed") => Engine::ClosedForm,
            Some("series") | None => Engine::Series,
            Some(other) => return Err(AppError::Usage(format!("unknown engine `{other}`"))),
        },
    };
    let ns0 = diagonal::required_initial_ns(regime, n, ns);
    let ctx = EllipticContext::new(nx, ns0);
    let seq = diagonal::toda_sequence(regime, &ctx, n, engine).map_err(compute)?;
    let c = seq.last().expect("nonempty");
    let series = c.series.truncate_to(nx, ns);
    match format {
        Format::Json => {
            let mut body = format!(
                "{{\"regime\":\"{}\",\"N\":{},\"lambda_order\":{},\"series\":{}",
                regime.name(),
                c.n,
                nx,
                series.to_json()
            );
            if let Some(cf) = &c.closed_form {
                body.push_str(&format!(",\"closed_form\":\"{cf}\""));
            }
            body.push('}');
            out.emit(&body).map_err(AppError::Compute)?;
        }
        Format::Csv => out.emit(&series.to_csv()).map_err(AppError::Compute)?,
        Format::Text => {
            let mut text = format!("C{}({n},{n};lambda), x-order {nx}, s-order {ns}\n{series}", regime.name());
            if let Some(cf) = &c.closed_form {
                text.push_str(&format!("\nclosed form: {cf}"));
            }
            out.emit(&text).map_err(AppError::Compute)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_formfactor(
    args: FormfactorArgs,
    cfg: &[(String, String)],
    format: Format,
    out: &mut Out,
) -> Result<ExitCode, AppError> {
    let n = args
        .n
        .or(config_get(cfg, "n").map_err(AppError::Usage)?)
        .ok_or_else(|| AppError::Usage("missing --n".into()))?;
    let m_off = args.m_off.or(config_get(cfg, "M").map_err(AppError::Usage)?).unwrap_or(0);
    let n_off = args.n_off.or(config_get(cfg, "N").map_err(AppError::Usage)?).unwrap_or(0);
    if args.numeric {
        let s_value = args
            .s_value
            .or(config_get(cfg, "s-value").map_err(AppError::Usage)?)
            .ok_or_else(|| AppError::Usage("missing --s-value".into()))?;
        let tol = args.tol.or(config_get(cfg, "tol").map_err(AppError::Usage)?).unwrap_or(1e-10);
        let (value, est_error) = formfactor::formfactor_numeric_detailed(n, m_off, n_off, s_value, tol).map_err(compute)?;
        out.emit(&format!(
            "{{\"s\":{s_value},\"n\":{n},\"M\":{m_off},\"N\":{n_off},\"value\":{value:.17e},\"est_error\":{est_error:.3e}}}"
        ))
        .map_err(AppError::Compute)?;
        return Ok(ExitCode::SUCCESS);
    }
    let s_order = args
        .s_order
        .or(config_get(cfg, "s-order").map_err(AppError::Usage)?)
        .unwrap_or(40);
    if s_order < 4 {
        return Err(AppError::Usage("need s-order >= 4".into()));
    }
    let series = formfactor::formfactor_series(n, m_off, n_off, s_order).map_err(compute)?;
    match format {
        Format::Json => out.emit(&series.to_json()).map_err(AppError::Compute)?,
        Format::Csv => out.emit(&series.to_csv()).map_err(AppError::Compute)?,
        Format::Text => out
            .emit(&format!("C^({n})({m_off},{n_off}) = {series}"))
            .map_err(AppError::Compute)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_offdiag(args: OffdiagArgs, cfg: &[(String, String)], format: Format, out: &mut Out) -> Result<ExitCode, AppError> {
    if let Some(n) = args.emit_fit {
        if !(1..=6).contains(&n) {
            return Err(AppError::Usage("--emit-fit covers n = 1..6".into()));
        }
        out.emit(&offdiag::tables::table_fit(n).to_json()).map_err(AppError::Compute)?;
        return Ok(ExitCode::SUCCESS);
    }
    let regime: Regime = match args.regime {
        Some(r) => r.into(),
        None => config_get::<String>(cfg, "regime")
            .map_err(AppError::Usage)?
            .ok_or_else(|| AppError::Usage("missing --regime".into()))?
            .parse()
            .map_err(AppError::Usage)?,
    };
    if args.numeric {
        let s_value = args
            .s_value
            .or(config_get(cfg, "s-value").map_err(AppError::Usage)?)
            .ok_or_else(|| AppError::Usage("missing --s-value".into()))?;
        let lambda = args
            .lambda
            .or(config_get(cfg, "lambda").map_err(AppError::Usage)?)
            .ok_or_else(|| AppError::Usage("missing --lambda".into()))?;
        let value = offdiag::c01_numeric(regime, s_value, lambda).map_err(compute)?;
        out.emit(&format!(
            "{{\"regime\":\"{}\",\"s\":{s_value},\"lambda\":{lambda},\"value\":{value:.17e}}}",
            regime.name()
        ))
        .map_err(AppError::Compute)?;
        return Ok(ExitCode::SUCCESS);
    }
    let nx = args
        .lambda_order
        .or(config_get(cfg, "lambda-order").map_err(AppError::Usage)?)
        .unwrap_or(9);
    let ns = args
        .s_order
        .or(config_get(cfg, "s-order").map_err(AppError::Usage)?)
        .unwrap_or(60);
    if nx < 1 || ns < 4 {
        return Err(AppError::Usage("need lambda-order >= 1 and s-order >= 4".into()));
    }
    let ctx = EllipticContext::new(nx, ns + 8);
    let series = offdiag::c01_closed_form(regime, &ctx).map_err(compute)?.truncate_to(nx, ns);
    match format {
        Format::Json => out
            .emit(&format!(
                "{{\"regime\":\"{}\",\"M\":0,\"N\":1,\"lambda_order\":{nx},\"series\":{}}}",
                regime.name(),
                series.to_json()
            ))
            .map_err(AppError::Compute)?,
        Format::Csv => out.emit(&series.to_csv()).map_err(AppError::Compute)?,
        Format::Text => out
            .emit(&format!("C{}(0,1;lambda) = {series}", regime.name()))
            .map_err(AppError::Compute)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs, cfg: &[(String, String)], out: &mut Out) -> Result<ExitCode, AppError> {
    let suite = if args.suite == "all" {
        config_get::<String>(cfg, "suite").map_err(AppError::Usage)?.unwrap_or_else(|| "all".into())
    } else {
        args.suite.clone()
    };
    let opts = SuiteOptions {
        max_n: args.n.or(config_get(cfg, "N").map_err(AppError::Usage)?).unwrap_or(5),
        deep_n: 10,
        quick: args.quick,
    };
    let reports = if suite == "all" {
        checks::run_all(&opts)
    } else {
        match checks::run_suite(&suite, &opts) {
            Some(r) => vec![r],
            None => {
                return Err(AppError::Usage(format!(
                    "unknown suite `{suite}` (expected one of {} or all)",
                    checks::SUITES.join(", ")
                )))
            }
        }
    };
    let mut all_ok = true;
    for rep in &reports {
        for c in &rep.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            all_ok &= c.passed;
            out.emit(&format!("{}::{} {status}", rep.suite, c.name)).map_err(AppError::Compute)?;
            eprintln!("[{:>8} ms] {}::{} {status} - {}", c.millis, rep.suite, c.name, c.details);
        }
    }
    if all_ok {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_VERIFY_FAILED))
    }
}
