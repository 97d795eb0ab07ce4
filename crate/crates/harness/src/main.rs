use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use erfnn::bounds::TheoremId;
use erfnn::partition::TruncationPolicy;
use erfnn_harness::report::{to_file, write_csv, write_json};
use erfnn_harness::run::{premise_lines, rate_lines, run_partition_check, summarize, PremiseLine};
use erfnn_harness::{run_jobs, Config, ReportRow};

const EXIT_VIOLATED: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "erfnn", version, about = "Check error bounds of erf-activated neural network operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; the built-in default config when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write report rows as CSV; `-` is stdout, which is also where `verify` writes by default.
    #[arg(long, global = true)]
    out_csv: Option<PathBuf>,
    #[arg(long, global = true)]
    out_json: Option<PathBuf>,
    /// Worker threads; all cores when omitted.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for the random sample points of `check-partition`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Partition of unity, tail and denominator checks.
    CheckPartition,
    /// Every experiment in the config.
    Verify,
    /// Fitted convergence rates per theorem, function and exponent.
    Rates,
    /// Only the fractional statements, plus the Lipschitz premise of the half-order rate.
    Fractional,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

/// Writes the requested files; CSV goes to stdout when `csv_to_stdout` and no path is set.
fn emit_rows(common: &Common, cfg: &Config, rows: &[ReportRow], premises: Option<&[PremiseLine]>, csv_to_stdout: bool) -> Result<(), String> {
    let mut csv_path = common.out_csv.clone().or_else(|| cfg.output.csv.clone());
    if csv_path.is_none() && csv_to_stdout {
        csv_path = Some(PathBuf::from("-"));
    }
    let json_path = common.out_json.clone().or_else(|| cfg.output.json.clone());
    match csv_path.as_deref() {
        Some(p) if p == Path::new("-") => write_csv(rows, std::io::stdout().lock()).map_err(|e| e.to_string())?,
        Some(p) => to_file(p, |f| write_csv(rows, f).map_err(|e| e.to_string()))?,
        None => {}
    }
    if let Some(p) = json_path.as_deref() {
        to_file(p, |f| write_json(rows, premises, f).map_err(|e| e.to_string()))?;
    }
    Ok(())
}

fn finish(rows: &[ReportRow]) -> ExitCode {
    let s = summarize(rows);
    eprintln!(
        "{} rows: {} holds, {} violated, {} inconclusive-estimated, {} skipped",
        s.rows, s.holds, s.violated, s.inconclusive, s.skipped
    );
    if s.violated > 0 {
        ExitCode::from(EXIT_VIOLATED)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = &cli.common;
    if let Some(k) = common.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            return fail(EXIT_CONFIG, e);
        }
    }
    let cfg = match Config::load(common.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };

    match cli.command {
        Command::CheckPartition => {
            let policy = match TruncationPolicy::new(cfg.defaults.truncation_epsilon) {
                Ok(p) => p,
                Err(e) => return fail(EXIT_CONFIG, format!("defaults.truncation_epsilon: {e}")),
            };
            let report = match run_partition_check(&cfg.partition, &policy, common.seed) {
                Ok(r) => r,
                Err(e) => return fail(EXIT_CONFIG, format!("partition: {e}")),
            };
            let text = serde_json::to_string_pretty(&report).expect("plain record");
            println!("{text}");
            if let Some(p) = common.out_json.as_deref().or(cfg.output.json.as_deref()) {
                if let Err(e) = std::fs::write(p, text + "\n") {
                    return fail(EXIT_CONFIG, format!("{}: {e}", p.display()));
                }
            }
            if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VIOLATED)
            }
        }
        Command::Verify | Command::Rates | Command::Fractional => {
            let mut jobs = match cfg.jobs() {
                Ok(j) => j,
                Err(e) => return fail(EXIT_CONFIG, e),
            };
            let fractional = matches!(cli.command, Command::Fractional);
            if fractional {
                let keep = [TheoremId::T30, TheoremId::C31, TheoremId::C33, TheoremId::T39];
                jobs.retain(|j| keep.contains(&j.statement.id()));
            }
            let rows = run_jobs(&jobs);
            let premises = fractional.then(|| premise_lines(&jobs, &rows));
            if let Err(e) = emit_rows(common, &cfg, &rows, premises.as_deref(), matches!(cli.command, Command::Verify)) {
                return fail(EXIT_CONFIG, e);
            }
            let mut out = std::io::stdout().lock();
            match cli.command {
                Command::Rates => {
                    let _ = writeln!(out, "theorem,function,family,exponent,points,slope,r2");
                    for l in rate_lines(&rows) {
                        let o = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
                        let _ = writeln!(out, "{},{},{},{},{},{},{}", l.theorem, l.function, l.family, l.exponent, l.points, o(l.slope), o(l.r2));
                    }
                }
                Command::Fractional => {
                    for p in premises.iter().flatten() {
                        let verdict = match (p.certified, p.rate_ok) {
                            (false, _) => "premise not certified; rate check not applicable".to_string(),
                            (true, Some(ok)) => format!("premise certified; rate {}", if ok { "ok" } else { "too slow" }),
                            (true, None) => "premise certified; no rate fit".to_string(),
                        };
                        let _ = writeln!(out, "{} beta={}: {verdict}", p.function, p.exponent);
                    }
                }
                _ => {}
            }
            finish(&rows)
        }
    }
}
