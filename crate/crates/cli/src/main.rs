//! `definetti`: compute, verify, scan, recover and check from the shell.
//!
//! Every subcommand writes one JSON document (or a CSV table for
//! `ratio-scan`) to stdout or `--out`. Exit codes: 0 success, 2 bad input,
//! 3 invariant violation, 4 moment vector not extendable.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use definetti_core::harness::{scan_rows, tail_bounds_check, verify_theorem, Source};
use definetti_core::io::{
    law_json, parse_law, parse_measure, parse_moments, recovered_json, scan_csv_header, scan_csv_row,
    scan_summary_line, to_json_line,
};
use definetti_core::model::{
    check_complete_monotonicity, mean_law_from_moments, mixture_prefix_prob, prefix_prob_from_mean_law,
    prefix_prob_from_moments, sample_mean_law,
};
use definetti_core::oracle::oracle_sweep;
use definetti_core::recovery::{recover_from_law, recover_from_moments};
use definetti_core::{Backend, Error, MixingMeasure, PrefixEvent, Real, RegionBounds, ResolvedBackend};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "definetti",
    version,
    about = "Finite de Finetti computations for exchangeable 0/1 sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// exact, log or auto (exact for N <= 2000)
    #[arg(long, global = true, default_value = "auto", value_parser = parse_backend)]
    backend: Backend,
    #[arg(short = 'N', long = "n", global = true)]
    n: Option<u64>,
    /// Prefix pattern such as `1,1,0`
    #[arg(long, global = true)]
    pattern: Option<String>,
    /// Pattern length, with --alpha, for commands that only need (k, alpha)
    #[arg(short = 'k', global = true)]
    k: Option<u64>,
    #[arg(long, global = true)]
    alpha: Option<u64>,
    /// Mixing measure JSON: {"atoms":[{"p":..,"w":..}]}
    #[arg(long, global = true)]
    measure: Option<PathBuf>,
    /// Moment vector JSON: {"c":[1, c_1, ...]}
    #[arg(long, global = true)]
    moments: Option<PathBuf>,
    /// Law of the success count JSON: {"q":[q_0, ..., q_N]}
    #[arg(long, global = true)]
    law: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    stride: u64,
    /// Level n for moment inversion; defaults to the vector's order
    #[arg(long, global = true)]
    level: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Random measures per oracle run
    #[arg(long, global = true, default_value_t = 25)]
    measures: usize,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// P(X_1..X_k = pattern) from a measure, moments or law
    PrefixProb,
    /// Law of the success count S_N from a measure or moments
    YnLaw,
    /// Both sides of the finite identity with the error budget
    Verify,
    /// CSV of a_i, b_i and a_i/b_i by region, with a summary line
    RatioScan,
    /// Mixing measure from moments or a law
    Recover,
    /// Complete monotonicity of a moment vector
    ExtendCheck,
    /// Compare the three prefix-probability routes on random measures
    Oracle,
    /// Exact checks of the lower and upper tail bounds
    TailCheck,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a run produced besides its text: a nonzero status for failed checks.
struct Outcome {
    text: String,
    status: u8,
}

impl Outcome {
    fn ok<T: Serialize + ?Sized>(doc: &T) -> Self {
        Outcome {
            text: to_json_line(doc) + "\n",
            status: 0,
        }
    }
}

type Res<T> = Result<T, Error>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn need<T: Copy>(value: Option<T>, flag: &str) -> Res<T> {
    value.ok_or_else(|| Error::Domain(format!("{flag} is required")))
}

impl Opts {
    fn n(&self) -> Res<u64> {
        need(self.n, "-N")
    }

    fn event(&self) -> Res<PrefixEvent> {
        match (&self.pattern, self.k, self.alpha) {
            (Some(p), k, alpha) => {
                let e: PrefixEvent = p.parse()?;
                if k.is_some_and(|k| k != e.k()) || alpha.is_some_and(|a| a != e.alpha()) {
                    return Err(Error::Domain(format!("--pattern {p} disagrees with -k/--alpha")));
                }
                Ok(e)
            }
            (None, Some(k), Some(alpha)) => PrefixEvent::canonical(k, alpha),
            _ => Err(Error::Domain("--pattern (or -k with --alpha) is required".into())),
        }
    }

    fn k_alpha(&self) -> Res<(u64, u64)> {
        let e = self.event()?;
        Ok((e.k(), e.alpha()))
    }

    fn measure(&self) -> Res<Option<MixingMeasure>> {
        self.measure.as_deref().map(|p| parse_measure(&read(p)?)).transpose()
    }

    fn exactness(&self, exact_input: bool) -> Res<()> {
        if self.backend == Backend::Exact && !exact_input {
            return Err(Error::NotExact(
                "--backend exact needs string-valued rational inputs".into(),
            ));
        }
        Ok(())
    }

    /// The user's backend request applied to a value computed from the inputs.
    fn shape(&self, value: Real) -> Real {
        match (self.backend, value) {
            (Backend::Log, Real::Exact(r)) => Real::Float(definetti_core::value::rational_to_f64(&r)),
            (_, v) => v,
        }
    }
}

fn prefix_prob(o: &Opts) -> Res<Outcome> {
    let e = o.event()?;
    let value: Real = if let Some(mu) = o.measure()? {
        o.exactness(mu.is_exact())?;
        mixture_prefix_prob(&mu, &e).into()
    } else if let Some(path) = &o.moments {
        let c = parse_moments(&read(path)?)?;
        o.exactness(c.is_exact())?;
        prefix_prob_from_moments(&c, &e)?
    } else if let Some(path) = &o.law {
        let law = parse_law(&read(path)?)?;
        o.exactness(law.is_exact())?;
        prefix_prob_from_mean_law(&law, &e)?
    } else {
        return Err(Error::Domain("one of --measure, --moments or --law is required".into()));
    };
    Ok(Outcome::ok(&json!({ "value": o.shape(value) })))
}

fn yn_law(o: &Opts) -> Res<Outcome> {
    let law = if let Some(mu) = o.measure()? {
        let n = o.n()?;
        o.exactness(mu.is_exact())?;
        let backend = match o.backend {
            Backend::Auto if !mu.is_exact() => ResolvedBackend::Log,
            b => b.resolve(n),
        };
        sample_mean_law(&mu, n, backend)?
    } else if let Some(path) = &o.moments {
        let c = parse_moments(&read(path)?)?;
        o.exactness(c.is_exact())?;
        let n = o.n.map(|n| n as usize).unwrap_or(c.order());
        let law = mean_law_from_moments(&c, n)?;
        if o.backend == Backend::Log {
            law.to_float()
        } else {
            law
        }
    } else {
        return Err(Error::Domain("one of --measure or --moments is required".into()));
    };
    Ok(Outcome::ok(&law_json(&law)))
}

fn verify(o: &Opts) -> Res<Outcome> {
    let e = o.event()?;
    let report = if let Some(mu) = o.measure()? {
        verify_theorem(Source::Mixture { mu: &mu, n: o.n()? }, &e, o.backend)?
    } else if let Some(path) = &o.law {
        let law = parse_law(&read(path)?)?;
        if o.n.is_some_and(|n| n != law.n()) {
            return Err(Error::Domain(format!(
                "-N disagrees with the law, which has N={}",
                law.n()
            )));
        }
        verify_theorem(Source::Law(&law), &e, o.backend)?
    } else {
        return Err(Error::Domain("one of --measure or --law is required".into()));
    };
    Ok(Outcome::ok(&report))
}

fn ratio_scan(o: &Opts, out: &mut dyn Write) -> Res<()> {
    let n = o.n()?;
    let (k, alpha) = o.k_alpha()?;
    let bounds = RegionBounds::new(n)?;
    let io_err = |e: io::Error| Error::Parse(format!("cannot write output: {e}"));
    writeln!(out, "{}", scan_csv_header(o.backend.resolve(n))).map_err(io_err)?;
    let mut failed = None;
    let summary = scan_rows(bounds, k, alpha, o.stride, o.backend, |row| {
        if failed.is_none() {
            failed = writeln!(out, "{}", scan_csv_row(&row)).err();
        }
    })?;
    if let Some(e) = failed {
        return Err(io_err(e));
    }
    writeln!(out, "{}", scan_summary_line(&summary)).map_err(io_err)
}

fn recover(o: &Opts) -> Res<Outcome> {
    let rec = if let Some(path) = &o.moments {
        let c = parse_moments(&read(path)?)?;
        let level = o.level.unwrap_or(c.order());
        recover_from_moments(&c, level)?
    } else if let Some(path) = &o.law {
        recover_from_law(&parse_law(&read(path)?)?)
    } else {
        return Err(Error::Domain("one of --moments or --law is required".into()));
    };
    Ok(Outcome::ok(&recovered_json(&rec)))
}

fn extend_check(o: &Opts) -> Res<Outcome> {
    let path = o
        .moments
        .as_deref()
        .ok_or_else(|| Error::Domain("--moments is required".into()))?;
    let verdict = check_complete_monotonicity(&parse_moments(&read(path)?)?);
    let status = if verdict.is_accept() { 0 } else { 4 };
    Ok(Outcome {
        status,
        ..Outcome::ok(&verdict)
    })
}

fn oracle(o: &Opts) -> Res<Outcome> {
    let report = oracle_sweep(o.n()?, o.seed, o.measures)?;
    let status = if report.passed() { 0 } else { 3 };
    Ok(Outcome {
        status,
        ..Outcome::ok(&report)
    })
}

fn tail_check(o: &Opts) -> Res<Outcome> {
    let (k, alpha) = o.k_alpha()?;
    let check = tail_bounds_check(o.n()?, k, alpha)?;
    let status = if check.lower_ok() && check.upper_ok() { 0 } else { 3 };
    Ok(Outcome {
        status,
        ..Outcome::ok(&check)
    })
}

fn certificate_json(e: &Error) -> Option<Value> {
    let Error::NotExtendable(cert) = e else { return None };
    Some(json!({
        "extendable": false,
        "certificate": {
            "level": cert.level,
            "index": cert.index,
            "order": cert.order,
            "value": Real::Exact(cert.value.clone()),
        }
    }))
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: &Cli, out: &mut dyn Write) -> Res<u8> {
    let o = &cli.opts;
    let outcome = match cli.command {
        Command::RatioScan => return ratio_scan(o, out).map(|_| 0),
        Command::PrefixProb => prefix_prob(o),
        Command::YnLaw => yn_law(o),
        Command::Verify => verify(o),
        Command::Recover => recover(o),
        Command::ExtendCheck => extend_check(o),
        Command::Oracle => oracle(o),
        Command::TailCheck => tail_check(o),
    }?;
    out.write_all(outcome.text.as_bytes())
        .map_err(|e| Error::Parse(format!("cannot write output: {e}")))?;
    Ok(outcome.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = match open_out(cli.opts.out.as_deref()) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: cannot open output: {e}");
            return ExitCode::from(2);
        }
    };
    let code = match run(&cli, &mut out) {
        Ok(status) => status,
        Err(e) => {
            if let Some(doc) = certificate_json(&e) {
                let _ = writeln!(out, "{}", to_json_line(&doc));
            }
            eprintln!("error: {e}");
            e.exit_code() as u8
        }
    };
    if let Err(e) = out.flush() {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
