use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maitland::quad::{edward_integral, shifted_edward, QuadResult};
use maitland::series::{master_series, named_reduction, MasterParams, NamedFunction, SeriesStatus, SeriesValue};
use maitland::verify::{
    reports_to_csv, summarize, sweep, verify_identity_with, IdentityId, IdentityReport, ParamPoint, SkipCause,
    SweepConfig, SweepOutput, Variant, Verdict,
};
use serde::Serialize;
use thiserror::Error;

const SERIES_TOL: f64 = 1e-14;
const QUAD_TOL: f64 = 1e-10;

const FN_HELP: &str = "Function to evaluate. Series take --z; quadratures do not.
  ml1p              E_α(z) = Σ z^n / Γ(αn+1)                        --alpha
  ml2p              E_{α,β}(z) = Σ z^n / Γ(αn+β)                    --alpha --beta
  prabhakar         Σ (γ)_n z^n / (n! Γ(αn+β))                      --alpha --beta --gamma
  shukla_prajapati  Σ (γ)_{qn} z^n / (n! Γ(αn+β))                   --alpha --beta --gamma --q
  salim             Σ (γ)_n z^n / ((δ)_n Γ(αn+β))                   --alpha --beta --gamma --delta
  salim_faraj       Σ (γ)_{qn} z^n / ((δ)_{pn} Γ(αn+β))             --alpha --beta --gamma --delta --p --q
  bm_basic          J^μ_ν(z) = Σ (−z)^n / (n! Γ(μn+ν+1))            --mu --nu
  bm_q              Σ (γ)_{qn} (−z)^n / (n! Γ(μn+ν+1))              --mu --nu --gamma --q
  bm_ext            Σ (γ)_{qn} (−z)^n / ((δ)_{pn} Γ(μn+ν+1))        --mu --nu --gamma --delta --p --q
  master            Σ (γ)_{qn} z^n / ((δ)_{pn} Γ(ηn+β))             --eta --beta --gamma --delta --p --q
  edward            ∬ Edward kernel over the unit square            --lambda --mu
  shifted_edward    Edward kernel times g(x,y)^n                    --lambda --mu --n";

/// Bessel-Maitland, Mittag-Leffler and Wright series with quadrature-based
/// identity checks.
#[derive(Debug, Parser)]
#[command(name = "maitland", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one function and print its value as JSON.
    Eval(EvalArgs),
    /// Check one identity at one parameter point and print the report.
    Verify(VerifyArgs),
    /// Run a parameter sweep described by a JSON config.
    Sweep(SweepArgs),
    /// Re-render a sweep report file.
    Report(ReportArgs),
}

#[derive(Debug, Args, Default)]
struct ParamFlags {
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    nu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long)]
    n: Option<u32>,
}

impl ParamFlags {
    fn present(&self) -> Vec<(&'static str, f64)> {
        let all = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("p", self.p),
            ("q", self.q),
            ("eta", self.eta),
            ("mu", self.mu),
            ("nu", self.nu),
            ("lambda", self.lambda),
            ("a", self.a),
            ("n", self.n.map(f64::from)),
        ];
        all.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }

    /// Values of `names` in order; every name is required and no other flag
    /// may be set.
    fn exactly(&self, target: &str, names: &[&str]) -> Result<Vec<f64>, CliError> {
        let present = self.present();
        if let Some((extra, _)) = present.iter().find(|(k, _)| !names.contains(k)) {
            return Err(CliError::Validation(format!("--{extra} is not a parameter of {target}")));
        }
        names
            .iter()
            .map(|name| {
                present
                    .iter()
                    .find(|(k, _)| k == name)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| CliError::Validation(format!("{target} needs --{name}")))
            })
            .collect()
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long = "fn", help = FN_HELP)]
    function: String,
    #[command(flatten)]
    params: ParamFlags,
    #[arg(long, allow_negative_numbers = true)]
    z: Option<f64>,
    /// Series truncation tolerance [default: 1e-14], or relative quadrature
    /// tolerance [default: 1e-10].
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Identity id: edward, termwise, thm21_wright, thm21_pfq, sc1 .. sc10.
    #[arg(long)]
    id: String,
    #[command(flatten)]
    params: ParamFlags,
    /// Verdict tolerance on the relative difference [default: 1e-8 for edward
    /// and termwise, 1e-6 otherwise].
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = VariantArg::Canonical)]
    variant: VariantArg,
    /// Largest quadrature rule per axis.
    #[arg(long, default_value_t = 256)]
    budget: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Canonical,
    Asprinted,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Canonical => Variant::Canonical,
            VariantArg::Asprinted => Variant::AsPrinted,
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON file mirroring the sweep configuration.
    #[arg(long)]
    config: PathBuf,
    /// Report file; overrides the config's `output`. Defaults to
    /// sweep_report.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the reports as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Report file written by `sweep`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("{0} point(s) failed")]
    Failures(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Failures(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }
}

impl From<maitland::Error> for CliError {
    fn from(e: maitland::Error) -> Self {
        match e {
            maitland::Error::Numerical(m) => CliError::NonConvergence(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(value).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{s}").map_err(|e| CliError::Validation(e.to_string()))
}

fn check_series(v: SeriesValue) -> Result<SeriesValue, CliError> {
    match v.status {
        SeriesStatus::Converged => Ok(v),
        SeriesStatus::OutsideDomain => Err(CliError::Validation(
            "argument lies outside the convergence domain of the series".into(),
        )),
        SeriesStatus::MaxTermsReached => Err(CliError::NonConvergence(format!(
            "series did not converge within {} terms (tail estimate {:e})",
            v.terms_used, v.tail_estimate
        ))),
    }
}

fn check_quad(q: QuadResult) -> Result<QuadResult, CliError> {
    if q.converged {
        Ok(q)
    } else {
        Err(CliError::NonConvergence(format!(
            "quadrature did not converge at {} nodes per axis (error estimate {:e})",
            q.nodes_per_axis, q.error_estimate
        )))
    }
}

fn run_eval(args: &EvalArgs) -> Result<(), CliError> {
    let name = args.function.as_str();
    let need_z = || {
        args.z
            .ok_or_else(|| CliError::Validation(format!("{name} needs --z")))
    };
    let no_z = || match args.z {
        Some(_) => Err(CliError::Validation(format!("--z is not a parameter of {name}"))),
        None => Ok(()),
    };
    match name {
        "edward" => {
            no_z()?;
            let v = args.params.exactly(name, &["lambda", "mu"])?;
            print_json(&check_quad(edward_integral(v[0], v[1], args.tol.unwrap_or(QUAD_TOL))?)?)
        }
        "shifted_edward" => {
            no_z()?;
            let v = args.params.exactly(name, &["lambda", "mu", "n"])?;
            print_json(&check_quad(shifted_edward(v[0], v[1], v[2] as u32, args.tol.unwrap_or(QUAD_TOL))?)?)
        }
        "master" => {
            let v = args.params.exactly(name, &["eta", "beta", "gamma", "delta", "p", "q"])?;
            let z = need_z()?;
            let mp = MasterParams::new(v[0], v[1], v[2], v[3], v[4], v[5])?;
            print_json(&check_series(master_series(&mp, z, args.tol.unwrap_or(SERIES_TOL))?)?)
        }
        _ => {
            let f = NamedFunction::from_cli_name(name)
                .ok_or_else(|| CliError::Validation(format!("unknown function '{name}'")))?;
            let flags: &[&str] = match f {
                NamedFunction::Ml1p => &["alpha"],
                NamedFunction::Ml2p => &["alpha", "beta"],
                NamedFunction::Prabhakar => &["alpha", "beta", "gamma"],
                NamedFunction::ShuklaPrajapati => &["alpha", "beta", "gamma", "q"],
                NamedFunction::Salim => &["alpha", "beta", "gamma", "delta"],
                NamedFunction::SalimFaraj => &["alpha", "beta", "gamma", "delta", "p", "q"],
                NamedFunction::BmBasic => &["mu", "nu"],
                NamedFunction::BmQ => &["mu", "nu", "gamma", "q"],
                NamedFunction::BmExt => &["mu", "nu", "gamma", "delta", "p", "q"],
            };
            let v = args.params.exactly(name, flags)?;
            let z = need_z()?;
            print_json(&check_series(named_reduction(f, &v, z, args.tol.unwrap_or(SERIES_TOL))?)?)
        }
    }
}

fn verdict_outcome(reports: &[IdentityReport]) -> Result<(), CliError> {
    let fails = reports.iter().filter(|r| r.verdict.is_fail()).count();
    if fails > 0 {
        return Err(CliError::Failures(fails));
    }
    let stalled = reports
        .iter()
        .filter(|r| matches!(r.verdict, Verdict::Skipped { cause: SkipCause::NonConvergence, .. }))
        .count();
    if stalled > 0 {
        return Err(CliError::NonConvergence(format!("{stalled} point(s) did not converge")));
    }
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let id: IdentityId = args.id.parse()?;
    let mut pt = ParamPoint::NEUTRAL;
    for (k, v) in args.params.present() {
        let param = id
            .relevant()
            .iter()
            .find(|p| p.name() == k)
            .ok_or_else(|| CliError::Validation(format!("--{k} is not a parameter of {id}")))?;
        pt.set(*param, v);
    }
    let tol = args.tol.unwrap_or(id.default_tolerance());
    let report = verify_identity_with(id, &pt, tol, args.variant.into(), args.budget)?;
    print_json(&report)?;
    if let Verdict::Skipped {
        cause: SkipCause::Precondition,
        reason,
    } = &report.verdict
    {
        return Err(CliError::Validation(format!("skipped: {reason}")));
    }
    verdict_outcome(std::slice::from_ref(&report))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))
}

fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let text = read_file(&args.config)?;
    let config: SweepConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("invalid config {}: {e}", args.config.display())))?;
    let out_path = args
        .out
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("sweep_report.json"));
    let output = sweep(&config)?;
    let json = serde_json::to_string_pretty(&output).map_err(|e| CliError::Validation(e.to_string()))?;
    write_file(&out_path, &json)?;
    if let Some(csv_path) = &args.csv {
        write_file(csv_path, &reports_to_csv(&output.reports)?)?;
    }
    print_json(&output.summary)?;
    verdict_outcome(&output.reports)
}

fn run_report(args: &ReportArgs) -> Result<(), CliError> {
    let text = read_file(&args.input)?;
    let reports: Vec<IdentityReport> = match serde_json::from_str::<SweepOutput>(&text) {
        Ok(out) => out.reports,
        Err(_) => serde_json::from_str(&text).map_err(|e| {
            CliError::Validation(format!("{} is not a sweep report: {e}", args.input.display()))
        })?,
    };
    match args.format {
        Format::Json => print_json(&SweepOutput {
            summary: summarize(&reports),
            reports,
        }),
        Format::Csv => {
            let csv = reports_to_csv(&reports)?;
            std::io::stdout()
                .lock()
                .write_all(csv.as_bytes())
                .map_err(|e| CliError::Validation(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Eval(a) => run_eval(a),
        Command::Verify(a) => run_verify(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Report(a) => run_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("maitland: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
