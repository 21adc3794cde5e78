//! `gsfp` — command-line front end: state probabilities, generating
//! function values, seeded sampling to disk, Lévy measure probes and the
//! validation suite, all with machine-readable output.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 numerical failure,
//! 4 validation failure.

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use gsfp::process::{pgf, pmf_auto, sample, Pmf};
use gsfp::rng::substream;
use gsfp::subordinators::{frak_v_sample, levy_identity_check, ProcessParams};
use gsfp::timefrac::{pgf_tf, pmf_tf_auto, sample_tf, TimeFracParams};
use gsfp::validate::{format_result_line, run_suite, SuiteConfig};
use gsfp::Error;

const EXIT_INVALID_CONFIG: i32 = 2;
const EXIT_NUMERICAL: i32 = 3;
const EXIT_VALIDATION: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "gsfp", version, about = "Generalized space-fractional Poisson processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// State probabilities p_k(t) for k = 0..k-max
    Pmf(PmfCmd),
    /// Probability generating function G(u, t)
    Pgf(PgfCmd),
    /// Seeded draws of the counting process (value and clock)
    Sample(SampleCmd),
    /// Lévy measure quadrature probes against the closed-form exponent
    LevyCheck(LevyCmd),
    /// Run the validation suite and report pass/fail per check
    Validate(ValidateCmd),
}

/// Parameters of the counting process and its subordinator.
#[derive(Args, Debug)]
struct ProcArgs {
    /// Stability factor ν (ν·⌈δ⌉ must lie in (0, 1])
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    /// Exponent δ > 0
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Tempering-like parameter η > 0
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Poisson rate λ > 0
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
}

impl ProcArgs {
    fn build(&self) -> Result<ProcessParams, Error> {
        ProcessParams::new(self.nu, self.delta, self.eta, self.lambda)
    }
}

/// Time-fractional extension: enabled by --tf, parameterized by the
/// regularized Prabhakar derivative.
#[derive(Args, Debug)]
struct TfArgs {
    /// Use the time-fractional process
    #[arg(long)]
    tf: bool,
    /// Inner order α ∈ (0, 1]
    #[arg(long, default_value_t = 0.6)]
    alpha: f64,
    /// Outer order β ∈ (0, 1]
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Upper Mittag-Leffler index γ ≥ 0
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Tempering weight ω > 0
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
}

impl TfArgs {
    fn build(&self) -> Result<Option<TimeFracParams>, Error> {
        if self.tf {
            Ok(Some(TimeFracParams::new(self.alpha, self.beta, self.gamma, self.omega)?))
        } else {
            Ok(None)
        }
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format: csv (with a # JSON metadata header) or json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct PmfCmd {
    #[command(flatten)]
    proc_args: ProcArgs,
    #[command(flatten)]
    tf_args: TfArgs,
    /// Evaluation time
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Largest state index
    #[arg(long, default_value_t = 20)]
    k_max: usize,
    /// Series truncation tolerance
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct PgfCmd {
    #[command(flatten)]
    proc_args: ProcArgs,
    #[command(flatten)]
    tf_args: TfArgs,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Evaluate at a single u ∈ [-1, 1] instead of the default grid
    #[arg(long)]
    u: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SampleCmd {
    #[command(flatten)]
    proc_args: ProcArgs,
    #[command(flatten)]
    tf_args: TfArgs,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Number of draws
    #[arg(long, default_value_t = 1000)]
    n_draws: usize,
    /// Master seed (substream i drives draw chunk i)
    #[arg(long)]
    seed: u64,
    /// Inverse-clock grid step for --tf (default 1e-3 · t)
    #[arg(long)]
    grid_step: Option<f64>,
    /// Emit only the subordinator clock values
    #[arg(long)]
    clock_only: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct LevyCmd {
    #[command(flatten)]
    proc_args: ProcArgs,
    /// Laplace variable(s); repeatable (default 0.5, 1, 2)
    #[arg(long)]
    mu: Vec<f64>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ValidateCmd {
    /// Run only checks whose name contains this substring
    #[arg(long)]
    only: Option<String>,
    /// Master seed for the Monte Carlo checks
    #[arg(long, default_value_t = 0x5eed_cafe)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gsfp: {e}");
            match e {
                Error::InvalidParam(_) => EXIT_INVALID_CONFIG,
                _ => EXIT_NUMERICAL,
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Pmf(cmd) => run_pmf(cmd),
        Command::Pgf(cmd) => run_pgf(cmd),
        Command::Sample(cmd) => run_sample(cmd),
        Command::LevyCheck(cmd) => run_levy(cmd),
        Command::Validate(cmd) => run_validate(cmd),
    }
}

/// A rendered table: metadata object, column names, rows of JSON values.
struct Table {
    meta: serde_json::Value,
    columns: Vec<&'static str>,
    rows: Vec<Vec<serde_json::Value>>,
}

impl Table {
    fn write(&self, output: &OutputArgs) -> Result<(), Error> {
        let body = match output.format.as_str() {
            "csv" => self.to_csv(),
            "json" => self.to_json(),
            other => {
                return Err(Error::InvalidParam(format!(
                    "format must be csv or json, got {other}"
                )))
            }
        };
        match &output.out {
            Some(path) => std::fs::write(path, body)
                .map_err(|e| Error::InvalidParam(format!("cannot write {}: {e}", path.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(body.as_bytes())
                    .map_err(|e| Error::InvalidParam(format!("cannot write stdout: {e}")))
            }
        }
    }

    fn to_csv(&self) -> String {
        let mut s = format!("# {}\n", self.meta);
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    serde_json::Value::String(x) => x.clone(),
                    other => other.to_string(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.clone()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "meta": self.meta, "rows": rows });
        format!("{doc:#}\n")
    }
}

fn f(v: f64) -> serde_json::Value {
    serde_json::json!(v)
}

fn pmf_rows(pmf: &Pmf) -> Vec<Vec<serde_json::Value>> {
    pmf.probs
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            vec![
                serde_json::json!(k),
                f(p),
                serde_json::json!(pmf.method.as_str()),
                f(pmf.est_tail),
            ]
        })
        .collect()
}

fn run_pmf(cmd: PmfCmd) -> Result<i32, Error> {
    let params = cmd.proc_args.build()?;
    let tf = cmd.tf_args.build()?;
    let pmf = match &tf {
        Some(q) => pmf_tf_auto(&params, q, cmd.t, cmd.k_max, cmd.tol)?,
        None => pmf_auto(&params, cmd.t, cmd.k_max, cmd.tol)?,
    };
    let meta = serde_json::json!({
        "command": "pmf",
        "nu": params.nu(), "delta": params.delta(), "eta": params.eta(),
        "lambda": params.lambda(), "t": cmd.t, "k_max": cmd.k_max, "tol": cmd.tol,
        "tf": tf.as_ref().map(|q| serde_json::json!({
            "alpha": q.alpha(), "beta": q.beta(), "gamma": q.gamma(), "omega": q.omega(),
        })),
        "version": env!("CARGO_PKG_VERSION"),
    });
    let table =
        Table { meta, columns: vec!["k", "p_k", "method", "tail_estimate"], rows: pmf_rows(&pmf) };
    table.write(&cmd.output)?;
    Ok(0)
}

fn run_pgf(cmd: PgfCmd) -> Result<i32, Error> {
    let params = cmd.proc_args.build()?;
    let tf = cmd.tf_args.build()?;
    let us: Vec<f64> = match cmd.u {
        Some(u) => {
            if !(-1.0..=1.0).contains(&u) {
                return Err(Error::InvalidParam(format!("u must lie in [-1, 1], got {u}")));
            }
            vec![u]
        }
        None => (0..=40).map(|i| -1.0 + i as f64 * 0.05).collect(),
    };
    let mut rows = Vec::new();
    for &u in &us {
        let g = match &tf {
            Some(q) => pgf_tf(&params, q, u, cmd.t, cmd.tol)?,
            None => pgf(&params, u, cmd.t),
        };
        rows.push(vec![f(u), f(g)]);
    }
    let meta = serde_json::json!({
        "command": "pgf",
        "nu": params.nu(), "delta": params.delta(), "eta": params.eta(),
        "lambda": params.lambda(), "t": cmd.t, "tol": cmd.tol,
        "tf": tf.as_ref().map(|q| serde_json::json!({
            "alpha": q.alpha(), "beta": q.beta(), "gamma": q.gamma(), "omega": q.omega(),
        })),
        "version": env!("CARGO_PKG_VERSION"),
    });
    let table = Table { meta, columns: vec!["u", "g"], rows };
    table.write(&cmd.output)?;
    Ok(0)
}

/// Draws are split into fixed chunks, one RNG substream per chunk, so the
/// file content is a function of the seed alone no matter how rayon
/// schedules the chunks.
const SAMPLE_CHUNK: usize = 8192;

fn run_sample(cmd: SampleCmd) -> Result<i32, Error> {
    let params = cmd.proc_args.build()?;
    let tf = cmd.tf_args.build()?;
    let grid_step = cmd.grid_step.unwrap_or(1e-3 * cmd.t);
    let n = cmd.n_draws;
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    let results: Vec<Result<Vec<(u64, f64)>, Error>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(cmd.seed, c as u64);
            let take = SAMPLE_CHUNK.min(n - c * SAMPLE_CHUNK);
            let mut chunk = Vec::with_capacity(take);
            for _ in 0..take {
                let (value, clock) = match (&tf, cmd.clock_only) {
                    (Some(q), false) => {
                        let s = sample_tf(&params, q, cmd.t, grid_step, &mut rng)?;
                        (s.value, s.clock_value)
                    }
                    (Some(q), true) => {
                        let u = gsfp::timefrac::inverse_clock_sample(q, cmd.t, grid_step, &mut rng)?;
                        let v = frak_v_sample(&params, u, &mut rng)?;
                        (0, v)
                    }
                    (None, false) => {
                        let s = sample(&params, cmd.t, &mut rng)?;
                        (s.value, s.clock_value)
                    }
                    (None, true) => (0, frak_v_sample(&params, cmd.t, &mut rng)?),
                };
                chunk.push((value, clock));
            }
            Ok(chunk)
        })
        .collect();

    let mut rows = Vec::with_capacity(n);
    let mut idx = 0usize;
    for chunk in results {
        for (value, clock) in chunk? {
            if cmd.clock_only {
                rows.push(vec![serde_json::json!(idx), f(cmd.t), f(clock)]);
            } else {
                rows.push(vec![serde_json::json!(idx), f(cmd.t), serde_json::json!(value), f(clock)]);
            }
            idx += 1;
        }
    }
    let meta = serde_json::json!({
        "command": "sample",
        "nu": params.nu(), "delta": params.delta(), "eta": params.eta(),
        "lambda": params.lambda(), "t": cmd.t, "n_draws": n, "seed": cmd.seed,
        "grid_step": if tf.is_some() { Some(grid_step) } else { None },
        "clock_only": cmd.clock_only,
        "tf": tf.as_ref().map(|q| serde_json::json!({
            "alpha": q.alpha(), "beta": q.beta(), "gamma": q.gamma(), "omega": q.omega(),
        })),
        "version": env!("CARGO_PKG_VERSION"),
    });
    let columns = if cmd.clock_only {
        vec!["draw_index", "t", "clock_value"]
    } else {
        vec!["draw_index", "t", "value", "clock_value"]
    };
    let table = Table { meta, columns, rows };
    table.write(&cmd.output)?;
    Ok(0)
}

fn run_levy(cmd: LevyCmd) -> Result<i32, Error> {
    let params = cmd.proc_args.build()?;
    let mus = if cmd.mu.is_empty() { vec![0.5, 1.0, 2.0] } else { cmd.mu.clone() };
    let mut rows = Vec::new();
    for &mu in &mus {
        let probe = levy_identity_check(&params, mu, cmd.tol)?;
        rows.push(vec![
            f(probe.mu),
            f(probe.closed_form),
            f(probe.estimate),
            f((probe.estimate - probe.closed_form).abs()),
            f(probe.error_bound),
        ]);
    }
    let meta = serde_json::json!({
        "command": "levy-check",
        "nu": params.nu(), "delta": params.delta(), "eta": params.eta(),
        "lambda": params.lambda(), "mu": mus, "tol": cmd.tol,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let table = Table {
        meta,
        columns: vec!["mu", "closed_form", "estimate", "abs_error", "error_bound"],
        rows,
    };
    table.write(&cmd.output)?;
    Ok(0)
}

fn run_validate(cmd: ValidateCmd) -> Result<i32, Error> {
    let cfg = SuiteConfig { seed: cmd.seed, only: cmd.only.clone() };
    let results = run_suite(&cfg);
    if results.is_empty() {
        return Err(Error::InvalidParam(format!(
            "--only {:?} matched no checks",
            cmd.only.unwrap_or_default()
        )));
    }
    for r in &results {
        eprintln!("{}", format_result_line(r));
    }
    let rows: Vec<Vec<serde_json::Value>> = results
        .iter()
        .map(|r| {
            vec![
                serde_json::json!(r.name),
                f(r.target),
                f(r.achieved),
                serde_json::json!(r.pass),
                serde_json::json!(r.note),
            ]
        })
        .collect();
    let meta = serde_json::json!({
        "command": "validate",
        "seed": cmd.seed,
        "only": cmd.only,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let table =
        Table { meta, columns: vec!["name", "target", "achieved", "pass", "note"], rows };
    table.write(&cmd.output)?;
    Ok(if results.iter().all(|r| r.pass) { 0 } else { EXIT_VALIDATION })
}
