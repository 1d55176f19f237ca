//! `qbessel`: evaluate q-special functions, certify identities, tabulate the
//! product-formula kernel and follow limit transitions.
//!
//! Exit codes: 0 all checks pass, 1 usage or domain error, 2 a check failed.

mod args;
mod eval;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qbessel::identities::{
    check_identity_form, kernel_table, parameter_names, run_limit_check_form, sweep, Form, IdentityId,
};
use qbessel::qcore::{QBase, TruncationPolicy};

use args::KeyValues;
use output::Sink;

const SYMMETRY_THRESHOLD: f64 = 1e-10;
const POSITIVITY_THRESHOLD: f64 = -1e-12;
const DEFAULT_SWEEP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "qbessel", version, about = "q-series numerics and identity certification")]
struct Cli {
    /// Base q in (0, 0.99].
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<f64>,
    /// Relative residual threshold for a pass.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Relative size of a term that counts as negligible.
    #[arg(long, global = true, default_value_t = 1e-17)]
    eps_term: f64,
    /// Target relative tail bound.
    #[arg(long, global = true, default_value_t = 1e-14)]
    eps_tail: f64,
    #[arg(long, global = true, default_value_t = 10_000)]
    max_terms: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random parameter sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// printed | corrected (default depends on the identity).
    #[arg(long, global = true)]
    form: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate a function: `eval little_q_bessel_j --alpha 1.5 --z 0.25 --q 0.5`.
    Eval {
        /// Function name, or `list`.
        function: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        rest: Vec<String>,
    },
    /// Check an identity at given parameters, or at `--sweep N` random points.
    Check {
        /// Identity name, or `list`.
        identity: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        rest: Vec<String>,
    },
    /// Random sweep of an identity (`check --sweep N`; `--count N`, default 20).
    Sweep {
        identity: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        rest: Vec<String>,
    },
    /// Kernel table: `kernel --nu 1.5 --x 0:3 --y 0:3 --z -4:8`.
    Kernel {
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        rest: Vec<String>,
    },
    /// Limit transition residuals: `limits prop31|prop32 ... --indices 5,10,20`.
    Limits {
        prop: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        rest: Vec<String>,
    },
}

/// Run configuration after merging flags given before and after the name.
#[derive(Debug)]
pub struct RunConfig {
    q: Option<f64>,
    tol: f64,
    policy: TruncationPolicy,
    format: Format,
    out: Option<PathBuf>,
    seed: u64,
    form: Option<Form>,
}

impl RunConfig {
    fn q(&self) -> Result<QBase, String> {
        let q = self.q.ok_or("missing parameter 'q'")?;
        QBase::new(q).map_err(|e| e.to_string())
    }

    fn sink(&self) -> Sink {
        Sink::new(self.format, self.out.clone())
    }
}

enum Outcome {
    Pass,
    Fail,
}

fn config(cli: &Cli, kv: &KeyValues) -> Result<RunConfig, String> {
    let get = |k: &str| kv.config.get(k).map(String::as_str);
    let num = |k: &str, default: f64| -> Result<f64, String> { get(k).map_or(Ok(default), |s| args::parse_f64(k, s)) };
    let uint = |k: &str, default: u64| -> Result<u64, String> {
        get(k).map_or(Ok(default), |s| {
            s.trim()
                .parse()
                .map_err(|_| format!("--{k} must be a non-negative integer, got '{s}'"))
        })
    };
    let q = match get("q") {
        Some(s) => Some(args::parse_f64("q", s)?),
        None => cli.q,
    };
    let tol = num("tol", cli.tol)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(format!("tol must be positive, got {tol}"));
    }
    let policy = TruncationPolicy {
        eps_term: num("eps-term", cli.eps_term)?,
        eps_tail: num("eps-tail", cli.eps_tail)?,
        max_terms: uint("max-terms", cli.max_terms as u64)? as usize,
        ..TruncationPolicy::default()
    };
    policy.validate().map_err(|e| e.to_string())?;
    let format = match get("format") {
        Some(s) => Format::from_str(s, true).map_err(|_| format!("unknown format '{s}' (json | csv)"))?,
        None => cli.format,
    };
    let out = get("out").map(PathBuf::from).or_else(|| cli.out.clone());
    let form = match get("form").or(cli.form.as_deref()) {
        Some(s) => Some(s.parse::<Form>().map_err(|e| e.to_string())?),
        None => None,
    };
    Ok(RunConfig {
        q,
        tol,
        policy,
        format,
        out,
        seed: uint("seed", cli.seed)?,
        form,
    })
}

fn run(cli: Cli) -> Result<Outcome, String> {
    match &cli.cmd {
        Cmd::Eval { function, rest } => {
            if function == "list" {
                for (name, params) in eval::FUNCTIONS {
                    println!("{name}: {params}");
                }
                return Ok(Outcome::Pass);
            }
            let kv = args::split(rest)?;
            let cfg = config(&cli, &kv)?;
            let params = args::numeric(&kv.params)?;
            let r = eval::evaluate(function, &params, cfg.q()?, &cfg.policy).map_err(|e| e.to_string())?;
            cfg.sink().eval(&r)?;
            Ok(Outcome::Pass)
        }
        Cmd::Check { identity, rest } => check(&cli, identity, rest, false),
        Cmd::Sweep { identity, rest } => check(&cli, identity, rest, true),
        Cmd::Kernel { rest } => kernel(&cli, rest),
        Cmd::Limits { prop, rest } => limits(&cli, prop, rest),
    }
}

fn check(cli: &Cli, identity: &str, rest: &[String], always_sweep: bool) -> Result<Outcome, String> {
    if identity == "list" {
        for id in IdentityId::ALL {
            println!("{id}: {} (default form {:?})", parameter_names(id), id.default_form());
        }
        return Ok(Outcome::Pass);
    }
    let id: IdentityId = identity.parse().map_err(|e: qbessel::QError| e.to_string())?;
    let kv = args::split(rest)?;
    let cfg = config(cli, &kv)?;
    let q = cfg.q()?;
    let form = cfg.form.unwrap_or(id.default_form());
    let count = match kv.config.get("sweep").or(kv.config.get("count")) {
        Some(s) => Some(
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("--sweep must be a non-negative integer, got '{s}'"))?,
        ),
        None if always_sweep => Some(DEFAULT_SWEEP),
        None => None,
    };
    let reports = match count {
        Some(n) => {
            if !kv.params.is_empty() {
                return Err("a sweep draws its own parameters; drop the --name value arguments".into());
            }
            sweep(id, form, n, cfg.seed, q, &cfg.policy, cfg.tol).map_err(|e| e.to_string())?
        }
        None => {
            let mut params = args::numeric(&kv.params)?;
            params.insert("q".into(), q.value());
            vec![check_identity_form(id, form, &params, &cfg.policy, cfg.tol).map_err(|e| e.to_string())?]
        }
    };
    cfg.sink().reports(&reports, count.is_some())?;
    Ok(if reports.iter().all(|r| r.pass) {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn kernel(cli: &Cli, rest: &[String]) -> Result<Outcome, String> {
    let kv = args::split(rest)?;
    let cfg = config(cli, &kv)?;
    let q = cfg.q()?;
    let get = |k: &str| kv.params.get(k).ok_or_else(|| format!("missing parameter '{k}'"));
    for k in kv.params.keys() {
        if !["nu", "x", "y", "z"].contains(&k.as_str()) {
            return Err(format!("unknown kernel parameter '--{k}' (nu, x, y, z)"));
        }
    }
    let nu = args::parse_f64("nu", get("nu")?)?;
    let (x0, x1) = args::parse_range("x", get("x")?)?;
    let (y0, y1) = args::parse_range("y", get("y")?)?;
    let (z0, z1) = args::parse_range("z", get("z")?)?;
    let table = kernel_table(nu, x0..=x1, y0..=y1, z0..=z1, q, &cfg.policy).map_err(|e| e.to_string())?;
    cfg.sink().kernel(&table)?;
    eprintln!(
        "rows={} min_value={:?} symmetry_residual_max={:?}",
        table.grid.len(),
        table.min_value,
        table.symmetry_residual_max
    );
    Ok(
        if table.min_value >= POSITIVITY_THRESHOLD && table.symmetry_residual_max <= SYMMETRY_THRESHOLD {
            Outcome::Pass
        } else {
            Outcome::Fail
        },
    )
}

fn limits(cli: &Cli, prop: &str, rest: &[String]) -> Result<Outcome, String> {
    let id = match prop.parse::<IdentityId>() {
        Ok(id @ (IdentityId::LimitJacobiBessel | IdentityId::LimitKrawtchoukBigBessel)) => id,
        _ => return Err(format!("unknown limit '{prop}' (prop31 | prop32)")),
    };
    let kv = args::split(rest)?;
    let cfg = config(cli, &kv)?;
    let q = cfg.q()?;
    let indices = match kv.config.get("indices") {
        Some(s) => args::parse_indices(s)?,
        None if id == IdentityId::LimitJacobiBessel => vec![5, 10, 15, 20, 25],
        None => vec![5, 10, 20],
    };
    let mut params = args::numeric(&kv.params)?;
    params.insert("q".into(), q.value());
    let form = cfg.form.unwrap_or(Form::Corrected);
    let report = run_limit_check_form(id, form, &params, &indices, &cfg.policy).map_err(|e| e.to_string())?;
    cfg.sink().limit(&report)?;
    Ok(if report.monotone_tail && report.final_residual() < cfg.tol {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
