//! `riesz`: potentials, centers, unfolded regions, constants and checks from the shell.
//!
//! Exit codes: 0 success or pass, 1 usage or input error, 2 a check failed, 3 a check
//! was inconclusive.

mod lemma;
mod output;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{render, to_json, Format};
use rayon::prelude::*;
use riesz_core::centers::{find_center, CenterConfig};
use riesz_core::constants::{a0, alpha0, c0, f_const, g_parts, phi, psi, psi_forms};
use riesz_core::potential::report;
use riesz_core::unfolded::{unfolded_region, FoldMethod, UnfoldedConfig};
use riesz_core::{BodyF64, LemmaId, ParamsF64, SpecF64, Verdict};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const THREADS_VAR: &str = "RIESZ_THREADS";

#[derive(Parser)]
#[command(name = "riesz", version, about = "Riesz potentials of convex bodies and their centers")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    output: Format,
    /// JSON file with default resolutions and tolerances; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Keys accepted in `--config`.
#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields, default)]
struct FileConfig {
    sphere_res: Option<usize>,
    quad_tol: Option<f64>,
    starts: Option<usize>,
    max_iter: Option<usize>,
    seed: Option<u64>,
    dirs: Option<usize>,
    samples: Option<usize>,
}

#[derive(Args, Clone)]
struct KernelArgs {
    /// Riesz exponent.
    #[arg(long, required_unless_present = "log", conflicts_with = "log")]
    alpha: Option<f64>,
    /// Logarithmic kernel.
    #[arg(long)]
    log: bool,
    /// Resolution of the sphere grid of section normals.
    #[arg(long)]
    sphere_res: Option<usize>,
    /// Relative tolerance of the angular integrals.
    #[arg(long)]
    quad_tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Value, gradient and Hessian diagonal of the potential at a point.
    Potential {
        #[arg(long)]
        body: PathBuf,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[command(flatten)]
        kernel: KernelArgs,
    },
    /// Extremizer of the potential by multi-start projected descent.
    Center {
        #[arg(long)]
        body: PathBuf,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fold offsets over sampled directions and the vertices of the region they cut.
    Unfolded {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        dirs: Option<usize>,
        /// Boundary samples.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, value_enum, default_value = "chord")]
        method: Method,
    },
    /// One of the explicit constants.
    Constants {
        #[command(flatten)]
        c: ConstArgs,
    },
    /// Runs a check and reports per-case verdicts.
    Verify {
        /// 3.2, 3.3, 3.4, 3.5, main, change_of_variables or unfolded_in_hull.
        #[arg(long, value_parser = lemma::parse_lemma)]
        lemma: LemmaId,
        /// JSON parameters; defaults to the built-in sweep.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Also write one CSV row per case here.
        #[arg(long)]
        sweep: Option<PathBuf>,
    },
    /// A constant over an evenly spaced range of its exponent (or of `b` for alpha0).
    Sweep {
        #[command(flatten)]
        c: ConstArgs,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 16)]
        steps: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Chord,
    Scan,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Psi,
    A0,
    C0,
    F,
    G,
    Alpha0,
    Phi,
}

#[derive(Args, Clone)]
struct ConstArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    what: What,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    xi0: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
}

#[derive(Serialize)]
struct PotentialOut {
    value: f64,
    grad: Vec<f64>,
    hessian_diag: Vec<f64>,
    error_estimates: ErrorsOut,
}

#[derive(Serialize)]
struct ErrorsOut {
    value: f64,
    grad: Vec<f64>,
    hessian_diag: Vec<f64>,
}

#[derive(Serialize)]
struct UnfoldedOut {
    directions: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    hull_points: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct ConstOut {
    value: f64,
    aux: Value,
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    // serde_json's message already ends with the line and column.
    serde_json::from_str(&text).map_err(|e| anyhow!("malformed JSON in {}: {e}", path.display()))
}

fn load_body(path: &Path) -> Result<BodyF64> {
    let spec: SpecF64 = read_json(path)?;
    Ok(BodyF64::new(spec)?)
}

fn parse_point(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad coordinate `{t}` in --point")))
        .collect()
}

fn kernel_params(k: &KernelArgs, cfg: &FileConfig) -> ParamsF64 {
    let mut p = match k.alpha {
        Some(a) if !k.log => ParamsF64::riesz(a),
        _ => ParamsF64::log(),
    };
    if let Some(r) = k.sphere_res.or(cfg.sphere_res) {
        p = p.with_sphere_res(r);
    }
    if let Some(t) = k.quad_tol.or(cfg.quad_tol) {
        p = p.with_quad_tol(t);
    }
    p
}

fn need(v: Option<f64>, name: &str, what: &str) -> Result<f64> {
    v.ok_or_else(|| anyhow!("--what {what} needs --{name}"))
}

fn constant(c: &ConstArgs) -> Result<ConstOut> {
    let n = c.n;
    Ok(match c.what {
        What::Psi => {
            let (alpha, cc) = (need(c.alpha, "alpha", "psi")?, need(c.c, "c", "psi")?);
            let (closed, root) = psi_forms(n, alpha, cc)?;
            ConstOut {
                value: psi(n, alpha, cc)?,
                aux: json!({ "closed_form": closed, "root_form": root }),
            }
        }
        What::A0 => {
            let (alpha, xi0) = (need(c.alpha, "alpha", "a0")?, need(c.xi0, "xi0", "a0")?);
            ConstOut {
                value: a0(n, alpha, xi0)?,
                aux: json!({ "c0": c0(xi0) }),
            }
        }
        What::C0 => ConstOut {
            value: c0(need(c.xi0, "xi0", "c0")?),
            aux: json!({}),
        },
        What::F => ConstOut {
            value: f_const(n, need(c.alpha, "alpha", "f")?)?,
            aux: json!({}),
        },
        What::G => {
            let g = g_parts(n, need(c.alpha, "alpha", "g")?, need(c.beta, "beta", "g")?)?;
            ConstOut {
                value: g.value,
                aux: json!({ "ball": g.ball, "shell": g.shell, "error": g.error }),
            }
        }
        What::Alpha0 => ConstOut {
            value: alpha0(n, need(c.b, "b", "alpha0")?)?,
            aux: json!({ "grid": riesz_core::constants::ALPHA_GRID }),
        },
        What::Phi => {
            let r = phi::<f64>(n)?;
            ConstOut {
                value: r.value,
                aux: json!({
                    "computed_sup": r.computed_sup,
                    "alpha0": r.alpha0,
                    "grid": r.grid,
                    "argmax": r.argmax,
                }),
            }
        }
    })
}

fn sweep(c: &ConstArgs, from: f64, to: f64, steps: usize) -> Result<Vec<Value>> {
    if steps < 2 {
        bail!("--steps must be at least 2");
    }
    let (key, name) = match c.what {
        What::Alpha0 => ("b", "b"),
        What::C0 => ("xi0", "xi0"),
        What::Phi => bail!("phi has no free parameter to sweep"),
        _ => ("alpha", "alpha"),
    };
    (0..steps)
        .into_par_iter()
        .map(|k| {
            let t = from + (to - from) * k as f64 / (steps - 1) as f64;
            let mut a = c.clone();
            match key {
                "b" => a.b = Some(t),
                "xi0" => a.xi0 = Some(t),
                _ => a.alpha = Some(t),
            }
            let v = constant(&a)?;
            Ok(json!({ "n": c.n, name: t, "value": v.value }))
        })
        .collect()
}

enum Outcome {
    Text(String),
    Verdict(String, Verdict),
}

fn run(cli: Cli) -> Result<Outcome> {
    let cfg: FileConfig = match &cli.config {
        Some(p) => read_json(p)?,
        None => FileConfig::default(),
    };
    let fmt = cli.output;
    Ok(match cli.command {
        Command::Potential { body, point, kernel } => {
            let body = load_body(&body)?;
            let x = parse_point(&point)?;
            let r = report(&body, &x, &kernel_params(&kernel, &cfg))?;
            Outcome::Text(render(
                &PotentialOut {
                    value: r.value.value,
                    grad: r.grad.value,
                    hessian_diag: r.hessian_diag.value,
                    error_estimates: ErrorsOut {
                        value: r.value.error,
                        grad: r.grad.error,
                        hessian_diag: r.hessian_diag.error,
                    },
                },
                fmt,
            )?)
        }
        Command::Center { body, kernel, starts, max_iter, seed } => {
            let body = load_body(&body)?;
            let d = CenterConfig::default();
            let cc = CenterConfig {
                starts: starts.or(cfg.starts).unwrap_or(d.starts),
                max_iter: max_iter.or(cfg.max_iter).unwrap_or(d.max_iter),
                seed: seed.or(cfg.seed).unwrap_or(d.seed),
                ..d
            };
            let r = find_center(&body, &kernel_params(&kernel, &cfg), &cc)?;
            Outcome::Text(render(&r, fmt)?)
        }
        Command::Unfolded { body, dirs, samples, method } => {
            let body = load_body(&body)?;
            let uc = UnfoldedConfig {
                samples: samples.or(cfg.samples),
                method: match method {
                    Method::Chord => FoldMethod::Chord,
                    Method::Scan => FoldMethod::Scan,
                },
                ..UnfoldedConfig::default()
            };
            let n = body.dim();
            let dirs = dirs
                .or(cfg.dirs)
                .unwrap_or_else(|| riesz_core::unfolded::default_dir_res(n));
            let r = unfolded_region(&body, dirs, &uc)?;
            let text = match fmt {
                Format::Json => render(
                    &UnfoldedOut {
                        directions: r.directions,
                        offsets: r.offsets,
                        hull_points: r.hull_points,
                    },
                    fmt,
                )?,
                // One row per direction.
                Format::Csv => {
                    let rows: Vec<Value> = r
                        .directions
                        .iter()
                        .zip(&r.offsets)
                        .map(|(v, u)| json!({ "direction": v, "offset": u }))
                        .collect();
                    render(&rows, fmt)?
                }
            };
            Outcome::Text(text)
        }
        Command::Constants { c } => Outcome::Text(render(&constant(&c)?, fmt)?),
        Command::Verify { lemma, params, sweep } => {
            let r = lemma::run_lemma(lemma, params.as_deref())?;
            let csv = lemma::report_csv(&r)?;
            if let Some(path) = sweep {
                std::fs::write(&path, &csv).with_context(|| format!("writing {}", path.display()))?;
            }
            let text = match fmt {
                Format::Json => to_json(&r)? + "\n",
                Format::Csv => csv,
            };
            let (p, f, i) = r.counts();
            eprintln!(
                "{}: {} ({p} pass, {f} fail, {i} inconclusive)",
                r.lemma_id.as_str(),
                r.verdict.as_str()
            );
            Outcome::Verdict(text, r.verdict)
        }
        Command::Sweep { c, from, to, steps } => Outcome::Text(render(&sweep(&c, from, to, steps)?, fmt)?),
    })
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("{THREADS_VAR} must be a positive integer, got `{v}`"))?;
        if n == 0 {
            bail!("{THREADS_VAR} must be a positive integer, got 0");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 2,
        Verdict::Inconclusive => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = init_threads().and_then(|_| run(cli));
    match outcome {
        Ok(Outcome::Text(t)) => {
            print!("{t}");
            ExitCode::SUCCESS
        }
        Ok(Outcome::Verdict(t, v)) => {
            print!("{t}");
            ExitCode::from(verdict_code(v))
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
