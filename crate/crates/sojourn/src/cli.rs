//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a computation fails or `verify` finds a
//! failing criterion, 2 for usage errors (bad flags, out-of-range
//! parameters, unsupported model/route combinations).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::bail;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sojourn_core::halfstable::HalfStableLaw;
use sojourn_core::laplace::{self, g_closed_constant, g_closed_halfstable, g_double_laplace_quadrature, LaplaceQuery};
use sojourn_core::moments::{self, MomentEntry, MomentMethod, MomentTable};
use sojourn_core::occupation::{simulate_occupation_at_exp, DEFAULT_STEPS};
use sojourn_core::poisson_rep::{sample_colored_gammas, sample_poisson_sums, IntensitySpec};
use sojourn_core::{Error as CoreError, Positivity, ProcessModel};

use crate::output::{open_output, write_csv, write_json, Header};
use crate::parallel::Parallel;
use crate::verify::{self, Mode};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "sojourn", version, about = "Positive sojourn times of Lévy processes")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LaplaceMethod {
    Quad,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MomentsMethod {
    Partition,
    Bell,
    Mc,
}

#[derive(Debug, clap::Args)]
pub struct SeedArg {
    /// Master seed; falls back to $SOJOURN_SEED, then 42.
    #[arg(long, env = "SOJOURN_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print P(X_t > 0).
    Positivity {
        #[arg(long)]
        model: ProcessModel,
        #[arg(long)]
        t: f64,
    },
    /// Monte Carlo samples of A_t (or A_E with E ~ Exp(q) when --exp-q is set).
    SimulateOccupation {
        #[arg(long)]
        model: ProcessModel,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long)]
        exp_q: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        /// Grid steps on [0, t], or per unit time with --exp-q.
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sums of the Poisson point process representing A at an Exp(q) time.
    PoissonSum {
        #[arg(long)]
        model: ProcessModel,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Truncation level (default 1e-9/q).
        #[arg(long)]
        epsilon: Option<f64>,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Black and white sums of a coloured gamma process.
    ColoredGamma {
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Moments E[A_t^m], m = 1..max-m, as JSON.
    Moments {
        #[arg(long)]
        model: ProcessModel,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 4)]
        max_m: usize,
        #[arg(long, value_enum, default_value_t = MomentsMethod::Partition)]
        method: MomentsMethod,
        /// Convolution grid for the partition method.
        #[arg(long, default_value_t = 512)]
        grid: usize,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        #[arg(long, default_value_t = 1024)]
        steps: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the double Laplace transform G(q, λ).
    Laplace {
        #[arg(long)]
        model: ProcessModel,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = LaplaceMethod::Quad)]
        method: LaplaceMethod,
    },
    /// Print E[exp(-λ A_t)] by Gaver–Stehfest inversion of q ↦ G(q, λ).
    Invert {
        #[arg(long)]
        model: ProcessModel,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = laplace::DEFAULT_STAGES)]
        stages: usize,
        #[arg(long, value_enum, default_value_t = LaplaceMethod::Quad)]
        method: LaplaceMethod,
    },
    /// Density and CDF of A_t for the half-stable subordinator with drift -μ.
    HalfstableDensity {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Verify {
        #[command(flatten)]
        seed: SeedArg,
        /// 10x fewer Monte Carlo samples, with KS tolerances scaled by √10.
        #[arg(long)]
        quick: bool,
        /// Restrict to these criterion ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Also write the full report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// Marks errors that should map to exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

fn core<T>(r: sojourn_core::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| match e {
        CoreError::InvalidArgument(_) | CoreError::UnsupportedModel(_) | CoreError::ModelSpec(_) => usage(e.to_string()),
        other => anyhow::Error::new(other),
    })
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Parses `argv` (including the program name), runs and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                2
            } else {
                1
            }
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<i32> {
    let exec = || Parallel::new(cli.threads).map_err(|e| usage(e.to_string()));
    match cli.command {
        Command::Positivity { model, t } => {
            let p = core(sojourn_core::models::positivity(&model, t))?;
            println!("{p}");
        }
        Command::SimulateOccupation { model, t, exp_q, paths, steps, seed, out } => {
            let exec = exec()?;
            let mut w = open_output(out.as_deref())?;
            let header = Header::new(model.to_string(), seed.seed, paths as u64).param("steps", steps as f64);
            let rows: Vec<(f64, f64)> = match exp_q {
                Some(q) => {
                    let run = core(simulate_occupation_at_exp(&model, q, steps, paths, seed.seed, &exec))?;
                    run.horizons.into_iter().zip(run.values).map(|(h, a)| (a, h)).collect()
                }
                None => core(sample_indexed_occupations(&model, t, steps, paths, seed.seed, &exec))?
                    .into_iter()
                    .map(|a| (a, t))
                    .collect(),
            };
            let header = match exp_q {
                Some(q) => header.param("q", q),
                None => header.param("t", t),
            };
            write_csv(
                &mut w,
                &header,
                &["sample_index", "a_value", "horizon"],
                rows.iter().enumerate().map(|(i, (a, h))| vec![i.to_string(), fmt_f64(*a), fmt_f64(*h)]),
            )?;
            w.flush()?;
        }
        Command::PoissonSum { model, q, samples, epsilon, seed, out } => {
            let exec = exec()?;
            let p = core(model.positivity_function())?;
            let spec = core(match epsilon {
                Some(e) => IntensitySpec::new(q, p, e),
                None => IntensitySpec::with_default_epsilon(q, p),
            })?;
            let sums = core(sample_poisson_sums(&spec, samples, seed.seed, &exec))?;
            let header = Header::new(model.to_string(), seed.seed, samples as u64)
                .param("q", q)
                .param("epsilon", spec.epsilon())
                .param("truncation_bias_bound", spec.truncation_bias_bound());
            let mut w = open_output(out.as_deref())?;
            write_csv(
                &mut w,
                &header,
                &["sample_index", "total", "n_points"],
                sums.iter().enumerate().map(|(i, s)| vec![i.to_string(), fmt_f64(s.total), s.points.len().to_string()]),
            )?;
            w.flush()?;
        }
        Command::ColoredGamma { c, q, samples, seed, out } => {
            let exec = exec()?;
            let pairs = core(sample_colored_gammas(c, q, samples, seed.seed, &exec))?;
            let header = Header::new(format!("colored-gamma:{c}"), seed.seed, samples as u64).param("c", c).param("q", q);
            let mut w = open_output(out.as_deref())?;
            write_csv(
                &mut w,
                &header,
                &["sample_index", "black", "white", "ratio"],
                pairs.iter().enumerate().map(|(i, (b, wh))| {
                    let total = b + wh;
                    let ratio = if total > 0.0 { b / total } else { f64::NAN };
                    vec![i.to_string(), fmt_f64(*b), fmt_f64(*wh), fmt_f64(ratio)]
                }),
            )?;
            w.flush()?;
        }
        Command::Moments { model, t, max_m, method, grid, paths, steps, seed, out } => {
            if max_m == 0 {
                return Err(usage("--max-m must be at least 1"));
            }
            let (table, streams) = match method {
                MomentsMethod::Partition => {
                    let p = core(model.positivity_function())?;
                    (core(moments::moment_table_partition(&p, t, max_m, grid))?, 0)
                }
                MomentsMethod::Bell => {
                    let p = core(model.positivity_function())?;
                    let mut entries = Vec::new();
                    for m in 1..=max_m {
                        let e = core(moments::moment_bell_inversion(&p, t, m, laplace::DEFAULT_STAGES))?;
                        entries.push(MomentEntry { m, value: e.value, method: MomentMethod::Bell, err: e.err });
                    }
                    (MomentTable { t, entries }, 0)
                }
                MomentsMethod::Mc => {
                    let exec = exec()?;
                    let mut entries = Vec::new();
                    for m in 1..=max_m {
                        let s = sojourn_core::rng::derive_seed(seed.seed, m as u64);
                        let r = core(moments::moment_sampling_mc(&model, t, m, paths, steps, s, &exec))?;
                        entries.push(MomentEntry { m, value: r.estimate * t.powi(m as i32), method: MomentMethod::MonteCarlo, err: r.se * t.powi(m as i32) });
                    }
                    (MomentTable { t, entries }, (paths * max_m) as u64)
                }
            };
            let header = Header::new(model.to_string(), seed.seed, streams).param("t", t);
            let mut w = open_output(out.as_deref())?;
            write_json(&mut w, &header, &MomentsDoc::from(&table))?;
        }
        Command::Laplace { model, q, lambda, method } => {
            let query = core(LaplaceQuery::new(q, lambda))?;
            let g = match method {
                LaplaceMethod::Quad => {
                    let p = core(model.positivity_function())?;
                    core(g_double_laplace_quadrature(&p, query))?
                }
                LaplaceMethod::Closed => closed_form(&model, query)?,
            };
            println!("{g}");
        }
        Command::Invert { model, lambda, t, stages, method } => {
            let r = match method {
                LaplaceMethod::Quad => {
                    let p = core(model.positivity_function())?;
                    core(laplace::laplace_of_occupation(&p, lambda, t, stages))?
                }
                LaplaceMethod::Closed => {
                    closed_form(&model, core(LaplaceQuery::new(1.0, lambda))?)?;
                    core(laplace::gaver_stehfest_invert(
                        |q| closed_form(&model, LaplaceQuery { q, lambda }).unwrap_or(f64::NAN),
                        t,
                        stages,
                    ))?
                }
            };
            println!("{}", r.value);
            println!("stability {:e} {}", r.stability, if r.stable { "stable" } else { "unstable" });
        }
        Command::HalfstableDensity { mu, t, points, out } => {
            if points == 0 {
                return Err(usage("--points must be positive"));
            }
            let law = core(HalfStableLaw::new(mu, t))?;
            let header = Header::new(ProcessModel::HalfStableSubordinatorDrift { mu }.to_string(), 0, 0)
                .param("t", t)
                .param("atom0", law.atom0());
            let mut rows = Vec::with_capacity(points);
            for i in 0..points {
                let x = t * (i as f64 + 0.5) / points as f64;
                rows.push(vec![fmt_f64(x), fmt_f64(law.density(x)), fmt_f64(core(law.cdf_at(x))?)]);
            }
            let mut w = open_output(out.as_deref())?;
            write_csv(&mut w, &header, &["x", "density", "cdf"], rows)?;
            w.flush()?;
        }
        Command::Verify { seed, quick, only, json } => {
            let exec = exec()?;
            let mode = if quick { Mode::Quick } else { Mode::Full };
            let ids: Vec<u8> = if only.is_empty() { verify::CRITERIA.iter().map(|c| c.0).collect() } else { only };
            for id in &ids {
                if !verify::CRITERIA.iter().any(|c| c.0 == *id) {
                    return Err(usage(format!("no criterion {id}")));
                }
            }
            let mut reports = Vec::new();
            let stdout = std::io::stdout();
            for id in ids {
                let r = verify::run_criterion(id, mode, seed.seed, &exec);
                let mut lock = stdout.lock();
                writeln!(lock, "{}", verify::summary_line(&r))?;
                for line in verify::detail_lines(&r) {
                    writeln!(lock, "{line}")?;
                }
                reports.push(r);
            }
            let passed = reports.iter().filter(|r| r.pass).count();
            println!("{passed}/{} criteria passed", reports.len());
            if let Some(path) = json {
                let header = Header::new("verify", seed.seed, 0);
                let w = open_output(Some(&path))?;
                write_json(w, &header, &VerifyDoc { mode, criteria: &reports })?;
            }
            return Ok(if passed == reports.len() { 0 } else { 1 });
        }
    }
    Ok(0)
}

/// `A_t` for each path in index order.
fn sample_indexed_occupations<E: sojourn_core::Executor>(
    model: &ProcessModel,
    t: f64,
    steps: usize,
    paths: usize,
    seed: u64,
    exec: &E,
) -> sojourn_core::Result<Vec<f64>> {
    exec.map_indexed(paths, |i| {
        let mut rng = sojourn_core::RandomStream::new(seed, i as u64);
        sojourn_core::occupation::occupation_sample(model, t, steps, &mut rng).map(|s| s.a_t)
    })
    .into_iter()
    .collect()
}

fn closed_form(model: &ProcessModel, query: LaplaceQuery) -> anyhow::Result<f64> {
    let p = core(model.positivity_function())?;
    if let Some(c) = p.constant() {
        return core(g_closed_constant(c, query));
    }
    match *model {
        ProcessModel::HalfStableSubordinatorDrift { mu } => core(g_closed_halfstable(mu, query)),
        _ => bail!(usage(format!("no closed form for model `{model}`"))),
    }
}

#[derive(Serialize)]
struct MomentsDoc {
    t: f64,
    entries: Vec<MomentRow>,
}

#[derive(Serialize)]
struct MomentRow {
    m: usize,
    value: f64,
    method: &'static str,
    err: f64,
}

impl From<&MomentTable> for MomentsDoc {
    fn from(table: &MomentTable) -> Self {
        Self {
            t: table.t,
            entries: table
                .entries
                .iter()
                .map(|e| MomentRow { m: e.m, value: e.value, method: e.method.tag(), err: e.err })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct VerifyDoc<'a> {
    mode: Mode,
    criteria: &'a [verify::CriterionReport],
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["sojourn", "no-such-command"]), 2);
        assert_eq!(run(["sojourn", "positivity", "--model", "bogus", "--t", "1"]), 2);
        assert_eq!(run(["sojourn", "positivity", "--model", "bm", "--t", "-1"]), 2);
        assert_eq!(run(["sojourn", "laplace", "--model", "bm-drift:1", "--q", "1", "--lambda", "1", "--method", "closed"]), 2);
        assert_eq!(run(["sojourn", "verify", "--only", "12"]), 2);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["sojourn", "--help"]), 0);
    }

    #[test]
    fn closed_forms_by_model() {
        let q = LaplaceQuery::new(1.0, 3.0).unwrap();
        assert!((closed_form(&ProcessModel::ConstantPositivity { c: 0.5 }, q).unwrap() - 0.5).abs() < 1e-15);
        assert!((closed_form(&ProcessModel::BrownianMotion, q).unwrap() - 0.5).abs() < 1e-15);
        let q = LaplaceQuery::new(0.75, 1.25).unwrap();
        let g = closed_form(&ProcessModel::HalfStableSubordinatorDrift { mu: 1.0 }, q).unwrap();
        assert!((g - 8.0 / 9.0).abs() < 1e-15);
    }
}
