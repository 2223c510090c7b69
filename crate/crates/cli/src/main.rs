use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use uctmc_cli::{
    band_of, check_samples, load_measures, load_model, parse_list, read, run_pipeline,
    solve_regions, validate_config, write, CheckMode, RhoSpec, RunConfig,
};
use uctmc_core::checker::{refine_solution, ApproxOptions, Solutions, DEFAULT_EPSILON};
use uctmc_core::sampling::{sample_valuations, SampleSet};
use uctmc_core::scenario::{
    baseline_frequentist, baseline_independent, refine_until, Regions, DEFAULT_BETAS,
};

#[derive(Parser)]
#[command(
    name = "uctmc",
    version,
    about = "Prediction regions for CTMCs with uncertain rates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw parameter valuations.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute solution vectors of sampled valuations.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        measures: PathBuf,
        #[arg(long)]
        samples: PathBuf,
        #[command(flatten)]
        check: CheckArgs,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve prediction regions from a solutions file.
    Region {
        #[arg(long)]
        solutions: PathBuf,
        #[command(flatten)]
        scen: ScenarioArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Refine interval solutions on the region boundary until the bound stalls.
    Refine {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        measures: PathBuf,
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        solutions: PathBuf,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 0.9)]
        beta: f64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        eps: f64,
        #[arg(long, default_value_t = 1e-3)]
        target_gain: f64,
        #[arg(long, default_value_t = 10)]
        max_iters: usize,
        /// Refined solutions.
        #[arg(long)]
        out_solutions: PathBuf,
        /// Iteration history and final region.
        #[arg(long)]
        out: PathBuf,
    },
    /// Baseline bounds for comparison.
    Baseline {
        #[command(subcommand)]
        kind: Baseline,
    },
    /// Probability-curve band of one region.
    Curve {
        #[arg(long)]
        regions: PathBuf,
        #[arg(long)]
        measures: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full pipeline: sample, check, region, curve.
    Run {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        measures: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        check: CheckArgs,
        #[command(flatten)]
        scen: ScenarioArgs,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum Baseline {
    /// One problem per measure, combined by the union bound.
    Independent {
        #[arg(long)]
        solutions: PathBuf,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 0.9)]
        beta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fraction of fresh solution vectors inside a region.
    Frequentist {
        #[arg(long)]
        regions: PathBuf,
        /// Solutions of fresh samples (exact mode).
        #[arg(long)]
        solutions: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Approx,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    eps: f64,
    #[arg(long, default_value_t = ApproxOptions::default().rel_gap)]
    rel_gap: f64,
    #[arg(long, default_value_t = ApproxOptions::default().delta)]
    delta: f64,
    /// Reuse explored states within clusters of this standardised radius.
    #[arg(long)]
    cluster_radius: Option<f64>,
}

impl CheckArgs {
    fn mode(&self) -> CheckMode {
        match self.mode {
            ModeArg::Exact => CheckMode::Exact,
            ModeArg::Approx => CheckMode::Approx,
        }
    }

    fn options(&self) -> ApproxOptions {
        ApproxOptions {
            delta: self.delta,
            eps: self.eps,
            rel_gap: self.rel_gap,
        }
    }
}

#[derive(Args)]
struct ScenarioArgs {
    /// `auto:k` or a comma-separated list.
    #[arg(long, default_value = "auto:5")]
    rho: String,
    /// Comma-separated confidence levels.
    #[arg(long)]
    beta: Option<String>,
}

impl ScenarioArgs {
    fn rho(&self) -> anyhow::Result<RhoSpec> {
        RhoSpec::parse(&self.rho).context("rho")
    }

    fn betas(&self) -> anyhow::Result<Vec<f64>> {
        match &self.beta {
            Some(b) => parse_list(b).context("beta"),
            None => Ok(DEFAULT_BETAS.to_vec()),
        }
    }
}

fn emit(out: Option<&Path>, doc: serde_json::Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&doc).expect("serialisable");
    match out {
        Some(p) => write(p, &text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_solutions(path: &Path) -> anyhow::Result<Solutions> {
    Ok(Solutions::from_json(&read(path)?)?)
}

fn load_samples(path: &Path) -> anyhow::Result<SampleSet> {
    Ok(SampleSet::from_json(&read(path)?)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Sample {
            model,
            n,
            seed,
            out,
        } => {
            let m = load_model(&model)?;
            let s = sample_valuations(&m, n, seed)?;
            log::info!("{} valuations, {} rejected", s.valuations.len(), s.rejected);
            write(&out, &s.to_json())
        }
        Command::Check {
            model,
            measures,
            samples,
            check,
            threads,
            out,
        } => {
            if threads == 0 {
                bail!("threads: must be at least 1");
            }
            let m = load_model(&model)?;
            let phi = load_measures(&measures)?;
            let s = load_samples(&samples)?;
            let sols = check_samples(
                &m,
                &phi,
                &s,
                check.mode(),
                check.options(),
                check.cluster_radius,
                threads,
            )?;
            write(&out, &sols.to_json())
        }
        Command::Region {
            solutions,
            scen,
            out,
        } => {
            let sols = load_solutions(&solutions)?;
            let regions = solve_regions(&sols, &scen.rho()?.values(), &scen.betas()?)?;
            write(&out, &regions.to_json())
        }
        Command::Refine {
            model,
            measures,
            samples,
            solutions,
            rho,
            beta,
            eps,
            target_gain,
            max_iters,
            out_solutions,
            out,
        } => {
            let m = load_model(&model)?;
            let phi = load_measures(&measures)?;
            let s = load_samples(&samples)?;
            let sols = load_solutions(&solutions)?;
            let ids = sols.measure_ids().to_vec();
            if ids != phi.ids() {
                bail!("solutions were computed for different measures");
            }
            let intervals = sols.intervals();
            if intervals.len() != s.valuations.len() {
                bail!("solutions and samples differ in length");
            }
            let report = refine_until::<anyhow::Error, _>(
                intervals,
                rho,
                beta,
                target_gain,
                max_iters,
                |prev| {
                    let u = &s.valuations[prev.valuation_index];
                    Ok(refine_solution(prev, &m, u, &phi, eps)?)
                },
            )?;
            let refined = Solutions::Approx {
                measure_ids: ids.clone(),
                solutions: report.solutions.clone(),
            };
            write(&out_solutions, &refined.to_json())?;
            let regions = Regions {
                measure_ids: ids,
                outcomes: vec![report.outcome.clone()],
            };
            let history: Vec<_> = report
                .history
                .iter()
                .map(|h| {
                    json!({
                        "refined": h.refined,
                        "complexity_bound": h.complexity_bound,
                        "eta": h.eta,
                        "accepted": h.accepted,
                    })
                })
                .collect();
            let region: serde_json::Value = serde_json::from_str(&regions.to_json())?;
            emit(
                Some(&out),
                json!({ "rho": rho, "beta": beta, "history": history, "regions": region }),
            )
        }
        Command::Baseline { kind } => match kind {
            Baseline::Independent {
                solutions,
                rho,
                beta,
                out,
            } => {
                let sols = match load_solutions(&solutions)? {
                    Solutions::Exact { solutions, .. } => solutions,
                    Solutions::Approx { .. } => {
                        bail!("the independent baseline needs exact solutions")
                    }
                };
                let b = baseline_independent(&sols, rho, beta)?;
                emit(
                    out.as_deref(),
                    json!({
                        "rho": rho,
                        "beta": beta,
                        "beta_tilde": b.beta_tilde,
                        "complexities": b.complexities,
                        "etas": b.etas,
                        "combined": b.combined,
                    }),
                )
            }
            Baseline::Frequentist {
                regions,
                solutions,
                index,
                out,
            } => {
                let r = Regions::from_json(&read(&regions)?)?;
                let o = r
                    .outcomes
                    .get(index)
                    .ok_or_else(|| anyhow!("region index {index} out of range"))?;
                let fresh = match load_solutions(&solutions)? {
                    Solutions::Exact {
                        measure_ids,
                        solutions,
                    } => {
                        if measure_ids != r.measure_ids {
                            bail!("fresh solutions were computed for different measures");
                        }
                        solutions
                    }
                    Solutions::Approx { .. } => bail!("fresh solutions must be exact"),
                };
                let fraction = baseline_frequentist(&fresh, &o.region)?;
                let eta: serde_json::Map<String, serde_json::Value> = o
                    .eta_by_beta
                    .iter()
                    .map(|(b, e)| (b.to_string(), json!(e)))
                    .collect();
                emit(
                    out.as_deref(),
                    json!({ "rho": o.rho, "fresh": fresh.len(), "fraction": fraction, "eta": eta }),
                )
            }
        },
        Command::Curve {
            regions,
            measures,
            index,
            out,
        } => {
            let r = Regions::from_json(&read(&regions)?)?;
            let phi = load_measures(&measures)?;
            let band = band_of(&r, &phi, index)?
                .ok_or_else(|| anyhow!("measures do not form a horizon family"))?;
            write(&out, &band.to_csv())
        }
        Command::Run {
            model,
            measures,
            n,
            seed,
            check,
            scen,
            threads,
            out,
        } => {
            let cfg = RunConfig {
                model,
                measures,
                n,
                seed,
                mode: check.mode(),
                eps: check.eps,
                rel_gap: check.rel_gap,
                delta: check.delta,
                cluster_radius: check.cluster_radius,
                rho: scen.rho()?,
                betas: scen.betas()?,
                threads,
                out,
            };
            let problems = validate_config(&cfg);
            if !problems.is_empty() {
                bail!("invalid configuration:\n  {}", problems.join("\n  "));
            }
            let s = run_pipeline(&cfg)?;
            log::info!("pipeline finished in {:.3}s", s.total);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("UCTMC_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
