//! Pipeline stages behind the `uctmc` binary.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use serde_json::json;

use uctmc_core::checker::{
    bound_all, region_to_curve, solve_all, ApproxOptions, CurveBand, MeasureSet, Solutions,
    DEFAULT_EPSILON, DEFAULT_REL_GAP, MIN_EPSILON,
};
use uctmc_core::model::{parse_model, ParametricCtmc};
use uctmc_core::sampling::{sample_valuations, SampleSet};
use uctmc_core::scenario::{bound_outcome, rho_grid, Mode, Regions, DEFAULT_BETAS};

pub const ARTIFACTS: [&str; 5] = [
    "samples.json",
    "solutions.json",
    "regions.json",
    "band.csv",
    "summary.json",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exact,
    Approx,
}

impl CheckMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckMode::Exact => "exact",
            CheckMode::Approx => "approx",
        }
    }
}

/// Costs of relaxation: either `auto:k` (the first `k` grid values) or an
/// explicit list.
#[derive(Debug, Clone, PartialEq)]
pub enum RhoSpec {
    Auto(usize),
    List(Vec<f64>),
}

impl RhoSpec {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        if let Some(k) = text.strip_prefix("auto:") {
            return Ok(RhoSpec::Auto(
                k.trim().parse().context("auto:k needs an integer")?,
            ));
        }
        Ok(RhoSpec::List(parse_list(text)?))
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            RhoSpec::Auto(k) => rho_grid(*k),
            RhoSpec::List(v) => v.clone(),
        }
    }
}

impl fmt::Display for RhoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoSpec::Auto(k) => write!(f, "auto:{k}"),
            RhoSpec::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

/// Comma-separated list of numbers.
pub fn parse_list(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("not a number: {s:?}"))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: PathBuf,
    pub measures: PathBuf,
    pub n: usize,
    pub seed: u64,
    pub mode: CheckMode,
    pub eps: f64,
    pub rel_gap: f64,
    /// Initial exploration threshold in approximate mode.
    pub delta: f64,
    pub cluster_radius: Option<f64>,
    pub rho: RhoSpec,
    pub betas: Vec<f64>,
    pub threads: usize,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(
        model: impl Into<PathBuf>,
        measures: impl Into<PathBuf>,
        out: impl Into<PathBuf>,
    ) -> Self {
        RunConfig {
            model: model.into(),
            measures: measures.into(),
            n: 100,
            seed: 0,
            mode: CheckMode::Exact,
            eps: DEFAULT_EPSILON,
            rel_gap: DEFAULT_REL_GAP,
            delta: ApproxOptions::default().delta,
            cluster_radius: None,
            rho: RhoSpec::Auto(5),
            betas: DEFAULT_BETAS.to_vec(),
            threads: 1,
            out: out.into(),
        }
    }

    pub fn approx_options(&self) -> ApproxOptions {
        ApproxOptions {
            delta: self.delta,
            eps: self.eps,
            rel_gap: self.rel_gap,
        }
    }
}

fn rho_diagnostic(rho: f64) -> Option<String> {
    if !(rho.is_finite() && rho > 0.0) {
        return Some(format!("rho: {rho} must be positive and finite"));
    }
    let inv = 1.0 / rho;
    if (inv - inv.round()).abs() <= 1e-9 * inv.max(1.0) {
        return Some(format!("rho: {rho} is critical (1/rho is an integer)"));
    }
    None
}

fn beta_diagnostics(betas: &[f64], out: &mut Vec<String>) {
    if betas.is_empty() {
        out.push("beta: at least one confidence level is needed".into());
    }
    if betas.iter().any(|b| !(*b > 0.0 && *b < 1.0)) {
        out.push("beta: must lie in (0,1)".into());
    }
}

/// Problems that prevent `cfg` from running; empty iff runnable.
pub fn validate_config(cfg: &RunConfig) -> Vec<String> {
    let mut out = Vec::new();
    if !cfg.model.is_file() {
        out.push("model: file not found".into());
    }
    if !cfg.measures.is_file() {
        out.push("measures: file not found".into());
    }
    if cfg.n == 0 {
        out.push("n: must be at least 1".into());
    }
    if cfg.threads == 0 {
        out.push("threads: must be at least 1".into());
    }
    if !(cfg.eps >= MIN_EPSILON && cfg.eps < 1.0) {
        out.push(format!("eps: must lie in [{MIN_EPSILON:e}, 1)"));
    }
    if cfg.mode == CheckMode::Approx {
        if !(cfg.rel_gap > 0.0 && cfg.rel_gap.is_finite()) {
            out.push("rel_gap: must be positive".into());
        }
        if !(cfg.delta > 0.0 && cfg.delta <= 1.0) {
            out.push("delta: must lie in (0,1]".into());
        }
        if let Some(r) = cfg.cluster_radius {
            if !(r >= 0.0 && r.is_finite()) {
                out.push("cluster_radius: must be nonnegative".into());
            }
        }
    }
    match &cfg.rho {
        RhoSpec::Auto(0) => out.push("rho: auto grid needs k >= 1".into()),
        RhoSpec::Auto(_) => {}
        RhoSpec::List(v) if v.is_empty() => out.push("rho: empty list".into()),
        RhoSpec::List(v) => out.extend(v.iter().filter_map(|&r| rho_diagnostic(r))),
    }
    beta_diagnostics(&cfg.betas, &mut out);
    out
}

pub fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn load_model(path: &Path) -> anyhow::Result<ParametricCtmc> {
    Ok(parse_model(&read(path)?)?)
}

pub fn load_measures(path: &Path) -> anyhow::Result<MeasureSet> {
    Ok(MeasureSet::from_json(&read(path)?)?)
}

/// Solution vectors of all sampled valuations.
pub fn check_samples(
    m: &ParametricCtmc,
    phi: &MeasureSet,
    samples: &SampleSet,
    mode: CheckMode,
    opts: ApproxOptions,
    cluster_radius: Option<f64>,
    threads: usize,
) -> anyhow::Result<Solutions> {
    if samples
        .valuations
        .iter()
        .any(|u| u.len() != m.parameters.len())
    {
        bail!(
            "samples do not match the model's {} parameters",
            m.parameters.len()
        );
    }
    let measure_ids = phi.ids();
    Ok(match mode {
        CheckMode::Exact => Solutions::Exact {
            measure_ids,
            solutions: solve_all(m, &samples.valuations, phi, opts.eps, threads)?,
        },
        CheckMode::Approx => Solutions::Approx {
            measure_ids,
            solutions: bound_all(m, &samples.valuations, phi, opts, cluster_radius, threads)?,
        },
    })
}

/// One outcome per cost of relaxation.
pub fn solve_regions(sols: &Solutions, rhos: &[f64], betas: &[f64]) -> anyhow::Result<Regions> {
    let mode = match sols {
        Solutions::Exact { .. } => Mode::Precise,
        Solutions::Approx { .. } => Mode::Imprecise,
    };
    let intervals = sols.intervals();
    let outcomes = rhos
        .iter()
        .map(|&rho| bound_outcome(&intervals, rho, betas, mode))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Regions {
        measure_ids: sols.measure_ids().to_vec(),
        outcomes,
    })
}

/// Band of the region with index `k`, if the measures form a horizon family.
pub fn band_of(regions: &Regions, phi: &MeasureSet, k: usize) -> anyhow::Result<Option<CurveBand>> {
    let Some(horizons) = phi.horizon_family() else {
        return Ok(None);
    };
    let o = regions
        .outcomes
        .get(k)
        .ok_or_else(|| anyhow!("region index {k} out of range"))?;
    Ok(Some(region_to_curve(
        &o.region.lower,
        &o.region.upper,
        &horizons,
    )?))
}

/// Failure of one pipeline stage.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub source: anyhow::Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {:#}", self.stage, self.source)
    }
}

impl std::error::Error for StageError {}

/// Wall time per stage in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub stages: Vec<(&'static str, f64)>,
    pub total: f64,
}

struct Timer {
    start: Instant,
    last: Instant,
    stages: Vec<(&'static str, f64)>,
}

impl Timer {
    fn new() -> Self {
        let now = Instant::now();
        Timer {
            start: now,
            last: now,
            stages: Vec::new(),
        }
    }

    fn lap(&mut self, stage: &'static str) {
        let now = Instant::now();
        self.stages.push((stage, (now - self.last).as_secs_f64()));
        self.last = now;
    }
}

fn stage<T>(name: &'static str, r: anyhow::Result<T>) -> Result<T, StageError> {
    r.map_err(|source| StageError {
        stage: name,
        source,
    })
}

/// Runs sample, check, region and curve and writes the artifacts into
/// `cfg.out`. Artifacts written before a failure are kept.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Summary, StageError> {
    let problems = validate_config(cfg);
    if !problems.is_empty() {
        return Err(StageError {
            stage: "config",
            source: anyhow!(problems.join("; ")),
        });
    }
    let mut timer = Timer::new();

    let (m, phi) = stage(
        "init",
        (|| {
            fs::create_dir_all(&cfg.out)
                .with_context(|| format!("cannot create {}", cfg.out.display()))?;
            let m = load_model(&cfg.model)?;
            let phi = load_measures(&cfg.measures)?;
            phi.validate_for(&m)?;
            let s = m.structure()?;
            log::info!("{}: {} states", m.name, s.num_states());
            Ok((m, phi))
        })(),
    )?;
    timer.lap("init");

    let samples = stage(
        "sample",
        (|| {
            let s = sample_valuations(&m, cfg.n, cfg.seed)?;
            write(&cfg.out.join("samples.json"), &s.to_json())?;
            Ok(s)
        })(),
    )?;
    timer.lap("sample");

    let sols = stage(
        "check",
        (|| {
            let sols = check_samples(
                &m,
                &phi,
                &samples,
                cfg.mode,
                cfg.approx_options(),
                cfg.cluster_radius,
                cfg.threads,
            )?;
            write(&cfg.out.join("solutions.json"), &sols.to_json())?;
            Ok(sols)
        })(),
    )?;
    timer.lap("check");

    let regions = stage(
        "region",
        (|| {
            let r = solve_regions(&sols, &cfg.rho.values(), &cfg.betas)?;
            write(&cfg.out.join("regions.json"), &r.to_json())?;
            Ok(r)
        })(),
    )?;
    timer.lap("region");

    stage(
        "curve",
        (|| {
            let csv = match band_of(&regions, &phi, 0)? {
                Some(b) => b.to_csv(),
                None => {
                    log::warn!("measures are not a horizon family; band.csv has no rows");
                    "t,lower,upper\n".to_string()
                }
            };
            write(&cfg.out.join("band.csv"), &csv)
        })(),
    )?;
    timer.lap("curve");

    let total = (timer.last - timer.start).as_secs_f64();
    let summary = Summary {
        stages: timer.stages,
        total,
    };
    let timings: serde_json::Map<String, serde_json::Value> = summary
        .stages
        .iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    let doc = json!({
        "model": m.name,
        "mode": cfg.mode.as_str(),
        "n": cfg.n,
        "seed": cfg.seed,
        "rho": cfg.rho.to_string(),
        "betas": cfg.betas,
        "threads": cfg.threads,
        "rejected": samples.rejected,
        "regions": regions.outcomes.len(),
        "timings": timings,
        "total": total,
    });
    stage(
        "summary",
        write(
            &cfg.out.join("summary.json"),
            &serde_json::to_string_pretty(&doc).expect("serialisable"),
        ),
    )?;
    Ok(summary)
}
